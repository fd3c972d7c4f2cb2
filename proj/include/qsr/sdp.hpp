#pragma once

#include <map>
#include <string>
#include <vector>

#include "qsr/linalg.hpp"

namespace qsr::sdp {

/// Handle to a matrix variable of a Problem. Scalars are 1x1 Hermitian variables.
struct Var {
  int id = -1;
};

/// Real affine function of the variable coordinates.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}

  LinearExpr& add(Index coord, double coef);
  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator-=(const LinearExpr& other);
  LinearExpr& operator*=(double factor);
  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
  friend LinearExpr operator*(double f, LinearExpr a) { return a *= f; }

  double constant() const { return constant_; }
  const std::map<Index, double>& terms() const { return terms_; }
  double evaluate(const RealVector& y) const;

 private:
  double constant_ = 0.0;
  std::map<Index, double> terms_;
};

struct SolverConfig {
  double gap_tol = 1e-8;         // relative duality gap
  double feas_tol = 1e-8;        // relative primal and dual residuals
  int max_iterations = 200;
  double step_fraction = 0.95;   // fraction of the distance to the cone boundary
  double infeasibility_tol = 1e-8;
};

enum class Status { optimal, infeasible, unbounded, max_iterations, numerical_failure };

std::string to_string(Status s);

struct Solution {
  Status status = Status::numerical_failure;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;               // |primal - dual|
  double relative_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  /// Normalized residual of the Farkas ray when status is infeasible or unbounded.
  double certificate_residual = 0.0;
  int iterations = 0;
  RealVector y;                   // variable coordinates
};

struct FeasibilityReport {
  double max_eigenvalue_violation = 0.0;  // max over blocks of max(0, -lambda_min)
  double max_equality_residual = 0.0;
};

/// Hermitian-cone program in the form
///   minimize  c^T y  subject to  sum_i y_i F_i + F_0 >= 0 (block-wise), A y = b,
/// where each block is a complex Hermitian or real symmetric affine expression
/// in the coordinates of the declared matrix variables.
class Problem {
 public:
  /// n x n Hermitian variable: n diagonal coordinates, then Re/Im pairs above the diagonal.
  Var hermitian(Index n);
  /// General complex rows x cols variable: Re/Im pairs in column-major order.
  Var complex(Index rows, Index cols);
  Var scalar() { return hermitian(1); }

  Index num_coordinates() const { return num_coords_; }
  Index rows(Var v) const;
  Index cols(Var v) const;

  /// Tr X for a square variable (real part for complex ones).
  LinearExpr trace(Var v) const;
  /// Re Tr(C X).
  LinearExpr trace_with(const Matrix& c, Var v) const;
  /// Re of entry (i, j); scalars use (0, 0).
  LinearExpr real_entry(Var v, Index i, Index j) const;
  LinearExpr imag_entry(Var v, Index i, Index j) const;

  /// New Hermitian block of the given side; `real` blocks must have real data.
  int add_block(Index side, bool real = false);
  /// Adds coef * (left (x) X) at (row, col). Off-diagonal placements also add
  /// the adjoint at (col, row). An empty `left` means the 1x1 identity.
  void add_term(int block, Var v, Index row, Index col, cplx coef = 1.0, const Matrix& left = Matrix());
  /// Adds a constant matrix at (row, col), mirrored like add_term.
  void add_constant(int block, const Matrix& m, Index row, Index col);

  /// expr >= 0
  void add_nonnegative(const LinearExpr& expr);
  /// expr == 0
  void add_equality(const LinearExpr& expr);
  void minimize(const LinearExpr& objective);

  /// Value of a variable at coordinates y.
  Matrix value(Var v, const RealVector& y) const;
  /// Coordinates that reproduce the given variable values (Hermitian part for Hermitian variables).
  RealVector coordinates(const std::vector<std::pair<Var, Matrix>>& values) const;

  Solution solve(const SolverConfig& cfg = {}) const;
  FeasibilityReport check_feasibility(const RealVector& y) const;

  /// Plain-text dump in the SDPA sparse format. Equalities become pairs of
  /// inequalities in a trailing diagonal block.
  std::string to_sdpa() const;

  struct Entry {
    Index row;
    Index col;
    double value;
  };

  /// Lowered real-symmetric block: F_0 entries and per-coordinate entries (both triangles).
  struct RealBlock {
    Index side = 0;
    std::vector<Entry> constant;
    std::vector<std::pair<Index, std::vector<Entry>>> coords;
  };

  std::vector<RealBlock> lower() const;

 private:
  struct VarInfo {
    bool hermitian;
    Index rows;
    Index cols;
    Index offset;
  };
  struct Term {
    int var;
    Index row;
    Index col;
    cplx coef;
    Matrix left;
  };
  struct ConstTerm {
    Matrix m;
    Index row;
    Index col;
  };
  struct Block {
    Index side;
    bool real;
    std::vector<Term> terms;
    std::vector<ConstTerm> constants;
  };

  const VarInfo& info(Var v) const;
  /// Complex entries (r, c, value) of the basis matrix of one coordinate.
  std::vector<std::pair<std::pair<Index, Index>, cplx>> basis(const VarInfo& vi, Index local) const;

  std::vector<VarInfo> vars_;
  std::vector<Block> blocks_;
  std::vector<LinearExpr> nonnegatives_;
  std::vector<LinearExpr> equalities_;
  LinearExpr objective_;
  Index num_coords_ = 0;
};

}  // namespace qsr::sdp
