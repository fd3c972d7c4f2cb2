#include "qsr/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <sstream>

#include "qsr/error.hpp"

namespace qsr::sdp {

// --- expressions --------------------------------------------------------------

LinearExpr& LinearExpr::add(Index coord, double coef) {
  if (coef != 0.0) terms_[coord] += coef;
  return *this;
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  constant_ += other.constant_;
  for (const auto& [k, v] : other.terms_) terms_[k] += v;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& other) {
  constant_ -= other.constant_;
  for (const auto& [k, v] : other.terms_) terms_[k] -= v;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double factor) {
  constant_ *= factor;
  for (auto& kv : terms_) kv.second *= factor;
  return *this;
}

double LinearExpr::evaluate(const RealVector& y) const {
  double s = constant_;
  for (const auto& [k, v] : terms_) s += v * y(k);
  return s;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::max_iterations: return "max_iterations";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

// --- variables ---------------------------------------------------------------

Var Problem::hermitian(Index n) {
  if (n < 1) throw DomainError("variable side must be positive");
  vars_.push_back({true, n, n, num_coords_});
  num_coords_ += n * n;
  return {static_cast<int>(vars_.size()) - 1};
}

Var Problem::complex(Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw DomainError("variable shape must be positive");
  vars_.push_back({false, rows, cols, num_coords_});
  num_coords_ += 2 * rows * cols;
  return {static_cast<int>(vars_.size()) - 1};
}

const Problem::VarInfo& Problem::info(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(vars_.size())) throw DomainError("unknown SDP variable");
  return vars_[static_cast<std::size_t>(v.id)];
}

Index Problem::rows(Var v) const { return info(v).rows; }
Index Problem::cols(Var v) const { return info(v).cols; }

namespace {

/// Position of the Re coordinate of pair (i, j), i < j, among the off-diagonal pairs.
Index pair_index(Index n, Index i, Index j) { return n + 2 * (i * n - i * (i + 1) / 2 + (j - i - 1)); }

}  // namespace

std::vector<std::pair<std::pair<Index, Index>, cplx>> Problem::basis(const VarInfo& vi, Index local) const {
  const cplx I(0.0, 1.0);
  if (!vi.hermitian) {
    const Index cell = local / 2;
    const Index i = cell % vi.rows, j = cell / vi.rows;
    return {{{i, j}, local % 2 == 0 ? cplx(1.0) : I}};
  }
  const Index n = vi.rows;
  if (local < n) return {{{local, local}, cplx(1.0)}};
  const Index p = (local - n) / 2;
  // invert the row-major enumeration of pairs above the diagonal
  Index i = 0, start = 0;
  while (start + (n - 1 - i) <= p) {
    start += n - 1 - i;
    ++i;
  }
  const Index j = i + 1 + (p - start);
  if ((local - n) % 2 == 0) return {{{i, j}, cplx(1.0)}, {{j, i}, cplx(1.0)}};
  return {{{i, j}, I}, {{j, i}, -I}};
}

LinearExpr Problem::trace(Var v) const {
  const VarInfo& vi = info(v);
  if (vi.rows != vi.cols) throw DomainError("trace of a non-square variable");
  LinearExpr e;
  for (Index k = 0; k < vi.rows; ++k) {
    if (vi.hermitian) e.add(vi.offset + k, 1.0);
    else e.add(vi.offset + 2 * (k + vi.rows * k), 1.0);
  }
  return e;
}

LinearExpr Problem::trace_with(const Matrix& c, Var v) const {
  const VarInfo& vi = info(v);
  if (c.rows() != vi.cols || c.cols() != vi.rows) throw DomainError("trace_with shape mismatch");
  LinearExpr e;
  const Index count = vi.hermitian ? vi.rows * vi.rows : 2 * vi.rows * vi.cols;
  for (Index k = 0; k < count; ++k) {
    cplx s = 0;
    for (const auto& [rc, val] : basis(vi, k)) s += c(rc.second, rc.first) * val;
    e.add(vi.offset + k, s.real());
  }
  return e;
}

LinearExpr Problem::real_entry(Var v, Index i, Index j) const {
  const VarInfo& vi = info(v);
  LinearExpr e;
  if (!vi.hermitian) return e.add(vi.offset + 2 * (i + vi.rows * j), 1.0);
  if (i == j) return e.add(vi.offset + i, 1.0);
  return e.add(vi.offset + pair_index(vi.rows, std::min(i, j), std::max(i, j)), 1.0);
}

LinearExpr Problem::imag_entry(Var v, Index i, Index j) const {
  const VarInfo& vi = info(v);
  LinearExpr e;
  if (!vi.hermitian) return e.add(vi.offset + 2 * (i + vi.rows * j) + 1, 1.0);
  if (i == j) return e;
  return e.add(vi.offset + pair_index(vi.rows, std::min(i, j), std::max(i, j)) + 1, i < j ? 1.0 : -1.0);
}

// --- constraints ----------------------------------------------------------------

int Problem::add_block(Index side, bool real) {
  if (side < 1) throw DomainError("block side must be positive");
  blocks_.push_back({side, real, {}, {}});
  return static_cast<int>(blocks_.size()) - 1;
}

void Problem::add_term(int block, Var v, Index row, Index col, cplx coef, const Matrix& left) {
  if (block < 0 || block >= static_cast<int>(blocks_.size())) throw DomainError("unknown block");
  const VarInfo& vi = info(v);
  Matrix l = left.size() == 0 ? Matrix::Identity(1, 1) : left;
  Block& b = blocks_[static_cast<std::size_t>(block)];
  if (row + l.rows() * vi.rows > b.side || col + l.cols() * vi.cols > b.side)
    throw DomainError("term exceeds block bounds");
  b.terms.push_back({v.id, row, col, coef, std::move(l)});
}

void Problem::add_constant(int block, const Matrix& m, Index row, Index col) {
  if (block < 0 || block >= static_cast<int>(blocks_.size())) throw DomainError("unknown block");
  Block& b = blocks_[static_cast<std::size_t>(block)];
  if (row + m.rows() > b.side || col + m.cols() > b.side) throw DomainError("constant exceeds block bounds");
  b.constants.push_back({m, row, col});
}

void Problem::add_nonnegative(const LinearExpr& expr) { nonnegatives_.push_back(expr); }
void Problem::add_equality(const LinearExpr& expr) { equalities_.push_back(expr); }
void Problem::minimize(const LinearExpr& objective) { objective_ = objective; }

Matrix Problem::value(Var v, const RealVector& y) const {
  const VarInfo& vi = info(v);
  Matrix m = Matrix::Zero(vi.rows, vi.cols);
  const Index count = vi.hermitian ? vi.rows * vi.rows : 2 * vi.rows * vi.cols;
  for (Index k = 0; k < count; ++k)
    for (const auto& [rc, val] : basis(vi, k)) m(rc.first, rc.second) += y(vi.offset + k) * val;
  return m;
}

RealVector Problem::coordinates(const std::vector<std::pair<Var, Matrix>>& values) const {
  RealVector y = RealVector::Zero(num_coords_);
  for (const auto& [v, m] : values) {
    const VarInfo& vi = info(v);
    if (m.rows() != vi.rows || m.cols() != vi.cols) throw DomainError("assignment shape mismatch");
    if (vi.hermitian) {
      const Index n = vi.rows;
      for (Index i = 0; i < n; ++i) {
        y(vi.offset + i) = m(i, i).real();
        for (Index j = i + 1; j < n; ++j) {
          const cplx h = 0.5 * (m(i, j) + std::conj(m(j, i)));
          y(vi.offset + pair_index(n, i, j)) = h.real();
          y(vi.offset + pair_index(n, i, j) + 1) = h.imag();
        }
      }
    } else {
      for (Index j = 0; j < vi.cols; ++j)
        for (Index i = 0; i < vi.rows; ++i) {
          y(vi.offset + 2 * (i + vi.rows * j)) = m(i, j).real();
          y(vi.offset + 2 * (i + vi.rows * j) + 1) = m(i, j).imag();
        }
    }
  }
  return y;
}

// --- lowering ---------------------------------------------------------------------

namespace {

using CplxEntries = std::map<std::pair<Index, Index>, cplx>;

void check_hermitian(const CplxEntries& e) {
  for (const auto& [rc, v] : e) {
    auto it = e.find({rc.second, rc.first});
    const cplx mirror = it == e.end() ? cplx(0.0) : std::conj(it->second);
    if (std::abs(v - mirror) > 1e-12 * (1.0 + std::abs(v)))
      throw DomainError("matrix inequality is not Hermitian");
  }
}

std::vector<Problem::Entry> embed(const CplxEntries& e, Index n, bool real) {
  std::vector<Problem::Entry> out;
  for (const auto& [rc, v] : e) {
    const auto [r, c] = rc;
    if (real) {
      if (std::abs(v.imag()) > 1e-14) throw DomainError("real block has complex data");
      if (v.real() != 0.0) out.push_back({r, c, v.real()});
      continue;
    }
    if (v.real() != 0.0) {
      out.push_back({r, c, v.real()});
      out.push_back({r + n, c + n, v.real()});
    }
    if (v.imag() != 0.0) {
      out.push_back({r, c + n, -v.imag()});
      out.push_back({r + n, c, v.imag()});
    }
  }
  return out;
}

}  // namespace

std::vector<Problem::RealBlock> Problem::lower() const {
  std::vector<RealBlock> out;
  for (const Block& b : blocks_) {
    std::map<Index, CplxEntries> per_coord;
    CplxEntries constant;
    auto place = [&](CplxEntries& dst, Index r, Index c, cplx v, bool mirror) {
      dst[{r, c}] += v;
      if (mirror) dst[{c, r}] += std::conj(v);
    };
    for (const Term& t : b.terms) {
      const VarInfo& vi = vars_[static_cast<std::size_t>(t.var)];
      const bool mirror = t.row != t.col;
      const Index count = vi.hermitian ? vi.rows * vi.rows : 2 * vi.rows * vi.cols;
      for (Index k = 0; k < count; ++k) {
        CplxEntries& dst = per_coord[vi.offset + k];
        for (const auto& [rc, val] : basis(vi, k))
          for (Index a = 0; a < t.left.rows(); ++a)
            for (Index c = 0; c < t.left.cols(); ++c) {
              const cplx lv = t.left(a, c);
              if (lv == cplx(0.0)) continue;
              place(dst, t.row + a * vi.rows + rc.first, t.col + c * vi.cols + rc.second, t.coef * lv * val, mirror);
            }
      }
    }
    for (const ConstTerm& ct : b.constants) {
      const bool mirror = ct.row != ct.col;
      for (Index i = 0; i < ct.m.rows(); ++i)
        for (Index j = 0; j < ct.m.cols(); ++j)
          if (ct.m(i, j) != cplx(0.0)) place(constant, ct.row + i, ct.col + j, ct.m(i, j), mirror);
    }
    RealBlock rb;
    rb.side = b.real ? b.side : 2 * b.side;
    check_hermitian(constant);
    rb.constant = embed(constant, b.side, b.real);
    for (const auto& [k, e] : per_coord) {
      check_hermitian(e);
      auto entries = embed(e, b.side, b.real);
      if (!entries.empty()) rb.coords.emplace_back(k, std::move(entries));
    }
    out.push_back(std::move(rb));
  }
  for (const LinearExpr& e : nonnegatives_) {
    RealBlock rb;
    rb.side = 1;
    if (e.constant() != 0.0) rb.constant.push_back({0, 0, e.constant()});
    for (const auto& [k, v] : e.terms())
      if (v != 0.0) rb.coords.push_back({k, {{0, 0, v}}});
    out.push_back(std::move(rb));
  }
  return out;
}

// --- solver -------------------------------------------------------------------------

namespace {

using Entries = std::vector<Problem::Entry>;

double inner(const Entries& f, const RealMatrix& m) {
  double s = 0;
  for (const auto& e : f) s += e.value * m(e.row, e.col);
  return s;
}

void accumulate(RealMatrix& m, const Entries& f, double scale) {
  for (const auto& e : f) m(e.row, e.col) += scale * e.value;
}

RealMatrix sym(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }

struct BlockState {
  RealMatrix S, Z;
  RealMatrix L, Tinv, T, G;
  RealVector v;  // square roots of the eigenvalues of L^T Z L
  RealMatrix rP;
};

struct Direction {
  RealVector dy, dlambda;
  std::vector<RealMatrix> dS, dZ;
};

/// Largest alpha <= 1 keeping X + alpha dX positive definite, damped by `fraction`.
double step_length(const RealMatrix& X, const RealMatrix& dX, double fraction, bool* ok) {
  Eigen::LLT<RealMatrix> llt(X);
  if (llt.info() != Eigen::Success) {
    *ok = false;
    return 0.0;
  }
  const RealMatrix Linv = llt.matrixL().solve(RealMatrix::Identity(X.rows(), X.rows()));
  const RealMatrix M = sym(Linv * dX * Linv.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<RealMatrix>(M, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (lmin >= 0) return 1.0;
  return std::min(1.0, fraction * (-1.0 / lmin));
}

}  // namespace

Solution Problem::solve(const SolverConfig& cfg) const {
  if (cfg.gap_tol <= 0 || cfg.feas_tol <= 0) throw DomainError("solver tolerances must be positive");
  const std::vector<RealBlock> blocks = lower();
  const Index m = num_coords_;
  const Index p = static_cast<Index>(equalities_.size());
  const std::size_t nb = blocks.size();

  RealVector c = RealVector::Zero(m);
  for (const auto& [k, v] : objective_.terms()) c(k) = v;
  RealMatrix A = RealMatrix::Zero(p, m);
  RealVector b = RealVector::Zero(p);
  for (Index r = 0; r < p; ++r) {
    for (const auto& [k, v] : equalities_[static_cast<std::size_t>(r)].terms()) A(r, k) = v;
    b(r) = -equalities_[static_cast<std::size_t>(r)].constant();
  }

  std::vector<RealMatrix> F0(nb);
  double nu = 0, f0_norm = 0, data_scale = 1.0;
  for (std::size_t k = 0; k < nb; ++k) {
    F0[k] = RealMatrix::Zero(blocks[k].side, blocks[k].side);
    accumulate(F0[k], blocks[k].constant, 1.0);
    nu += static_cast<double>(blocks[k].side);
    f0_norm += F0[k].squaredNorm();
    if (F0[k].size()) data_scale = std::max(data_scale, F0[k].cwiseAbs().maxCoeff());
  }
  f0_norm = std::sqrt(f0_norm);
  if (m > 0) data_scale = std::max(data_scale, c.cwiseAbs().maxCoeff());
  const double c_norm = c.norm(), b_norm = b.norm();
  // coordinates appearing in no block: the Schur matrix is singular along them
  std::vector<bool> covered(static_cast<std::size_t>(m), false);
  for (const auto& blk : blocks)
    for (const auto& [k, e] : blk.coords) covered[static_cast<std::size_t>(k)] = true;
  for (Index k = 0; k < m; ++k)
    if (!covered[static_cast<std::size_t>(k)]) throw DomainError("SDP coordinate appears in no matrix inequality");

  const double xi = 10.0 * data_scale;
  std::vector<BlockState> st(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const Index n = blocks[k].side;
    st[k].S = xi * RealMatrix::Identity(n, n);
    st[k].Z = xi * RealMatrix::Identity(n, n);
  }
  RealVector y = RealVector::Zero(m);
  RealVector lambda = RealVector::Zero(p);

  auto apply_F = [&](std::size_t k, const RealVector& dy) {
    RealMatrix out = RealMatrix::Zero(blocks[k].side, blocks[k].side);
    for (const auto& [i, e] : blocks[k].coords) accumulate(out, e, dy(i));
    return out;
  };
  auto adjoint_F = [&](const std::vector<RealMatrix>& Ms) {
    RealVector out = RealVector::Zero(m);
    for (std::size_t k = 0; k < nb; ++k)
      for (const auto& [i, e] : blocks[k].coords) out(i) += inner(e, Ms[k]);
    return out;
  };

  Solution sol, best;
  double best_merit = std::numeric_limits<double>::infinity();
  auto give_up = [&](Status status) {
    Solution out = best_merit < std::numeric_limits<double>::infinity() ? best : sol;
    out.status = status;
    out.iterations = sol.iterations;
    return out;
  };
  const double c0 = objective_.constant();
  int stalls = 0;
  const bool trace = std::getenv("QSR_SDP_TRACE") != nullptr;

  for (int it = 0; it <= cfg.max_iterations; ++it) {
    sol.iterations = it;
    // residuals and objectives
    double rp_norm = 0, pobj = c.dot(y) + c0, dobj = b.dot(lambda) + c0, mu_num = 0;
    for (std::size_t k = 0; k < nb; ++k) {
      st[k].rP = F0[k] + apply_F(k, y) - st[k].S;
      rp_norm += st[k].rP.squaredNorm();
      dobj -= (F0[k].cwiseProduct(st[k].Z)).sum();
      mu_num += (st[k].S.cwiseProduct(st[k].Z)).sum();
    }
    rp_norm = std::sqrt(rp_norm);
    std::vector<RealMatrix> Zs(nb);
    for (std::size_t k = 0; k < nb; ++k) Zs[k] = st[k].Z;
    const RealVector FstarZ = adjoint_F(Zs);
    const RealVector rd = c - FstarZ - A.transpose() * lambda;
    const RealVector req = b - A * y;
    const double pinf = std::max(rp_norm / (1.0 + f0_norm), req.norm() / (1.0 + b_norm));
    const double dinf = rd.norm() / (1.0 + c_norm);
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    sol.y = y;
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.gap = std::abs(pobj - dobj);
    sol.relative_gap = relgap;
    sol.primal_residual = pinf;
    sol.dual_residual = dinf;
    const double merit = std::max({relgap / cfg.gap_tol, pinf / cfg.feas_tol, dinf / cfg.feas_tol});
    if (merit < best_merit) {
      best_merit = merit;
      best = sol;
    }

    if (trace)
      std::fprintf(stderr, "it %3d pobj %+.10e dobj %+.10e relgap %.2e pinf %.2e dinf %.2e\n", it, pobj, dobj,
                   relgap, pinf, dinf);
    if (relgap <= cfg.gap_tol && pinf <= cfg.feas_tol && dinf <= cfg.feas_tol) {
      sol.status = Status::optimal;
      return sol;
    }
    // Farkas ray for primal infeasibility: F*(Z) + A^T lambda = 0 with positive dual value
    const double ray_value = dobj - c0;
    if (ray_value > 0) {
      const double res = (FstarZ + A.transpose() * lambda).norm() / ray_value;
      if (res <= cfg.infeasibility_tol) {
        sol.status = Status::infeasible;
        sol.certificate_residual = res;
        return sol;
      }
    }
    // improving primal ray: F(y) >= 0, A y = 0, c^T y < 0
    const double descent = -c.dot(y);
    if (descent > 1e6 * (1.0 + f0_norm)) {
      double viol = (A * y).norm();
      for (std::size_t k = 0; k < nb; ++k) {
        const RealMatrix Fy = apply_F(k, y);
        viol = std::max(viol, -Eigen::SelfAdjointEigenSolver<RealMatrix>(Fy, Eigen::EigenvaluesOnly).eigenvalues().minCoeff());
      }
      if (viol / descent <= cfg.infeasibility_tol) {
        sol.status = Status::unbounded;
        sol.certificate_residual = viol / descent;
        return sol;
      }
    }
    if (it == cfg.max_iterations) break;

    // Nesterov-Todd scaling per block
    bool ok = true;
    for (std::size_t k = 0; k < nb && ok; ++k) {
      BlockState& s = st[k];
      const Index n = s.S.rows();
      Eigen::LLT<RealMatrix> llt(s.S);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      s.L = llt.matrixL();
      const RealMatrix Linv = s.L.triangularView<Eigen::Lower>().solve(RealMatrix::Identity(n, n));
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym(s.L.transpose() * s.Z * s.L));
      RealVector lam = es.eigenvalues();
      if (lam.minCoeff() <= 0) {
        ok = false;
        break;
      }
      s.v = lam.cwiseSqrt();
      const RealVector q4 = lam.array().pow(0.25);
      s.T = s.L * es.eigenvectors() * q4.cwiseInverse().asDiagonal();
      s.Tinv = q4.asDiagonal() * es.eigenvectors().transpose() * Linv;
      s.G = s.Tinv.transpose() * s.Tinv;
    }
    if (!ok) {
      return give_up(Status::numerical_failure);
    }
    const double mu = mu_num / nu;

    // Schur complement H_ij = <F_i, G F_j G>
    RealMatrix H = RealMatrix::Zero(m, m);
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& coords = blocks[k].coords;
      const RealMatrix& G = st[k].G;
      const Index n = G.rows();
      std::vector<Index> slot(static_cast<std::size_t>(n), -1);
      for (std::size_t jj = 0; jj < coords.size(); ++jj) {
        const Entries& fj = coords[jj].second;
        std::vector<Index> cols;
        for (const auto& e : fj)
          if (slot[static_cast<std::size_t>(e.col)] < 0) {
            slot[static_cast<std::size_t>(e.col)] = static_cast<Index>(cols.size());
            cols.push_back(e.col);
          }
        RealMatrix Tj = RealMatrix::Zero(n, static_cast<Index>(cols.size()));
        for (const auto& e : fj) Tj.col(slot[static_cast<std::size_t>(e.col)]) += e.value * G.col(e.row);
        RealMatrix Grows(static_cast<Index>(cols.size()), n);
        for (std::size_t q = 0; q < cols.size(); ++q) {
          Grows.row(static_cast<Index>(q)) = G.row(cols[q]);
          slot[static_cast<std::size_t>(cols[q])] = -1;
        }
        const RealMatrix W = Tj * Grows;
        const Index j = coords[jj].first;
        for (std::size_t ii = 0; ii <= jj; ++ii) {
          const double h = inner(coords[ii].second, W);
          const Index i = coords[ii].first;
          H(i, j) += h;
          if (i != j) H(j, i) += h;
        }
      }
    }

    Eigen::LLT<RealMatrix> Hllt(H);
    if (Hllt.info() != Eigen::Success) {
      const double reg = 1e-13 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
      Hllt.compute(H + reg * RealMatrix::Identity(m, m));
      if (Hllt.info() != Eigen::Success) {
        return give_up(Status::numerical_failure);
      }
    }
    RealMatrix HinvAt;
    Eigen::LDLT<RealMatrix> schur;
    if (p > 0) {
      HinvAt = Hllt.solve(A.transpose());
      schur.compute(A * HinvAt);
    }

    auto solve_direction = [&](const std::vector<RealMatrix>& Rz) {
      Direction d;
      std::vector<RealMatrix> t(nb);
      for (std::size_t k = 0; k < nb; ++k) t[k] = Rz[k] - st[k].G * st[k].rP * st[k].G;
      const RealVector rhs = adjoint_F(t) - rd;
      auto saddle = [&](const RealVector& r1, const RealVector& r2, RealVector* dy, RealVector* dl) {
        const RealVector h1 = Hllt.solve(r1);
        if (p > 0) {
          *dl = schur.solve(r2 - A * h1);
          *dy = h1 + HinvAt * *dl;
        } else {
          *dl = RealVector::Zero(0);
          *dy = h1;
        }
      };
      saddle(rhs, req, &d.dy, &d.dlambda);
      // iterative refinement against the unfactored system
      for (int pass = 0; pass < 2; ++pass) {
        RealVector r1 = rhs - H * d.dy, r2 = req;
        if (p > 0) {
          r1 += A.transpose() * d.dlambda;
          r2 -= A * d.dy;
        }
        RealVector cy, cl;
        saddle(r1, r2, &cy, &cl);
        d.dy += cy;
        if (p > 0) d.dlambda += cl;
      }
      d.dS.resize(nb);
      d.dZ.resize(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        d.dS[k] = apply_F(k, d.dy) + st[k].rP;
        d.dZ[k] = sym(Rz[k] - st[k].G * d.dS[k] * st[k].G);
      }
      return d;
    };
    auto steps = [&](const Direction& d, double* ap, double* ad) {
      *ap = 1.0;
      *ad = 1.0;
      bool fine = true;
      for (std::size_t k = 0; k < nb; ++k) {
        *ap = std::min(*ap, step_length(st[k].S, d.dS[k], cfg.step_fraction, &fine));
        *ad = std::min(*ad, step_length(st[k].Z, d.dZ[k], cfg.step_fraction, &fine));
      }
      return fine;
    };

    // predictor
    std::vector<RealMatrix> Rz(nb);
    for (std::size_t k = 0; k < nb; ++k) Rz[k] = -st[k].Z;
    const Direction aff = solve_direction(Rz);
    double ap = 0, ad = 0;
    if (!steps(aff, &ap, &ad)) {
      return give_up(Status::numerical_failure);
    }
    double mu_aff = 0;
    for (std::size_t k = 0; k < nb; ++k)
      mu_aff += ((st[k].S + ap * aff.dS[k]).cwiseProduct(st[k].Z + ad * aff.dZ[k])).sum();
    mu_aff /= nu;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // corrector
    for (std::size_t k = 0; k < nb; ++k) {
      const BlockState& s = st[k];
      const Index n = s.v.size();
      const RealMatrix dZh = s.T.transpose() * aff.dZ[k] * s.T;
      const RealMatrix dSh = s.Tinv * aff.dS[k] * s.Tinv.transpose();
      RealMatrix R = -sym(dZh * dSh);
      for (Index i = 0; i < n; ++i) R(i, i) += sigma * mu - s.v(i) * s.v(i);
      RealMatrix K(n, n);
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) K(i, j) = 2.0 * R(i, j) / (s.v(i) + s.v(j));
      Rz[k] = s.Tinv.transpose() * K * s.Tinv;
    }
    const Direction dir = solve_direction(Rz);
    if (!steps(dir, &ap, &ad)) {
      return give_up(Status::numerical_failure);
    }
    y += ap * dir.dy;
    if (p > 0) lambda += ad * dir.dlambda;
    for (std::size_t k = 0; k < nb; ++k) {
      st[k].S = sym(st[k].S + ap * dir.dS[k]);
      st[k].Z = sym(st[k].Z + ad * dir.dZ[k]);
    }
    stalls = (ap < 1e-9 && ad < 1e-9) ? stalls + 1 : 0;
    if (stalls >= 5) break;
  }
  return give_up(Status::max_iterations);
}

FeasibilityReport Problem::check_feasibility(const RealVector& y) const {
  if (y.size() != num_coords_) throw DomainError("assignment has the wrong number of coordinates");
  FeasibilityReport rep;
  for (const RealBlock& blk : lower()) {
    RealMatrix S = RealMatrix::Zero(blk.side, blk.side);
    accumulate(S, blk.constant, 1.0);
    for (const auto& [k, e] : blk.coords) accumulate(S, e, y(k));
    const double lmin = Eigen::SelfAdjointEigenSolver<RealMatrix>(sym(S), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    rep.max_eigenvalue_violation = std::max(rep.max_eigenvalue_violation, -lmin);
  }
  for (const LinearExpr& e : equalities_)
    rep.max_equality_residual = std::max(rep.max_equality_residual, std::abs(e.evaluate(y)));
  return rep;
}

std::string Problem::to_sdpa() const {
  const std::vector<RealBlock> blocks = lower();
  const std::size_t p = equalities_.size();
  std::ostringstream os;
  os << std::setprecision(17);
  os << "\"qsr sdp dump: minimize c^T y s.t. sum_i y_i F_i - F_0 >= 0\"\n";
  os << num_coords_ << "\n" << blocks.size() + (p ? 1 : 0) << "\n";
  for (const auto& b : blocks) os << b.side << ' ';
  if (p) os << -static_cast<long long>(2 * p);
  os << "\n";
  RealVector c = RealVector::Zero(num_coords_);
  for (const auto& [k, v] : objective_.terms()) c(k) = v;
  for (Index k = 0; k < num_coords_; ++k) os << c(k) << (k + 1 < num_coords_ ? " " : "\n");
  if (num_coords_ == 0) os << "\n";
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    for (const auto& e : blocks[bi].constant)
      if (e.row <= e.col) os << 0 << ' ' << bi + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' ' << -e.value << "\n";
    for (const auto& [k, es] : blocks[bi].coords)
      for (const auto& e : es)
        if (e.row <= e.col) os << k + 1 << ' ' << bi + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' ' << e.value << "\n";
  }
  const std::size_t eb = blocks.size() + 1;
  for (std::size_t r = 0; r < p; ++r) {
    const LinearExpr& e = equalities_[r];
    const std::size_t i1 = 2 * r + 1, i2 = 2 * r + 2;
    if (e.constant() != 0.0) {
      os << 0 << ' ' << eb << ' ' << i1 << ' ' << i1 << ' ' << -e.constant() << "\n";
      os << 0 << ' ' << eb << ' ' << i2 << ' ' << i2 << ' ' << e.constant() << "\n";
    }
    for (const auto& [k, v] : e.terms()) {
      os << k + 1 << ' ' << eb << ' ' << i1 << ' ' << i1 << ' ' << v << "\n";
      os << k + 1 << ' ' << eb << ' ' << i2 << ' ' << i2 << ' ' << -v << "\n";
    }
  }
  return os.str();
}

}  // namespace qsr::sdp
