#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsr/linalg.hpp"

namespace qsr {

using Labels = std::vector<std::string>;
using Relabeling = std::map<std::string, std::string>;

/// Name of one tensor factor, e.g. "A", "C2", "TA".
class SystemLabel {
 public:
  explicit SystemLabel(std::string name);
  const std::string& name() const { return name_; }
  auto operator<=>(const SystemLabel&) const = default;

 private:
  std::string name_;
};

struct Factor {
  SystemLabel label;
  Index dim;
  bool operator==(const Factor&) const = default;
};

/// Ordered list of labeled tensor factors. Storage order of every state is the
/// declared factor order; the first factor is the most significant index.
class SystemLayout {
 public:
  SystemLayout() = default;
  explicit SystemLayout(std::vector<Factor> factors);
  SystemLayout(std::initializer_list<std::pair<std::string, Index>> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  bool empty() const { return factors_.empty(); }
  Index total_dim() const;

  Labels labels() const;
  bool contains(std::string_view label) const;
  std::size_t position(std::string_view label) const;
  Index dim(std::string_view label) const;
  Index dim(const Labels& labels) const;

  /// Factors named in `labels`, in the order given.
  SystemLayout select(const Labels& labels) const;
  /// All factors not named in `labels`, in layout order.
  SystemLayout without(const Labels& labels) const;
  SystemLayout concat(const SystemLayout& other) const;
  SystemLayout relabeled(const Relabeling& names) const;

  std::string to_string() const;
  bool operator==(const SystemLayout&) const = default;

 private:
  std::vector<Factor> factors_;
};

/// Positive semidefinite operator with trace in [0, 1] over a layout.
class QuantumState {
 public:
  /// Validates hermiticity, clips eigenvalues in [-1e-9, 0) to zero, and
  /// rejects traces above one.
  static QuantumState from_matrix(SystemLayout layout, Matrix m);
  /// Hermitizes only. For results of operations that preserve positivity.
  static QuantumState trusted(SystemLayout layout, Matrix m);

  const SystemLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }
  double trace() const { return matrix_.trace().real(); }
  QuantumState scaled(double factor) const;

 private:
  QuantumState(SystemLayout layout, Matrix m) : layout_(std::move(layout)), matrix_(std::move(m)) {}
  SystemLayout layout_;
  Matrix matrix_;
};

class PureState {
 public:
  static PureState from_vector(SystemLayout layout, Vector v);

  const SystemLayout& layout() const { return layout_; }
  const Vector& vector() const { return vector_; }
  double norm() const { return vector_.norm(); }
  QuantumState to_state() const;

 private:
  PureState(SystemLayout layout, Vector v) : layout_(std::move(layout)), vector_(std::move(v)) {}
  SystemLayout layout_;
  Vector vector_;
};

enum class MapKind { unitary, isometry, partial_isometry };

std::string to_string(MapKind kind);
MapKind map_kind_from_string(std::string_view s);

/// Linear map between layouts, certified on construction to be of its kind.
class IsometryMap {
 public:
  static IsometryMap certified(SystemLayout in, SystemLayout out, Matrix m, MapKind kind,
                               double tol = 1e-9);
  static IsometryMap identity(const SystemLayout& layout);

  const SystemLayout& in() const { return in_; }
  const SystemLayout& out() const { return out_; }
  const Matrix& matrix() const { return matrix_; }
  MapKind kind() const { return kind_; }

  /// Adjoint map out -> in. The adjoint of an isometry is a partial isometry.
  IsometryMap adjoint() const;
  IsometryMap relabeled(const Relabeling& in_names, const Relabeling& out_names) const;
  /// V V^dagger, the projector onto the image (as a matrix on `out`).
  Matrix image_projector() const;

 private:
  IsometryMap(SystemLayout in, SystemLayout out, Matrix m, MapKind kind)
      : in_(std::move(in)), out_(std::move(out)), matrix_(std::move(m)), kind_(kind) {}
  SystemLayout in_;
  SystemLayout out_;
  Matrix matrix_;
  MapKind kind_;
};

/// Certifies `kind` for a matrix; returns the largest defect found.
double isometry_defect(const Matrix& m, MapKind kind);

// --- structure -------------------------------------------------------------

QuantumState tensor_product(const QuantumState& a, const QuantumState& b);
PureState tensor_product(const PureState& a, const PureState& b);

QuantumState partial_trace(const QuantumState& s, const Labels& discard);
QuantumState partial_trace(const PureState& s, const Labels& discard);
/// Marginal on `keep`, with factors in the order given.
QuantumState reduce(const QuantumState& s, const Labels& keep);
QuantumState reduce(const PureState& s, const Labels& keep);

/// Same operator with factors reordered to `order` (a permutation of the labels).
QuantumState permute(const QuantumState& s, const Labels& order);
PureState permute(const PureState& s, const Labels& order);

enum class FillPolicy { identity, maximally_mixed };

/// Reorders `s` into `target` and fills the factors missing from `s` with the
/// identity or the maximally mixed state.
QuantumState permute_and_embed(const QuantumState& s, const SystemLayout& target, FillPolicy fill);

/// Smallest purification; the reference factor has dimension rank(s).
PureState purify(const QuantumState& s, const std::string& ref_label);

/// V acting on its input factors, identity elsewhere. The output factors take
/// the place of the first input factor; other factors keep their order.
QuantumState apply_isometry(const IsometryMap& v, const QuantumState& s);
PureState apply_isometry(const IsometryMap& v, const PureState& s);

/// sum_k K_k s K_k^dagger for Kraus operators mapping `in` factors to `out`
/// factors, placed as in apply_isometry.
QuantumState apply_kraus(const std::vector<Matrix>& kraus, const SystemLayout& in,
                         const SystemLayout& out, const QuantumState& s);

// --- distances -------------------------------------------------------------

double trace_norm_distance(const QuantumState& a, const QuantumState& b);
/// ||sqrt(a) sqrt(b)||_1
double fidelity(const QuantumState& a, const QuantumState& b);
double fidelity(const QuantumState& a, const PureState& b);
double generalized_fidelity(const QuantumState& a, const QuantumState& b);
double purified_distance(const QuantumState& a, const QuantumState& b);
double purified_distance(const QuantumState& a, const PureState& b);

// --- standard and random states -------------------------------------------

QuantumState maximally_mixed(const SystemLayout& layout);
/// sum_i |ii> / sqrt(d)
PureState max_entangled(const std::string& a, const std::string& b, Index d);
PureState basis_state(const SystemLayout& layout, Index index);

/// Counter-based seed derivation: splitmix64(base ^ splitmix64(counter + 1)).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter);

/// Haar-distributed unitary (QR of a complex Ginibre matrix with phase fix).
Matrix haar_unitary_matrix(std::uint64_t seed, Index dim);
IsometryMap haar_unitary(std::uint64_t seed, Index dim);
IsometryMap haar_unitary(std::uint64_t seed, const SystemLayout& in, const SystemLayout& out);

PureState random_pure_state(std::uint64_t seed, const SystemLayout& layout);

/// Random mixed state: marginal of a random pure state with an environment of
/// dimension `env_dim`.
QuantumState random_mixed_state(std::uint64_t seed, const SystemLayout& layout, Index env_dim);

}  // namespace qsr
