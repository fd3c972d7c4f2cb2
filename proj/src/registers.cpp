#include "qsr/registers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "qsr/error.hpp"

namespace qsr {

// --- labels and layouts -----------------------------------------------------

SystemLabel::SystemLabel(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw LayoutError("system label must be nonempty");
}

SystemLayout::SystemLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim < 1) throw LayoutError("factor " + f.label.name() + " has non-positive dimension");
    if (!seen.insert(f.label.name()).second)
      throw LayoutError("duplicate label " + f.label.name());
  }
}

SystemLayout::SystemLayout(std::initializer_list<std::pair<std::string, Index>> factors)
    : SystemLayout([&] {
        std::vector<Factor> fs;
        for (const auto& [name, d] : factors) fs.push_back({SystemLabel(name), d});
        return fs;
      }()) {}

Index SystemLayout::total_dim() const {
  Index d = 1;
  for (const auto& f : factors_) d *= f.dim;
  return d;
}

Labels SystemLayout::labels() const {
  Labels out;
  for (const auto& f : factors_) out.push_back(f.label.name());
  return out;
}

bool SystemLayout::contains(std::string_view label) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const Factor& f) { return f.label.name() == label; });
}

std::size_t SystemLayout::position(std::string_view label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].label.name() == label) return i;
  throw LayoutError("unknown label " + std::string(label) + " in layout " + to_string());
}

Index SystemLayout::dim(std::string_view label) const { return factors_[position(label)].dim; }

Index SystemLayout::dim(const Labels& labels) const {
  Index d = 1;
  for (const auto& l : labels) d *= dim(l);
  return d;
}

SystemLayout SystemLayout::select(const Labels& labels) const {
  std::vector<Factor> fs;
  for (const auto& l : labels) fs.push_back(factors_[position(l)]);
  return SystemLayout(std::move(fs));
}

SystemLayout SystemLayout::without(const Labels& labels) const {
  for (const auto& l : labels) position(l);
  std::vector<Factor> fs;
  for (const auto& f : factors_)
    if (std::find(labels.begin(), labels.end(), f.label.name()) == labels.end()) fs.push_back(f);
  return SystemLayout(std::move(fs));
}

SystemLayout SystemLayout::concat(const SystemLayout& other) const {
  std::vector<Factor> fs = factors_;
  fs.insert(fs.end(), other.factors_.begin(), other.factors_.end());
  return SystemLayout(std::move(fs));
}

SystemLayout SystemLayout::relabeled(const Relabeling& names) const {
  std::vector<Factor> fs;
  for (const auto& f : factors_) {
    auto it = names.find(f.label.name());
    fs.push_back({it == names.end() ? f.label : SystemLabel(it->second), f.dim});
  }
  return SystemLayout(std::move(fs));
}

std::string SystemLayout::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < factors_.size(); ++i)
    os << (i ? " " : "") << factors_[i].label.name() << ':' << factors_[i].dim;
  os << ']';
  return os.str();
}

// --- index permutations -----------------------------------------------------

namespace {

/// perm[new_index] = old_index for reordering `from` into `order`.
std::vector<Index> permutation_map(const SystemLayout& from, const Labels& order) {
  const std::size_t k = from.size();
  if (order.size() != k) throw LayoutError("permutation must name every factor");
  std::vector<std::size_t> src(k);
  std::set<std::size_t> used;
  for (std::size_t i = 0; i < k; ++i) {
    src[i] = from.position(order[i]);
    if (!used.insert(src[i]).second) throw LayoutError("repeated label in permutation");
  }
  std::vector<Index> old_stride(k);
  Index s = 1;
  for (std::size_t i = k; i-- > 0;) {
    old_stride[i] = s;
    s *= from.factors()[i].dim;
  }
  std::vector<Index> dims(k), stride(k);
  for (std::size_t i = 0; i < k; ++i) {
    dims[i] = from.factors()[src[i]].dim;
    stride[i] = old_stride[src[i]];
  }
  std::vector<Index> perm(static_cast<std::size_t>(s));
  std::vector<Index> digit(k, 0);
  Index old = 0;
  for (Index n = 0; n < s; ++n) {
    perm[static_cast<std::size_t>(n)] = old;
    // odometer increment, least significant new factor last
    for (std::size_t i = k; i-- > 0;) {
      if (++digit[i] < dims[i]) {
        old += stride[i];
        break;
      }
      old -= (dims[i] - 1) * stride[i];
      digit[i] = 0;
    }
  }
  return perm;
}

bool is_identity(const std::vector<Index>& perm) {
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != static_cast<Index>(i)) return false;
  return true;
}

Matrix permute_matrix(const Matrix& m, const std::vector<Index>& perm) {
  if (is_identity(perm)) return m;
  const Index n = m.rows();
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(i, j) = m(perm[i], perm[j]);
  return out;
}

Vector permute_vector(const Vector& v, const std::vector<Index>& perm) {
  if (is_identity(perm)) return v;
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = v(perm[i]);
  return out;
}

/// Matrix whose factors are [keep..., discard...] -> marginal on keep.
Matrix trace_out_trailing(const Matrix& m, Index keep_dim, Index discard_dim) {
  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  for (Index d = 0; d < discard_dim; ++d)
    for (Index b = 0; b < keep_dim; ++b)
      for (Index a = 0; a < keep_dim; ++a) out(a, b) += m(a * discard_dim + d, b * discard_dim + d);
  return out;
}

Labels concat_labels(Labels a, const Labels& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

/// Rest/target split used by every local action: the state is permuted to
/// [rest..., targets...] and the result reordered so the new factors sit
/// where the first target factor was.
struct LocalFrame {
  SystemLayout rest;
  Labels work_order;
  std::size_t insert_at;

  LocalFrame(const SystemLayout& layout, const SystemLayout& in) {
    std::size_t first = layout.size();
    for (const auto& f : in.factors()) {
      const std::size_t p = layout.position(f.label.name());
      if (layout.factors()[p].dim != f.dim)
        throw LayoutError("dimension mismatch on factor " + f.label.name());
      first = std::min(first, p);
    }
    rest = layout.without(in.labels());
    insert_at = 0;
    for (std::size_t i = 0; i < first; ++i)
      if (!in.contains(layout.factors()[i].label.name())) ++insert_at;
    work_order = concat_labels(rest.labels(), in.labels());
  }

  SystemLayout output_layout(const SystemLayout& out) const {
    for (const auto& f : out.factors())
      if (rest.contains(f.label.name()))
        throw LayoutError("output label " + f.label.name() + " collides with an untouched factor");
    std::vector<Factor> fs(rest.factors().begin(), rest.factors().begin() + insert_at);
    fs.insert(fs.end(), out.factors().begin(), out.factors().end());
    fs.insert(fs.end(), rest.factors().begin() + insert_at, rest.factors().end());
    return SystemLayout(std::move(fs));
  }

  Labels work_output_order(const SystemLayout& out) const {
    return concat_labels(rest.labels(), out.labels());
  }
};

/// (I_rest (x) op) * m where the op acts on the least significant index block.
Matrix left_apply(const Matrix& op, const Matrix& m) {
  const Index din = op.cols(), dout = op.rows();
  const Index rest = m.rows() / din;
  const Index cols = m.cols();
  Eigen::Map<const Matrix> blocks(m.data(), din, rest * cols);
  Matrix out(rest * dout, cols);
  Eigen::Map<Matrix>(out.data(), dout, rest * cols).noalias() = op * blocks;
  return out;
}

Matrix conjugate_local(const Matrix& op, const Matrix& m) {
  const Matrix half = left_apply(op, m);
  const Matrix full = left_apply(op, half.adjoint());
  return full.adjoint();
}

}  // namespace

// --- states -----------------------------------------------------------------

QuantumState QuantumState::from_matrix(SystemLayout layout, Matrix m) {
  const Index n = layout.total_dim();
  if (m.rows() != n || m.cols() != n)
    throw LayoutError("matrix side does not match layout " + layout.to_string());
  if (linalg::hermiticity_defect(m) > 1e-8 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw DomainError("state matrix is not Hermitian");
  auto e = linalg::eigh(m);
  bool clipped = false;
  for (Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) < -kPositivityTol) throw DomainError("state matrix has a negative eigenvalue");
    // roundoff-level negatives are left alone so exact inputs stay bit-identical
    if (e.values(i) < -1e-13) {
      e.values(i) = 0;
      clipped = true;
    }
  }
  Matrix h = clipped ? linalg::spectral_apply(e, [](double x) { return x; }) : linalg::hermitize(m);
  if (h.trace().real() > 1.0 + kPositivityTol) throw DomainError("state trace exceeds one");
  return QuantumState(std::move(layout), linalg::hermitize(h));
}

QuantumState QuantumState::trusted(SystemLayout layout, Matrix m) {
  if (m.rows() != layout.total_dim() || m.cols() != layout.total_dim())
    throw LayoutError("matrix side does not match layout " + layout.to_string());
  return QuantumState(std::move(layout), linalg::hermitize(m));
}

QuantumState QuantumState::scaled(double factor) const {
  if (factor < 0) throw DomainError("negative scale factor");
  return from_matrix(layout_, factor * matrix_);
}

PureState PureState::from_vector(SystemLayout layout, Vector v) {
  if (v.size() != layout.total_dim())
    throw LayoutError("vector length does not match layout " + layout.to_string());
  const double n = v.norm();
  if (!(n > 0) || n > 1.0 + kPositivityTol) throw DomainError("pure state norm must lie in (0, 1]");
  return PureState(std::move(layout), std::move(v));
}

QuantumState PureState::to_state() const {
  return QuantumState::trusted(layout_, vector_ * vector_.adjoint());
}

// --- maps -------------------------------------------------------------------

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::unitary: return "unitary";
    case MapKind::isometry: return "isometry";
    case MapKind::partial_isometry: return "partial_isometry";
  }
  return "unknown";
}

MapKind map_kind_from_string(std::string_view s) {
  if (s == "unitary") return MapKind::unitary;
  if (s == "isometry") return MapKind::isometry;
  if (s == "partial_isometry") return MapKind::partial_isometry;
  throw DomainError("unknown map kind " + std::string(s));
}

double isometry_defect(const Matrix& m, MapKind kind) {
  const Matrix gram = m.adjoint() * m;
  const Index n = gram.rows();
  switch (kind) {
    case MapKind::unitary: {
      if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
      const Matrix outer = m * m.adjoint();
      return std::max((gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(),
                      (outer - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
    }
    case MapKind::isometry:
      if (m.rows() < m.cols()) return std::numeric_limits<double>::infinity();
      return (gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    case MapKind::partial_isometry:
      if (n == 0) return 0.0;
      return (gram * gram - gram).cwiseAbs().maxCoeff();
  }
  return std::numeric_limits<double>::infinity();
}

IsometryMap IsometryMap::certified(SystemLayout in, SystemLayout out, Matrix m, MapKind kind,
                                   double tol) {
  if (m.rows() != out.total_dim() || m.cols() != in.total_dim())
    throw LayoutError("map matrix shape does not match " + in.to_string() + " -> " + out.to_string());
  const double defect = isometry_defect(m, kind);
  if (!(defect <= tol))
    throw DomainError("matrix is not a " + to_string(kind) + " (defect " + std::to_string(defect) + ")");
  return IsometryMap(std::move(in), std::move(out), std::move(m), kind);
}

IsometryMap IsometryMap::identity(const SystemLayout& layout) {
  const Index n = layout.total_dim();
  return IsometryMap(layout, layout, Matrix::Identity(n, n), MapKind::unitary);
}

IsometryMap IsometryMap::adjoint() const {
  const MapKind k = kind_ == MapKind::unitary ? MapKind::unitary : MapKind::partial_isometry;
  return IsometryMap(out_, in_, matrix_.adjoint(), k);
}

IsometryMap IsometryMap::relabeled(const Relabeling& in_names, const Relabeling& out_names) const {
  return IsometryMap(in_.relabeled(in_names), out_.relabeled(out_names), matrix_, kind_);
}

Matrix IsometryMap::image_projector() const { return matrix_ * matrix_.adjoint(); }

// --- structure --------------------------------------------------------------

QuantumState tensor_product(const QuantumState& a, const QuantumState& b) {
  return QuantumState::trusted(a.layout().concat(b.layout()), linalg::kron(a.matrix(), b.matrix()));
}

PureState tensor_product(const PureState& a, const PureState& b) {
  return PureState::from_vector(a.layout().concat(b.layout()), linalg::kron(a.vector(), b.vector()));
}

QuantumState reduce(const QuantumState& s, const Labels& keep) {
  const SystemLayout kept = s.layout().select(keep);
  const SystemLayout dropped = s.layout().without(keep);
  const auto perm = permutation_map(s.layout(), concat_labels(keep, dropped.labels()));
  const Matrix m = permute_matrix(s.matrix(), perm);
  return QuantumState::trusted(kept, trace_out_trailing(m, kept.total_dim(), dropped.total_dim()));
}

QuantumState reduce(const PureState& s, const Labels& keep) {
  const SystemLayout kept = s.layout().select(keep);
  const SystemLayout dropped = s.layout().without(keep);
  const Vector v = permute_vector(s.vector(), permutation_map(s.layout(), concat_labels(keep, dropped.labels())));
  // column k of psi is the dropped-system vector for kept index k
  Eigen::Map<const Matrix> psi(v.data(), dropped.total_dim(), kept.total_dim());
  return QuantumState::trusted(kept, psi.transpose() * psi.conjugate());
}

QuantumState partial_trace(const QuantumState& s, const Labels& discard) {
  return reduce(s, s.layout().without(discard).labels());
}

QuantumState partial_trace(const PureState& s, const Labels& discard) {
  return reduce(s, s.layout().without(discard).labels());
}

QuantumState permute(const QuantumState& s, const Labels& order) {
  return QuantumState::trusted(s.layout().select(order),
                               permute_matrix(s.matrix(), permutation_map(s.layout(), order)));
}

PureState permute(const PureState& s, const Labels& order) {
  return PureState::from_vector(s.layout().select(order),
                                permute_vector(s.vector(), permutation_map(s.layout(), order)));
}

QuantumState permute_and_embed(const QuantumState& s, const SystemLayout& target, FillPolicy fill) {
  std::vector<Factor> missing;
  for (const auto& f : target.factors()) {
    if (s.layout().contains(f.label.name())) {
      if (s.layout().dim(f.label.name()) != f.dim)
        throw LayoutError("dimension mismatch on factor " + f.label.name());
    } else {
      missing.push_back(f);
    }
  }
  for (const auto& f : s.layout().factors())
    if (!target.contains(f.label.name()))
      throw LayoutError("target layout lacks factor " + f.label.name());
  const SystemLayout fill_layout(missing);
  const Index df = fill_layout.total_dim();
  Matrix filler = Matrix::Identity(df, df);
  if (fill == FillPolicy::maximally_mixed) filler /= static_cast<double>(df);
  const SystemLayout joint = s.layout().concat(fill_layout);
  const Matrix m = linalg::kron(s.matrix(), filler);
  const auto perm = permutation_map(joint, target.labels());
  return QuantumState::trusted(target, permute_matrix(m, perm));
}

PureState purify(const QuantumState& s, const std::string& ref_label) {
  const auto e = linalg::eigh(s.matrix());
  if (e.values.size() > 0 && e.values.minCoeff() < -kPositivityTol)
    throw DomainError("cannot purify a non-positive operator");
  std::vector<Index> support;
  for (Index i = e.values.size(); i-- > 0;)
    if (e.values(i) > kRankTol) support.push_back(i);
  if (support.empty()) throw DomainError("cannot purify the zero operator");
  const Index r = static_cast<Index>(support.size());
  const Index n = s.dim();
  Vector psi = Vector::Zero(n * r);
  for (Index k = 0; k < r; ++k) {
    const Index i = support[static_cast<std::size_t>(k)];
    const double w = std::sqrt(e.values(i));
    for (Index a = 0; a < n; ++a) psi(a * r + k) = w * e.vectors(a, i);
  }
  return PureState::from_vector(s.layout().concat(SystemLayout{{ref_label, r}}), std::move(psi));
}

QuantumState apply_isometry(const IsometryMap& v, const QuantumState& s) {
  return apply_kraus({v.matrix()}, v.in(), v.out(), s);
}

PureState apply_isometry(const IsometryMap& v, const PureState& s) {
  const LocalFrame frame(s.layout(), v.in());
  const Vector x = permute_vector(s.vector(), permutation_map(s.layout(), frame.work_order));
  const Vector y = left_apply(v.matrix(), Eigen::Map<const Matrix>(x.data(), x.size(), 1));
  const SystemLayout work = frame.rest.concat(v.out());
  const SystemLayout final_layout = frame.output_layout(v.out());
  Vector z = permute_vector(y, permutation_map(work, final_layout.labels()));
  const double nz = z.norm();
  if (!(nz > 0)) throw DomainError("map annihilates the pure state");
  return PureState::from_vector(final_layout, std::move(z));
}

QuantumState apply_kraus(const std::vector<Matrix>& kraus, const SystemLayout& in,
                         const SystemLayout& out, const QuantumState& s) {
  const LocalFrame frame(s.layout(), in);
  const Matrix x = permute_matrix(s.matrix(), permutation_map(s.layout(), frame.work_order));
  const SystemLayout work = frame.rest.concat(out);
  const Index n = work.total_dim();
  Matrix acc = Matrix::Zero(n, n);
  for (const auto& k : kraus) {
    if (k.rows() != out.total_dim() || k.cols() != in.total_dim())
      throw LayoutError("Kraus operator shape does not match its layouts");
    acc += conjugate_local(k, x);
  }
  const SystemLayout final_layout = frame.output_layout(out);
  return QuantumState::trusted(final_layout,
                               permute_matrix(acc, permutation_map(work, final_layout.labels())));
}

// --- distances --------------------------------------------------------------

namespace {

void require_same_layout(const SystemLayout& a, const SystemLayout& b) {
  if (!(a == b)) throw LayoutError("layout mismatch: " + a.to_string() + " vs " + b.to_string());
}

double clip_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double trace_norm_distance(const QuantumState& a, const QuantumState& b) {
  require_same_layout(a.layout(), b.layout());
  return linalg::trace_norm(a.matrix() - b.matrix());
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  require_same_layout(a.layout(), b.layout());
  // roundoff eigenvalues would otherwise enter as their square roots (~1e-8)
  auto root = [](const Matrix& m) {
    return linalg::spectral_apply(linalg::eigh(m), [](double x) { return x > 1e-14 ? std::sqrt(x) : 0.0; });
  };
  // singular values of sqrt(a) sqrt(b) are accurate to roundoff, unlike square
  // roots of the eigenvalues of sqrt(a) b sqrt(a)
  return Eigen::JacobiSVD<Matrix>(root(a.matrix()) * root(b.matrix())).singularValues().sum();
}

double fidelity(const QuantumState& a, const PureState& b) {
  require_same_layout(a.layout(), b.layout());
  // for rank one b, ||sqrt(a) sqrt(b)||_1 = sqrt(<b|a|b>)
  const double q = (b.vector().adjoint() * a.matrix() * b.vector())(0, 0).real();
  return std::sqrt(std::max(q, 0.0));
}

namespace {

double generalized_from(double f, double ta, double tb) {
  return f + std::sqrt(std::max(0.0, 1.0 - ta) * std::max(0.0, 1.0 - tb));
}

}  // namespace

double generalized_fidelity(const QuantumState& a, const QuantumState& b) {
  return generalized_from(fidelity(a, b), a.trace(), b.trace());
}

double purified_distance(const QuantumState& a, const QuantumState& b) {
  const double fb = clip_unit(generalized_fidelity(a, b));
  return std::sqrt(std::max(0.0, 1.0 - fb * fb));
}

double purified_distance(const QuantumState& a, const PureState& b) {
  const double nb = b.vector().squaredNorm();
  const double fb = clip_unit(generalized_from(fidelity(a, b), a.trace(), nb));
  return std::sqrt(std::max(0.0, 1.0 - fb * fb));
}

// --- standard and random states ---------------------------------------------

QuantumState maximally_mixed(const SystemLayout& layout) {
  const Index n = layout.total_dim();
  return QuantumState::trusted(layout, Matrix::Identity(n, n) / static_cast<double>(n));
}

PureState max_entangled(const std::string& a, const std::string& b, Index d) {
  Vector v = Vector::Zero(d * d);
  for (Index i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return PureState::from_vector(SystemLayout{{a, d}, {b, d}}, std::move(v));
}

PureState basis_state(const SystemLayout& layout, Index index) {
  if (index < 0 || index >= layout.total_dim()) throw DomainError("basis index out of range");
  Vector v = Vector::Zero(layout.total_dim());
  v(index) = 1.0;
  return PureState::from_vector(layout, std::move(v));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Matrix ginibre(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = cplx(re, im);
    }
  return g;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter) {
  return splitmix64(base ^ splitmix64(counter + 1));
}

Matrix haar_unitary_matrix(std::uint64_t seed, Index dim) {
  if (dim < 1) throw DomainError("unitary dimension must be positive");
  std::mt19937_64 rng(seed);
  const Matrix z = ginibre(rng, dim, dim);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  // rescale columns by the phases of diag(R) so the law is exactly Haar
  for (Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

IsometryMap haar_unitary(std::uint64_t seed, Index dim) {
  const SystemLayout layout{{"U", dim}};
  return IsometryMap::certified(layout, layout, haar_unitary_matrix(seed, dim), MapKind::unitary, 1e-10);
}

IsometryMap haar_unitary(std::uint64_t seed, const SystemLayout& in, const SystemLayout& out) {
  if (in.total_dim() != out.total_dim()) throw LayoutError("unitary needs equal dimensions");
  return IsometryMap::certified(in, out, haar_unitary_matrix(seed, in.total_dim()), MapKind::unitary, 1e-10);
}

PureState random_pure_state(std::uint64_t seed, const SystemLayout& layout) {
  std::mt19937_64 rng(seed);
  Matrix g = ginibre(rng, layout.total_dim(), 1);
  Vector v = g.col(0);
  v.normalize();
  return PureState::from_vector(layout, std::move(v));
}

QuantumState random_mixed_state(std::uint64_t seed, const SystemLayout& layout, Index env_dim) {
  const SystemLayout joint = layout.concat(SystemLayout{{"__env", env_dim}});
  return partial_trace(random_pure_state(seed, joint), {"__env"});
}

}  // namespace qsr
