#include "qsr/entropies.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <limits>
#include <set>

#include "qsr/error.hpp"
#include "qsr/serialize.hpp"

namespace qsr {

namespace {

using sdp::LinearExpr;

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("smoothing parameter must lie in [0, 1)");
}

/// rho reduced to A then B, after validating the roles.
QuantumState roles_marginal(const QuantumState& rho, const Partition& part) {
  if (part.a.empty()) throw DomainError("partition needs a nonempty A side");
  std::set<std::string> seen;
  Labels ab;
  for (const auto* side : {&part.a, &part.b})
    for (const auto& l : *side) {
      if (!seen.insert(l).second) throw LayoutError("label " + l + " appears in two roles");
      ab.push_back(l);
    }
  auto out = reduce(rho, ab);
  if (out.trace() <= kRankTol) throw DomainError("entropy of the zero operator");
  return out;
}

void require_normalized(const QuantumState& rho) {
  if (std::abs(rho.trace() - 1.0) > 1e-9)
    throw DomainError("smoothing requires a normalized state");
}

std::string fresh_label(const SystemLayout& layout) {
  std::string name = "ref";
  for (int k = 1; layout.contains(name); ++k) name = "ref" + std::to_string(k);
  return name;
}

/// PSD part of a solver iterate, scaled into the unit trace ball.
QuantumState sanitize(const SystemLayout& layout, const Matrix& m) {
  const auto e = linalg::eigh(linalg::hermitize(m));
  Matrix out = linalg::spectral_apply(e, [](double x) { return std::max(x, 0.0); });
  const double t = out.trace().real();
  if (t > 1.0) out /= t;
  return QuantumState::trusted(layout, out);
}

std::optional<QuantumState> normalized_sigma(const Labels& b, const SystemLayout& layout, const Matrix& x) {
  if (b.empty()) return std::nullopt;
  const double t = x.trace().real();
  if (t <= 0) return std::nullopt;
  return sanitize(layout.select(b), x / t);
}

struct Outcome {
  double objective = 0.0;
  double gap = 0.0;
  Matrix x;
  Matrix smoothed;
};

std::string describe(const sdp::Solution& s) {
  std::ostringstream os;
  os << sdp::to_string(s.status) << " after " << s.iterations << " iterations, relative gap " << s.relative_gap
     << ", primal residual " << s.primal_residual;
  return os.str();
}

bool acceptable(const sdp::Solution& s) {
  if (s.status == sdp::Status::optimal) return true;
  if (s.status == sdp::Status::infeasible || s.status == sdp::Status::unbounded) return false;
  return s.relative_gap <= 1e-5 && s.primal_residual <= 1e-6;
}

/// min Tr X subject to left (x) X >= rho~. With eps = 0, rho~ is the target
/// itself; otherwise rho~ ranges over F(rho~, target) >= sqrt(1 - eps^2), where
/// the fidelity is written on the support of the target, and either
/// Tr rho~ <= 1 or Tr_X rho~ = marginal.
std::optional<Outcome> dominate(const Matrix& target, const Matrix& left, Index dx, double eps,
                                const Matrix* marginal, sdp::Status* status = nullptr) {
  const Index n = target.rows();
  sdp::Problem p;
  const auto x = p.hermitian(dx);
  const int dom = p.add_block(n);
  p.add_term(dom, x, 0, 0, 1.0, left);
  sdp::Var rt;
  if (eps == 0.0) {
    p.add_constant(dom, -target, 0, 0);
  } else {
    rt = p.hermitian(n);
    p.add_term(dom, rt, 0, 0, -1.0);
    const auto e = linalg::eigh(target);
    std::vector<Index> keep;
    for (Index i = 0; i < n; ++i)
      if (e.values(i) > kRankTol) keep.push_back(i);
    const Index r = static_cast<Index>(keep.size());
    Matrix w(n, r);
    Matrix lam = Matrix::Zero(r, r);
    for (Index k = 0; k < r; ++k) {
      w.col(k) = e.vectors.col(keep[k]);
      lam(k, k) = e.values(keep[k]);
    }
    const auto y = p.complex(n, r);
    const int fid = p.add_block(n + r);
    p.add_term(fid, rt, 0, 0);
    p.add_term(fid, y, 0, n);
    p.add_constant(fid, lam, n, n);
    p.add_nonnegative(p.trace_with(w.adjoint(), y) - LinearExpr(std::sqrt(1.0 - eps * eps)));
    if (marginal) {
      const Index dl = left.rows();
      for (Index i = 0; i < dl; ++i)
        for (Index j = i; j < dl; ++j) {
          LinearExpr re(-(*marginal)(i, j).real()), im(-(*marginal)(i, j).imag());
          for (Index k = 0; k < dx; ++k) {
            re += p.real_entry(rt, i * dx + k, j * dx + k);
            if (i != j) im += p.imag_entry(rt, i * dx + k, j * dx + k);
          }
          p.add_equality(re);
          if (i != j) p.add_equality(im);
        }
    } else {
      p.add_nonnegative(LinearExpr(1.0) - p.trace(rt));
    }
  }
  p.minimize(p.trace(x));
  const auto sol = p.solve();
  if (status) *status = sol.status;
  if (!acceptable(sol)) return std::nullopt;
  Outcome out;
  out.objective = sol.primal_objective;
  out.gap = sol.gap;
  out.x = p.value(x, sol.y);
  out.smoothed = eps == 0.0 ? target : p.value(rt, sol.y);
  return out;
}

Outcome require(std::optional<Outcome> o, const char* what) {
  if (!o) throw NumericalError(std::string("semidefinite program for ") + what + " did not converge");
  return *std::move(o);
}

/// Isometry onto supp(rho_A), tensored with the identity on B.
struct Compression {
  Matrix iso;       // (dA dB) x (rA dB)
  Matrix left;      // rho_A on its support
};

Compression compress_a(const QuantumState& rab, const Labels& a, Index db) {
  const Matrix ra = reduce(rab, a).matrix();
  const Matrix w = linalg::support_basis(ra);
  return {linalg::kron(w, Matrix::Identity(db, db)), w.adjoint() * ra * w};
}

EntropyResult closed(std::string quantity, double value, double eps) {
  EntropyResult r;
  r.quantity = std::move(quantity);
  r.value = value;
  r.epsilon = eps;
  return r;
}

}  // namespace

nlohmann::json to_json(const EntropyResult& r) {
  nlohmann::json j;
  j["quantity"] = r.quantity;
  j["value_bits"] = r.infinite ? nlohmann::json(nullptr) : nlohmann::json(r.value);
  j["infinite"] = r.infinite;
  j["epsilon"] = r.epsilon;
  j["gap"] = r.gap;
  if (r.witness) j["witness"] = state_to_json(*r.witness);
  if (r.optimal_sigma) j["optimal_sigma"] = state_to_json(*r.optimal_sigma);
  return j;
}

EntropyResult dmax(const QuantumState& rho, const QuantumState& sigma) {
  if (!(rho.layout() == sigma.layout()))
    throw LayoutError("dmax needs equal layouts, got " + rho.layout().to_string() + " and " +
                      sigma.layout().to_string());
  if (rho.trace() <= kRankTol) throw DomainError("max-relative entropy of the zero operator");
  EntropyResult r = closed("dmax", 0.0, 0.0);
  const Matrix off = Matrix::Identity(rho.dim(), rho.dim()) - linalg::support_projector(sigma.matrix());
  if (linalg::lambda_max(off * rho.matrix() * off) > kRankTol) {
    r.infinite = true;
    r.value = std::numeric_limits<double>::infinity();
    return r;
  }
  const Matrix is = linalg::inv_sqrt_psd(sigma.matrix());
  r.value = std::log2(linalg::lambda_max(is * rho.matrix() * is));
  return r;
}

EntropyResult hmin_cond(const QuantumState& rho, const Partition& part) {
  const auto rab = roles_marginal(rho, part);
  const Index da = rab.layout().dim(part.a), db = rab.layout().dim(part.b);
  const auto o = require(dominate(rab.matrix(), Matrix::Identity(da, da), db, 0.0, nullptr), "hmin");
  EntropyResult r = closed("hmin", -std::log2(o.objective), 0.0);
  r.gap = o.gap;
  r.solves = 1;
  r.optimal_sigma = normalized_sigma(part.b, rab.layout(), o.x);
  return r;
}

EntropyResult hmax_cond(const QuantumState& rho, const Partition& part) {
  const auto rab = roles_marginal(rho, part);
  const std::string ref = fresh_label(rab.layout());
  const auto dual = hmin_cond(purify(rab, ref).to_state(), {part.a, {ref}});
  EntropyResult r = dual;
  r.quantity = "hmax";
  r.value = -dual.value;
  return r;
}

EntropyResult imax(const QuantumState& rho, const Partition& part) {
  const auto rab = roles_marginal(rho, part);
  const Index db = rab.layout().dim(part.b);
  const auto c = compress_a(rab, part.a, db);
  const Matrix target = c.iso.adjoint() * rab.matrix() * c.iso;
  const auto o = require(dominate(target, c.left, db, 0.0, nullptr), "imax");
  EntropyResult r = closed("imax", std::log2(o.objective), 0.0);
  r.gap = o.gap;
  r.solves = 1;
  r.optimal_sigma = normalized_sigma(part.b, rab.layout(), o.x);
  return r;
}

EntropyResult smooth_hmin(const QuantumState& rho, const Partition& part, double eps) {
  check_eps(eps);
  const auto rab = roles_marginal(rho, part);
  if (eps == 0.0) {
    auto r = hmin_cond(rab, part);
    r.witness = rab;
    return r;
  }
  require_normalized(rab);
  const Index da = rab.layout().dim(part.a), db = rab.layout().dim(part.b);
  const auto o =
      require(dominate(rab.matrix(), Matrix::Identity(da, da), db, eps, nullptr), "smooth hmin");
  EntropyResult r = closed("hmin", -std::log2(o.objective), eps);
  r.gap = o.gap;
  r.solves = 1;
  r.witness = sanitize(rab.layout(), o.smoothed);
  r.optimal_sigma = normalized_sigma(part.b, rab.layout(), o.x);
  return r;
}

EntropyResult smooth_hmax(const QuantumState& rho, const Partition& part, double eps) {
  check_eps(eps);
  const auto rab = roles_marginal(rho, part);
  const std::string ref = fresh_label(rab.layout());
  const auto dual = smooth_hmin(purify(rab, ref).to_state(), {part.a, {ref}}, eps);
  EntropyResult r = dual;
  r.quantity = "hmax";
  r.value = -dual.value;
  r.optimal_sigma.reset();
  return r;
}

EntropyResult smooth_imax(const QuantumState& rho, const Partition& part, double eps) {
  check_eps(eps);
  const auto rab = roles_marginal(rho, part);
  if (eps == 0.0) {
    auto r = imax(rab, part);
    r.witness = rab;
    return r;
  }
  require_normalized(rab);
  const Index db = rab.layout().dim(part.b);
  const auto c = compress_a(rab, part.a, db);
  const Matrix target = c.iso.adjoint() * rab.matrix() * c.iso;
  const auto o = require(dominate(target, c.left, db, eps, nullptr), "smooth imax");
  EntropyResult r = closed("imax", std::log2(o.objective), eps);
  r.gap = o.gap;
  r.solves = 1;
  r.witness = sanitize(rab.layout(), c.iso * o.smoothed * c.iso.adjoint());
  r.optimal_sigma = normalized_sigma(part.b, rab.layout(), o.x);
  return r;
}

EntropyResult smooth_imax_marginal_search(const QuantumState& rho, const Partition& part, double eps,
                                          int grid) {
  check_eps(eps);
  if (eps == 0.0) return smooth_imax(rho, part, 0.0);
  const auto rab = roles_marginal(rho, part);
  require_normalized(rab);
  if (rab.layout().dim(part.a) != 2) throw DomainError("marginal search needs a qubit A side");
  if (grid < 2) throw DomainError("marginal search grid needs at least two points per axis");
  const Index db = rab.layout().dim(part.b);
  const auto ra = reduce(rab, part.a);
  const Matrix& m = ra.matrix();
  const double c0[3] = {2 * m(0, 1).real(), -2 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};

  EntropyResult best = closed("imax_marginal_search", std::numeric_limits<double>::infinity(), eps);
  double bc[3] = {0, 0, 0};
  bool found = false;
  int solves = 0;
  auto evaluate = [&](const double* c) {
    if (c[0] * c[0] + c[1] * c[1] + c[2] * c[2] > 0.995 * 0.995) return false;
    Matrix tau(2, 2);
    tau << cplx(1 + c[2], 0), cplx(c[0], -c[1]), cplx(c[0], c[1]), cplx(1 - c[2], 0);
    tau *= 0.5;
    const auto tstate = QuantumState::trusted(ra.layout(), tau);
    if (purified_distance(tstate, ra) > eps) return false;
    ++solves;
    const auto o = dominate(rab.matrix(), tau, db, eps, &tau);
    if (!o) return false;
    const double v = std::log2(o->objective);
    if (v >= best.value) return false;
    best.value = v;
    best.gap = o->gap;
    best.witness = sanitize(rab.layout(), o->smoothed);
    best.optimal_sigma = normalized_sigma(part.b, rab.layout(), o->x);
    std::copy(c, c + 3, bc);
    found = true;
    return true;
  };

  const double half = 2.0 * eps;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j)
      for (int k = 0; k < grid; ++k) {
        const double c[3] = {c0[0] + half * (2.0 * i / (grid - 1) - 1),
                             c0[1] + half * (2.0 * j / (grid - 1) - 1),
                             c0[2] + half * (2.0 * k / (grid - 1) - 1)};
        evaluate(c);
      }
  if (!found) throw NumericalError("no admissible marginal found in the smoothing ball");
  for (double step = 2.0 * half / (grid - 1); step > 1e-3;) {
    bool moved = false;
    for (int axis = 0; axis < 3 && !moved; ++axis)
      for (double sgn : {-1.0, 1.0}) {
        double c[3] = {bc[0], bc[1], bc[2]};
        c[axis] += sgn * step;
        if (evaluate(c)) {
          moved = true;
          break;
        }
      }
    if (!moved) step *= 0.5;
  }
  best.solves = solves;
  return best;
}

// --- symmetry-reduced programs ---------------------------------------------------

RealVector schmidt_power(const RealVector& p, int n) {
  if (n < 1) throw DomainError("tensor power must be positive");
  RealVector out = p;
  for (int k = 1; k < n; ++k) {
    RealVector next(out.size() * p.size());
    for (Index i = 0; i < out.size(); ++i) next.segment(i * p.size(), p.size()) = out(i) * p;
    out = next;
  }
  return out;
}

SpectrumTypes SpectrumTypes::plain(const RealVector& p) { return {p, RealVector::Ones(p.size())}; }

SpectrumTypes schmidt_types(const RealVector& p, int n) {
  if (n < 1) throw DomainError("tensor power must be positive");
  const Index d = p.size();
  if (d < 1) throw DomainError("empty spectrum");
  std::vector<double> vals, mults;
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  // enumerate compositions of n into d parts
  std::function<void(Index, int)> rec = [&](Index i, int left) {
    if (i == d - 1) {
      counts[static_cast<std::size_t>(i)] = left;
      double v = 1.0, m = std::lgamma(n + 1.0);
      for (Index j = 0; j < d; ++j) {
        const int c = counts[static_cast<std::size_t>(j)];
        v *= std::pow(p(j), c);
        m -= std::lgamma(c + 1.0);
      }
      vals.push_back(v);
      mults.push_back(std::round(std::exp(m)));
      return;
    }
    for (int c = left; c >= 0; --c) {
      counts[static_cast<std::size_t>(i)] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, n);
  const auto k = static_cast<Index>(vals.size());
  return {Eigen::Map<RealVector>(vals.data(), k), Eigen::Map<RealVector>(mults.data(), k)};
}

namespace {

SpectrumTypes support_of(const SpectrumTypes& t) {
  if (t.value.size() != t.mult.size()) throw DomainError("spectrum values and multiplicities differ in length");
  std::vector<double> v, m;
  for (Index i = 0; i < t.value.size(); ++i) {
    if (t.value(i) < -kPositivityTol) throw DomainError("negative weight in a spectrum");
    if (!(t.mult(i) >= 1.0)) throw DomainError("multiplicities must be at least one");
    if (t.value(i) > kRankTol) {
      v.push_back(t.value(i));
      m.push_back(t.mult(i));
    }
  }
  if (v.empty()) throw DomainError("spectrum has no support");
  const auto k = static_cast<Index>(v.size());
  return {Eigen::Map<RealVector>(v.data(), k), Eigen::Map<RealVector>(m.data(), k)};
}

/// min sum_k m_k x_k s.t. diag(x) >= B >= 0, s^T B s >= 1 - eps^2, sum_k w_k B_kk <= 1.
/// This is the smoothing program for a pure state with Schmidt coefficients p
/// (value p_k repeated m_k times) after twirling by phases and by permutations
/// of equal coefficients; B is the block on normalized class indicators.
///   H_min(C|R):  s_k = sqrt(m_k p_k),  w_k = 1
///   I_max(R:C):  s_k = sqrt(m_k) p_k,  w_k = p_k
/// The second form absorbs diag(p o x) >= B' through B' = D B D with D = diag(sqrt(p)),
/// which keeps tiny coefficients out of the semidefinite constraint.
std::pair<double, double> twirled_program(const RealVector& mult, const RealVector& s, const RealVector& w,
                                          double eps) {
  const Index m = mult.size();
  sdp::Problem prob;
  std::vector<sdp::Var> xs;
  for (Index k = 0; k < m; ++k) xs.push_back(prob.scalar());
  const auto mv = prob.hermitian(m);
  const int dom = prob.add_block(m);
  for (Index k = 0; k < m; ++k) prob.add_term(dom, xs[k], k, k, 1.0);
  prob.add_term(dom, mv, 0, 0, -1.0);
  const int psd = prob.add_block(m);
  prob.add_term(psd, mv, 0, 0);
  const Matrix ss = (s * s.transpose()).cast<cplx>();
  prob.add_nonnegative(prob.trace_with(ss, mv) - LinearExpr(1.0 - eps * eps));
  const Matrix wd = w.cast<cplx>().asDiagonal();
  prob.add_nonnegative(LinearExpr(1.0) - prob.trace_with(wd, mv));
  LinearExpr obj;
  for (Index k = 0; k < m; ++k) obj += mult(k) * prob.trace(xs[k]);
  prob.minimize(obj);
  const auto sol = prob.solve();
  if (!acceptable(sol)) throw NumericalError("reduced smoothing program: " + describe(sol));
  return {sol.primal_objective, sol.gap};
}

}  // namespace

EntropyResult smooth_hmin_pure(const SpectrumTypes& types, double eps) {
  check_eps(eps);
  const auto t = support_of(types);
  if (eps == 0.0) return closed("hmin", -2.0 * std::log2(t.mult.dot(t.value.cwiseSqrt())), 0.0);
  const auto [obj, gap] = twirled_program(t.mult, t.value.cwiseProduct(t.mult).cwiseSqrt(),
                                          RealVector::Ones(t.value.size()), eps);
  EntropyResult r = closed("hmin", -std::log2(obj), eps);
  r.gap = gap;
  r.solves = 1;
  return r;
}

EntropyResult smooth_imax_pure(const SpectrumTypes& types, double eps) {
  check_eps(eps);
  const auto t = support_of(types);
  if (eps == 0.0) return closed("imax", 2.0 * std::log2(t.mult.sum()), 0.0);
  const auto [obj, gap] = twirled_program(t.mult, t.mult.cwiseSqrt().cwiseProduct(t.value), t.value, eps);
  EntropyResult r = closed("imax", std::log2(obj), eps);
  r.gap = gap;
  r.solves = 1;
  return r;
}

EntropyResult smooth_hmin_diagonal(const SpectrumTypes& types, double eps) {
  check_eps(eps);
  const auto q = support_of(types);
  if (eps == 0.0) return closed("hmin", -std::log2(q.value.maxCoeff()), 0.0);
  // min t s.t. t >= w_k, [[w_k, f_k], [f_k, q_k]] >= 0, sum m_k f_k >= sqrt(1 - eps^2), sum m_k w_k <= 1
  sdp::Problem prob;
  const auto t = prob.scalar();
  LinearExpr fid(-std::sqrt(1.0 - eps * eps)), mass(1.0);
  for (Index k = 0; k < q.value.size(); ++k) {
    const auto w = prob.scalar();
    const auto f = prob.scalar();
    const int blk = prob.add_block(2, true);
    prob.add_term(blk, w, 0, 0);
    prob.add_term(blk, f, 0, 1);
    prob.add_constant(blk, Matrix::Constant(1, 1, q.value(k)), 1, 1);
    prob.add_nonnegative(prob.trace(t) - prob.trace(w));
    fid += q.mult(k) * prob.trace(f);
    mass -= q.mult(k) * prob.trace(w);
  }
  prob.add_nonnegative(fid);
  prob.add_nonnegative(mass);
  prob.minimize(prob.trace(t));
  const auto sol = prob.solve();
  if (!acceptable(sol)) throw NumericalError("diagonal smoothing program: " + describe(sol));
  EntropyResult r = closed("hmin", -std::log2(sol.primal_objective), eps);
  r.gap = sol.gap;
  r.solves = 1;
  return r;
}

EntropyResult smooth_hmin_pure(const RealVector& p, double eps) {
  return smooth_hmin_pure(SpectrumTypes::plain(p), eps);
}
EntropyResult smooth_imax_pure(const RealVector& p, double eps) {
  return smooth_imax_pure(SpectrumTypes::plain(p), eps);
}
EntropyResult smooth_hmin_diagonal(const RealVector& p, double eps) {
  return smooth_hmin_diagonal(SpectrumTypes::plain(p), eps);
}

// --- von Neumann quantities ---------------------------------------------------------

double entropy(const QuantumState& rho) {
  const auto e = linalg::eigh(rho.matrix());
  double h = 0.0;
  for (Index i = 0; i < e.values.size(); ++i)
    if (e.values(i) > 1e-15) h -= e.values(i) * std::log2(e.values(i));
  return h;
}

double entropy_of(const QuantumState& rho, const Labels& labels) {
  if (labels.empty()) return 0.0;
  return entropy(reduce(rho, labels));
}

namespace {
Labels join(Labels a, const Labels& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}
}  // namespace

double cond_entropy(const QuantumState& rho, const Labels& a, const Labels& b) {
  return entropy_of(rho, join(a, b)) - entropy_of(rho, b);
}

double mutual_info(const QuantumState& rho, const Labels& a, const Labels& b) {
  return entropy_of(rho, a) + entropy_of(rho, b) - entropy_of(rho, join(a, b));
}

double cond_mutual_info(const QuantumState& rho, const Labels& a, const Labels& b, const Labels& c) {
  return entropy_of(rho, join(a, c)) + entropy_of(rho, join(b, c)) - entropy_of(rho, c) -
         entropy_of(rho, join(join(a, b), c));
}

VonNeumannSuite von_neumann_suite(const QuantumState& rho, const Labels& a, const Labels& b,
                                  const Labels& c) {
  if (std::abs(rho.trace() - 1.0) > 1e-9) throw DomainError("von Neumann quantities need a normalized state");
  return {entropy_of(rho, a), cond_entropy(rho, a, b), mutual_info(rho, a, b),
          cond_mutual_info(rho, a, b, c)};
}

// --- equipartition ------------------------------------------------------------------

double aep_delta(double eps, double v) {
  if (!(eps > 0.0)) throw DomainError("delta needs a positive smoothing parameter");
  return 4.0 * std::log2(v) * std::sqrt(std::log2(2.0 / (eps * eps)));
}

double aep_h(double eps, double eps_prime) {
  const double s = eps * std::sqrt(1.0 - eps_prime * eps_prime) + eps_prime * std::sqrt(1.0 - eps * eps);
  if (s >= 1.0) throw DomainError("h(eps, eps') diverges for these parameters");
  return -std::log2(1.0 - s * s);
}

AepBounds aep_bounds(double h_cond, double v, int n, double eps, double eps_prime) {
  if (n < 1) throw DomainError("number of copies must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  if (!(eps_prime > 0.0 && eps_prime <= 1.0 - eps)) throw DomainError("eps' must lie in (0, 1 - eps]");
  AepBounds b;
  b.h_cond = h_cond;
  b.v = v;
  b.delta_lower = aep_delta(eps, v);
  b.delta_upper = aep_delta(eps_prime, v);
  b.h = aep_h(eps, eps_prime);
  const double rn = std::sqrt(static_cast<double>(n));
  b.lower = h_cond - b.delta_lower / rn;
  b.upper = h_cond + b.delta_upper / rn + b.h / n;
  return b;
}

AepBounds aep_bounds(const QuantumState& rho, const Partition& part, int n, double eps, double eps_prime) {
  const auto rab = roles_marginal(rho, part);
  const std::string ref = fresh_label(rab.layout());
  const auto psi = purify(rab, ref).to_state();
  const double hab = hmax_cond(rab, part).value;
  const double har = hmax_cond(psi, {part.a, {ref}}).value;
  const double v = std::sqrt(std::exp2(hab)) + std::sqrt(std::exp2(har)) + 1.0;
  return aep_bounds(cond_entropy(rab, part.a, part.b), v, n, eps, eps_prime);
}

}  // namespace qsr
