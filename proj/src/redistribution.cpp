#include "qsr/redistribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsr/entropies.hpp"
#include "qsr/error.hpp"

namespace qsr {

namespace {

double log2d(Index d) { return std::log2(static_cast<double>(d)); }

Labels join(Labels a, const Labels& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void require_eps(double e, const char* name, bool allow_zero) {
  if (!(allow_zero ? e >= 0.0 : e > 0.0) || !(e < 1.0))
    throw DomainError(std::string(name) + " must lie in " + (allow_zero ? "[0, 1)" : "(0, 1)"));
}

// exact integer log2, or -1
int exact_log2(Index d) {
  int k = 0;
  while ((Index{1} << k) < d) ++k;
  return (Index{1} << k) == d ? k : -1;
}

QuantumState witness_or(const EntropyResult& r, const QuantumState& fallback) {
  return r.witness ? *r.witness : fallback;
}

}  // namespace

RedistributionInstance::RedistributionInstance(PureState state, ErrorBudget eps)
    : state_(std::move(state)), eps_(eps) {
  Labels got = state_.layout().labels();
  std::sort(got.begin(), got.end());
  if (got != Labels{"A", "B", "C", "R"})
    throw LayoutError("redistribution needs exactly the factors A, B, C, R; got " + state_.layout().to_string());
  if (std::abs(state_.norm() - 1.0) > 1e-9) throw DomainError("redistribution state must be normalized");
  require_eps(eps_.eps1, "eps1", true);
  require_eps(eps_.eps2, "eps2", true);
  require_eps(eps_.eps3, "eps3", false);
  require_eps(eps_.eps4, "eps4", false);
}

// --- Uhlmann ------------------------------------------------------------------

IsometryMap uhlmann_isometry(const PureState& pure1, const PureState& pure2, const Labels& shared) {
  const auto& l1 = pure1.layout();
  const auto& l2 = pure2.layout();
  if (!(l1.select(shared) == l2.select(shared)))
    throw LayoutError("shared factors differ: " + l1.select(shared).to_string() + " vs " +
                      l2.select(shared).to_string());
  const SystemLayout comp1 = l1.without(shared), comp2 = l2.without(shared);
  const auto p1 = permute(pure1, join(shared, comp1.labels()));
  const auto p2 = permute(pure2, join(shared, comp2.labels()));
  const Index ds = l1.dim(shared), d1 = comp1.total_dim(), d2 = comp2.total_dim();

  // row = shared index, column = complement index
  auto as_matrix = [ds](const Vector& v, Index dc) {
    Matrix m(ds, dc);
    for (Index i = 0; i < ds; ++i)
      for (Index j = 0; j < dc; ++j) m(i, j) = v(i * dc + j);
    return m;
  };
  const Matrix m1 = as_matrix(p1.vector(), d1), m2 = as_matrix(p2.vector(), d2);

  // <p2|(I (x) V)|p1> = Tr(V M1^T conj(M2)) is maximized in modulus by
  // V = conj(P) Q^T on the leading singular pairs of K = M2^dagger M1 = P S Q^dagger.
  const Matrix k = m2.adjoint() * m1;
  Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Index r = std::min(d1, d2);
  const Matrix v = svd.matrixU().leftCols(r).conjugate() * svd.matrixV().leftCols(r).transpose();
  const MapKind kind = d2 >= d1 ? (d2 == d1 ? MapKind::unitary : MapKind::isometry) : MapKind::partial_isometry;
  return IsometryMap::certified(comp1, comp2, v, kind);
}

// --- plan -----------------------------------------------------------------------

RedistributionPlan plan_protocol(const RedistributionInstance& inst, std::uint64_t seed, int max_tries) {
  const auto& psi = inst.state();
  const auto& eps = inst.eps();
  const QuantumState rho = psi.to_state();
  const Index dc = psi.layout().dim("C");
  const int log_c = exact_log2(dc);
  if (log_c < 0) throw DomainError("|C| = " + std::to_string(dc) + " is not a power of two");

  const auto w1 = smooth_hmin(rho, {{"C"}, {"B", "R"}}, eps.eps1);
  const auto w2 = smooth_hmin(rho, {{"C"}, {"A", "R"}}, eps.eps2);
  const auto omega1 = witness_or(w1, reduce(rho, {"C", "B", "R"}));
  const auto omega2 = witness_or(w2, reduce(rho, {"C", "A", "R"}));

  const double raw1 = 0.5 * log_c + 0.5 * w1.value - std::log2(1.0 / eps.eps3);
  const double raw2 = 0.5 * log_c + 0.5 * w2.value - std::log2(1.0 / eps.eps4);
  const int k1 = std::clamp(static_cast<int>(std::floor(raw1 + kDimensionSlack)), 0, log_c);
  const int k2 = std::clamp(static_cast<int>(std::floor(raw2 + kDimensionSlack)), 0, log_c - k1);
  const Index c1 = Index{1} << k1, c2 = Index{1} << k2, c3 = Index{1} << (log_c - k1 - k2);

  const Split split("C", {{SystemLabel("C1"), c1}, {SystemLabel("C2"), c2}, {SystemLabel("C3"), c3}});
  auto found = bidecoupling_search(omega1, omega2, split, eps.eps3, eps.eps4, max_tries, seed);

  const auto after_u = apply_isometry(found.unitary, psi);
  const Relabeling to_alice{{"A", "A'"}, {"C", "C'"}};
  const Relabeling to_bob{{"B", "B'''"}, {"C", "C'''"}};

  const auto pure1_a = permute(after_u, {"C2", "C3", "A", "C1", "B", "R"});
  const auto target_a = tensor_product(max_entangled("A1", "C1", c1),
                                       PureState::from_vector(psi.layout().relabeled(to_alice), psi.vector()));
  auto v1 = uhlmann_isometry(pure1_a, permute(target_a, {"A1", "A'", "C'", "C1", "B", "R"}), {"C1", "B", "R"});

  const auto pure1_b = permute(after_u, {"C1", "C3", "B", "A", "C2", "R"});
  const auto target_b = tensor_product(max_entangled("B2", "C2", c2),
                                       PureState::from_vector(psi.layout().relabeled(to_bob), psi.vector()));
  auto v2 = uhlmann_isometry(pure1_b, permute(target_b, {"B2", "B'''", "C'''", "A", "C2", "R"}), {"A", "C2", "R"});

  auto v1_hat = v1.relabeled({{"C2", "C2''"}, {"C3", "C3''"}, {"A", "A''"}}, {{"A1", "TA"}});
  auto v2_hat = v2.relabeled({{"C1", "TB"}, {"C3", "C3''"}}, {});
  Matrix projector = v1_hat.image_projector();
  Vector fallback = v1_hat.matrix().col(0);
  return RedistributionPlan{.c1 = c1,
                            .c2 = c2,
                            .c3 = c3,
                            .hmin_cbr = w1.value,
                            .hmin_car = w2.value,
                            .raw_log_c1 = raw1,
                            .raw_log_c2 = raw2,
                            .omega1 = omega1,
                            .omega2 = omega2,
                            .u = std::move(found.unitary),
                            .decoupling = found.accepted,
                            .tries = found.tries,
                            .v1 = std::move(v1),
                            .v2 = std::move(v2),
                            .v1_hat = std::move(v1_hat),
                            .v2_hat = std::move(v2_hat),
                            .m_projector = std::move(projector),
                            .m_fallback = std::move(fallback),
                            .seed = seed};
}

QuantumState apply_correction(const Matrix& projector, const Vector& fallback, const SystemLayout& regs,
                              const QuantumState& s) {
  const Index d = regs.total_dim();
  if (projector.rows() != d || fallback.size() != d) throw LayoutError("correction size mismatch on " + regs.to_string());
  const Matrix reject = Matrix::Identity(d, d) - projector;
  const auto kept = apply_kraus({projector}, regs, regs, s);
  const auto rest = partial_trace(apply_kraus({reject}, regs, regs, s), regs.labels());
  const auto replaced = tensor_product(QuantumState::trusted(regs, fallback * fallback.adjoint()), rest);
  const auto aligned = permute(replaced, kept.layout().labels());
  return QuantumState::trusted(kept.layout(), kept.matrix() + aligned.matrix());
}

ProtocolTranscript execute_protocol(const RedistributionPlan& plan, const RedistributionInstance& inst) {
  const auto& psi = inst.state();
  const auto& eps = inst.eps();
  ProtocolTranscript t;
  t.c1 = plan.c1;
  t.c2 = plan.c2;
  t.c3 = plan.c3;

  const auto start = tensor_product(psi.to_state(), max_entangled("TA", "TB", plan.c1).to_state());
  auto s = apply_isometry(plan.u, start);  // Charlie splits C
  t.steps.push_back(s);

  s = apply_isometry(plan.v1, s);  // Alice receives C2 C3 and applies V1
  s = apply_correction(plan.m_projector, plan.m_fallback, plan.v1_hat.out(), s);
  s = apply_isometry(plan.v1_hat.adjoint(), s);
  t.steps.push_back(s);

  t.steps.push_back(s);  // C3'' travels from Alice to Bob

  s = apply_isometry(plan.v2_hat, s);
  t.steps.push_back(s);

  const auto target =
      tensor_product(tensor_product(PureState::from_vector(
                                        psi.layout().relabeled({{"A", "A''"}, {"B", "B'''"}, {"C", "C'''"}}),
                                        psi.vector()),
                                    max_entangled("A1", "C1", plan.c1)),
                     max_entangled("C2''", "B2", plan.c2));
  const auto aligned = permute(s, target.layout().labels());
  t.final_distance = purified_distance(aligned, target);

  const Matrix r_before = reduce(psi, {"R"}).matrix();
  const Matrix r_after = reduce(s, {"R"}).matrix();
  t.r_marginal_change = (r_after - r_before).cwiseAbs().maxCoeff();

  t.q = log2d(plan.c3);
  t.charlie_to_alice = log2d(plan.c2 * plan.c3);
  t.ebits_consumed = log2d(plan.c1);
  t.ebits_generated = log2d(plan.c2);
  t.e = t.ebits_consumed - t.ebits_generated;
  t.error_bound = 8 * eps.eps1 + 2 * eps.eps2 + 4 * std::sqrt(3 * eps.eps3) + std::sqrt(3 * eps.eps4);
  return t;
}

// --- bounds -----------------------------------------------------------------------

AchievabilityBounds achievability_bounds(const QuantumState& rho, const RegisterGroups& g, const ErrorBudget& eps) {
  require_eps(eps.eps1, "eps1", true);
  require_eps(eps.eps2, "eps2", true);
  require_eps(eps.eps3, "eps3", false);
  require_eps(eps.eps4, "eps4", false);
  const Partition c_br{g.c, join(g.b, g.r)}, c_b{g.c, g.b};
  const double l3 = std::log2(1.0 / eps.eps3), l4 = std::log2(1.0 / eps.eps4);
  AchievabilityBounds b;
  b.hmin_cbr = smooth_hmin(rho, c_br, eps.eps1).value;
  b.hmax_cb = smooth_hmax(rho, c_b, eps.eps2).value;
  if (eps.eps1 == eps.eps2) {
    b.hmin_cbr_swapped = b.hmin_cbr;
    b.hmax_cb_swapped = b.hmax_cb;
  } else {
    b.hmin_cbr_swapped = smooth_hmin(rho, c_br, eps.eps2).value;
    b.hmax_cb_swapped = smooth_hmax(rho, c_b, eps.eps1).value;
  }
  auto q = [&](double hmax, double hmin) { return 0.5 * hmax - 0.5 * hmin + l3 + l4 + 2.0; };
  auto e = [&](double hmax, double hmin) { return 0.5 * hmax + 0.5 * hmin - l3 + l4 + 1.0; };
  b.q_bound = q(b.hmax_cb, b.hmin_cbr);
  b.e_bound = e(b.hmax_cb, b.hmin_cbr);
  b.q_bound_swapped = q(b.hmax_cb_swapped, b.hmin_cbr_swapped);
  b.e_bound_swapped = e(b.hmax_cb_swapped, b.hmin_cbr_swapped);
  b.error_bound = 8 * eps.eps1 + 2 * eps.eps2 + 4 * std::sqrt(3 * eps.eps3) + std::sqrt(3 * eps.eps4);
  return b;
}

double ConverseBounds::max() const {
  return std::max({imax_b, hmin_b, hmax_b, imax_a, hmin_a, hmax_a});
}

namespace {

void require_converse_eps(double eps1, double eps2) {
  require_eps(eps1, "eps1", false);
  if (!(eps2 > 0.0) || !(eps2 < 1.0 - eps1)) throw DomainError("eps2 must lie in (0, 1 - eps1)");
}

}  // namespace

ConverseBounds converse_q_bounds(const QuantumState& rho, const RegisterGroups& g, double eps1, double eps2,
                                 bool marginal_search) {
  require_converse_eps(eps1, eps2);
  const double big = eps1 + eps2;
  ConverseBounds out;
  auto side = [&](const Labels& s, double& im, double& hmin, double& hmax, std::optional<double>& search) {
    const Labels sc = join(s, g.c);
    im = 0.5 * (smooth_imax(rho, {g.r, sc}, big).value - smooth_imax(rho, {g.r, s}, eps2).value);
    hmin = 0.5 * (smooth_hmin(rho, {g.r, s}, eps2).value - smooth_hmin(rho, {g.r, sc}, big).value);
    hmax = 0.5 * (smooth_hmax(rho, {g.r, s}, big).value - smooth_hmax(rho, {g.r, sc}, eps2).value);
    if (marginal_search)
      search = 0.5 * (smooth_imax_marginal_search(rho, {g.r, sc}, big).value -
                       smooth_imax_marginal_search(rho, {g.r, s}, eps2).value);
  };
  side(g.b, out.imax_b, out.hmin_b, out.hmax_b, out.imax_b_search);
  side(g.a, out.imax_a, out.hmin_a, out.hmax_a, out.imax_a_search);
  return out;
}

double converse_resource_bound(const QuantumState& rho, const RegisterGroups& g, double eps1, double eps2) {
  require_converse_eps(eps1, eps2);
  return smooth_hmin(rho, {join(g.b, g.c), {}}, eps2).value - smooth_hmin(rho, {g.b, {}}, eps1 + eps2).value;
}

// --- accounting -------------------------------------------------------------------

InteractiveTranscript interactive_account(const std::vector<Message>& messages, double ebits_consumed,
                                          double ebits_generated) {
  InteractiveTranscript t;
  t.messages = messages;
  for (const auto& m : messages) {
    if (m.dim < 1) throw DomainError("message dimension must be positive");
    (m.direction == Direction::a_to_b ? t.qcc_ab : t.qcc_ba) += log2d(m.dim);
  }
  t.ebits_consumed = ebits_consumed;
  t.ebits_generated = ebits_generated;
  return t;
}

InteractiveTranscript interactive_account(const ProtocolTranscript& p) {
  return interactive_account({{Direction::a_to_b, p.c3}}, p.ebits_consumed, p.ebits_generated);
}

// --- iid trend ----------------------------------------------------------------------

std::pair<PureState, RegisterGroups> tensor_power(const PureState& psi, int n) {
  if (n < 1) throw DomainError("copy count must be positive");
  RegisterGroups g{{}, {}, {}, {}};
  std::optional<PureState> acc;
  for (int k = 1; k <= n; ++k) {
    Relabeling names;
    for (const auto& l : psi.layout().labels()) {
      const std::string to = l + "#" + std::to_string(k);
      names[l] = to;
      if (l == "A") g.a.push_back(to);
      else if (l == "B") g.b.push_back(to);
      else if (l == "C") g.c.push_back(to);
      else if (l == "R") g.r.push_back(to);
      else throw LayoutError("tensor power expects the factors A, B, C, R; got " + l);
    }
    const auto copy = PureState::from_vector(psi.layout().relabeled(names), psi.vector());
    acc = acc ? tensor_product(*acc, copy) : copy;
  }
  return {*acc, g};
}

namespace {

// Largest v over the conditional pairs entering the bounds, on one copy.
double trend_v(const QuantumState& rho) {
  const Partition parts[] = {{{"C"}, {"B", "R"}}, {{"C"}, {"B"}}, {{"R"}, {"B"}},
                             {{"R"}, {"B", "C"}}, {{"B", "C"}, {}}, {{"R"}, {"C"}}};
  double v = 0.0;
  for (const auto& p : parts) v = std::max(v, aep_bounds(rho, p, 1, 0.1, 0.1).v);
  return v;
}

}  // namespace

std::vector<TrendRow> iid_trend(const PureState& psi, int n_max, double eps, Index cap) {
  if (n_max < 1) throw DomainError("n_max must be positive");
  if (!(eps > 0.0) || !(eps < 0.5)) throw DomainError("trend radius must lie in (0, 1/2)");
  RedistributionInstance check(psi, {eps, eps, eps, eps});
  (void)check;
  const QuantumState rho = psi.to_state();
  const auto& l = psi.layout();
  const bool reduced = l.dim("A") == 1 && l.dim("B") == 1;

  const double target_q = 0.5 * cond_mutual_info(rho, {"C"}, {"R"}, {"B"});
  const double target_hcb = cond_entropy(rho, {"C"}, {"B"});
  const double v = trend_v(rho);
  const double l34 = 2.0 * std::log2(1.0 / eps);

  RealVector p;
  if (reduced) {
    const auto e = linalg::eigh(reduce(rho, {"C"}).matrix());
    std::vector<double> keep;
    for (Index i = 0; i < e.values.size(); ++i)
      if (e.values(i) > 1e-14) keep.push_back(e.values(i));
    std::sort(keep.rbegin(), keep.rend());
    p = Eigen::Map<RealVector>(keep.data(), static_cast<Index>(keep.size()));
    p /= p.sum();
  }

  double total = 1.0;
  for (int k = 0; k < n_max; ++k) total *= static_cast<double>(l.total_dim());
  if (total > static_cast<double>(cap)) {
    std::ostringstream os;
    os << "n = " << n_max << " gives |ABCR|^n = " << total << " beyond the cap " << cap;
    throw DomainError(os.str());
  }

  std::vector<TrendRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    TrendRow r;
    r.n = n;
    double hmin_cbr, hmax_cb, conv_hmin, conv_q, resource;
    if (reduced) {
      r.path = "reduced";
      const auto pn = schmidt_types(p, n);
      const double pure1 = smooth_hmin_pure(pn, eps).value;
      const double pure2 = smooth_hmin_pure(pn, 2 * eps).value;
      const double diag1 = smooth_hmin_diagonal(pn, eps).value;
      hmin_cbr = pure1;
      hmax_cb = -pure1;
      conv_hmin = 0.5 * (diag1 - pure2);
      const double conv_imax = 0.5 * (smooth_imax_pure(pn, 2 * eps).value - std::log2(1.0 - eps * eps));
      conv_q = std::max(conv_hmin, conv_imax);
      resource = diag1 + std::log2(1.0 - 4 * eps * eps);
    } else {
      r.path = "full";
      const auto [pw, g] = tensor_power(psi, n);
      const auto st = pw.to_state();
      const auto ach = achievability_bounds(st, g, {eps, eps, eps, eps});
      hmin_cbr = ach.hmin_cbr;
      hmax_cb = ach.hmax_cb;
      const auto conv = converse_q_bounds(st, g, eps, eps);
      conv_hmin = conv.hmin_b;
      conv_q = conv.max();
      resource = converse_resource_bound(st, g, eps, eps);
    }
    const double dn = n;
    r.ach_entropic = 0.5 * (hmax_cb - hmin_cbr) / dn;
    r.ach_q = (0.5 * hmax_cb - 0.5 * hmin_cbr + l34 + 2.0) / dn;
    r.ach_e = (0.5 * hmax_cb + 0.5 * hmin_cbr + 1.0) / dn;
    r.conv_q = conv_q / dn;
    r.conv_hmin = conv_hmin / dn;
    r.resource = resource / dn;
    r.target_q = target_q;
    r.target_hcb = target_hcb;
    r.gap_ach = r.ach_entropic - target_q;
    r.gap_conv = target_q - r.conv_hmin;
    r.gap_resource = target_hcb - r.resource;
    r.envelope = aep_delta(eps, v) / std::sqrt(dn) + aep_h(2 * eps, eps) / dn;
    rows.push_back(r);
  }
  return rows;
}

// --- serialization -------------------------------------------------------------------

nlohmann::json to_json(const RedistributionPlan& p) {
  return {{"seed", p.seed},
          {"dims", {{"C1", p.c1}, {"C2", p.c2}, {"C3", p.c3}}},
          {"hmin_cbr", p.hmin_cbr},
          {"hmin_car", p.hmin_car},
          {"raw_log_c1", p.raw_log_c1},
          {"raw_log_c2", p.raw_log_c2},
          {"decoupling", {{"seed", p.decoupling.seed},
                          {"defect1", p.decoupling.defect1},
                          {"defect2", p.decoupling.defect2},
                          {"tries", p.tries}}}};
}

nlohmann::json to_json(const ProtocolTranscript& t) {
  return {{"dims", {{"C1", t.c1}, {"C2", t.c2}, {"C3", t.c3}}},
          {"q", t.q},
          {"charlie_to_alice", t.charlie_to_alice},
          {"ebits_consumed", t.ebits_consumed},
          {"ebits_generated", t.ebits_generated},
          {"e", t.e},
          {"final_distance", t.final_distance},
          {"error_bound", t.error_bound},
          {"r_marginal_change", t.r_marginal_change}};
}

nlohmann::json to_json(const AchievabilityBounds& b) {
  return {{"hmax_cb", b.hmax_cb},
          {"hmin_cbr", b.hmin_cbr},
          {"q_bound", b.q_bound},
          {"e_bound", b.e_bound},
          {"swapped", {{"hmax_cb", b.hmax_cb_swapped},
                       {"hmin_cbr", b.hmin_cbr_swapped},
                       {"q_bound", b.q_bound_swapped},
                       {"e_bound", b.e_bound_swapped}}},
          {"error_bound", b.error_bound}};
}

nlohmann::json to_json(const ConverseBounds& b) {
  nlohmann::json j = {{"imax_b", b.imax_b}, {"hmin_b", b.hmin_b}, {"hmax_b", b.hmax_b},
                      {"imax_a", b.imax_a}, {"hmin_a", b.hmin_a}, {"hmax_a", b.hmax_a},
                      {"max", b.max()}};
  if (b.imax_b_search) j["imax_b_search"] = *b.imax_b_search;
  if (b.imax_a_search) j["imax_a_search"] = *b.imax_a_search;
  return j;
}

nlohmann::json to_json(const InteractiveTranscript& t) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : t.messages)
    msgs.push_back({{"direction", m.direction == Direction::a_to_b ? "A->B" : "B->A"}, {"dim", m.dim}});
  return {{"messages", msgs},
          {"qcc_ab", t.qcc_ab},
          {"qcc_ba", t.qcc_ba},
          {"ebits_consumed", t.ebits_consumed},
          {"ebits_generated", t.ebits_generated},
          {"net_ebits", t.net_ebits()}};
}

nlohmann::json to_json(const TrendRow& r) {
  return {{"n", r.n},
          {"path", r.path},
          {"ach_entropic", r.ach_entropic},
          {"ach_q", r.ach_q},
          {"ach_e", r.ach_e},
          {"conv_q", r.conv_q},
          {"conv_hmin", r.conv_hmin},
          {"resource", r.resource},
          {"target_q", r.target_q},
          {"target_hcb", r.target_hcb},
          {"gap_ach", r.gap_ach},
          {"gap_conv", r.gap_conv},
          {"gap_resource", r.gap_resource},
          {"envelope", r.envelope}};
}

std::string trend_csv_header() {
  return "n,path,ach_entropic,ach_q,ach_e,conv_q,conv_hmin,resource,target_q,target_hcb,gap_ach,gap_conv,"
         "gap_resource,envelope\n";
}

std::string to_csv_row(const TrendRow& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.n << ',' << r.path << ',' << r.ach_entropic << ',' << r.ach_q << ',' << r.ach_e << ',' << r.conv_q << ','
     << r.conv_hmin << ',' << r.resource << ',' << r.target_q << ',' << r.target_hcb << ',' << r.gap_ach << ','
     << r.gap_conv << ',' << r.gap_resource << ',' << r.envelope << '\n';
  return os.str();
}

}  // namespace qsr
