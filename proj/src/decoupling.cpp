#include "qsr/decoupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsr/entropies.hpp"
#include "qsr/error.hpp"

namespace qsr {

Split::Split(std::string parent, std::vector<Factor> children)
    : parent_(std::move(parent)), children_(std::move(children)) {
  if (children_.empty()) throw LayoutError("split of " + parent_ + " needs children");
  SystemLayout check(children_);  // validates labels
  (void)check;
}

Labels Split::others(const std::string& kept) const {
  Labels out;
  bool found = false;
  for (const auto& f : children_) {
    if (f.label.name() == kept) found = true;
    else out.push_back(f.label.name());
  }
  if (!found) throw LayoutError("split of " + parent_ + " has no child " + kept);
  return out;
}

Index Split::dim() const { return child_layout().total_dim(); }

namespace {

void check_map(const IsometryMap& u, const QuantumState& rho, const Split& split) {
  const Index d = rho.layout().dim(split.parent());
  if (split.dim() != d)
    throw LayoutError("split dimension " + std::to_string(split.dim()) + " differs from |" + split.parent() +
                      "| = " + std::to_string(d));
  if (!(u.in() == SystemLayout{{split.parent(), d}}) || !(u.out() == split.child_layout()))
    throw LayoutError("decoupling map must take " + split.parent() + " to " + split.child_layout().to_string());
}

QuantumState rest_of(const QuantumState& rho, const std::string& parent) {
  return reduce(rho, rho.layout().without({parent}).labels());
}

double log2d(Index d) { return std::log2(static_cast<double>(d)); }

}  // namespace

double decoupling_defect_after(const QuantumState& out, const QuantumState& rest, const Split& split,
                               const std::string& kept) {
  const auto traced = partial_trace(out, split.others(kept));
  const auto target = permute_and_embed(rest, traced.layout(), FillPolicy::maximally_mixed);
  return linalg::trace_norm(traced.matrix() - target.matrix());
}

double decoupling_defect(const QuantumState& rho, const IsometryMap& u, const Split& split,
                         const std::string& kept) {
  check_map(u, rho, split);
  return decoupling_defect_after(apply_isometry(u, rho), rest_of(rho, split.parent()), split, kept);
}

double decoupling_dim_bound(const QuantumState& rho, const Labels& a, const Labels& r, double eps) {
  if (!(eps > 0.0)) throw DomainError("decoupling error must be positive");
  const double h = hmin_cond(rho, {a, r}).value;
  return 0.5 * log2d(rho.layout().dim(a)) + 0.5 * h - std::log2(1.0 / eps);
}

DecouplingReport sample_decoupling(const QuantumState& rho, const Split& split, int samples,
                                   std::uint64_t seed, double eps) {
  if (samples < 1) throw DomainError("sample count must be positive");
  const std::string& parent = split.parent();
  const Index d = rho.layout().dim(parent);
  const std::string kept = split.children().front().label.name();
  DecouplingReport rep;
  rep.seed = seed;
  rep.eps = eps;
  rep.kept_dim = split.children().front().dim;
  rep.parent_dim = d;
  rep.dim_bound = decoupling_dim_bound(rho, {parent}, rho.layout().without({parent}).labels(), eps);
  rep.admissible = log2d(rep.kept_dim) <= rep.dim_bound + 1e-12;

  const auto rest = rest_of(rho, parent);
  const SystemLayout in{{parent, d}};
  for (int k = 0; k < samples; ++k) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(k));
    const auto u = haar_unitary(s, in, split.child_layout());
    check_map(u, rho, split);
    rep.sample_seeds.push_back(s);
    rep.defects.push_back(decoupling_defect_after(apply_isometry(u, rho), rest, split, kept));
  }
  const double n = static_cast<double>(samples);
  double sum = 0.0;
  for (double x : rep.defects) sum += x;
  rep.mean = sum / n;
  if (samples > 1) {
    double ss = 0.0;
    for (double x : rep.defects) ss += (x - rep.mean) * (x - rep.mean);
    rep.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  rep.within_bound = rep.mean <= eps + 3.0 * rep.std_error;
  return rep;
}

nlohmann::json to_json(const DecouplingReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t k = 0; k < r.defects.size(); ++k)
    samples.push_back({{"seed", r.sample_seeds[k]}, {"defect", r.defects[k]}});
  return {{"seed", r.seed},
          {"eps", r.eps},
          {"kept_dim", r.kept_dim},
          {"parent_dim", r.parent_dim},
          {"dim_bound_bits", r.dim_bound},
          {"admissible", r.admissible},
          {"mean_defect", r.mean},
          {"std_error", r.std_error},
          {"within_bound", r.within_bound},
          {"samples", samples}};
}

std::string to_csv(const DecouplingReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "seed,defect\n";
  for (std::size_t k = 0; k < r.defects.size(); ++k) os << r.sample_seeds[k] << ',' << r.defects[k] << '\n';
  return os.str();
}

// --- bi-decoupling ------------------------------------------------------------------

namespace {

void check_three_way(const Split& split) {
  if (split.children().size() != 3) throw LayoutError("bi-decoupling needs a split into three children");
}

}  // namespace

double bidecoupling_dim_bound(const QuantumState& rho, const std::string& c, double eps) {
  return decoupling_dim_bound(rho, {c}, rho.layout().without({c}).labels(), eps);
}

BiDecouplingTrial bidecoupling_trial(const QuantumState& rho1, const QuantumState& rho2, const Split& split,
                                     std::uint64_t seed) {
  check_three_way(split);
  const std::string& c = split.parent();
  const auto u = haar_unitary(seed, SystemLayout{{c, rho1.layout().dim(c)}}, split.child_layout());
  const auto& ch = split.children();
  return {seed, decoupling_defect(rho1, u, split, ch[0].label.name()),
          decoupling_defect(rho2, u, split, ch[1].label.name())};
}

BiDecouplingResult bidecoupling_search(const QuantumState& rho1, const QuantumState& rho2, const Split& split,
                                       double eps3, double eps4, int max_tries, std::uint64_t seed) {
  check_three_way(split);
  if (!(eps3 > 0.0 && eps4 > 0.0)) throw DomainError("bi-decoupling errors must be positive");
  if (max_tries < 1) throw DomainError("bi-decoupling needs at least one try");
  const std::string& c = split.parent();
  const auto& ch = split.children();
  const std::pair<const QuantumState*, double> sides[2] = {{&rho1, eps3}, {&rho2, eps4}};
  for (int i = 0; i < 2; ++i) {
    if (ch[i].dim == 1) continue;
    const double bound = bidecoupling_dim_bound(*sides[i].first, c, sides[i].second);
    if (log2d(ch[i].dim) > bound + kDimensionSlack) {
      std::ostringstream os;
      os << "log|" << ch[i].label.name() << "| = " << log2d(ch[i].dim) << " exceeds the admissible " << bound;
      throw DomainError(os.str());
    }
  }

  const SystemLayout in{{c, rho1.layout().dim(c)}};
  const auto rest1 = rest_of(rho1, c), rest2 = rest_of(rho2, c);
  BiDecouplingTrial best{0, 1e300, 1e300};
  double best_score = 1e300;
  for (int k = 0; k < max_tries; ++k) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(k));
    const auto u = haar_unitary(s, in, split.child_layout());
    check_map(u, rho1, split);
    check_map(u, rho2, split);
    const BiDecouplingTrial t{s, decoupling_defect_after(apply_isometry(u, rho1), rest1, split, ch[0].label.name()),
                              decoupling_defect_after(apply_isometry(u, rho2), rest2, split, ch[1].label.name())};
    if (t.defect1 <= 3.0 * eps3 && t.defect2 <= 3.0 * eps4) return {u, t, k + 1};
    const double score = std::max(t.defect1 / (3.0 * eps3), t.defect2 / (3.0 * eps4));
    if (score < best_score) {
      best_score = score;
      best = t;
    }
  }
  std::ostringstream os;
  os << "bi-decoupling search exhausted " << max_tries << " tries; best defects " << best.defect1 << " and "
     << best.defect2 << " against thresholds " << 3.0 * eps3 << " and " << 3.0 * eps4;
  throw NumericalError(os.str());
}

}  // namespace qsr
