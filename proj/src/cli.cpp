#include "qsr/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include "qsr/decoupling.hpp"
#include "qsr/entropies.hpp"
#include "qsr/error.hpp"
#include "qsr/redistribution.hpp"
#include "qsr/serialize.hpp"

namespace qsr {

using nlohmann::json;

namespace {

const Labels kRegisterNames{"A", "B", "C", "R"};
const std::set<std::string> kCommands{"entropy", "decouple", "redistribute", "converse", "aep", "sweep"};
const std::set<std::string> kQuantities{"h", "i", "hmin", "hmax", "imax"};
const std::set<std::string> kConfigKeys{"command", "state", "dims", "base", "eps", "seed", "samples", "n",
                                        "quantity", "cond", "split", "env", "search", "format"};

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == '\n') continue;
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

bool is_power_of(Index d, Index base) {
  if (d < 1) return false;
  while (d % base == 0) d /= base;
  return d == 1;
}

bool is_file_state(const std::string& s) { return s.rfind("file:", 0) == 0; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Either a pure or a mixed state; a pure file stores a flat amplitude list.
std::variant<PureState, QuantumState> load_state_file(const std::string& path) {
  const json j = read_json_file(path);
  if (!j.contains("re") || !j.at("re").is_array())
    throw ConfigError("state file '" + path + "' needs a 're' array");
  const bool mixed = !j.at("re").empty() && j.at("re").at(0).is_array();
  if (mixed) return state_from_json(j);
  return pure_from_json(j);
}

SystemLayout layout_of(const std::vector<Index>& dims) {
  std::vector<Factor> f;
  for (std::size_t k = 0; k < dims.size(); ++k) f.push_back({SystemLabel(kRegisterNames[k]), dims[k]});
  return SystemLayout(std::move(f));
}

PureState standard_pure(const ExperimentConfig& c, std::uint64_t state_seed) {
  const SystemLayout layout = layout_of(c.dims);
  if (c.state == "random") return random_pure_state(state_seed, layout);
  if (c.state == "product") return basis_state(layout, 0);
  Vector v = Vector::Zero(layout.total_dim());
  if (c.state == "bell") {
    // maximally entangled across the last two registers, the others in |0>
    const Index d = c.dims.back();
    for (Index i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
    return PureState::from_vector(layout, std::move(v));
  }
  // ghz: |0...0> + |1...1> over the registers of dimension at least two
  Index ones = 0;
  for (Index d : c.dims) ones = ones * d + (d > 1 ? 1 : 0);
  v(0) = v(ones) = 1.0 / std::sqrt(2.0);
  return PureState::from_vector(layout, std::move(v));
}

PureState configured_pure(const ExperimentConfig& c, std::uint64_t state_seed) {
  if (!is_file_state(c.state)) return standard_pure(c, state_seed);
  auto s = load_state_file(c.state.substr(5));
  if (auto* p = std::get_if<PureState>(&s)) return *p;
  throw ConfigError("state: command '" + c.command + "' needs a pure state, file holds a density matrix");
}

Partition parse_cond(const std::string& cond) {
  const auto sides = split_on(cond, '|');
  if (sides.size() != 2 || sides[0].empty()) throw ConfigError("cond: expected 'X,Y|Z', got '" + cond + "'");
  Partition p;
  p.a = split_on(sides[0], ',');
  if (!sides[1].empty()) p.b = split_on(sides[1], ',');
  return p;
}

std::vector<Index> default_dims(const std::string& command) {
  if (command == "entropy") return {2, 2};
  if (command == "decouple") return {4, 2};
  if (command == "aep") return {1, 1, 2, 2};
  return {2, 2, 2, 2};
}

std::vector<double> default_eps(const std::string& command) {
  if (command == "entropy") return {0.0};
  if (command == "decouple") return {0.5};
  if (command == "redistribute") return {0.0, 0.0, 0.01, 0.01};
  if (command == "converse") return {0.05, 0.01};
  if (command == "aep") return {0.1};
  return {0.01, 0.05};
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

/// Runs body(k) for k in [0, n) on up to `threads` workers. The first exception
/// by run index wins, so failures are as deterministic as results.
void parallel_runs(int n, int threads, const std::function<void(int)>& body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int k = 0; k < n; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) {
        try {
          body(k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Stats {
  double mean = 0.0, max = 0.0;
};

Stats stats(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  s.max = *std::max_element(xs.begin(), xs.end());
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  return s;
}

// --- commands ------------------------------------------------------------

void run_entropy(Report& rep) {
  const auto& c = rep.config;
  const std::uint64_t state_seed = derive_seed(c.seed, 0);
  const QuantumState rho = configured_state(c, state_seed);
  const Partition part = parse_cond(c.cond);
  const double eps = c.eps[0];
  json rec = {{"quantity", c.quantity}, {"cond", c.cond}, {"eps", eps}, {"state_seed", state_seed}};
  std::vector<std::string> row{c.quantity, c.cond, num(eps)};
  if (c.quantity == "h" || c.quantity == "i") {
    const double v = c.quantity == "h" ? (part.b.empty() ? entropy_of(rho, part.a) : cond_entropy(rho, part.a, part.b))
                                       : mutual_info(rho, part.a, part.b);
    rec.update({{"value_bits", v}, {"infinite", false}, {"gap", 0.0}, {"solves", 0}});
    row.insert(row.end(), {num(v), "false", "0"});
  } else {
    EntropyResult r = c.quantity == "hmin"   ? smooth_hmin(rho, part, eps)
                      : c.quantity == "hmax" ? smooth_hmax(rho, part, eps)
                                             : smooth_imax(rho, part, eps);
    rec.update({{"value_bits", r.infinite ? json(nullptr) : json(r.value)},
                {"infinite", r.infinite},
                {"gap", r.gap},
                {"solves", r.solves}});
    row.insert(row.end(), {r.infinite ? "inf" : num(r.value), r.infinite ? "true" : "false", num(r.gap)});
  }
  rep.records.push_back(rec);
  rep.csv_columns = {"quantity", "cond", "eps", "value_bits", "infinite", "gap"};
  rep.csv_rows.push_back(row);
  rep.aggregate = {{"runs", 1}};
}

void run_decouple(Report& rep) {
  const auto& c = rep.config;
  const std::uint64_t state_seed = derive_seed(c.seed, 0);
  const std::uint64_t sample_seed = derive_seed(c.seed, 1);
  const QuantumState rho = configured_state(c, state_seed);
  const std::string parent = rho.layout().labels().front();
  std::vector<Factor> children;
  for (std::size_t k = 0; k < c.split.size(); ++k)
    children.push_back({SystemLabel(parent + std::to_string(k + 1)), c.split[k]});
  const Split split(parent, children);
  const auto r = sample_decoupling(rho, split, c.samples, sample_seed, c.eps[0]);
  rep.csv_columns = {"seed", "defect"};
  for (std::size_t k = 0; k < r.defects.size(); ++k) {
    rep.records.push_back({{"seed", r.sample_seeds[k]}, {"defect", r.defects[k]}});
    rep.csv_rows.push_back({std::to_string(r.sample_seeds[k]), num(r.defects[k])});
  }
  rep.aggregate = {{"runs", r.defects.size()}, {"state_seed", state_seed}, {"sample_seed", sample_seed},
                   {"eps", r.eps},          {"kept_dim", r.kept_dim},    {"parent_dim", r.parent_dim},
                   {"dim_bound_bits", r.dim_bound}, {"admissible", r.admissible},
                   {"mean", r.mean},        {"std_error", r.std_error},  {"within_bound", r.within_bound}};
}

struct RedistributionRun {
  json record;
  std::vector<std::string> row;
  double distance = 0.0, r_change = 0.0;
  bool ok_error = false, ok_q = false, ok_e = false;
};

RedistributionRun redistribute_once(const ExperimentConfig& c, int instance, const ErrorBudget& eps) {
  const std::uint64_t state_seed = derive_seed(c.seed, 2 * static_cast<std::uint64_t>(instance));
  const std::uint64_t plan_seed = derive_seed(c.seed, 2 * static_cast<std::uint64_t>(instance) + 1);
  const RedistributionInstance inst(configured_pure(c, state_seed), eps);
  const auto plan = plan_protocol(inst, plan_seed);
  const auto t = execute_protocol(plan, inst);
  const auto b = achievability_bounds(inst.state().to_state(), {}, eps);
  const double slack = 1e-6;
  RedistributionRun out;
  out.distance = t.final_distance;
  out.r_change = t.r_marginal_change;
  out.ok_error = t.final_distance <= t.error_bound;
  out.ok_q = t.q <= b.q_bound + slack;
  out.ok_e = t.e <= b.e_bound + slack;
  out.record = {{"instance", instance},
                {"state_seed", state_seed},
                {"plan_seed", plan_seed},
                {"eps", {eps.eps1, eps.eps2, eps.eps3, eps.eps4}},
                {"tries", plan.tries},
                {"transcript", to_json(t)},
                {"bounds", to_json(b)},
                {"account", to_json(interactive_account(t))},
                {"checks",
                 {{"error_bound", out.ok_error}, {"q_bound", out.ok_q}, {"e_bound", out.ok_e},
                  {"r_unchanged", t.r_marginal_change <= 1e-12}}}};
  out.row = {std::to_string(instance), num(eps.eps3),      num(eps.eps4),   std::to_string(state_seed),
             std::to_string(plan_seed), std::to_string(t.c1), std::to_string(t.c2), std::to_string(t.c3),
             num(t.q),                num(t.e),             num(t.final_distance), num(t.error_bound),
             num(b.q_bound),          num(b.e_bound),       num(t.r_marginal_change)};
  return out;
}

const std::vector<std::string> kRunColumns{"instance", "eps3", "eps4", "state_seed", "plan_seed", "c1", "c2", "c3",
                                           "q", "e", "final_distance", "error_bound", "q_bound", "e_bound",
                                           "r_marginal_change"};

json summarize(const std::vector<RedistributionRun>& runs) {
  std::vector<double> d, r;
  bool all_err = true, all_q = true, all_e = true;
  for (const auto& x : runs) {
    d.push_back(x.distance);
    r.push_back(x.r_change);
    all_err = all_err && x.ok_error;
    all_q = all_q && x.ok_q;
    all_e = all_e && x.ok_e;
  }
  const Stats sd = stats(d);
  return {{"runs", runs.size()},
          {"mean_distance", sd.mean},
          {"max_distance", sd.max},
          {"max_r_marginal_change", stats(r).max},
          {"all_within_error_bound", all_err},
          {"all_within_q_bound", all_q},
          {"all_within_e_bound", all_e}};
}

void run_redistribute(Report& rep) {
  const auto& c = rep.config;
  const ErrorBudget eps{c.eps[0], c.eps[1], c.eps[2], c.eps[3]};
  std::vector<RedistributionRun> runs(c.samples);
  parallel_runs(c.samples, c.threads, [&](int k) { runs[k] = redistribute_once(c, k, eps); });
  rep.csv_columns = kRunColumns;
  for (auto& x : runs) {
    rep.records.push_back(x.record);
    rep.csv_rows.push_back(x.row);
  }
  rep.aggregate = summarize(runs);
}

void run_sweep(Report& rep) {
  const auto& c = rep.config;
  const int n = static_cast<int>(c.eps.size()) * c.samples;
  std::vector<RedistributionRun> runs(n);
  parallel_runs(n, c.threads, [&](int k) {
    const double e = c.eps[k / c.samples];
    runs[k] = redistribute_once(c, k % c.samples, {0.0, 0.0, e, e});
  });
  rep.csv_columns = kRunColumns;
  json per_eps = json::array();
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    const std::vector<RedistributionRun> group(runs.begin() + i * c.samples, runs.begin() + (i + 1) * c.samples);
    json s = summarize(group);
    s["eps"] = c.eps[i];
    per_eps.push_back(s);
  }
  for (auto& x : runs) {
    rep.records.push_back(x.record);
    rep.csv_rows.push_back(x.row);
  }
  rep.aggregate = {{"runs", n}, {"per_eps", per_eps}};
}

void run_converse(Report& rep) {
  const auto& c = rep.config;
  std::vector<json> recs(c.samples);
  std::vector<std::vector<std::string>> rows(c.samples);
  std::vector<double> maxima(c.samples);
  parallel_runs(c.samples, c.threads, [&](int k) {
    const std::uint64_t state_seed = derive_seed(c.seed, 2 * static_cast<std::uint64_t>(k));
    const QuantumState rho = configured_pure(c, state_seed).to_state();
    const auto b = converse_q_bounds(rho, {}, c.eps[0], c.eps[1], c.search);
    const double res = converse_resource_bound(rho, {}, c.eps[0], c.eps[1]);
    maxima[k] = b.max();
    recs[k] = {{"instance", k}, {"state_seed", state_seed}, {"q_bounds", to_json(b)}, {"resource_bound", res}};
    rows[k] = {std::to_string(k), std::to_string(state_seed), num(c.eps[0]), num(c.eps[1]), num(b.imax_b),
               num(b.hmin_b), num(b.hmax_b), num(b.imax_a), num(b.hmin_a), num(b.hmax_a), num(res)};
  });
  rep.csv_columns = {"instance", "state_seed", "eps1", "eps2", "imax_b", "hmin_b", "hmax_b",
                     "imax_a",   "hmin_a",     "hmax_a", "resource"};
  for (int k = 0; k < c.samples; ++k) {
    rep.records.push_back(recs[k]);
    rep.csv_rows.push_back(rows[k]);
  }
  const Stats s = stats(maxima);
  rep.aggregate = {{"runs", c.samples}, {"mean_max_q_bound", s.mean}, {"max_max_q_bound", s.max}};
}

void run_aep(Report& rep) {
  const auto& c = rep.config;
  const std::uint64_t state_seed = derive_seed(c.seed, 0);
  const auto rows = iid_trend(configured_pure(c, state_seed), c.n_max, c.eps[0]);
  const auto header = split_on(trend_csv_header(), ',');
  rep.csv_columns = header;
  bool within = true, ach_shrinks = true, conv_shrinks = true, res_shrinks = true;
  const TrendRow* prev = nullptr;
  for (const auto& r : rows) {
    if (r.n < c.n_min) continue;
    json rec = to_json(r);
    rec["state_seed"] = state_seed;
    rep.records.push_back(rec);
    rep.csv_rows.push_back(split_on(to_csv_row(r), ','));
    within = within && std::abs(r.gap_ach) <= r.envelope && std::abs(r.gap_conv) <= r.envelope &&
             std::abs(r.gap_resource) <= r.envelope;
    if (prev) {
      ach_shrinks = ach_shrinks && std::abs(r.gap_ach) <= std::abs(prev->gap_ach);
      conv_shrinks = conv_shrinks && std::abs(r.gap_conv) <= std::abs(prev->gap_conv);
      res_shrinks = res_shrinks && std::abs(r.gap_resource) <= std::abs(prev->gap_resource);
    }
    prev = &r;
  }
  rep.aggregate = {{"runs", rep.records.size()},
                   {"state_seed", state_seed},
                   {"all_within_envelope", within},
                   {"gap_ach_shrinks", ach_shrinks},
                   {"gap_conv_shrinks", conv_shrinks},
                   {"gap_resource_shrinks", res_shrinks}};
}

}  // namespace

// --- config ----------------------------------------------------------------

std::pair<int, int> parse_range(const std::string& s) {
  auto to_int = [&](const std::string& t) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("n: expected 'a..b' or an integer, got '" + s + "'");
    }
  };
  const auto dots = s.find("..");
  if (dots == std::string::npos) return {1, to_int(s)};
  return {to_int(s.substr(0, dots)), to_int(s.substr(dots + 2))};
}

json to_json(const ExperimentConfig& c) {
  return {{"command", c.command},   {"state", c.state},       {"dims", c.dims},
          {"base", c.base},         {"eps", c.eps},           {"seed", c.seed},
          {"samples", c.samples},   {"n", std::to_string(c.n_min) + ".." + std::to_string(c.n_max)},
          {"quantity", c.quantity}, {"cond", c.cond},         {"split", c.split},
          {"env", c.env},           {"search", c.search},     {"format", c.format}};
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kConfigKeys.count(key)) throw ConfigError("config: unknown field '" + key + "'");
  ExperimentConfig c;
  if (j.contains("command")) c.command = field<std::string>(j, "command");
  if (j.contains("state")) c.state = field<std::string>(j, "state");
  if (j.contains("dims")) c.dims = field<std::vector<Index>>(j, "dims");
  if (j.contains("base")) c.base = field<Index>(j, "base");
  if (j.contains("eps")) c.eps = field<std::vector<double>>(j, "eps");
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("samples")) c.samples = field<int>(j, "samples");
  if (j.contains("n")) {
    const json& n = j.at("n");
    if (n.is_number_integer()) {
      c.n_max = n.get<int>();
    } else if (n.is_string()) {
      std::tie(c.n_min, c.n_max) = parse_range(n.get<std::string>());
    } else {
      throw ConfigError("config field 'n': expected \"a..b\" or an integer");
    }
  }
  if (j.contains("quantity")) c.quantity = field<std::string>(j, "quantity");
  if (j.contains("cond")) c.cond = field<std::string>(j, "cond");
  if (j.contains("split")) c.split = field<std::vector<Index>>(j, "split");
  if (j.contains("env")) c.env = field<Index>(j, "env");
  if (j.contains("search")) c.search = field<bool>(j, "search");
  if (j.contains("format")) c.format = field<std::string>(j, "format");
  return c;
}

ExperimentConfig normalize(ExperimentConfig c) {
  require(kCommands.count(c.command) == 1, "command: unknown subcommand '" + c.command + "'");
  require(c.format == "json" || c.format == "csv", "format: expected json or csv, got '" + c.format + "'");
  require(c.base >= 2, "base: must be at least 2");
  require(c.samples >= 1, "samples: must be at least 1");
  require(c.state == "random" || c.state == "product" || c.state == "bell" || c.state == "ghz" ||
              (is_file_state(c.state) && c.state.size() > 5),
          "state: expected bell, product, ghz, random or file:<path>, got '" + c.state + "'");

  if (is_file_state(c.state)) {
    c.dims.clear();
  } else {
    if (c.dims.empty()) c.dims = default_dims(c.command);
    require(c.dims.size() <= kRegisterNames.size(), "dims: at most four registers (A, B, C, R)");
    Index total = 1;
    for (Index d : c.dims) {
      require(is_power_of(d, c.base),
              "dims: " + std::to_string(d) + " is not a power of base " + std::to_string(c.base));
      total *= d;
      require(total <= kDimensionCap, "dims: total dimension exceeds the cap " + std::to_string(kDimensionCap));
    }
    if (c.state == "bell")
      require(c.dims.size() >= 2 && c.dims[c.dims.size() - 2] == c.dims.back(),
              "dims: bell needs the last two registers of equal dimension");
  }
  const bool four = c.command == "redistribute" || c.command == "converse" || c.command == "aep" ||
                    c.command == "sweep";
  if (four && !c.dims.empty()) require(c.dims.size() == 4, "dims: command '" + c.command + "' needs A,B,C,R");

  if (c.eps.empty()) c.eps = default_eps(c.command);
  auto in = [](double x, double lo, double hi) { return x >= lo && x < hi; };
  if (c.command == "entropy") {
    require(kQuantities.count(c.quantity) == 1, "quantity: expected h, i, hmin, hmax or imax");
    require(c.eps.size() == 1 && in(c.eps[0], 0.0, 1.0), "eps: entropy takes one value in [0, 1)");
    require(c.eps[0] == 0.0 || (c.quantity != "h" && c.quantity != "i"), "eps: von Neumann quantities are unsmoothed");
    parse_cond(c.cond);
  } else if (c.command == "decouple") {
    require(c.eps.size() == 1 && c.eps[0] > 0.0, "eps: decouple takes one value > 0");
    if (c.split.empty() && !c.dims.empty()) {
      require(c.dims[0] >= c.base, "split: first register has dimension one");
      c.split = {c.base, c.dims[0] / c.base};
    }
    require(c.split.size() >= 2, "split: needs at least two child dims");
    require(c.env >= 0, "env: must be non-negative");
  } else if (c.command == "redistribute") {
    require(c.eps.size() == 4, "eps: redistribute takes eps1,eps2,eps3,eps4");
    require(in(c.eps[0], 0.0, 1.0) && in(c.eps[1], 0.0, 1.0), "eps: eps1 and eps2 must lie in [0, 1)");
    require(c.eps[2] > 0.0 && c.eps[2] < 1.0 && c.eps[3] > 0.0 && c.eps[3] < 1.0,
            "eps: eps3 and eps4 must lie in (0, 1)");
  } else if (c.command == "sweep") {
    for (double e : c.eps) require(e > 0.0 && e < 1.0, "eps: sweep values must lie in (0, 1)");
  } else if (c.command == "converse") {
    require(c.eps.size() == 2, "eps: converse takes eps1,eps2");
    require(c.eps[0] > 0.0 && c.eps[1] > 0.0 && c.eps[0] + c.eps[1] < 1.0,
            "eps: need eps1, eps2 > 0 and eps1 + eps2 < 1");
  } else if (c.command == "aep") {
    require(c.eps.size() == 1 && c.eps[0] > 0.0 && c.eps[0] < 0.5, "eps: aep takes one value in (0, 0.5)");
    require(c.n_min >= 1 && c.n_min <= c.n_max, "n: need 1 <= a <= b in 'a..b'");
  }
  return c;
}

QuantumState configured_state(const ExperimentConfig& c, std::uint64_t state_seed) {
  if (is_file_state(c.state)) {
    auto s = load_state_file(c.state.substr(5));
    if (auto* p = std::get_if<PureState>(&s)) return p->to_state();
    return std::get<QuantumState>(s);
  }
  if (c.command == "decouple" && c.state == "random") {
    const SystemLayout layout = layout_of(c.dims);
    return random_mixed_state(state_seed, layout, c.env > 0 ? c.env : layout.total_dim());
  }
  return standard_pure(c, state_seed).to_state();
}

// --- report ----------------------------------------------------------------

Report run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.config = normalize(config);
  const std::string& cmd = rep.config.command;
  if (cmd == "entropy") run_entropy(rep);
  else if (cmd == "decouple") run_decouple(rep);
  else if (cmd == "redistribute") run_redistribute(rep);
  else if (cmd == "sweep") run_sweep(rep);
  else if (cmd == "converse") run_converse(rep);
  else run_aep(rep);
  if (rep.config.timings)
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

json to_json(const Report& r) {
  json j = {{"schema", kReportSchema},
            {"version", kArtifactVersion},
            {"config", to_json(r.config)},
            {"records", r.records},
            {"aggregate", r.aggregate}};
  if (r.wall_seconds) j["timings"] = {{"wall_seconds", *r.wall_seconds}};
  return j;
}

std::string render(const Report& r, const std::string& format) {
  if (format == "json") return to_json(r).dump(2) + "\n";
  if (format != "csv") throw ConfigError("format: expected json or csv, got '" + format + "'");
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + cells[k];
    out += "\n";
  };
  line(r.csv_columns);
  for (const auto& row : r.csv_rows) line(row);
  return out;
}

void emit(const Report& r) {
  const std::string text = render(r, r.config.format);
  if (r.config.out == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(r.config.out, std::ios::binary);
  if (!f) throw ConfigError("out: cannot open '" + r.config.out + "' for writing");
  f << text;
  if (!f.flush()) throw ConfigError("out: write to '" + r.config.out + "' failed");
}

}  // namespace qsr
