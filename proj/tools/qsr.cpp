// Command-line front end. Flags build a config; a --config file overrides any
// field it sets. Exit codes: 0 success, 2 bad configuration, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qsr/cli.hpp"
#include "qsr/error.hpp"

namespace {

using nlohmann::json;

constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;

json csv_list(const std::string& s, bool integral) {
  json out = json::array();
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      if (integral) {
        out.push_back(std::stoll(item, &used));
      } else {
        out.push_back(std::stod(item, &used));
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw qsr::ConfigError("expected a comma-separated number list, got '" + s + "'");
    }
  }
  return out;
}

json read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw qsr::ConfigError("config: cannot open '" + path + "'");
  try {
    json j = json::parse(f);
    // a full report can be fed back in; only its echoed config matters
    if (j.contains("schema") && j.contains("config")) return j.at("config");
    return j;
  } catch (const json::exception& e) {
    throw qsr::ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-shot quantum state redistribution toolkit"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::map<std::string, std::string> given;
  std::string config_path, out = "-";
  bool timings = false;
  int threads = 0;
  for (const char* name : {"state", "dims", "base", "eps", "seed", "samples", "n", "quantity", "cond", "split", "env",
                           "format"})
    app.add_option_function<std::string>(std::string("--") + name, [&given, name](const std::string& v) {
      given[name] = v;
    });
  app.add_flag_function("--search", [&given](std::int64_t) { given["search"] = "true"; },
                        "converse: also run the marginal-search max-information");
  app.add_option("--config", config_path, "JSON config file (or a previous report); wins over flags");
  app.add_option("--out", out, "output path, - for stdout");
  app.add_flag("--timings", timings, "add wall-clock timings to the report");
  app.add_option("--threads", threads, "worker threads, 0 = all cores");

  const char* commands[][2] = {{"entropy", "one entropic quantity of a state"},
                               {"decouple", "Monte Carlo decoupling defects"},
                               {"redistribute", "plan and execute the redistribution protocol"},
                               {"converse", "lower bounds on the communication cost"},
                               {"aep", "per-copy bounds on tensor powers against von Neumann targets"},
                               {"sweep", "redistribution over a grid of decoupling errors"}};
  for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    json j = json::object();
    for (auto* sub : app.get_subcommands()) j["command"] = sub->get_name();
    for (const auto& [key, value] : given) {
      if (key == "dims" || key == "split") j[key] = csv_list(value, true);
      else if (key == "eps") j[key] = csv_list(value, false);
      else if (key == "base" || key == "seed" || key == "samples" || key == "env") j[key] = csv_list(value, true).at(0);
      else if (key == "search") j[key] = true;
      else j[key] = value;
    }
    if (!config_path.empty()) j.update(read_config(config_path));
    if (!j.contains("command")) throw qsr::ConfigError("command: give a subcommand or a config with 'command'");

    qsr::ExperimentConfig cfg = qsr::config_from_json(j);
    cfg.out = out;
    cfg.timings = timings;
    cfg.threads = threads;
    qsr::emit(qsr::run(cfg));
    return 0;
  } catch (const qsr::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalExit;
  } catch (const qsr::Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigExit;
  }
}
