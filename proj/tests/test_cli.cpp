#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "qsr/cli.hpp"
#include "qsr/error.hpp"
#include "qsr/serialize.hpp"

using namespace qsr;
using nlohmann::json;

namespace {

ExperimentConfig config(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  c.threads = 1;
  return c;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("min-entropy of a Bell pair is minus one bit") {
  auto c = config("entropy");
  c.state = "bell";
  c.quantity = "hmin";
  c.cond = "A|B";
  const json j = json::parse(render(run(c), "json"));
  CHECK(j["records"][0]["value_bits"].get<double>() == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(j["schema"] == kReportSchema);

  c.quantity = "h";
  CHECK(run(c).records[0]["value_bits"].get<double>() == doctest::Approx(-1.0).epsilon(1e-12));
  c.quantity = "i";
  CHECK(run(c).records[0]["value_bits"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("redistribution reports are byte-identical across runs and thread counts") {
  auto c = config("redistribute");
  c.dims = {2, 2, 2, 2};
  c.eps = {0.0, 0.0, 0.01, 0.01};
  c.seed = 7;
  const std::string first = render(run(c), "json");
  CHECK(render(run(c), "json") == first);

  c.samples = 4;
  const std::string serial = render(run(c), "json");
  c.threads = 4;
  CHECK(render(run(c), "json") == serial);
}

TEST_CASE("a report regenerates from its embedded config") {
  for (const std::string cmd : {"entropy", "decouple", "redistribute", "converse", "aep", "sweep"}) {
    auto c = config(cmd);
    c.seed = 11;
    c.samples = cmd == "decouple" ? 20 : 2;
    c.n_max = 2;
    const Report rep = run(c);
    const std::string text = render(rep, "json");
    const json echoed = json::parse(text)["config"];
    CHECK(render(run(config_from_json(echoed)), "json") == text);
    // the echo is a valid input config in its own right
    CHECK(to_json(normalize(config_from_json(echoed))) == echoed);
  }
}

TEST_CASE("JSON output round-trips and re-emits identically") {
  auto c = config("converse");
  c.samples = 2;
  const Report rep = run(c);
  const std::string text = render(rep, "json");
  CHECK(json::parse(text) == to_json(rep));
  CHECK(json::parse(text).dump(2) + "\n" == text);
  CHECK(render(rep, "json") == text);
}

TEST_CASE("CSV has a header row and one row per run") {
  auto c = config("redistribute");
  c.samples = 3;
  const std::string csv = render(run(c), "csv");
  CHECK(lines(csv) == 4);
  CHECK(csv.rfind("instance,eps3,eps4,", 0) == 0);

  auto d = config("decouple");
  d.samples = 7;
  CHECK(lines(render(run(d), "csv")) == 8);

  auto s = config("sweep");
  s.eps = {0.01, 0.05, 0.1};
  s.samples = 2;
  const Report sweep = run(s);
  CHECK(lines(render(sweep, "csv")) == 7);
  CHECK(sweep.aggregate["per_eps"].size() == 3);
}

TEST_CASE("AEP table of a product state carries only the smoothing constants") {
  auto c = config("aep");
  c.state = "product";
  c.n_min = 1;
  c.n_max = 4;
  const double eps = 0.1;
  c.eps = {eps};
  const Report rep = run(c);
  REQUIRE(rep.records.size() == 4);
  const double l1 = std::log2(1 - eps * eps), l2 = std::log2(1 - 4 * eps * eps);
  for (const auto& r : rep.records) {
    const double n = r["n"].get<double>();
    CHECK(r["target_q"].get<double>() == doctest::Approx(0.0));
    CHECK(r["target_hcb"].get<double>() == doctest::Approx(0.0));
    CHECK(r["gap_ach"].get<double>() == doctest::Approx(l1 / n).epsilon(1e-6));
    CHECK(r["gap_conv"].get<double>() == doctest::Approx(0.5 * (l1 - l2) / n).epsilon(1e-6));
    CHECK(r["gap_resource"].get<double>() == doctest::Approx((l1 - l2) / n).epsilon(1e-6));
  }
  CHECK(rep.aggregate["all_within_envelope"] == true);
  CHECK(rep.aggregate["gap_ach_shrinks"] == true);

  c.n_min = 3;
  CHECK(run(c).records.size() == 2);
}

TEST_CASE("states load from files") {
  const std::string path = "test_cli_state.json";
  {
    std::ofstream f(path);
    f << pure_to_json(max_entangled("A", "B", 2)).dump();
  }
  auto c = config("entropy");
  c.state = "file:" + path;
  c.quantity = "hmax";
  CHECK(run(c).records[0]["value_bits"].get<double>() == doctest::Approx(-1.0).epsilon(1e-6));
  c.command = "redistribute";
  CHECK_THROWS_AS(run(c), Error);
  std::remove(path.c_str());
}

TEST_CASE("configuration errors name the field") {
  auto expect = [](const ExperimentConfig& c, const std::string& field) {
    try {
      normalize(c);
      FAIL("accepted an invalid config");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).rfind(field, 0) == 0);
    }
  };
  auto c = config("entropy");
  c.dims = {3, 2};
  expect(c, "dims");
  c = config("redistribute");
  c.dims = {16, 16, 16, 2};
  expect(c, "dims");
  c = config("redistribute");
  c.dims = {2, 2};
  expect(c, "dims");
  c = config("redistribute");
  c.eps = {0.0, 0.0, 0.0, 0.1};
  expect(c, "eps");
  c = config("aep");
  c.n_min = 3;
  c.n_max = 2;
  expect(c, "n");
  c = config("nope");
  expect(c, "command");
  c = config("entropy");
  c.quantity = "x";
  expect(c, "quantity");
  c = config("entropy");
  c.state = "noise";
  expect(c, "state");

  CHECK_THROWS_AS(config_from_json({{"command", "aep"}, {"colour", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"dims", "2,2"}}), ConfigError);
  CHECK(parse_range("2..5") == std::pair{2, 5});
  CHECK(parse_range("3") == std::pair{1, 3});
  CHECK_THROWS_AS(parse_range("1..x"), ConfigError);
}

TEST_CASE("emit surfaces unwritable paths") {
  auto c = config("entropy");
  c.state = "bell";
  c.out = "/nonexistent-dir/report.json";
  CHECK_THROWS_AS(emit(run(c)), ConfigError);
}
