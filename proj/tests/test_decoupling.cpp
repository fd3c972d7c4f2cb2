#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qsr/decoupling.hpp"
#include "qsr/entropies.hpp"
#include "qsr/error.hpp"

using namespace qsr;

namespace {

Split two_way(Index a1, Index a2) { return Split("A", {{SystemLabel("A1"), a1}, {SystemLabel("A2"), a2}}); }

Split three_way(Index c1, Index c2, Index c3) {
  return Split("C", {{SystemLabel("C1"), c1}, {SystemLabel("C2"), c2}, {SystemLabel("C3"), c3}});
}

IsometryMap haar_on_a(std::uint64_t seed, const Split& s) {
  return haar_unitary(seed, SystemLayout{{"A", s.dim()}}, s.child_layout());
}

}  // namespace

TEST_CASE("defect vanishes on uniform A and on a trivial kept factor") {
  const auto s = two_way(2, 2);
  const auto rho = tensor_product(maximally_mixed({{"A", 4}}), random_mixed_state(1, {{"R", 3}}, 3));
  for (std::uint64_t k = 0; k < 5; ++k) CHECK(decoupling_defect(rho, haar_on_a(k, s), s, "A1") < 1e-12);
  const auto s1 = two_way(1, 4);
  const auto any = random_mixed_state(2, {{"A", 4}, {"R", 2}}, 3);
  CHECK(decoupling_defect(any, haar_on_a(7, s1), s1, "A1") < 1e-12);
}

TEST_CASE("defect matches an index-sum recomputation") {
  const auto s = two_way(2, 2);
  for (std::uint64_t k = 0; k < 4; ++k) {
    const auto rho = random_mixed_state(10 + k, {{"A", 4}, {"R", 2}}, 2 + k);
    const auto u = haar_on_a(20 + k, s);
    const oracle::Mat full = linalg::kron(u.matrix(), oracle::Mat::Identity(2, 2));
    const oracle::Mat out = full * rho.matrix() * full.adjoint();
    const oracle::Mat kept = oracle::partial_trace(out, {2, 2, 2}, {true, false, true});
    const oracle::Mat rr = oracle::partial_trace(rho.matrix(), {4, 2}, {false, true});
    const oracle::Mat target = linalg::kron(0.5 * oracle::Mat::Identity(2, 2), rr);
    const double want = oracle::trace_norm_hermitian(kept - target);
    CHECK(std::abs(decoupling_defect(rho, u, s, "A1") - want) <= 1e-10);
  }
}

TEST_CASE("defect is invariant under unitaries on the rest and bounded by two") {
  const auto s = two_way(2, 2);
  for (std::uint64_t k = 0; k < 5; ++k) {
    const auto rho = random_mixed_state(30 + k, {{"A", 4}, {"R", 2}}, 2);
    const auto u = haar_on_a(40 + k, s);
    const auto w = haar_unitary(50 + k, SystemLayout{{"R", 2}}, SystemLayout{{"R", 2}});
    const double d = decoupling_defect(rho, u, s, "A1");
    CHECK(std::abs(d - decoupling_defect(apply_isometry(w, rho), u, s, "A1")) < 1e-10);
    CHECK(d <= 2.0);
    CHECK(d >= 0.0);
  }
  const auto wrong = haar_unitary(1, SystemLayout{{"A", 4}}, SystemLayout{{"A1", 4}});
  CHECK_THROWS_AS(decoupling_defect(random_mixed_state(1, {{"A", 4}, {"R", 2}}, 2), wrong, s, "A1"), LayoutError);
}

TEST_CASE("dimension bound") {
  const double eps = 0.25;
  const auto uniform = tensor_product(maximally_mixed({{"A", 4}}), random_mixed_state(3, {{"R", 2}}, 2));
  CHECK(decoupling_dim_bound(uniform, {"A"}, {"R"}, eps) == doctest::Approx(2.0 - 2.0).epsilon(1e-7));
  const auto phi = max_entangled("A", "R", 2).to_state();
  CHECK(decoupling_dim_bound(phi, {"A"}, {"R"}, eps) == doctest::Approx(-2.0).epsilon(1e-7));
  CHECK(decoupling_dim_bound(phi, {"A"}, {"R"}, 1.0) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK_THROWS_AS(decoupling_dim_bound(phi, {"A"}, {"R"}, 0.0), DomainError);
}

TEST_CASE("Monte Carlo mean on an admissible split") {
  const auto rho = random_mixed_state(60, {{"A", 4}, {"R", 2}}, 64);
  const double eps = 0.7;
  const auto rep = sample_decoupling(rho, two_way(2, 2), 200, 99, eps);
  CHECK(rep.admissible);
  CHECK(rep.within_bound);
  CHECK(rep.defects.size() == 200);
  const auto other = sample_decoupling(rho, two_way(2, 2), 200, 100, eps);
  const double combined = std::sqrt(rep.std_error * rep.std_error + other.std_error * other.std_error);
  CHECK(std::abs(rep.mean - other.mean) <= 4.0 * combined);
  const auto again = sample_decoupling(rho, two_way(2, 2), 200, 99, eps);
  CHECK(again.mean == rep.mean);

  const auto uniform = tensor_product(maximally_mixed({{"A", 4}}), random_mixed_state(3, {{"R", 2}}, 2));
  CHECK(sample_decoupling(uniform, two_way(2, 2), 20, 5, 0.1).mean < 1e-12);
}

TEST_CASE("report serialization") {
  const auto rho = random_mixed_state(61, {{"A", 4}, {"R", 2}}, 4);
  const auto rep = sample_decoupling(rho, two_way(2, 2), 7, 3, 0.5);
  const std::string csv = to_csv(rep);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
  CHECK(csv.rfind("seed,defect\n", 0) == 0);
  const auto j = to_json(rep);
  CHECK(j["samples"].size() == 7);
  CHECK(j["samples"][0]["seed"] == derive_seed(3, 0));
}

TEST_CASE("bi-decoupling on uniform C succeeds immediately") {
  const auto s = three_way(2, 2, 2);
  const auto r1 = tensor_product(maximally_mixed({{"C", 8}}), random_mixed_state(1, {{"R1", 2}}, 2));
  const auto r2 = tensor_product(maximally_mixed({{"C", 8}}), random_mixed_state(2, {{"R2", 2}}, 2));
  const auto res = bidecoupling_search(r1, r2, s, 0.4, 0.4, 5, 11);
  CHECK(res.tries == 1);
  CHECK(res.accepted.defect1 < 1e-12);
  CHECK(res.accepted.defect2 < 1e-12);
}

TEST_CASE("bi-decoupling: preconditions, success rate and re-verification") {
  const auto s = three_way(2, 2, 2);
  const auto phi = max_entangled("C", "R1", 8).to_state();
  const auto other = random_mixed_state(3, {{"C", 8}, {"R2", 2}}, 16);
  CHECK_THROWS_AS(bidecoupling_search(phi, other, s, 0.4, 0.4, 5, 1), DomainError);

  const auto r1 = random_mixed_state(70, {{"C", 8}, {"R1", 2}}, 32);
  const auto r2 = random_mixed_state(71, {{"C", 8}, {"R2", 2}}, 32);
  const double e = 0.5;
  REQUIRE(bidecoupling_dim_bound(r1, "C", e) >= 1.0);
  REQUIRE(bidecoupling_dim_bound(r2, "C", e) >= 1.0);
  int ok = 0;
  const int trials = 60;
  for (int k = 0; k < trials; ++k) {
    const auto t = bidecoupling_trial(r1, r2, s, derive_seed(5, k));
    if (t.defect1 <= 3 * e && t.defect2 <= 3 * e) ++ok;
  }
  const double f = static_cast<double>(ok) / trials;
  CHECK(f >= 1.0 / 3.0 - 3.0 * std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / trials));

  const auto res = bidecoupling_search(r1, r2, s, e, e, 50, 17);
  CHECK(decoupling_defect(r1, res.unitary, s, "C1") <= 3 * e);
  CHECK(decoupling_defect(r2, res.unitary, s, "C2") <= 3 * e);
  CHECK(decoupling_defect(r1, res.unitary, s, "C1") == res.accepted.defect1);
}
