#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsr/registers.hpp"
#include "qsr/sdp.hpp"

namespace qsr {

/// Roles of a bipartite quantity: `a` is the measured side (A in H(A|B),
/// the first argument of I(A:B)), `b` the conditioning or second side.
/// Labels outside both roles are traced out first.
struct Partition {
  Labels a;
  Labels b;
};

/// All values are in bits.
struct EntropyResult {
  std::string quantity;
  double value = 0.0;
  bool infinite = false;   // value is +inf (support violation)
  double epsilon = 0.0;
  double gap = 0.0;        // duality gap of the certifying program, 0 for closed forms
  int solves = 0;          // number of programs solved
  std::optional<QuantumState> witness;        // smoothing optimizer
  std::optional<QuantumState> optimal_sigma;  // normalized optimizer of the inner infimum
};

nlohmann::json to_json(const EntropyResult& r);

/// log lambda_max(sigma^{-1/2} rho sigma^{-1/2}) on supp(sigma); +inf when
/// supp(rho) is not contained in supp(sigma).
EntropyResult dmax(const QuantumState& rho, const QuantumState& sigma);

/// -log min{Tr X : I_A (x) X >= rho_AB}.
EntropyResult hmin_cond(const QuantumState& rho, const Partition& part);
/// -H_min(A|ref) on a purification of rho_AB.
EntropyResult hmax_cond(const QuantumState& rho, const Partition& part);
/// log min{Tr X : rho_A (x) X >= rho_AB}.
EntropyResult imax(const QuantumState& rho, const Partition& part);

/// Smoothed over sub-normalized rho~ with F(rho~, rho) >= sqrt(1 - eps^2).
/// Requires Tr rho = 1 when eps > 0; eps = 0 returns the unsmoothed value.
EntropyResult smooth_hmin(const QuantumState& rho, const Partition& part, double eps);
/// -smooth_hmin(A|ref) on a purification; the witness lives on A (x) ref.
EntropyResult smooth_hmax(const QuantumState& rho, const Partition& part, double eps);
/// Fixed-marginal convention: min over rho~ of log min{Tr X : rho_A (x) X >= rho~}
/// with the unsmoothed rho_A.
EntropyResult smooth_imax(const QuantumState& rho, const Partition& part, double eps);

/// Smooth max-information with the marginal of rho~ moving with rho~: the
/// marginal tau = Tr_B rho~ is scanned over a Bloch grid around rho_A (which
/// must be a qubit), each point solved exactly, then refined by pattern search.
/// The result is an upper estimate of the jointly smoothed quantity.
EntropyResult smooth_imax_marginal_search(const QuantumState& rho, const Partition& part, double eps,
                                          int grid = 5);

// --- symmetry-reduced programs for tensor powers --------------------------

/// Schmidt coefficients of psi^{(x) n} given those of psi.
RealVector schmidt_power(const RealVector& p, int n);

/// Spectrum given as distinct values with their multiplicities.
struct SpectrumTypes {
  RealVector value;
  RealVector mult;
  static SpectrumTypes plain(const RealVector& p);
};

/// Type classes of p^{(x) n}: one entry per composition of n, weighted by its
/// multinomial count. The reduced programs cost polynomially in n this way.
SpectrumTypes schmidt_types(const RealVector& p, int n);

/// H_min^eps(C|R) of a pure state with Schmidt coefficients p.
EntropyResult smooth_hmin_pure(const RealVector& p, double eps);
EntropyResult smooth_hmin_pure(const SpectrumTypes& p, double eps);
/// H_min^eps of a diagonal state with spectrum p (no conditioning system).
EntropyResult smooth_hmin_diagonal(const RealVector& p, double eps);
EntropyResult smooth_hmin_diagonal(const SpectrumTypes& p, double eps);
/// Fixed-marginal I_max^eps(R:C) of a pure state with Schmidt coefficients p.
EntropyResult smooth_imax_pure(const RealVector& p, double eps);
EntropyResult smooth_imax_pure(const SpectrumTypes& p, double eps);

// --- von Neumann quantities -----------------------------------------------

double entropy(const QuantumState& rho);
double entropy_of(const QuantumState& rho, const Labels& labels);
double cond_entropy(const QuantumState& rho, const Labels& a, const Labels& b);
double mutual_info(const QuantumState& rho, const Labels& a, const Labels& b);
/// I(A:B|C) = H(AC) + H(BC) - H(C) - H(ABC)
double cond_mutual_info(const QuantumState& rho, const Labels& a, const Labels& b, const Labels& c);

struct VonNeumannSuite {
  double h = 0.0;            // H(A)
  double h_cond = 0.0;       // H(A|B)
  double mutual = 0.0;       // I(A:B)
  double cond_mutual = 0.0;  // I(A:B|C)
};

VonNeumannSuite von_neumann_suite(const QuantumState& rho, const Labels& a, const Labels& b,
                                  const Labels& c);

// --- equipartition ----------------------------------------------------------

/// 4 log v sqrt(log(2 / eps^2))
double aep_delta(double eps, double v);
/// log 1 / (1 - (eps sqrt(1 - eps'^2) + eps' sqrt(1 - eps^2))^2)
double aep_h(double eps, double eps_prime);

struct AepBounds {
  double h_cond = 0.0;  // H(A|B)
  double v = 0.0;
  double lower = 0.0;   // H(A|B) - delta(eps, v) / sqrt(n)
  double upper = 0.0;   // H(A|B) + delta(eps', v) / sqrt(n) + h(eps, eps') / n
  double delta_lower = 0.0;
  double delta_upper = 0.0;
  double h = 0.0;
};

/// Per-copy window for H_min^eps(A^n|B^n) / n. v uses the unsmoothed max-entropies
/// of A|B and A|R on a purification of rho_AB.
AepBounds aep_bounds(const QuantumState& rho, const Partition& part, int n, double eps, double eps_prime);
/// Same window given H(A|B) and v directly.
AepBounds aep_bounds(double h_cond, double v, int n, double eps, double eps_prime);

}  // namespace qsr
