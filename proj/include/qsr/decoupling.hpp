#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsr/registers.hpp"

namespace qsr {

/// Slack on entropy-based dimension conditions, above the solver accuracy.
inline constexpr double kDimensionSlack = 1e-6;

/// Decomposition of one parent factor into children whose dimensions multiply
/// to the parent dimension, e.g. A -> A1 A2 or C -> C1 C2 C3.
class Split {
 public:
  Split(std::string parent, std::vector<Factor> children);

  const std::string& parent() const { return parent_; }
  const std::vector<Factor>& children() const { return children_; }
  SystemLayout child_layout() const { return SystemLayout(children_); }
  Labels others(const std::string& kept) const;
  Index dim() const;

 private:
  std::string parent_;
  std::vector<Factor> children_;
};

/// || Tr_{other children}[U rho U^dagger] - pi^{kept} (x) rho^{rest} ||_1, where
/// rest is every factor of rho except the parent. U maps {parent} to the children.
double decoupling_defect(const QuantumState& rho, const IsometryMap& u, const Split& split,
                         const std::string& kept);

/// Same defect with the parent already replaced by the children in `out`.
double decoupling_defect_after(const QuantumState& out, const QuantumState& rest, const Split& split,
                               const std::string& kept);

/// Largest admissible log|A1| in bits: (log|A| + H_min(A|R)) / 2 - log(1/eps).
/// Negative values mean no nontrivial split qualifies.
double decoupling_dim_bound(const QuantumState& rho, const Labels& a, const Labels& r, double eps);

struct DecouplingReport {
  std::uint64_t seed = 0;
  double eps = 0.0;
  Index kept_dim = 0;
  Index parent_dim = 0;
  double dim_bound = 0.0;   // bits
  bool admissible = false;  // log|A1| <= dim_bound
  std::vector<std::uint64_t> sample_seeds;
  std::vector<double> defects;
  double mean = 0.0;
  double std_error = 0.0;
  bool within_bound = false;  // mean <= eps + 3 standard errors
};

/// Mean defect over `samples` Haar unitaries on the parent; the first child is kept.
/// Sample k uses derive_seed(seed, k).
DecouplingReport sample_decoupling(const QuantumState& rho, const Split& split, int samples,
                                   std::uint64_t seed, double eps);

nlohmann::json to_json(const DecouplingReport& r);
/// Header "seed,defect" and one row per sample.
std::string to_csv(const DecouplingReport& r);

struct BiDecouplingTrial {
  std::uint64_t seed = 0;
  double defect1 = 0.0;  // first child kept, against rho1
  double defect2 = 0.0;  // second child kept, against rho2
};

/// One Haar sample on C -> C1 C2 C3 scored against both states.
BiDecouplingTrial bidecoupling_trial(const QuantumState& rho1, const QuantumState& rho2, const Split& split,
                                     std::uint64_t seed);

struct BiDecouplingResult {
  IsometryMap unitary;
  BiDecouplingTrial accepted;
  int tries = 0;
};

/// Largest log|C_i| allowed against rho_i: (log|C| + H_min(C|R_i)) / 2 - log(1/eps_i).
double bidecoupling_dim_bound(const QuantumState& rho, const std::string& c, double eps);

/// Searches Haar unitaries until defect1 <= 3 eps3 and defect2 <= 3 eps4.
/// Children of dimension one are always admissible; larger children must meet
/// the dimension condition (DomainError otherwise). Try k uses derive_seed(seed, k).
/// Throws NumericalError with the best defects when max_tries is exhausted.
BiDecouplingResult bidecoupling_search(const QuantumState& rho1, const QuantumState& rho2, const Split& split,
                                       double eps3, double eps4, int max_tries, std::uint64_t seed);

}  // namespace qsr
