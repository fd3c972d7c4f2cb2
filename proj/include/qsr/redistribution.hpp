#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsr/decoupling.hpp"
#include "qsr/registers.hpp"

namespace qsr {

/// Which labels play the roles A, B, C, R. A tensor power groups the copies.
struct RegisterGroups {
  Labels a{"A"};
  Labels b{"B"};
  Labels c{"C"};
  Labels r{"R"};
};

struct ErrorBudget {
  double eps1 = 0.0;  // smoothing of H_min(C|BR)
  double eps2 = 0.0;  // smoothing of H_max(C|B)
  double eps3 = 0.01; // decoupling towards Alice
  double eps4 = 0.01; // decoupling towards Bob
};

/// Pure normalized state on exactly the factors A, B, C, R (any order).
class RedistributionInstance {
 public:
  RedistributionInstance(PureState state, ErrorBudget eps);
  const PureState& state() const { return state_; }
  const ErrorBudget& eps() const { return eps_; }

 private:
  PureState state_;
  ErrorBudget eps_;
};

/// V from the complement of `shared` in pure1 to the complement in pure2, both
/// in layout order, maximizing |<pure2|(I (x) V)|pure1>|. The map is a full
/// isometry whenever the target complement is at least as large.
IsometryMap uhlmann_isometry(const PureState& pure1, const PureState& pure2, const Labels& shared);

struct RedistributionPlan {
  Index c1 = 1, c2 = 1, c3 = 1;
  double hmin_cbr = 0.0;  // H_min(C|BR) of omega1
  double hmin_car = 0.0;  // H_min(C|AR) of omega2, equal to -H_max(C|B) at the same radius
  double raw_log_c1 = 0.0;  // before flooring and clamping
  double raw_log_c2 = 0.0;
  QuantumState omega1;    // on C, B, R
  QuantumState omega2;    // on C, A, R
  IsometryMap u;          // C -> C1 C2 C3
  BiDecouplingTrial decoupling;
  int tries = 0;
  IsometryMap v1;         // C2 C3 A -> A1 A' C'
  IsometryMap v2;         // C1 C3 B -> B2 B''' C'''
  IsometryMap v1_hat;     // C2'' C3'' A'' -> TA A' C'
  IsometryMap v2_hat;     // TB C3'' B -> B2 B''' C'''
  Matrix m_projector;     // v1_hat v1_hat^dagger on TA A' C'
  Vector m_fallback;      // v1_hat applied to the first basis vector
  std::uint64_t seed = 0;
};

/// Picks smoothing witnesses, register sizes by the floor formulas (clamped so
/// that every factor has dimension at least one), a bi-decoupling unitary and
/// both Uhlmann isometries. |C| must be a power of two.
RedistributionPlan plan_protocol(const RedistributionInstance& inst, std::uint64_t seed, int max_tries = 1000);

/// M: projection onto the image of P plus replacement of the rest by `fallback`.
QuantumState apply_correction(const Matrix& projector, const Vector& fallback, const SystemLayout& regs,
                              const QuantumState& s);

struct ProtocolTranscript {
  std::vector<QuantumState> steps;  // after each of the four protocol steps
  Index c1 = 1, c2 = 1, c3 = 1;
  double q = 0.0;                   // qubits Alice -> Bob
  double charlie_to_alice = 0.0;
  double ebits_consumed = 0.0;
  double ebits_generated = 0.0;
  double e = 0.0;                   // consumed - generated
  double final_distance = 0.0;      // to rho (x) phi1 (x) phi2
  double error_bound = 0.0;         // 8 e1 + 2 e2 + 4 sqrt(3 e3) + sqrt(3 e4)
  double r_marginal_change = 0.0;   // max entry change of rho_R
};

ProtocolTranscript execute_protocol(const RedistributionPlan& plan, const RedistributionInstance& inst);

struct AchievabilityBounds {
  double hmax_cb = 0.0;    // H_max^{eps2}(C|B)
  double hmin_cbr = 0.0;   // H_min^{eps1}(C|BR)
  double q_bound = 0.0;
  double e_bound = 0.0;
  // the same bounds with the two smoothing radii exchanged
  double hmax_cb_swapped = 0.0;
  double hmin_cbr_swapped = 0.0;
  double q_bound_swapped = 0.0;
  double e_bound_swapped = 0.0;
  double error_bound = 0.0;
};

AchievabilityBounds achievability_bounds(const QuantumState& rho, const RegisterGroups& g, const ErrorBudget& eps);

struct ConverseBounds {
  double imax_b = 0.0;  // (I^{e1+e2}(R:BC) - I^{e2}(R:B)) / 2
  double hmin_b = 0.0;  // (H_min^{e2}(R|B) - H_min^{e1+e2}(R|BC)) / 2
  double hmax_b = 0.0;  // (H_max^{e1+e2}(R|B) - H_max^{e2}(R|BC)) / 2
  double imax_a = 0.0;
  double hmin_a = 0.0;
  double hmax_a = 0.0;
  /// Same max-information bounds with the marginal-search convention, when requested.
  std::optional<double> imax_b_search;
  std::optional<double> imax_a_search;
  double max() const;
};

/// Six lower bounds on q for a protocol with error eps1. eps1 in (0,1), eps2 in (0, 1 - eps1).
ConverseBounds converse_q_bounds(const QuantumState& rho, const RegisterGroups& g, double eps1, double eps2,
                                 bool marginal_search = false);
/// H_min^{e2}(BC) - H_min^{e1+e2}(B), a lower bound on e + q.
double converse_resource_bound(const QuantumState& rho, const RegisterGroups& g, double eps1, double eps2);

enum class Direction { a_to_b, b_to_a };

struct Message {
  Direction direction;
  Index dim;
};

struct InteractiveTranscript {
  std::vector<Message> messages;
  double qcc_ab = 0.0;
  double qcc_ba = 0.0;
  double ebits_consumed = 0.0;
  double ebits_generated = 0.0;
  double net_ebits() const { return ebits_consumed - ebits_generated; }
};

InteractiveTranscript interactive_account(const std::vector<Message>& messages, double ebits_consumed,
                                          double ebits_generated);
/// The single message C3'' from Alice to Bob.
InteractiveTranscript interactive_account(const ProtocolTranscript& t);

struct TrendRow {
  int n = 0;
  std::string path;            // "reduced" or "full"
  double ach_entropic = 0.0;   // (H_max^e(C|B) - H_min^e(C|BR)) / 2n
  double ach_q = 0.0;          // full achievability q bound / n
  double ach_e = 0.0;          // achievability e bound / n
  double conv_q = 0.0;         // largest converse q bound / n
  double conv_hmin = 0.0;      // min-entropy converse bound / n
  double resource = 0.0;       // resource bound / n
  double target_q = 0.0;       // I(C:R|B) / 2
  double target_hcb = 0.0;     // H(C|B)
  double gap_ach = 0.0;        // ach_entropic - target_q
  double gap_conv = 0.0;       // target_q - conv_hmin
  double gap_resource = 0.0;   // target_hcb - resource
  double envelope = 0.0;       // delta(e, v) / sqrt(n) + h(2e, e) / n
};

/// Per-copy bounds on psi^{(x) n} for n = 1..n_max with every radius set to eps.
/// Trivial A and B use the exact symmetry-reduced programs on the type classes
/// of the Schmidt coefficients; otherwise the full programs run on the tensor
/// power. Throws DomainError when |ABCR|^n_max exceeds `cap`.
std::vector<TrendRow> iid_trend(const PureState& psi, int n_max, double eps, Index cap = 4096);

/// psi^{(x) n} with labels X suffixed by #k, and the matching groups.
std::pair<PureState, RegisterGroups> tensor_power(const PureState& psi, int n);

nlohmann::json to_json(const RedistributionPlan& p);
nlohmann::json to_json(const ProtocolTranscript& t);
nlohmann::json to_json(const AchievabilityBounds& b);
nlohmann::json to_json(const ConverseBounds& b);
nlohmann::json to_json(const InteractiveTranscript& t);
nlohmann::json to_json(const TrendRow& r);
std::string trend_csv_header();
std::string to_csv_row(const TrendRow& r);

}  // namespace qsr
