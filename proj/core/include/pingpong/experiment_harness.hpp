#pragma once

// Monte Carlo runner over many seeded sessions, exact per-round outcome
// enumeration for each attack strategy, and tabulation of the closed forms
// from info_analysis. CSV/JSON layouts are documented in docs/formats.md.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pingpong/info_analysis.hpp"
#include "pingpong/protocol_engine.hpp"

namespace pingpong {

/// successes / total with normal-approximation standard error sqrt(p(1-p)/N).
/// An empty denominator gives value 0 and stderr 0; successes > total throws.
struct RateEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t total = 0;

  static RateEstimate of(std::uint64_t successes, std::uint64_t total);
  /// |value - expected| <= sigmas * standard error of `expected` at this N.
  bool within_sigmas(double expected, double sigmas) const;
};

/// Counts summed over trials. Every rate is derived from integer counts, so
/// the aggregate does not depend on the order trials are combined in.
struct TrialAggregate {
  std::uint64_t trials = 0;
  std::uint64_t rounds = 0;
  std::uint64_t control_rounds = 0;
  std::uint64_t aborts = 0;
  std::array<std::uint64_t, 2> control_rounds_by_basis{};  ///< indexed by preparation basis
  std::array<std::uint64_t, 2> aborts_by_basis{};
  std::uint64_t message_rounds = 0;
  std::uint64_t decode_errors = 0;
  std::uint64_t eve_guesses = 0;
  std::uint64_t eve_correct = 0;
  /// bit_guess_counts[bob_bit][eve_guess]
  std::array<std::array<std::uint64_t, 2>, 2> bit_guess_counts{};
  /// unaborted_after_bits[n]: sessions with no abort before their n-th
  /// delivered message bit, n = 0..message length.
  std::vector<std::uint64_t> unaborted_after_bits;

  RateEstimate detection_rate() const { return RateEstimate::of(aborts, control_rounds); }
  RateEstimate detection_rate_given(Basis preparation) const;
  RateEstimate decode_error_rate() const { return RateEstimate::of(decode_errors, message_rounds); }
  RateEstimate eve_accuracy() const { return RateEstimate::of(eve_correct, eve_guesses); }
  /// Plug-in estimate over (bob_bit, eve_guess); 0 when Eve made no guesses.
  Bits empirical_mutual_info() const;
  /// (n, fraction of sessions undetected after n delivered bits).
  std::vector<std::pair<std::size_t, double>> survival_by_n() const;

  void add(const Transcript& transcript);
  void merge(const TrialAggregate& other);

  friend bool operator==(const TrialAggregate&, const TrialAggregate&) = default;
};

/// Seed of trial k in run_trials and survival_curve.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t k) { return base_seed ^ k; }

/// Runs `trials` sessions, trial k with seed trial_seed(base_seed, k) and the
/// remaining config unchanged. With threads > 1 the trials are split across
/// worker threads; the result is identical to the sequential run.
TrialAggregate run_trials(const ProtocolConfig& config, const AttackStrategy& strategy, std::uint64_t trials,
                          std::uint64_t base_seed, unsigned threads = 1);

/// Plug-in mutual information sum p(x,y) log2 p(x,y)/(p(x)p(y)) over the
/// empirical 2x2 joint distribution of (bob_bit, eve_guess). Throws
/// PreconditionError on empty input.
Bits empirical_mutual_information(std::span<const std::pair<Bit, Bit>> pairs);
Bits empirical_mutual_information(const std::array<std::array<std::uint64_t, 2>, 2>& counts);

/// Exact per-round probabilities for a strategy, from a full expansion of the
/// preparation / attack / measurement outcome tree (no sampling).
struct RoundOracle {
  double control_detection = 0.0;               ///< P(abort | control round)
  std::array<double, 2> detection_given_basis{};  ///< P(abort | control, preparation basis)
  double decode_error = 0.0;                    ///< P(Alice's bit != Bob's | message round)
  double eve_accuracy = 0.0;                    ///< P(Eve's guess == Bob's | message round); 0 without Eve
};

/// bit_prior_zero is Bob's P(bit = 0) in message rounds.
RoundOracle enumerate_round(const AttackStrategy& strategy, double bit_prior_zero = 0.5);

enum class CurveKind { InfoBound, Survival, Eigenvalues };

const char* to_string(CurveKind kind);
/// "info_bound" | "survival" | "eigenvalues"; throws PreconditionError otherwise.
CurveKind parse_curve_kind(const std::string& name);

struct CurveRow {
  double x;
  std::vector<double> values;  ///< one per CurveTable::columns entry
};

struct CurveTable {
  CurveKind kind;
  std::string x_label;
  std::vector<std::string> columns;
  std::vector<CurveRow> rows;
};

struct CurveParams {
  double c = 0.5;   ///< survival
  double d = 0.0;   ///< survival
  double p0 = 0.5;  ///< eigenvalues (p1 = 1 - p0)
};

/// Closed forms only:
///   info_bound:  x = d, columns {information}
///   survival:    x = n, columns {survival}, grid entries must be integers >= 1
///   eigenvalues: x = d, columns {lambda1, lambda2}
/// The grid must be non-empty and strictly increasing.
CurveTable analytic_curve(CurveKind kind, std::span<const double> grid, const CurveParams& params);

/// lo, lo + h, ..., hi with `steps` points (steps >= 2), or {lo} for steps = 1.
std::vector<double> linear_grid(double lo, double hi, std::size_t steps);

/// Rounds that n message bits occupy at effective rate 1 - c: round(n / (1 - c)).
std::uint64_t round_budget(std::uint64_t n, double c);

/// Empirical survival for n = 1..n_max against the closed form with d set to
/// the strategy's enumerated per-control-round detection probability delta.
/// Columns:
///   analytic            (1 - c delta)^(n / (1 - c))
///   empirical_rounds    fraction with no abort in the first round_budget(n, c)
///                       rounds (the round count n bits occupy at rate 1 - c)
///   stderr_rounds       its standard error
///   empirical           fraction with no abort before the n-th delivered bit
///   stderr              its standard error
///   exact               ((1 - c) / (1 - c + c delta))^n, the exact law of
///                       `empirical`
/// Requires n_max >= 1, trials >= 1 and a message at least
/// round_budget(n_max, c) bits long so no session ends before the budget.
CurveTable survival_curve(const ProtocolConfig& config, const AttackStrategy& strategy, std::uint64_t trials,
                          std::uint64_t n_max, std::uint64_t base_seed, unsigned threads = 1);

std::string to_csv(const CurveTable& table);
std::string to_json(const CurveTable& table, int indent = -1);
std::string to_csv(const TrialAggregate& aggregate);
std::string to_json(const TrialAggregate& aggregate, int indent = -1);

}  // namespace pingpong
