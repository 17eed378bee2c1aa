#include "pingpong/experiment_harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "pingpong/errors.hpp"
#include "pingpong/format.hpp"

namespace pingpong {

namespace {

using Json = nlohmann::ordered_json;

std::size_t basis_slot(Basis b) { return b == Basis::B0 ? 0 : 1; }

// Calls fn(begin, end, chunk) for contiguous index ranges, one per worker.
// Chunks are fixed by (count, workers) so callers can combine them in order.
void for_each_chunk(std::uint64_t count, unsigned threads,
                    const std::function<void(std::uint64_t, std::uint64_t, std::size_t)>& fn) {
  const std::uint64_t workers = std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(count, 1));
  if (workers == 1) {
    fn(0, count, 0);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = count * w / workers, end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end, w] {
      try {
        fn(begin, end, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Branch {
  double probability;
  PureState state;
  std::optional<InterceptSideInfo> intercept;
};

// Eve's forward action expanded into weighted branches.
std::vector<Branch> forward_branches(const AttackStrategy& strategy, const PureState& sent) {
  if (std::holds_alternative<NoAttack>(strategy)) return {{1.0, sent, std::nullopt}};
  if (const auto* probe = std::get_if<ProbeUnitary>(&strategy))
    return {{1.0, apply(probe->unitary(), tensor(sent, basis_state(Basis::B0, 0))), std::nullopt}};

  const auto& intercept = std::get<InterceptResend>(strategy);
  std::vector<std::pair<double, Basis>> bases;
  if (intercept.fixed_basis) {
    bases = {{1.0, *intercept.fixed_basis}};
  } else {
    bases = {{0.5, Basis::B0}, {0.5, Basis::B1}};
  }
  std::vector<Branch> out;
  for (const auto& [pb, basis] : bases) {
    const auto p = outcome_probabilities(sent, basis);
    for (int k = 0; k < 2; ++k)
      if (p[k] > 0.0) out.push_back({pb * p[k], basis_state(basis, k), InterceptSideInfo{basis, k}});
  }
  return out;
}

double probability_of_travel_outcome(const PureState& state, Basis basis, int index) {
  if (state.dim() == 2) return outcome_probabilities(state, basis)[index];
  const auto joint = joint_outcome_probabilities(state, basis, Basis::B0);
  return joint[2 * index] + joint[2 * index + 1];
}

void require_grid(std::span<const double> grid) {
  require(!grid.empty(), "curve grid must be non-empty");
  for (double x : grid) require(std::isfinite(x), "curve grid values must be finite");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "curve grid must be strictly increasing");
}

}  // namespace

// ---------------------------------------------------------------------------
// RateEstimate / TrialAggregate

RateEstimate RateEstimate::of(std::uint64_t successes, std::uint64_t total) {
  require(successes <= total, "RateEstimate: successes cannot exceed total");
  RateEstimate r;
  r.successes = successes;
  r.total = total;
  if (total == 0) return r;
  r.value = static_cast<double>(successes) / static_cast<double>(total);
  r.stderr_ = std::sqrt(r.value * (1.0 - r.value) / static_cast<double>(total));
  return r;
}

bool RateEstimate::within_sigmas(double expected, double sigmas) const {
  if (total == 0) return false;
  const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(total));
  return std::abs(value - expected) <= sigmas * sigma;
}

RateEstimate TrialAggregate::detection_rate_given(Basis preparation) const {
  const auto slot = basis_slot(preparation);
  return RateEstimate::of(aborts_by_basis[slot], control_rounds_by_basis[slot]);
}

Bits TrialAggregate::empirical_mutual_info() const {
  if (eve_guesses == 0) return Bits(0.0);
  return empirical_mutual_information(bit_guess_counts);
}

std::vector<std::pair<std::size_t, double>> TrialAggregate::survival_by_n() const {
  std::vector<std::pair<std::size_t, double>> out;
  if (trials == 0) return out;
  for (std::size_t n = 0; n < unaborted_after_bits.size(); ++n)
    out.emplace_back(n, static_cast<double>(unaborted_after_bits[n]) / static_cast<double>(trials));
  return out;
}

void TrialAggregate::add(const Transcript& t) {
  ++trials;
  rounds += t.rounds.size();
  std::size_t delivered = 0;
  for (const auto& r : t.rounds) {
    if (r.mode == Mode::Control) {
      const auto slot = basis_slot(r.preparation.basis);
      ++control_rounds;
      ++control_rounds_by_basis[slot];
      if (r.verdict == Verdict::Abort) {
        ++aborts;
        ++aborts_by_basis[slot];
      }
      continue;
    }
    ++message_rounds;
    ++delivered;
    if (r.alice_decoded != r.bob_bit) ++decode_errors;
    if (r.eve_guess) {
      ++eve_guesses;
      if (*r.eve_guess == *r.bob_bit) ++eve_correct;
      ++bit_guess_counts[*r.bob_bit][*r.eve_guess];
    }
  }
  const std::size_t length = t.message_bits.size();
  if (unaborted_after_bits.size() < length + 1) unaborted_after_bits.resize(length + 1, 0);
  // An aborted session survived exactly the bits it delivered before the abort.
  const std::size_t survived = t.aborted ? delivered : length;
  for (std::size_t n = 0; n <= survived; ++n) ++unaborted_after_bits[n];
}

void TrialAggregate::merge(const TrialAggregate& o) {
  trials += o.trials;
  rounds += o.rounds;
  control_rounds += o.control_rounds;
  aborts += o.aborts;
  for (std::size_t b = 0; b < 2; ++b) {
    control_rounds_by_basis[b] += o.control_rounds_by_basis[b];
    aborts_by_basis[b] += o.aborts_by_basis[b];
    for (std::size_t g = 0; g < 2; ++g) bit_guess_counts[b][g] += o.bit_guess_counts[b][g];
  }
  message_rounds += o.message_rounds;
  decode_errors += o.decode_errors;
  eve_guesses += o.eve_guesses;
  eve_correct += o.eve_correct;
  if (unaborted_after_bits.size() < o.unaborted_after_bits.size())
    unaborted_after_bits.resize(o.unaborted_after_bits.size(), 0);
  for (std::size_t n = 0; n < o.unaborted_after_bits.size(); ++n) unaborted_after_bits[n] += o.unaborted_after_bits[n];
}

TrialAggregate run_trials(const ProtocolConfig& config, const AttackStrategy& strategy, std::uint64_t trials,
                          std::uint64_t base_seed, unsigned threads) {
  require(trials >= 1, "run_trials: trials must be >= 1");
  config.validate();
  const std::uint64_t workers = std::clamp<std::uint64_t>(threads, 1, trials);
  std::vector<TrialAggregate> partial(workers);
  for_each_chunk(trials, threads, [&](std::uint64_t begin, std::uint64_t end, std::size_t chunk) {
    ProtocolConfig local = config;
    for (std::uint64_t k = begin; k < end; ++k) {
      local.seed = trial_seed(base_seed, k);
      partial[chunk].add(run_session(local, strategy));
    }
  });
  TrialAggregate total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

// ---------------------------------------------------------------------------
// Mutual information

Bits empirical_mutual_information(const std::array<std::array<std::uint64_t, 2>, 2>& counts) {
  double n = 0.0;
  for (const auto& row : counts)
    for (auto v : row) n += static_cast<double>(v);
  require(n > 0.0, "empirical_mutual_information: at least one pair required");
  std::array<double, 2> px{}, py{};
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      px[x] += static_cast<double>(counts[x][y]) / n;
      py[y] += static_cast<double>(counts[x][y]) / n;
    }
  double info = 0.0;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      if (counts[x][y] == 0) continue;
      const double pxy = static_cast<double>(counts[x][y]) / n;
      info += pxy * std::log2(pxy / (px[x] * py[y]));
    }
  return Bits(std::clamp(info, 0.0, 1.0));
}

Bits empirical_mutual_information(std::span<const std::pair<Bit, Bit>> pairs) {
  require(!pairs.empty(), "empirical_mutual_information: at least one pair required");
  std::array<std::array<std::uint64_t, 2>, 2> counts{};
  for (const auto& [x, y] : pairs) {
    require((x == 0 || x == 1) && (y == 0 || y == 1), "empirical_mutual_information: values must be bits");
    ++counts[x][y];
  }
  return empirical_mutual_information(counts);
}

// ---------------------------------------------------------------------------
// Exact enumeration

RoundOracle enumerate_round(const AttackStrategy& strategy, double bit_prior_zero) {
  require(std::isfinite(bit_prior_zero) && bit_prior_zero >= 0.0 && bit_prior_zero <= 1.0,
          "enumerate_round: bit prior must lie in [0, 1]");
  RoundOracle oracle;
  const std::array<double, 2> bit_prior{bit_prior_zero, 1.0 - bit_prior_zero};

  for (Basis prep_basis : {Basis::B0, Basis::B1}) {
    const PureState sent = basis_state(prep_basis, 0);
    for (const auto& branch : forward_branches(strategy, sent)) {
      // Control: Bob's outcome 1 aborts.
      const double detect = probability_of_travel_outcome(branch.state, prep_basis, 1);
      oracle.detection_given_basis[basis_slot(prep_basis)] += branch.probability * detect;

      // Message: Bob encodes, Eve measures and resends, Alice decodes.
      for (Bit bit = 0; bit < 2; ++bit) {
        if (bit_prior[bit] == 0.0) continue;
        const double weight = 0.5 * branch.probability * bit_prior[bit];
        const PureState encoded = bob_encode(bit, branch.state);

        std::vector<std::tuple<double, Bit, PureState>> returns;  // (probability, eve guess, state at Alice)
        if (std::holds_alternative<NoAttack>(strategy)) {
          returns.emplace_back(1.0, 0, encoded);
        } else if (const auto* probe = std::get_if<ProbeUnitary>(&strategy)) {
          const auto p = joint_outcome_probabilities(encoded, probe->probe_basis(), Basis::B0);
          for (int t = 0; t < 2; ++t)
            for (int a = 0; a < 2; ++a)
              if (p[2 * t + a] > 0.0) returns.emplace_back(p[2 * t + a], t ^ a, basis_state(probe->probe_basis(), t));
        } else {
          const auto& info = *branch.intercept;
          const auto p = outcome_probabilities(encoded, info.basis);
          for (int k = 0; k < 2; ++k)
            if (p[k] > 0.0) returns.emplace_back(p[k], k ^ info.outcome, basis_state(info.basis, k));
        }

        for (const auto& [p, guess, at_alice] : returns) {
          const double wrong = outcome_probabilities(at_alice, prep_basis)[1 - bit];
          oracle.decode_error += weight * p * wrong;
          if (!std::holds_alternative<NoAttack>(strategy) && guess == bit) oracle.eve_accuracy += weight * p;
        }
      }
    }
  }
  oracle.control_detection = 0.5 * (oracle.detection_given_basis[0] + oracle.detection_given_basis[1]);
  return oracle;
}

// ---------------------------------------------------------------------------
// Curves

const char* to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::InfoBound: return "info_bound";
    case CurveKind::Survival: return "survival";
    case CurveKind::Eigenvalues: return "eigenvalues";
  }
  return "unknown";
}

CurveKind parse_curve_kind(const std::string& name) {
  if (name == "info_bound") return CurveKind::InfoBound;
  if (name == "survival") return CurveKind::Survival;
  if (name == "eigenvalues") return CurveKind::Eigenvalues;
  throw PreconditionError("unknown curve kind '" + name + "' (expected info_bound, survival or eigenvalues)");
}

std::vector<double> linear_grid(double lo, double hi, std::size_t steps) {
  require(steps >= 1, "linear_grid: steps must be >= 1");
  require(std::isfinite(lo) && std::isfinite(hi), "linear_grid: bounds must be finite");
  if (steps == 1) return {lo};
  require(hi > lo, "linear_grid: hi must exceed lo");
  std::vector<double> grid(steps);
  for (std::size_t i = 0; i < steps; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  grid.back() = hi;
  return grid;
}

std::uint64_t round_budget(std::uint64_t n, double c) {
  require(std::isfinite(c) && c > 0.0 && c < 1.0, "round_budget: c must lie in (0, 1)");
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(n) / (1.0 - c)));
}

CurveTable analytic_curve(CurveKind kind, std::span<const double> grid, const CurveParams& params) {
  require_grid(grid);
  CurveTable table{kind, "", {}, {}};
  switch (kind) {
    case CurveKind::InfoBound:
      table.x_label = "d";
      table.columns = {"information"};
      for (double d : grid) table.rows.push_back({d, {eve_information_bound(d).value()}});
      break;
    case CurveKind::Survival:
      table.x_label = "n";
      table.columns = {"survival"};
      for (double n : grid) {
        require(n >= 1.0 && n == std::floor(n), "survival curve grid must hold integers >= 1");
        const SurvivalParams sp{params.c, params.d, static_cast<std::uint64_t>(n)};
        table.rows.push_back({n, {survival_probability(sp)}});
      }
      break;
    case CurveKind::Eigenvalues:
      table.x_label = "d";
      table.columns = {"lambda1", "lambda2"};
      for (double d : grid) {
        const auto [l1, l2] = eve_eigenvalues_closed_form({d, params.p0, 1.0 - params.p0});
        table.rows.push_back({d, {l1, l2}});
      }
      break;
  }
  return table;
}

CurveTable survival_curve(const ProtocolConfig& config, const AttackStrategy& strategy, std::uint64_t trials,
                          std::uint64_t n_max, std::uint64_t base_seed, unsigned threads) {
  require(n_max >= 1, "survival_curve: n_max must be >= 1");
  require(trials >= 1, "survival_curve: trials must be >= 1");
  config.validate();
  const double c = config.control_probability;
  require(config.message_length() >= round_budget(n_max, c),
          "survival_curve: message must be at least round_budget(n_max, c) bits long");

  const double delta = enumerate_round(strategy).control_detection;
  std::vector<std::uint64_t> budgets(n_max + 1);
  for (std::uint64_t n = 0; n <= n_max; ++n) budgets[n] = round_budget(n, c);

  struct Partial {
    TrialAggregate aggregate;
    std::vector<std::uint64_t> unaborted_within_budget;
  };
  const std::uint64_t workers = std::clamp<std::uint64_t>(threads, 1, trials);
  std::vector<Partial> partial(workers, Partial{{}, std::vector<std::uint64_t>(n_max + 1, 0)});
  for_each_chunk(trials, threads, [&](std::uint64_t begin, std::uint64_t end, std::size_t chunk) {
    ProtocolConfig local = config;
    auto& part = partial[chunk];
    for (std::uint64_t k = begin; k < end; ++k) {
      local.seed = trial_seed(base_seed, k);
      const Transcript t = run_session(local, strategy);
      for (std::uint64_t n = 0; n <= n_max; ++n)
        if (!t.aborted || *t.abort_round >= budgets[n]) ++part.unaborted_within_budget[n];
      part.aggregate.add(t);
    }
  });
  TrialAggregate aggregate;
  std::vector<std::uint64_t> within_budget(n_max + 1, 0);
  for (const auto& p : partial) {
    aggregate.merge(p.aggregate);
    for (std::uint64_t n = 0; n <= n_max; ++n) within_budget[n] += p.unaborted_within_budget[n];
  }

  CurveTable table{CurveKind::Survival, "n", {"analytic", "empirical_rounds", "stderr_rounds", "empirical", "stderr", "exact"}, {}};
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const double analytic = std::pow(1.0 - c * delta, static_cast<double>(n) / (1.0 - c));
    const auto by_rounds = RateEstimate::of(within_budget[n], trials);
    const auto by_bits = RateEstimate::of(aggregate.unaborted_after_bits[n], trials);
    const double exact = std::pow((1.0 - c) / (1.0 - c + c * delta), static_cast<double>(n));
    table.rows.push_back({static_cast<double>(n),
                          {analytic, by_rounds.value, by_rounds.stderr_, by_bits.value, by_bits.stderr_, exact}});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Serialization

std::string to_csv(const CurveTable& table) {
  std::ostringstream out;
  out << table.x_label;
  for (const auto& c : table.columns) out << ',' << c;
  out << '\n';
  for (const auto& row : table.rows) {
    out << format_double(row.x);
    for (double v : row.values) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

std::string to_json(const CurveTable& table, int indent) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r;
    r[table.x_label] = row.x;
    for (std::size_t i = 0; i < table.columns.size(); ++i) r[table.columns[i]] = row.values[i];
    rows.push_back(std::move(r));
  }
  Json out{{"kind", to_string(table.kind)}, {"x", table.x_label}, {"columns", table.columns}, {"rows", std::move(rows)}};
  return out.dump(indent);
}

namespace {

Json rate_json(const RateEstimate& r) {
  return {{"value", r.value}, {"stderr", r.stderr_}, {"successes", r.successes}, {"total", r.total}};
}

}  // namespace

std::string to_csv(const TrialAggregate& a) {
  std::ostringstream out;
  out << "metric,value,stderr\n";
  auto count = [&](const char* name, std::uint64_t v) { out << name << ',' << v << ",\n"; };
  auto rate = [&](const char* name, const RateEstimate& r) {
    out << name << ',' << format_double(r.value) << ',' << format_double(r.stderr_) << '\n';
  };
  count("trials", a.trials);
  count("rounds", a.rounds);
  count("control_rounds", a.control_rounds);
  count("aborts", a.aborts);
  count("message_rounds", a.message_rounds);
  count("decode_errors", a.decode_errors);
  count("eve_guesses", a.eve_guesses);
  rate("detection_rate", a.detection_rate());
  rate("detection_rate_b0", a.detection_rate_given(Basis::B0));
  rate("detection_rate_b1", a.detection_rate_given(Basis::B1));
  rate("decode_error_rate", a.decode_error_rate());
  rate("eve_accuracy", a.eve_accuracy());
  out << "empirical_mutual_info," << format_double(a.empirical_mutual_info().value()) << ",\n";
  for (const auto& [n, fraction] : a.survival_by_n()) {
    const auto r = RateEstimate::of(a.unaborted_after_bits[n], a.trials);
    out << "survival_n_" << n << ',' << format_double(fraction) << ',' << format_double(r.stderr_) << '\n';
  }
  return out.str();
}

std::string to_json(const TrialAggregate& a, int indent) {
  Json survival = Json::array();
  for (const auto& [n, fraction] : a.survival_by_n()) survival.push_back({{"n", n}, {"fraction", fraction}});
  Json out{
      {"trials", a.trials},
      {"rounds", a.rounds},
      {"control_rounds", a.control_rounds},
      {"aborts", a.aborts},
      {"message_rounds", a.message_rounds},
      {"decode_errors", a.decode_errors},
      {"eve_guesses", a.eve_guesses},
      {"detection_rate", rate_json(a.detection_rate())},
      {"detection_rate_b0", rate_json(a.detection_rate_given(Basis::B0))},
      {"detection_rate_b1", rate_json(a.detection_rate_given(Basis::B1))},
      {"decode_error_rate", rate_json(a.decode_error_rate())},
      {"eve_accuracy", rate_json(a.eve_accuracy())},
      {"empirical_mutual_info", a.empirical_mutual_info().value()},
      {"bit_guess_counts", a.bit_guess_counts},
      {"survival_by_n", std::move(survival)},
  };
  return out.dump(indent);
}

}  // namespace pingpong
