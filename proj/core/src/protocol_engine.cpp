#include "pingpong/protocol_engine.hpp"

#include <cmath>
#include <numbers>

#include "pingpong/errors.hpp"
#include "pingpong/format.hpp"

namespace pingpong {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const PureState& ancilla_ready() {
  static const PureState zero({1.0, 0.0});
  return zero;
}

std::vector<Bit> draw_message(const ProtocolConfig& config, RandomSource& rng) {
  return std::visit(Overloaded{
                        [](const FixedBits& fixed) { return fixed.bits; },
                        [&](const RandomBits& random) {
                          std::vector<Bit> bits(random.count);
                          for (auto& b : bits) b = rng.bernoulli(random.p0) ? 0 : 1;
                          return bits;
                        },
                    },
                    config.message);
}

}  // namespace

const char* to_string(Mode mode) { return mode == Mode::Message ? "message" : "control"; }
const char* to_string(Verdict verdict) { return verdict == Verdict::Pass ? "pass" : "abort"; }

// ---------------------------------------------------------------------------
// Strategies

ProbeUnitary::ProbeUnitary(double theta, Basis probe_basis)
    : theta_(theta), probe_basis_(probe_basis), unitary_(build_probe_unitary(theta, probe_basis)) {}

ProbeUnitary ProbeUnitary::from_detection(double d, Basis probe_basis) {
  require(std::isfinite(d) && d >= 0.0 && d <= 1.0, "ProbeUnitary: detection probability must lie in [0, 1]");
  return ProbeUnitary(std::min(std::asin(std::sqrt(d)), std::numbers::pi / 2), probe_basis);
}

double ProbeUnitary::detection_probability() const {
  const double s = std::sin(theta_);
  return s * s;
}

std::string describe(const AttackStrategy& strategy) {
  return std::visit(Overloaded{
                        [](const NoAttack&) { return std::string("none"); },
                        [](const ProbeUnitary& p) {
                          return "probe:" + format_double(p.theta()) + ":" + to_string(p.probe_basis());
                        },
                        [](const InterceptResend& i) {
                          return std::string("intercept:") + (i.fixed_basis ? to_string(*i.fixed_basis) : "random");
                        },
                    },
                    strategy);
}

// ---------------------------------------------------------------------------
// Config

void ProtocolConfig::validate() const {
  require(std::isfinite(control_probability) && control_probability > 0.0 && control_probability < 1.0,
          "ProtocolConfig: control probability c must lie in (0, 1)");
  require(max_rounds >= 1, "ProtocolConfig: max_rounds must be >= 1");
  std::visit(Overloaded{
                 [](const FixedBits& fixed) {
                   require(!fixed.bits.empty(), "ProtocolConfig: message must contain at least one bit");
                   for (Bit b : fixed.bits) require(b == 0 || b == 1, "ProtocolConfig: message bits must be 0 or 1");
                 },
                 [](const RandomBits& random) {
                   require(random.count >= 1, "ProtocolConfig: random message length must be >= 1");
                   require(std::isfinite(random.p0) && random.p0 >= 0.0 && random.p0 <= 1.0,
                           "ProtocolConfig: encoding prior p0 must lie in [0, 1]");
                 },
             },
             message);
}

std::size_t ProtocolConfig::message_length() const {
  return std::visit(Overloaded{
                        [](const FixedBits& fixed) { return fixed.bits.size(); },
                        [](const RandomBits& random) { return random.count; },
                    },
                    message);
}

// ---------------------------------------------------------------------------
// Protocol steps

Preparation alice_prepare(RandomSource& rng, std::uint64_t round_id) {
  const Basis basis = rng.bernoulli(0.5) ? Basis::B0 : Basis::B1;
  return {PreparationRecord{basis, 0, round_id}, basis_state(basis, 0)};
}

Mode bob_choose_mode(RandomSource& rng, double control_probability) {
  require(std::isfinite(control_probability) && control_probability > 0.0 && control_probability < 1.0,
          "bob_choose_mode: c must lie in (0, 1)");
  return rng.bernoulli(control_probability) ? Mode::Control : Mode::Message;
}

PureState bob_encode(Bit bit, const PureState& qubit) {
  const Operator op = encode_operator(bit);
  if (qubit.dim() == 2) return apply(op, qubit);
  return apply(kron(op, Operator::identity(2)), qubit);
}

ControlRoundResult run_control_round(const PreparationRecord& prep, const PureState& qubit_at_bob,
                                     RandomSource& rng) {
  ControlRoundResult result{0, Verdict::Pass, {}};
  result.log.emplace_back(ControlAnnounce{});
  result.log.emplace_back(BasisReveal{prep.basis});
  if (qubit_at_bob.dim() == 2) {
    result.outcome = measure_in_basis(qubit_at_bob, prep.basis, rng).index;
  } else {
    result.outcome = measure_joint(qubit_at_bob, prep.basis, Basis::B0, rng).travel_index;
  }
  result.log.emplace_back(OutcomeReveal{result.outcome});
  result.verdict = result.outcome == prep.index ? Verdict::Pass : Verdict::Abort;
  result.log.emplace_back(VerdictMessage{result.verdict});
  return result;
}

Bit alice_decode(const PureState& qubit, const PreparationRecord& prep, RandomSource& rng) {
  require(qubit.dim() == 2, "alice_decode: returned qubit must have dimension 2");
  return measure_in_basis(qubit, prep.basis, rng).index;
}

ForwardResult eve_forward(const AttackStrategy& strategy, const PureState& qubit, RandomSource& rng) {
  require(qubit.dim() == 2, "eve_forward: travel qubit must have dimension 2");
  return std::visit(
      Overloaded{
          [](const NoAttack&) -> ForwardResult {
            throw PreconditionError("eve_forward: not defined for NoAttack");
          },
          [&](const ProbeUnitary& probe) -> ForwardResult {
            return {apply(probe.unitary(), tensor(qubit, ancilla_ready())), ProbeSideInfo{}};
          },
          [&](const InterceptResend& intercept) -> ForwardResult {
            const Basis basis = intercept.fixed_basis ? *intercept.fixed_basis
                                                      : (rng.bernoulli(0.5) ? Basis::B0 : Basis::B1);
            auto m = measure_in_basis(qubit, basis, rng);
            return {std::move(m.post_state), InterceptSideInfo{basis, m.index}};
          },
      },
      strategy);
}

BackwardResult eve_backward(const AttackStrategy& strategy, const PureState& returning,
                            const EveSideInfo& side_info, RandomSource& rng) {
  return std::visit(
      Overloaded{
          [](const NoAttack&) -> BackwardResult {
            throw PreconditionError("eve_backward: not defined for NoAttack");
          },
          [&](const ProbeUnitary& probe) -> BackwardResult {
            require(std::holds_alternative<ProbeSideInfo>(side_info), "eve_backward: side info is not from a probe");
            require(returning.dim() == 4, "eve_backward: probe expects the joint travel-ancilla state");
            const auto m = measure_joint(returning, probe.probe_basis(), Basis::B0, rng);
            return {m.travel_index ^ m.ancilla_index, basis_state(probe.probe_basis(), m.travel_index)};
          },
          [&](const InterceptResend&) -> BackwardResult {
            const auto* forward = std::get_if<InterceptSideInfo>(&side_info);
            require(forward != nullptr, "eve_backward: side info is not from intercept-resend");
            require(returning.dim() == 2, "eve_backward: intercept-resend expects a single travel qubit");
            auto m = measure_in_basis(returning, forward->basis, rng);
            return {m.index ^ forward->outcome, std::move(m.post_state)};
          },
      },
      strategy);
}

Transcript run_session(const ProtocolConfig& config, const AttackStrategy& strategy) {
  config.validate();
  RandomSource rng(config.seed);
  const bool eve_present = !std::holds_alternative<NoAttack>(strategy);

  Transcript transcript;
  transcript.message_bits = draw_message(config, rng);
  const auto& bits = transcript.message_bits;

  std::size_t next_bit = 0;
  for (std::uint64_t round = 0; next_bit < bits.size(); ++round) {
    if (round >= config.max_rounds) {
      throw RoundLimitExceeded("run_session: max_rounds (" + std::to_string(config.max_rounds) +
                               ") reached with " + std::to_string(bits.size() - next_bit) +
                               " message bits undelivered");
    }
    RoundRecord record;
    record.round_id = round;

    auto [prep, state] = alice_prepare(rng, round);
    record.preparation = prep;

    std::optional<EveSideInfo> side_info;
    if (eve_present) {
      auto forward = eve_forward(strategy, state, rng);
      if (const auto* info = std::get_if<InterceptSideInfo>(&forward.side_info))
        record.eve_forward_outcome = info->outcome;
      side_info = forward.side_info;
      state = std::move(forward.passed_on);
    }

    record.mode = bob_choose_mode(rng, config.control_probability);
    if (record.mode == Mode::Control) {
      auto control = run_control_round(prep, state, rng);
      record.control_outcome = control.outcome;
      record.verdict = control.verdict;
      record.classical_log = std::move(control.log);
      transcript.rounds.push_back(std::move(record));
      if (control.verdict == Verdict::Abort) {
        transcript.aborted = true;
        transcript.abort_round = round;
        return transcript;
      }
      continue;
    }

    const Bit bit = bits[next_bit++];
    record.bob_bit = bit;
    PureState returning = bob_encode(bit, state);
    if (eve_present) {
      auto backward = eve_backward(strategy, returning, *side_info, rng);
      record.eve_guess = backward.guess;
      returning = std::move(backward.resent);
    }
    const Bit decoded = alice_decode(returning, prep, rng);
    record.alice_decoded = decoded;
    transcript.decoded_bits.push_back(decoded);
    transcript.rounds.push_back(std::move(record));
  }
  transcript.session_log.emplace_back(SessionEnd{});
  return transcript;
}

}  // namespace pingpong
