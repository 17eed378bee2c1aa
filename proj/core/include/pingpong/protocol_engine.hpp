#pragma once

// Alice, Bob and an optional Eve running the mixed-state ping-pong protocol
// over a simulated quantum channel and an in-process classical channel.
//
// Per round, in this order (one RandomSource per session; the draw order is
// part of the reproducibility contract):
//   1. Alice picks B0 or B1 with probability 1/2 and prepares index 0 of it.
//   2. Eve's forward attack, if any (intercept-resend: policy basis draw when
//      random, then one measurement draw).
//   3. Bob chooses control mode with probability c.
//   4c. Control: ControlAnnounce, BasisReveal, Bob measures (one draw),
//       OutcomeReveal, Verdict. Outcome index 1 aborts the session.
//   4m. Message: Bob applies I or i sigma_y, Eve measures and resends (one
//       draw), Alice measures in her preparation basis (one draw).
//   5. The session ends after the last message bit or at the first abort.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pingpong/quantum_core.hpp"
#include "pingpong/random.hpp"

namespace pingpong {

enum class Mode { Message, Control };
enum class Verdict { Pass, Abort };

const char* to_string(Mode mode);
const char* to_string(Verdict verdict);

struct PreparationRecord {
  Basis basis;
  int index = 0;  ///< always 0: Alice only sends |0> or |phi0>
  std::uint64_t round_id = 0;

  friend bool operator==(const PreparationRecord&, const PreparationRecord&) = default;
};

// Classical public-channel messages. Direction is implied by the type.
struct ControlAnnounce {  ///< Bob -> Alice
  friend bool operator==(const ControlAnnounce&, const ControlAnnounce&) = default;
};
struct BasisReveal {  ///< Alice -> Bob
  Basis basis;
  friend bool operator==(const BasisReveal&, const BasisReveal&) = default;
};
struct OutcomeReveal {  ///< Bob -> Alice
  int index;
  friend bool operator==(const OutcomeReveal&, const OutcomeReveal&) = default;
};
struct VerdictMessage {  ///< Alice -> Bob
  Verdict verdict;
  friend bool operator==(const VerdictMessage&, const VerdictMessage&) = default;
};
struct SessionEnd {  ///< Bob -> Alice, after the last message bit
  friend bool operator==(const SessionEnd&, const SessionEnd&) = default;
};

using ClassicalMessage = std::variant<ControlAnnounce, BasisReveal, OutcomeReveal, VerdictMessage, SessionEnd>;

// ---------------------------------------------------------------------------
// Attack strategies

struct NoAttack {};

/// Ancilla attack: Eve entangles a fresh ancilla |0> with the travel qubit on
/// the forward leg, then jointly measures travel (probe basis) and ancilla
/// (computational basis) on the return leg.
class ProbeUnitary {
 public:
  /// Requires theta in [0, pi/2].
  ProbeUnitary(double theta, Basis probe_basis);
  /// theta = arcsin(sqrt(d)); requires d in [0, 1].
  static ProbeUnitary from_detection(double d, Basis probe_basis);

  double theta() const { return theta_; }
  Basis probe_basis() const { return probe_basis_; }
  /// sin^2(theta): control failure rate for preparations in the probe basis.
  double detection_probability() const;
  const Operator& unitary() const { return unitary_; }

 private:
  double theta_;
  Basis probe_basis_;
  Operator unitary_;
};

/// Baseline attack: measure the travel qubit on the way to Bob and resend the
/// collapsed state; measure again in the same basis on the way back.
struct InterceptResend {
  std::optional<Basis> fixed_basis;  ///< nullopt: uniformly random basis per round

  static InterceptResend random() { return {std::nullopt}; }
  static InterceptResend fixed(Basis basis) { return {basis}; }
};

using AttackStrategy = std::variant<NoAttack, ProbeUnitary, InterceptResend>;

std::string describe(const AttackStrategy& strategy);

struct ProbeSideInfo {};
struct InterceptSideInfo {
  Basis basis;
  int outcome;
};
using EveSideInfo = std::variant<ProbeSideInfo, InterceptSideInfo>;

struct ForwardResult {
  PureState passed_on;  ///< dimension 4 for the probe, 2 for intercept-resend
  EveSideInfo side_info;
};

struct BackwardResult {
  Bit guess;
  PureState resent;  ///< dimension 2
};

// ---------------------------------------------------------------------------
// Session data

/// Bob's message: either an explicit bit string or `count` bits drawn from
/// the session RandomSource at session start with P(0) = p0.
struct FixedBits {
  std::vector<Bit> bits;
};
struct RandomBits {
  std::size_t count = 0;
  double p0 = 0.5;
};
using MessageSource = std::variant<FixedBits, RandomBits>;

struct ProtocolConfig {
  double control_probability = 0.5;  ///< c, in (0, 1)
  MessageSource message = FixedBits{};
  std::uint64_t seed = 42;
  std::size_t max_rounds = 1'000'000;

  /// Requires 0 < c < 1, a non-empty message of 0/1 bits, p0 in [0, 1] and
  /// max_rounds >= 1.
  void validate() const;
  std::size_t message_length() const;
};

struct RoundRecord {
  std::uint64_t round_id = 0;
  PreparationRecord preparation;
  Mode mode = Mode::Message;
  std::optional<Bit> bob_bit;
  std::optional<Bit> alice_decoded;
  std::optional<int> control_outcome;
  std::optional<Verdict> verdict;
  std::optional<Bit> eve_guess;
  std::optional<int> eve_forward_outcome;
  std::vector<ClassicalMessage> classical_log;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct Transcript {
  std::vector<RoundRecord> rounds;
  bool aborted = false;
  std::optional<std::uint64_t> abort_round;
  std::vector<Bit> message_bits;  ///< what Bob set out to send
  std::vector<Bit> decoded_bits;  ///< what Alice decoded, in order
  std::vector<ClassicalMessage> session_log;  ///< SessionEnd on completion

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

// ---------------------------------------------------------------------------
// Protocol steps

struct Preparation {
  PreparationRecord record;
  PureState state;
};

/// Step 1. Basis B0 or B1 with probability 1/2; state is its index-0 vector.
Preparation alice_prepare(RandomSource& rng, std::uint64_t round_id = 0);

/// Step 3. Control with probability c; requires 0 < c < 1.
Mode bob_choose_mode(RandomSource& rng, double control_probability);

/// Step 4m. I or i sigma_y on the travel qubit (i sigma_y ⊗ I on joint states).
PureState bob_encode(Bit bit, const PureState& qubit);

struct ControlRoundResult {
  int outcome;
  Verdict verdict;
  std::vector<ClassicalMessage> log;
};

/// Step 4c. Bob measures the travel qubit in the revealed basis; for a joint
/// state the ancilla is summed out by the Born rule. Pass iff outcome is 0.
ControlRoundResult run_control_round(const PreparationRecord& prep, const PureState& qubit_at_bob,
                                     RandomSource& rng);

/// Alice measures the returned dimension-2 qubit in her preparation basis;
/// the outcome index is the decoded bit.
Bit alice_decode(const PureState& qubit, const PreparationRecord& prep, RandomSource& rng);

/// Eve's forward-leg action. Requires a strategy other than NoAttack.
ForwardResult eve_forward(const AttackStrategy& strategy, const PureState& qubit, RandomSource& rng);

/// Eve's return-leg measurement and resend. Probe: guess = travel XOR ancilla
/// outcome; intercept-resend: guess = backward XOR forward outcome.
BackwardResult eve_backward(const AttackStrategy& strategy, const PureState& returning,
                            const EveSideInfo& side_info, RandomSource& rng);

/// Steps 1-5 until the message is delivered or a control round aborts.
/// Throws RoundLimitExceeded if max_rounds pass first.
Transcript run_session(const ProtocolConfig& config, const AttackStrategy& strategy);

// ---------------------------------------------------------------------------
// Serialization (schema in docs/formats.md)

std::string to_json(const Transcript& transcript, int indent = -1);
std::string transcripts_to_json(const std::vector<Transcript>& transcripts, int indent = -1);

}  // namespace pingpong
