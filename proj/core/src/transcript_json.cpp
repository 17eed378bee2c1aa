#include <nlohmann/json.hpp>

#include "pingpong/protocol_engine.hpp"

namespace pingpong {

namespace {

using Json = nlohmann::ordered_json;

template <class T>
Json optional_json(const std::optional<T>& value) {
  return value ? Json(*value) : Json(nullptr);
}

std::string bit_string(const std::vector<Bit>& bits) {
  std::string out;
  out.reserve(bits.size());
  for (Bit b : bits) out.push_back(b ? '1' : '0');
  return out;
}

Json message_json(const ClassicalMessage& message) {
  struct Visitor {
    Json operator()(const ControlAnnounce&) const { return {{"type", "ControlAnnounce"}, {"from", "bob"}}; }
    Json operator()(const BasisReveal& m) const {
      return {{"type", "BasisReveal"}, {"from", "alice"}, {"basis", to_string(m.basis)}};
    }
    Json operator()(const OutcomeReveal& m) const {
      return {{"type", "OutcomeReveal"}, {"from", "bob"}, {"index", m.index}};
    }
    Json operator()(const VerdictMessage& m) const {
      return {{"type", "Verdict"}, {"from", "alice"}, {"verdict", to_string(m.verdict)}};
    }
    Json operator()(const SessionEnd&) const { return {{"type", "SessionEnd"}, {"from", "bob"}}; }
  };
  return std::visit(Visitor{}, message);
}

Json log_json(const std::vector<ClassicalMessage>& log) {
  Json out = Json::array();
  for (const auto& m : log) out.push_back(message_json(m));
  return out;
}

Json transcript_json(const Transcript& t) {
  Json rounds = Json::array();
  for (const auto& r : t.rounds) {
    Json verdict = r.verdict ? Json(to_string(*r.verdict)) : Json(nullptr);
    rounds.push_back({
        {"round_id", r.round_id},
        {"preparation", {{"basis", to_string(r.preparation.basis)}, {"index", r.preparation.index}}},
        {"mode", to_string(r.mode)},
        {"bob_bit", optional_json(r.bob_bit)},
        {"alice_decoded", optional_json(r.alice_decoded)},
        {"control_outcome", optional_json(r.control_outcome)},
        {"verdict", verdict},
        {"eve_guess", optional_json(r.eve_guess)},
        {"eve_forward_outcome", optional_json(r.eve_forward_outcome)},
        {"classical_log", log_json(r.classical_log)},
    });
  }
  return {
      {"aborted", t.aborted},
      {"abort_round", optional_json(t.abort_round)},
      {"message_bits", bit_string(t.message_bits)},
      {"decoded_bits", bit_string(t.decoded_bits)},
      {"rounds", std::move(rounds)},
      {"session_log", log_json(t.session_log)},
  };
}

}  // namespace

std::string to_json(const Transcript& transcript, int indent) { return transcript_json(transcript).dump(indent); }

std::string transcripts_to_json(const std::vector<Transcript>& transcripts, int indent) {
  Json out = Json::array();
  for (const auto& t : transcripts) out.push_back(transcript_json(t));
  return out.dump(indent);
}

}  // namespace pingpong
