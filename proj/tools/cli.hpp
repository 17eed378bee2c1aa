#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pingpong/protocol_engine.hpp"

namespace pingpong::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (program name excluded). Reports go to `out`
/// or to --output; diagnostics go to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// none | probe[:THETA][:B0|B1] | intercept[:random|B0|B1]
/// The probe basis defaults to B1. With `detection`, THETA must be omitted and
/// theta = arcsin(sqrt(detection)).
AttackStrategy parse_attack_spec(const std::string& spec, std::optional<double> detection = std::nullopt);

/// A string of '0'/'1' characters, or random:N (N bits with P(0) = p0).
MessageSource parse_bits_spec(const std::string& spec, double p0 = 0.5);

}  // namespace pingpong::cli
