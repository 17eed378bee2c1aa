#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "pingpong/errors.hpp"
#include "pingpong/experiment_harness.hpp"
#include "pingpong/format.hpp"
#include "pingpong/info_analysis.hpp"

#ifndef PINGPONG_VERSION
#define PINGPONG_VERSION "0.0.0"
#endif

namespace pingpong::cli {

namespace {

using Json = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  parts.push_back(current);
  return parts;
}

std::optional<Basis> parse_basis(const std::string& token) {
  if (token == "B0") return Basis::B0;
  if (token == "B1") return Basis::B1;
  return std::nullopt;
}

std::optional<double> parse_number(const std::string& token) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || token.empty()) return std::nullopt;
  return value;
}

struct CommonOptions {
  std::string format = "csv";
  std::string output;
  std::uint64_t seed = 42;
  std::string config;
};

struct AnalyzeOptions {
  std::string target;
  double d = 0.0;
  double p0 = 0.5;
};

struct CurveOptions {
  std::string kind;
  std::size_t steps = 11;
  double d_min = 0.0;
  double d_max = 0.5;
  double c = 0.5;
  double d = 0.0;
  std::uint64_t n_max = 10;
  double p0 = 0.5;
};

struct SimulateOptions {
  std::string bits = "random:64";
  double c = 0.5;
  double p0 = 0.5;
  std::string attack = "none";
  std::optional<double> detection;
  std::uint64_t trials = 1000;
  unsigned threads = 1;
  std::size_t max_rounds = 1'000'000;
  std::string transcripts;
};

void add_common(CLI::App* sub, CommonOptions& common) {
  sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--output,-o", common.output, "Write the report to this file instead of standard output");
  sub->add_option("--seed", common.seed, "Base seed");
  sub->add_option("--config", common.config, "JSON file with option values; command-line flags win");
}

// Key/value report shared by the analyze outputs.
class Report {
 public:
  void add(const std::string& key, double value) { entries_.emplace_back(key, Json(value)); }
  void add(const std::string& key, bool value) { entries_.emplace_back(key, Json(value)); }
  void add(const std::string& key, const std::string& value) { entries_.emplace_back(key, Json(value)); }
  void add_matrix(const std::string& key, const ComplexMatrix& m) {
    for (std::size_t r = 0; r < m.dim(); ++r)
      for (std::size_t c = 0; c < m.dim(); ++c) {
        const std::string cell = key + "_" + std::to_string(r) + std::to_string(c);
        add(cell + "_re", m(r, c).real());
        add(cell + "_im", m(r, c).imag());
      }
  }

  std::string render(const std::string& format) const {
    if (format == "json") {
      Json out = Json::object();
      for (const auto& [k, v] : entries_) out[k] = v;
      return out.dump(2) + "\n";
    }
    std::ostringstream csv;
    csv << "quantity,value\n";
    for (const auto& [k, v] : entries_) {
      csv << k << ',';
      if (v.is_number()) {
        csv << format_double(v.get<double>());
      } else if (v.is_boolean()) {
        csv << (v.get<bool>() ? "true" : "false");
      } else {
        csv << v.get<std::string>();
      }
      csv << '\n';
    }
    return csv.str();
  }

 private:
  std::vector<std::pair<std::string, Json>> entries_;
};

std::string run_analyze(const AnalyzeOptions& opt, const CommonOptions& common) {
  Report report;
  if (opt.target == "source") {
    const Ensemble source = alice_source_ensemble();
    const DensityMatrix rho = density_from_ensemble(source);
    const auto eigenvalues = hermitian_eigenvalues(rho);
    const double chi = holevo_chi(source).value();
    const double shannon = binary_entropy(0.5).value();
    report.add("target", std::string("source"));
    report.add_matrix("rho", rho.matrix());
    report.add("eigenvalue_1", eigenvalues[0]);
    report.add("eigenvalue_2", eigenvalues[1]);
    report.add("von_neumann_entropy", von_neumann_entropy(rho).value());
    report.add("holevo_chi", chi);
    report.add("shannon_entropy", shannon);
    report.add("chi_below_shannon", chi < shannon);
  } else {
    const EveModelParams params{opt.d, opt.p0, 1.0 - opt.p0};
    params.validate();
    const DensityMatrix rho = eve_encoded_density(params);
    const auto [l1, l2] = eve_eigenvalues_closed_form(params);
    const auto numeric = hermitian_eigenvalues(rho);
    report.add("target", std::string("eve"));
    report.add("d", params.d);
    report.add("p0", params.p0);
    report.add("p1", params.p1);
    report.add_matrix("rho", rho.matrix());
    report.add("eigenvalue_closed_1", l1);
    report.add("eigenvalue_closed_2", l2);
    report.add("eigenvalue_numeric_1", numeric[0]);
    report.add("eigenvalue_numeric_2", numeric[1]);
    report.add("information_bound", eve_information_bound(params.d).value());
  }
  return report.render(common.format);
}

std::string run_curve(const CurveOptions& opt, const CommonOptions& common) {
  const CurveKind kind = parse_curve_kind(opt.kind);
  std::vector<double> grid;
  if (kind == CurveKind::Survival) {
    require(opt.n_max >= 1, "--n-max must be >= 1");
    for (std::uint64_t n = 1; n <= opt.n_max; ++n) grid.push_back(static_cast<double>(n));
  } else {
    require(opt.steps >= 1, "--steps must be >= 1");
    require(opt.d_min >= 0.0 && opt.d_max <= 1.0, "--d-min/--d-max must lie in [0, 1]");
    grid = linear_grid(opt.d_min, opt.d_max, opt.steps);
  }
  const CurveTable table = analytic_curve(kind, grid, CurveParams{opt.c, opt.d, opt.p0});
  return common.format == "json" ? to_json(table, 2) + "\n" : to_csv(table);
}

struct SimulateOutput {
  std::string report;
  std::string transcripts;
};

SimulateOutput run_simulate(const SimulateOptions& opt, const CommonOptions& common) {
  require(std::isfinite(opt.c) && opt.c > 0.0 && opt.c < 1.0, "--c must lie in (0, 1)");
  require(opt.trials >= 1, "--trials must be >= 1");
  require(opt.threads >= 1, "--threads must be >= 1");
  ProtocolConfig config;
  config.control_probability = opt.c;
  config.message = parse_bits_spec(opt.bits, opt.p0);
  config.seed = common.seed;
  config.max_rounds = opt.max_rounds;
  config.validate();
  const AttackStrategy strategy = parse_attack_spec(opt.attack, opt.detection);

  const TrialAggregate aggregate = run_trials(config, strategy, opt.trials, common.seed, opt.threads);
  const RoundOracle oracle = enumerate_round(strategy, opt.p0);

  SimulateOutput output;
  if (common.format == "json") {
    Json doc{
        {"command", "simulate"},
        {"parameters",
         {{"bits", opt.bits},
          {"c", opt.c},
          {"p0", opt.p0},
          {"attack", describe(strategy)},
          {"trials", opt.trials},
          {"seed", common.seed}}},
        {"oracle",
         {{"detection_rate", oracle.control_detection},
          {"detection_rate_b0", oracle.detection_given_basis[0]},
          {"detection_rate_b1", oracle.detection_given_basis[1]},
          {"decode_error_rate", oracle.decode_error},
          {"eve_accuracy", oracle.eve_accuracy}}},
        {"aggregate", Json::parse(to_json(aggregate))},
    };
    output.report = doc.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << to_csv(aggregate);
    csv << "oracle_detection_rate," << format_double(oracle.control_detection) << ",\n";
    csv << "oracle_detection_rate_b0," << format_double(oracle.detection_given_basis[0]) << ",\n";
    csv << "oracle_detection_rate_b1," << format_double(oracle.detection_given_basis[1]) << ",\n";
    csv << "oracle_decode_error_rate," << format_double(oracle.decode_error) << ",\n";
    csv << "oracle_eve_accuracy," << format_double(oracle.eve_accuracy) << ",\n";
    output.report = csv.str();
  }

  if (!opt.transcripts.empty()) {
    std::vector<Transcript> transcripts;
    transcripts.reserve(opt.trials);
    ProtocolConfig local = config;
    for (std::uint64_t k = 0; k < opt.trials; ++k) {
      local.seed = trial_seed(common.seed, k);
      transcripts.push_back(run_session(local, strategy));
    }
    output.transcripts = transcripts_to_json(transcripts, 2) + "\n";
  }
  return output;
}

// Writes every file to a temporary sibling first and renames only after all
// writes succeeded.
void write_files(const std::vector<std::pair<std::string, std::string>>& files) {
  namespace fs = std::filesystem;
  std::vector<std::pair<fs::path, fs::path>> staged;
  try {
    for (const auto& [path, content] : files) {
      const fs::path target(path);
      fs::path temp = target;
      temp += ".tmp";
      std::ofstream stream(temp, std::ios::binary | std::ios::trunc);
      if (!stream) throw std::runtime_error("cannot open " + temp.string() + " for writing");
      staged.emplace_back(temp, target);
      stream << content;
      stream.close();
      if (!stream) throw std::runtime_error("failed writing " + temp.string());
    }
    for (const auto& [temp, target] : staged) fs::rename(temp, target);
  } catch (...) {
    std::error_code ignored;
    for (const auto& [temp, target] : staged) fs::remove(temp, ignored);
    throw;
  }
}

// Expands --config into flags placed before the user's own arguments; with
// the TakeLast policy the user's flags then win on conflict.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;

  std::ifstream stream(path);
  if (!stream) throw PreconditionError("--config: cannot read " + path);
  Json config;
  try {
    config = Json::parse(stream);
  } catch (const Json::parse_error& e) {
    throw PreconditionError("--config: invalid JSON in " + path + ": " + e.what());
  }
  require(config.is_object(), "--config: top level must be a JSON object");

  std::vector<std::string> injected;
  for (const auto& [key, value] : config.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      text = value.dump();
    } else if (value.is_number()) {
      text = format_double(value.get<double>());
    } else {
      throw PreconditionError("--config: value of '" + key + "' must be a string or number");
    }
    injected.push_back(flag);
    injected.push_back(text);
  }
  // args[0] is the subcommand.
  std::vector<std::string> out{args.front()};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace

AttackStrategy parse_attack_spec(const std::string& spec, std::optional<double> detection) {
  const auto parts = split(spec, ':');
  const std::string& name = parts.front();
  if (name != "probe") require(!detection, "--detection applies only to probe attacks");

  if (name == "none") {
    require(parts.size() == 1, "attack 'none' takes no parameters");
    return NoAttack{};
  }
  if (name == "intercept") {
    require(parts.size() <= 2, "attack spec must be intercept[:random|B0|B1]");
    if (parts.size() == 1 || parts[1] == "random") return InterceptResend::random();
    const auto basis = parse_basis(parts[1]);
    require(basis.has_value(), "intercept policy must be random, B0 or B1, got '" + parts[1] + "'");
    return InterceptResend::fixed(*basis);
  }
  if (name == "probe") {
    require(parts.size() <= 3, "attack spec must be probe[:THETA][:B0|B1]");
    std::optional<double> theta;
    Basis basis = Basis::B1;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (const auto b = parse_basis(parts[i]); b && i == parts.size() - 1) {
        basis = *b;
      } else if (const auto t = parse_number(parts[i]); t && i == 1) {
        theta = t;
      } else {
        throw PreconditionError("malformed probe parameter '" + parts[i] + "' (expected probe[:THETA][:B0|B1])");
      }
    }
    if (detection) {
      require(!theta, "give either a probe THETA or --detection, not both");
      require(std::isfinite(*detection) && *detection >= 0.0 && *detection <= 1.0,
              "--detection must lie in [0, 1]");
      return ProbeUnitary::from_detection(*detection, basis);
    }
    require(theta.has_value(), "probe attack needs THETA (radians) or --detection");
    return ProbeUnitary(*theta, basis);
  }
  throw PreconditionError("unknown attack '" + name + "' (expected none, probe or intercept)");
}

MessageSource parse_bits_spec(const std::string& spec, double p0) {
  if (spec.rfind("random:", 0) == 0) {
    const std::string count_text = spec.substr(7);
    std::size_t count = 0;
    const auto* end = count_text.data() + count_text.size();
    auto [ptr, ec] = std::from_chars(count_text.data(), end, count);
    require(ec == std::errc{} && ptr == end && count >= 1, "--bits random:N needs a positive integer N");
    require(std::isfinite(p0) && p0 >= 0.0 && p0 <= 1.0, "--p0 must lie in [0, 1]");
    return RandomBits{count, p0};
  }
  require(!spec.empty(), "--bits must not be empty");
  FixedBits fixed;
  for (char ch : spec) {
    require(ch == '0' || ch == '1', "--bits must be a 0/1 string or random:N");
    fixed.bits.push_back(ch - '0');
  }
  return fixed;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed-state ping-pong protocol simulator and analysis toolkit", "pingpong"};
  app.set_version_flag("--version", std::string("pingpong ") + PINGPONG_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  CommonOptions common;
  AnalyzeOptions analyze;
  CurveOptions curve;
  SimulateOptions simulate;

  auto* analyze_cmd = app.add_subcommand("analyze", "Closed-form quantities for Alice's source or Eve's view");
  analyze_cmd->add_option("target", analyze.target, "source | eve")->required()->check(CLI::IsMember({"source", "eve"}));
  analyze_cmd->add_option("--d", analyze.d, "Detection probability d (eve)");
  analyze_cmd->add_option("--p0", analyze.p0, "Bob's prior for bit 0 (eve); p1 = 1 - p0");
  add_common(analyze_cmd, common);

  auto* curve_cmd = app.add_subcommand("curve", "Tabulate a closed-form curve");
  curve_cmd->add_option("--kind", curve.kind, "info_bound | survival | eigenvalues")->required();
  curve_cmd->add_option("--steps", curve.steps, "Grid points over [d-min, d-max]");
  curve_cmd->add_option("--d-min", curve.d_min, "Grid start (info_bound, eigenvalues)");
  curve_cmd->add_option("--d-max", curve.d_max, "Grid end (info_bound, eigenvalues)");
  curve_cmd->add_option("--c", curve.c, "Control-mode probability (survival)");
  curve_cmd->add_option("--d", curve.d, "Detection probability (survival)");
  curve_cmd->add_option("--n-max", curve.n_max, "Largest n (survival)");
  curve_cmd->add_option("--p0", curve.p0, "Bob's prior for bit 0 (eigenvalues)");
  add_common(curve_cmd, common);

  auto* simulate_cmd = app.add_subcommand("simulate", "Run seeded protocol sessions and aggregate statistics");
  simulate_cmd->add_option("--bits", simulate.bits, "0/1 string or random:N");
  simulate_cmd->add_option("--c", simulate.c, "Control-mode probability");
  simulate_cmd->add_option("--p0", simulate.p0, "P(bit = 0) for random bits");
  simulate_cmd->add_option("--attack", simulate.attack, "none | probe[:THETA][:B0|B1] | intercept[:random|B0|B1]");
  simulate_cmd->add_option("--detection", simulate.detection, "Probe detection probability; theta = asin(sqrt(D))");
  simulate_cmd->add_option("--trials", simulate.trials, "Number of sessions");
  simulate_cmd->add_option("--threads", simulate.threads, "Worker threads (results are identical for any count)");
  simulate_cmd->add_option("--max-rounds", simulate.max_rounds, "Per-session round limit");
  simulate_cmd->add_option("--transcripts", simulate.transcripts, "Also write every session transcript (JSON)");
  add_common(simulate_cmd, common);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
    app.parse(args);

    std::string report;
    std::string transcripts;
    if (*analyze_cmd) {
      report = run_analyze(analyze, common);
    } else if (*curve_cmd) {
      report = run_curve(curve, common);
    } else {
      auto result = run_simulate(simulate, common);
      report = std::move(result.report);
      transcripts = std::move(result.transcripts);
    }

    std::vector<std::pair<std::string, std::string>> files;
    if (!transcripts.empty()) files.emplace_back(simulate.transcripts, transcripts);
    if (!common.output.empty()) files.emplace_back(common.output, report);
    write_files(files);
    if (common.output.empty()) out << report;
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace pingpong::cli
