#include "cli.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "pingpong/errors.hpp"

using namespace pingpong;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Parses "key,value[,extra]" lines after the header into a map of first two fields.
std::map<std::string, std::string> key_values(const std::string& csv) {
  std::map<std::string, std::string> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const auto second = line.find(',', comma + 1);
    out[line.substr(0, comma)] = line.substr(comma + 1, second == std::string::npos ? std::string::npos : second - comma - 1);
  }
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("pingpong_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                                 ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

// ---------- analyze ----------
TEST(CliAnalyze, Source) {
  const auto r = invoke({"analyze", "source"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = key_values(r.out);
  EXPECT_NEAR(std::stod(kv.at("eigenvalue_1")), 0.853553, 1e-6);
  EXPECT_NEAR(std::stod(kv.at("eigenvalue_2")), 0.146447, 1e-6);
  EXPECT_NEAR(std::stod(kv.at("holevo_chi")), 0.6008760366928562, 1e-6);
  EXPECT_EQ(kv.at("shannon_entropy"), "1");
  EXPECT_EQ(kv.at("chi_below_shannon"), "true");
}

TEST(CliAnalyze, EveEndpoints) {
  auto r = invoke({"analyze", "eve", "--d", "0", "--p0", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(key_values(r.out).at("information_bound"), "0");
  r = invoke({"analyze", "eve", "--d", "0.5", "--p0", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = key_values(r.out);
  EXPECT_EQ(kv.at("information_bound"), "1");
  EXPECT_EQ(kv.at("eigenvalue_closed_1"), kv.at("eigenvalue_numeric_1"));
}

TEST(CliAnalyze, JsonFormat) {
  const auto r = invoke({"analyze", "source", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("holevo_chi").get<double>(), 0.6008760366928562, 1e-12);
}

TEST(CliAnalyze, RejectsOutOfRangeParameters) {
  for (const auto& args : std::vector<std::vector<std::string>>{{"analyze", "eve", "--d", "1.5"},
                                                                {"analyze", "eve", "--d", "0.2", "--p0", "-0.1"},
                                                                {"analyze", "nothing"}}) {
    const auto r = invoke(args);
    EXPECT_EQ(r.code, cli::kExitUsage) << args.back();
    EXPECT_FALSE(r.err.empty());
    EXPECT_TRUE(r.out.empty());
  }
}

// ---------- curve ----------
TEST(CliCurve, InfoBound) {
  const auto r = invoke({"curve", "--kind", "info_bound", "--steps", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 12u);
  EXPECT_EQ(l[0], "d,information");
  EXPECT_EQ(l[1], "0,0");
  EXPECT_EQ(l[11], "0.5,1");
}

TEST(CliCurve, Survival) {
  const auto r = invoke({"curve", "--kind", "survival", "--c", "0.5", "--d", "0.5", "--n-max", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "n,survival\n1,0.5625\n2,0.31640625\n3,0.177978515625\n");
}

TEST(CliCurve, Eigenvalues) {
  const auto r = invoke({"curve", "--kind", "eigenvalues", "--p0", "0.5", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& row : nlohmann::json::parse(r.out).at("rows")) {
    const double d = row.at("d").get<double>();
    EXPECT_NEAR(row.at("lambda1").get<double>(), 1 - d, 1e-12);
    EXPECT_NEAR(row.at("lambda2").get<double>(), d, 1e-12);
  }
}

TEST(CliCurve, RejectsBadGrid) {
  EXPECT_EQ(invoke({"curve", "--kind", "info_bound", "--steps", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"curve", "--kind", "info_bound", "--d-min", "0.4", "--d-max", "0.1"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"curve", "--kind", "bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"curve", "--kind", "survival", "--d", "0.7"}).code, cli::kExitUsage);
}

// ---------- simulate ----------
TEST(CliSimulate, NoAttack) {
  const auto r = invoke({"simulate", "--bits", "1011", "--c", "0.3", "--attack", "none", "--trials", "100", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = key_values(r.out);
  EXPECT_EQ(kv.at("decode_error_rate"), "0");
  EXPECT_EQ(kv.at("aborts"), "0");
  EXPECT_EQ(kv.at("trials"), "100");
}

TEST(CliSimulate, ProbeDetectionRate) {
  const auto r = invoke({"simulate", "--attack", "probe:0.5236:B1", "--trials", "3000", "--threads", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(invoke({"simulate", "--attack", "probe:0.5236:B1", "--trials", "3000",
                                               "--threads", "4", "--format", "json"})
                                           .out);
  const auto& rate = j.at("aggregate").at("detection_rate");
  const double total = rate.at("total").get<double>(), value = rate.at("value").get<double>();
  const double expected = j.at("oracle").at("detection_rate").get<double>();
  EXPECT_NEAR(expected, 0.125, 1e-4);  // theta rounded to 4 decimals
  ASSERT_GE(total, 10000);
  EXPECT_LE(std::abs(value - expected), 4 * std::sqrt(expected * (1 - expected) / total));
}

TEST(CliSimulate, SameSeedSameBytes) {
  const std::vector<std::string> args{"simulate", "--attack", "intercept:random", "--trials", "200", "--seed", "9"};
  EXPECT_EQ(invoke(args).out, invoke(args).out);
  // Trial k runs with seed base ^ k, so bases that differ only in low bits
  // cover the same trial seeds; pick one that does not.
  auto other = args;
  other.back() = "1000009";
  EXPECT_NE(invoke(args).out, invoke(other).out);
}

TEST(CliSimulate, RejectsBadInput) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"simulate", "--c", "1.5"},
           {"simulate", "--attack", "laser"},
           {"simulate", "--attack", "probe:2:B1"},
           {"simulate", "--attack", "probe:0.3:B7"},
           {"simulate", "--attack", "probe:0.3", "--detection", "0.25"},
           {"simulate", "--attack", "none", "--detection", "0.25"},
           {"simulate", "--bits", "10x1"},
           {"simulate", "--bits", "random:0"},
           {"simulate", "--trials", "0"},
           {"simulate", "--no-such-flag"},
       }) {
    const auto r = invoke(args);
    EXPECT_EQ(r.code, cli::kExitUsage) << args[1] << " " << args[2];
    EXPECT_TRUE(r.out.empty());
  }
}

TEST(CliSimulate, RoundLimitIsInternalError) {
  const auto r = invoke({"simulate", "--bits", "random:100", "--max-rounds", "5", "--trials", "1"});
  EXPECT_EQ(r.code, cli::kExitInternal);
  EXPECT_NE(r.err.find("max_rounds"), std::string::npos);
}

TEST(CliSimulate, TranscriptsFile) {
  TempDir dir;
  const auto path = dir.path() / "t.json";
  const auto r = invoke({"simulate", "--bits", "101", "--trials", "3", "--attack", "intercept", "--transcripts",
                         path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(path));
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), 3u);
}

// ---------- shared options ----------
TEST(CliOutput, WritesFileAndNothingToStdout) {
  TempDir dir;
  const auto path = dir.path() / "curve.csv";
  const auto r = invoke({"curve", "--kind", "survival", "--d", "0.5", "--n-max", "3", "-o", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(path), "n,survival\n1,0.5625\n2,0.31640625\n3,0.177978515625\n");
}

TEST(CliOutput, NoFileOnFailure) {
  TempDir dir;
  const auto path = dir.path() / "bad.csv";
  const auto r = invoke({"simulate", "--c", "0", "-o", path.string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(fs::exists(path));
  EXPECT_TRUE(fs::is_empty(dir.path()));
}

TEST(CliConfig, FileSuppliesDefaultsAndFlagsWin) {
  TempDir dir;
  const auto config = dir.path() / "run.json";
  std::ofstream(config) << R"({"kind": "survival", "c": 0.5, "d": 0.5, "n-max": 2})";
  auto r = invoke({"curve", "--config", config.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "n,survival\n1,0.5625\n2,0.31640625\n");
  r = invoke({"curve", "--config", config.string(), "--n-max", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "n,survival\n1,0.5625\n");
}

TEST(CliConfig, RejectsBrokenFiles) {
  TempDir dir;
  const auto config = dir.path() / "broken.json";
  std::ofstream(config) << "{not json";
  EXPECT_EQ(invoke({"curve", "--config", config.string()}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"curve", "--config", (dir.path() / "missing.json").string()}).code, cli::kExitUsage);
}

TEST(CliMeta, HelpAndVersion) {
  auto r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
  r = invoke({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find('.'), std::string::npos);
  EXPECT_EQ(invoke({}).code, cli::kExitUsage);
}

// ---------- spec parsers ----------
TEST(ParseAttackSpec, Grammar) {
  EXPECT_TRUE(std::holds_alternative<NoAttack>(cli::parse_attack_spec("none")));
  const auto probe = std::get<ProbeUnitary>(cli::parse_attack_spec("probe:0.5236:B0"));
  EXPECT_EQ(probe.theta(), 0.5236);
  EXPECT_EQ(probe.probe_basis(), Basis::B0);
  EXPECT_EQ(std::get<ProbeUnitary>(cli::parse_attack_spec("probe:0.1")).probe_basis(), Basis::B1);
  const auto from_d = std::get<ProbeUnitary>(cli::parse_attack_spec("probe", 0.25));
  EXPECT_NEAR(from_d.theta(), std::numbers::pi / 6, 1e-12);
  EXPECT_EQ(std::get<ProbeUnitary>(cli::parse_attack_spec("probe:B0", 0.25)).probe_basis(), Basis::B0);
  EXPECT_FALSE(std::get<InterceptResend>(cli::parse_attack_spec("intercept")).fixed_basis.has_value());
  EXPECT_FALSE(std::get<InterceptResend>(cli::parse_attack_spec("intercept:random")).fixed_basis.has_value());
  EXPECT_EQ(std::get<InterceptResend>(cli::parse_attack_spec("intercept:B1")).fixed_basis, Basis::B1);
  for (const char* bad : {"", "probe:", "probe:abc", "probe:0.1:B2", "probe:0.1:B1:x", "intercept:B3", "none:1"})
    EXPECT_THROW(cli::parse_attack_spec(bad), PreconditionError) << bad;
}

TEST(ParseBitsSpec, Grammar) {
  EXPECT_EQ(std::get<FixedBits>(cli::parse_bits_spec("1011")).bits, (std::vector<Bit>{1, 0, 1, 1}));
  const auto random = std::get<RandomBits>(cli::parse_bits_spec("random:64", 0.3));
  EXPECT_EQ(random.count, 64u);
  EXPECT_EQ(random.p0, 0.3);
  for (const char* bad : {"", "12", "random:", "random:-3", "random:x"})
    EXPECT_THROW(cli::parse_bits_spec(bad), PreconditionError) << bad;
}
