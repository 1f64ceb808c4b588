#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "xres/cli.hpp"

using namespace xres;

namespace {

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "xres_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string model(int n) { return std::string(XRES_MODELS_DIR) + "/contact_n" + std::to_string(n) + ".json"; }

std::vector<nlohmann::json> json_rows(const std::string& s) {
  std::vector<nlohmann::json> rows;
  std::istringstream in(s);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(nlohmann::json::parse(line));
  return rows;
}

std::size_t csv_rows(const std::string& s) {
  std::size_t lines = 0;
  for (char c : s) lines += c == '\n';
  return lines - 2;
}

}  // namespace

TEST(Parse, Ranges) {
  EXPECT_EQ(cli::parse_range("-1:1:0.1").size(), 21u);
  EXPECT_EQ(cli::parse_range("2.5").size(), 1u);
  EXPECT_THROW(cli::parse_range("1:0:0.1"), ConfigError);
  EXPECT_THROW(cli::parse_range("0:1:0"), ConfigError);
  EXPECT_THROW(cli::parse_h_grid(""), ConfigError);
  EXPECT_THROW(cli::parse_h_grid("1e-3,1e-2"), ConfigError);
  EXPECT_EQ(cli::parse_h_grid("1e-2,1e-3").size(), 2u);
}

TEST(Cli, AiryTable) {
  const CliRun r = run_cli({"airy", "--n", "2", "--y", "-1:1:0.1", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(r.out), 21u);
  EXPECT_EQ(r.out.rfind("# xres airy v1", 0), 0u);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({"airy", "--n", "9"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"bogus"}).code, 2);
  EXPECT_EQ(run_cli({"airy", "--format", "xml"}).code, 2);
  EXPECT_EQ(run_cli({"scan-integral", "--model", model(2), "--h-grid", ""}).code, 2);
  EXPECT_EQ(run_cli({"scan-integral", "--model", model(2), "--h-grid", "1e-3,1e-2"}).code, 2);
  EXPECT_EQ(run_cli({"transfer", "--model", "/nonexistent.json", "--h-grid", "1e-3"}).code, 2);
  EXPECT_EQ(run_cli({"resonances", "--model", model(2), "--h", "1e-3", "--window", "small"}).code, 2);
  EXPECT_EQ(run_cli({"check", "--criteria", "11"}).code, 2);
}

TEST(Cli, ScanWithZeroInteraction) {
  const CliRun r = run_cli({"scan-integral", "--model", model(2), "--h-grid", "1e-2,1e-3", "--lambda", "0",
                         "--r0", "0", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t seen = 0;
  for (const auto& row : json_rows(r.out))
    if (row.contains("I_quadrature")) {
      EXPECT_EQ(row["I_quadrature"].get<double>(), 0.0);
      EXPECT_EQ(row["I_leading"].get<double>(), 0.0);
      ++seen;
    }
  EXPECT_EQ(seen, 2u);
}

TEST(Cli, TransferWithZeroInteraction) {
  const CliRun r = run_cli({"transfer", "--model", model(2), "--h-grid", "1e-3", "--lambda", "0", "--r0", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = json_rows(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0]["T_numeric_11_im"].get<double>(), -1.0, 1e-12);
  EXPECT_NEAR(rows[0]["T_numeric_11_re"].get<double>(), 0.0, 1e-12);
  EXPECT_NEAR(rows[0]["T_numeric_12_re"].get<double>(), 0.0, 1e-12);
}

TEST(Cli, TransferIllConditioned) {
  const CliRun r = run_cli({"transfer", "--model", model(2), "--h-grid", "5", "--lambda", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, ResonancesFollowBohrSommerfeld) {
  const CliRun r = run_cli({"resonances", "--model", model(2), "--h", "1e-3", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = json_rows(r.out);
  ASSERT_EQ(rows.size(), 64u);
  for (const auto& row : rows) {
    const double E = row["E_bs"].get<double>();
    const double k = std::round((E + 0.25 - 1e-3) / 2e-3);
    EXPECT_NEAR(E, (2.0 * k + 1.0) * 1e-3 - 0.25, 1e-14);
    EXPECT_LE(row["im_z"].get<double>(), 0.0);
  }
}

TEST(Cli, OutputIsDeterministic) {
  const std::vector<std::string> args{"scan-integral", "--model", model(2), "--h-grid", "1e-2,3e-3,1e-3",
                                      "--lambda", "-1,0,1", "--format", "csv"};
  const CliRun a = run_cli(args), b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, CheckReportsCriteria) {
  const CliRun r = run_cli({"check", "--criteria", "1,2"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}
