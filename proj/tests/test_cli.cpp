#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "acf/cli.hpp"
#include "json.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = acf::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "acf_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

int tool(const std::string& args) {
  const std::string cmd = std::string(ACF_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST(Parse, DefaultsAndValues) {
  const auto cfg = acf::cli::parse({"classify", "--ma", "2.7"});
  EXPECT_EQ(cfg.command, acf::cli::Command::classify);
  EXPECT_EQ(cfg.parameters.at("ma"), "2.7");
  EXPECT_EQ(cfg.parameters.at("kmin"), "-3");
  EXPECT_EQ(cfg.parameters.at("kmax"), "3");
  EXPECT_FALSE(cfg.output_format);
  EXPECT_FALSE(cfg.emit_gnuplot);

  const auto b = acf::cli::parse({"bound", "--gamma", "0.5", "--xi", "-1", "--format", "csv"});
  EXPECT_EQ(b.parameters.at("xi"), "-1");
  EXPECT_EQ(*b.output_format, acf::cli::Format::csv);

  const auto s = acf::cli::parse({"specfun", "j", "0.7", "5.0"});
  ASSERT_EQ(s.positional.size(), 3u);
  EXPECT_EQ(s.positional[0], "j");
}

TEST(Parse, Errors) {
  using acf::cli::usage_error;
  EXPECT_THROW(acf::cli::parse({}), usage_error);
  EXPECT_THROW(acf::cli::parse({"bogus"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"classify"}), usage_error);                        // missing --ma
  EXPECT_THROW(acf::cli::parse({"classify", "--ma", "x"}), usage_error);           // not a number
  EXPECT_THROW(acf::cli::parse({"classify", "--ma", "inf"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"classify", "--ma", "1", "--bogus", "2"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"classify", "--ma", "1", "--kmin", "3", "--kmax", "1"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"bound", "--gamma", "1.2", "--xi", "-1"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"bound", "--xi", "-1"}), usage_error);             // gamma or --log
  EXPECT_THROW(acf::cli::parse({"shell", "--ma", "1", "--method", "magic"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"scatter", "--ma", "0.5", "--spin", "y:+1"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"scatter", "--ma", "0.5", "--points", "0"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"flow", "--etarget", "1"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"polescan", "--xi", "-1", "--gamma", "0.5", "--emin", "-1", "--emax", "-2"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"specfun", "q", "1"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"specfun", "j", "1"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"classify", "--ma", "1", "--format", "xml"}), usage_error);
  EXPECT_THROW(acf::cli::parse({"classify", "--ma", "1", "--emit-gnuplot"}), usage_error);
}

TEST(Run, ExitCodes) {
  EXPECT_EQ(run({"classify", "--ma", "0.5"}).code, 0);
  EXPECT_EQ(run({"classify"}).code, 2);
  EXPECT_EQ(run({"bound", "--gamma", "0.5", "--xi", "1"}).code, 2);  // no bound state for xi >= 0
  EXPECT_EQ(run({"shell", "--ma", "1.3", "--gamma", "0.3", "--method", "exact"}).code, 1);  // no root
  EXPECT_EQ(run({"shell", "--ma", "0.3", "--gamma", "0.3", "--method", "closed"}).code, 2);  // degenerate
  EXPECT_EQ(run({"specfun", "gamma", "-2"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Run, HelpGoesToStdout) {
  const auto r = run({"scatter", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--phimin"), std::string::npos);
}

TEST(Run, CsvShape) {
  const auto r = run({"spectrum", "--ma", "0.3", "--xi", "-1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  ASSERT_FALSE(r.out.empty());
  EXPECT_EQ(r.out.back(), '\n');
  std::istringstream is(r.out);
  std::string header, line;
  std::getline(is, header);
  EXPECT_EQ(header.find("k,s,l,region"), 0u);
  const auto ncols = std::count(header.begin(), header.end(), ',');
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), ncols);
    ++rows;
  }
  EXPECT_EQ(rows, 10);
}

TEST(Run, JsonShape) {
  const auto r = run({"bound", "--gamma", "0.5", "--xi", "-1", "--m", "1"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.contains("inputs"));
  ASSERT_TRUE(j.contains("results"));
  ASSERT_TRUE(j.contains("meta"));
  EXPECT_EQ(j["meta"]["version"], acf::cli::version);
  EXPECT_TRUE(j["meta"]["equations"].is_array());
  EXPECT_NEAR(j["results"]["energy_closed"].get<double>(), -0.5, 1e-14);
  EXPECT_NEAR(j["results"]["energy_pole"].get<double>(), -0.5, 1e-10);
  EXPECT_NEAR(j["results"]["kappa"].get<double>(), 1.0, 1e-14);
  EXPECT_GT(j["results"]["norm_const"].get<double>(), 0.0);
}

TEST(Run, InputsRoundTripAtFullPrecision) {
  const std::string xi = "-0.12345678901234568";
  const auto r = run({"bound", "--gamma", "0.3", "--xi", xi, "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["inputs"]["xi"].get<double>(), std::stod(xi));
  EXPECT_EQ(j["inputs"]["command"], "bound");
}

TEST(Run, CsvNumbersRoundTrip) {
  const auto r = run({"bound", "--gamma", "0.3", "--xi", "-0.7", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  std::getline(is, line);
  const double e = std::stod(line.substr(0, line.find(',')));
  EXPECT_EQ(e, acf::bound_energy_closed(0.3, -0.7, 1.0));
}

TEST(Run, NegativeValuesAccepted) {
  EXPECT_EQ(run({"classify", "--ma", "-0.3", "--kmin", "-1", "--kmax", "1"}).code, 0);
  const auto r = run({"classify", "--ma", "-0.3"});
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(run({"polescan", "--xi", "-1", "--gamma", "0.5", "--emin", "-10", "--emax", "-0.01"}).code, 0);
}

TEST(Run, Deterministic) {
  ::setenv("ACF_NUM_THREADS", "1", 1);
  const auto a = run({"spectrum", "--ma", "1.3", "--xi", "-0.4", "--kmin", "-4", "--kmax", "4"});
  const auto c = run({"scatter", "--ma", "0.5", "--points", "50"});
  ::setenv("ACF_NUM_THREADS", "6", 1);
  const auto b = run({"spectrum", "--ma", "1.3", "--xi", "-0.4", "--kmin", "-4", "--kmax", "4"});
  const auto d = run({"scatter", "--ma", "0.5", "--points", "50"});
  ::unsetenv("ACF_NUM_THREADS");
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(c.out, d.out);
  EXPECT_EQ(run({"flow", "--decades", "4"}).out, run({"flow", "--decades", "4"}).out);
}

TEST(Run, OutputFileAndGnuplot) {
  const auto csv = scratch("scatter.csv");
  std::filesystem::remove(csv);
  std::filesystem::remove(scratch("scatter.gp"));
  const auto r = run({"scatter", "--ma", "0.5", "--points", "20", "--output", csv.string(), "--emit-gnuplot"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(csv), run({"scatter", "--ma", "0.5", "--points", "20"}).out);
  const std::string gp = slurp(scratch("scatter.gp"));
  EXPECT_NE(gp.find("scatter.csv"), std::string::npos);
  EXPECT_EQ(gp.find("@CSV@"), std::string::npos);
  // JSON cannot be plotted.
  EXPECT_EQ(run({"bound", "--gamma", "0.5", "--xi", "-1", "--output", csv.string(), "--emit-gnuplot"}).code, 2);
}

TEST(Run, SpecfunValues) {
  const auto r = run({"specfun", "gamma", "0.5", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["results"]["value"].get<double>(), std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_EQ(run({"specfun", "k", "0.5", "0"}).code, 2);
}

TEST(Run, ShellAllMethods) {
  const auto r = run({"shell", "--ma", "-0.35", "--gamma", "0.3", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  const double closed = j["results"]["energy_closed"].get<double>();
  const double exact = j["results"]["energy_exact"].get<double>();
  EXPECT_LE(std::abs(closed - exact) / std::abs(exact), 1e-2);
}

TEST(Tool, BinaryExitCodes) {
  EXPECT_EQ(tool("classify --ma 0.5"), 0);
  EXPECT_EQ(tool("classify --ma nope"), 2);
  EXPECT_EQ(tool("frobnicate"), 2);
  EXPECT_EQ(tool("shell --ma 1.3 --gamma 0.3 --method numerov"), 1);
  const std::string cmd = "ACF_NUM_THREADS=2 " + std::string(ACF_TOOL_PATH) + " spectrum --ma 0.3 --xi -1 >/dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
}
