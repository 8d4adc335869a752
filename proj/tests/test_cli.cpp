#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cro/cli.hpp"
#include "cro/config.hpp"
#include "cro/experiment.hpp"

using namespace cro;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::main(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string &name) {
  auto p = fs::temp_directory_path() / ("cro_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<double> numbers(const std::string &text) {
  std::istringstream in(text);
  std::vector<double> v;
  double x;
  while (in >> x) v.push_back(x);
  return v;
}

std::vector<std::pair<double, double>> table(const std::string &csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return rows;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("config file parsing") {
  std::istringstream in("# comment\nfunction = f3\n  step_size=0.25   # trailing\n\ndec_thres = 1.5e5\nruns = 4\n");
  const auto s = parse_config(in);
  CHECK(s.function == "f3");
  CHECK(s.step_size == 0.25);
  CHECK(s.dec_thres == 1.5e5);
  CHECK(s.runs == 4);
  CHECK_FALSE(s.fe_limit.has_value());

  std::istringstream unknown("stepsize = 1\n");
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
  std::istringstream garbage("runs = many\n");
  CHECK_THROWS_AS(parse_config(garbage), ConfigError);
  std::istringstream no_eq("runs 4\n");
  CHECK_THROWS_AS(parse_config(no_eq), ConfigError);
}

TEST_CASE("flag over config over preset") {
  RunSettings config;
  config.set("step_size", "0.3");
  config.set("loss_rate", "0.5");
  RunSettings flags;
  flags.set("step_size", "0.7");
  const auto merged = config.overlaid_by(flags);
  const auto p = resolve_parameters(merged, fid(1));
  CHECK(p.step_size == 0.7);
  CHECK(p.loss_rate == 0.5);
  CHECK(p.pop_size == 10);
  CHECK(p.ini_ke == 1e3);
}

TEST_CASE("run writes one record per run and a summary") {
  const auto dir = scratch("run");
  auto r = invoke({"run", "--function", "f1", "--distribution", "gaussian", "--runs", "100", "--seed", "7",
                "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  const auto recs = read_records(dir / "run_f1_CRO_G_records.csv");
  CHECK(recs.size() == 100);
  for (const auto &rec : recs) {
    CHECK(rec.fe_used >= 150000);
    CHECK(rec.fe_used <= 150001);
  }
  CHECK(read_summary(dir / "run_f1_CRO_G_summary.csv").rows.size() == 1);
  CHECK(r.out.find("CRO_G") != std::string::npos);
}

TEST_CASE("run takes its budget from the standard table and the config file") {
  const auto dir = scratch("cfg");
  {
    std::ofstream cfg(dir / "f3.cfg");
    cfg << "function = f3\ndistribution = cauchy\nruns = 1\nseed = 3\nout_dir = " << dir.string() << "\n";
  }
  auto r = invoke({"run", "--config", (dir / "f3.cfg").string()});
  REQUIRE(r.code == 0);
  const auto recs = read_records(dir / "run_f3_CRO_C_records.csv");
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].fe_used >= 250000);
  CHECK(recs[0].fe_used <= 250001);

  // The flag wins over the config value.
  // Reusing the directory with different settings is refused.
  r = invoke({"run", "--config", (dir / "f3.cfg").string(), "--fe-limit", "5000"});
  CHECK(r.code == 2);
  CHECK(r.err.find("different plan") != std::string::npos);

  // The flag wins over the config value.
  const auto other = dir / "short";
  r = invoke({"run", "--config", (dir / "f3.cfg").string(), "--fe-limit", "5000", "--out-dir", other.string()});
  REQUIRE(r.code == 0);
  CHECK(read_records(other / "run_f3_CRO_C_records.csv")[0].fe_used <= 5001);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({"run", "--function", "f1", "--distribution", "levy"}).code == 2);
  CHECK(invoke({"run", "--function", "f1", "--distribution", "levy"}).err.find("unknown distribution") !=
        std::string::npos);
  CHECK(invoke({"run", "--function", "f99", "--distribution", "gaussian"}).code == 2);
  CHECK(invoke({"run", "--distribution", "gaussian"}).code == 2);
  CHECK(invoke({"run", "--config", "/nonexistent.cfg"}).code == 2);
  CHECK(invoke({"run", "--function", "f1", "--distribution", "cauchy", "--pop-size", "0"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"sample", "--distribution", "cauchy", "--scale", "-1"}).code == 2);
  CHECK(invoke({"sample", "--distribution", "nope"}).code == 2);
  CHECK(invoke({"pdf", "--distribution", "gaussian", "--steps", "1"}).code == 2);
  CHECK(invoke({"pdf", "--distribution", "gaussian", "--sigma2", "0"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("runtime failures exit with 1") {
  const auto dir = scratch("blocked");
  { std::ofstream(dir / "file") << "x"; }
  auto r = invoke({"run", "--function", "f16", "--distribution", "gaussian", "--runs", "1", "--out-dir",
                (dir / "file" / "sub").string()});
  CHECK(r.code == 1);
}

TEST_CASE("sample is deterministic and well centred") {
  auto a = invoke({"sample", "--distribution", "gaussian", "--n", "5", "--seed", "11"});
  auto b = invoke({"sample", "--distribution", "gaussian", "--n", "5", "--seed", "11"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(numbers(a.out).size() == 5);

  auto c = numbers(invoke({"sample", "--distribution", "cauchy", "--scale", "1", "--n", "100000", "--seed", "2"}).out);
  REQUIRE(c.size() == 100000);
  std::nth_element(c.begin(), c.begin() + 50000, c.end());
  CHECK(std::abs(c[50000]) <= 0.02);

  auto m = numbers(invoke({"sample", "--distribution", "rayleigh-modified", "--scale", "1", "--n", "100000", "--seed", "2"}).out);
  double mean = 0;
  for (double x : m) mean += x;
  mean /= static_cast<double>(m.size());
  CHECK(std::abs(mean) <= 0.02);
}

TEST_CASE("pdf tables") {
  auto g = invoke({"pdf", "--distribution", "gaussian", "--mu", "0", "--sigma2", "1", "--from", "-5", "--to", "5", "--steps", "1001"});
  REQUIRE(g.code == 0);
  auto rows = table(g.out);
  REQUIRE(rows.size() == 1001);
  CHECK(rows[500].first == 0.0);
  CHECK(rows[500].second == doctest::Approx(0.39894).epsilon(1e-5));
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].second == doctest::Approx(rows[1000 - i].second));

  auto mr = table(invoke({"pdf", "--distribution", "rayleigh-modified", "--sigma2", "1", "--from", "-5", "--to", "5", "--steps", "1001"}).out);
  CHECK(mr[500].second == doctest::Approx(0.60653).epsilon(1e-5));
  double area = 0;
  for (std::size_t i = 1; i < mr.size(); ++i)
    area += 0.5 * (mr[i].second + mr[i - 1].second) * (mr[i].first - mr[i - 1].first);
  CHECK(std::abs(area - 1.0) <= 1e-3);

  for (std::string d : {"cauchy", "exponential", "exponential-onesided", "rayleigh"})
    CHECK(invoke({"pdf", "--distribution", d, "--gamma", "2"}).code == 0);
}

TEST_CASE("bench list") {
  auto r = invoke({"bench", "list"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "id,name,dim,lower,upper,category,fe_limit");
  int n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == 23);
  CHECK(r.out.find("f16,six_hump_camel,2,-5,5,III,1250") != std::string::npos);
  CHECK(r.out.find("f17,branin,2,-5;0,10;15,III,5000") != std::string::npos);
}

TEST_CASE("suite produces the full report and resumes") {
  const auto dir = scratch("suite");
  const std::vector<std::string> base{"suite", "--fe-limit", "100", "--seed", "5", "--no-timing",
                                      "--out-dir", dir.string()};
  auto r = invoke(base);
  REQUIRE(r.code == 0);
  CHECK(read_records(dir / "suite_records.csv").size() == 9200);
  const auto sf = read_summary(dir / "suite_summary.csv");
  CHECK(sf.rows.size() == 92);
  CHECK(sf.categories.size() == 12);

  const auto resumed = scratch("suite_resume");
  std::vector<std::string> partial{"suite", "--fe-limit", "100", "--seed", "5", "--no-timing",
                                   "--out-dir", resumed.string(), "--max-cells", "4000"};
  r = invoke(partial);
  CHECK(r.code == 0);
  CHECK_FALSE(fs::exists(resumed / "suite_records.csv"));
  partial.resize(partial.size() - 2);
  r = invoke(partial);
  CHECK(r.code == 0);
  CHECK(slurp(resumed / "suite_records.csv") == slurp(dir / "suite_records.csv"));
  CHECK(slurp(resumed / "suite_summary.csv") == slurp(dir / "suite_summary.csv"));

  const auto cat1 = scratch("suite_cat1");
  r = invoke({"suite", "--functions", "f1..f7", "--runs", "2", "--fe-limit", "200", "--out-dir", cat1.string()});
  REQUIRE(r.code == 0);
  const auto s1 = read_summary(cat1 / "suite_summary.csv");
  CHECK(s1.rows.size() == 28);
  REQUIRE(s1.categories.size() == 4);
  for (const auto &c : s1.categories) CHECK(c.category == Category::Unimodal);

  CHECK(invoke({"suite", "--variants", "G,levy", "--out-dir", cat1.string()}).code == 2);
}
