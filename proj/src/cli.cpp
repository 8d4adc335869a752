#include "cro/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>

#include "cro/benchmarks.hpp"
#include "cro/config.hpp"
#include "cro/engine.hpp"
#include "cro/experiment.hpp"
#include "cro/perturbation.hpp"

namespace cro::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Flags that mirror configuration keys. Flag values overlay the config file.
struct SettingFlags {
  std::string config;
  std::string distribution, function, out_dir;
  std::size_t pop_size{};
  double step_size{}, en_buff{}, ini_ke{}, coll_rate{}, loss_rate{}, dec_thres{}, syn_thres{};
  long long fe_limit{};
  int runs{}, parallelism{};
  std::uint64_t seed{};
  std::vector<std::pair<std::string, CLI::Option *>> opts;

  void attach(CLI::App &app) {
    app.add_option("--config", config, "Flat key = value configuration file");
    opts = {
        {"distribution", app.add_option("--distribution", distribution, "gaussian|cauchy|exponential|rayleigh-modified")},
        {"function", app.add_option("--function", function, "Benchmark function, e.g. f1")},
        {"pop_size", app.add_option("--pop-size", pop_size)},
        {"step_size", app.add_option("--step-size", step_size)},
        {"en_buff", app.add_option("--en-buff", en_buff)},
        {"ini_ke", app.add_option("--ini-ke", ini_ke)},
        {"coll_rate", app.add_option("--coll-rate", coll_rate)},
        {"loss_rate", app.add_option("--loss-rate", loss_rate)},
        {"dec_thres", app.add_option("--dec-thres", dec_thres)},
        {"syn_thres", app.add_option("--syn-thres", syn_thres)},
        {"fe_limit", app.add_option("--fe-limit", fe_limit)},
        {"runs", app.add_option("--runs", runs)},
        {"seed", app.add_option("--seed", seed)},
        {"parallelism", app.add_option("--parallelism", parallelism)},
        {"out_dir", app.add_option("--out-dir", out_dir)},
    };
  }

  RunSettings resolve() const {
    RunSettings base = config.empty() ? RunSettings{} : load_config(config);
    RunSettings flags;
    for (const auto &[key, opt] : opts)
      if (opt->count() > 0) flags.set(key, opt->as<std::string>());
    return base.overlaid_by(flags);
  }
};

Distribution require_distribution(const std::string &name) {
  auto d = parse_distribution(name);
  if (!d) throw UsageError("unknown distribution '" + name + "'");
  return *d;
}

FunctionId require_function(const std::string &name) {
  auto f = parse_function(name);
  if (!f) throw UsageError("unknown function '" + name + "'");
  return *f;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4E", v);
  return buf;
}

ExperimentPlan plan_from(const RunSettings &s, std::vector<FunctionId> functions,
                         std::vector<Distribution> variants) {
  ExperimentPlan plan;
  plan.functions = std::move(functions);
  plan.variants = std::move(variants);
  plan.runs = s.runs.value_or(100);
  plan.master_seed = s.seed.value_or(0);
  plan.parallelism = s.parallelism.value_or(1);
  for (auto f : plan.functions) {
    if (s.overrides_parameters()) plan.overrides[f] = resolve_parameters(s, f);
    if (s.fe_limit) plan.fe_overrides[f] = *s.fe_limit;
  }
  plan.validate();
  return plan;
}

void print_rows(std::ostream &out, const std::vector<SummaryRow> &rows) {
  out << "function  variant  mean         std          best         rank\n";
  for (const auto &r : rows)
    out << std::left << std::setw(10) << function_label(r.function) << std::setw(9)
        << variant_name(r.variant) << std::setw(13) << sci(r.mean) << std::setw(13)
        << sci(r.std_dev) << std::setw(13) << sci(r.best) << r.rank << '\n';
}

// Runs (or resumes) a plan and writes the final record and summary files.
// Returns false when execution stopped early because of --max-cells.
bool execute(std::ostream &out, const ExperimentPlan &plan, const fs::path &dir,
             const std::string &stem, std::optional<std::size_t> max_cells,
             std::vector<SummaryRow> &rows) {
  fs::create_directories(dir);
  const fs::path journal = dir / (stem + ".journal");
  const auto progress = run_plan(plan, journal, max_cells);
  if (!progress.complete) {
    out << "stopped after " << progress.executed << " new cell(s); " << progress.records.size()
        << " of " << plan.functions.size() * plan.variants.size() * static_cast<std::size_t>(plan.runs)
        << " complete. Re-run the same command to resume.\n";
    return false;
  }
  write_records(dir / (stem + "_records.csv"), progress.records);
  rows = summarize(progress.records, plan.functions, plan.variants, plan.runs);
  write_summary(dir / (stem + "_summary.csv"), rows, category_ranks(rows));
  return true;
}

int cmd_run(std::ostream &out, const SettingFlags &flags, bool no_timing,
            std::optional<std::size_t> max_cells) {
  const RunSettings s = flags.resolve();
  if (!s.function) throw UsageError("run needs --function (or 'function' in the config)");
  if (!s.distribution) throw UsageError("run needs --distribution (or 'distribution' in the config)");
  const FunctionId f = require_function(*s.function);
  const Distribution d = require_distribution(*s.distribution);
  ExperimentPlan plan = plan_from(s, {f}, {d});
  plan.record_timing = !no_timing;
  const fs::path dir = s.out_dir.value_or("results");
  const std::string stem = "run_" + function_label(f) + "_" + variant_name(d);
  std::vector<SummaryRow> rows;
  if (!execute(out, plan, dir, stem, max_cells, rows)) return kExitOk;
  print_rows(out, rows);
  out << "records: " << (dir / (stem + "_records.csv")).string() << '\n';
  return kExitOk;
}

int cmd_suite(std::ostream &out, const SettingFlags &flags, const std::string &functions_sel,
              const std::string &variants_sel, bool no_timing,
              std::optional<std::size_t> max_cells) {
  const RunSettings s = flags.resolve();
  std::vector<FunctionId> functions = ExperimentPlan::all_functions();
  if (!functions_sel.empty()) functions = parse_function_list(functions_sel);
  else if (s.function) functions = parse_function_list(*s.function);

  std::vector<Distribution> variants(std::begin(kAllDistributions), std::end(kAllDistributions));
  std::string vsel = !variants_sel.empty() ? variants_sel : s.distribution.value_or("");
  if (!vsel.empty()) {
    variants.clear();
    std::istringstream in(vsel);
    std::string item;
    while (std::getline(in, item, ','))
      if (!item.empty()) variants.push_back(require_distribution(item));
  }

  ExperimentPlan plan = plan_from(s, functions, variants);
  plan.record_timing = !no_timing;
  const fs::path dir = s.out_dir.value_or("results");
  std::vector<SummaryRow> rows;
  if (!execute(out, plan, dir, "suite", max_cells, rows)) return kExitOk;
  print_rows(out, rows);
  out << "\ncategory  variant  avg_rank\n";
  for (const auto &c : category_ranks(rows))
    out << std::left << std::setw(10) << category_label(c.category) << std::setw(9)
        << variant_name(c.variant) << fixed(c.avg_rank, 2) << '\n';
  out << "records: " << (dir / "suite_records.csv").string() << '\n';
  return kExitOk;
}

int cmd_sample(std::ostream &out, const std::string &dist, double scale, long long n,
               std::uint64_t seed, const std::string &path) {
  const Distribution d = require_distribution(dist);
  if (!(scale > 0.0) || !std::isfinite(scale)) throw UsageError("scale must be positive");
  if (n < 1) throw UsageError("n must be at least 1");
  std::unique_ptr<std::ofstream> file;
  std::ostream *sink = &out;
  if (!path.empty()) {
    file = std::make_unique<std::ofstream>(path);
    if (!*file) throw std::runtime_error("cannot open '" + path + "' for writing");
    sink = file.get();
  }
  RandomSource rng(seed);
  const PerturbationSpec spec{d, scale, 0.0};
  char buf[40];
  for (long long i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", sample(spec, rng));
    *sink << buf;
  }
  sink->flush();
  if (!*sink) throw std::runtime_error("write failed");
  return kExitOk;
}

struct PdfArgs {
  std::string distribution;
  double location = 0.0;
  double sigma2 = 1.0;
  double gamma = 1.0;
  double from = -5.0;
  double to = 5.0;
  int steps = 201;
  std::string out;
};

int cmd_pdf(std::ostream &out, const PdfArgs &a) {
  if (a.steps < 2) throw UsageError("steps must be at least 2");
  if (!(a.to > a.from)) throw UsageError("--to must exceed --from");
  if (!(a.sigma2 > 0.0)) throw UsageError("sigma2 must be positive");
  if (!(a.gamma > 0.0)) throw UsageError("gamma must be positive");
  std::function<double(double)> density;
  const std::string &d = a.distribution;
  if (d == "gaussian") density = [&](double x) { return pdf_gaussian(x, a.location, a.sigma2); };
  else if (d == "cauchy") density = [&](double x) { return pdf_cauchy(x, a.location, a.gamma); };
  else if (d == "exponential")
    density = [&](double x) { return pdf_exponential_mirrored(x - a.location, a.gamma); };
  else if (d == "exponential-onesided")
    density = [&](double x) {
      return x >= a.location ? a.gamma * std::exp(-a.gamma * (x - a.location)) : 0.0;
    };
  else if (d == "rayleigh") density = [&](double x) { return pdf_rayleigh(x - a.location, a.sigma2); };
  else if (d == "rayleigh-modified")
    density = [&](double x) { return pdf_modified_rayleigh(x - a.location, a.sigma2); };
  else throw UsageError("unknown distribution '" + d + "'");

  std::unique_ptr<std::ofstream> file;
  std::ostream *sink = &out;
  if (!a.out.empty()) {
    file = std::make_unique<std::ofstream>(a.out);
    if (!*file) throw std::runtime_error("cannot open '" + a.out + "' for writing");
    sink = file.get();
  }
  *sink << "x,pdf\n";
  char buf[80];
  for (int i = 0; i < a.steps; ++i) {
    const double x = a.from + (a.to - a.from) * i / (a.steps - 1);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x, density(x));
    *sink << buf;
  }
  sink->flush();
  return kExitOk;
}

std::string join_bounds(const std::vector<double> &v) {
  bool uniform = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  std::ostringstream s;
  s << std::setprecision(17);
  if (uniform) {
    s << v.front();
    return s.str();
  }
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ";" : "") << v[i];
  return s.str();
}

int cmd_bench_list(std::ostream &out) {
  out << "id,name,dim,lower,upper,category,fe_limit\n";
  for (const auto &f : suite())
    out << function_label(f.id) << ',' << f.name << ',' << f.dim << ',' << join_bounds(f.lower)
        << ',' << join_bounds(f.upper) << ',' << category_label(f.category) << ',' << f.fe_limit
        << '\n';
  return kExitOk;
}

} // namespace

int main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Chemical reaction optimisation with selectable perturbation laws", "cro"};
  app.require_subcommand(1);

  auto *run = app.add_subcommand("run", "Run one (function, distribution) cell set");
  SettingFlags run_flags;
  run_flags.attach(*run);
  bool run_no_timing = false;
  std::size_t run_max_cells = 0;
  run->add_flag("--no-timing", run_no_timing, "Write wall_ms as 0 for byte-reproducible output");
  run->add_option("--max-cells", run_max_cells, "Stop after this many new runs (resume later)");

  auto *suite_cmd = app.add_subcommand("suite", "Run the variant x function comparison");
  SettingFlags suite_flags;
  suite_flags.attach(*suite_cmd);
  std::string functions_sel, variants_sel;
  bool suite_no_timing = false;
  std::size_t suite_max_cells = 0;
  suite_cmd->add_option("--functions", functions_sel, "e.g. f1..f7,f9");
  suite_cmd->add_option("--variants", variants_sel, "e.g. gaussian,cauchy or G,C");
  suite_cmd->add_flag("--no-timing", suite_no_timing, "Write wall_ms as 0 for byte-reproducible output");
  suite_cmd->add_option("--max-cells", suite_max_cells, "Stop after this many new runs (resume later)");

  auto *sample_cmd = app.add_subcommand("sample", "Emit perturbation variates, one per line");
  std::string s_dist;
  double s_scale = 1.0;
  long long s_n = 1;
  std::uint64_t s_seed = 0;
  std::string s_out;
  sample_cmd->add_option("--distribution", s_dist)->required();
  sample_cmd->add_option("--scale", s_scale);
  sample_cmd->add_option("--n", s_n);
  sample_cmd->add_option("--seed", s_seed);
  sample_cmd->add_option("--out", s_out, "Output file (default stdout)");

  auto *pdf_cmd = app.add_subcommand("pdf", "Tabulate a density as x,pdf CSV");
  PdfArgs pa;
  pdf_cmd->add_option("--distribution", pa.distribution,
                      "gaussian|cauchy|exponential|exponential-onesided|rayleigh|rayleigh-modified")
      ->required();
  pdf_cmd->add_option("--location,--mu,--x0", pa.location);
  pdf_cmd->add_option("--sigma2", pa.sigma2);
  pdf_cmd->add_option("--gamma", pa.gamma);
  pdf_cmd->add_option("--from", pa.from);
  pdf_cmd->add_option("--to", pa.to);
  pdf_cmd->add_option("--steps", pa.steps);
  pdf_cmd->add_option("--out", pa.out);

  auto *bench = app.add_subcommand("bench", "Inspect the benchmark suite");
  bench->require_subcommand(1);
  auto *bench_list = bench->add_subcommand("list", "Print the benchmark table as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto opt = [](std::size_t v) { return v ? std::optional<std::size_t>(v) : std::nullopt; };
  try {
    if (*run) return cmd_run(out, run_flags, run_no_timing, opt(run_max_cells));
    if (*suite_cmd)
      return cmd_suite(out, suite_flags, functions_sel, variants_sel, suite_no_timing,
                       opt(suite_max_cells));
    if (*sample_cmd) return cmd_sample(out, s_dist, s_scale, s_n, s_seed, s_out);
    if (*pdf_cmd) return cmd_pdf(out, pa);
    if (*bench_list) return cmd_bench_list(out);
  } catch (const UsageError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument &e) { // includes ConfigError
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

} // namespace cro::cli
