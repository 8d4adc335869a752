#include "cro/experiment.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cro {

namespace {

int variant_order(Distribution d) { return static_cast<int>(d); }

std::uint64_t combine(std::uint64_t h, std::uint64_t v) { return mix64(h ^ mix64(v)); }
std::uint64_t combine(std::uint64_t h, double v) { return combine(h, std::bit_cast<std::uint64_t>(v)); }

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T> std::optional<T> parse_int(const std::string &s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(const std::string &s) {
  if (s.empty()) return std::nullopt;
  double v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<Distribution> parse_variant(const std::string &s) {
  for (auto d : kAllDistributions)
    if (s == variant_name(d)) return d;
  return std::nullopt;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  auto [p, ec] = std::to_chars(buf, buf + 16, v, 16);
  return std::string(buf, p);
}

struct CellKey {
  int function;
  int variant;
  int run;
  auto operator<=>(const CellKey &) const = default;
};

CellKey key_of(const RunRecord &r) { return {index_of(r.function), variant_order(r.variant), r.run}; }

std::ofstream open_for_write(const std::filesystem::path &path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

// Loads an existing journal, dropping a truncated trailing line.
std::vector<RunRecord> load_journal(const std::filesystem::path &path, std::uint64_t fingerprint) {
  std::vector<RunRecord> out;
  if (!std::filesystem::exists(path)) return out;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read journal '" + path.string() + "'");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  const std::string expected = "# plan " + hex(fingerprint);
  std::size_t pos = 0;
  std::size_t good_end = 0;
  bool seen_plan = false;
  while (pos < content.size()) {
    const auto nl = content.find('\n', pos);
    if (nl == std::string::npos) break; // unterminated tail: interrupted write
    const std::string line = content.substr(pos, nl - pos);
    pos = nl + 1;
    if (!seen_plan) {
      if (line != expected)
        throw ConfigError("journal '" + path.string() +
                          "' belongs to a different plan; use a fresh output directory");
      seen_plan = true;
    } else if (line != kRecordHeader) {
      auto rec = parse_record(line);
      if (!rec) break;
      out.push_back(*rec);
    }
    good_end = pos;
  }
  if (good_end < content.size()) std::filesystem::resize_file(path, good_end);
  return out;
}

} // namespace

std::vector<FunctionId> ExperimentPlan::all_functions() {
  std::vector<FunctionId> v;
  for (int n = 1; n <= 23; ++n) v.push_back(fid(n));
  return v;
}

Parameters ExperimentPlan::parameters_for(FunctionId id) const {
  if (auto it = overrides.find(id); it != overrides.end()) return it->second;
  return Parameters::preset(id);
}

long long ExperimentPlan::fe_limit_for(FunctionId id) const {
  if (auto it = fe_overrides.find(id); it != fe_overrides.end()) return it->second;
  return fe_limit(id);
}

void ExperimentPlan::validate() const {
  if (variants.empty()) throw ConfigError("plan has no variants");
  if (functions.empty()) throw ConfigError("plan has no functions");
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  for (auto f : functions) {
    if (index_of(f) < 1 || index_of(f) > 23)
      throw ConfigError("unknown function id " + std::to_string(index_of(f)));
    const auto p = parameters_for(f);
    p.validate();
    if (fe_limit_for(f) < static_cast<long long>(p.pop_size))
      throw ConfigError("fe_limit for " + function_label(f) + " is below pop_size");
  }
}

std::uint64_t ExperimentPlan::fingerprint() const {
  std::uint64_t h = hash_tag("cro-plan-v1");
  h = combine(h, master_seed);
  h = combine(h, static_cast<std::uint64_t>(runs));
  h = combine(h, static_cast<std::uint64_t>(record_timing));
  for (auto v : variants) h = combine(h, hash_tag(variant_tag(v)));
  for (auto f : functions) {
    h = combine(h, static_cast<std::uint64_t>(index_of(f)));
    const auto p = parameters_for(f);
    h = combine(h, static_cast<std::uint64_t>(p.pop_size));
    for (double v : {p.step_size, p.en_buff, p.ini_ke, p.coll_rate, p.loss_rate, p.dec_thres,
                     p.syn_thres})
      h = combine(h, v);
    h = combine(h, static_cast<std::uint64_t>(fe_limit_for(f)));
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master_seed, Distribution variant, FunctionId function,
                          int run) noexcept {
  std::uint64_t h = mix64(master_seed);
  h = combine(h, hash_tag(variant_tag(variant)));
  h = combine(h, static_cast<std::uint64_t>(index_of(function)));
  h = combine(h, static_cast<std::uint64_t>(run));
  return h;
}

RunRecord run_cell(const ExperimentPlan &plan, Distribution variant, FunctionId function, int run) {
  const Parameters params = plan.parameters_for(function);
  const std::uint64_t seed = derive_seed(plan.master_seed, variant, function, run);
  Engine engine(params, cro::function(function), PerturbationSpec{variant, params.step_size, 0.0},
                seed);
  const auto result = engine.run(plan.fe_limit_for(function));
  return RunRecord{function, variant,         run,
                   seed,     result.best_value, result.fe_used,
                   plan.record_timing ? result.wall_ms : 0.0};
}

void sort_records(std::vector<RunRecord> &records) {
  std::sort(records.begin(), records.end(),
            [](const RunRecord &a, const RunRecord &b) { return key_of(a) < key_of(b); });
}

PlanProgress run_plan(const ExperimentPlan &plan,
                      const std::optional<std::filesystem::path> &journal,
                      std::optional<std::size_t> max_new_cells) {
  plan.validate();
  PlanProgress progress;

  std::set<CellKey> wanted;
  for (auto f : plan.functions)
    for (auto v : plan.variants)
      for (int r = 0; r < plan.runs; ++r) wanted.insert({index_of(f), variant_order(v), r});

  std::set<CellKey> done;
  std::ofstream sink;
  if (journal) {
    for (auto &rec : load_journal(*journal, plan.fingerprint())) {
      const auto k = key_of(rec);
      if (wanted.count(k) && done.insert(k).second) progress.records.push_back(rec);
    }
    const bool fresh = !std::filesystem::exists(*journal) || std::filesystem::file_size(*journal) == 0;
    sink = open_for_write(*journal, std::ios::app | std::ios::binary);
    if (fresh) sink << "# plan " << hex(plan.fingerprint()) << '\n' << kRecordHeader << '\n' << std::flush;
  }

  std::vector<CellKey> pending;
  for (const auto &k : wanted)
    if (!done.count(k)) pending.push_back(k);
  if (max_new_cells && pending.size() > *max_new_cells) pending.resize(*max_new_cells);

  const auto n = static_cast<std::ptrdiff_t>(pending.size());
  std::vector<RunRecord> fresh_records;
  fresh_records.reserve(pending.size());
  bool io_failed = false;

#pragma omp parallel for schedule(dynamic, 1) num_threads(plan.parallelism)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    const auto &k = pending[static_cast<std::size_t>(c)];
    const RunRecord rec =
        run_cell(plan, static_cast<Distribution>(k.variant), fid(k.function), k.run);
#pragma omp critical(cro_record_writer)
    {
      fresh_records.push_back(rec);
      if (journal) {
        sink << format_record(rec) << '\n' << std::flush;
        if (!sink) io_failed = true;
      }
    }
  }
  if (io_failed) throw std::runtime_error("write to journal '" + journal->string() + "' failed");

  progress.executed = fresh_records.size();
  progress.records.insert(progress.records.end(), fresh_records.begin(), fresh_records.end());
  sort_records(progress.records);
  progress.complete = progress.records.size() == wanted.size();
  return progress;
}

std::vector<RunRecord> run_plan_serial(const ExperimentPlan &plan) {
  plan.validate();
  std::vector<RunRecord> out;
  for (auto f : plan.functions)
    for (auto v : plan.variants)
      for (int r = 0; r < plan.runs; ++r) out.push_back(run_cell(plan, v, f, r));
  sort_records(out);
  return out;
}

std::vector<int> competition_ranks(const std::vector<double> &means) {
  std::vector<int> ranks(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    int better = 0;
    for (double m : means)
      if (m < means[i]) ++better;
    ranks[i] = better + 1;
  }
  return ranks;
}

void rank_variants(std::vector<SummaryRow> &rows) {
  std::vector<double> means;
  for (const auto &r : rows) means.push_back(r.mean);
  const auto ranks = competition_ranks(means);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = ranks[i];
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord> &records,
                                  const std::vector<FunctionId> &functions,
                                  const std::vector<Distribution> &variants, int runs) {
  std::map<CellKey, double> values;
  for (const auto &r : records) values[key_of(r)] = r.best;

  std::vector<std::string> gaps;
  std::vector<SummaryRow> out;
  for (auto f : functions) {
    std::vector<SummaryRow> group;
    for (auto v : variants) {
      // Fixed summation order (by run index) makes the result independent of
      // record order.
      std::vector<double> xs;
      for (int r = 0; r < runs; ++r) {
        auto it = values.find({index_of(f), variant_order(v), r});
        if (it == values.end()) {
          gaps.push_back(function_label(f) + "/" + variant_name(v) + "/run" + std::to_string(r));
          continue;
        }
        xs.push_back(it->second);
      }
      if (xs.size() != static_cast<std::size_t>(runs)) continue;
      double sum = 0.0;
      for (double x : xs) sum += x;
      const double mean = sum / static_cast<double>(xs.size());
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      const double sd = std::sqrt(ss / static_cast<double>(xs.size()));
      const double best = *std::min_element(xs.begin(), xs.end());
      group.push_back(SummaryRow{f, v, mean, sd, best, 0});
    }
    rank_variants(group);
    out.insert(out.end(), group.begin(), group.end());
  }
  if (!gaps.empty()) {
    std::string msg = "incomplete results: " + std::to_string(gaps.size()) + " missing cell(s):";
    const std::size_t shown = std::min<std::size_t>(gaps.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) msg += " " + gaps[i];
    if (shown < gaps.size()) msg += " ...";
    throw IncompleteError(msg);
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord> &records) {
  std::set<int> fs, vs;
  int max_run = -1;
  for (const auto &r : records) {
    fs.insert(index_of(r.function));
    vs.insert(variant_order(r.variant));
    max_run = std::max(max_run, r.run);
  }
  std::vector<FunctionId> functions;
  for (int f : fs) functions.push_back(fid(f));
  std::vector<Distribution> variants;
  for (int v : vs) variants.push_back(static_cast<Distribution>(v));
  return summarize(records, functions, variants, max_run + 1);
}

std::vector<CategoryRank> category_ranks(const std::vector<SummaryRow> &rows) {
  std::map<std::pair<int, int>, std::pair<int, int>> acc; // (category, variant) -> (sum, count)
  for (const auto &r : rows) {
    auto &a = acc[{static_cast<int>(category_of(r.function)), variant_order(r.variant)}];
    a.first += r.rank;
    a.second += 1;
  }
  std::vector<CategoryRank> out;
  for (const auto &[key, a] : acc)
    out.push_back(CategoryRank{static_cast<Category>(key.first),
                               static_cast<Distribution>(key.second),
                               static_cast<double>(a.first) / static_cast<double>(a.second)});
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, p);
}

std::string format_record(const RunRecord &r) {
  std::string s = function_label(r.function);
  s += ',' + variant_name(r.variant);
  s += ',' + std::to_string(r.run);
  s += ',' + std::to_string(r.seed);
  s += ',' + format_number(r.best);
  s += ',' + std::to_string(r.fe_used);
  s += ',' + format_number(r.wall_ms);
  return s;
}

std::optional<RunRecord> parse_record(const std::string &line) {
  const auto f = split_csv(line);
  if (f.size() != 7) return std::nullopt;
  auto function = parse_function(f[0]);
  auto variant = parse_variant(f[1]);
  auto run = parse_int<int>(f[2]);
  auto seed = parse_int<std::uint64_t>(f[3]);
  auto best = parse_double(f[4]);
  auto fe = parse_int<long long>(f[5]);
  auto wall = parse_double(f[6]);
  if (!function || !variant || !run || !seed || !best || !fe || !wall) return std::nullopt;
  return RunRecord{*function, *variant, *run, *seed, *best, *fe, *wall};
}

void write_records(const std::filesystem::path &path, const std::vector<RunRecord> &records) {
  auto out = open_for_write(path, std::ios::trunc | std::ios::binary);
  out << kRecordHeader << '\n';
  for (const auto &r : records) out << format_record(r) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<RunRecord> read_records(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::string line;
  std::vector<RunRecord> out;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line == kRecordHeader) continue;
    auto rec = parse_record(line);
    if (!rec)
      throw std::runtime_error("malformed record at '" + path.string() + "' line " +
                               std::to_string(lineno));
    out.push_back(*rec);
  }
  return out;
}

void write_summary(const std::filesystem::path &path, const std::vector<SummaryRow> &rows,
                   const std::vector<CategoryRank> &categories) {
  auto out = open_for_write(path, std::ios::trunc | std::ios::binary);
  out << kSummaryHeader << '\n';
  for (const auto &r : rows)
    out << function_label(r.function) << ',' << variant_name(r.variant) << ','
        << format_number(r.mean) << ',' << format_number(r.std_dev) << ','
        << format_number(r.best) << ',' << r.rank << '\n';
  if (!categories.empty()) {
    out << kCategoryHeader << '\n';
    for (const auto &c : categories)
      out << category_label(c.category) << ',' << variant_name(c.variant) << ','
          << format_number(c.avg_rank) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

SummaryFile read_summary(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  SummaryFile file;
  std::string line;
  bool categories = false;
  std::size_t lineno = 0;
  auto bad = [&] {
    return std::runtime_error("malformed summary at '" + path.string() + "' line " +
                              std::to_string(lineno));
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == kSummaryHeader) continue;
    if (line == kCategoryHeader) {
      categories = true;
      continue;
    }
    const auto f = split_csv(line);
    if (!categories) {
      if (f.size() != 6) throw bad();
      auto fn = parse_function(f[0]);
      auto v = parse_variant(f[1]);
      auto mean = parse_double(f[2]), sd = parse_double(f[3]), best = parse_double(f[4]);
      auto rank = parse_int<int>(f[5]);
      if (!fn || !v || !mean || !sd || !best || !rank) throw bad();
      file.rows.push_back(SummaryRow{*fn, *v, *mean, *sd, *best, *rank});
    } else {
      if (f.size() != 3) throw bad();
      auto c = parse_category(f[0]);
      auto v = parse_variant(f[1]);
      auto avg = parse_double(f[2]);
      if (!c || !v || !avg) throw bad();
      file.categories.push_back(CategoryRank{*c, *v, *avg});
    }
  }
  return file;
}

} // namespace cro
