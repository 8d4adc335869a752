#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cro/benchmarks.hpp"
#include "cro/engine.hpp"
#include "cro/perturbation.hpp"

namespace cro {

/// Raised when a summary is requested for cells that were never run.
class IncompleteError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ExperimentPlan {
  std::vector<Distribution> variants{std::begin(kAllDistributions), std::end(kAllDistributions)};
  std::vector<FunctionId> functions = all_functions();
  int runs = 100;
  std::uint64_t master_seed = 0;
  /// Full parameter replacement per function; absent functions use the preset.
  std::map<FunctionId, Parameters> overrides;
  /// FE budget replacement per function; absent functions use the standard limit.
  std::map<FunctionId, long long> fe_overrides;
  int parallelism = 1;
  /// When false, wall_ms is written as 0 so record files are byte-reproducible.
  bool record_timing = true;

  static std::vector<FunctionId> all_functions();

  Parameters parameters_for(FunctionId id) const;
  long long fe_limit_for(FunctionId id) const;
  /// Throws ConfigError on empty or invalid selections.
  void validate() const;
  /// Stable hash of everything that influences results.
  std::uint64_t fingerprint() const;
};

/// Per-run seed: a stable hash of (master seed, variant tag, function, run).
std::uint64_t derive_seed(std::uint64_t master_seed, Distribution variant, FunctionId function,
                          int run) noexcept;

struct RunRecord {
  FunctionId function;
  Distribution variant;
  int run;
  std::uint64_t seed;
  double best;
  long long fe_used;
  double wall_ms;

  friend bool operator==(const RunRecord &, const RunRecord &) = default;
};

struct SummaryRow {
  FunctionId function;
  Distribution variant;
  double mean;
  double std_dev;
  double best;
  int rank;

  friend bool operator==(const SummaryRow &, const SummaryRow &) = default;
};

struct CategoryRank {
  Category category;
  Distribution variant;
  double avg_rank;

  friend bool operator==(const CategoryRank &, const CategoryRank &) = default;
};

/// Executes one (variant, function, run) cell.
RunRecord run_cell(const ExperimentPlan &plan, Distribution variant, FunctionId function, int run);

/// Canonical ordering: function, then variant in G, C, E, R order, then run.
void sort_records(std::vector<RunRecord> &records);

struct PlanProgress {
  std::vector<RunRecord> records; ///< every completed cell, canonical order
  std::size_t executed = 0;       ///< cells computed in this call
  bool complete = false;
};

/// Runs every pending cell of the plan. With a journal path, finished cells
/// are appended to it one line at a time and cells already present are not
/// re-run. `max_new_cells` (when set) stops after that many new cells, which
/// is how chunked or interrupted execution is expressed. Cells are distributed
/// over `plan.parallelism` OpenMP threads; journal writes are serialised.
PlanProgress run_plan(const ExperimentPlan &plan,
                      const std::optional<std::filesystem::path> &journal = std::nullopt,
                      std::optional<std::size_t> max_new_cells = std::nullopt);

/// Single-threaded reference for run_plan without persistence.
std::vector<RunRecord> run_plan_serial(const ExperimentPlan &plan);

/// Competition ranks of `means` (lower is better, ties share the minimum rank).
std::vector<int> competition_ranks(const std::vector<double> &means);

/// Assigns `rank` on rows belonging to one function, by mean.
void rank_variants(std::vector<SummaryRow> &rows_for_one_function);

/// Mean, population std dev and best per (function, variant), ranked per
/// function. Throws IncompleteError naming the missing cells.
std::vector<SummaryRow> summarize(const std::vector<RunRecord> &records,
                                  const std::vector<FunctionId> &functions,
                                  const std::vector<Distribution> &variants, int runs);
/// Same, taking the scope from the records themselves.
std::vector<SummaryRow> summarize(const std::vector<RunRecord> &records);

/// Average rank of each variant over each category present in `rows`.
std::vector<CategoryRank> category_ranks(const std::vector<SummaryRow> &rows);

// CSV persistence. Numbers are written in scientific notation with 17
// significant digits, which round-trips exactly.
inline constexpr const char *kRecordHeader = "function,variant,run,seed,best,fe_used,wall_ms";
inline constexpr const char *kSummaryHeader = "function,variant,mean,std,best,rank";
inline constexpr const char *kCategoryHeader = "category,variant,avg_rank";

std::string format_number(double v);
std::string format_record(const RunRecord &r);
/// Parses one record line; nullopt for malformed or truncated input.
std::optional<RunRecord> parse_record(const std::string &line);

void write_records(const std::filesystem::path &path, const std::vector<RunRecord> &records);
std::vector<RunRecord> read_records(const std::filesystem::path &path);
void write_summary(const std::filesystem::path &path, const std::vector<SummaryRow> &rows,
                   const std::vector<CategoryRank> &categories);

struct SummaryFile {
  std::vector<SummaryRow> rows;
  std::vector<CategoryRank> categories;
};
SummaryFile read_summary(const std::filesystem::path &path);

} // namespace cro
