#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cro/random.hpp"

namespace cro {

/// Benchmark function id, 1..23.
enum class FunctionId : int {};

constexpr FunctionId fid(int n) noexcept { return static_cast<FunctionId>(n); }
constexpr int index_of(FunctionId id) noexcept { return static_cast<int>(id); }

enum class Category { Unimodal = 1, HighDimMultimodal = 2, LowDimMultimodal = 3 };

/// "I", "II" or "III".
std::string_view category_label(Category c) noexcept;
std::optional<Category> parse_category(std::string_view text);

struct BenchmarkFunction {
  FunctionId id;
  std::string name;
  std::size_t dim;
  std::vector<double> lower;
  std::vector<double> upper;
  Category category;
  double known_min;
  /// Published minimiser; empty when none is tabulated.
  std::vector<double> argmin;
  long long fe_limit;

  bool contains(std::span<const double> x) const noexcept;
};

/// "f7" style label.
std::string function_label(FunctionId id);
/// Accepts "f7", "F7" or "7".
std::optional<FunctionId> parse_function(std::string_view text);
/// Parses a comma separated list of ids and ranges, e.g. "f1..f7,f9,f14-f16".
std::vector<FunctionId> parse_function_list(std::string_view text);

/// All 23 descriptors in order f1..f23.
const std::vector<BenchmarkFunction> &suite();
const BenchmarkFunction &function(FunctionId id);
Category category_of(FunctionId id);
long long fe_limit(FunctionId id);

/// Evaluates the objective. Throws std::invalid_argument when x has the wrong
/// length. f7 adds uniform [0,1) noise drawn from `noise`; with no source the
/// noise term is omitted.
double evaluate(FunctionId id, std::span<const double> x, RandomSource *noise = nullptr);

/// Process-wide count of evaluate() calls whose input lay outside the box.
std::uint64_t out_of_bounds_evaluations() noexcept;

} // namespace cro
