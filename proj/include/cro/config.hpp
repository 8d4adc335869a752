#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>

#include "cro/benchmarks.hpp"
#include "cro/engine.hpp"

namespace cro {

/// Every setting the CLI understands. Unset members fall back to the next
/// layer: command-line flag, then config file, then the function's preset.
struct RunSettings {
  std::optional<std::string> distribution;
  std::optional<std::string> function;
  std::optional<std::size_t> pop_size;
  std::optional<double> step_size;
  std::optional<double> en_buff;
  std::optional<double> ini_ke;
  std::optional<double> coll_rate;
  std::optional<double> loss_rate;
  std::optional<double> dec_thres;
  std::optional<double> syn_thres;
  std::optional<long long> fe_limit;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  std::optional<std::string> out_dir;

  /// Sets one key from its textual value. Throws ConfigError for unknown keys
  /// or unparsable values.
  void set(const std::string &key, const std::string &value);

  /// Fields set in `top` win over fields set here.
  RunSettings overlaid_by(const RunSettings &top) const;

  /// True when any engine parameter is set explicitly.
  bool overrides_parameters() const noexcept;
};

/// Parses flat `key = value` lines; `#` starts a comment.
RunSettings parse_config(std::istream &in, const std::string &origin = "<config>");
RunSettings load_config(const std::filesystem::path &path);

/// The function's preset with every explicitly set parameter applied.
Parameters resolve_parameters(const RunSettings &settings, FunctionId id);

} // namespace cro
