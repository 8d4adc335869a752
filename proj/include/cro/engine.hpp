#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cro/benchmarks.hpp"
#include "cro/perturbation.hpp"
#include "cro/random.hpp"

namespace cro {

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// CRO control parameters.
struct Parameters {
  std::size_t pop_size = 10;
  double step_size = 0.1;
  double en_buff = 1e6;
  double ini_ke = 1e3;
  double coll_rate = 0.2;
  double loss_rate = 0.9;
  double dec_thres = 1.5e5;
  double syn_thres = 0.0;

  /// Category preset without per-function exceptions.
  static Parameters preset(Category category);
  /// Category preset plus the per-function step sizes (300 for f8, 15 for f11).
  static Parameters preset(FunctionId id);

  /// Throws ConfigError on an invalid combination.
  void validate() const;

  friend bool operator==(const Parameters &, const Parameters &) = default;
};

struct Molecule {
  std::vector<double> omega;
  double pe = 0.0;
  double ke = 0.0;
  long long num_hit = 0;
  std::vector<double> min_struct;
  double min_pe = 0.0;
  long long min_hit = 0;

  static Molecule fresh(std::vector<double> omega, double pe, double ke);

  friend bool operator==(const Molecule &, const Molecule &) = default;
};

enum class Reaction { OnWall, Decomposition, Intermolecular, Synthesis };

struct ReactionOutcome {
  Reaction kind;
  bool accepted;
  int evaluations;
};

/// Pure energy bookkeeping for each elementary reaction. Each returns nullopt
/// when the energy condition rejects the reaction.
namespace energy {

struct OnWall {
  double ke;
  double buffer_gain;
};
/// Accept iff pe + ke >= pe_new; then q = pe - pe_new + ke, ke' = q t and the
/// buffer receives q (1 - t).
std::optional<OnWall> on_wall(double pe, double ke, double pe_new, double t) noexcept;

struct Split {
  double ke1;
  double ke2;
  double buffer;
};
/// Surplus split for a self-sufficient decomposition (surplus >= 0).
Split split_surplus(double surplus, double k, double buffer) noexcept;
/// Buffer-assisted decomposition. Rejects when surplus + buffer < 0.
std::optional<Split> buffer_assisted(double surplus, double buffer,
                                     std::array<double, 4> m) noexcept;

/// Accept iff the total (pe1 + pe2 + ke1 + ke2) covers pe1_new + pe2_new.
std::optional<std::pair<double, double>> intermolecular(double pe1, double ke1, double pe2,
                                                        double ke2, double pe1_new,
                                                        double pe2_new, double k) noexcept;

/// Accept iff pe1 + pe2 + ke1 + ke2 >= pe_new; returns the child's KE.
std::optional<double> synthesis(double pe1, double ke1, double pe2, double ke2,
                                double pe_new) noexcept;

} // namespace energy

/// Maps v into [lo, hi] by one reflection about the violated bound, then clamps.
double reflect_into(double v, double lo, double hi) noexcept;

/// Copy of omega with coordinate `index` moved by eps and reflected into bounds.
std::vector<double> perturb_coordinate(std::span<const double> omega, std::size_t index,
                                       double eps, std::span<const double> lower,
                                       std::span<const double> upper);

struct RunResult {
  double best_value;
  std::vector<double> best_struct;
  long long fe_used;
  double wall_ms;
};

struct TracePoint {
  long long fe_used;
  double best_value;
};

struct ReactionCounts {
  std::array<long long, 4> attempted{};
  std::array<long long, 4> accepted{};
};

/// One CRO run. The whole trajectory is a pure function of
/// (parameters, problem, perturbation, seed). Not thread-safe; one owner.
class Engine {
public:
  /// Builds pop_size molecules uniformly in bounds. Throws ConfigError when the
  /// parameters are invalid.
  Engine(const Parameters &params, const BenchmarkFunction &problem, PerturbationSpec perturbation,
         std::uint64_t seed);

  /// One uniformly chosen coordinate of omega moved by a fresh perturbation.
  std::vector<double> neighbor(std::span<const double> omega);

  ReactionOutcome on_wall(std::size_t i);
  ReactionOutcome decomposition(std::size_t i);
  ReactionOutcome intermolecular(std::size_t i, std::size_t j);
  ReactionOutcome synthesis(std::size_t i, std::size_t j);

  /// Chooses a reaction and its reactants, then performs it.
  ReactionOutcome select_and_react();

  using Observer = std::function<void(const Engine &, const ReactionOutcome &)>;

  /// Reacts until fe_used >= fe_limit. The last reaction always completes, so
  /// fe_used may exceed the limit by one. `trace_stride` > 0 records
  /// (fe_used, best) every time another stride of evaluations has elapsed.
  RunResult run(long long fe_limit, const Observer &observer = {}, long long trace_stride = 0);

  /// Sum of PE + KE over the population plus the buffer.
  double total_energy() const noexcept;

  const std::vector<Molecule> &molecules() const noexcept { return molecules_; }
  double buffer() const noexcept { return buffer_; }
  double best_value() const noexcept { return best_value_; }
  const std::vector<double> &best_struct() const noexcept { return best_struct_; }
  long long fe_used() const noexcept { return fe_used_; }
  const Parameters &parameters() const noexcept { return params_; }
  const PerturbationSpec &perturbation() const noexcept { return perturbation_; }
  const BenchmarkFunction &problem() const noexcept { return *problem_; }
  const std::vector<TracePoint> &trace() const noexcept { return trace_; }
  const ReactionCounts &reaction_counts() const noexcept { return counts_; }
  RandomSource &rng() noexcept { return rng_; }

  /// Test hooks: overwrite a molecule or the buffer directly.
  Molecule &molecule(std::size_t i) { return molecules_.at(i); }
  void set_buffer(double b) noexcept { buffer_ = b; }

  /// Equality of the full search state, including the random stream.
  bool same_state(const Engine &other) const;

private:
  double evaluate(std::span<const double> x);
  void touch(Molecule &m, bool improved_pe) const;
  void record(Reaction r, bool accepted) noexcept;

  Parameters params_;
  const BenchmarkFunction *problem_;
  PerturbationSpec perturbation_;
  RandomSource rng_;
  std::vector<Molecule> molecules_;
  double buffer_ = 0.0;
  double best_value_;
  std::vector<double> best_struct_;
  long long fe_used_ = 0;
  std::vector<TracePoint> trace_;
  ReactionCounts counts_;
};

std::string_view reaction_name(Reaction r) noexcept;

} // namespace cro
