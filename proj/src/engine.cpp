#include "cro/engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace cro {

Parameters Parameters::preset(Category category) {
  switch (category) {
  case Category::Unimodal: return Parameters{10, 0.1, 1e6, 1e3, 0.2, 0.9, 1.5e5, 0.0};
  case Category::HighDimMultimodal: return Parameters{20, 1.0, 1e5, 1e7, 0.2, 0.1, 1.5e5, 10.0};
  case Category::LowDimMultimodal: return Parameters{100, 0.5, 0.0, 1e3, 0.2, 0.1, 500.0, 10.0};
  }
  throw ConfigError("unknown category");
}

Parameters Parameters::preset(FunctionId id) {
  Parameters p = preset(category_of(id));
  if (index_of(id) == 8) p.step_size = 300.0;
  if (index_of(id) == 11) p.step_size = 15.0;
  return p;
}

void Parameters::validate() const {
  if (pop_size < 1) throw ConfigError("pop_size must be at least 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("step_size must be positive");
  if (!(en_buff >= 0.0)) throw ConfigError("en_buff must be non-negative");
  if (!(ini_ke >= 0.0)) throw ConfigError("ini_ke must be non-negative");
  if (!(coll_rate >= 0.0 && coll_rate <= 1.0)) throw ConfigError("coll_rate must lie in [0,1]");
  if (!(loss_rate >= 0.0 && loss_rate <= 1.0)) throw ConfigError("loss_rate must lie in [0,1]");
  if (!(dec_thres >= 0.0)) throw ConfigError("dec_thres must be non-negative");
  if (!(syn_thres >= 0.0)) throw ConfigError("syn_thres must be non-negative");
}

Molecule Molecule::fresh(std::vector<double> omega, double pe, double ke) {
  Molecule m;
  m.min_struct = omega;
  m.omega = std::move(omega);
  m.pe = pe;
  m.ke = ke;
  m.min_pe = pe;
  return m;
}

namespace energy {

std::optional<OnWall> on_wall(double pe, double ke, double pe_new, double t) noexcept {
  if (pe + ke < pe_new) return std::nullopt;
  const double q = pe - pe_new + ke;
  const double kept = q * t;
  return OnWall{kept, q - kept};
}

Split split_surplus(double surplus, double k, double buffer) noexcept {
  const double ke1 = surplus * k;
  return Split{ke1, surplus - ke1, buffer};
}

std::optional<Split> buffer_assisted(double surplus, double buffer,
                                     std::array<double, 4> m) noexcept {
  const double pool = surplus + buffer;
  if (pool < 0.0) return std::nullopt;
  const double ke1 = pool * m[0] * m[1];
  const double ke2 = (pool - ke1) * m[2] * m[3];
  return Split{ke1, ke2, pool - ke1 - ke2};
}

std::optional<std::pair<double, double>> intermolecular(double pe1, double ke1, double pe2,
                                                        double ke2, double pe1_new,
                                                        double pe2_new, double k) noexcept {
  const double surplus = (pe1 + pe2 + ke1 + ke2) - (pe1_new + pe2_new);
  if (surplus < 0.0) return std::nullopt;
  const double a = surplus * k;
  return std::pair{a, surplus - a};
}

std::optional<double> synthesis(double pe1, double ke1, double pe2, double ke2,
                                double pe_new) noexcept {
  const double total = pe1 + pe2 + ke1 + ke2;
  if (total < pe_new) return std::nullopt;
  return total - pe_new;
}

} // namespace energy

double reflect_into(double v, double lo, double hi) noexcept {
  if (v > hi) v = hi - (v - hi);
  else if (v < lo) v = lo + (lo - v);
  if (v > hi) v = hi;
  if (v < lo) v = lo;
  return v;
}

std::vector<double> perturb_coordinate(std::span<const double> omega, std::size_t index,
                                       double eps, std::span<const double> lower,
                                       std::span<const double> upper) {
  std::vector<double> out(omega.begin(), omega.end());
  out[index] = reflect_into(out[index] + eps, lower[index], upper[index]);
  return out;
}

std::string_view reaction_name(Reaction r) noexcept {
  switch (r) {
  case Reaction::OnWall: return "on_wall";
  case Reaction::Decomposition: return "decomposition";
  case Reaction::Intermolecular: return "intermolecular";
  case Reaction::Synthesis: return "synthesis";
  }
  return "?";
}

Engine::Engine(const Parameters &params, const BenchmarkFunction &problem,
               PerturbationSpec perturbation, std::uint64_t seed)
    : params_(params), problem_(&problem), perturbation_(perturbation), rng_(seed),
      best_value_(std::numeric_limits<double>::infinity()) {
  params_.validate();
  try {
    perturbation_.validate();
  } catch (const std::domain_error &e) {
    throw ConfigError(e.what());
  }
  buffer_ = params_.en_buff;
  molecules_.reserve(params_.pop_size);
  for (std::size_t n = 0; n < params_.pop_size; ++n) {
    std::vector<double> omega(problem.dim);
    for (std::size_t d = 0; d < problem.dim; ++d)
      omega[d] = rng_.uniform(problem.lower[d], problem.upper[d]);
    const double pe = evaluate(omega);
    molecules_.push_back(Molecule::fresh(std::move(omega), pe, params_.ini_ke));
  }
}

double Engine::evaluate(std::span<const double> x) {
  const double v = cro::evaluate(problem_->id, x, &rng_);
  ++fe_used_;
  if (v < best_value_) {
    best_value_ = v;
    best_struct_.assign(x.begin(), x.end());
  }
  return v;
}

void Engine::touch(Molecule &m, bool accepted) const {
  ++m.num_hit;
  if (accepted && m.pe < m.min_pe) {
    m.min_pe = m.pe;
    m.min_struct = m.omega;
    m.min_hit = m.num_hit;
  }
}

void Engine::record(Reaction r, bool accepted) noexcept {
  const auto k = static_cast<std::size_t>(r);
  ++counts_.attempted[k];
  if (accepted) ++counts_.accepted[k];
}

std::vector<double> Engine::neighbor(std::span<const double> omega) {
  const std::size_t index = rng_.index(omega.size());
  const double eps = sample(perturbation_, rng_);
  return perturb_coordinate(omega, index, eps, problem_->lower, problem_->upper);
}

ReactionOutcome Engine::on_wall(std::size_t i) {
  Molecule &m = molecules_.at(i);
  auto candidate = neighbor(m.omega);
  const double pe_new = evaluate(candidate);
  const double t = rng_.uniform(params_.loss_rate, 1.0);
  const auto result = energy::on_wall(m.pe, m.ke, pe_new, t);
  if (result) {
    m.omega = std::move(candidate);
    m.pe = pe_new;
    m.ke = result->ke;
    buffer_ += result->buffer_gain;
  }
  touch(m, result.has_value());
  record(Reaction::OnWall, result.has_value());
  return {Reaction::OnWall, result.has_value(), 1};
}

ReactionOutcome Engine::decomposition(std::size_t i) {
  Molecule &m = molecules_.at(i);
  const std::size_t dim = m.omega.size();
  auto make_child = [&] {
    std::vector<double> child = m.omega;
    bool any = false;
    for (std::size_t d = 0; d < dim; ++d) {
      if (rng_.coin()) {
        child[d] = reflect_into(child[d] + sample(perturbation_, rng_), problem_->lower[d],
                                problem_->upper[d]);
        any = true;
      }
    }
    if (!any) {
      const std::size_t d = rng_.index(dim);
      child[d] = reflect_into(child[d] + sample(perturbation_, rng_), problem_->lower[d],
                              problem_->upper[d]);
    }
    return child;
  };
  auto child1 = make_child();
  auto child2 = make_child();
  const double pe1 = evaluate(child1);
  const double pe2 = evaluate(child2);
  const double surplus = m.pe + m.ke - pe1 - pe2;

  std::optional<energy::Split> split;
  if (surplus >= 0.0) {
    split = energy::split_surplus(surplus, rng_.uniform(), buffer_);
  } else {
    std::array<double, 4> draws{};
    for (auto &d : draws) d = rng_.uniform();
    split = energy::buffer_assisted(surplus, buffer_, draws);
  }

  record(Reaction::Decomposition, split.has_value());
  if (!split) {
    touch(m, false);
    return {Reaction::Decomposition, false, 2};
  }
  buffer_ = split->buffer;
  molecules_[i] = Molecule::fresh(std::move(child1), pe1, split->ke1);
  molecules_.push_back(Molecule::fresh(std::move(child2), pe2, split->ke2));
  return {Reaction::Decomposition, true, 2};
}

ReactionOutcome Engine::intermolecular(std::size_t i, std::size_t j) {
  if (i == j) throw std::invalid_argument("intermolecular collision needs two distinct molecules");
  Molecule &a = molecules_.at(i);
  Molecule &b = molecules_.at(j);
  auto cand_a = neighbor(a.omega);
  auto cand_b = neighbor(b.omega);
  const double pe_a = evaluate(cand_a);
  const double pe_b = evaluate(cand_b);
  const double k = rng_.uniform();
  const auto result = energy::intermolecular(a.pe, a.ke, b.pe, b.ke, pe_a, pe_b, k);
  if (result) {
    a.omega = std::move(cand_a);
    a.pe = pe_a;
    a.ke = result->first;
    b.omega = std::move(cand_b);
    b.pe = pe_b;
    b.ke = result->second;
  }
  touch(a, result.has_value());
  touch(b, result.has_value());
  record(Reaction::Intermolecular, result.has_value());
  return {Reaction::Intermolecular, result.has_value(), 2};
}

ReactionOutcome Engine::synthesis(std::size_t i, std::size_t j) {
  if (i == j) throw std::invalid_argument("synthesis needs two distinct molecules");
  Molecule &a = molecules_.at(i);
  Molecule &b = molecules_.at(j);
  if (a.omega.size() != b.omega.size())
    throw std::invalid_argument("synthesis needs equal dimensionality");
  std::vector<double> child(a.omega.size());
  for (std::size_t d = 0; d < child.size(); ++d) child[d] = rng_.coin() ? b.omega[d] : a.omega[d];
  const double pe_new = evaluate(child);
  const auto ke = energy::synthesis(a.pe, a.ke, b.pe, b.ke, pe_new);
  record(Reaction::Synthesis, ke.has_value());
  if (!ke) {
    touch(a, false);
    touch(b, false);
    return {Reaction::Synthesis, false, 1};
  }
  molecules_[i] = Molecule::fresh(std::move(child), pe_new, *ke);
  molecules_.erase(molecules_.begin() + static_cast<std::ptrdiff_t>(j));
  return {Reaction::Synthesis, true, 1};
}

ReactionOutcome Engine::select_and_react() {
  const std::size_t n = molecules_.size();
  const double r = rng_.uniform();
  if (n == 1 || r > params_.coll_rate) {
    const std::size_t i = rng_.index(n);
    const Molecule &m = molecules_[i];
    if (static_cast<double>(m.num_hit - m.min_hit) > params_.dec_thres) return decomposition(i);
    return on_wall(i);
  }
  const std::size_t i = rng_.index(n);
  std::size_t j = rng_.index(n - 1);
  if (j >= i) ++j;
  if (molecules_[i].ke <= params_.syn_thres && molecules_[j].ke <= params_.syn_thres)
    return synthesis(i, j);
  return intermolecular(i, j);
}

RunResult Engine::run(long long fe_limit, const Observer &observer, long long trace_stride) {
  if (fe_limit < static_cast<long long>(params_.pop_size))
    throw ConfigError("fe_limit must be at least pop_size");
  const auto start = std::chrono::steady_clock::now();
  long long next_trace = trace_stride > 0 ? fe_used_ : std::numeric_limits<long long>::max();
  if (trace_stride > 0) {
    trace_.push_back({fe_used_, best_value_});
    next_trace += trace_stride;
  }
  while (fe_used_ < fe_limit) {
    const auto outcome = select_and_react();
    if (observer) observer(*this, outcome);
    while (fe_used_ >= next_trace) {
      trace_.push_back({fe_used_, best_value_});
      next_trace += trace_stride;
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return RunResult{best_value_, best_struct_, fe_used_, ms};
}

double Engine::total_energy() const noexcept {
  double total = buffer_;
  for (const auto &m : molecules_) total += m.pe + m.ke;
  return total;
}

bool Engine::same_state(const Engine &other) const {
  return params_ == other.params_ && problem_->id == other.problem_->id &&
         perturbation_.kind == other.perturbation_.kind &&
         perturbation_.scale == other.perturbation_.scale && rng_ == other.rng_ &&
         molecules_ == other.molecules_ && buffer_ == other.buffer_ &&
         best_value_ == other.best_value_ && best_struct_ == other.best_struct_ &&
         fe_used_ == other.fe_used_;
}

} // namespace cro
