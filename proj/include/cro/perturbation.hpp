#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cro/random.hpp"

namespace cro {

enum class Distribution { Gaussian, Cauchy, ExponentialMirrored, ModifiedRayleigh };

/// Short variant tag used in reports: G, C, E, R.
std::string_view variant_tag(Distribution d) noexcept;
/// Report name: CRO_G, CRO_C, CRO_E, CRO_R.
std::string variant_name(Distribution d);
/// CLI spelling: gaussian, cauchy, exponential, rayleigh-modified.
std::string_view distribution_name(Distribution d) noexcept;
/// Accepts the CLI spelling, the variant name (CRO_G) or the bare tag (G).
std::optional<Distribution> parse_distribution(std::string_view text);

inline constexpr Distribution kAllDistributions[] = {
    Distribution::Gaussian, Distribution::Cauchy, Distribution::ExponentialMirrored,
    Distribution::ModifiedRayleigh};

/// Perturbation law. `scale` is the engine step size; see sample() for how it
/// maps onto each distribution's own parameter.
struct PerturbationSpec {
  Distribution kind = Distribution::Gaussian;
  double scale = 1.0;
  double location = 0.0;

  void validate() const {
    if (!(scale > 0.0)) throw std::domain_error("perturbation scale must be positive");
  }
};

// Densities. All throw std::domain_error on a non-positive scale parameter.
double pdf_gaussian(double x, double mu, double sigma2);
double pdf_cauchy(double x, double x0, double gamma);
/// (gamma/2) exp(-gamma |x|): the one-sided exponential halved and reflected.
double pdf_exponential_mirrored(double x, double gamma);
/// Plain Rayleigh density, zero for x < 0.
double pdf_rayleigh(double x, double sigma2);
/// 1 if x >= sigma, else 0.
int step(double x, double sigma) noexcept;
/// Rayleigh shifted left by sigma, mirrored about the origin and averaged.
double pdf_modified_rayleigh(double x, double sigma2);

/// Density of the perturbation law of `spec` (location honoured).
double pdf(const PerturbationSpec &spec, double x);
/// Cumulative distribution of the perturbation law, closed form for all four.
double cdf(const PerturbationSpec &spec, double x);

/// Cauchy quantile x0 + gamma tan(pi (u - 1/2)).
double cauchy_quantile(double u, double x0, double gamma) noexcept;

/// Draws one perturbation factor.
///
/// Scale mapping: Gaussian sigma = scale, Cauchy gamma = scale, mirrored
/// exponential rate = 1/scale (so E|eps| = scale), Rayleigh sigma = scale.
///
/// Uniform consumption per call: Gaussian 2, Cauchy 1, exponential 2,
/// modified Rayleigh 2.
double sample(const PerturbationSpec &spec, RandomSource &rng);

} // namespace cro
