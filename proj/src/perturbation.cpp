#include "cro/perturbation.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace cro {

namespace {

void require_positive(double v, const char *what) {
  if (!(v > 0.0)) throw std::domain_error(std::string(what) + " must be positive");
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Rayleigh branch of the modified law, shifted left by sigma.
double shifted_rayleigh(double t, double sigma) {
  return t / (sigma * sigma) * std::exp(-(t * t) / (2.0 * sigma * sigma));
}

} // namespace

std::string_view variant_tag(Distribution d) noexcept {
  switch (d) {
  case Distribution::Gaussian: return "G";
  case Distribution::Cauchy: return "C";
  case Distribution::ExponentialMirrored: return "E";
  case Distribution::ModifiedRayleigh: return "R";
  }
  return "?";
}

std::string variant_name(Distribution d) { return "CRO_" + std::string(variant_tag(d)); }

std::string_view distribution_name(Distribution d) noexcept {
  switch (d) {
  case Distribution::Gaussian: return "gaussian";
  case Distribution::Cauchy: return "cauchy";
  case Distribution::ExponentialMirrored: return "exponential";
  case Distribution::ModifiedRayleigh: return "rayleigh-modified";
  }
  return "?";
}

std::optional<Distribution> parse_distribution(std::string_view text) {
  const std::string s = lower(text);
  for (auto d : kAllDistributions) {
    if (s == distribution_name(d) || s == lower(variant_tag(d)) || s == lower(variant_name(d)))
      return d;
  }
  if (s == "normal") return Distribution::Gaussian;
  if (s == "exponential-mirrored") return Distribution::ExponentialMirrored;
  if (s == "modified-rayleigh") return Distribution::ModifiedRayleigh;
  return std::nullopt;
}

double pdf_gaussian(double x, double mu, double sigma2) {
  require_positive(sigma2, "sigma2");
  const double d = x - mu;
  return std::exp(-(d * d) / (2.0 * sigma2)) / std::sqrt(2.0 * std::numbers::pi * sigma2);
}

double pdf_cauchy(double x, double x0, double gamma) {
  require_positive(gamma, "gamma");
  const double d = x - x0;
  return gamma / (d * d + gamma * gamma) / std::numbers::pi;
}

double pdf_exponential_mirrored(double x, double gamma) {
  require_positive(gamma, "gamma");
  return 0.5 * gamma * std::exp(-gamma * std::abs(x));
}

double pdf_rayleigh(double x, double sigma2) {
  require_positive(sigma2, "sigma2");
  if (x < 0.0) return 0.0;
  return x / sigma2 * std::exp(-(x * x) / (2.0 * sigma2));
}

int step(double x, double sigma) noexcept { return x >= sigma ? 1 : 0; }

double pdf_modified_rayleigh(double x, double sigma2) {
  require_positive(sigma2, "sigma2");
  const double sigma = std::sqrt(sigma2);
  const double right = shifted_rayleigh(sigma + x, sigma) * step(x, -sigma);
  const double left = shifted_rayleigh(sigma - x, sigma) * (1 - step(x, sigma));
  return (right + left) / 2.0;
}

double pdf(const PerturbationSpec &spec, double x) {
  spec.validate();
  const double s = spec.scale;
  const double t = x - spec.location;
  switch (spec.kind) {
  case Distribution::Gaussian: return pdf_gaussian(t, 0.0, s * s);
  case Distribution::Cauchy: return pdf_cauchy(t, 0.0, s);
  case Distribution::ExponentialMirrored: return pdf_exponential_mirrored(t, 1.0 / s);
  case Distribution::ModifiedRayleigh: return pdf_modified_rayleigh(t, s * s);
  }
  return 0.0;
}

double cdf(const PerturbationSpec &spec, double x) {
  spec.validate();
  const double s = spec.scale;
  const double t = x - spec.location;
  switch (spec.kind) {
  case Distribution::Gaussian: return 0.5 * std::erfc(-t / (s * std::numbers::sqrt2));
  case Distribution::Cauchy: return 0.5 + std::atan(t / s) / std::numbers::pi;
  case Distribution::ExponentialMirrored:
    return t < 0.0 ? 0.5 * std::exp(t / s) : 1.0 - 0.5 * std::exp(-t / s);
  case Distribution::ModifiedRayleigh: {
    // Mixture of (R - s) and (s - R), R ~ Rayleigh(s).
    const double up = t >= -s ? -std::expm1(-(t + s) * (t + s) / (2.0 * s * s)) : 0.0;
    const double down = t <= s ? std::exp(-(s - t) * (s - t) / (2.0 * s * s)) : 1.0;
    return 0.5 * (up + down);
  }
  }
  return 0.0;
}

double cauchy_quantile(double u, double x0, double gamma) noexcept {
  return x0 + gamma * std::tan(std::numbers::pi * (u - 0.5));
}

double sample(const PerturbationSpec &spec, RandomSource &rng) {
  const double s = spec.scale;
  double eps = 0.0;
  switch (spec.kind) {
  case Distribution::Gaussian: {
    const double u1 = rng.uniform_open();
    const double u2 = rng.uniform();
    eps = s * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    break;
  }
  case Distribution::Cauchy:
    eps = cauchy_quantile(rng.uniform_open(), 0.0, s);
    break;
  case Distribution::ExponentialMirrored: {
    const double magnitude = -std::log(rng.uniform_open()) * s;
    eps = rng.uniform() < 0.5 ? -magnitude : magnitude;
    break;
  }
  case Distribution::ModifiedRayleigh: {
    const double r = s * std::sqrt(-2.0 * std::log(rng.uniform_open()));
    const double y = r - s;
    eps = rng.uniform() < 0.5 ? -y : y;
    break;
  }
  }
  return spec.location + eps;
}

} // namespace cro
