#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <memory>
#include <numeric>

#include "cro/perturbation.hpp"
#include "support/oracles.hpp"

using namespace cro;
using doctest::Approx;

TEST_CASE("gaussian density values") {
  CHECK(pdf_gaussian(0, 0, 1) == Approx(1.0 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-14));
  CHECK(pdf_gaussian(3, 3, 4) == Approx(1.0 / std::sqrt(8 * std::numbers::pi)).epsilon(1e-14));
  CHECK(pdf_gaussian(1, 0, 1) == Approx(0.24197072451914337).epsilon(1e-14));
  CHECK_THROWS_AS(pdf_gaussian(0, 0, 0), std::domain_error);
  CHECK_THROWS_AS(pdf_gaussian(0, 0, -1), std::domain_error);
}

TEST_CASE("cauchy density values") {
  CHECK(pdf_cauchy(0, 0, 1) == Approx(1.0 / std::numbers::pi).epsilon(1e-14));
  for (double x0 : {-2.0, 0.0, 3.5})
    for (double g : {0.1, 1.0, 7.0})
      CHECK(pdf_cauchy(x0 + g, x0, g) == Approx(1.0 / (2 * std::numbers::pi * g)).epsilon(1e-14));
  CHECK(pdf_cauchy(2, 0, 0.5) == Approx(0.03744822190397537).epsilon(1e-13));
  CHECK_THROWS_AS(pdf_cauchy(0, 0, 0), std::domain_error);
}

TEST_CASE("mirrored exponential density values") {
  CHECK(pdf_exponential_mirrored(0, 2) == 1.0);
  CHECK(pdf_exponential_mirrored(1, 1) == Approx(0.18393972058572117).epsilon(1e-14));
  CHECK(pdf_exponential_mirrored(-1, 1) == pdf_exponential_mirrored(1, 1));
  CHECK_THROWS_AS(pdf_exponential_mirrored(0, -3), std::domain_error);
}

TEST_CASE("rayleigh density and step function") {
  CHECK(pdf_rayleigh(0, 1) == 0.0);
  CHECK(pdf_rayleigh(1, 1) == Approx(0.6065306597126334).epsilon(1e-14));
  CHECK(pdf_rayleigh(-1, 1) == 0.0);
  // Mode at x = sigma.
  for (double s : {0.3, 1.0, 4.0}) {
    CHECK(pdf_rayleigh(s, s * s) > pdf_rayleigh(s * 0.99, s * s));
    CHECK(pdf_rayleigh(s, s * s) > pdf_rayleigh(s * 1.01, s * s));
  }
  CHECK_THROWS_AS(pdf_rayleigh(1, 0), std::domain_error);

  CHECK(step(2.5, 2.5) == 1);
  CHECK(step(-0.001, 0.0) == 0);
  CHECK(step(5, 1) == 1);
}

TEST_CASE("modified rayleigh density values") {
  CHECK(pdf_modified_rayleigh(0, 1) == Approx(0.6065306597126334).epsilon(1e-14));
  CHECK(pdf_modified_rayleigh(-1, 1) == Approx(0.1353352832366127).epsilon(1e-14));
  CHECK(pdf_modified_rayleigh(1, 1) == Approx(0.1353352832366127).epsilon(1e-14));
  CHECK_THROWS_AS(pdf_modified_rayleigh(0, 0), std::domain_error);
}

TEST_CASE("densities are non-negative and zero-located ones are even") {
  RandomSource rng(11);
  for (int i = 0; i < 5000; ++i) {
    const double x = rng.uniform(-50, 50);
    const double s2 = rng.uniform(0.01, 25);
    const double g = rng.uniform(0.01, 5);
    CHECK(pdf_gaussian(x, 0, s2) >= 0);
    CHECK(pdf_cauchy(x, 0, g) >= 0);
    CHECK(pdf_exponential_mirrored(x, g) >= 0);
    CHECK(pdf_rayleigh(x, s2) >= 0);
    CHECK(pdf_modified_rayleigh(x, s2) >= 0);
    CHECK(pdf_gaussian(x, 0, s2) == pdf_gaussian(-x, 0, s2));
    CHECK(pdf_cauchy(x, 0, g) == pdf_cauchy(-x, 0, g));
    CHECK(pdf_exponential_mirrored(x, g) == pdf_exponential_mirrored(-x, g));
    CHECK(pdf_modified_rayleigh(x, s2) == pdf_modified_rayleigh(-x, s2));
  }
}

TEST_CASE("densities integrate to one") {
  for (double s : {0.2, 1.0, 5.0}) {
    CAPTURE(s);
    const double lo = -12 * s, hi = 12 * s;
    CHECK(oracle::simpson([&](double x) { return pdf_gaussian(x, 0, s * s); }, lo, hi) ==
          Approx(1.0).epsilon(1e-6));
    CHECK(oracle::simpson_split([&](double x) { return pdf_exponential_mirrored(x, 1.0 / s); }, -40 * s,
                                40 * s, {0.0}) == Approx(1.0).epsilon(1e-6));
    CHECK(oracle::simpson([&](double x) { return pdf_rayleigh(x, s * s); }, 0, hi) ==
          Approx(1.0).epsilon(1e-6));
    CHECK(oracle::simpson_split([&](double x) { return pdf_modified_rayleigh(x, s * s); }, lo, hi,
                                {-s, s}) == Approx(1.0).epsilon(1e-6));
    // Cauchy: the analytic CDF difference over a wide window plus the tails.
    const double w = 1e9 * s;
    const double mass = oracle::cauchy_cdf(w, s) - oracle::cauchy_cdf(-w, s);
    CHECK(mass == Approx(1.0).epsilon(1e-6));
    CHECK(oracle::simpson([&](double x) { return pdf_cauchy(x, 0, s); }, -20 * s, 20 * s) ==
          Approx(mass - 2 * (1 - oracle::cauchy_cdf(20 * s, s))).epsilon(1e-6));
  }
}

TEST_CASE("closed-form cdf agrees with quadrature of the density") {
  for (auto kind : kAllDistributions) {
    for (double s : {0.1, 1.0}) {
      const PerturbationSpec spec{kind, s, 0.0};
      const oracle::QuadratureCdf q([&](double x) { return pdf(spec, x); }, -200 * s, 200 * s);
      for (double x : {-3.0, -1.0, -0.5, -0.1, 0.0, 0.05, 0.3, 1.0, 2.5}) {
        CAPTURE(distribution_name(kind));
        CAPTURE(x);
        const double tail = kind == Distribution::Cauchy ? oracle::cauchy_cdf(-200 * s, s) : 0.0;
        CHECK(cdf(spec, x * s) == Approx(q(x * s) + tail).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("cauchy quantile") {
  CHECK(cauchy_quantile(0.5, 0, 1) == 0.0);
  CHECK(cauchy_quantile(0.75, 0, 2.5) == Approx(2.5).epsilon(1e-14));
  CHECK(cauchy_quantile(0.25, 1, 1) == Approx(0.0).epsilon(1e-14));
}

TEST_CASE("uniform source: replay and open interval") {
  RandomSource a(42), b(42), c(43);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(a.uniform() != c.uniform());
  RandomSource d(1);
  for (int i = 0; i < 1000; ++i) CHECK(d.uniform_open() > 0.0);
}

TEST_CASE("sampling consumes a fixed number of uniforms") {
  const std::pair<Distribution, int> expected[] = {{Distribution::Gaussian, 2},
                                                   {Distribution::Cauchy, 1},
                                                   {Distribution::ExponentialMirrored, 2},
                                                   {Distribution::ModifiedRayleigh, 2}};
  for (auto [kind, count] : expected) {
    RandomSource a(9), b(9);
    sample({kind, 1.0, 0.0}, a);
    for (int i = 0; i < count; ++i) b.uniform();
    CHECK(a == b);
  }
}

TEST_CASE("gaussian sample moments") {
  RandomSource rng(2024);
  const PerturbationSpec spec{Distribution::Gaussian, 1.0, 0.0};
  std::vector<double> xs(100000);
  for (auto &x : xs) x = sample(spec, rng);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= xs.size();
  CHECK(mean >= -0.02);
  CHECK(mean <= 0.02);
  CHECK(var >= 0.97);
  CHECK(var <= 1.03);
}

TEST_CASE("samplers pass KS against independent CDFs") {
  const std::size_t n = 100000;
  for (auto kind : kAllDistributions) {
    for (double s : {0.1, 1.0}) {
      RandomSource rng(static_cast<std::uint64_t>(1000 * s) + 17 * static_cast<std::uint64_t>(kind));
      const PerturbationSpec spec{kind, s, 0.0};
      std::vector<double> xs(n);
      for (auto &x : xs) x = sample(spec, rng);
      std::function<double(double)> ref;
      switch (kind) {
      case Distribution::Gaussian: ref = [s](double x) { return oracle::normal_cdf(x, s); }; break;
      case Distribution::Cauchy: ref = [s](double x) { return oracle::cauchy_cdf(x, s); }; break;
      case Distribution::ExponentialMirrored:
        ref = [s](double x) { return oracle::laplace_cdf(x, s); };
        break;
      case Distribution::ModifiedRayleigh: {
        auto q = std::make_shared<oracle::QuadratureCdf>(
            [s](double x) { return pdf_modified_rayleigh(x, s * s); }, -12 * s, 12 * s);
        ref = [q](double x) { return (*q)(x); };
        break;
      }
      }
      const double d = oracle::ks_statistic(xs, ref);
      CAPTURE(distribution_name(kind));
      CAPTURE(s);
      CHECK(d < oracle::ks_critical(n));
    }
  }
}

TEST_CASE("modified rayleigh sampler matches rejection sampling of the density") {
  const double s = 1.0;
  RandomSource rng(77);
  const PerturbationSpec spec{Distribution::ModifiedRayleigh, s, 0.0};
  std::vector<double> a(5000);
  for (auto &x : a) x = sample(spec, rng);
  auto b = oracle::rejection_sample([s](double x) { return pdf_modified_rayleigh(x, s * s); },
                                    -10 * s, 10 * s, 0.62 / s, 5000, 99);
  CHECK(oracle::ks_two_sample(a, b) < oracle::ks_critical(a.size(), b.size()));
}

TEST_CASE("distribution names") {
  CHECK(parse_distribution("gaussian") == Distribution::Gaussian);
  CHECK(parse_distribution("CRO_C") == Distribution::Cauchy);
  CHECK(parse_distribution("E") == Distribution::ExponentialMirrored);
  CHECK(parse_distribution("rayleigh-modified") == Distribution::ModifiedRayleigh);
  CHECK_FALSE(parse_distribution("levy").has_value());
  for (auto d : kAllDistributions) CHECK(parse_distribution(distribution_name(d)) == d);
  CHECK(variant_name(Distribution::ModifiedRayleigh) == "CRO_R");
}

TEST_CASE("invalid scale is rejected") {
  PerturbationSpec spec{Distribution::Cauchy, 0.0, 0.0};
  CHECK_THROWS_AS(spec.validate(), std::domain_error);
  CHECK_THROWS_AS(pdf(spec, 0.0), std::domain_error);
}
