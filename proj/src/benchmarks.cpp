#include "cro/benchmarks.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cro {

namespace {

using std::numbers::pi;

constexpr std::size_t kHighDim = 30;

std::atomic<std::uint64_t> g_out_of_bounds{0};

double sq(double v) { return v * v; }

double penalty(double x, double a, double k, double m) {
  if (x > a) return k * std::pow(x - a, m);
  if (x < -a) return k * std::pow(-x - a, m);
  return 0.0;
}

// Shekel's foxholes grid: row 0 cycles through columns, row 1 through rows.
constexpr std::array<double, 5> kFoxholeGrid{-32.0, -16.0, 0.0, 16.0, 32.0};

constexpr std::array<double, 11> kKowalikA{0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627,
                                           0.0456, 0.0342, 0.0323, 0.0235, 0.0246};
constexpr std::array<double, 11> kKowalikInvB{0.25, 0.5, 1.0, 2.0, 4.0, 6.0,
                                              8.0,  10.0, 12.0, 14.0, 16.0};

constexpr std::array<double, 4> kHartmanC{1.0, 1.2, 3.0, 3.2};
constexpr double kHartman3A[4][3] = {{3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}, {3.0, 10.0, 30.0},
                                     {0.1, 10.0, 35.0}};
constexpr double kHartman3P[4][3] = {{0.3689, 0.1170, 0.2673},
                                     {0.4699, 0.4387, 0.7470},
                                     {0.1091, 0.8732, 0.5547},
                                     {0.038150, 0.5743, 0.8828}};
constexpr double kHartman6A[4][6] = {{10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
                                     {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
                                     {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
                                     {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}};
constexpr double kHartman6P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                     {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                     {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                     {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};

constexpr double kShekelA[10][4] = {{4, 4, 4, 4}, {1, 1, 1, 1}, {8, 8, 8, 8}, {6, 6, 6, 6},
                                    {3, 7, 3, 7}, {2, 9, 2, 9}, {5, 5, 3, 3}, {8, 1, 8, 1},
                                    {6, 2, 6, 2}, {7, 3.6, 7, 3.6}};
constexpr std::array<double, 10> kShekelC{0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};

template <std::size_t N>
double hartman(std::span<const double> x, const double (&a)[4][N], const double (&p)[4][N]) {
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < N; ++j) inner += a[i][j] * sq(x[j] - p[i][j]);
    sum += kHartmanC[i] * std::exp(-inner);
  }
  return -sum;
}

double shekel(std::span<const double> x, std::size_t m) {
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < 4; ++j) d += sq(x[j] - kShekelA[i][j]);
    sum += 1.0 / (d + kShekelC[i]);
  }
  return -sum;
}

double eval_impl(int n, std::span<const double> x, RandomSource *noise) {
  const std::size_t d = x.size();
  switch (n) {
  case 1: {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  }
  case 2: {
    double s = 0.0, p = 1.0;
    for (double v : x) {
      s += std::abs(v);
      p *= std::abs(v);
    }
    return s + p;
  }
  case 3: {
    double s = 0.0, prefix = 0.0;
    for (double v : x) {
      prefix += v;
      s += prefix * prefix;
    }
    return s;
  }
  case 4: {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  }
  case 5: {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) s += 100.0 * sq(x[i + 1] - x[i] * x[i]) + sq(x[i] - 1.0);
    return s;
  }
  case 6: {
    double s = 0.0;
    for (double v : x) s += sq(std::floor(v + 0.5));
    return s;
  }
  case 7: {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += static_cast<double>(i + 1) * sq(sq(x[i]));
    return noise ? s + noise->uniform() : s;
  }
  case 8: {
    double s = 0.0;
    for (double v : x) s -= v * std::sin(std::sqrt(std::abs(v)));
    return s;
  }
  case 9: {
    double s = 0.0;
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * pi * v) + 10.0;
    return s;
  }
  case 10: {
    double s2 = 0.0, sc = 0.0;
    for (double v : x) {
      s2 += v * v;
      sc += std::cos(2.0 * pi * v);
    }
    const double nd = static_cast<double>(d);
    return -20.0 * std::exp(-0.2 * std::sqrt(s2 / nd)) - std::exp(sc / nd) + 20.0 + std::numbers::e;
  }
  case 11: {
    double s = 0.0, p = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      s += x[i] * x[i];
      p *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return s / 4000.0 - p + 1.0;
  }
  case 12: {
    auto y = [&](std::size_t i) { return 1.0 + (x[i] + 1.0) / 4.0; };
    double s = 10.0 * sq(std::sin(pi * y(0)));
    for (std::size_t i = 0; i + 1 < d; ++i) s += sq(y(i) - 1.0) * (1.0 + 10.0 * sq(std::sin(pi * y(i + 1))));
    s += sq(y(d - 1) - 1.0);
    s *= pi / static_cast<double>(d);
    for (double v : x) s += penalty(v, 10.0, 100.0, 4.0);
    return s;
  }
  case 13: {
    double s = sq(std::sin(3.0 * pi * x[0]));
    for (std::size_t i = 0; i + 1 < d; ++i) s += sq(x[i] - 1.0) * (1.0 + sq(std::sin(3.0 * pi * x[i + 1])));
    s += sq(x[d - 1] - 1.0) * (1.0 + sq(std::sin(2.0 * pi * x[d - 1])));
    s *= 0.1;
    for (double v : x) s += penalty(v, 5.0, 100.0, 4.0);
    return s;
  }
  case 14: {
    double s = 1.0 / 500.0;
    for (std::size_t j = 0; j < 25; ++j) {
      const double a0 = kFoxholeGrid[j % 5];
      const double a1 = kFoxholeGrid[j / 5];
      s += 1.0 / (static_cast<double>(j + 1) + std::pow(x[0] - a0, 6) + std::pow(x[1] - a1, 6));
    }
    return 1.0 / s;
  }
  case 15: {
    double s = 0.0;
    for (std::size_t i = 0; i < 11; ++i) {
      const double b = 1.0 / kKowalikInvB[i];
      s += sq(kKowalikA[i] - x[0] * (b * b + b * x[1]) / (b * b + b * x[2] + x[3]));
    }
    return s;
  }
  case 16:
    return 4.0 * sq(x[0]) - 2.1 * std::pow(x[0], 4) + std::pow(x[0], 6) / 3.0 + x[0] * x[1] -
           4.0 * sq(x[1]) + 4.0 * std::pow(x[1], 4);
  case 17:
    return sq(x[1] - 5.1 / (4.0 * pi * pi) * sq(x[0]) + 5.0 / pi * x[0] - 6.0) +
           10.0 * (1.0 - 1.0 / (8.0 * pi)) * std::cos(x[0]) + 10.0;
  case 18: {
    const double a = x[0], b = x[1];
    const double t1 = 1.0 + sq(a + b + 1.0) * (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b + 6.0 * a * b + 3.0 * b * b);
    const double t2 = 30.0 + sq(2.0 * a - 3.0 * b) * (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b - 36.0 * a * b + 27.0 * b * b);
    return t1 * t2;
  }
  case 19: return hartman(x, kHartman3A, kHartman3P);
  case 20: return hartman(x, kHartman6A, kHartman6P);
  case 21: return shekel(x, 5);
  case 22: return shekel(x, 7);
  case 23: return shekel(x, 10);
  }
  throw std::invalid_argument("unknown benchmark function id " + std::to_string(n));
}

BenchmarkFunction make(int n, std::string name, std::size_t dim, double lo, double hi,
                       double known_min, std::vector<double> argmin, long long fe) {
  const Category cat = n <= 7 ? Category::Unimodal
                       : n <= 13 ? Category::HighDimMultimodal
                                 : Category::LowDimMultimodal;
  return BenchmarkFunction{fid(n), std::move(name), dim, std::vector<double>(dim, lo),
                           std::vector<double>(dim, hi), cat, known_min, std::move(argmin), fe};
}

std::vector<BenchmarkFunction> build_suite() {
  const auto zeros = std::vector<double>(kHighDim, 0.0);
  std::vector<BenchmarkFunction> s;
  s.reserve(23);
  s.push_back(make(1, "sphere", kHighDim, -100, 100, 0.0, zeros, 150000));
  s.push_back(make(2, "schwefel_2_22", kHighDim, -10, 10, 0.0, zeros, 150000));
  s.push_back(make(3, "schwefel_1_2", kHighDim, -100, 100, 0.0, zeros, 250000));
  s.push_back(make(4, "schwefel_2_21", kHighDim, -100, 100, 0.0, zeros, 150000));
  s.push_back(make(5, "rosenbrock", kHighDim, -30, 30, 0.0, std::vector<double>(kHighDim, 1.0), 150000));
  s.push_back(make(6, "step", kHighDim, -100, 100, 0.0, zeros, 150000));
  s.push_back(make(7, "quartic_noise", kHighDim, -1.28, 1.28, 0.0, zeros, 150000));
  s.push_back(make(8, "schwefel_2_26", kHighDim, -500, 500, -418.9828872724338 * kHighDim,
                   std::vector<double>(kHighDim, 420.9687463), 150000));
  s.push_back(make(9, "rastrigin", kHighDim, -5.12, 5.12, 0.0, zeros, 250000));
  s.push_back(make(10, "ackley", kHighDim, -32, 32, 0.0, zeros, 150000));
  s.push_back(make(11, "griewank", kHighDim, -600, 600, 0.0, zeros, 150000));
  s.push_back(make(12, "penalized_1", kHighDim, -50, 50, 0.0, std::vector<double>(kHighDim, -1.0), 150000));
  s.push_back(make(13, "penalized_2", kHighDim, -50, 50, 0.0, std::vector<double>(kHighDim, 1.0), 150000));
  s.push_back(make(14, "shekel_foxholes", 2, -65.536, 65.536, 0.9980038377944498,
                   {-31.978333378, -31.9783340079}, 7500));
  s.push_back(make(15, "kowalik", 4, -5, 5, 3.0748598780560557e-4,
                   {0.192833453043, 0.190836240276, 0.123117299076, 0.13576599034}, 250000));
  s.push_back(make(16, "six_hump_camel", 2, -5, 5, -1.0316284534898776,
                   {0.0898420165293, -0.712656401381}, 1250));
  {
    auto branin = make(17, "branin", 2, 0, 0, 0.39788735772973816, {pi, 2.275}, 5000);
    branin.lower = {-5.0, 0.0};
    branin.upper = {10.0, 15.0};
    s.push_back(std::move(branin));
  }
  s.push_back(make(18, "goldstein_price", 2, -2, 2, 3.0, {0.0, -1.0}, 10000));
  s.push_back(make(19, "hartman_3", 3, 0, 1, -3.8627821478207554,
                   {0.114614342031, 0.555648850791, 0.852546953846}, 4000));
  s.push_back(make(20, "hartman_6", 6, 0, 1, -3.322368011415515,
                   {0.201689510378, 0.150010691465, 0.476873973371, 0.275332428854,
                    0.311651616563, 0.657300530846},
                   7500));
  s.push_back(make(21, "shekel_5", 4, 0, 10, -10.153199679058229,
                   {4.00003715238, 4.00013327866, 4.00003715106, 4.00013327709}, 10000));
  s.push_back(make(22, "shekel_7", 4, 0, 10, -10.402940566818662,
                   {4.00057291428, 4.00068936604, 3.99948971079, 3.99960616001}, 10000));
  s.push_back(make(23, "shekel_10", 4, 0, 10, -10.536409816692045,
                   {4.00074653025, 4.00059293678, 3.99966339577, 3.99950979933}, 10000));
  return s;
}

} // namespace

std::string_view category_label(Category c) noexcept {
  switch (c) {
  case Category::Unimodal: return "I";
  case Category::HighDimMultimodal: return "II";
  case Category::LowDimMultimodal: return "III";
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view text) {
  if (text == "I" || text == "1") return Category::Unimodal;
  if (text == "II" || text == "2") return Category::HighDimMultimodal;
  if (text == "III" || text == "3") return Category::LowDimMultimodal;
  return std::nullopt;
}

bool BenchmarkFunction::contains(std::span<const double> x) const noexcept {
  if (x.size() != dim) return false;
  for (std::size_t i = 0; i < dim; ++i)
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  return true;
}

std::string function_label(FunctionId id) { return "f" + std::to_string(index_of(id)); }

std::optional<FunctionId> parse_function(std::string_view text) {
  if (!text.empty() && (text.front() == 'f' || text.front() == 'F')) text.remove_prefix(1);
  int n = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc{} || ptr != text.data() + text.size() || n < 1 || n > 23) return std::nullopt;
  return fid(n);
}

std::vector<FunctionId> parse_function_list(std::string_view text) {
  std::vector<FunctionId> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    std::string_view first = item, last = item;
    if (auto dots = item.find(".."); dots != std::string_view::npos) {
      first = item.substr(0, dots);
      last = item.substr(dots + 2);
    } else if (auto dash = item.find('-'); dash != std::string_view::npos) {
      first = item.substr(0, dash);
      last = item.substr(dash + 1);
    }
    auto a = parse_function(first);
    auto b = parse_function(last);
    if (!a || !b || index_of(*a) > index_of(*b))
      throw std::invalid_argument("bad function selector '" + std::string(item) + "'");
    for (int n = index_of(*a); n <= index_of(*b); ++n)
      if (std::find(out.begin(), out.end(), fid(n)) == out.end()) out.push_back(fid(n));
  }
  return out;
}

const std::vector<BenchmarkFunction> &suite() {
  static const std::vector<BenchmarkFunction> all = build_suite();
  return all;
}

const BenchmarkFunction &function(FunctionId id) {
  const int n = index_of(id);
  if (n < 1 || n > 23) throw std::invalid_argument("unknown benchmark function id " + std::to_string(n));
  return suite()[static_cast<std::size_t>(n - 1)];
}

Category category_of(FunctionId id) { return function(id).category; }
long long fe_limit(FunctionId id) { return function(id).fe_limit; }

double evaluate(FunctionId id, std::span<const double> x, RandomSource *noise) {
  const auto &f = function(id);
  if (x.size() != f.dim)
    throw std::invalid_argument(function_label(id) + " expects dimension " + std::to_string(f.dim) +
                                ", got " + std::to_string(x.size()));
  if (!f.contains(x)) g_out_of_bounds.fetch_add(1, std::memory_order_relaxed);
  return eval_impl(index_of(id), x, noise);
}

std::uint64_t out_of_bounds_evaluations() noexcept {
  return g_out_of_bounds.load(std::memory_order_relaxed);
}

} // namespace cro
