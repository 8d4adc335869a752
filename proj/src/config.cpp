#include "cro/config.hpp"

#include <charconv>
#include <fstream>

namespace cro {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T> T parse_number(const std::string &key, const std::string &value) {
  T v{};
  const char *first = value.data();
  const char *last = value.data() + value.size();
  if constexpr (std::is_floating_point_v<T>) {
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec == std::errc{} && p == last) return v;
  } else {
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec == std::errc{} && p == last) return v;
    // Accept integral values written in scientific notation, e.g. 1.5e5.
    double d{};
    auto [q, ec2] = std::from_chars(first, last, d);
    if (ec2 == std::errc{} && q == last && d == static_cast<double>(static_cast<T>(d)) && d >= 0)
      return static_cast<T>(d);
  }
  throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
}

template <typename T> void take(std::optional<T> &dst, const std::optional<T> &src) {
  if (src) dst = src;
}

} // namespace

void RunSettings::set(const std::string &key, const std::string &value) {
  if (key == "distribution") distribution = value;
  else if (key == "function") function = value;
  else if (key == "pop_size") pop_size = parse_number<std::size_t>(key, value);
  else if (key == "step_size") step_size = parse_number<double>(key, value);
  else if (key == "en_buff") en_buff = parse_number<double>(key, value);
  else if (key == "ini_ke") ini_ke = parse_number<double>(key, value);
  else if (key == "coll_rate") coll_rate = parse_number<double>(key, value);
  else if (key == "loss_rate") loss_rate = parse_number<double>(key, value);
  else if (key == "dec_thres") dec_thres = parse_number<double>(key, value);
  else if (key == "syn_thres") syn_thres = parse_number<double>(key, value);
  else if (key == "fe_limit") fe_limit = parse_number<long long>(key, value);
  else if (key == "runs") runs = parse_number<int>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "parallelism") parallelism = parse_number<int>(key, value);
  else if (key == "out_dir") out_dir = value;
  else throw ConfigError("unknown configuration key '" + key + "'");
}

RunSettings RunSettings::overlaid_by(const RunSettings &top) const {
  RunSettings r = *this;
  take(r.distribution, top.distribution);
  take(r.function, top.function);
  take(r.pop_size, top.pop_size);
  take(r.step_size, top.step_size);
  take(r.en_buff, top.en_buff);
  take(r.ini_ke, top.ini_ke);
  take(r.coll_rate, top.coll_rate);
  take(r.loss_rate, top.loss_rate);
  take(r.dec_thres, top.dec_thres);
  take(r.syn_thres, top.syn_thres);
  take(r.fe_limit, top.fe_limit);
  take(r.runs, top.runs);
  take(r.seed, top.seed);
  take(r.parallelism, top.parallelism);
  take(r.out_dir, top.out_dir);
  return r;
}

bool RunSettings::overrides_parameters() const noexcept {
  return pop_size || step_size || en_buff || ini_ke || coll_rate || loss_rate || dec_thres ||
         syn_thres;
}

RunSettings parse_config(std::istream &in, const std::string &origin) {
  RunSettings s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      s.set(key, value);
    } catch (const ConfigError &e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return s;
}

RunSettings load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  return parse_config(in, path.string());
}

Parameters resolve_parameters(const RunSettings &s, FunctionId id) {
  Parameters p = Parameters::preset(id);
  if (s.pop_size) p.pop_size = *s.pop_size;
  if (s.step_size) p.step_size = *s.step_size;
  if (s.en_buff) p.en_buff = *s.en_buff;
  if (s.ini_ke) p.ini_ke = *s.ini_ke;
  if (s.coll_rate) p.coll_rate = *s.coll_rate;
  if (s.loss_rate) p.loss_rate = *s.loss_rate;
  if (s.dec_thres) p.dec_thres = *s.dec_thres;
  if (s.syn_thres) p.syn_thres = *s.syn_thres;
  p.validate();
  return p;
}

} // namespace cro
