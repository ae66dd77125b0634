#include "mcv/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace mcv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  // std::from_chars for double is not available on every toolchain we target.
  const std::string s(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != s.size() || !std::isfinite(out)) bad_value(key, value);
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value);
}

Window parse_neighborhood(std::string_view key, std::string_view value) {
  if (value == "8" || value == "9") return nine_neighborhood();
  if (value == "4" || value == "5") return five_neighborhood();
  bad_value(key, value);
}

std::vector<int> parse_radii(std::string_view key, std::string_view value) {
  std::vector<int> out;
  if (value.empty()) return out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const std::size_t comma = std::min(value.find(',', pos), value.size());
    out.push_back(parse_integer<int>(key, trim(value.substr(pos, comma - pos))));
    pos = comma + 1;
  }
  return out;
}

MrfModel with_neighborhood(const MrfModel& m, Window g) {
  return MrfModel::uniform(std::move(g), m.metric(), m.temperature(), m.rho());
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string neighborhood_name(const Window& w) {
  if (w == nine_neighborhood()) return "8";
  if (w == five_neighborhood()) return "4";
  return "custom";
}

}  // namespace

void apply_config_key(McvConfig& config, std::string& permutation_path, std::string_view key,
                      std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "max_level" || key == "levels") {
    config.max_level = parse_integer<int>(key, value);
  } else if (key == "permutation" || key == "perm") {
    if (value == "raster") {
      config.permutation = PermutationKind::raster;
    } else if (value == "random") {
      config.permutation = PermutationKind::random;
    } else if (value.starts_with("file:") && value.size() > 5) {
      config.permutation = PermutationKind::file;
      permutation_path = std::string(value.substr(5));
    } else {
      bad_value(key, value);
    }
  } else if (key == "seed") {
    config.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "reshuffle_per_level") {
    config.reshuffle_per_level = parse_bool(key, value);
  } else if (key == "neighborhood") {
    Window w = parse_neighborhood(key, value);
    config.w0 = w;
    config.model = with_neighborhood(config.model, std::move(w));
  } else if (key == "w0") {
    config.w0 = parse_neighborhood(key, value);
  } else if (key == "metric") {
    if (value == "euclidean" || value == "l2")
      config.model = config.model.with_metric(Metric::euclidean);
    else if (value == "per_band_abs" || value == "l1")
      config.model = config.model.with_metric(Metric::per_band_abs);
    else
      bad_value(key, value);
  } else if (key == "temperature" || key == "temp") {
    const double t = parse_real(key, value);
    if (!(t > 0.0)) bad_value(key, value);
    config.model = config.model.with_temperature(t);
  } else if (key == "rho") {
    if (value == "auto") {
      config.rho_auto = true;
    } else {
      const double r = parse_real(key, value);
      if (!(r >= 0.0)) bad_value(key, value);
      config.rho_auto = false;
      config.model = config.model.with_rho(r);
    }
  } else if (key == "calibration_samples") {
    config.calibration_samples = parse_integer<std::size_t>(key, value);
  } else if (key == "eval_mode" || key == "eval") {
    if (value == "direct") config.eval_mode = EvalMode::direct;
    else if (value == "pyramid") config.eval_mode = EvalMode::pyramid;
    else bad_value(key, value);
  } else if (key == "workers") {
    config.workers = parse_integer<unsigned>(key, value);
  } else if (key == "eval_radii") {
    config.eval_radii = parse_radii(key, value);
  } else if (key == "merge_radii") {
    config.merge_radii = parse_radii(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

McvConfig parse_config(std::string_view text, std::string& permutation_path, McvConfig base) {
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    apply_config_key(base, permutation_path, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

std::string format_config(const McvConfig& c) {
  std::ostringstream out;
  out.precision(17);
  const char* perm = c.permutation == PermutationKind::raster   ? "raster"
                     : c.permutation == PermutationKind::random ? "random"
                                                                : "file";
  out << "max_level=" << c.max_level << '\n'
      << "permutation=" << perm << '\n'
      << "seed=" << c.seed << '\n'
      << "reshuffle_per_level=" << (c.reshuffle_per_level ? "true" : "false") << '\n'
      << "w0=" << neighborhood_name(c.w0) << '\n'
      << "neighborhood=" << neighborhood_name(c.model.neighborhood()) << '\n'
      << "metric=" << (c.model.metric() == Metric::euclidean ? "euclidean" : "per_band_abs") << '\n'
      << "temperature=" << c.model.temperature() << '\n'
      << "rho=" << c.model.rho() << '\n'
      << "rho_auto=" << (c.rho_auto ? "true" : "false") << '\n'
      << "eval_mode=" << (c.eval_mode == EvalMode::direct ? "direct" : "pyramid") << '\n'
      << "workers=" << c.workers << '\n'
      << "eval_radii=" << join(c.eval_radii) << '\n'
      << "merge_radii=" << join(c.merge_radii) << '\n';
  return out.str();
}

}  // namespace mcv
