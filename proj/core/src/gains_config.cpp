#include "coherence/gains_config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "coherence/errors.hpp"
#include "coherence/io.hpp"

namespace coherence {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  double value;
  std::size_t line;
};

const std::set<std::string, std::less<>> kGainKeys = {"f", "g", "f0", "g0",
                                                      "ki", "c", "kd", "tau"};
const std::set<std::string, std::less<>> kPresetKeys = {"m", "d", "b", "l"};

}  // namespace

Gains parse_gains_config(std::string_view text) {
  std::optional<std::string> controller;
  std::size_t controller_line = 0;
  std::map<std::string, Entry, std::less<>> gains;
  std::map<std::string, Entry, std::less<>> preset;
  bool in_preset = false;
  bool saw_preset = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line != "[power_preset]") {
        throw ParseError(line_no, "unknown section " + std::string(line));
      }
      if (saw_preset) throw ParseError(line_no, "duplicate [power_preset] section");
      in_preset = saw_preset = true;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const auto raw = trim(line.substr(eq + 1));
    if (key.empty() || raw.empty()) throw ParseError(line_no, "expected key = value");

    if (!in_preset && key == "controller") {
      if (controller) throw ParseError(line_no, "duplicate key controller");
      if (raw != "p" && raw != "dapi" && raw != "fdpd") {
        throw ParseError(line_no, "controller must be p, dapi or fdpd");
      }
      controller = std::string(raw);
      controller_line = line_no;
      continue;
    }

    const auto& allowed = in_preset ? kPresetKeys : kGainKeys;
    if (!allowed.contains(key)) throw ParseError(line_no, "unknown key " + key);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
      throw ParseError(line_no, "invalid number for " + key);
    }
    auto& target = in_preset ? preset : gains;
    if (!target.emplace(key, Entry{value, line_no}).second) {
      throw ParseError(line_no, "duplicate key " + key);
    }
  }

  if (!controller) throw ParseError(std::max<std::size_t>(line_no, 1), "missing controller");
  const std::set<std::string_view> used =
      *controller == "p"      ? std::set<std::string_view>{"f", "g", "f0", "g0"}
      : *controller == "dapi" ? std::set<std::string_view>{"f", "g", "g0", "ki", "c"}
                              : std::set<std::string_view>{"f", "g", "f0", "kd", "tau"};
  for (const auto& [key, entry] : gains) {
    if (!used.contains(key)) {
      throw ParseError(entry.line, key + " is not a " + *controller + " gain");
    }
  }
  const auto get = [&](const auto& map, std::string_view key, double fallback) {
    const auto it = map.find(key);
    return it == map.end() ? fallback : it->second.value;
  };

  Gains result;
  if (saw_preset) {
    for (const char* key : {"f", "g", "f0", "g0"}) {
      if (const auto it = gains.find(key); it != gains.end()) {
        throw ParseError(it->second.line,
                         std::string(key) + " conflicts with [power_preset]");
      }
    }
    for (const char* key : {"m", "d", "b"}) {
      if (!preset.contains(key)) {
        throw ParseError(line_no, std::string("[power_preset] missing ") + key);
      }
    }
    const double m = get(preset, "m", 0.0);
    const double d = get(preset, "d", 0.0);
    const double b = get(preset, "b", 0.0);
    const double l = get(preset, "l", 1.0);
    if (*controller == "dapi") {
      result = power_preset(m, d, b, l, get(gains, "ki", 0.0), get(gains, "c", 0.0));
    } else if (*controller == "p") {
      result = power_droop(m, d, b, l);
    } else {
      throw ParseError(controller_line, "[power_preset] applies to p or dapi only");
    }
  } else if (*controller == "p") {
    result = PGains{get(gains, "f", 0.0), get(gains, "g", 0.0), get(gains, "f0", 0.0),
                    get(gains, "g0", 0.0)};
  } else if (*controller == "dapi") {
    result = DapiGains{get(gains, "f", 0.0), get(gains, "g", 0.0), get(gains, "g0", 0.0),
                       get(gains, "ki", 0.0), get(gains, "c", 0.0)};
  } else {
    result = FdpdGains{get(gains, "f", 0.0), get(gains, "g", 0.0), get(gains, "f0", 0.0),
                       get(gains, "kd", 0.0), get(gains, "tau", 0.0)};
  }
  validate(result);
  return result;
}

std::string to_gains_config(const Gains& gains) {
  std::ostringstream out;
  out << "controller = " << to_string(kind_of(gains)) << '\n';
  const auto line = [&](const char* key, double value) {
    out << key << " = " << format_double(value) << '\n';
  };
  if (const auto* p = std::get_if<PGains>(&gains)) {
    line("f", p->f);
    line("g", p->g);
    line("f0", p->f0);
    line("g0", p->g0);
  } else if (const auto* d = std::get_if<DapiGains>(&gains)) {
    line("f", d->f);
    line("g", d->g);
    line("g0", d->g0);
    line("ki", d->ki);
    line("c", d->c);
  } else {
    const auto& fd = std::get<FdpdGains>(gains);
    line("f", fd.f);
    line("g", fd.g);
    line("f0", fd.f0);
    line("kd", fd.kd);
    line("tau", fd.tau);
  }
  return out.str();
}

}  // namespace coherence
