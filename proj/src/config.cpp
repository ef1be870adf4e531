#include "softclik/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "softclik/errors.hpp"

namespace softclik {

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::defaults() {
  Config c;
  auto& v = c.values_;
  // rod: physical parameters and fiber activation profiles
  v["rod.L"] = "0.18";
  v["rod.EI1"] = "0.001";
  v["rod.EI2"] = "0.001";
  v["rod.GJ"] = "0.0008";
  v["rod.EA"] = "50";
  v["rod.w"] = "0.25";
  v["rod.gravity"] = "0,0,-1";
  v["rod.c_b"] = "2";
  v["rod.c_e"] = "0.15";
  v["rod.c_h"] = "1.2";
  v["rod.tau_c"] = "0.5";
  v["rod.c_e2"] = "0.1";
  v["rod.n_t"] = "1.5";
  v["rod.tol"] = "1e-10";
  v["rod.max_iter"] = "60";
  // dataset generation
  v["dataset.n"] = "20000";
  v["dataset.ns"] = "100";
  v["dataset.seed"] = "1";
  v["dataset.box"] = "-1.67,0";
  v["dataset.retries"] = "3";
  // training
  v["train.epochs"] = "500";
  v["train.batch"] = "32";
  v["train.lr0"] = "0.001";
  v["train.lr_final"] = "0.0001";
  v["train.seed"] = "1";
  v["train.split"] = "0.64,0.16,0.2";
  // controller
  v["clik.K"] = "8";
  v["clik.dt"] = "0.001";
  v["clik.tend"] = "1";
  v["clik.lambda_dls"] = "1e-06";
  v["clik.cond_warn"] = "1e+08";
  v["clik.clamp"] = "true";
  v["clik.snapshot_every"] = "100";
  v["clik.q0"] = "0";
  v["clik.cc_length"] = "1";
  v["clik.seed"] = "1";
  // task
  v["task.kind"] = "pos_fixed";
  v["task.target"] = "0,0,0";
  v["task.sbar"] = "1";
  v["task.n_coarse"] = "100";
  return c;
}

Config Config::from_text(const std::string& text, const std::string& origin) {
  Config c = defaults();
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.resize(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    if (!c.has(full))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + full + "'");
    c.values_[full] = value;
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!has(key)) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = value;
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& s = get(key);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: '" + s + "'");
  }
}

long long Config::get_long(const std::string& key) const {
  const std::string& s = get(key);
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an integer: '" + s + "'");
  }
}

int Config::get_int(const std::string& key) const {
  return static_cast<int>(get_long(key));
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string& s = get(key);
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an unsigned integer: '" + s + "'");
  }
}

bool Config::get_bool(const std::string& key) const {
  const std::string& s = get(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: '" + s + "'");
}

std::vector<double> Config::get_list(const std::string& key) const {
  const std::string& s = get(key);
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string item = trim(s.substr(pos, comma - pos));
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' has a non-numeric list item: '" + item + "'");
    }
    pos = comma + 1;
  }
  return out;
}

void Config::set_double(const std::string& key, double v) { set(key, format_double(v)); }
void Config::set_long(const std::string& key, long long v) { set(key, std::to_string(v)); }
void Config::set_u64(const std::string& key, std::uint64_t v) { set(key, std::to_string(v)); }
void Config::set_bool(const std::string& key, bool v) { set(key, v ? "true" : "false"); }

void Config::set_list(const std::string& key, const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_double(v[i]);
  }
  set(key, s);
}

std::string Config::echo() const {
  static const char* order[] = {"rod", "dataset", "train", "clik", "task"};
  std::string out;
  for (const char* section : order) {
    out += "[";
    out += section;
    out += "]\n";
    const std::string prefix = std::string(section) + ".";
    for (const auto& [key, value] : values_)  // std::map keeps keys sorted
      if (key.rfind(prefix, 0) == 0)
        out += key.substr(prefix.size()) + " = " + value + "\n";
    out += "\n";
  }
  return out;
}

void Config::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write config file: " + path);
  out << echo();
}

}  // namespace softclik
