// Flat key=value configuration text with one [section] per study. Grammar:
//   - blank lines and lines starting with '#' are skipped
//   - "[name]" opens a section; keys before any section are global
//   - "key = value"; whitespace around key and value is trimmed
// No nesting, no quoting, no escapes.
#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "alphamhd/common.hpp"

namespace alphamhd {

namespace cfg_detail {

inline std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const std::size_t a = s.find_first_not_of(ws);
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

}  // namespace cfg_detail

struct KvMap {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) != 0; }

  std::string str(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
  }
  std::string str_or(const std::string& key, const std::string& def) const {
    auto it = kv.find(key);
    return it == kv.end() ? def : it->second;
  }

  double num(const std::string& key) const { return parse_num(key, str(key)); }
  double num_or(const std::string& key, double def) const {
    return has(key) ? num(key) : def;
  }

  std::int64_t integer(const std::string& key) const {
    const std::string v = str(key);
    try {
      std::size_t used = 0;
      const long long r = std::stoll(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
    }
  }
  std::int64_t integer_or(const std::string& key, std::int64_t def) const {
    return has(key) ? integer(key) : def;
  }

  bool flag_or(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
  }

  // comma-separated reals
  std::vector<double> num_list(const std::string& key) const {
    const std::string v = str(key);
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = cfg_detail::trim(item);
      if (item.empty()) continue;
      out.push_back(parse_num(key, item));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
  }

 private:
  static double parse_num(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double r = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
    }
  }
};

struct ConfigSection {
  std::string name;
  KvMap values;
};

struct Config {
  KvMap globals;
  std::vector<ConfigSection> sections;

  static Config parse_string(const std::string& text) {
    Config cfg;
    ConfigSection* current = nullptr;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string s = cfg_detail::trim(line);
      if (s.empty() || s[0] == '#') continue;
      if (s.front() == '[') {
        if (s.back() != ']' || s.size() < 3)
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": malformed section header");
        const std::string name = cfg_detail::trim(s.substr(1, s.size() - 2));
        if (name.empty())
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": empty section name");
        for (const auto& sec : cfg.sections)
          if (sec.name == name)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": duplicate section '" + name + "'");
        cfg.sections.push_back({name, {}});
        current = &cfg.sections.back();
        continue;
      }
      const std::size_t eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      const std::string key = cfg_detail::trim(s.substr(0, eq));
      const std::string val = cfg_detail::trim(s.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      KvMap& target = current ? current->values : cfg.globals;
      if (target.kv.count(key))
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": duplicate key '" + key + "'");
      target.kv[key] = val;
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
  }
};

}  // namespace alphamhd
