#include "priosim/config_file.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace priosim {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text,
                                  const std::string& origin) {
  ConfigFile cf;
  std::istringstream in(text);
  std::string line, section;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto cmt = line.find('#');
    if (cmt != std::string::npos) line.erase(cmt);
    line = trim(line);
    if (line.empty()) continue;
    std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      cf.data_[section];  // a section may legitimately stay empty
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected `key = value`");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (section.empty())
      throw ConfigError(where + ": key before any [section]");
    auto [it, fresh] = cf.data_[section].emplace(key, val);
    (void)it;
    if (!fresh)
      throw ConfigError(where + ": duplicate key `" + key + "` in [" +
                        section + "]");
  }
  return cf;
}

std::string ConfigFile::serialize() const {
  std::ostringstream out;
  bool first = true;
  for (auto& [sec, kv] : data_) {
    if (!first) out << "\n";
    first = false;
    out << "[" << sec << "]\n";
    for (auto& [k, v] : kv) out << k << " = " << v << "\n";
  }
  return out.str();
}

bool ConfigFile::has(const std::string& sec, const std::string& key) const {
  auto s = data_.find(sec);
  return s != data_.end() && s->second.count(key) != 0;
}

const std::string& ConfigFile::get(const std::string& sec,
                                   const std::string& key) const {
  auto s = data_.find(sec);
  if (s != data_.end()) {
    auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  throw ConfigError("missing config key [" + sec + "] " + key);
}

std::string ConfigFile::get_or(const std::string& sec, const std::string& key,
                               const std::string& dflt) const {
  return has(sec, key) ? get(sec, key) : dflt;
}

int64_t ConfigFile::get_int(const std::string& sec,
                            const std::string& key) const {
  const std::string& v = get(sec, key);
  char* end = nullptr;
  long long r = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("[" + sec + "] " + key + ": not an integer: " + v);
  return r;
}

int64_t ConfigFile::get_int_or(const std::string& sec, const std::string& key,
                               int64_t dflt) const {
  return has(sec, key) ? get_int(sec, key) : dflt;
}

double ConfigFile::get_double(const std::string& sec,
                              const std::string& key) const {
  const std::string& v = get(sec, key);
  char* end = nullptr;
  double r = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("[" + sec + "] " + key + ": not a number: " + v);
  return r;
}

double ConfigFile::get_double_or(const std::string& sec,
                                 const std::string& key, double dflt) const {
  return has(sec, key) ? get_double(sec, key) : dflt;
}

bool ConfigFile::get_bool_or(const std::string& sec, const std::string& key,
                             bool dflt) const {
  if (!has(sec, key)) return dflt;
  const std::string& v = get(sec, key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("[" + sec + "] " + key + ": not a boolean: " + v);
}

std::vector<std::string> ConfigFile::get_list_or(const std::string& sec,
                                                 const std::string& key) const {
  std::vector<std::string> out;
  if (!has(sec, key)) return out;
  std::istringstream in(get(sec, key));
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void ConfigFile::set(const std::string& sec, const std::string& key,
                     const std::string& value) {
  data_[sec][key] = value;
}

}  // namespace priosim
