#ifndef PRIOSIM_CONFIG_FILE_HPP
#define PRIOSIM_CONFIG_FILE_HPP

#include <map>
#include <string>
#include <vector>

#include "priosim/common.hpp"

namespace priosim {

// Sectioned key/value experiment config:
//
//   [section]
//   key = value   # comment
//
// Values are raw strings; typed access converts on demand. serialize()
// emits the normalized form (sections and keys sorted, single spacing),
// which is byte-stable under parse/serialize round-trips.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_text(const std::string& text,
                               const std::string& origin = "<text>");

  std::string serialize() const;

  bool has(const std::string& sec, const std::string& key) const;
  const std::string& get(const std::string& sec, const std::string& key) const;
  std::string get_or(const std::string& sec, const std::string& key,
                     const std::string& dflt) const;

  int64_t get_int(const std::string& sec, const std::string& key) const;
  int64_t get_int_or(const std::string& sec, const std::string& key,
                     int64_t dflt) const;
  double get_double(const std::string& sec, const std::string& key) const;
  double get_double_or(const std::string& sec, const std::string& key,
                       double dflt) const;
  bool get_bool_or(const std::string& sec, const std::string& key,
                   bool dflt) const;
  // whitespace-separated values
  std::vector<std::string> get_list_or(const std::string& sec,
                                       const std::string& key) const;

  void set(const std::string& sec, const std::string& key,
           const std::string& value);

  const std::map<std::string, std::map<std::string, std::string>>& sections()
      const {
    return data_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

}  // namespace priosim

#endif
