#pragma once

// Flat key = value configuration files: '#' comments, blank lines ignored,
// dotted keys, last assignment wins.

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace overdamp {

class Config {
 public:
  static Config from_string(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": empty key");
      c.kv_[key] = value;
    }
    return c;
  }

  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }
  std::string require(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end())
      throw std::invalid_argument("missing required config key: " + key);
    return it->second;
  }
  double num(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
      throw std::invalid_argument("config key '" + key +
                                  "': not a number: " + it->second);
    return v;
  }
  int integer(const std::string& key, int dflt) const {
    return static_cast<int>(num(key, dflt));
  }
  bool flag(const std::string& key, bool dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::invalid_argument("config key '" + key + "': not a boolean");
  }

  void set(const std::string& key, const std::string& value) {
    kv_[key] = value;
  }
  const std::map<std::string, std::string>& items() const { return kv_; }
  bool empty() const { return kv_.empty(); }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }
  std::map<std::string, std::string> kv_;
};

}  // namespace overdamp
