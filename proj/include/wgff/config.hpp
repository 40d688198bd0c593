#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "wgff/error.hpp"

namespace wgff {

/// Flat key-value configuration: `key = value` lines, `[section]` headers (keys become section.key),
/// `#` or `;` comments, and `include = path` resolved relative to the including file.
class Config {
 public:
  static Config load(const std::filesystem::path& path) {
    Config c;
    std::set<std::string> stack;
    c.read_file(path, stack);
    return c;
  }

  static Config parse(const std::string& text, const std::filesystem::path& base = ".") {
    Config c;
    std::set<std::string> stack;
    std::istringstream in(text);
    c.read_stream(in, base, "<string>", stack);
    return c;
  }

  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Value for `name`, matching either the bare key or the last component of a section key.
  std::optional<std::string> lookup(const std::string& name) const {
    std::optional<std::string> found;
    std::string where;
    for (const auto& [k, v] : entries_) {
      const auto dot = k.rfind('.');
      const std::string leaf = dot == std::string::npos ? k : k.substr(dot + 1);
      if (leaf != name) continue;
      if (found && *found != v) throw InvalidArgument("malformed config: key '" + name + "' is set in both " + where + " and " + k);
      found = v;
      where = k;
    }
    return found;
  }

  /// Canonical text of all entries, used for hashing.
  std::string canonical() const {
    std::string s;
    for (const auto& [k, v] : entries_) s += k + "=" + v + "\n";
    return s;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  void read_file(const std::filesystem::path& path, std::set<std::string>& stack) {
    const auto key = std::filesystem::weakly_canonical(path).string();
    if (stack.count(key)) throw InvalidArgument("malformed config: include cycle at " + path.string());
    std::ifstream in(path);
    if (!in) throw InvalidArgument("malformed config: cannot open " + path.string());
    stack.insert(key);
    read_stream(in, path.parent_path(), path.string(), stack);
    stack.erase(key);
  }

  void read_stream(std::istream& in, const std::filesystem::path& base, const std::string& name, std::set<std::string>& stack) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find_first_of("#;");
      line = trim(hash == std::string::npos ? line : line.substr(0, hash));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']' || line.size() < 3) throw InvalidArgument("malformed config: bad section header at " + name + ":" + std::to_string(lineno));
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw InvalidArgument("malformed config: expected key = value at " + name + ":" + std::to_string(lineno));
      const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
      if (k.empty()) throw InvalidArgument("malformed config: empty key at " + name + ":" + std::to_string(lineno));
      if (k == "include") {
        read_file(base / v, stack);
        continue;
      }
      entries_[section.empty() ? k : section + "." + k] = v;
    }
  }

  std::map<std::string, std::string> entries_;
};

}  // namespace wgff
