#include "wander/textio.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wander {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || !trim(end).empty()) throw Error(ErrorKind::Config, key + ": not a number: " + text);
  return v;
}

}  // namespace

std::string KeyValues::get(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw Error(ErrorKind::Config, "missing key " + key);
  return it->second;
}

std::string KeyValues::get(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double KeyValues::get_double(const std::string& key) const { return to_double(key, get(key)); }

double KeyValues::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KeyValues::get_int(const std::string& key) const {
  const std::string text = get(key);
  char* end = nullptr;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  if (end == text.c_str() || !trim(end).empty()) throw Error(ErrorKind::Config, key + ": not an integer: " + text);
  return v;
}

long long KeyValues::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

cplx KeyValues::get_complex(const std::string& key) const {
  std::istringstream in(get(key));
  std::string re, im;
  if (!(in >> re)) throw Error(ErrorKind::Config, key + ": empty complex value");
  if (!(in >> im)) im = "0";
  return {to_double(key, re), to_double(key, im)};
}

cplx KeyValues::get_complex(const std::string& key, cplx fallback) const {
  return has(key) ? get_complex(key) : fallback;
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line, section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::Config, "line " + std::to_string(number) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorKind::Config, "line " + std::to_string(number) + ": expected key: value");
    std::string key = trim(line.substr(0, colon));
    if (!section.empty()) key = section + "." + key;
    kv.values[key] = trim(line.substr(colon + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

}  // namespace wander
