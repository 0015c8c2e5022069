#pragma once

// Structured key:value text. Lines are "key: value"; "[name]" starts a
// section whose keys are stored as "name.key"; '#' starts a comment.

#include <map>
#include <string>

#include "wander/core.hpp"

namespace wander {

struct KeyValues {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  /// "re im" pair.
  cplx get_complex(const std::string& key) const;
  cplx get_complex(const std::string& key, cplx fallback) const;
};

/// Throws Config on malformed lines.
KeyValues parse_key_values(const std::string& text);
/// Throws Io when the file cannot be opened.
KeyValues read_key_values(const std::string& path);

}  // namespace wander
