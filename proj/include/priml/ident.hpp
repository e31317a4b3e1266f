#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace priml {

// Interned identifier. Comparison is O(1); the table is append-only and
// process-wide.
struct Ident {
  uint32_t id = 0;

  bool operator==(const Ident &) const = default;
  bool operator<(const Ident &o) const { return id < o.id; }
};

Ident intern(std::string_view text);
const std::string &str(Ident id);

// Deterministic fresh-name supply. Seeded with every identifier that occurs
// in the unit being processed so generated names never collide with user
// names. fresh("p") yields p_1, p_2, ... skipping taken names.
class FreshNames {
 public:
  void reserve(Ident used);
  Ident fresh(std::string_view base);

 private:
  std::unordered_map<std::string, int> counters_;
  std::unordered_map<std::string, bool> taken_;
};

}  // namespace priml

template <>
struct std::hash<priml::Ident> {
  size_t operator()(const priml::Ident &i) const noexcept {
    return std::hash<uint32_t>{}(i.id);
  }
};
