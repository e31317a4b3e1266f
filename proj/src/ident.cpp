#include "priml/ident.hpp"

#include <fmt/core.h>

#include <deque>
#include <mutex>

namespace priml {

namespace {

struct InternTable {
  std::mutex mu;
  std::deque<std::string> names;  // deque: stored strings never move
  std::unordered_map<std::string_view, uint32_t> index;
};

InternTable &table() {
  static InternTable t;
  return t;
}

}  // namespace

Ident intern(std::string_view text) {
  InternTable &t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.index.find(text);
  if (it != t.index.end()) return Ident{it->second};
  t.names.emplace_back(text);
  uint32_t id = static_cast<uint32_t>(t.names.size() - 1);
  // Key views into the stored string, which never moves (deque-like growth
  // would be needed if it did; std::string contents are stable once stored).
  t.index.emplace(std::string_view(t.names.back()), id);
  return Ident{id};
}

const std::string &str(Ident id) {
  InternTable &t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  return t.names.at(id.id);
}

void FreshNames::reserve(Ident used) { taken_[str(used)] = true; }

Ident FreshNames::fresh(std::string_view base) {
  std::string b(base);
  int &k = counters_[b];
  for (;;) {
    ++k;
    std::string cand = fmt::format("{}_{}", b, k);
    if (!taken_[cand]) {
      taken_[cand] = true;
      return intern(cand);
    }
  }
}

}  // namespace priml
