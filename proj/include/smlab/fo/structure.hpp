#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace smlab::fo {

using Json = nlohmann::ordered_json;

/// A finite relational structure on {0, ..., size-1} with binary relations,
/// unary marks and constants.
struct FiniteStructure {
  std::size_t size = 0;
  std::map<std::string, std::set<std::pair<int, int>>> relations;
  std::map<std::string, std::set<int>> marks;
  std::map<std::string, int> constants;

  bool in_range(int a) const { return a >= 0 && static_cast<std::size_t>(a) < size; }

  bool holds(const std::string& rel, int a, int b) const {
    auto it = relations.find(rel);
    return it != relations.end() && it->second.count({a, b});
  }

  bool marked(const std::string& mark, int a) const {
    auto it = marks.find(mark);
    return it != marks.end() && it->second.count(a);
  }

  /// Throws std::out_of_range naming the first element outside the universe.
  void validate() const {
    for (const auto& [name, pairs] : relations)
      for (const auto& [a, b] : pairs)
        if (!in_range(a) || !in_range(b))
          throw std::out_of_range("relation " + name + " mentions element outside 0.." + std::to_string(size) + "-1");
    for (const auto& [name, elems] : marks)
      for (int a : elems)
        if (!in_range(a)) throw std::out_of_range("mark " + name + " mentions element " + std::to_string(a));
    for (const auto& [name, a] : constants)
      if (!in_range(a)) throw std::out_of_range("constant " + name + " is out of range");
  }
};

inline FiniteStructure structure_from_json(const Json& j) {
  FiniteStructure m;
  m.size = j.at("size").get<std::size_t>();
  if (j.contains("relations"))
    for (const auto& [name, pairs] : j.at("relations").items()) {
      auto& rel = m.relations[name];
      for (const auto& p : pairs) rel.insert({p.at(0).get<int>(), p.at(1).get<int>()});
    }
  if (j.contains("marks"))
    for (const auto& [name, elems] : j.at("marks").items()) {
      auto& mk = m.marks[name];
      for (const auto& a : elems) mk.insert(a.get<int>());
    }
  if (j.contains("constants"))
    for (const auto& [name, a] : j.at("constants").items()) m.constants[name] = a.get<int>();
  m.validate();
  return m;
}

inline Json to_json(const FiniteStructure& m) {
  Json j;
  j["size"] = m.size;
  j["relations"] = Json::object();
  for (const auto& [name, pairs] : m.relations) {
    Json arr = Json::array();
    for (const auto& [a, b] : pairs) arr.push_back({a, b});
    j["relations"][name] = arr;
  }
  j["marks"] = Json::object();
  for (const auto& [name, elems] : m.marks) j["marks"][name] = elems;
  j["constants"] = Json::object();
  for (const auto& [name, a] : m.constants) j["constants"][name] = a;
  return j;
}

}  // namespace smlab::fo
