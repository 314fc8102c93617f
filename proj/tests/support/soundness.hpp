#pragma once

// Containment of concrete observations in abstract environments.

#include <string>
#include <vector>

#include "grafcet/analysis.hpp"
#include "grafcet/oracle.hpp"

namespace grafcet::testing {

inline bool contains(const AbstractEnv& env, const Store& s) {
  if (env.is_bottom()) return false;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!env.get(i).contains(s[i])) return false;
  return true;
}

inline std::string show(const Store& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + std::to_string(s[i]);
  return out + ")";
}

/// Every concrete (node, store) pair outside the abstract environment.
inline std::vector<std::string> escapes(const AnalysisResult& r, const Observations& obs) {
  std::vector<std::string> out;
  for (const auto& [id, stores] : obs.at) {
    auto n = r.flow.find(id);
    if (!n) {
      out.push_back("node " + id + " missing from the flow");
      continue;
    }
    for (const auto& s : stores)
      if (!contains(r.env_before[*n], s))
        out.push_back(id + ": " + show(s) + " not in " +
                      (r.env_before[*n].is_bottom() ? std::string("bottom") : [&] {
                        std::string e;
                        for (std::size_t i = 0; i < r.env_before[*n].size(); ++i)
                          e += r.env_before[*n].get(i).to_string();
                        return e;
                      }()));
  }
  return out;
}

}  // namespace grafcet::testing
