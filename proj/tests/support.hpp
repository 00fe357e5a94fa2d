// Shared test helpers: random class-graph generation and independent oracles.
#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

namespace support {

// A randomly wired class graph, kept as a plain model so tests can compute
// expected verdicts without going through the checker under test.
struct GraphModel {
  struct Node {
    int super = -1;
    bool touchesGlobal = false;
    std::vector<int> instantiates;
    std::vector<int> fieldTypes;
    std::vector<int> paramTypes;
  };
  std::vector<Node> nodes;
};

inline GraphModel randomGraph(std::mt19937& rng, int maxClasses = 5) {
  std::uniform_int_distribution<int> nDist(1, maxClasses);
  int n = nDist(rng);
  GraphModel g;
  g.nodes.resize(n);
  auto chance = [&](double p) {
    return std::uniform_real_distribution<double>(0, 1)(rng) < p;
  };
  std::uniform_int_distribution<int> anyClass(0, n - 1);
  for (int i = 0; i < n; ++i) {
    auto& node = g.nodes[i];
    if (i > 0 && chance(0.3)) node.super = std::uniform_int_distribution<int>(0, i - 1)(rng);
    node.touchesGlobal = chance(0.3);
    int edges = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int e = 0; e < edges; ++e) {
      switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0: node.instantiates.push_back(anyClass(rng)); break;
        case 1: node.fieldTypes.push_back(anyClass(rng)); break;
        default: node.paramTypes.push_back(anyClass(rng)); break;
      }
    }
  }
  return g;
}

inline std::string graphToSource(const GraphModel& g) {
  std::string src = "global G { var g: Int = 0 }\n";
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& node = g.nodes[i];
    src += "class K" + std::to_string(i);
    if (node.super >= 0) src += " extends K" + std::to_string(node.super);
    src += " {\n";
    for (size_t f = 0; f < node.fieldTypes.size(); ++f)
      src += "  var f" + std::to_string(f) + ": K" + std::to_string(node.fieldTypes[f]) + "\n";
    int m = 0;
    for (int target : node.paramTypes) {
      src += "  def p" + std::to_string(m++) + "(a: K" + std::to_string(target) +
             "): Unit {}\n";
    }
    src += "  def body(): Unit {\n";
    if (node.touchesGlobal) src += "    G.g = G.g + 1\n";
    int v = 0;
    for (int target : node.instantiates)
      src += "    val t" + std::to_string(v++) + ": K" + std::to_string(target) + " = new K" +
             std::to_string(target) + "()\n";
    src += "  }\n}\n";
  }
  return src;
}

// Greatest consistent conformance assignment by exhaustive enumeration.
// Consistency of a set S: every class in S avoids globals and draws its
// super/instantiation/field/param classes from S. The greatest such set is
// the union of all consistent sets.
inline std::vector<bool> bruteForceOcap(const GraphModel& g) {
  int n = static_cast<int>(g.nodes.size());
  std::vector<bool> best(n, false);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    auto inSet = [&](int i) { return (mask >> i) & 1u; };
    bool consistent = true;
    for (int i = 0; i < n && consistent; ++i) {
      if (!inSet(i)) continue;
      const auto& node = g.nodes[i];
      if (node.touchesGlobal) consistent = false;
      if (node.super >= 0 && !inSet(node.super)) consistent = false;
      for (int t : node.instantiates)
        if (!inSet(t)) consistent = false;
      for (int t : node.fieldTypes)
        if (!inSet(t)) consistent = false;
      for (int t : node.paramTypes)
        if (!inSet(t)) consistent = false;
    }
    if (consistent)
      for (int i = 0; i < n; ++i)
        if (inSet(i)) best[i] = true;
  }
  return best;
}

}  // namespace support
