#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopcorr/algebra.hpp"
#include "loopcorr/distributions.hpp"
#include "loopcorr/word.hpp"

namespace loopcorr {

struct Vertex {
  int position = 0;  // place in the word, 0-based
  int label = 0;     // insertion index
  Current current = Current::J3;
  TermKind kind = TermKind::Linear;
  int charge = 0;
  Poly coeff;
};

enum class EdgeKind { Solid, Wavy, Dotted };
const char* edge_kind_name(EdgeKind k);

// source/target are word positions. Solid edges run from the vertex owning the
// a (rightward) or b (leftward) operator to the vertex whose exponential or
// linear field it hits. Dotted edges run from the a end to the b end. Wavy
// edges run from the left rho vertex to the right one.
struct Edge {
  EdgeKind kind = EdgeKind::Solid;
  int source = 0;
  int target = 0;
  bool derivative = false;  // target is a kappa-derivative or linear terminal
};

struct Diagram {
  Realization realization = Realization::K;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
};

// Calls `visit` for every diagram in canonical order. The reference is only
// valid during the call.
void for_each_diagram(const CurrentWord& word, const SectorConfig& cfg,
                      const std::function<void(const Diagram&)>& visit);
std::vector<Diagram> enumerate_diagrams(const CurrentWord& word, const SectorConfig& cfg);

struct ComponentRecord {
  std::vector<int> vertices;  // positions
  int loops = 0;              // cyclomatic number
  std::vector<int> cycle;     // positions on the loop in word order, empty for trees
};

// Throws StructuralViolation when a component carries two or more loops.
std::vector<ComponentRecord> loop_census(const Diagram& d);
// Same data without throwing.
std::vector<ComponentRecord> components(const Diagram& d);

// Loop substitution applied while assembling the weight: nullptr keeps the
// regularized delta cycle; otherwise every loop of length k is replaced by
// scale(k) times a chain of deltas in word order.
using LoopScale = std::function<Poly(int k)>;

// mu * delta(u1-u2) ... delta(u_{k-1}-u_k) over labels in word order
Term loop_chain(const std::vector<int>& labels, const Poly& mu);

DistributionExpr diagram_weight(const Diagram& d, const SectorConfig& cfg, const CurrentWord& word,
                                const LoopScale* loops = nullptr);

std::string to_dot(const Diagram& d);
nlohmann::json diagram_json(const Diagram& d);

}  // namespace loopcorr
