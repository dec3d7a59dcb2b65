#include <doctest.h>

#include <algorithm>
#include <set>
#include <tuple>

#include "loopcorr/diagrams.hpp"
#include "loopcorr/error.hpp"
#include "loopcorr/renorm.hpp"

using namespace loopcorr;

namespace {

SectorConfig cfg_for(Realization r, Sector s = Sector::Nonunitary) {
  SectorConfig c;
  c.realization = r;
  c.sector = s;
  return c;
}

using EdgeKey = std::tuple<int, int, int>;

std::set<EdgeKey> edge_set(const Diagram& d) {
  std::set<EdgeKey> s;
  for (auto& e : d.edges) s.insert({int(e.kind), e.source, e.target});
  return s;
}

bool contains(const CurrentWord& w, const std::vector<TermKind>& kinds, const std::set<EdgeKey>& edges) {
  bool found = false;
  for_each_diagram(w, cfg_for(Realization::K), [&](const Diagram& d) {
    if (found) return;
    for (size_t i = 0; i < kinds.size(); ++i)
      if (d.vertices[i].kind != kinds[i]) return;
    if (edge_set(d) == edges) found = true;
  });
  return found;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("parse_word examples") {
  auto w = parse_word("Jp(1) Jm(2)");
  REQUIRE(w.size() == 2);
  CHECK(w.items[0].current == Current::Jp);
  CHECK(w.items[0].label == 1);
  CHECK(w.items[1].current == Current::Jm);
  CHECK(w.items[1].label == 2);
  CHECK(w.realization() == Realization::K);

  CHECK(code_of([] { parse_word("Jp(1) E(2)"); }) == ErrorCode::RealizationMismatch);
  try {
    parse_word("Jp(1");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.offset() == 5);
  }
  CHECK(code_of([] { parse_word("Jp(1) Jm(1)"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_word("Jq(1)"); }) == ErrorCode::ParseError);
  CHECK(parse_word("").empty());
  CHECK(parse_word("E(1) F(2) H(3)").realization() == Realization::A);
}

TEST_CASE("render and parse round trip") {
  for (const char* s : {"Jp(1) Jm(2) J3(3)", "E(1) F(2) H(3)", "J3(10)", "H(4) E(2) F(7) E(1)"}) {
    auto w = parse_word(s);
    CHECK(render_word(w) == s);
    CHECK(parse_word(render_word(w)) == w);
  }
}

TEST_CASE("star word reverses and swaps charges") {
  int sign = 0;
  auto s = star_word(parse_word("Jp(1) J3(2) Jm(3)"), &sign);
  CHECK(render_word(s) == "Jp(3) J3(2) Jm(1)");
  CHECK(sign == -1);
  star_word(parse_word("E(1) F(2)"), &sign);
  CHECK(sign == 1);
}

TEST_CASE("single J3 has only edgeless diagrams") {
  auto ds = enumerate_diagrams(parse_word("J3(1)"), cfg_for(Realization::K));
  CHECK(!ds.empty());
  for (auto& d : ds) CHECK(d.edges.empty());
  // bare a and b terms vanish; the linear field has zero vacuum expectation
  CHECK(evaluate_correlator(parse_word("J3(1)"), RenormScheme::drop_loops(cfg_for(Realization::K))).is_zero());
}

TEST_CASE("two-point loop in <Jp Jm>") {
  auto w = parse_word("Jp(1) Jm(2)");
  std::set<EdgeKey> loop = {{int(EdgeKind::Solid), 0, 1}, {int(EdgeKind::Solid), 1, 0}};
  CHECK(contains(w, {TermKind::AlphaA, TermKind::BAlpha}, loop));
  bool seen = false;
  for (auto& d : enumerate_diagrams(w, cfg_for(Realization::K))) {
    if (edge_set(d) != loop) continue;
    seen = true;
    auto census = loop_census(d);
    REQUIRE(census.size() == 1);
    CHECK(census[0].loops == 1);
    CHECK(census[0].cycle == std::vector<int>{0, 1});
  }
  CHECK(seen);
}

TEST_CASE("the two sample six-point diagrams are enumerated") {
  auto w = parse_word("Jp(1) Jm(2) Jm(3) Jp(4) Jm(5) Jp(6)");
  const int S = int(EdgeKind::Solid), W = int(EdgeKind::Wavy);
  // a-lines run rightward from AlphaA vertices, b-lines leftward from BAlpha vertices
  CHECK(contains(w,
                 {TermKind::AlphaA, TermKind::AlphaA, TermKind::BAlpha, TermKind::BAlpha, TermKind::BAlpha,
                  TermKind::BAlpha},
                 {{S, 0, 1}, {S, 2, 1}, {S, 1, 3}, {S, 3, 2}, {S, 4, 2}, {S, 5, 4}}));
  CHECK(contains(w,
                 {TermKind::AlphaA, TermKind::RhoAlpha, TermKind::RhoAlpha, TermKind::BAlpha, TermKind::BAlpha,
                  TermKind::BAlpha},
                 {{S, 0, 1}, {W, 1, 2}, {S, 3, 2}, {S, 4, 1}, {S, 5, 4}}));
}

TEST_CASE("loop census on the first sample diagram") {
  auto w = parse_word("Jp(1) Jm(2) Jm(3) Jp(4) Jm(5) Jp(6)");
  std::set<EdgeKey> target = {{0, 0, 1}, {0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {0, 4, 2}, {0, 5, 4}};
  bool seen = false;
  for_each_diagram(w, cfg_for(Realization::K), [&](const Diagram& d) {
    if (edge_set(d) != target) return;
    seen = true;
    auto c = loop_census(d);
    REQUIRE(c.size() == 1);
    CHECK(c[0].vertices.size() == 6);
    CHECK(c[0].loops == 1);
    CHECK(c[0].cycle == std::vector<int>{1, 2, 3});
  });
  CHECK(seen);
}

TEST_CASE("tree diagrams have no loops") {
  auto w = parse_word("Jp(1) J3(2) Jm(3)");
  size_t trees = 0;
  for (auto& d : enumerate_diagrams(w, cfg_for(Realization::K))) {
    auto c = loop_census(d);
    int loops = 0;
    for (auto& r : c) loops += r.loops;
    if (loops == 0) {
      ++trees;
      for (auto& r : c) CHECK(r.cycle.empty());
    }
  }
  CHECK(trees > 0);
}

TEST_CASE("DOT output") {
  Diagram empty;
  auto dot = to_dot(empty);
  CHECK(dot.find("digraph diagram {") == 0);
  CHECK(dot.back() == '\n');

  auto w = parse_word("Jp(1) Jm(2)");
  for (auto& d : enumerate_diagrams(w, cfg_for(Realization::K))) {
    if (d.edges.size() != 2 || d.edges[0].kind != EdgeKind::Solid) continue;
    auto s = to_dot(d);
    CHECK(s.find("label=\"+\"") != std::string::npos);
    CHECK(s.find("label=\"−\"") != std::string::npos);
    CHECK(s.find("1 -> 2") != std::string::npos);
    CHECK(s.find("2 -> 1") != std::string::npos);
    break;
  }
  // wavy and dotted styles
  bool wavy = false, dotted = false;
  for (auto& d : enumerate_diagrams(w, cfg_for(Realization::K, Sector::Unitary))) {
    for (auto& e : d.edges) {
      auto s = to_dot(d);
      if (e.kind == EdgeKind::Wavy) wavy = wavy || s.find("class=wavy") != std::string::npos;
      if (e.kind == EdgeKind::Dotted) dotted = dotted || s.find("style=dashed") != std::string::npos;
    }
  }
  CHECK(wavy);
  CHECK(dotted);
}

TEST_CASE("enumeration is deterministic") {
  auto w = parse_word("Jp(1) Jm(2) J3(3) Jm(4)");
  auto a = enumerate_diagrams(w, cfg_for(Realization::K, Sector::Unitary));
  auto b = enumerate_diagrams(w, cfg_for(Realization::K, Sector::Unitary));
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(diagram_json(a[i]).dump() == diagram_json(b[i]).dump());
}

TEST_CASE("weights: empty word, charge rule, single tree edge") {
  const auto k = cfg_for(Realization::K);
  auto scheme = RenormScheme::drop_loops(k);
  auto one = evaluate_correlator(CurrentWord{}, scheme);
  CHECK(one == DistributionExpr::scalar(Realization::K, Poly(1)));

  CHECK(evaluate_correlator(parse_word("Jp(1) Jp(2) Jm(3)"), scheme).is_zero());
  CHECK(evaluate_correlator(parse_word("Jp(1) Jp(2)"), scheme).is_zero());

  // a from (i/2) alpha+ a at 1 hits alpha- of (-rho alpha-) at 2; rho is left unpaired
  auto w = parse_word("Jp(1) Jm(2)");
  bool seen = false;
  for (auto& d : enumerate_diagrams(w, k)) {
    if (d.vertices[0].kind != TermKind::AlphaA || d.vertices[1].kind != TermKind::RhoAlpha || d.edges.size() != 1)
      continue;
    seen = true;
    DistributionExpr expect(Realization::K);
    expect.add_labels({1, 2});
    expect.add_term(Term{Poly(CQ(Q(0), Q(-1, 2))) * Poly::variable(var::p), {{1, 2, 0}}, {}, {{1, 1}, {2, -1}}});
    CHECK(canonicalize(diagram_weight(d, k, w)) == canonicalize(expect));
  }
  CHECK(seen);
}

TEST_CASE("no connected diagram carries two loops up to four points") {
  for (auto r : {Realization::K, Realization::A}) {
    const std::vector<Current> alpha = r == Realization::K ? std::vector<Current>{Current::J3, Current::Jp, Current::Jm}
                                                           : std::vector<Current>{Current::E, Current::F, Current::H};
    for (int len = 1; len <= 4; ++len) {
      int total = 1;
      for (int i = 0; i < len; ++i) total *= 3;
      for (int code = 0; code < total; ++code) {
        CurrentWord w;
        int c = code;
        for (int i = 0; i < len; ++i) w.items.push_back({alpha[c % 3], i + 1, 1.0}), c /= 3;
        for_each_diagram(w, cfg_for(r, Sector::Unitary), [&](const Diagram& d) {
          for (auto& comp : components(d)) CHECK_MESSAGE(comp.loops <= 1, render_word(w));
        });
      }
    }
  }
}
