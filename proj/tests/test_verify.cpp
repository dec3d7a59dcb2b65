#include <doctest.h>

#include <cmath>

#include "loopcorr/error.hpp"
#include "loopcorr/verify.hpp"

using namespace loopcorr;

namespace {

SectorConfig cfg_for(Realization r, Sector s = Sector::Nonunitary) {
  SectorConfig c;
  c.realization = r;
  c.sector = s;
  return c;
}

std::vector<std::vector<int>> charge_words(int max_len) {
  std::vector<std::vector<int>> out;
  for (int len = 1; len <= max_len; ++len)
    for (int code = 0; code < (1 << len); ++code) {
      std::vector<int> w;
      for (int i = 0; i < len; ++i) w.push_back(code >> i & 1 ? 1 : -1);
      out.push_back(w);
    }
  return out;
}

Prim exp_prim(Realization r, int charge) {
  if (r == Realization::K) return charge > 0 ? Prim::alpha_p : Prim::alpha_m;
  return charge > 0 ? Prim::e_p : Prim::e_m;
}

bool close(cplx a, cplx b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("oracle basics") {
  OracleModel m;
  CHECK(gaussian_oracle({}, m) == cplx(1, 0));
  CHECK(gaussian_oracle({{Prim::alpha_p, 0.3}, {Prim::alpha_p, 1.2}}, m) == cplx(0, 0));
  m.realization = Realization::A;
  // <e+(u) e-(v)> = exp(N(0) - N(u-v)) with truncated kernels
  auto v = gaussian_oracle({{Prim::e_p, 0.3}, {Prim::e_m, 1.2}}, m);
  auto c = closed_form_value(Realization::A, {1, -1}, {0.3, 1.2}, {1, 1}, m.seq, m.modes);
  CHECK(close(v, c, 1e-10));
}

TEST_CASE("oracle exponents match the closed forms exactly") {
  const auto seq = XiSequence::geometric(Q(1, 2));
  const int triples[][3] = {{3, 4, 5}, {5, 12, 13}, {8, 15, 17}, {7, 24, 25}};
  const Q radii[] = {Q(1), Q(1, 2), Q(2, 3), Q(3, 4)};
  for (auto r : {Realization::K, Realization::A})
    for (auto& cw : charge_words(4)) {
      std::vector<ExactPoint> pts;
      for (size_t i = 0; i < cw.size(); ++i) {
        auto& t = triples[i];
        CQ z = rational_rotation(t[0], t[1], t[2], int(i) + 1) * CQ(radii[i]);
        pts.push_back({cw[i], z});
      }
      auto a = oracle_exponent(r, pts, seq, 6);
      auto b = closed_form_exponent(r, pts, seq, 6);
      CHECK(a.zero == b.zero);
      if (!a.zero) CHECK(a.exponent == b.exponent);
    }
}

TEST_CASE("float oracle matches the closed forms") {
  for (auto r : {Realization::K, Realization::A}) {
    OracleModel m;
    m.realization = r;
    for (auto& cw : charge_words(4)) {
      std::vector<OracleFactor> f;
      std::vector<double> ang, rad;
      for (size_t i = 0; i < cw.size(); ++i) {
        ang.push_back(0.4 + 0.9 * double(i));
        rad.push_back(1.0 - 0.1 * double(i));
        f.push_back({exp_prim(r, cw[i]), ang.back(), rad.back()});
      }
      CHECK(close(gaussian_oracle(f, m), closed_form_value(r, cw, ang, rad, m.seq, m.modes), 1e-8));
    }
  }
}

TEST_CASE("engine exponential factor matches the oracle inside the disc") {
  for (auto r : {Realization::K, Realization::A}) {
    OracleModel m;
    m.realization = r;
    KernelBackend kb(m.seq, m.modes, r);
    for (auto& cw : charge_words(4)) {
      DistributionExpr e(r);
      Term t{Poly(1), {}, {}, {}};
      std::vector<OracleFactor> f;
      std::map<int, double> ang;
      for (size_t i = 0; i < cw.size(); ++i) {
        const int label = int(i) + 1;
        t.gauss.push_back({label, cw[i]});
        e.add_label(label);
        e.set_radius(label, 0.95 - 0.1 * double(i));
        ang[label] = 0.2 + 1.3 * double(i);
        f.push_back({exp_prim(r, cw[i]), ang[label], 0.95 - 0.1 * double(i)});
      }
      e.add_term(t);
      auto lhs = evaluate_at(canonicalize(e), ang, kb, {});
      CHECK(close(lhs, gaussian_oracle(f, m), 1e-8));
    }
  }
}

TEST_CASE("engine with raw loops matches the operator oracle inside the disc") {
  const char* words[] = {"Jp(1) Jm(2)",       "J3(1) J3(2)",       "Jm(1) Jp(2) J3(3)", "Jp(1) Jp(2) Jm(3) Jm(4)",
                         "E(1) F(2)",         "H(1) E(2) F(3)",    "F(1) E(2) H(3)",    "E(1) E(2) F(3) F(4)"};
  for (auto s : {Sector::Nonunitary, Sector::Unitary})
    for (const char* text : words) {
      auto w = parse_word(text);
      const Realization r = w.realization();
      std::map<int, double> ang;
      for (size_t i = 0; i < w.size(); ++i) {
        w.items[i].radius = 0.68 - 0.05 * double(i);
        ang[w.items[i].label] = 0.5 + 1.7 * double(i);
      }
      RenormScheme raw = RenormScheme::drop_loops(cfg_for(r, s));
      raw.policy = Policy::Raw;
      OracleModel m;
      m.realization = r;
      m.sector = s;
      m.modes = 24;
      m.kappa = 0.7;
      m.p = 0.3;
      KernelBackend kb(m.seq, m.modes, r);
      ScalarValues vals{{var::kappa, m.kappa}, {var::p, m.p}};
      auto engine = evaluate_at(evaluate_correlator(w, raw), ang, kb, vals);
      CHECK_MESSAGE(close(engine, oracle_correlator(w, m, ang), 1e-9), std::string(text));
    }
}

TEST_CASE("Hermiticity residuals vanish") {
  auto k = cfg_for(Realization::K);
  for (auto s : {RenormScheme::drop_loops(k), RenormScheme::mu_family(k, {{2, Poly(1)}, {3, Poly(CQ(Q(1, 2)))}}, Poly(0))})
    for (const char* text : {"Jp(1) Jm(2)", "J3(1)", "Jp(1) J3(2) Jm(3)", "Jm(1) Jp(2) Jp(3) Jm(4)"})
      CHECK_MESSAGE(check_hermiticity(parse_word(text), s).is_zero(), std::string(text));
}

TEST_CASE("mu independence of commutators") {
  auto k = cfg_for(Realization::K);
  auto zero = RenormScheme::mu_family(k, {}, Poly(0));
  auto other = RenormScheme::mu_family(k, {{2, Poly(1)}, {3, Poly(CQ(Q(1, 2)))}}, Poly(CQ(Q(1, 3))));
  auto v = mu_independence(commutator_cases(Realization::K, 0), zero, other);
  CHECK(v.pass);
  CHECK(v.cases == 9);

  // [Jp,Jm] against a J3 spectator: the right-hand side <J3 J3> has no loops
  CommutatorCase c;
  c.xi = Current::Jp;
  c.eta = Current::Jm;
  c.suffix = parse_word("J3(3)");
  CHECK(mu_independence({c}, zero, other).pass);
}

TEST_CASE("commutators inherit mu through the right-hand side correlator") {
  // [H(1),E(2)] = 2 E(2) delta holds for every family, and <E(2) E(3)> carries a two-point loop
  auto a = cfg_for(Realization::A);
  auto zero = RenormScheme::mu_family(a, {}, Poly(0));
  auto one = RenormScheme::mu_family(a, {{2, Poly(1)}}, Poly(0));
  CommutatorCase c;
  c.xi = Current::H;
  c.eta = Current::E;
  c.suffix = parse_word("E(3)");
  for (auto* s : {&zero, &one}) CHECK(canonicalize(commutator_in_correlator(c, *s) - relation_rhs(c, *s)).is_zero());
  CHECK_FALSE(mu_independence({c}, zero, one).pass);
}

TEST_CASE("affine relations without context") {
  auto k = check_affine_relations(Realization::K, 0, RenormScheme::drop_loops(cfg_for(Realization::K)));
  CHECK(k.failed == 0);
  auto a = check_affine_relations(Realization::A, 0, RenormScheme::drop_loops(cfg_for(Realization::A)));
  for (auto& r : a.results)
    if (r.kase.xi != Current::H || r.kase.eta != Current::H) CHECK_MESSAGE(r.pass, r.relation);
}

TEST_CASE("commutator examples") {
  auto k = RenormScheme::drop_loops(cfg_for(Realization::K));
  CommutatorCase c;
  c.xi = Current::Jp;
  c.eta = Current::Jp;
  CHECK(commutator_in_correlator(c, k).is_zero());
  c.xi = c.eta = Current::J3;
  CHECK(commutator_in_correlator(c, k) ==
        DistributionExpr::delta(Realization::K, 1, 2, 1, Poly::variable(var::kappa) * Poly(CQ(Q(0), Q(-8)))));
}

TEST_CASE("Gram matrices") {
  auto k = RenormScheme::drop_loops(cfg_for(Realization::K));
  NumericSetup num;
  num.modes = 4;
  num.smear.grid = 40;
  auto one = gram_matrix({GramEntry{}}, k, num);
  REQUIRE(one.matrix.size() == 1);
  CHECK(std::abs(one.matrix[0][0] - cplx(1, 0)) < 1e-12);
  CHECK(one.positive == 1);

  GramEntry jp{parse_word("Jp(1)"), {{1, TestPoly::mode(1)}}};
  auto dup = gram_matrix({jp, jp}, k, num);
  CHECK(dup.zero >= 1);
  CHECK(dup.hermiticity_residual < 1e-10);

  GramEntry j3{parse_word("J3(1)"), {{1, TestPoly::mode(-1)}}};
  GramEntry pair{parse_word("Jp(1) Jm(2)"), {{1, TestPoly::mode(1)}, {2, TestPoly::mode(2)}}};
  auto g = gram_matrix({GramEntry{}, jp, j3, pair}, k, num);
  CHECK(g.hermiticity_residual < 1e-10);
  CHECK(g.positive + g.negative + g.zero == 4);
  CHECK(g.to_json()["signature"]["positive"].get<int>() == g.positive);
}
