#include <doctest.h>

#include "loopcorr/algebra.hpp"
#include "loopcorr/error.hpp"

using namespace loopcorr;

namespace {

SectorConfig kcfg(Sector s = Sector::Nonunitary) {
  SectorConfig c;
  c.realization = Realization::K;
  c.sector = s;
  return c;
}

SectorConfig acfg(Sector s = Sector::Nonunitary) {
  SectorConfig c;
  c.realization = Realization::A;
  c.sector = s;
  return c;
}

DistributionExpr single(Realization r, Term t) {
  DistributionExpr e(r);
  e.add_labels({1, 2});
  e.add_term(t);
  return canonicalize(e);
}

}  // namespace

TEST_CASE("current expansions") {
  auto j3 = expand_current(Current::J3, kcfg());
  REQUIRE(j3.size() == 2);
  CHECK(j3[0].factors == std::vector<Prim>{Prim::h});
  CHECK(j3[0].coeff == Poly(CQ(Q(0), Q(2))));
  CHECK(j3[1].factors == std::vector<Prim>{Prim::am_d_ap});
  CHECK(j3[1].coeff == Poly::variable(var::kappa) * CQ(-2));

  auto jp = expand_current(Current::Jp, kcfg());
  REQUIRE(jp.size() == 4);
  CHECK(jp[0].factors == std::vector<Prim>{Prim::b, Prim::alpha_p});
  CHECK(jp[0].coeff == Poly(CQ(Q(0), Q(1, 2))));
  CHECK(jp[1].factors == std::vector<Prim>{Prim::alpha_p, Prim::a});
  CHECK(jp[2].factors == std::vector<Prim>{Prim::d_alpha_p});
  CHECK(jp[2].coeff == Poly::variable(var::kappa));
  CHECK(jp[3].factors == std::vector<Prim>{Prim::rho, Prim::alpha_p});
  CHECK(jp[3].coeff == Poly(1));

  auto split = expand_current(Current::J3, kcfg(), true);
  REQUIRE(split.size() == 3);
  CHECK(split[0].coeff == Poly(CQ::I()));

  try {
    expand_current(Current::E, kcfg());
    FAIL("expected RealizationMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RealizationMismatch);
  }
}

TEST_CASE("primitive commutators") {
  auto c = primitive_commutator(Prim::a, 1, Prim::alpha_p, 2, kcfg());
  CHECK(c == single(Realization::K, Term{Poly(-1), {{1, 2, 0}}, {Fn{FnKind::Prim, 0, 2, -1, int(Prim::alpha_p)}}, {}}));
  CHECK(primitive_commutator(Prim::a, 1, Prim::b, 2, kcfg()).is_zero());
  auto u = primitive_commutator(Prim::a, 1, Prim::b, 2, kcfg(Sector::Unitary));
  CHECK(u == single(Realization::K, Term{Poly(1), {}, {Fn{FnKind::Dker, 0, 1, 2, 0}}, {}}));
  auto l = primitive_commutator(Prim::a, 1, Prim::ap_d_am, 2, kcfg());
  CHECK(l == single(Realization::K, Term{Poly(-1), {{1, 2, 1}}, {}, {}}));
  auto m = primitive_commutator(Prim::a, 1, Prim::am_d_ap, 2, kcfg());
  CHECK(m == single(Realization::K, Term{Poly(1), {{1, 2, 1}}, {}, {}}));
  // [h(u), e+(v)] = i delta(u-v) e+(v)
  auto he = primitive_commutator(Prim::h, 1, Prim::e_p, 2, acfg());
  CHECK(he == single(Realization::A, Term{Poly(CQ::I()), {{1, 2, 0}}, {Fn{FnKind::Prim, 0, 2, -1, int(Prim::e_p)}}, {}}));
  // [h(u), alpha-(v)] = +delta alpha-
  auto ha = primitive_commutator(Prim::h, 1, Prim::alpha_m, 2, kcfg());
  CHECK(ha == single(Realization::K, Term{Poly(1), {{1, 2, 0}}, {Fn{FnKind::Prim, 0, 2, -1, int(Prim::alpha_m)}}, {}}));
  auto rr = primitive_commutator(Prim::rho, 1, Prim::rho, 2, kcfg());
  CHECK(rr == single(Realization::K, Term{Poly::variable(var::kappa) * CQ(Q(0), Q(-2)), {{1, 2, 1}}, {}, {}}));
  auto ra = primitive_commutator(Prim::rho, 1, Prim::rho, 2, acfg());
  CHECK(ra == single(Realization::A, Term{Poly::variable(var::kappa) * CQ(Q(0), Q(2)), {{1, 2, 1}}, {}, {}}));
  CHECK(primitive_commutator(Prim::alpha_p, 1, Prim::alpha_m, 2, kcfg()).is_zero());
}

TEST_CASE("Jacobi identity on all primitive triples") {
  for (auto cfg : {kcfg(), acfg(), kcfg(Sector::Unitary), acfg(Sector::Unitary)}) {
    auto f = jacobi_failures(cfg);
    CHECK(f.empty());
    for (auto& s : f) MESSAGE(s);
  }
}

TEST_CASE("sectors agree away from the a,b pair") {
  for (int i = 0; i < prim_count; ++i)
    for (int j = 0; j < prim_count; ++j) {
      Prim x = static_cast<Prim>(i), y = static_cast<Prim>(j);
      auto deriv = [](Prim p) { return p == Prim::a || p == Prim::b || p == Prim::h; };
      if (deriv(x) && deriv(y)) continue;
      for (Realization r : {Realization::A, Realization::K}) {
        if (!prim_allowed(x, r) || !prim_allowed(y, r)) continue;
        SectorConfig n = r == Realization::K ? kcfg() : acfg();
        SectorConfig u = r == Realization::K ? kcfg(Sector::Unitary) : acfg(Sector::Unitary);
        CHECK(primitive_commutator(x, 1, y, 2, n) == primitive_commutator(x, 1, y, 2, u));
      }
    }
}

TEST_CASE("star structure of the composite currents") {
  for (Current c : {Current::J3, Current::Jp, Current::Jm, Current::E, Current::F, Current::H}) {
    auto v = star_check(c);
    CHECK_MESSAGE(v.pass, v.relation << " residual " << v.residual);
    CHECK(star_involution(c));
  }
}

TEST_CASE("classical A-realization") {
  for (auto& v : classical_check(Realization::A)) CHECK_MESSAGE(v.pass, v.relation << ": " << v.residual);
  for (auto& v : classical_check(Realization::A, Poly(0))) CHECK(v.pass);
}

TEST_CASE("classical K-realization closes with the opposite orientation") {
  // With [h, a+] = -a+, J+ reduces to a+ (ih - i/2 - lambda), so [J3,J+] = -2i J+
  // and [J+,J-] = +i J3. The literal relations leave these residuals.
  auto v = classical_check(Realization::K);
  REQUIRE(v.size() == 6);
  CHECK(v[0].residual == "(-2 + 4i*lambda) g^1 h^0 + (4) g^1 h^1");
  CHECK(v[1].residual == "(-2 + 4i*lambda) g^-1 h^0 + (-4) g^-1 h^1");
  CHECK(v[2].residual == "(-4) g^0 h^1");
  for (int i = 3; i < 6; ++i) CHECK(v[i].pass);
}
