#include <doctest.h>

#include <cmath>
#include <random>

#include "loopcorr/distributions.hpp"
#include "loopcorr/error.hpp"

using namespace loopcorr;

namespace {

const Realization K = Realization::K;

Term term(const Poly& c, std::vector<Delta> d, std::vector<Fn> f = {}, std::vector<Slot> g = {}) {
  return Term{c, std::move(d), std::move(f), std::move(g)};
}

DistributionExpr expr(std::initializer_list<Term> ts, std::set<int> labels) {
  DistributionExpr e(K);
  e.add_labels(labels);
  for (auto& t : ts) e.add_term(t);
  return e;
}

Fn kern(int m, int x, int y) { return Fn{FnKind::Kern, m, x, y, 0}; }
Fn prim(int m, int x) { return Fn{FnKind::Prim, m, x, -1, 7}; }
Fn wave(int m, int x, int y) { return Fn{FnKind::Wav, m, x, y, 0}; }

std::map<int, TestPoly> tests_for(std::mt19937& rng, std::set<int> labels, int deg) {
  std::uniform_real_distribution<double> U(-1, 1);
  std::map<int, TestPoly> t;
  for (int l : labels) {
    TestPoly p;
    for (int n = -deg; n <= deg; ++n) p.coeff[n] = cplx(U(rng), U(rng));
    t[l] = p;
  }
  return t;
}

}  // namespace

TEST_CASE("moving the coefficient onto the representative variable") {
  // f(v) delta'(u-v) = f(u) delta'(u-v) + f'(u) delta(u-v)
  auto lhs = canonicalize(expr({term(Poly(1), {{1, 2, 1}}, {prim(0, 2)})}, {1, 2}));
  auto rhs = canonicalize(expr({term(Poly(1), {{1, 2, 1}}, {prim(0, 1)}), term(Poly(1), {{1, 2, 0}}, {prim(1, 1)})}, {1, 2}));
  CHECK(lhs == rhs);
  REQUIRE(lhs.size() == 2);
}

TEST_CASE("pairing identity checked by smearing against an explicit integral") {
  // e = delta'(u1-u2) N(u2-u3); pairing = mean over (u,w) of phi1(u) d/du[N(u-w) phi2(u)] phi3(w)
  auto g = XiSequence::geometric(Q(1, 2));
  KernelBackend kb(g, 6, K);
  std::mt19937 rng(3);
  auto tests = tests_for(rng, {1, 2, 3}, 2);
  auto e = expr({term(Poly(1), {{1, 2, 1}}, {kern(0, 2, 3)})}, {1, 2, 3});
  cplx s = smear(e, tests, kb, {});
  const int M = 64;
  cplx direct = 0;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      double u = 2 * M_PI * i / M, w = 2 * M_PI * j / M;
      cplx d = kb.cov(1, u - w) * tests[2](u) + kb.cov(0, u - w) * tests[2].derivative(1)(u);
      direct += tests[1](u) * d * tests[3](w);
    }
  direct /= double(M * M);
  CHECK(std::abs(s - direct) < 1e-12);
}

TEST_CASE("additive inverse cancels") {
  auto e = expr({term(Poly::variable(var::kappa), {{1, 2, 1}}, {kern(1, 1, 3)})}, {1, 2, 3});
  CHECK(canonicalize(e - e).is_zero());
}

TEST_CASE("squared delta is a singular product") {
  auto e = expr({term(Poly(1), {{1, 2, 0}, {1, 2, 0}})}, {1, 2});
  try {
    canonicalize(e);
    FAIL("expected SingularProduct");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::SingularProduct);
  }
}

TEST_CASE("equal distributions written differently canonicalize identically") {
  // both identify u1 = u2 = u3; the kernel is attached to different members of the class
  auto a = expr({term(Poly(1), {{1, 2, 0}, {2, 3, 0}}, {kern(1, 3, 4)})}, {1, 2, 3, 4});
  auto b = expr({term(Poly(1), {{1, 3, 0}, {3, 2, 0}}, {kern(1, 1, 4)})}, {1, 2, 3, 4});
  CHECK(canonicalize(a) == canonicalize(b));
  // delta'(u2-u1) = -delta'(u1-u2)
  auto c = expr({term(Poly(1), {{2, 1, 1}})}, {1, 2});
  auto d = expr({term(Poly(-1), {{1, 2, 1}})}, {1, 2});
  CHECK(canonicalize(c) == canonicalize(d));
  // a derivative chain through the class: delta'(u1-u2) delta(u2-u3) f(u3)
  auto x = expr({term(Poly(1), {{1, 2, 1}, {2, 3, 0}}, {kern(0, 3, 4)})}, {1, 2, 3, 4});
  auto y = expr({term(Poly(1), {{1, 2, 1}, {2, 3, 0}}, {kern(0, 1, 4)}),
                 term(Poly(1), {{1, 2, 0}, {2, 3, 0}}, {kern(1, 1, 4)})},
                {1, 2, 3, 4});
  CHECK(canonicalize(x) == canonicalize(y));
}

TEST_CASE("canonical forms agree with smearing on spanning tests") {
  auto g = XiSequence::geometric(Q(1, 2));
  KernelBackend kb(g, 6, K);
  auto x = expr({term(Poly(2), {{1, 2, 2}, {2, 3, 1}}, {kern(1, 3, 4)}, {{3, 1}, {4, -1}})}, {1, 2, 3, 4});
  auto cx = canonicalize(x);
  // smear of the canonical form equals a direct grid evaluation of the raw form in regularized mode
  // with the deltas replaced by their truncated mode sums; for degree-1 tests the sums are exact
  std::mt19937 rng(11);
  for (int rep = 0; rep < 3; ++rep) {
    auto tests = tests_for(rng, {1, 2, 3, 4}, 1);
    cplx s = smear(cx, tests, kb, {});
    DistributionExpr raw = x;
    for (int l : {1, 2, 3, 4}) raw.set_radius(l, 0.999999999);
    KernelBackend wide(g, 6, K);
    cplx direct = smear_interior(raw, tests, wide, {}, 40);
    CHECK(std::abs(s - direct) < 1e-6 * (1 + std::abs(s)));
  }
}

TEST_CASE("smear conventions") {
  auto g = XiSequence::geometric(Q(1, 2));
  KernelBackend kb(g, 8, K);
  auto e = expr({term(Poly(1), {{1, 2, 0}})}, {1, 2});
  std::map<int, TestPoly> ones{{1, TestPoly::constant(1)}, {2, TestPoly::constant(1)}};
  CHECK(std::abs(smear(e, ones, kb, {}) - cplx(1)) < 1e-14);
  // delta'(u1-u2) against e^{iu1} e^{-iu2}: the n = -1 mode gives (i*(-1)) = -i
  auto d = expr({term(Poly(1), {{1, 2, 1}})}, {1, 2});
  std::map<int, TestPoly> t{{1, TestPoly::mode(1)}, {2, TestPoly::mode(-1)}};
  CHECK(std::abs(smear(d, t, kb, {}) - cplx(0, -1)) < 1e-14);
  auto seven = DistributionExpr::scalar(K, Poly(7));
  seven.add_labels({1, 2});
  std::map<int, TestPoly> mean1{{1, TestPoly{{{0, 1}, {2, 0.3}}}}, {2, TestPoly{{{0, 1}, {-1, 2.0}}}}};
  CHECK(std::abs(smear(seven, mean1, kb, {}) - cplx(7)) < 1e-14);
}

TEST_CASE("smearing is linear") {
  auto g = XiSequence::geometric(Q(1, 2));
  KernelBackend kb(g, 6, K);
  auto e1 = expr({term(Poly::variable(var::kappa), {{1, 2, 1}}, {kern(1, 1, 3)}, {{1, 1}, {3, -1}})}, {1, 2, 3});
  auto e2 = expr({term(Poly(CQ::I()), {{2, 3, 0}}, {wave(0, 1, 2)})}, {1, 2, 3});
  std::mt19937 rng(5);
  ScalarValues vals{{var::kappa, 0.7}};
  for (int rep = 0; rep < 4; ++rep) {
    auto tests = tests_for(rng, {1, 2, 3}, 2);
    CQ a(Q(3, 7), Q(-2));
    cplx lhs = smear(e1 * Poly(a) + e2, tests, kb, vals);
    cplx rhs = a.to_complex() * smear(e1, tests, kb, vals) + smear(e2, tests, kb, vals);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1 + std::abs(lhs)));
  }
}

TEST_CASE("conjugation") {
  auto real = expr({term(Poly(3), {{1, 2, 1}}, {kern(2, 1, 3)})}, {1, 2, 3});
  CHECK(conjugate(real) == canonicalize(real));
  auto ie = expr({term(Poly(CQ::I()), {{1, 2, 0}})}, {1, 2});
  auto expect = expr({term(Poly(-CQ::I()), {{2, 1, 0}})}, {1, 2});
  CHECK(conjugate(ie) == canonicalize(expect));
  auto w = expr({term(Poly(CQ(Q(1), Q(2))), {{2, 3, 1}}, {wave(1, 1, 2)}, {{1, 1}, {2, -1}})}, {1, 2, 3});
  CHECK(conjugate(conjugate(w)) == canonicalize(w));

  // smear(conj e, conj tests) = conj smear(e, tests)
  auto g = XiSequence::geometric(Q(1, 2));
  KernelBackend kb(g, 6, K);
  std::mt19937 rng(9);
  for (int rep = 0; rep < 3; ++rep) {
    auto tests = tests_for(rng, {1, 2, 3}, 2);
    std::map<int, TestPoly> ct;
    for (auto& [l, t] : tests) ct[l] = t.conj();
    cplx a = smear(conjugate(w), ct, kb, {});
    cplx b = std::conj(smear(w, tests, kb, {}));
    CHECK(std::abs(a - b) < 1e-10 * (1 + std::abs(b)));
  }
}

TEST_CASE("singularity reports") {
  auto tree = expr({term(Poly(1), {{1, 2, 0}, {2, 3, 1}})}, {1, 2, 3});
  CHECK(detect_singular(tree).empty());
  auto tri = expr({term(Poly(1), {{1, 2, 0}, {2, 3, 0}, {1, 3, 0}})}, {1, 2, 3});
  auto r = detect_singular(tri);
  REQUIRE(r.size() == 1);
  CHECK(r[0].kind == "cycle");
  CHECK(r[0].cycle_length == 3);
  auto sq = expr({term(Poly(1), {{1, 2, 0}, {1, 2, 0}})}, {1, 2});
  r = detect_singular(sq);
  REQUIRE(r.size() == 1);
  CHECK(r[0].kind == "repeated-pair");
  // D against a charged exponential on both sides cannot be paired
  auto d = expr({term(Poly(1), {}, {Fn{FnKind::Dker, 0, 1, 2, 0}}, {{1, 1}, {2, -1}})}, {1, 2});
  CHECK(detect_singular(d).size() == 1);
  auto dfree = expr({term(Poly(1), {}, {Fn{FnKind::Dker, 0, 1, 2, 0}}, {{2, 1}, {3, -1}})}, {1, 2, 3});
  CHECK(detect_singular(dfree).empty());
}

TEST_CASE("json round trip") {
  auto w = expr({term(Poly(CQ(Q(1), Q(2))) * Poly::variable(var::kappa), {{2, 3, 1}}, {wave(1, 1, 2), kern(0, 1, 3)},
                      {{1, 1}, {2, -1}})},
                {1, 2, 3});
  auto c = canonicalize(w);
  CHECK(canonicalize(expr_from_json(to_json(c))) == c);
}
