#include <doctest.h>

#include <cmath>

#include "loopcorr/error.hpp"
#include "loopcorr/kernels.hpp"

using namespace loopcorr;

TEST_CASE("xi values per kind") {
  auto g = XiSequence::geometric(Q(1, 2));
  CHECK(xi_eval(g, 3).value == Q(1, 8));
  CHECK(xi_eval(g, -3).value == Q(1, 8));
  CHECK(xi_eval(g, 3).exact);
  auto pl = XiSequence::power_law(Q(2));
  CHECK(xi_eval(pl, 4).value == Q(1, 16));
  auto frac = XiSequence::power_law(Q(5, 2));
  CHECK_FALSE(xi_eval(frac, 4).exact);
  CHECK(xi_eval(frac, 4).approx == doctest::Approx(std::pow(4.0, -2.5)));
  auto lst = XiSequence::list_with_tail({Q(1), Q(1, 3)}, Q(1, 2));
  CHECK(xi_eval(lst, 2).value == Q(1, 3));
  CHECK(xi_eval(lst, 4).value == Q(1, 12));
  CHECK(xi_eval(lst, 0).value == Q(1));
}

TEST_CASE("xi construction rejects non-summable parameters") {
  CHECK_THROWS_AS(XiSequence::geometric(Q(1)), Error);
  CHECK_THROWS_AS(XiSequence::power_law(Q(1)), Error);
  CHECK_THROWS_AS(XiSequence::from_json({{"kind", "geometric"}, {"q", "3/2"}}), Error);
  auto j = XiSequence::from_json({{"kind", "geometric"}, {"q", "1/2"}, {"xi0", "1"}});
  CHECK(j.ratio() == Q(1, 2));
  CHECK(XiSequence::from_json(j.to_json()).to_json() == j.to_json());
}

TEST_CASE("NK at coincident angles for q=1/2") {
  auto g = XiSequence::geometric(Q(1, 2));
  for (int N : {1, 4, 10, 30}) {
    auto rep = kernel_eval_angles(KernelId::NK, g, 0.7, 0.7, N);
    // partial sum 2 sum_{n<=N} 2^-n, tail 2^(1-N)
    double partial = 2 * (1 - std::pow(2.0, -N));
    CHECK(rep.value == doctest::Approx(partial).epsilon(1e-14));
    CHECK(rep.tail_bound <= std::pow(2.0, 1 - N) * (1 + 1e-12));
    REQUIRE(rep.closed_form);
    CHECK(*rep.closed_form == doctest::Approx(2.0));
    CHECK(std::abs(rep.value - *rep.closed_form) <= rep.tail_bound * (1 + 1e-12));
  }
}

TEST_CASE("kernel symmetry and the zero-mode offset") {
  auto g = XiSequence::geometric(Q(1, 3), Q(2, 5));
  auto pl = XiSequence::power_law(Q(3));
  for (auto* s : {&g, &pl})
    for (double u : {0.0, 0.4, 2.1, 3.14159})
      for (double v : {0.2, 1.3, 5.0}) {
        for (auto id : {KernelId::NA, KernelId::NK})
          CHECK(kernel_eval_angles(id, *s, u, v, 12).value ==
                doctest::Approx(kernel_eval_angles(id, *s, v, u, 12).value).epsilon(1e-14));
        double diff = kernel_eval_angles(KernelId::NA, *s, u, v, 12).value -
                      kernel_eval_angles(KernelId::NK, *s, u, v, 12).value;
        CHECK(diff == doctest::Approx(2 * s->xi0().get_d()).epsilon(1e-13));
      }
  CHECK(kernel_eval_angles(KernelId::NK, g, M_PI, 0, 9).value ==
        doctest::Approx(kernel_eval_angles(KernelId::NK, g, 0, M_PI, 9).value));
}

TEST_CASE("geometric partial sums stay within the stated tail bound") {
  auto g = XiSequence::geometric(Q(2, 3));
  for (int N = 1; N <= 25; ++N)
    for (double th : {0.0, 0.5, 2.0}) {
      auto rep = kernel_eval_angles(KernelId::NK, g, th, 0, N);
      CHECK(std::abs(rep.value - *rep.closed_form) <= rep.tail_bound * (1 + 1e-12));
    }
}

TEST_CASE("D kernel inside the disc") {
  auto g = XiSequence::geometric(Q(1, 2));
  CHECK(kernel_eval(KernelId::D, g, 0.0, 0.0, 8).value == 0);
  CHECK_THROWS_AS(kernel_eval(KernelId::D, g, 0.9, 0.9, 8), Error);
  auto rep = kernel_eval(KernelId::D, g, cplx(0.5, 0.1), cplx(0.4, -0.2), 60);
  REQUIRE(rep.closed_form);
  CHECK(rep.value == doctest::Approx(*rep.closed_form).epsilon(1e-12));
  try {
    kernel_eval(KernelId::D, g, 0.8, 0.8, 8);
    FAIL("expected DivergentKernel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivergentKernel);
  }
}

TEST_CASE("Heisenberg pair correlator") {
  CHECK(heisenberg_pair(cplx(0.3, 0.1), cplx(-0.2, 0.5), 0, 1.5, 10).value == cplx(2.25));
  CHECK(heisenberg_pair(0.5, 0.5, 0, 2, 10).value == cplx(4));
  // conj(z1) z2 = 1/2: 2 sum n 2^-n = 4
  auto rep = heisenberg_pair(std::sqrt(0.5), std::sqrt(0.5), 1, 0, 80);
  CHECK(rep.value.real() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(rep.closed_form->real() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(heisenberg_pair(std::polar(1.0, 0.3), std::polar(1.0, 0.3), 1, 0, 10).singular);
  CHECK_FALSE(heisenberg_pair(std::polar(1.0, 0.3), std::polar(1.0, 0.9), 1, 0, 10).singular);
}

TEST_CASE("backend series derivatives match finite differences") {
  auto g = XiSequence::geometric(Q(1, 2));
  KernelBackend kb(g, 12, Realization::K);
  double h = 1e-5, th = 0.8;
  CHECK(kb.cov(1, th) == doctest::Approx((kb.cov(0, th + h) - kb.cov(0, th - h)) / (2 * h)).epsilon(1e-6));
  CHECK(kb.dker(2, th, 0.3) ==
        doctest::Approx((kb.dker(1, th + h, 0.3) - kb.dker(1, th - h, 0.3)) / (2 * h)).epsilon(1e-6));
  cplx w = (kb.wav(0, th + h, 0.5) - kb.wav(0, th - h, 0.5)) / (2 * h);
  CHECK(std::abs(kb.wav(1, th, 0.5) - w) < 1e-6);
}
