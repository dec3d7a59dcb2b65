#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopcorr/scalar.hpp"
#include "loopcorr/types.hpp"

namespace loopcorr {

using cplx = std::complex<double>;

class XiSequence {
 public:
  enum class Kind { Geometric, PowerLaw, ListWithTail };

  static XiSequence geometric(const Q& q, const Q& xi0 = Q(1));
  static XiSequence power_law(const Q& s, const Q& xi0 = Q(1));
  // xi_1..xi_L from the list, then xi_n = xi_L * q^(n-L)
  static XiSequence list_with_tail(const std::vector<Q>& head, const Q& q, const Q& xi0 = Q(1));
  static XiSequence from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Kind kind() const { return kind_; }
  const Q& ratio() const { return q_; }
  const Q& exponent() const { return s_; }
  const Q& xi0() const { return xi0_; }
  size_t head_size() const { return head_.size(); }

  bool exact_at(long n) const;
  Q exact(long n) const;  // throws unless exact_at(n)
  double value(long n) const;
  // limsup of (1/xi_n)^(1/n); the inverse-weight series converges for |z w| below its reciprocal
  double inverse_growth() const;

 private:
  Kind kind_ = Kind::Geometric;
  Q q_ = Q(1, 2);
  Q s_ = Q(2);
  Q xi0_ = Q(1);
  std::vector<Q> head_;
};

struct XiValue {
  bool exact = false;
  Q value;
  double approx = 0;
};

XiValue xi_eval(const XiSequence& seq, long n);

enum class KernelId { NA, NK, D, HeisenbergPair };

struct KernelReport {
  double value = 0;       // partial sum up to N
  double tail_bound = 0;  // bound on |full series - partial sum|
  std::optional<double> closed_form;
};

// NA/NK/D evaluated at disc points; for angles pass z = exp(iu).
KernelReport kernel_eval(KernelId id, const XiSequence& seq, cplx z1, cplx z2, int N);
KernelReport kernel_eval_angles(KernelId id, const XiSequence& seq, double u, double v, int N);

struct PairReport {
  cplx value;
  bool singular = false;
  std::optional<cplx> closed_form;
};

// p^2 + 2 kappa sum_{n=1}^N n (conj(z1) z2)^n
PairReport heisenberg_pair(cplx z1, cplx z2, double kappa, double p, int N);

// Truncated series used for numeric evaluation of symbolic kernel factors.
// rho is the product of the two radii (1 on the circle); theta = u_x - u_y.
class KernelBackend {
 public:
  KernelBackend(const XiSequence& seq, int N, Realization r) : seq_(seq), N_(N), real_(r) {}
  int truncation() const { return N_; }
  Realization realization() const { return real_; }
  const XiSequence& sequence() const { return seq_; }

  // m-th derivative of the Gaussian covariance (NA or NK per realization)
  double cov(int m, double theta, double rho = 1) const;
  // m-th derivative of the [a,b] kernel; in A-mode it carries the zero-mode term 1/(2 xi_0)
  double dker(int m, double theta, double rho = 1) const;
  // m-th derivative of sum_{n>0} n e^{in theta}; the Fock sector is not truncated by xi,
  // so on the circle callers pass a cutoff tied to their quadrature (default N)
  cplx wav(int m, double theta, double rho = 1, int cutoff = -1) const;
  // m-th derivative of sum_n e^{in theta}, truncated to |n| <= N
  cplx delta(int m, double theta, double rho = 1) const;
  // throws DivergentKernel when the inverse-weight series diverges at rho
  void check_dker(double rho) const;

 private:
  XiSequence seq_;
  int N_;
  Realization real_;
};

}  // namespace loopcorr
