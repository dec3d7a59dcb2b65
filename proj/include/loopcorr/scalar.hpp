#pragma once

#include <gmpxx.h>

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace loopcorr {

using Q = mpq_class;

Q parse_rational(const std::string& text);
std::string rational_string(const Q& q);

// exact element of Q(i)
struct CQ {
  Q re, im;
  CQ() : re(0), im(0) {}
  CQ(long r) : re(r), im(0) {}
  CQ(const Q& r) : re(r), im(0) {}
  CQ(const Q& r, const Q& i) : re(r), im(i) {}

  static CQ I() { return CQ(Q(0), Q(1)); }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  CQ conj() const { return CQ(re, -im); }
  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
  std::string str() const;

  CQ operator-() const { return CQ(-re, -im); }
  CQ& operator+=(const CQ& o) { re += o.re; im += o.im; return *this; }
  CQ& operator-=(const CQ& o) { re -= o.re; im -= o.im; return *this; }
  CQ& operator*=(const CQ& o) {
    Q r = re * o.re - im * o.im;
    Q i = re * o.im + im * o.re;
    re = r; im = i;
    return *this;
  }
  CQ inverse() const;
};

inline CQ operator+(CQ a, const CQ& b) { return a += b; }
inline CQ operator-(CQ a, const CQ& b) { return a -= b; }
inline CQ operator*(CQ a, const CQ& b) { return a *= b; }
inline bool operator==(const CQ& a, const CQ& b) { return a.re == b.re && a.im == b.im; }
inline bool operator!=(const CQ& a, const CQ& b) { return !(a == b); }
inline bool operator<(const CQ& a, const CQ& b) {
  if (a.re != b.re) return a.re < b.re;
  return a.im < b.im;
}

// Variables that may appear in scalar coefficients.
namespace var {
constexpr int kappa = 0;
constexpr int p = 1;
constexpr int lambda = 2;
constexpr int mu_base = 100;  // mu_k is mu_base + k
inline int mu(int k) { return mu_base + k; }
}  // namespace var

std::string var_name(int v);

using Monomial = std::vector<std::pair<int, int>>;  // sorted (variable, power)

// Polynomial in the scalar variables with coefficients in Q(i).
class Poly {
 public:
  Poly() = default;
  Poly(long c) { if (c != 0) terms_[{}] = CQ(c); }
  Poly(const CQ& c) { if (!c.is_zero()) terms_[{}] = c; }
  static Poly variable(int v, int power = 1);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  CQ constant() const;
  const std::map<Monomial, CQ>& terms() const { return terms_; }

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  Poly& operator*=(const CQ& c);

  Poly conj() const;
  Poly substitute(int v, const CQ& value) const;
  Poly substitute(const std::map<int, CQ>& values) const;
  std::complex<double> evaluate(const std::map<int, std::complex<double>>& values) const;
  int degree_in(int v) const;
  std::string str() const;

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
  friend bool operator<(const Poly& a, const Poly& b) { return a.terms_ < b.terms_; }

 private:
  void add_term(const Monomial& m, const CQ& c);
  std::map<Monomial, CQ> terms_;
};

inline Poly operator+(Poly a, const Poly& b) { return a += b; }
inline Poly operator-(Poly a, const Poly& b) { return a -= b; }
inline Poly operator*(Poly a, const Poly& b) { return a *= b; }
inline Poly operator*(Poly a, const CQ& c) { return a *= c; }
inline Poly operator*(const CQ& c, Poly a) { return a *= c; }

}  // namespace loopcorr
