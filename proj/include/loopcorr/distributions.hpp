#pragma once

#include <complex>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopcorr/kernels.hpp"
#include "loopcorr/scalar.hpp"
#include "loopcorr/types.hpp"

namespace loopcorr {

// delta^(k)(u_x - u_y), stored with x < y
struct Delta {
  int x = 0, y = 0, k = 0;
  auto operator<=>(const Delta&) const = default;
};

enum class FnKind : int {
  Kern = 0,  // order-th derivative of the Gaussian covariance at u_x - u_y
  Kc = 1,    // order-th derivative of the covariance at 0
  Wav = 2,   // order-th derivative of sum_{n>0} n e^{in(u_x - u_y)}
  Dker = 3,  // order-th derivative of the [a,b] kernel at u_x - u_y
  Prim = 4,  // residual primitive operator `sym` at u_x, differentiated `order` times
};

struct Fn {
  FnKind kind = FnKind::Kern;
  int order = 0;
  int x = -1, y = -1;
  int sym = 0;
  auto operator<=>(const Fn&) const = default;
};

// an exponential of charge `charge` located at `label`
struct Slot {
  int label = 0;
  int charge = 0;
  auto operator<=>(const Slot&) const = default;
};

// coeff * prod(deltas) * prod(fns) * <prod of exponentials in gauss>
struct Term {
  Poly coeff;
  std::vector<Delta> deltas;
  std::vector<Fn> fns;
  std::vector<Slot> gauss;
};

class DistributionExpr {
 public:
  DistributionExpr() = default;
  explicit DistributionExpr(Realization r) : real_(r) {}

  static DistributionExpr scalar(Realization r, const Poly& c);
  static DistributionExpr delta(Realization r, int x, int y, int k, const Poly& c = Poly(1));

  Realization realization() const { return real_; }
  void set_realization(Realization r) { real_ = r; }
  const std::vector<Term>& terms() const { return terms_; }
  std::vector<Term>& terms() { return terms_; }
  const std::set<int>& labels() const { return labels_; }
  void add_label(int l) { labels_.insert(l); }
  void add_labels(const std::set<int>& ls) { labels_.insert(ls.begin(), ls.end()); }

  // radius per label; absent labels sit on the circle
  const std::map<int, double>& radii() const { return radii_; }
  void set_radius(int label, double r) { radii_[label] = r; }
  bool on_circle() const;

  void add_term(Term t);
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  DistributionExpr& operator+=(const DistributionExpr& o);
  DistributionExpr& operator-=(const DistributionExpr& o);
  DistributionExpr& operator*=(const Poly& c);
  DistributionExpr operator-() const;

  std::string str() const;

 private:
  Realization real_ = Realization::K;
  std::set<int> labels_;
  std::map<int, double> radii_;
  std::vector<Term> terms_;
};

inline DistributionExpr operator+(DistributionExpr a, const DistributionExpr& b) { return a += b; }
inline DistributionExpr operator-(DistributionExpr a, const DistributionExpr& b) { return a -= b; }
inline DistributionExpr operator*(DistributionExpr a, const Poly& c) { return a *= c; }
// product of two expressions over disjoint or shared labels
DistributionExpr operator*(const DistributionExpr& a, const DistributionExpr& b);

bool operator==(const DistributionExpr& a, const DistributionExpr& b);

// Term-level calculus used by the canonicalizer and the diagram weights.
std::vector<Term> differentiate(const Term& t, int label, Realization r);
// Moves every dependence on `from` onto `to`; returns false when the term vanishes.
bool substitute(Term& t, int from, int to);
void normalize_factors(Term& t);
// Merges equal factor structures; drops zero and charge-violating terms.
std::vector<Term> merge_terms(std::vector<Term> terms, Realization r);

DistributionExpr canonicalize(const DistributionExpr& e);
DistributionExpr conjugate(const DistributionExpr& e);

struct SingularityReport {
  size_t term = 0;
  std::string kind;  // repeated-pair | cycle | coincident-kernel | unbalanced-D
  int cycle_length = 0;
  std::vector<int> labels;
};

std::vector<SingularityReport> detect_singular(const DistributionExpr& e);

// finite Fourier polynomial sum_n c_n e^{inu}
struct TestPoly {
  std::map<int, cplx> coeff;
  static TestPoly constant(cplx c) { return TestPoly{{{0, c}}}; }
  static TestPoly mode(int n, cplx c = 1) { return TestPoly{{{n, c}}}; }
  TestPoly derivative(int k) const;
  TestPoly conj() const;
  cplx operator()(double u) const;
  TestPoly operator*(const TestPoly& o) const;
  int degree() const;
};

struct SmearOptions {
  int grid = 0;  // points per active dimension; 0 picks a default from the kernels and tests
};

using ScalarValues = std::map<int, cplx>;

// Pairing with (1/2pi)^n integration against the tests; on-circle canonical input.
cplx smear(const DistributionExpr& e, const std::map<int, TestPoly>& tests, const KernelBackend& kb,
           const ScalarValues& values, const SmearOptions& opt = {});
// Interior expressions: pointwise value at the given angles and the stored radii.
cplx evaluate_at(const DistributionExpr& e, const std::map<int, double>& angles, const KernelBackend& kb,
                 const ScalarValues& values);
// Interior expressions smeared on a uniform grid over every label.
cplx smear_interior(const DistributionExpr& e, const std::map<int, TestPoly>& tests, const KernelBackend& kb,
                    const ScalarValues& values, int grid = 32);

nlohmann::json to_json(const DistributionExpr& e);
DistributionExpr expr_from_json(const nlohmann::json& j);
nlohmann::json cq_json(const CQ& c);
nlohmann::json poly_json(const Poly& p);

}  // namespace loopcorr
