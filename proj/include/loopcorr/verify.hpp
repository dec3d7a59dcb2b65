#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopcorr/kernels.hpp"
#include "loopcorr/renorm.hpp"

namespace loopcorr {

// ---------- commutators inside correlators ----------

struct CommutatorCase {
  CurrentWord prefix, suffix;
  Current xi = Current::J3, eta = Current::J3;
  int u = 1, v = 2;  // labels carried by xi and eta
};

// canonical <prefix xi(u) eta(v) suffix> - <prefix eta(v) xi(u) suffix>
DistributionExpr commutator_in_correlator(const CommutatorCase& c, const RenormScheme& scheme);

// Right-hand side of [xi(u), eta(v)]: sum coeff * X(at) delta(u-v) + central * kappa * delta'(u-v)
struct RelationPiece {
  Current current;
  bool at_u = false;
  CQ coeff;
};
struct Relation {
  Current xi, eta;
  std::vector<RelationPiece> pieces;
  CQ central;
  std::string text;
};
std::vector<Relation> relation_table(Realization r);
const Relation& relation_for(Current xi, Current eta);

// <prefix (rhs) suffix> with the relation's currents inserted as word elements
DistributionExpr relation_rhs(const CommutatorCase& c, const RenormScheme& scheme);

struct RelationResult {
  CommutatorCase kase;
  std::string relation;
  bool pass = false;
  DistributionExpr residual;
};

struct AffineReport {
  std::vector<RelationResult> results;
  size_t passed = 0, failed = 0;
};

// Every ordered current pair with every spectator context of length <= max_context,
// split in all ways between prefix and suffix.
AffineReport check_affine_relations(Realization r, int max_context, const RenormScheme& scheme);
std::vector<CommutatorCase> commutator_cases(Realization r, int max_context);

// canonical <w> - (-1)^n conj <star(w)>
DistributionExpr check_hermiticity(const CurrentWord& w, const RenormScheme& scheme);

struct MuVerdict {
  bool pass = true;
  size_t cases = 0;
  std::vector<std::string> mismatches;
};
MuVerdict mu_independence(const std::vector<CommutatorCase>& cases, const RenormScheme& a, const RenormScheme& b);

// ---------- numerics ----------

struct NumericSetup {
  XiSequence seq = XiSequence::geometric(Q(1, 2));
  int modes = 8;
  double kappa = 1.0;
  double p = 0.0;
  std::map<int, double> mu;  // numeric mu_k for symbolic families
  SmearOptions smear;

  ScalarValues values() const;
};

struct GramEntry {
  CurrentWord word;
  std::map<int, TestPoly> tests;  // keyed by the word's labels
};

struct GramReport {
  std::vector<std::string> basis;
  std::vector<std::vector<cplx>> matrix;
  double hermiticity_residual = 0;
  std::vector<double> eigenvalues;
  int positive = 0, negative = 0, zero = 0;
  nlohmann::json to_json() const;
};

GramReport gram_matrix(const std::vector<GramEntry>& basis, const RenormScheme& scheme, const NumericSetup& num);

// ---------- brute-force oracle ----------

// Truncated Gaussian model with 2N+1 real modes (K drops the zero mode and
// integrates the angle instead) and a truncated Fock space.
struct OracleModel {
  Realization realization = Realization::K;
  Sector sector = Sector::Nonunitary;
  XiSequence seq = XiSequence::geometric(Q(1, 2));
  int modes = 8;
  double kappa = 1.0;
  double p = 0.0;
  RhoOrientation rho = RhoOrientation::Auto;
};

struct OracleFactor {
  Prim prim = Prim::h;
  double angle = 0;
  double radius = 1;
};

// <v0, f_1 ... f_n v0> by normal ordering on explicit modes and Gaussian moments
cplx gaussian_oracle(const std::vector<OracleFactor>& word, const OracleModel& m);
// composite currents expanded into primitives at the given angles (radii from the word)
cplx oracle_correlator(const CurrentWord& w, const OracleModel& m, const std::map<int, double>& angles);

// Exact exponent of an exponential correlator at points z = r e^{i theta} in Q(i).
struct ExactPoint {
  int charge = 1;
  CQ z;  // r e^{i theta}, exact
};
struct ExactMoment {
  bool zero = false;  // killed by the charge selection rule
  CQ exponent;        // correlator = exp(exponent)
};
// Gaussian integration over the explicit truncated modes.
ExactMoment oracle_exponent(Realization r, const std::vector<ExactPoint>& pts, const XiSequence& seq, int modes);
// The closed forms for e and alpha correlators with truncated kernels.
ExactMoment closed_form_exponent(Realization r, const std::vector<ExactPoint>& pts, const XiSequence& seq,
                                 int modes);
// Float evaluation of the closed form, independent of the exact path.
cplx closed_form_value(Realization r, const std::vector<int>& charges, const std::vector<double>& angles,
                       const std::vector<double>& radii, const XiSequence& seq, int modes);

// Pythagorean rotation (a + bi)/c with a^2 + b^2 = c^2, raised to the k-th power.
CQ rational_rotation(int a, int b, int c, int k);

}  // namespace loopcorr
