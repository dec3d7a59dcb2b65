#pragma once

#include <map>
#include <string>
#include <vector>

#include "loopcorr/distributions.hpp"
#include "loopcorr/scalar.hpp"
#include "loopcorr/types.hpp"

namespace loopcorr {

enum class Current { J3, Jp, Jm, E, F, H };

enum class Prim {
  a,
  b,
  h,
  alpha_p,
  alpha_m,
  e_p,
  e_m,
  rho,
  d_alpha_p,
  d_alpha_m,
  d_e_p,
  d_e_m,
  am_d_ap,  // alpha- d alpha+
  ap_d_am,  // alpha+ d alpha-
  em_d_ep,  // e- d e+
};

constexpr int prim_count = 15;

const char* current_token(Current c);  // J3, Jp, Jm, E, F, H
const char* current_display(Current c);
const char* prim_name(Prim p);
Realization current_realization(Current c);
bool prim_allowed(Prim p, Realization r);

// Sign convention of the Fock two-point function.
//  Proof: <rho(z1) rho(z2)> = p^2 + 2 kappa sum n (z1 conj(z2))^n, so [rho(u),rho(v)] = -2i kappa delta'(u-v)
//  Modes: <rho(z1) rho(z2)> = p^2 + 2 kappa sum n (conj(z1) z2)^n, so [rho(u),rho(v)] = +2i kappa delta'(u-v)
// Auto picks Proof for K and Modes for A, the orientations under which each
// realization satisfies its current algebra.
enum class RhoOrientation { Auto, Proof, Modes };
RhoOrientation resolve_rho(RhoOrientation o, Realization r);

struct SectorConfig {
  Sector sector = Sector::Nonunitary;
  Realization realization = Realization::K;
  Poly kappa = Poly::variable(var::kappa);
  Poly p = Poly::variable(var::p);
  Poly lambda = Poly::variable(var::lambda);
  RhoOrientation rho = RhoOrientation::Auto;

  RhoOrientation rho_orientation() const { return resolve_rho(rho, realization); }
  void validate() const;
};

struct PrimitiveTerm {
  Poly coeff;
  std::vector<Prim> factors;  // ordered product at one insertion point
};

// h is kept as a symbol unless split_h, in which case it becomes (a+b)/2
std::vector<PrimitiveTerm> expand_current(Current c, const SectorConfig& cfg, bool split_h = false);

// Commutator of single-symbol primitives at labels u and v. Residual operators
// appear as FnKind::Prim factors with sym = the exponential (or rho) and order = derivative count.
DistributionExpr primitive_commutator(Prim t1, int u, Prim t2, int v, const SectorConfig& cfg);

// Jacobi identity over all triples of primitive symbols of the realization; returns failures.
std::vector<std::string> jacobi_failures(const SectorConfig& cfg);

struct Verdict {
  bool pass = false;
  std::string relation;
  std::string residual;
};

Verdict star_check(Current c, const SectorConfig& cfg = {});
// star(star(X)) == X on the expansion
bool star_involution(Current c, const SectorConfig& cfg = {});

// Symbolic check of the classical sl(2,R) / su(1,1) realizations with symbolic lambda.
std::vector<Verdict> classical_check(Realization r, const Poly& lambda = Poly::variable(var::lambda));

// Term choices at a diagram vertex after h -> (a+b)/2.
enum class TermKind { BAlpha, AlphaA, KappaD, RhoAlpha, BareA, BareB, Linear };
const char* term_kind_name(TermKind k);

struct VertexTerm {
  TermKind kind;
  Poly coeff;
  int charge;  // charge of the exponential carried by the term, 0 if none
};

std::vector<VertexTerm> vertex_terms(Current c, const SectorConfig& cfg);

// coefficient c_L with alpha- d alpha+ = c_L dX (K: i) and e- d e+ = c_L dx (A: 1)
CQ linear_field_factor(Realization r);
// i*gamma for an exponential of charge s: K gives -s, A gives i s
CQ exponential_shift(Realization r, int charge);

}  // namespace loopcorr
