#include "loopcorr/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "loopcorr/error.hpp"

namespace loopcorr {

namespace {

CurrentWord with_pair(const CommutatorCase& c, Current first, int first_label, Current second, int second_label) {
  CurrentWord w = c.prefix;
  w.items.push_back({first, first_label, 1.0});
  w.items.push_back({second, second_label, 1.0});
  for (auto& it : c.suffix.items) w.items.push_back(it);
  return w;
}

std::vector<Current> alphabet(Realization r) {
  if (r == Realization::K) return {Current::J3, Current::Jp, Current::Jm};
  return {Current::E, Current::F, Current::H};
}

}  // namespace

DistributionExpr commutator_in_correlator(const CommutatorCase& c, const RenormScheme& scheme) {
  DistributionExpr a = evaluate_correlator(with_pair(c, c.xi, c.u, c.eta, c.v), scheme);
  DistributionExpr b = evaluate_correlator(with_pair(c, c.eta, c.v, c.xi, c.u), scheme);
  return canonicalize(a - b);
}

std::vector<Relation> relation_table(Realization r) {
  const CQ i = CQ::I();
  std::vector<Relation> t;
  if (r == Realization::K) {
    t.push_back({Current::J3, Current::J3, {}, CQ(Q(0), Q(-8)), "[J3(u),J3(v)] = -8i kappa delta'(u-v)"});
    t.push_back({Current::J3, Current::Jp, {{Current::Jp, false, i * CQ(2)}}, CQ(0), "[J3(u),Jp(v)] = 2i Jp(v) delta(u-v)"});
    t.push_back({Current::J3, Current::Jm, {{Current::Jm, false, i * CQ(-2)}}, CQ(0), "[J3(u),Jm(v)] = -2i Jm(v) delta(u-v)"});
    t.push_back({Current::Jp, Current::J3, {{Current::Jp, true, i * CQ(-2)}}, CQ(0), "[Jp(u),J3(v)] = -2i Jp(u) delta(u-v)"});
    t.push_back({Current::Jm, Current::J3, {{Current::Jm, true, i * CQ(2)}}, CQ(0), "[Jm(u),J3(v)] = 2i Jm(u) delta(u-v)"});
    t.push_back({Current::Jp, Current::Jm, {{Current::J3, false, i}}, CQ(Q(0), Q(4)),
                 "[Jp(u),Jm(v)] = i J3(v) delta(u-v) + 4i kappa delta'(u-v)"});
    t.push_back({Current::Jm, Current::Jp, {{Current::J3, true, -i}}, CQ(Q(0), Q(4)),
                 "[Jm(u),Jp(v)] = -i J3(u) delta(u-v) + 4i kappa delta'(u-v)"});
    t.push_back({Current::Jp, Current::Jp, {}, CQ(0), "[Jp(u),Jp(v)] = 0"});
    t.push_back({Current::Jm, Current::Jm, {}, CQ(0), "[Jm(u),Jm(v)] = 0"});
  } else {
    t.push_back({Current::E, Current::F, {{Current::H, false, CQ(1)}}, CQ(Q(0), Q(-4)),
                 "[E(u),F(v)] = H(v) delta(u-v) - 4i kappa delta'(u-v)"});
    t.push_back({Current::F, Current::E, {{Current::H, true, CQ(-1)}}, CQ(Q(0), Q(-4)),
                 "[F(u),E(v)] = -H(u) delta(u-v) - 4i kappa delta'(u-v)"});
    t.push_back({Current::H, Current::H, {}, CQ(Q(0), Q(8)), "[H(u),H(v)] = 8i kappa delta'(u-v)"});
    t.push_back({Current::H, Current::E, {{Current::E, false, CQ(2)}}, CQ(0), "[H(u),E(v)] = 2 E(v) delta(u-v)"});
    t.push_back({Current::E, Current::H, {{Current::E, true, CQ(-2)}}, CQ(0), "[E(u),H(v)] = -2 E(u) delta(u-v)"});
    t.push_back({Current::H, Current::F, {{Current::F, false, CQ(-2)}}, CQ(0), "[H(u),F(v)] = -2 F(v) delta(u-v)"});
    t.push_back({Current::F, Current::H, {{Current::F, true, CQ(2)}}, CQ(0), "[F(u),H(v)] = 2 F(u) delta(u-v)"});
    t.push_back({Current::E, Current::E, {}, CQ(0), "[E(u),E(v)] = 0"});
    t.push_back({Current::F, Current::F, {}, CQ(0), "[F(u),F(v)] = 0"});
  }
  return t;
}

const Relation& relation_for(Current xi, Current eta) {
  static const std::vector<Relation> k = relation_table(Realization::K);
  static const std::vector<Relation> a = relation_table(Realization::A);
  for (auto* tab : {&k, &a})
    for (auto& r : *tab)
      if (r.xi == xi && r.eta == eta) return r;
  throw Error(ErrorCode::RealizationMismatch, "currents from different realizations");
}

DistributionExpr relation_rhs(const CommutatorCase& c, const RenormScheme& scheme) {
  const Relation& rel = relation_for(c.xi, c.eta);
  const Realization r = current_realization(c.xi);
  DistributionExpr out(r);
  out.add_label(c.u);
  out.add_label(c.v);
  for (auto& piece : rel.pieces) {
    CurrentWord w = c.prefix;
    w.items.push_back({piece.current, piece.at_u ? c.u : c.v, 1.0});
    for (auto& it : c.suffix.items) w.items.push_back(it);
    out += evaluate_correlator(w, scheme) * DistributionExpr::delta(r, c.u, c.v, 0, Poly(piece.coeff));
  }
  if (!rel.central.is_zero()) {
    DistributionExpr ctx = evaluate_correlator(concat(c.prefix, c.suffix), scheme);
    out += ctx * DistributionExpr::delta(r, c.u, c.v, 1, scheme.sector.kappa * Poly(rel.central));
  }
  return canonicalize(out);
}

std::vector<CommutatorCase> commutator_cases(Realization r, int max_context) {
  const auto alpha = alphabet(r);
  std::vector<CommutatorCase> out;
  for (int len = 0; len <= max_context; ++len) {
    size_t total = 1;
    for (int i = 0; i < len; ++i) total *= alpha.size();
    for (size_t code = 0; code < total; ++code) {
      std::vector<Current> ctx;
      size_t c = code;
      for (int i = 0; i < len; ++i) ctx.push_back(alpha[c % alpha.size()]), c /= alpha.size();
      for (int split = 0; split <= len; ++split)
        for (Current xi : alpha)
          for (Current eta : alpha) {
            CommutatorCase k;
            k.xi = xi;
            k.eta = eta;
            k.u = 1;
            k.v = 2;
            for (int i = 0; i < len; ++i) {
              WordItem it{ctx[i], 3 + i, 1.0};
              (i < split ? k.prefix : k.suffix).items.push_back(it);
            }
            out.push_back(std::move(k));
          }
    }
  }
  return out;
}

AffineReport check_affine_relations(Realization r, int max_context, const RenormScheme& scheme) {
  if (scheme.sector.realization != r) throw Error(ErrorCode::RealizationMismatch, "scheme realization differs");
  AffineReport rep;
  for (auto& c : commutator_cases(r, max_context)) {
    RelationResult res;
    res.kase = c;
    res.relation = relation_for(c.xi, c.eta).text;
    res.residual = canonicalize(commutator_in_correlator(c, scheme) - relation_rhs(c, scheme));
    res.pass = res.residual.is_zero();
    (res.pass ? rep.passed : rep.failed)++;
    rep.results.push_back(std::move(res));
  }
  return rep;
}

DistributionExpr check_hermiticity(const CurrentWord& w, const RenormScheme& scheme) {
  int sign = 1;
  CurrentWord s = star_word(w, &sign);
  DistributionExpr a = evaluate_correlator(w, scheme);
  DistributionExpr b = conjugate(evaluate_correlator(s, scheme));
  return canonicalize(a - b * Poly(sign));
}

MuVerdict mu_independence(const std::vector<CommutatorCase>& cases, const RenormScheme& a, const RenormScheme& b) {
  MuVerdict v;
  for (auto& c : cases) {
    ++v.cases;
    DistributionExpr x = commutator_in_correlator(c, a);
    DistributionExpr y = commutator_in_correlator(c, b);
    if (!(x == y)) {
      v.pass = false;
      CurrentWord w = with_pair(c, c.xi, c.u, c.eta, c.v);
      v.mismatches.push_back(render_word(w));
    }
  }
  return v;
}

ScalarValues NumericSetup::values() const {
  ScalarValues v{{var::kappa, kappa}, {var::p, p}};
  for (auto& [k, m] : mu) v[var::mu(k)] = m;
  return v;
}

GramReport gram_matrix(const std::vector<GramEntry>& basis, const RenormScheme& scheme, const NumericSetup& num) {
  const size_t n = basis.size();
  GramReport rep;
  rep.matrix.assign(n, std::vector<cplx>(n, 0));
  const Realization r = scheme.sector.realization;
  KernelBackend kb(num.seq, num.modes, r);
  const ScalarValues vals = num.values();
  int shift = 1;
  for (auto& b : basis)
    for (auto& it : b.word.items) shift = std::max(shift, it.label + 1);
  for (auto& b : basis) rep.basis.push_back(render_word(b.word));
  for (size_t i = 0; i < n; ++i) {
    int sign = 1;
    CurrentWord left = star_word(basis[i].word, &sign);
    std::map<int, TestPoly> tests;
    for (auto& it : left.items) {
      auto f = basis[i].tests.find(it.label);
      tests[it.label + shift] = f == basis[i].tests.end() ? TestPoly::constant(1) : f->second.conj();
      it.label += shift;
    }
    for (size_t j = 0; j < n; ++j) {
      std::map<int, TestPoly> t = tests;
      for (auto& it : basis[j].word.items) {
        auto f = basis[j].tests.find(it.label);
        t[it.label] = f == basis[j].tests.end() ? TestPoly::constant(1) : f->second;
      }
      DistributionExpr e = evaluate_correlator(concat(left, basis[j].word), scheme);
      rep.matrix[i][j] = static_cast<double>(sign) * smear(e, t, kb, vals, num.smear);
    }
  }
  Eigen::MatrixXcd G(n, n);
  double scale = 1;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      G(i, j) = rep.matrix[i][j];
      scale = std::max(scale, std::abs(rep.matrix[i][j]));
      rep.hermiticity_residual =
          std::max(rep.hermiticity_residual, std::abs(rep.matrix[i][j] - std::conj(rep.matrix[j][i])));
    }
  if (n > 0) {
    Eigen::MatrixXcd Hm = (G + G.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hm);
    const double tol = 1e-9 * scale;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      double ev = es.eigenvalues()(k);
      rep.eigenvalues.push_back(ev);
      if (ev > tol)
        ++rep.positive;
      else if (ev < -tol)
        ++rep.negative;
      else
        ++rep.zero;
    }
  }
  return rep;
}

nlohmann::json GramReport::to_json() const {
  nlohmann::json j;
  j["basis"] = basis;
  j["matrix"] = nlohmann::json::array();
  for (auto& row : matrix) {
    nlohmann::json r = nlohmann::json::array();
    for (auto& x : row) r.push_back({x.real(), x.imag()});
    j["matrix"].push_back(r);
  }
  j["hermiticity_residual"] = hermiticity_residual;
  j["eigenvalues"] = eigenvalues;
  j["signature"] = {{"positive", positive}, {"negative", negative}, {"zero", zero}};
  return j;
}

}  // namespace loopcorr
