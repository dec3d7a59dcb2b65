#include "loopcorr/algebra.hpp"

#include <sstream>

#include "loopcorr/error.hpp"

namespace loopcorr {

RhoOrientation resolve_rho(RhoOrientation o, Realization r) {
  if (o != RhoOrientation::Auto) return o;
  return r == Realization::K ? RhoOrientation::Proof : RhoOrientation::Modes;
}

const char* current_token(Current c) {
  switch (c) {
    case Current::J3: return "J3";
    case Current::Jp: return "Jp";
    case Current::Jm: return "Jm";
    case Current::E: return "E";
    case Current::F: return "F";
    case Current::H: return "H";
  }
  return "?";
}

const char* current_display(Current c) {
  switch (c) {
    case Current::J3: return "J³";
    case Current::Jp: return "J⁺";
    case Current::Jm: return "J⁻";
    default: return current_token(c);
  }
}

const char* prim_name(Prim p) {
  switch (p) {
    case Prim::a: return "a";
    case Prim::b: return "b";
    case Prim::h: return "h";
    case Prim::alpha_p: return "α⁺";
    case Prim::alpha_m: return "α⁻";
    case Prim::e_p: return "e⁺";
    case Prim::e_m: return "e⁻";
    case Prim::rho: return "ρ";
    case Prim::d_alpha_p: return "∂α⁺";
    case Prim::d_alpha_m: return "∂α⁻";
    case Prim::d_e_p: return "∂e⁺";
    case Prim::d_e_m: return "∂e⁻";
    case Prim::am_d_ap: return "α⁻∂α⁺";
    case Prim::ap_d_am: return "α⁺∂α⁻";
    case Prim::em_d_ep: return "e⁻∂e⁺";
  }
  return "?";
}

Realization current_realization(Current c) {
  return (c == Current::E || c == Current::F || c == Current::H) ? Realization::A : Realization::K;
}

bool prim_allowed(Prim p, Realization r) {
  switch (p) {
    case Prim::alpha_p:
    case Prim::alpha_m:
    case Prim::d_alpha_p:
    case Prim::d_alpha_m:
    case Prim::am_d_ap:
    case Prim::ap_d_am: return r == Realization::K;
    case Prim::e_p:
    case Prim::e_m:
    case Prim::d_e_p:
    case Prim::d_e_m:
    case Prim::em_d_ep: return r == Realization::A;
    default: return true;
  }
}

void SectorConfig::validate() const {
  if (kappa.is_constant()) {
    CQ k = kappa.constant();
    if (sgn(k.im) != 0 || sgn(k.re) <= 0) throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
  }
  if (p.is_constant() && sgn(p.constant().im) != 0) throw Error(ErrorCode::InvalidArgument, "p must be real");
}

CQ linear_field_factor(Realization r) { return r == Realization::K ? CQ::I() : CQ(1); }

CQ exponential_shift(Realization r, int charge) {
  return r == Realization::K ? CQ(-charge) : CQ(Q(0), Q(charge));
}

namespace {

const CQ I = CQ::I();
const CQ half_i = CQ(Q(0), Q(1, 2));

PrimitiveTerm pt(const Poly& c, std::vector<Prim> f) { return PrimitiveTerm{c, std::move(f)}; }

struct ExpInfo {
  bool is_exp = false;
  int charge = 0;
  int order = 0;
  Prim base = Prim::a;
};

ExpInfo exp_info(Prim p) {
  switch (p) {
    case Prim::alpha_p: return {true, 1, 0, Prim::alpha_p};
    case Prim::alpha_m: return {true, -1, 0, Prim::alpha_m};
    case Prim::e_p: return {true, 1, 0, Prim::e_p};
    case Prim::e_m: return {true, -1, 0, Prim::e_m};
    case Prim::d_alpha_p: return {true, 1, 1, Prim::alpha_p};
    case Prim::d_alpha_m: return {true, -1, 1, Prim::alpha_m};
    case Prim::d_e_p: return {true, 1, 1, Prim::e_p};
    case Prim::d_e_m: return {true, -1, 1, Prim::e_m};
    default: return {};
  }
}

bool is_derivation(Prim p) { return p == Prim::a || p == Prim::b || p == Prim::h; }

// c with L = c dX for the composite linear fields
bool linear_info(Prim p, CQ& c) {
  switch (p) {
    case Prim::am_d_ap: c = I; return true;
    case Prim::ap_d_am: c = -I; return true;
    case Prim::em_d_ep: c = CQ(1); return true;
    default: return false;
  }
}

}  // namespace

std::vector<PrimitiveTerm> expand_current(Current c, const SectorConfig& cfg, bool split_h) {
  if (current_realization(c) != cfg.realization)
    throw Error(ErrorCode::RealizationMismatch,
                std::string(current_token(c)) + " is not a current of the " + realization_name(cfg.realization) +
                    "-realization");
  const Poly& k = cfg.kappa;
  std::vector<PrimitiveTerm> out;
  auto h_term = [&](const CQ& coeff) {
    if (!split_h) {
      out.push_back(pt(Poly(coeff), {Prim::h}));
      return;
    }
    CQ half = coeff * CQ(Q(1, 2));
    out.push_back(pt(Poly(half), {Prim::a}));
    out.push_back(pt(Poly(half), {Prim::b}));
  };
  switch (c) {
    case Current::J3:
      h_term(CQ(Q(0), Q(2)));
      out.push_back(pt(k * CQ(-2), {Prim::am_d_ap}));
      break;
    case Current::Jp:
      out.push_back(pt(Poly(half_i), {Prim::b, Prim::alpha_p}));
      out.push_back(pt(Poly(half_i), {Prim::alpha_p, Prim::a}));
      out.push_back(pt(k, {Prim::d_alpha_p}));
      out.push_back(pt(Poly(1), {Prim::rho, Prim::alpha_p}));
      break;
    case Current::Jm:
      out.push_back(pt(Poly(half_i), {Prim::b, Prim::alpha_m}));
      out.push_back(pt(Poly(half_i), {Prim::alpha_m, Prim::a}));
      out.push_back(pt(-k, {Prim::d_alpha_m}));
      out.push_back(pt(Poly(-1), {Prim::rho, Prim::alpha_m}));
      break;
    case Current::E:
      out.push_back(pt(Poly(half_i), {Prim::b, Prim::e_p}));
      out.push_back(pt(Poly(half_i), {Prim::e_p, Prim::a}));
      out.push_back(pt(k * I, {Prim::d_e_p}));
      out.push_back(pt(Poly(I), {Prim::rho, Prim::e_p}));
      break;
    case Current::F:
      out.push_back(pt(Poly(-half_i), {Prim::b, Prim::e_m}));
      out.push_back(pt(Poly(-half_i), {Prim::e_m, Prim::a}));
      out.push_back(pt(k * I, {Prim::d_e_m}));
      out.push_back(pt(Poly(I), {Prim::rho, Prim::e_m}));
      break;
    case Current::H:
      h_term(CQ(Q(0), Q(-2)));
      out.push_back(pt(k * CQ(Q(0), Q(2)), {Prim::em_d_ep}));
      break;
  }
  return out;
}

const char* term_kind_name(TermKind k) {
  switch (k) {
    case TermKind::BAlpha: return "b-exp";
    case TermKind::AlphaA: return "exp-a";
    case TermKind::KappaD: return "kappa-d";
    case TermKind::RhoAlpha: return "rho-exp";
    case TermKind::BareA: return "bare-a";
    case TermKind::BareB: return "bare-b";
    case TermKind::Linear: return "linear";
  }
  return "?";
}

std::vector<VertexTerm> vertex_terms(Current c, const SectorConfig& cfg) {
  std::vector<VertexTerm> out;
  for (auto& t : expand_current(c, cfg, true)) {
    const auto& f = t.factors;
    if (f.size() == 1 && f[0] == Prim::a) out.push_back({TermKind::BareA, t.coeff, 0});
    else if (f.size() == 1 && f[0] == Prim::b) out.push_back({TermKind::BareB, t.coeff, 0});
    else if (f.size() == 1 && (f[0] == Prim::am_d_ap || f[0] == Prim::em_d_ep))
      out.push_back({TermKind::Linear, t.coeff, 0});
    else if (f.size() == 1) out.push_back({TermKind::KappaD, t.coeff, exp_info(f[0]).charge});
    else if (f[0] == Prim::b) out.push_back({TermKind::BAlpha, t.coeff, exp_info(f[1]).charge});
    else if (f[0] == Prim::rho) out.push_back({TermKind::RhoAlpha, t.coeff, exp_info(f[1]).charge});
    else out.push_back({TermKind::AlphaA, t.coeff, exp_info(f[0]).charge});
  }
  return out;
}

// ---------- primitive commutators ----------

DistributionExpr primitive_commutator(Prim x, int u, Prim y, int v, const SectorConfig& cfg) {
  const Realization r = cfg.realization;
  if (!prim_allowed(x, r) || !prim_allowed(y, r))
    throw Error(ErrorCode::RealizationMismatch, "primitive symbol outside the realization");
  DistributionExpr out(r);
  out.add_label(u);
  out.add_label(v);
  CQ lc;
  if (is_derivation(x) && is_derivation(y)) {
    if (cfg.sector == Sector::Nonunitary) return out;
    auto wa = [](Prim p) { return p == Prim::a ? Q(1) : p == Prim::h ? Q(1, 2) : Q(0); };
    auto wb = [](Prim p) { return p == Prim::b ? Q(1) : p == Prim::h ? Q(1, 2) : Q(0); };
    Q c = wa(x) * wb(y) - wb(x) * wa(y);
    if (sgn(c) == 0) return out;
    out.add_term(Term{Poly(CQ(c)), {}, {Fn{FnKind::Dker, 0, u, v, 0}}, {}});
    return canonicalize(out);
  }
  if (is_derivation(x)) {
    ExpInfo ei = exp_info(y);
    if (ei.is_exp) {
      // [a(u), E(v)] = i gamma E(v) delta(u-v), differentiated in v for the d-variants
      std::vector<Term> terms{Term{Poly(exponential_shift(r, ei.charge)), {Delta{u, v, 0}},
                                   {Fn{FnKind::Prim, 0, v, -1, static_cast<int>(ei.base)}}, {}}};
      for (int k = 0; k < ei.order; ++k) {
        std::vector<Term> nxt;
        for (auto& t : terms)
          for (auto& d : differentiate(t, v, r)) nxt.push_back(d);
        terms = nxt;
      }
      for (auto& t : terms) {
        normalize_factors(t);
        out.add_term(t);
      }
      return canonicalize(out);
    }
    if (linear_info(y, lc)) {
      out.add_term(Term{Poly(-I * lc), {Delta{u, v, 1}}, {}, {}});
      return canonicalize(out);
    }
    return out;
  }
  if (is_derivation(y)) return canonicalize(-primitive_commutator(y, v, x, u, cfg));
  if (x == Prim::rho && y == Prim::rho) {
    CQ s = cfg.rho_orientation() == RhoOrientation::Proof ? CQ(Q(0), Q(-2)) : CQ(Q(0), Q(2));
    out.add_term(Term{cfg.kappa * s, {Delta{u, v, 1}}, {}, {}});
    return canonicalize(out);
  }
  return out;
}

std::vector<std::string> jacobi_failures(const SectorConfig& cfg) {
  std::vector<Prim> alphabet;
  for (int i = 0; i < prim_count; ++i)
    if (prim_allowed(static_cast<Prim>(i), cfg.realization)) alphabet.push_back(static_cast<Prim>(i));
  const Realization r = cfg.realization;
  // [x(lx), expression] for an expression produced by an inner commutator
  auto outer = [&](Prim x, int lx, const DistributionExpr& inner) {
    DistributionExpr acc(r);
    for (auto& t : inner.terms()) {
      auto it = std::find_if(t.fns.begin(), t.fns.end(), [](const Fn& f) { return f.kind == FnKind::Prim; });
      if (it == t.fns.end()) continue;
      Fn res = *it;
      Term rest = t;
      rest.fns.erase(rest.fns.begin() + (it - t.fns.begin()));
      const int fresh = 99;
      DistributionExpr c = primitive_commutator(x, lx, static_cast<Prim>(res.sym), fresh, cfg);
      std::vector<Term> terms = c.terms();
      for (int k = 0; k < res.order; ++k) {
        std::vector<Term> nxt;
        for (auto& s : terms)
          for (auto& d : differentiate(s, fresh, r)) nxt.push_back(d);
        terms = nxt;
      }
      for (auto& s : terms) {
        if (!substitute(s, fresh, res.x)) continue;
        Term prod{s.coeff * rest.coeff, rest.deltas, rest.fns, rest.gauss};
        prod.deltas.insert(prod.deltas.end(), s.deltas.begin(), s.deltas.end());
        prod.fns.insert(prod.fns.end(), s.fns.begin(), s.fns.end());
        normalize_factors(prod);
        acc.add_term(prod);
      }
    }
    return acc;
  };
  std::vector<std::string> fails;
  for (Prim x : alphabet)
    for (Prim y : alphabet)
      for (Prim z : alphabet) {
        DistributionExpr j(r);
        j += outer(x, 1, primitive_commutator(y, 2, z, 3, cfg));
        j += outer(y, 2, primitive_commutator(z, 3, x, 1, cfg));
        j += outer(z, 3, primitive_commutator(x, 1, y, 2, cfg));
        DistributionExpr c = canonicalize(j);
        if (!c.is_zero())
          fails.push_back(std::string(prim_name(x)) + "," + prim_name(y) + "," + prim_name(z) + ": " + c.str());
      }
  return fails;
}

// ---------- star structure ----------

namespace {

using Word = std::vector<Prim>;
using Combo = std::map<Word, Poly>;

void add_to(Combo& c, const Word& w, const Poly& p) {
  auto& slot = c[w];
  slot += p;
  if (slot.is_zero()) c.erase(w);
}

// rho commutes with everything; products of exponentials at one point combine
// into the linear field through d(alpha+ alpha-) = 0
void normal_form(Poly coeff, Word w, Combo& out) {
  Word rest;
  int rhos = 0;
  for (Prim p : w)
    if (p == Prim::rho) ++rhos;
    else rest.push_back(p);
  Word result(rhos, Prim::rho);
  for (size_t i = 0; i < rest.size(); ++i) {
    if (i + 1 < rest.size()) {
      ExpInfo a = exp_info(rest[i]), b = exp_info(rest[i + 1]);
      if (a.is_exp && b.is_exp && a.order + b.order == 1 && a.charge == -b.charge) {
        // the derivative sits on the + factor for alpha- d alpha+ (resp. e- d e+)
        const ExpInfo& d = a.order == 1 ? a : b;
        bool kmode = d.base == Prim::alpha_p || d.base == Prim::alpha_m;
        if (d.charge < 0) coeff = -coeff;
        result.push_back(kmode ? Prim::am_d_ap : Prim::em_d_ep);
        ++i;
        continue;
      }
    }
    if (rest[i] == Prim::ap_d_am) {
      coeff = -coeff;
      result.push_back(Prim::am_d_ap);
      continue;
    }
    result.push_back(rest[i]);
  }
  add_to(out, result, coeff);
}

Word star_prim(Prim p) {
  switch (p) {
    case Prim::a: return {Prim::b};
    case Prim::b: return {Prim::a};
    case Prim::alpha_p: return {Prim::alpha_m};
    case Prim::alpha_m: return {Prim::alpha_p};
    case Prim::d_alpha_p: return {Prim::d_alpha_m};
    case Prim::d_alpha_m: return {Prim::d_alpha_p};
    // (x dy)* = (dy)* x*
    case Prim::am_d_ap: return {Prim::d_alpha_m, Prim::alpha_p};
    case Prim::ap_d_am: return {Prim::d_alpha_p, Prim::alpha_m};
    case Prim::em_d_ep: return {Prim::d_e_p, Prim::e_m};
    default: return {p};
  }
}

Combo combo_of(const std::vector<PrimitiveTerm>& terms, const CQ& scale) {
  Combo c;
  for (auto& t : terms) normal_form(t.coeff * scale, t.factors, c);
  return c;
}

Combo star_combo(const Combo& c) {
  Combo out;
  for (auto& [w, coeff] : c) {
    Word s;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      Word ps = star_prim(*it);
      s.insert(s.end(), ps.begin(), ps.end());
    }
    normal_form(coeff.conj(), s, out);
  }
  return out;
}

std::string combo_str(const Combo& c) {
  if (c.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [w, p] : c) {
    os << (first ? "" : " + ") << "(" << p.str() << ")";
    for (Prim x : w) os << " " << prim_name(x);
    first = false;
  }
  return os.str();
}

Current star_partner(Current c) {
  if (c == Current::Jp) return Current::Jm;
  if (c == Current::Jm) return Current::Jp;
  return c;
}

SectorConfig config_for(Current c, SectorConfig cfg) {
  cfg.realization = current_realization(c);
  return cfg;
}

}  // namespace

Verdict star_check(Current c, const SectorConfig& cfg0) {
  SectorConfig cfg = config_for(c, cfg0);
  Combo lhs = star_combo(combo_of(expand_current(c, cfg), CQ(1)));
  Combo rhs = combo_of(expand_current(star_partner(c), cfg), CQ(-1));
  for (auto& [w, p] : rhs) add_to(lhs, w, -p);
  Verdict v;
  v.relation = std::string(current_display(c)) + "* = -" + current_display(star_partner(c));
  v.pass = lhs.empty();
  v.residual = combo_str(lhs);
  return v;
}

bool star_involution(Current c, const SectorConfig& cfg0) {
  SectorConfig cfg = config_for(c, cfg0);
  Combo x = combo_of(expand_current(c, cfg), CQ(1));
  return star_combo(star_combo(x)) == x;
}

// ---------- classical realizations ----------

namespace {

// sum_k g^k f_k(h) with g = e+ (A) or alpha+ (K), g^-1 = e- (alpha-)
struct CElem {
  std::map<int, std::map<int, Poly>> t;  // power of g -> (power of h -> coefficient)

  void add(int k, int d, const Poly& c) {
    if (c.is_zero()) return;
    auto& slot = t[k][d];
    slot += c;
    if (slot.is_zero()) {
      t[k].erase(d);
      if (t[k].empty()) t.erase(k);
    }
  }
  bool is_zero() const { return t.empty(); }
};

Q binom(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return Q(r);
}

// [h, g] = c g, hence f(h) g^l = g^l f(h + l c)
CElem mul(const CElem& x, const CElem& y, const CQ& c) {
  CElem out;
  for (auto& [k, fk] : x.t)
    for (auto& [l, gl] : y.t) {
      CQ shift = c * CQ(l);
      for (auto& [d, a] : fk) {
        // a (h + shift)^d
        CQ sp(1);
        std::vector<CQ> pw{CQ(1)};
        for (int j = 1; j <= d; ++j) pw.push_back(pw.back() * shift);
        for (int j = 0; j <= d; ++j) {
          Poly aj = a * (pw[d - j] * CQ(binom(d, j)));
          for (auto& [e, b] : gl) out.add(k + l, j + e, aj * b);
        }
        (void)sp;
      }
    }
  return out;
}

CElem add(const CElem& x, const CElem& y, const Poly& s = Poly(1)) {
  CElem out = x;
  for (auto& [k, fk] : y.t)
    for (auto& [d, a] : fk) out.add(k, d, a * s);
  return out;
}

CElem comm(const CElem& x, const CElem& y, const CQ& c) { return add(mul(x, y, c), mul(y, x, c), Poly(-1)); }

CElem scaled(const CElem& x, const Poly& s) { return add(CElem{}, x, s); }

CElem star(const CElem& x, Realization r, const CQ& c) {
  // A: g* = g; K: g* = g^-1; h* = h
  CElem out;
  for (auto& [k, fk] : x.t) {
    CElem f;
    for (auto& [d, a] : fk) f.add(0, d, a.conj());
    CElem g;
    g.add(r == Realization::A ? k : -k, 0, Poly(1));
    out = add(out, mul(f, g, c));
  }
  return out;
}

CElem gen_h() {
  CElem e;
  e.add(0, 1, Poly(1));
  return e;
}

CElem gen_g(int k) {
  CElem e;
  e.add(k, 0, Poly(1));
  return e;
}

std::string celem_str(const CElem& x) {
  if (x.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [k, fk] : x.t)
    for (auto& [d, a] : fk) {
      os << (first ? "" : " + ") << "(" << a.str() << ") g^" << k << " h^" << d;
      first = false;
    }
  return os.str();
}

Verdict verdict(const std::string& rel, const CElem& residual) {
  return Verdict{residual.is_zero(), rel, celem_str(residual)};
}

}  // namespace

std::vector<Verdict> classical_check(Realization r, const Poly& lambda) {
  const CQ c = r == Realization::A ? CQ::I() : CQ(-1);
  CElem h = gen_h(), gp = gen_g(1), gm = gen_g(-1);
  auto sym = [&](const CElem& g) { return add(mul(g, h, c), mul(h, g, c)); };
  std::vector<Verdict> out;
  if (r == Realization::A) {
    CElem E = add(scaled(sym(gp), Poly(CQ(Q(0), Q(1, 2)))), scaled(gp, lambda * CQ::I()));
    CElem F = add(scaled(sym(gm), Poly(CQ(Q(0), Q(-1, 2)))), scaled(gm, lambda * CQ::I()));
    CElem H = scaled(h, Poly(CQ(Q(0), Q(-2))));
    out.push_back(verdict("[E,F] = H", add(comm(E, F, c), H, Poly(-1))));
    out.push_back(verdict("[H,E] = 2E", add(comm(H, E, c), E, Poly(-2))));
    out.push_back(verdict("[H,F] = -2F", add(comm(H, F, c), F, Poly(2))));
    out.push_back(verdict("E* = -E", add(star(E, r, c), E)));
    out.push_back(verdict("F* = -F", add(star(F, r, c), F)));
    out.push_back(verdict("H* = -H", add(star(H, r, c), H)));
  } else {
    CElem Jp = add(scaled(sym(gp), Poly(CQ(Q(0), Q(1, 2)))), scaled(gp, -lambda));
    CElem Jm = add(scaled(sym(gm), Poly(CQ(Q(0), Q(1, 2)))), scaled(gm, lambda));
    CElem J3 = scaled(h, Poly(CQ(Q(0), Q(2))));
    out.push_back(verdict("[J3,J+] = 2i J+", add(comm(J3, Jp, c), Jp, Poly(CQ(Q(0), Q(-2))))));
    out.push_back(verdict("[J3,J-] = -2i J-", add(comm(J3, Jm, c), Jm, Poly(CQ(Q(0), Q(2))))));
    out.push_back(verdict("[J+,J-] = -i J3", add(comm(Jp, Jm, c), J3, Poly(CQ::I()))));
    out.push_back(verdict("J+* = -J-", add(star(Jp, r, c), Jm)));
    out.push_back(verdict("J-* = -J+", add(star(Jm, r, c), Jp)));
    out.push_back(verdict("J3* = -J3", add(star(J3, r, c), J3)));
  }
  return out;
}

}  // namespace loopcorr
