#include <cmath>
#include <functional>

#include "loopcorr/error.hpp"
#include "loopcorr/verify.hpp"

namespace loopcorr {

namespace {

// Operators of the truncated model. E is the exponential e^{c X(z)}, D is d/du X(z).
struct Op {
  enum Type { A, B, E, D, R } type;
  cplx z;
  cplx c = 0;
};

class Model {
 public:
  explicit Model(const OracleModel& m) : m_(m) {
    for (int n = 1; n <= m.modes; ++n) xi_.push_back(m.seq.value(n));
  }

  // regularized delta and its derivative in the angle of w
  cplx delta(cplx z, cplx w) const {
    cplx acc = 1, a = 1, b = 1;
    for (int n = 1; n <= m_.modes; ++n) {
      a *= z * std::conj(w);
      b *= std::conj(z) * w;
      acc += a + b;
    }
    return acc;
  }
  cplx ddelta_w(cplx z, cplx w) const {
    cplx acc = 0, a = 1, b = 1;
    const cplx I(0, 1);
    for (int n = 1; n <= m_.modes; ++n) {
      a *= z * std::conj(w);
      b *= std::conj(z) * w;
      acc += -I * double(n) * a + I * double(n) * b;
    }
    return acc;
  }
  cplx dkernel(cplx z, cplx w) const {
    if (m_.sector != Sector::Unitary) return 0;
    cplx acc = 0, a = 1, b = 1;
    for (int n = 1; n <= m_.modes; ++n) {
      a *= z * std::conj(w);
      b *= std::conj(z) * w;
      acc += (a + b) / xi_[n - 1];
    }
    if (m_.realization == Realization::A) acc += 1.0 / (2 * m_.seq.xi0().get_d());
    return acc;
  }

  // [x(z), Y] for x in {a, b}; returns false when it vanishes
  bool commutator(const Op& x, const Op& y, cplx& scalar, bool& keep_y) const {
    keep_y = false;
    switch (y.type) {
      case Op::E:
        scalar = y.c * cplx(0, 1) * delta(x.z, y.z);
        keep_y = true;
        return true;
      case Op::D: scalar = cplx(0, 1) * ddelta_w(x.z, y.z); return true;
      case Op::B:
        if (x.type != Op::A) return false;
        scalar = dkernel(x.z, y.z);
        return true;
      case Op::A:
        if (x.type != Op::B) return false;
        scalar = dkernel(y.z, x.z);
        return true;
      case Op::R: return false;
    }
    return false;
  }

  cplx reduce(const std::vector<Op>& ops) const {
    int ia = -1;
    for (int i = static_cast<int>(ops.size()) - 1; i >= 0; --i)
      if (ops[i].type == Op::A) {
        ia = i;
        break;
      }
    if (ia >= 0) {
      if (ia + 1 == static_cast<int>(ops.size())) return 0;
      std::vector<Op> sw = ops;
      std::swap(sw[ia], sw[ia + 1]);
      cplx total = reduce(sw);
      cplx s;
      bool keep;
      if (commutator(ops[ia], ops[ia + 1], s, keep)) {
        std::vector<Op> rest;
        for (int i = 0; i < static_cast<int>(ops.size()); ++i)
          if (i != ia && (i != ia + 1 || keep)) rest.push_back(ops[i]);
        total += s * reduce(rest);
      }
      return total;
    }
    int ib = -1;
    for (int i = 0; i < static_cast<int>(ops.size()); ++i)
      if (ops[i].type == Op::B) {
        ib = i;
        break;
      }
    if (ib >= 0) {
      if (ib == 0) return 0;
      std::vector<Op> sw = ops;
      std::swap(sw[ib], sw[ib - 1]);
      cplx total = reduce(sw);
      cplx s;
      bool keep;
      if (commutator(ops[ib], ops[ib - 1], s, keep)) {
        std::vector<Op> rest;
        for (int i = 0; i < static_cast<int>(ops.size()); ++i)
          if (i != ib && (i != ib - 1 || keep)) rest.push_back(ops[i]);
        total -= s * reduce(rest);
      }
      return total;
    }
    return fock(ops) * gaussian(ops);
  }

  cplx fock(const std::vector<Op>& ops) const {
    std::vector<cplx> zs;
    for (auto& o : ops)
      if (o.type == Op::R) zs.push_back(o.z);
    auto pair = [&](cplx l, cplx r) {
      cplx acc = 0, t = 1;
      cplx base = resolve_rho(m_.rho, m_.realization) == RhoOrientation::Proof ? l * std::conj(r) : std::conj(l) * r;
      for (int n = 1; n <= m_.modes; ++n) {
        t *= base;
        acc += double(n) * t;
      }
      return 2 * m_.kappa * acc;
    };
    std::vector<bool> used(zs.size(), false);
    std::function<cplx(size_t)> rec = [&](size_t i) -> cplx {
      while (i < zs.size() && used[i]) ++i;
      if (i == zs.size()) return 1;
      used[i] = true;
      cplx total = m_.p * rec(i + 1);
      for (size_t j = i + 1; j < zs.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        total += pair(zs[i], zs[j]) * rec(i + 1);
        used[j] = false;
      }
      used[i] = false;
      return total;
    };
    return rec(0);
  }

  // Real coordinates: x0 (A only), then P_n, Q_n with x_n = P_n + i Q_n.
  std::vector<double> variances() const {
    std::vector<double> v;
    if (m_.realization == Realization::A) v.push_back(2 * m_.seq.xi0().get_d());
    for (double x : xi_) v.push_back(x / 2), v.push_back(x / 2);
    return v;
  }
  std::vector<cplx> field_form(cplx z, bool derivative) const {
    std::vector<cplx> l;
    if (m_.realization == Realization::A) l.push_back(derivative ? 0.0 : 1.0);
    cplx zn = 1;
    for (int n = 1; n <= m_.modes; ++n) {
      zn *= z;
      cplx w = derivative ? cplx(0, n) * zn : zn;
      // x_n conj(z)^n + conj(x_n) z^n with x_n = P + iQ
      l.push_back(2 * w.real());
      l.push_back(2 * w.imag());
    }
    return l;
  }

  cplx gaussian(const std::vector<Op>& ops) const {
    const auto var = variances();
    std::vector<cplx> beta(var.size(), 0);
    std::vector<std::vector<cplx>> lin;
    cplx charge = 0;
    for (auto& o : ops) {
      if (o.type == Op::E) {
        auto l = field_form(o.z, false);
        for (size_t k = 0; k < l.size(); ++k) beta[k] += o.c * l[k];
        charge += o.c;
      } else if (o.type == Op::D) {
        lin.push_back(field_form(o.z, true));
      }
    }
    // the K zero mode is a uniform angle: only neutral products survive
    if (m_.realization == Realization::K && std::abs(charge) > 1e-12) return 0;
    auto dot = [&](const std::vector<cplx>& x, const std::vector<cplx>& y) {
      cplx s = 0;
      for (size_t k = 0; k < var.size(); ++k) s += var[k] * x[k] * y[k];
      return s;
    };
    cplx expo = 0.5 * dot(beta, beta);
    std::vector<bool> used(lin.size(), false);
    std::function<cplx(size_t)> rec = [&](size_t i) -> cplx {
      while (i < lin.size() && used[i]) ++i;
      if (i == lin.size()) return 1;
      used[i] = true;
      cplx total = dot(lin[i], beta) * rec(i + 1);
      for (size_t j = i + 1; j < lin.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        total += dot(lin[i], lin[j]) * rec(i + 1);
        used[j] = false;
      }
      used[i] = false;
      return total;
    };
    return std::exp(expo) * rec(0);
  }

  const OracleModel& model() const { return m_; }

 private:
  const OracleModel& m_;
  std::vector<double> xi_;
};

cplx exp_coeff(Realization r, int charge) { return r == Realization::K ? cplx(0, charge) : cplx(charge, 0); }

// appends the operators for one primitive; returns the scalar prefactor
cplx push_prim(std::vector<Op>& ops, Prim p, cplx z, Realization r) {
  switch (p) {
    case Prim::a: ops.push_back({Op::A, z}); return 1;
    case Prim::b: ops.push_back({Op::B, z}); return 1;
    case Prim::rho: ops.push_back({Op::R, z}); return 1;
    case Prim::alpha_p:
    case Prim::e_p: ops.push_back({Op::E, z, exp_coeff(r, 1)}); return 1;
    case Prim::alpha_m:
    case Prim::e_m: ops.push_back({Op::E, z, exp_coeff(r, -1)}); return 1;
    case Prim::d_alpha_p:
    case Prim::d_e_p:
      ops.push_back({Op::D, z});
      ops.push_back({Op::E, z, exp_coeff(r, 1)});
      return exp_coeff(r, 1);
    case Prim::d_alpha_m:
    case Prim::d_e_m:
      ops.push_back({Op::D, z});
      ops.push_back({Op::E, z, exp_coeff(r, -1)});
      return exp_coeff(r, -1);
    case Prim::am_d_ap:
    case Prim::em_d_ep: ops.push_back({Op::D, z}); return exp_coeff(r, 1);
    case Prim::ap_d_am: ops.push_back({Op::D, z}); return exp_coeff(r, -1);
    case Prim::h: break;
  }
  throw Error(ErrorCode::InvalidArgument, "h must be split before reaching the oracle");
}

void check_prims(const std::vector<OracleFactor>& word, Realization r) {
  for (auto& f : word)
    if (!prim_allowed(f.prim, r))
      throw Error(ErrorCode::RealizationMismatch, std::string("primitive ") + prim_name(f.prim) + " not in this realization");
}

}  // namespace

cplx gaussian_oracle(const std::vector<OracleFactor>& word, const OracleModel& m) {
  check_prims(word, m.realization);
  Model model(m);
  std::vector<cplx> zs;
  for (auto& f : word) zs.push_back(std::polar(f.radius, f.angle));
  // h = (a + b)/2: expand every h into its two halves
  cplx total = 0;
  std::function<void(size_t, std::vector<Op>&, cplx)> rec = [&](size_t i, std::vector<Op>& ops, cplx c) {
    if (i == word.size()) {
      total += c * model.reduce(ops);
      return;
    }
    if (word[i].prim == Prim::h) {
      for (Op::Type t : {Op::A, Op::B}) {
        ops.push_back({t, zs[i]});
        rec(i + 1, ops, c * 0.5);
        ops.pop_back();
      }
      return;
    }
    size_t mark = ops.size();
    cplx k = push_prim(ops, word[i].prim, zs[i], m.realization);
    rec(i + 1, ops, c * k);
    ops.resize(mark);
  };
  std::vector<Op> ops;
  rec(0, ops, 1);
  return total;
}

cplx oracle_correlator(const CurrentWord& w, const OracleModel& m, const std::map<int, double>& angles) {
  w.validate();
  const Realization r = w.realization(m.realization);
  if (!w.empty() && r != m.realization) throw Error(ErrorCode::RealizationMismatch, "word and model differ");
  SectorConfig cfg;
  cfg.realization = r;
  cfg.sector = m.sector;
  cfg.rho = m.rho;
  ScalarValues vals{{var::kappa, m.kappa}, {var::p, m.p}};
  std::vector<std::vector<std::pair<cplx, std::vector<Prim>>>> choices;
  std::vector<cplx> zs;
  for (auto& it : w.items) {
    auto a = angles.find(it.label);
    if (a == angles.end()) throw Error(ErrorCode::InvalidArgument, "no angle for label " + std::to_string(it.label));
    zs.push_back(std::polar(it.radius, a->second));
    std::vector<std::pair<cplx, std::vector<Prim>>> opts;
    for (auto& t : expand_current(it.current, cfg, true)) opts.push_back({t.coeff.evaluate(vals), t.factors});
    choices.push_back(std::move(opts));
  }
  Model model(m);
  cplx total = 0;
  std::function<void(size_t, std::vector<Op>&, cplx)> rec = [&](size_t i, std::vector<Op>& ops, cplx c) {
    if (i == choices.size()) {
      total += c * model.reduce(ops);
      return;
    }
    for (auto& [coef, prims] : choices[i]) {
      size_t mark = ops.size();
      cplx k = coef;
      for (Prim p : prims) k *= push_prim(ops, p, zs[i], r);
      rec(i + 1, ops, c * k);
      ops.resize(mark);
    }
  };
  std::vector<Op> ops;
  rec(0, ops, 1);
  return total;
}

CQ rational_rotation(int a, int b, int c, int k) {
  if (a * a + b * b != c * c) throw Error(ErrorCode::InvalidArgument, "not a Pythagorean triple");
  CQ base(Q(a, c), Q(b, c));
  if (k < 0) base = base.conj(), k = -k;
  CQ out(1);
  for (int i = 0; i < k; ++i) out *= base;
  return out;
}

namespace {

CQ cpow(const CQ& z, int n) {
  CQ out(1);
  for (int i = 0; i < n; ++i) out *= z;
  return out;
}

Q xi_exact(const XiSequence& seq, int n) {
  if (!seq.exact_at(n)) throw Error(ErrorCode::InvalidArgument, "exact moments need rational xi values");
  return seq.exact(n);
}

bool charge_killed(Realization r, const std::vector<ExactPoint>& pts) {
  int total = 0;
  for (auto& p : pts) total += p.charge;
  return r == Realization::K && total != 0;
}

}  // namespace

ExactMoment oracle_exponent(Realization r, const std::vector<ExactPoint>& pts, const XiSequence& seq, int modes) {
  ExactMoment out;
  if (charge_killed(r, pts)) {
    out.zero = true;
    return out;
  }
  // beta over real coordinates; K exponentials carry i*s, A exponentials s
  auto gamma = [&](int s) { return r == Realization::K ? CQ(Q(0), Q(s)) : CQ(s); };
  CQ expo(0);
  if (r == Realization::A) {
    CQ b0(0);
    for (auto& p : pts) b0 += gamma(p.charge);
    expo += CQ(Q(1, 2)) * CQ(2 * seq.xi0()) * b0 * b0;
  }
  for (int n = 1; n <= modes; ++n) {
    CQ bp(0), bq(0);
    for (auto& p : pts) {
      CQ zn = cpow(p.z, n);
      bp += gamma(p.charge) * CQ(2 * zn.re);
      bq += gamma(p.charge) * CQ(2 * zn.im);
    }
    Q v = xi_exact(seq, n) / 2;
    expo += CQ(Q(1, 2) * v) * (bp * bp + bq * bq);
  }
  out.exponent = expo;
  return out;
}

ExactMoment closed_form_exponent(Realization r, const std::vector<ExactPoint>& pts, const XiSequence& seq,
                                 int modes) {
  ExactMoment out;
  if (charge_killed(r, pts)) {
    out.zero = true;
    return out;
  }
  // N(z,w) = sum_n xi_n ((z conj w)^n + (conj z w)^n), plus 2 xi0 for A
  auto N = [&](const CQ& z, const CQ& w) {
    CQ acc = r == Realization::A ? CQ(2 * seq.xi0()) : CQ(0);
    CQ a = z * w.conj(), b = z.conj() * w;
    CQ an(1), bn(1);
    for (int n = 1; n <= modes; ++n) {
      an *= a;
      bn *= b;
      acc += CQ(xi_exact(seq, n)) * (an + bn);
    }
    return acc;
  };
  CQ expo(0);
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const bool same = pts[i].charge == pts[j].charge;
      // e: like charges attract +N; alpha: like charges -N
      int sign = r == Realization::A ? (same ? 1 : -1) : (same ? -1 : 1);
      expo += CQ(sign) * N(pts[i].z, pts[j].z);
    }
    // self terms: (n+m)/2 N(0,0) for e, -n N(0,0) for n alpha pairs
    CQ self = CQ(Q(1, 2)) * N(pts[i].z, pts[i].z);
    expo += r == Realization::A ? self : -self;
  }
  out.exponent = expo;
  return out;
}

cplx closed_form_value(Realization r, const std::vector<int>& charges, const std::vector<double>& angles,
                       const std::vector<double>& radii, const XiSequence& seq, int modes) {
  int total = 0;
  for (int c : charges) total += c;
  if (r == Realization::K && total != 0) return 0;
  auto N = [&](size_t i, size_t j) {
    double acc = r == Realization::A ? 2 * seq.xi0().get_d() : 0;
    const double rho = radii[i] * radii[j];
    double rn = 1;
    for (int n = 1; n <= modes; ++n) {
      rn *= rho;
      acc += 2 * seq.value(n) * rn * std::cos(n * (angles[i] - angles[j]));
    }
    return acc;
  };
  double expo = 0;
  for (size_t i = 0; i < charges.size(); ++i) {
    for (size_t j = i + 1; j < charges.size(); ++j) {
      const bool same = charges[i] == charges[j];
      int sign = r == Realization::A ? (same ? 1 : -1) : (same ? -1 : 1);
      expo += sign * N(i, j);
    }
    expo += (r == Realization::A ? 0.5 : -0.5) * N(i, i);
  }
  return std::exp(expo);
}

}  // namespace loopcorr
