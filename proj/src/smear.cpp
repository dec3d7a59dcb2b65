#include <cmath>
#include <numbers>

#include "loopcorr/distributions.hpp"
#include "loopcorr/error.hpp"

namespace loopcorr {

TestPoly TestPoly::derivative(int k) const {
  TestPoly r;
  for (auto& [n, c] : coeff) {
    cplx f = std::pow(cplx(0, n), k);
    if (k == 0) f = 1;
    if (std::abs(f) != 0) r.coeff[n] = c * f;
  }
  return r;
}

TestPoly TestPoly::conj() const {
  TestPoly r;
  for (auto& [n, c] : coeff) r.coeff[-n] = std::conj(c);
  return r;
}

cplx TestPoly::operator()(double u) const {
  cplx acc = 0;
  for (auto& [n, c] : coeff) acc += c * std::polar(1.0, n * u);
  return acc;
}

TestPoly TestPoly::operator*(const TestPoly& o) const {
  TestPoly r;
  for (auto& [n, c] : coeff)
    for (auto& [m, d] : o.coeff) r.coeff[n + m] += c * d;
  return r;
}

int TestPoly::degree() const {
  int d = 0;
  for (auto& [n, c] : coeff) d = std::max(d, std::abs(n));
  return d;
}

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

double gamma_product(Realization r, int s, int t) {
  return r == Realization::K ? -double(s) * t : double(s) * t;
}

// pair factor evaluated through a lookup table over grid differences
struct PairFactor {
  int a, b;  // indices into the active list
  std::vector<cplx> table;
};

struct GroupEval {
  std::vector<int> active;
  cplx constant = 1;
  std::vector<PairFactor> mult;  // multiplied
  std::vector<PairFactor> expo;  // summed into the exponent
};

double radius_of(const DistributionExpr& e, int l) {
  auto it = e.radii().find(l);
  return it == e.radii().end() ? 1.0 : it->second;
}

// Builds the evaluator of the non-test part of a term on an M-point grid.
GroupEval build_group(const DistributionExpr& e, const Term& t, const std::vector<int>& active, const KernelBackend& kb,
                      int M, bool with_deltas) {
  GroupEval g;
  g.active = active;
  auto idx = [&](int l) {
    for (size_t i = 0; i < active.size(); ++i)
      if (active[i] == l) return static_cast<int>(i);
    throw Error(ErrorCode::InvalidArgument, "label outside active set");
  };
  auto make = [&](int x, int y, const std::function<cplx(double, double)>& f) {
    PairFactor p{idx(x), idx(y), std::vector<cplx>(M)};
    double rho = radius_of(e, x) * radius_of(e, y);
    for (int j = 0; j < M; ++j) p.table[j] = f(two_pi * j / M, rho);
    return p;
  };
  for (auto& f : t.fns) {
    switch (f.kind) {
      case FnKind::Kc: g.constant *= kb.cov(f.order, 0.0); break;
      case FnKind::Kern:
        g.mult.push_back(make(f.x, f.y, [&](double th, double rho) { return cplx(kb.cov(f.order, th, rho)); }));
        break;
      case FnKind::Dker:
        kb.check_dker(radius_of(e, f.x) * radius_of(e, f.y));
        g.mult.push_back(make(f.x, f.y, [&](double th, double rho) { return cplx(kb.dker(f.order, th, rho)); }));
        break;
      case FnKind::Wav:
        g.mult.push_back(make(f.x, f.y, [&](double th, double rho) {
          return kb.wav(f.order, th, rho, with_deltas ? -1 : M / 2 - 1);
        }));
        break;
      case FnKind::Prim: throw Error(ErrorCode::InvalidArgument, "operator residues cannot be smeared");
    }
  }
  if (with_deltas)
    for (auto& d : t.deltas)
      g.mult.push_back(make(d.x, d.y, [&](double th, double rho) { return kb.delta(d.k, th, rho); }));
  const Realization r = e.realization();
  for (size_t i = 0; i < t.gauss.size(); ++i) {
    const Slot& s = t.gauss[i];
    double rr = radius_of(e, s.label);
    g.constant *= std::exp(0.5 * gamma_product(r, s.charge, s.charge) * kb.cov(0, 0.0, rr * rr));
    for (size_t j = i + 1; j < t.gauss.size(); ++j) {
      const Slot& o = t.gauss[j];
      double gp = gamma_product(r, s.charge, o.charge);
      g.expo.push_back(make(s.label, o.label, [&](double th, double rho) { return cplx(gp * kb.cov(0, th, rho)); }));
    }
  }
  return g;
}

cplx eval_group(const GroupEval& g, const std::vector<int>& pos, int M) {
  cplx v = g.constant;
  for (auto& p : g.mult) v *= p.table[((pos[p.a] - pos[p.b]) % M + M) % M];
  if (!g.expo.empty()) {
    cplx ex = 0;
    for (auto& p : g.expo) ex += p.table[((pos[p.a] - pos[p.b]) % M + M) % M];
    v *= std::exp(ex);
  }
  return v;
}

// constant Fourier coefficient in w of prod_k P_k(w + v_k)
cplx shifted_product_mean(const std::vector<const TestPoly*>& polys, const std::vector<double>& shifts) {
  std::map<int, cplx> acc{{0, 1}};
  for (size_t k = 0; k < polys.size(); ++k) {
    std::map<int, cplx> nxt;
    for (auto& [n, c] : acc)
      for (auto& [m, d] : polys[k]->coeff) nxt[n + m] += c * d * std::polar(1.0, m * shifts[k]);
    acc = std::move(nxt);
  }
  auto it = acc.find(0);
  return it == acc.end() ? cplx(0) : it->second;
}

struct PreparedTerm {
  cplx coeff;
  std::vector<TestPoly> active_tests;  // aligned with the group's active list
};

int default_grid(const KernelBackend& kb, int test_degree) { return 6 * kb.truncation() + 4 * test_degree + 48; }

cplx integrate(const std::vector<std::pair<Term, std::vector<PreparedTerm>>>& groups, const DistributionExpr& e,
               const std::vector<std::vector<int>>& actives, const KernelBackend& kb, int M, bool with_deltas) {
  cplx total = 0;
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& [rep, members] = groups[gi];
    const auto& active = actives[gi];
    const size_t d = active.size();
    GroupEval ge = build_group(e, rep, active, kb, M, with_deltas);
    std::vector<const TestPoly*> ptrs(d);
    if (d <= 1) {
      std::vector<int> pos(d, 0);
      cplx f = eval_group(ge, pos, M);
      for (auto& m : members) {
        cplx tv = 1;
        if (d == 1) {
          auto it = m.active_tests[0].coeff.find(0);
          tv = it == m.active_tests[0].coeff.end() ? cplx(0) : it->second;
        }
        total += f * m.coeff * tv;
      }
      continue;
    }
    // translation invariance: the first active variable is pinned at 0
    std::vector<int> pos(d, 0);
    std::vector<double> shifts(d, 0.0);
    size_t points = 1;
    for (size_t k = 1; k < d; ++k) points *= M;
    cplx acc = 0;
    for (size_t p = 0; p < points; ++p) {
      size_t q = p;
      for (size_t k = 1; k < d; ++k) {
        pos[k] = static_cast<int>(q % M);
        q /= M;
        shifts[k] = two_pi * pos[k] / M;
      }
      cplx tsum = 0;
      for (auto& m : members) {
        for (size_t k = 0; k < d; ++k) ptrs[k] = &m.active_tests[k];
        tsum += m.coeff * shifted_product_mean(ptrs, shifts);
      }
      if (tsum == cplx(0)) continue;
      acc += eval_group(ge, pos, M) * tsum;
    }
    total += acc / static_cast<double>(points);
  }
  return total;
}

const TestPoly& test_for(const std::map<int, TestPoly>& tests, int l) {
  auto it = tests.find(l);
  if (it == tests.end()) throw Error(ErrorCode::InvalidArgument, "no test function for label " + std::to_string(l));
  return it->second;
}

std::set<int> all_labels(const DistributionExpr& e) {
  std::set<int> ls = e.labels();
  for (auto& t : e.terms()) {
    for (auto& d : t.deltas) ls.insert({d.x, d.y});
    for (auto& f : t.fns)
      if (f.kind != FnKind::Kc) {
        ls.insert(f.x);
        if (f.y >= 0) ls.insert(f.y);
      }
    for (auto& s : t.gauss) ls.insert(s.label);
  }
  return ls;
}

using GroupKey = std::pair<std::vector<Fn>, std::vector<Slot>>;

}  // namespace

cplx smear(const DistributionExpr& e0, const std::map<int, TestPoly>& tests, const KernelBackend& kb,
           const ScalarValues& values, const SmearOptions& opt) {
  if (!e0.on_circle()) throw Error(ErrorCode::InvalidArgument, "smear expects an on-circle expression");
  DistributionExpr e = canonicalize(e0);
  if (!detect_singular(e).empty()) throw Error(ErrorCode::SingularProduct, "cannot smear a singular expression");
  const std::set<int> labels = all_labels(e);
  int deg = 0;
  for (int l : labels) deg += test_for(tests, l).degree();

  std::map<GroupKey, size_t> index;
  std::vector<std::pair<Term, std::vector<PreparedTerm>>> groups;
  std::vector<std::vector<int>> actives;
  for (auto& t : e.terms()) {
    std::map<int, int> root, jet;
    for (int l : labels) root[l] = l, jet[l] = 0;
    for (auto& d : t.deltas) root[d.y] = d.x, jet[d.y] = d.k;
    std::set<int> active;
    for (auto& f : t.fns)
      if (f.kind != FnKind::Kc) active.insert({f.x, f.y});
    for (auto& s : t.gauss) active.insert(s.label);
    std::map<int, TestPoly> prod;
    for (int l : labels) {
      TestPoly tp = test_for(tests, l).derivative(jet[l]);
      auto it = prod.find(root[l]);
      if (it == prod.end()) prod[root[l]] = tp;
      else it->second = it->second * tp;
    }
    PreparedTerm pt{t.coeff.evaluate(values), {}};
    for (auto& [r, tp] : prod) {
      if (active.count(r)) continue;
      auto it = tp.coeff.find(0);
      pt.coeff *= it == tp.coeff.end() ? cplx(0) : it->second;
    }
    if (pt.coeff == cplx(0)) continue;
    std::vector<int> act(active.begin(), active.end());
    for (int a : act) pt.active_tests.push_back(prod.at(a));
    GroupKey key{t.fns, t.gauss};
    auto it = index.find(key);
    if (it == index.end()) {
      index[key] = groups.size();
      groups.push_back({t, {pt}});
      actives.push_back(act);
    } else {
      groups[it->second].second.push_back(std::move(pt));
    }
  }
  int M = opt.grid > 0 ? opt.grid : default_grid(kb, deg);
  return integrate(groups, e, actives, kb, M, false);
}

cplx smear_interior(const DistributionExpr& e, const std::map<int, TestPoly>& tests, const KernelBackend& kb,
                    const ScalarValues& values, int grid) {
  const std::set<int> labels = all_labels(e);
  std::vector<int> act(labels.begin(), labels.end());
  std::vector<std::pair<Term, std::vector<PreparedTerm>>> groups;
  std::vector<std::vector<int>> actives;
  for (auto& t : e.terms()) {
    PreparedTerm pt{t.coeff.evaluate(values), {}};
    for (int a : act) pt.active_tests.push_back(test_for(tests, a));
    groups.push_back({t, {pt}});
    actives.push_back(act);
  }
  return integrate(groups, e, actives, kb, grid, true);
}

cplx evaluate_at(const DistributionExpr& e, const std::map<int, double>& angles, const KernelBackend& kb,
                 const ScalarValues& values) {
  cplx total = 0;
  auto ang = [&](int l) {
    auto it = angles.find(l);
    if (it == angles.end()) throw Error(ErrorCode::InvalidArgument, "no angle for label " + std::to_string(l));
    return it->second;
  };
  const Realization r = e.realization();
  for (auto& t : e.terms()) {
    cplx v = t.coeff.evaluate(values);
    for (auto& d : t.deltas)
      v *= kb.delta(d.k, ang(d.x) - ang(d.y), radius_of(e, d.x) * radius_of(e, d.y));
    for (auto& f : t.fns) {
      switch (f.kind) {
        case FnKind::Kc: v *= kb.cov(f.order, 0.0); break;
        case FnKind::Kern: v *= kb.cov(f.order, ang(f.x) - ang(f.y), radius_of(e, f.x) * radius_of(e, f.y)); break;
        case FnKind::Dker: {
          double rho = radius_of(e, f.x) * radius_of(e, f.y);
          kb.check_dker(rho);
          v *= kb.dker(f.order, ang(f.x) - ang(f.y), rho);
          break;
        }
        case FnKind::Wav: v *= kb.wav(f.order, ang(f.x) - ang(f.y), radius_of(e, f.x) * radius_of(e, f.y)); break;
        case FnKind::Prim: throw Error(ErrorCode::InvalidArgument, "operator residues cannot be evaluated");
      }
    }
    double ex = 0;
    for (size_t i = 0; i < t.gauss.size(); ++i)
      for (size_t j = 0; j < t.gauss.size(); ++j) {
        const Slot &a = t.gauss[i], &b = t.gauss[j];
        ex += 0.5 * gamma_product(r, a.charge, b.charge) *
              kb.cov(0, ang(a.label) - ang(b.label), radius_of(e, a.label) * radius_of(e, b.label));
      }
    total += v * std::exp(ex);
  }
  return total;
}

}  // namespace loopcorr
