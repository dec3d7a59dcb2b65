#include "loopcorr/distributions.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <tuple>

#include "loopcorr/error.hpp"

namespace loopcorr {

namespace {

using TermKey = std::tuple<std::vector<Delta>, std::vector<Fn>, std::vector<Slot>>;

CQ sign_of(int k) { return (k % 2) ? CQ(-1) : CQ(1); }

void singular(const std::string& what) { throw Error(ErrorCode::SingularProduct, what); }

bool is_pair_kernel(FnKind k) { return k == FnKind::Kern || k == FnKind::Wav || k == FnKind::Dker; }

}  // namespace

// ---------- term calculus ----------

void normalize_factors_impl(Term& t, bool& zero) {
  zero = false;
  for (auto& d : t.deltas) {
    if (d.x == d.y) singular("delta at coincident points");
    if (d.x > d.y) {
      std::swap(d.x, d.y);
      t.coeff *= sign_of(d.k);
    }
  }
  std::sort(t.deltas.begin(), t.deltas.end());
  for (auto& f : t.fns) {
    if (f.kind == FnKind::Kern) {
      if (f.x == f.y) {
        if (f.order % 2) {
          zero = true;
          return;
        }
        f.kind = FnKind::Kc;
        f.x = f.y = -1;
      } else if (f.x > f.y) {
        std::swap(f.x, f.y);
        t.coeff *= sign_of(f.order);
      }
    } else if (f.kind == FnKind::Dker) {
      if (f.x == f.y) singular("D kernel at coincident points");
      if (f.x > f.y) {
        std::swap(f.x, f.y);
        t.coeff *= sign_of(f.order);
      }
    } else if (f.kind == FnKind::Wav) {
      if (f.x == f.y) singular("Heisenberg propagator at coincident points");
    }
  }
  std::sort(t.fns.begin(), t.fns.end());
  std::sort(t.gauss.begin(), t.gauss.end());
  std::vector<Slot> merged;
  for (auto& s : t.gauss) {
    if (!merged.empty() && merged.back().label == s.label) merged.back().charge += s.charge;
    else merged.push_back(s);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Slot& s) { return s.charge == 0; }),
               merged.end());
  t.gauss = std::move(merged);
  if (t.coeff.is_zero()) zero = true;
}

void normalize_factors(Term& t) {
  bool zero;
  normalize_factors_impl(t, zero);
  if (zero) t.coeff = Poly();
}

std::vector<Term> differentiate(const Term& t, int label, Realization r) {
  std::vector<Term> out;
  for (size_t i = 0; i < t.deltas.size(); ++i) {
    const Delta& d = t.deltas[i];
    if (d.x != label && d.y != label) continue;
    Term n = t;
    n.deltas[i].k += 1;
    if (d.y == label) n.coeff *= CQ(-1);
    out.push_back(std::move(n));
  }
  for (size_t i = 0; i < t.fns.size(); ++i) {
    const Fn& f = t.fns[i];
    if (f.kind == FnKind::Prim) {
      if (f.x != label) continue;
      Term n = t;
      n.fns[i].order += 1;
      out.push_back(std::move(n));
      continue;
    }
    if (!is_pair_kernel(f.kind)) continue;
    if (f.x != label && f.y != label) continue;
    Term n = t;
    n.fns[i].order += 1;
    if (f.y == label) n.coeff *= CQ(-1);
    out.push_back(std::move(n));
  }
  int own = 0;
  for (auto& s : t.gauss)
    if (s.label == label) own += s.charge;
  if (own != 0) {
    for (auto& s : t.gauss) {
      if (s.label == label) continue;
      // d/du_x of exp(1/2 sum gamma gamma f) brings down gamma_x gamma_y f'(u_x - u_y)
      long gg = static_cast<long>(own) * s.charge;
      if (r == Realization::K) gg = -gg;
      Term n = t;
      n.coeff *= CQ(gg);
      n.fns.push_back(Fn{FnKind::Kern, 1, label, s.label, 0});
      out.push_back(std::move(n));
    }
  }
  for (auto& n : out) normalize_factors(n);
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& x) { return x.coeff.is_zero(); }), out.end());
  return out;
}

bool substitute(Term& t, int from, int to) {
  for (auto& d : t.deltas) {
    if (d.x == from) d.x = to;
    if (d.y == from) d.y = to;
  }
  for (auto& f : t.fns) {
    if (f.x == from) f.x = to;
    if (f.y == from) f.y = to;
  }
  for (auto& s : t.gauss)
    if (s.label == from) s.label = to;
  normalize_factors(t);
  return !t.coeff.is_zero();
}

static bool charge_ok(const Term& t, Realization r) {
  if (r != Realization::K) return true;
  int total = 0;
  for (auto& s : t.gauss) total += s.charge;
  return total == 0;
}

std::vector<Term> merge_terms(std::vector<Term> terms, Realization r) {
  std::map<TermKey, Poly> acc;
  for (auto& t : terms) {
    normalize_factors(t);
    if (t.coeff.is_zero() || !charge_ok(t, r)) continue;
    // a finished Gaussian factor only sees products of charges, so a global flip is the same function
    if (!t.gauss.empty() && t.gauss.front().charge < 0)
      for (auto& s : t.gauss) s.charge = -s.charge;
    TermKey key{std::move(t.deltas), std::move(t.fns), std::move(t.gauss)};
    auto it = acc.find(key);
    if (it == acc.end()) acc.emplace(std::move(key), std::move(t.coeff));
    else it->second += t.coeff;
  }
  std::vector<Term> out;
  for (auto& [k, c] : acc) {
    if (c.is_zero()) continue;
    out.push_back(Term{c, std::get<0>(k), std::get<1>(k), std::get<2>(k)});
  }
  return out;
}

// ---------- expression plumbing ----------

DistributionExpr DistributionExpr::scalar(Realization r, const Poly& c) {
  DistributionExpr e(r);
  if (!c.is_zero()) e.terms_.push_back(Term{c, {}, {}, {}});
  return e;
}

DistributionExpr DistributionExpr::delta(Realization r, int x, int y, int k, const Poly& c) {
  DistributionExpr e(r);
  e.labels_.insert(x);
  e.labels_.insert(y);
  Term t{c, {Delta{x, y, k}}, {}, {}};
  normalize_factors(t);
  e.terms_.push_back(t);
  return e;
}

bool DistributionExpr::on_circle() const {
  for (auto& [l, r] : radii_)
    if (r != 1.0) return false;
  return true;
}

void DistributionExpr::add_term(Term t) {
  if (!t.coeff.is_zero()) terms_.push_back(std::move(t));
}

DistributionExpr& DistributionExpr::operator+=(const DistributionExpr& o) {
  labels_.insert(o.labels_.begin(), o.labels_.end());
  for (auto& [l, r] : o.radii_) radii_[l] = r;
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

DistributionExpr& DistributionExpr::operator-=(const DistributionExpr& o) { return *this += -o; }

DistributionExpr& DistributionExpr::operator*=(const Poly& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coeff *= c;
  return *this;
}

DistributionExpr DistributionExpr::operator-() const {
  DistributionExpr r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

DistributionExpr operator*(const DistributionExpr& a, const DistributionExpr& b) {
  DistributionExpr r(a.realization());
  r.add_labels(a.labels());
  r.add_labels(b.labels());
  for (auto& [l, x] : a.radii()) r.set_radius(l, x);
  for (auto& [l, x] : b.radii()) r.set_radius(l, x);
  for (auto& s : a.terms())
    for (auto& t : b.terms()) {
      Term n{s.coeff * t.coeff, s.deltas, s.fns, s.gauss};
      n.deltas.insert(n.deltas.end(), t.deltas.begin(), t.deltas.end());
      n.fns.insert(n.fns.end(), t.fns.begin(), t.fns.end());
      n.gauss.insert(n.gauss.end(), t.gauss.begin(), t.gauss.end());
      r.add_term(std::move(n));
    }
  return r;
}

bool operator==(const DistributionExpr& a, const DistributionExpr& b) {
  if (a.terms().size() != b.terms().size()) return false;
  for (size_t i = 0; i < a.terms().size(); ++i) {
    const Term& s = a.terms()[i];
    const Term& t = b.terms()[i];
    if (s.coeff != t.coeff || s.deltas != t.deltas || s.fns != t.fns || s.gauss != t.gauss) return false;
  }
  return true;
}

static std::string fn_str(const Fn& f) {
  std::ostringstream os;
  auto ord = [&](const char* name) {
    os << name;
    if (f.order) os << "^(" << f.order << ")";
  };
  switch (f.kind) {
    case FnKind::Kern: ord("N"); os << "(u" << f.x << "-u" << f.y << ")"; break;
    case FnKind::Kc: ord("N"); os << "(0)"; break;
    case FnKind::Wav: ord("W"); os << "(u" << f.x << "-u" << f.y << ")"; break;
    case FnKind::Dker: ord("D"); os << "(u" << f.x << "-u" << f.y << ")"; break;
    case FnKind::Prim: ord(("P" + std::to_string(f.sym)).c_str()); os << "(u" << f.x << ")"; break;
  }
  return os.str();
}

std::string DistributionExpr::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  for (size_t i = 0; i < terms_.size(); ++i) {
    const Term& t = terms_[i];
    if (i) os << "\n+ ";
    os << "(" << t.coeff.str() << ")";
    for (auto& d : t.deltas) {
      os << " d";
      if (d.k) os << "^(" << d.k << ")";
      os << "(u" << d.x << "-u" << d.y << ")";
    }
    for (auto& f : t.fns) os << " " << fn_str(f);
    if (!t.gauss.empty()) {
      os << " G[";
      for (size_t k = 0; k < t.gauss.size(); ++k)
        os << (k ? "," : "") << t.gauss[k].label << ":" << (t.gauss[k].charge > 0 ? "+" : "")
           << t.gauss[k].charge;
      os << "]";
    }
  }
  return os.str();
}

// ---------- canonicalization by pairing with test functions ----------

namespace {

struct Jet {
  int loc;
  int order;
};

struct State {
  Term t;
  std::map<int, Jet> jet;
};

void compositions(int total, int parts, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& f) {
  if (parts == 0) {
    if (total == 0) f(cur);
    return;
  }
  if (parts == 1) {
    cur.push_back(total);
    f(cur);
    cur.pop_back();
    return;
  }
  for (int d = 0; d <= total; ++d) {
    cur.push_back(d);
    compositions(total - d, parts - 1, cur, f);
    cur.pop_back();
  }
}

Q factorial(int n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return Q(r);
}

std::vector<Term> nth_derivative(const Term& t, int label, int times, Realization r) {
  std::vector<Term> cur{t};
  for (int k = 0; k < times && !cur.empty(); ++k) {
    std::vector<Term> next;
    for (auto& c : cur) {
      auto d = differentiate(c, label, r);
      next.insert(next.end(), std::make_move_iterator(d.begin()), std::make_move_iterator(d.end()));
    }
    cur = merge_terms(std::move(next), r);
  }
  return cur;
}

// (-1)^k d^k/du_a^k [F * prod_{c located at a} phi_c], distributing the derivatives
void spread(const State& st, int a, int k, const CQ& sign, Realization r, const std::vector<int>& located,
            std::vector<State>& out) {
  for (int tf = 0; tf <= k; ++tf) {
    auto fterms = nth_derivative(st.t, a, tf, r);
    if (fterms.empty()) continue;
    std::vector<int> cur;
    compositions(k - tf, static_cast<int>(located.size()), cur, [&](const std::vector<int>& ds) {
      Q mult = factorial(k) / factorial(tf);
      for (int d : ds) mult /= factorial(d);
      for (auto& ft : fterms) {
        State n{ft, st.jet};
        n.t.coeff *= sign * CQ(mult);
        for (size_t i = 0; i < located.size(); ++i) n.jet[located[i]].order += ds[i];
        out.push_back(std::move(n));
      }
    });
  }
}

std::vector<int> located_at(const State& st, int a, int skip = -1) {
  std::vector<int> v;
  for (auto& [c, j] : st.jet)
    if (j.loc == a && c != skip) v.push_back(c);
  return v;
}

// Every delta class ends as a star around its smallest label; the other
// labels carry only test-function derivatives. Throws on delta cycles.
std::vector<Term> pair_term(const Term& input, Realization r) {
  Term base = input;
  normalize_factors(base);
  if (base.coeff.is_zero()) return {};
  if (base.deltas.empty()) return {base};

  std::map<int, std::vector<std::pair<int, int>>> adj;  // label -> (neighbor, delta index)
  std::map<int, int> parent_uf;
  std::function<int(int)> find = [&](int x) {
    auto it = parent_uf.find(x);
    if (it == parent_uf.end() || it->second == x) return parent_uf[x] = x;
    return it->second = find(it->second);
  };
  for (size_t i = 0; i < base.deltas.size(); ++i) {
    const Delta& d = base.deltas[i];
    int a = find(d.x), b = find(d.y);
    if (a == b) singular("closed delta cycle or repeated delta pair");
    parent_uf[a] = b;
    adj[d.x].push_back({d.y, static_cast<int>(i)});
    adj[d.y].push_back({d.x, static_cast<int>(i)});
  }
  std::map<int, std::vector<int>> comps;
  for (auto& [l, nb] : adj) comps[find(l)].push_back(l);

  // star deltas are accumulated per state
  std::vector<std::pair<State, std::vector<Delta>>> work{{State{base, {}}, {}}};

  for (auto& [rep, members] : comps) {
    int root = *std::min_element(members.begin(), members.end());
    std::map<int, int> parent, depth;
    std::vector<int> order{root};
    depth[root] = 0;
    parent[root] = root;
    for (size_t q = 0; q < order.size(); ++q) {
      int x = order[q];
      for (auto& [y, idx] : adj[x])
        if (!depth.count(y)) {
          depth[y] = depth[x] + 1;
          parent[y] = x;
          order.push_back(y);
        }
    }
    std::vector<int> seq(order.begin() + 1, order.end());
    std::sort(seq.begin(), seq.end(), [&](int a, int b) {
      if (depth[a] != depth[b]) return depth[a] > depth[b];
      return a > b;
    });

    std::vector<std::pair<State, std::vector<Delta>>> next_work;
    for (auto& [st0, st_star] : work) {
      std::vector<State> cur{st0};
      for (int m : members) cur[0].jet[m] = Jet{m, 0};
      for (int a : seq) {
        int b = parent[a];
        std::vector<State> nxt;
        for (auto& st : cur) {
          auto it = std::find_if(st.t.deltas.begin(), st.t.deltas.end(), [&](const Delta& d) {
            return (d.x == a && d.y == b) || (d.x == b && d.y == a);
          });
          if (it == st.t.deltas.end()) throw Error(ErrorCode::StructuralViolation, "lost delta edge");
          Delta d = *it;
          st.t.deltas.erase(it);
          CQ sign = sign_of(d.k);
          if (d.x != a) sign *= sign_of(d.k);
          std::vector<State> spreadout;
          spread(st, a, d.k, sign, r, located_at(st, a), spreadout);
          for (auto& s : spreadout) {
            if (!substitute(s.t, a, b)) continue;
            for (auto& [c, j] : s.jet)
              if (j.loc == a) j.loc = b;
            nxt.push_back(std::move(s));
          }
        }
        cur = std::move(nxt);
      }
      // integrate by parts at the root so that phi_root carries no derivative
      std::vector<State> fin;
      for (auto& st : cur) {
        int j = st.jet[root].order;
        if (j == 0) {
          fin.push_back(std::move(st));
          continue;
        }
        st.jet[root].order = 0;
        spread(st, root, j, sign_of(j), r, located_at(st, root, root), fin);
      }
      for (auto& st : fin) {
        std::vector<Delta> s = st_star;
        for (int m : members)
          if (m != root) s.push_back(Delta{root, m, st.jet[m].order});
        for (int m : members) st.jet.erase(m);
        next_work.push_back({std::move(st), std::move(s)});
      }
    }
    work = std::move(next_work);
  }

  std::vector<Term> out;
  for (auto& [st, s] : work) {
    Term t = std::move(st.t);
    t.deltas = s;
    normalize_factors(t);
    if (!t.coeff.is_zero()) out.push_back(std::move(t));
  }
  return out;
}

// W(u_x - u_y) with x > y is rewritten through W(-t) = W(t) + i delta'(t)
bool orient_wave(std::vector<Term>& pending, Term& t) {
  for (size_t i = 0; i < t.fns.size(); ++i) {
    Fn f = t.fns[i];
    if (f.kind != FnKind::Wav || f.x < f.y) continue;
    Term a = t, b = t;
    CQ s = sign_of(f.order);
    a.fns[i] = Fn{FnKind::Wav, f.order, f.y, f.x, 0};
    a.coeff *= s;
    b.fns.erase(b.fns.begin() + i);
    b.deltas.push_back(Delta{f.y, f.x, f.order + 1});
    b.coeff *= s * CQ::I();
    normalize_factors(a);
    normalize_factors(b);
    pending.push_back(std::move(a));
    pending.push_back(std::move(b));
    return true;
  }
  return false;
}

}  // namespace

DistributionExpr canonicalize(const DistributionExpr& e) {
  DistributionExpr out(e.realization());
  out.add_labels(e.labels());
  for (auto& [l, r] : e.radii()) out.set_radius(l, r);
  const Realization r = e.realization();
  if (!e.on_circle()) {
    for (auto& t : merge_terms(e.terms(), r)) out.add_term(std::move(t));
    return out;
  }
  std::vector<Term> pending(e.terms().begin(), e.terms().end());
  std::vector<Term> done;
  while (!pending.empty()) {
    Term t = std::move(pending.back());
    pending.pop_back();
    for (auto& p : pair_term(t, r)) {
      if (orient_wave(pending, p)) continue;
      done.push_back(std::move(p));
    }
  }
  for (auto& t : merge_terms(std::move(done), r)) out.add_term(std::move(t));
  return out;
}

DistributionExpr conjugate(const DistributionExpr& e) {
  DistributionExpr out(e.realization());
  out.add_labels(e.labels());
  for (auto& [l, r] : e.radii()) out.set_radius(l, r);
  const bool circle = e.on_circle();
  for (auto& t0 : e.terms()) {
    std::vector<Term> cur{t0};
    cur[0].coeff = t0.coeff.conj();
    for (size_t i = 0; i < t0.fns.size(); ++i) {
      const Fn f = t0.fns[i];
      if (f.kind != FnKind::Wav) continue;
      std::vector<Term> nxt;
      for (auto& c : cur) {
        if (!circle) {
          Term a = c;
          a.fns[i] = Fn{FnKind::Wav, f.order, f.y, f.x, 0};
          a.coeff *= sign_of(f.order);
          nxt.push_back(std::move(a));
          continue;
        }
        // conj W^(m)(t) = W^(m)(t) + i delta^(m+1)(t)
        nxt.push_back(c);
        Term b = c;
        b.fns[i].kind = FnKind::Prim;
        b.fns[i].sym = -1;  // placeholder, removed below
        b.deltas.push_back(Delta{f.x, f.y, f.order + 1});
        b.coeff *= CQ::I();
        nxt.push_back(std::move(b));
      }
      cur = std::move(nxt);
    }
    for (auto& c : cur) {
      c.fns.erase(std::remove_if(c.fns.begin(), c.fns.end(),
                                 [](const Fn& f) { return f.kind == FnKind::Prim && f.sym == -1; }),
                  c.fns.end());
      normalize_factors(c);
      out.add_term(std::move(c));
    }
  }
  return canonicalize(out);
}

// ---------- singularity detection ----------

std::vector<SingularityReport> detect_singular(const DistributionExpr& e) {
  std::vector<SingularityReport> reps;
  for (size_t ti = 0; ti < e.terms().size(); ++ti) {
    const Term& t = e.terms()[ti];
    std::map<int, int> uf;
    std::function<int(int)> find = [&](int x) {
      auto it = uf.find(x);
      if (it == uf.end() || it->second == x) return uf[x] = x;
      return it->second = find(it->second);
    };
    std::map<int, std::vector<int>> forest;
    std::set<std::pair<int, int>> seen;
    bool bad = false;
    for (auto& d : t.deltas) {
      int x = std::min(d.x, d.y), y = std::max(d.x, d.y);
      if (x == y) {
        reps.push_back({ti, "repeated-pair", 1, {x}});
        bad = true;
        continue;
      }
      if (seen.count({x, y})) {
        reps.push_back({ti, "repeated-pair", 2, {x, y}});
        bad = true;
        continue;
      }
      seen.insert({x, y});
      if (find(x) == find(y)) {
        // path length in the forest plus the closing edge
        std::map<int, int> dist{{x, 0}};
        std::vector<int> q{x};
        for (size_t k = 0; k < q.size(); ++k)
          for (int nb : forest[q[k]])
            if (!dist.count(nb)) {
              dist[nb] = dist[q[k]] + 1;
              q.push_back(nb);
            }
        reps.push_back({ti, "cycle", dist[y] + 1, {x, y}});
        bad = true;
        continue;
      }
      uf[find(x)] = find(y);
      forest[x].push_back(y);
      forest[y].push_back(x);
    }
    if (bad) continue;
    auto cls = [&](int l) { return l < 0 ? l : find(l); };
    std::map<int, int> net;
    for (auto& s : t.gauss) net[cls(s.label)] += s.charge;
    int charged = 0;
    for (auto& [c, q] : net)
      if (q != 0) ++charged;
    for (size_t fi = 0; fi < t.fns.size(); ++fi) {
      const Fn& f = t.fns[fi];
      if ((f.kind == FnKind::Wav || f.kind == FnKind::Dker) && cls(f.x) == cls(f.y)) {
        reps.push_back({ti, "coincident-kernel", 0, {f.x, f.y}});
        continue;
      }
      if (f.kind != FnKind::Dker) continue;
      auto depends = [&](int c) {
        if (net.count(c) && net[c] != 0 && charged > 1) return true;
        for (size_t gi = 0; gi < t.fns.size(); ++gi) {
          if (gi == fi) continue;
          const Fn& g = t.fns[gi];
          if (g.kind == FnKind::Kc) continue;
          if (g.kind == FnKind::Prim) {
            if (cls(g.x) == c) return true;
            continue;
          }
          bool hx = cls(g.x) == c, hy = cls(g.y) == c;
          if (hx != hy) return true;
        }
        return false;
      };
      if (depends(cls(f.x)) && depends(cls(f.y))) reps.push_back({ti, "unbalanced-D", 0, {f.x, f.y}});
    }
  }
  return reps;
}

}  // namespace loopcorr
