#include "loopcorr/diagrams.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "loopcorr/error.hpp"

namespace loopcorr {

const char* edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Solid: return "solid";
    case EdgeKind::Wavy: return "wavy";
    case EdgeKind::Dotted: return "dotted";
  }
  return "?";
}

namespace {

bool carries_exponential(TermKind k) {
  return k == TermKind::BAlpha || k == TermKind::AlphaA || k == TermKind::KappaD || k == TermKind::RhoAlpha;
}
bool has_a(TermKind k) { return k == TermKind::AlphaA || k == TermKind::BareA; }
bool has_b(TermKind k) { return k == TermKind::BAlpha || k == TermKind::BareB; }

class Enumerator {
 public:
  Enumerator(const CurrentWord& w, const SectorConfig& cfg, const std::function<void(const Diagram&)>& visit)
      : word_(w), cfg_(cfg), visit_(visit) {
    n_ = static_cast<int>(w.size());
    d_.realization = w.realization(cfg.realization);
    d_.vertices.resize(n_);
    for (int i = 0; i < n_; ++i) choices_.push_back(vertex_terms(w.items[i].current, cfg));
    linear_used_.assign(n_, false);
    b_dotted_.assign(n_, false);
  }

  void run() { pick_kind(0); }

 private:
  void pick_kind(int i) {
    if (i == n_) {
      a_stub(0);
      return;
    }
    for (auto& vt : choices_[i]) {
      Vertex& v = d_.vertices[i];
      v.position = i;
      v.label = word_.items[i].label;
      v.current = word_.items[i].current;
      v.kind = vt.kind;
      v.charge = vt.charge;
      v.coeff = vt.coeff;
      pick_kind(i + 1);
    }
  }

  TermKind kind(int i) const { return d_.vertices[i].kind; }

  // annihilation operators move right, lowest position first
  void a_stub(int i) {
    while (i < n_ && !has_a(kind(i))) ++i;
    if (i == n_) {
      b_stub(n_ - 1);
      return;
    }
    for (int j = i + 1; j < n_; ++j) {
      TermKind k = kind(j);
      if (carries_exponential(k)) {
        d_.edges.push_back({EdgeKind::Solid, i, j, k == TermKind::KappaD});
        a_stub(i + 1);
        d_.edges.pop_back();
      } else if (k == TermKind::Linear && !linear_used_[j]) {
        linear_used_[j] = true;
        d_.edges.push_back({EdgeKind::Solid, i, j, true});
        a_stub(i + 1);
        d_.edges.pop_back();
        linear_used_[j] = false;
      }
      if (cfg_.sector == Sector::Unitary && has_b(k) && !b_dotted_[j]) {
        b_dotted_[j] = true;
        d_.edges.push_back({EdgeKind::Dotted, i, j, false});
        a_stub(i + 1);
        d_.edges.pop_back();
        b_dotted_[j] = false;
      }
    }
  }

  // creation operators not absorbed by a dotted line move left
  void b_stub(int j) {
    while (j >= 0 && (!has_b(kind(j)) || b_dotted_[j])) --j;
    if (j < 0) {
      wavy(0);
      return;
    }
    for (int i = 0; i < j; ++i) {
      TermKind k = kind(i);
      if (carries_exponential(k)) {
        d_.edges.push_back({EdgeKind::Solid, j, i, k == TermKind::KappaD});
        b_stub(j - 1);
        d_.edges.pop_back();
      } else if (k == TermKind::Linear && !linear_used_[i]) {
        linear_used_[i] = true;
        d_.edges.push_back({EdgeKind::Solid, j, i, true});
        b_stub(j - 1);
        d_.edges.pop_back();
        linear_used_[i] = false;
      }
    }
  }

  void wavy(int i) {
    while (i < n_ && (kind(i) != TermKind::RhoAlpha || rho_done_(i))) ++i;
    if (i == n_) {
      visit_(d_);
      return;
    }
    rho_mark_.push_back(i);
    wavy(i + 1);
    for (int j = i + 1; j < n_; ++j) {
      if (kind(j) != TermKind::RhoAlpha || rho_done_(j)) continue;
      rho_mark_.push_back(j);
      d_.edges.push_back({EdgeKind::Wavy, i, j, false});
      wavy(i + 1);
      d_.edges.pop_back();
      rho_mark_.pop_back();
    }
    rho_mark_.pop_back();
  }

  bool rho_done_(int i) const { return std::find(rho_mark_.begin(), rho_mark_.end(), i) != rho_mark_.end(); }

  const CurrentWord& word_;
  const SectorConfig& cfg_;
  const std::function<void(const Diagram&)>& visit_;
  int n_ = 0;
  Diagram d_;
  std::vector<std::vector<VertexTerm>> choices_;
  std::vector<bool> linear_used_, b_dotted_;
  std::vector<int> rho_mark_;
};

}  // namespace

void for_each_diagram(const CurrentWord& word, const SectorConfig& cfg,
                      const std::function<void(const Diagram&)>& visit) {
  word.validate();
  SectorConfig c = cfg;
  c.realization = word.realization(cfg.realization);
  Enumerator(word, c, visit).run();
}

std::vector<Diagram> enumerate_diagrams(const CurrentWord& word, const SectorConfig& cfg) {
  std::vector<Diagram> out;
  for_each_diagram(word, cfg, [&](const Diagram& d) { out.push_back(d); });
  return out;
}

std::vector<ComponentRecord> components(const Diagram& d) {
  const int n = static_cast<int>(d.vertices.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto& e : d.edges) parent[find(e.source)] = find(e.target);
  std::map<int, ComponentRecord> comps;
  std::map<int, int> edge_count;
  for (int i = 0; i < n; ++i) comps[find(i)].vertices.push_back(i);
  for (auto& e : d.edges) ++edge_count[find(e.source)];
  std::vector<ComponentRecord> out;
  for (auto& [root, c] : comps) {
    c.loops = edge_count[root] - static_cast<int>(c.vertices.size()) + 1;
    if (c.loops == 1) {
      // strip leaves until only the cycle remains
      std::map<int, int> deg;
      for (int v : c.vertices) deg[v] = 0;
      for (auto& e : d.edges)
        if (find(e.source) == root) ++deg[e.source], ++deg[e.target];
      std::vector<bool> gone(n, false);
      bool changed = true;
      while (changed) {
        changed = false;
        for (int v : c.vertices) {
          if (gone[v] || deg[v] > 1) continue;
          gone[v] = true;
          changed = true;
          for (auto& e : d.edges) {
            if (e.source == v && !gone[e.target]) --deg[e.target];
            if (e.target == v && !gone[e.source]) --deg[e.source];
          }
        }
      }
      for (int v : c.vertices)
        if (!gone[v]) c.cycle.push_back(v);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ComponentRecord> loop_census(const Diagram& d) {
  auto cs = components(d);
  for (auto& c : cs)
    if (c.loops >= 2)
      throw Error(ErrorCode::StructuralViolation,
                  "component with " + std::to_string(c.loops) + " independent loops");
  return cs;
}

Term loop_chain(const std::vector<int>& labels, const Poly& mu) {
  Term t{mu, {}, {}, {}};
  for (size_t i = 0; i + 1 < labels.size(); ++i) t.deltas.push_back(Delta{labels[i], labels[i + 1], 0});
  normalize_factors(t);
  return t;
}

namespace {

std::vector<Term> expand_linear(Term base, const std::vector<int>& free_linear, const Diagram& d, CQ c) {
  const Realization r = d.realization;
  std::vector<Term> out;
  std::function<void(size_t, std::vector<bool>&, Term&)> rec = [&](size_t i, std::vector<bool>& used, Term& t) {
    while (i < free_linear.size() && used[i]) ++i;
    if (i == free_linear.size()) {
      out.push_back(t);
      return;
    }
    const int w = free_linear[i];
    used[i] = true;
    // pair with a later free linear field
    for (size_t j = i + 1; j < free_linear.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      Term u = t;
      u.coeff *= Poly(-(c * c));
      u.fns.push_back(Fn{FnKind::Kern, 2, w, free_linear[j], 0});
      rec(i + 1, used, u);
      used[j] = false;
    }
    // single: shift by every exponential
    for (auto& s : t.gauss) {
      CQ gamma = r == Realization::K ? CQ(Q(0), Q(s.charge)) : CQ(s.charge);
      Term u = t;
      u.coeff *= Poly(c * gamma);
      u.fns.push_back(Fn{FnKind::Kern, 1, w, s.label, 0});
      rec(i + 1, used, u);
    }
    used[i] = false;
  };
  std::vector<bool> used(free_linear.size(), false);
  rec(0, used, base);
  return out;
}

}  // namespace

DistributionExpr diagram_weight(const Diagram& d, const SectorConfig& cfg, const CurrentWord& word,
                                const LoopScale* loops) {
  const Realization r = d.realization;
  DistributionExpr e(r);
  for (auto& it : word.items) {
    e.add_label(it.label);
    if (it.radius < 1) e.set_radius(it.label, it.radius);
  }
  const auto& V = d.vertices;
  Term t{Poly(1), {}, {}, {}};
  for (auto& v : V) t.coeff *= v.coeff;

  std::vector<bool> linear_hit(V.size(), false), rho_paired(V.size(), false);
  std::vector<int> edge_delta(d.edges.size(), -1);
  const CQ cl = linear_field_factor(r);
  for (size_t k = 0; k < d.edges.size(); ++k) {
    const Edge& ed = d.edges[k];
    const Vertex &src = V[ed.source], &tgt = V[ed.target];
    switch (ed.kind) {
      case EdgeKind::Solid: {
        const bool from_a = has_a(src.kind);
        if (tgt.kind == TermKind::Linear) {
          linear_hit[ed.target] = true;
          CQ w = CQ(Q(0), Q(-1)) * cl;
          t.coeff *= Poly(from_a ? w : -w);
          edge_delta[k] = static_cast<int>(t.deltas.size());
          t.deltas.push_back(Delta{src.label, tgt.label, 1});
        } else {
          CQ w = exponential_shift(r, tgt.charge);
          t.coeff *= Poly(from_a ? w : -w);
          edge_delta[k] = static_cast<int>(t.deltas.size());
          t.deltas.push_back(Delta{src.label, tgt.label, 0});
        }
        break;
      }
      case EdgeKind::Dotted: t.fns.push_back(Fn{FnKind::Dker, 0, src.label, tgt.label, 0}); break;
      case EdgeKind::Wavy: {
        rho_paired[ed.source] = rho_paired[ed.target] = true;
        t.coeff *= cfg.kappa * Poly(2);
        if (cfg.rho_orientation() == RhoOrientation::Proof)
          t.fns.push_back(Fn{FnKind::Wav, 0, src.label, tgt.label, 0});
        else
          t.fns.push_back(Fn{FnKind::Wav, 0, tgt.label, src.label, 0});
        break;
      }
    }
  }

  auto comps = components(d);
  std::vector<int> drop;
  std::vector<Term> chains;
  for (auto& c : comps) {
    if (c.loops >= 2) throw Error(ErrorCode::StructuralViolation, "component with two loops");
    if (c.loops != 1) continue;
    if (!loops) {
      if (e.on_circle())
        throw Error(ErrorCode::SingularProduct, "unrenormalized loop of length " + std::to_string(c.cycle.size()) +
                                                    " on the circle");
      continue;
    }
    std::vector<bool> on_cycle(V.size(), false);
    for (int p : c.cycle) on_cycle[p] = true;
    for (size_t k = 0; k < d.edges.size(); ++k)
      if (on_cycle[d.edges[k].source] && on_cycle[d.edges[k].target]) drop.push_back(edge_delta[k]);
    // the cycle list is already in word order
    std::vector<int> labels;
    for (int p : c.cycle) labels.push_back(V[p].label);
    chains.push_back(loop_chain(labels, (*loops)(static_cast<int>(c.cycle.size()))));
  }
  std::sort(drop.rbegin(), drop.rend());
  for (int idx : drop) t.deltas.erase(t.deltas.begin() + idx);
  for (auto& ch : chains) {
    t.coeff *= ch.coeff;
    t.deltas.insert(t.deltas.end(), ch.deltas.begin(), ch.deltas.end());
  }

  std::vector<int> free_linear;
  for (auto& v : V) {
    if (carries_exponential(v.kind)) t.gauss.push_back(Slot{v.label, v.charge});
    if (v.kind == TermKind::RhoAlpha && !rho_paired[v.position]) t.coeff *= cfg.p;
    if (v.kind == TermKind::Linear && !linear_hit[v.position]) free_linear.push_back(v.label);
  }
  if (t.coeff.is_zero()) return e;
  normalize_factors(t);

  std::vector<Term> terms = expand_linear(t, free_linear, d, cl);
  for (auto& v : V) {
    if (v.kind != TermKind::KappaD) continue;
    std::vector<Term> next;
    for (auto& x : terms)
      for (auto& y : differentiate(x, v.label, r)) next.push_back(std::move(y));
    terms = std::move(next);
  }
  for (auto& x : merge_terms(std::move(terms), r)) e.add_term(std::move(x));
  return e;
}

std::string to_dot(const Diagram& d) {
  std::ostringstream os;
  os << "digraph diagram {\n";
  if (!d.vertices.empty()) os << "  node [shape=circle];\n";
  for (auto& v : d.vertices) {
    const char* q = v.charge > 0 ? "+" : v.charge < 0 ? "−" : "0";
    os << "  " << v.label << " [label=\"" << q << "\", xlabel=\"" << current_token(v.current) << "(" << v.label
       << ") " << term_kind_name(v.kind) << "\"];\n";
  }
  for (auto& e : d.edges) {
    const int s = d.vertices[e.source].label, t = d.vertices[e.target].label;
    os << "  " << s << " -> " << t;
    switch (e.kind) {
      case EdgeKind::Solid: os << " [style=solid" << (e.derivative ? ", label=\"d\"" : "") << "];\n"; break;
      case EdgeKind::Wavy: os << " [style=solid, dir=none, class=wavy, label=\"~\"];\n"; break;
      case EdgeKind::Dotted: os << " [style=dashed, dir=none];\n"; break;
    }
  }
  os << "}\n";
  return os.str();
}

nlohmann::json diagram_json(const Diagram& d) {
  nlohmann::json j;
  j["realization"] = realization_name(d.realization);
  j["vertices"] = nlohmann::json::array();
  for (auto& v : d.vertices)
    j["vertices"].push_back({{"position", v.position},
                             {"label", v.label},
                             {"current", current_token(v.current)},
                             {"term", term_kind_name(v.kind)},
                             {"charge", v.charge},
                             {"coeff", poly_json(v.coeff)}});
  j["edges"] = nlohmann::json::array();
  for (auto& e : d.edges)
    j["edges"].push_back({{"kind", edge_kind_name(e.kind)},
                          {"source", d.vertices[e.source].label},
                          {"target", d.vertices[e.target].label},
                          {"derivative", e.derivative}});
  auto cs = components(d);
  j["components"] = nlohmann::json::array();
  for (auto& c : cs) {
    nlohmann::json cj;
    cj["vertices"] = nlohmann::json::array();
    for (int p : c.vertices) cj["vertices"].push_back(d.vertices[p].label);
    cj["loops"] = c.loops;
    cj["loop_length"] = c.cycle.size();
    j["components"].push_back(cj);
  }
  return j;
}

}  // namespace loopcorr
