#include "loopcorr/renorm.hpp"

#include "loopcorr/error.hpp"

namespace loopcorr {

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::DropLoops: return "drop-loops";
    case Policy::MuFamily: return "mu";
    case Policy::UnitaryDotted: return "unitary-dotted";
    case Policy::Raw: return "raw";
  }
  return "?";
}

RenormScheme RenormScheme::drop_loops(const SectorConfig& s) {
  RenormScheme r;
  r.policy = Policy::DropLoops;
  r.sector = s;
  return r;
}

RenormScheme RenormScheme::mu_family(const SectorConfig& s, std::map<int, Poly> mu, std::optional<Poly> dflt) {
  RenormScheme r;
  r.policy = Policy::MuFamily;
  r.mu = std::move(mu);
  r.mu_default = std::move(dflt);
  r.sector = s;
  return r;
}

RenormScheme RenormScheme::unitary_dotted(const SectorConfig& s, std::map<int, Poly> mu, std::optional<Poly> dflt) {
  RenormScheme r = mu_family(s, std::move(mu), std::move(dflt));
  r.policy = Policy::UnitaryDotted;
  return r;
}

namespace {

Poly parse_scalar(const nlohmann::json& v) {
  if (v.is_string()) return Poly(CQ(parse_rational(v.get<std::string>())));
  if (v.is_number_integer()) return Poly(CQ(Q(v.get<long>())));
  if (v.is_number()) return Poly(CQ(parse_rational(v.dump())));
  throw Error(ErrorCode::InvalidArgument, "mu values must be rational strings or numbers");
}

}  // namespace

RenormScheme RenormScheme::from_json(const nlohmann::json& j, const SectorConfig& s) {
  RenormScheme r;
  r.sector = s;
  const std::string pol = j.value("policy", std::string("drop-loops"));
  if (pol == "drop-loops" || pol == "drop")
    r.policy = Policy::DropLoops;
  else if (pol == "mu")
    r.policy = Policy::MuFamily;
  else if (pol == "unitary-dotted")
    r.policy = Policy::UnitaryDotted;
  else
    throw Error(ErrorCode::InvalidArgument, "unknown policy '" + pol + "'");
  if (j.contains("mu")) {
    for (auto& [k, v] : j["mu"].items()) {
      int len = std::stoi(k);
      if (len < 2) throw Error(ErrorCode::InvalidArgument, "loop lengths start at 2");
      r.mu[len] = parse_scalar(v);
    }
  }
  if (j.contains("mu_default")) r.mu_default = parse_scalar(j["mu_default"]);
  if (j.contains("symbolic_mu")) r.symbolic_mu = j["symbolic_mu"].get<bool>();
  if (j.contains("dotted_rule")) {
    std::string d = j["dotted_rule"].get<std::string>();
    if (d == "both")
      r.dotted = DottedRule::BothSides;
    else if (d == "either")
      r.dotted = DottedRule::EitherSide;
    else
      throw Error(ErrorCode::InvalidArgument, "dotted_rule must be 'both' or 'either'");
  }
  r.validate();
  return r;
}

nlohmann::json RenormScheme::to_json() const {
  nlohmann::json j;
  j["policy"] = policy_name(policy);
  nlohmann::json m = nlohmann::json::object();
  for (auto& [k, v] : mu) m[std::to_string(k)] = v.str();
  j["mu"] = m;
  if (mu_default) j["mu_default"] = mu_default->str();
  j["symbolic_mu"] = symbolic_mu;
  j["dotted_rule"] = dotted == DottedRule::BothSides ? "both" : "either";
  return j;
}

void RenormScheme::validate() const {
  sector.validate();
  if (policy == Policy::UnitaryDotted && sector.sector != Sector::Unitary)
    throw Error(ErrorCode::InvalidArgument, "unitary-dotted policy needs the unitary sector");
  for (auto& [k, v] : mu) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "loop lengths start at 2");
    if (!v.is_constant() || v.constant().im != 0)
      throw Error(ErrorCode::InvalidArgument, "mu values must be real numbers");
  }
}

Poly RenormScheme::mu_for(int k) const {
  if (policy == Policy::DropLoops) return Poly(0);
  if (symbolic_mu) return Poly::variable(var::mu(k));
  auto it = mu.find(k);
  if (it != mu.end()) return it->second;
  if (mu_default) return *mu_default;
  throw Error(ErrorCode::MissingMu, "no mu value for loops of length " + std::to_string(k));
}

DistributionExpr renormalize_loop(const std::vector<int>& labels, const Poly& mu, Realization r) {
  if (labels.size() < 2) throw Error(ErrorCode::InvalidArgument, "loops have at least two vertices");
  DistributionExpr e(r);
  for (int l : labels) e.add_label(l);
  e.add_term(loop_chain(labels, mu));
  return e;
}

bool dotted_filter(const Diagram& d, DottedRule rule) {
  const int n = static_cast<int>(d.vertices.size());
  for (auto& e : d.edges) {
    if (e.kind != EdgeKind::Dotted) continue;
    // solid-connected class of each end
    auto side_balanced = [&](int start) {
      std::vector<bool> seen(n, false);
      std::vector<int> stack{start};
      seen[start] = true;
      int plus = 0, minus = 0;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (d.vertices[v].charge > 0) ++plus;
        if (d.vertices[v].charge < 0) ++minus;
        for (auto& f : d.edges) {
          if (f.kind != EdgeKind::Solid) continue;
          int o = f.source == v ? f.target : f.target == v ? f.source : -1;
          if (o >= 0 && !seen[o]) seen[o] = true, stack.push_back(o);
        }
      }
      return plus == minus;
    };
    bool a = side_balanced(e.source), b = side_balanced(e.target);
    bool keep = rule == DottedRule::BothSides ? (a && b) : (a || b);
    if (!keep) return false;
  }
  return true;
}

EvalReport evaluate_correlator_report(const CurrentWord& word, const RenormScheme& scheme, const EvalOptions& opt) {
  scheme.validate();
  word.validate();
  const Realization r = word.realization(scheme.sector.realization);
  if (!word.empty() && r != scheme.sector.realization)
    throw Error(ErrorCode::RealizationMismatch, "word and sector use different realizations");
  EvalReport rep;
  DistributionExpr acc(r);
  for (auto& it : word.items) {
    acc.add_label(it.label);
    if (it.radius < 1) acc.set_radius(it.label, it.radius);
  }
  LoopScale scale = [&](int k) { return scheme.mu_for(k); };
  const LoopScale* loops = scheme.policy == Policy::Raw ? nullptr : &scale;
  const bool filter = scheme.policy == Policy::UnitaryDotted;
  std::vector<Term> terms;
  for_each_diagram(word, scheme.sector, [&](const Diagram& d) {
    ++rep.diagrams;
    if (filter && !dotted_filter(d, scheme.dotted)) return;
    if (scheme.policy == Policy::DropLoops) {
      for (auto& c : components(d))
        if (c.loops > 0) return;
    }
    try {
      DistributionExpr w = diagram_weight(d, scheme.sector, word, loops);
      ++rep.kept;
      for (auto& t : w.terms()) terms.push_back(t);
    } catch (const Error& e) {
      if (!opt.quarantine || e.code() != ErrorCode::SingularProduct) throw;
      rep.quarantined.push_back(d);
    }
  });
  for (auto& t : terms) acc.add_term(std::move(t));
  rep.value = canonicalize(acc);
  return rep;
}

DistributionExpr evaluate_correlator(const CurrentWord& word, const RenormScheme& scheme) {
  return evaluate_correlator_report(word, scheme).value;
}

}  // namespace loopcorr
