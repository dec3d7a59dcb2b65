#include "loopcorr/distributions.hpp"
#include "loopcorr/error.hpp"

namespace loopcorr {

namespace {

const char* kind_name(FnKind k) {
  switch (k) {
    case FnKind::Kern: return "N";
    case FnKind::Kc: return "N0";
    case FnKind::Wav: return "W";
    case FnKind::Dker: return "D";
    case FnKind::Prim: return "P";
  }
  return "?";
}

FnKind kind_from(const std::string& s) {
  if (s == "N") return FnKind::Kern;
  if (s == "N0") return FnKind::Kc;
  if (s == "W") return FnKind::Wav;
  if (s == "D") return FnKind::Dker;
  if (s == "P") return FnKind::Prim;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel factor " + s);
}

int var_from(const std::string& s) {
  if (s == "kappa") return var::kappa;
  if (s == "p") return var::p;
  if (s == "lambda") return var::lambda;
  if (s.rfind("mu", 0) == 0) return var::mu(std::stoi(s.substr(2)));
  throw Error(ErrorCode::InvalidArgument, "unknown scalar variable " + s);
}

}  // namespace

nlohmann::json cq_json(const CQ& c) {
  if (sgn(c.im) == 0) return c.re.get_str();
  return nlohmann::json{{"re", c.re.get_str()}, {"im", c.im.get_str()}};
}

static CQ cq_from(const nlohmann::json& j) {
  if (j.is_string()) return CQ(parse_rational(j.get<std::string>()));
  return CQ(parse_rational(j.at("re").get<std::string>()), parse_rational(j.at("im").get<std::string>()));
}

nlohmann::json poly_json(const Poly& p) {
  auto arr = nlohmann::json::array();
  for (auto& [m, c] : p.terms()) {
    nlohmann::json vars = nlohmann::json::object();
    for (auto& [v, e] : m) vars[var_name(v)] = e;
    arr.push_back({{"c", cq_json(c)}, {"vars", vars}});
  }
  return arr;
}

static Poly poly_from(const nlohmann::json& j) {
  Poly p;
  for (auto& t : j) {
    Poly m(cq_from(t.at("c")));
    for (auto& [name, e] : t.at("vars").items()) m *= Poly::variable(var_from(name), e.get<int>());
    p += m;
  }
  return p;
}

nlohmann::json to_json(const DistributionExpr& e) {
  nlohmann::json j;
  j["realization"] = realization_name(e.realization());
  j["labels"] = std::vector<int>(e.labels().begin(), e.labels().end());
  j["convention"] = "delta(u-v)=sum_n exp(in(u-v)); pairing carries 1/(2pi) per variable";
  nlohmann::json radii = nlohmann::json::object();
  for (auto& [l, r] : e.radii()) radii[std::to_string(l)] = r;
  j["radii"] = radii;
  auto terms = nlohmann::json::array();
  for (auto& t : e.terms()) {
    nlohmann::json tj;
    tj["coeff"] = poly_json(t.coeff);
    auto ds = nlohmann::json::array();
    for (auto& d : t.deltas) ds.push_back({d.x, d.y, d.k});
    tj["deltas"] = ds;
    auto fs = nlohmann::json::array();
    for (auto& f : t.fns) {
      nlohmann::json fj{{"kind", kind_name(f.kind)}, {"order", f.order}};
      if (f.kind != FnKind::Kc) fj["x"] = f.x;
      if (f.kind == FnKind::Kern || f.kind == FnKind::Wav || f.kind == FnKind::Dker) fj["y"] = f.y;
      if (f.kind == FnKind::Prim) fj["sym"] = f.sym;
      fs.push_back(fj);
    }
    tj["kernels"] = fs;
    auto gs = nlohmann::json::array();
    for (auto& s : t.gauss) gs.push_back({s.label, s.charge});
    tj["exponentials"] = gs;
    terms.push_back(tj);
  }
  j["terms"] = terms;
  return j;
}

DistributionExpr expr_from_json(const nlohmann::json& j) {
  DistributionExpr e(j.value("realization", "K") == std::string("A") ? Realization::A : Realization::K);
  if (j.contains("labels"))
    for (auto& l : j.at("labels")) e.add_label(l.get<int>());
  if (j.contains("radii"))
    for (auto& [k, v] : j.at("radii").items()) e.set_radius(std::stoi(k), v.get<double>());
  for (auto& tj : j.at("terms")) {
    Term t;
    t.coeff = poly_from(tj.at("coeff"));
    for (auto& d : tj.at("deltas")) t.deltas.push_back(Delta{d[0].get<int>(), d[1].get<int>(), d[2].get<int>()});
    for (auto& f : tj.at("kernels")) {
      Fn fn;
      fn.kind = kind_from(f.at("kind").get<std::string>());
      fn.order = f.at("order").get<int>();
      fn.x = f.value("x", -1);
      fn.y = f.value("y", -1);
      fn.sym = f.value("sym", 0);
      t.fns.push_back(fn);
    }
    for (auto& s : tj.at("exponentials")) t.gauss.push_back(Slot{s[0].get<int>(), s[1].get<int>()});
    normalize_factors(t);
    e.add_term(std::move(t));
  }
  return e;
}

}  // namespace loopcorr
