#include "loopcorr/loopcorr.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "loopcorr/error.hpp"
#include "loopcorr/verify.hpp"

using namespace loopcorr;
using nlohmann::json;

struct lc_context {
  std::optional<Realization> realization;
  Sector sector = Sector::Nonunitary;
  std::optional<Q> kappa, p, lambda;
  RhoOrientation rho = RhoOrientation::Auto;
  XiSequence seq = XiSequence::geometric(Q(1, 2));
  json scheme = json{{"policy", "drop-loops"}};
  int trunc = 8;
  double radius = 1.0;
  int grid = 0;

  SectorConfig sector_config(Realization r) const {
    SectorConfig c;
    c.realization = r;
    c.sector = sector;
    c.rho = rho;
    if (kappa) c.kappa = Poly(CQ(*kappa));
    if (p) c.p = Poly(CQ(*p));
    if (lambda) c.lambda = Poly(CQ(*lambda));
    c.validate();
    return c;
  }

  RenormScheme renorm(Realization r) const {
    json j = scheme;
    // a mu policy without values keeps every mu_k as a symbol
    if (j.value("policy", "") == "mu" && !j.contains("mu") && !j.contains("mu_default")) j["symbolic_mu"] = true;
    return RenormScheme::from_json(j, sector_config(r));
  }

  NumericSetup numeric() const {
    NumericSetup n;
    n.seq = seq;
    n.modes = trunc;
    n.kappa = kappa ? kappa->get_d() : 1.0;
    n.p = p ? p->get_d() : 0.0;
    n.smear.grid = grid;
    return n;
  }

  CurrentWord word(const char* text) const {
    if (!text) throw Error(ErrorCode::InvalidArgument, "null word");
    CurrentWord w = parse_word(text);
    for (auto& it : w.items) it.radius = radius;
    return w;
  }

  Realization realization_for(const CurrentWord& w) const {
    if (w.empty()) return realization.value_or(Realization::K);
    const Realization r = w.realization();
    if (realization && *realization != r)
      throw Error(ErrorCode::RealizationMismatch,
                  std::string("word is in realization ") + realization_name(r) + ", configuration asks for " +
                      realization_name(*realization));
    return r;
  }
};

struct lc_expr {
  DistributionExpr value;
};

namespace {

thread_local std::string last_error;
thread_local long last_offset = -1;

lc_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::Ok: return LC_OK;
    case ErrorCode::ParseError: return LC_PARSE_ERROR;
    case ErrorCode::RealizationMismatch: return LC_REALIZATION_MISMATCH;
    case ErrorCode::SingularProduct: return LC_SINGULAR_PRODUCT;
    case ErrorCode::DivergentKernel: return LC_DIVERGENT_KERNEL;
    case ErrorCode::MissingMu: return LC_MISSING_MU;
    case ErrorCode::StructuralViolation: return LC_STRUCTURAL_VIOLATION;
    case ErrorCode::InvalidArgument: return LC_INVALID_ARGUMENT;
  }
  return LC_INTERNAL;
}

template <class F>
lc_status guarded(F&& f) {
  last_error.clear();
  last_offset = -1;
  try {
    f();
    return LC_OK;
  } catch (const Error& e) {
    last_error = e.what();
    last_offset = e.offset();
    return to_status(e.code());
  } catch (const json::exception& e) {
    last_error = e.what();
    return LC_INVALID_ARGUMENT;
  } catch (const std::invalid_argument& e) {
    last_error = e.what();
    return LC_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LC_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

Q rational_field(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Q(v.get<long>());
  throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be an exact rational string");
}

std::map<int, TestPoly> parse_tests(const json& j) {
  std::map<int, TestPoly> out;
  require(j.is_object(), "tests must be an object keyed by label");
  for (auto& [label, modes] : j.items()) {
    TestPoly t;
    require(modes.is_array(), "a test is a list of [n, re, im] triples");
    for (auto& m : modes) {
      require(m.is_array() && m.size() == 3, "a test mode is [n, re, im]");
      t.coeff[m[0].get<int>()] += cplx(m[1].get<double>(), m[2].get<double>());
    }
    out[std::stoi(label)] = t;
  }
  return out;
}

json singularity_json(const DistributionExpr& e) {
  json out = json::array();
  for (auto& s : detect_singular(e))
    out.push_back({{"term", s.term}, {"kind", s.kind}, {"cycle_length", s.cycle_length}, {"labels", s.labels}});
  return out;
}

json case_json(const CommutatorCase& c) {
  return {{"prefix", render_word(c.prefix)},
          {"xi", current_token(c.xi)},
          {"eta", current_token(c.eta)},
          {"suffix", render_word(c.suffix)}};
}

std::vector<CurrentWord> words_over(Realization r, int max_len) {
  const std::vector<Current> al = r == Realization::K ? std::vector<Current>{Current::J3, Current::Jp, Current::Jm}
                                                      : std::vector<Current>{Current::E, Current::F, Current::H};
  std::vector<CurrentWord> out;
  for (int len = 1; len <= max_len; ++len) {
    int total = 1;
    for (int i = 0; i < len; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
      CurrentWord w;
      int c = code;
      for (int i = 0; i < len; ++i) w.items.push_back({al[c % 3], i + 1, 1.0}), c /= 3;
      out.push_back(w);
    }
  }
  return out;
}

}  // namespace

extern "C" {

const char* lc_status_name(lc_status s) {
  switch (s) {
    case LC_OK: return "Ok";
    case LC_PARSE_ERROR: return "ParseError";
    case LC_REALIZATION_MISMATCH: return "RealizationMismatch";
    case LC_SINGULAR_PRODUCT: return "SingularProduct";
    case LC_DIVERGENT_KERNEL: return "DivergentKernel";
    case LC_MISSING_MU: return "MissingMu";
    case LC_STRUCTURAL_VIOLATION: return "StructuralViolation";
    case LC_INVALID_ARGUMENT: return "InvalidArgument";
    case LC_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* lc_last_error(void) { return last_error.c_str(); }
long lc_last_error_offset(void) { return last_offset; }
void lc_free_string(char* s) { std::free(s); }

lc_status lc_context_create(const char* config_json, lc_context** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = nullptr;
    auto ctx = std::make_unique<lc_context>();
    json j = config_json && *config_json ? json::parse(config_json) : json::object();
    require(j.is_object(), "configuration must be a JSON object");
    if (j.contains("realization")) {
      const auto r = j["realization"].get<std::string>();
      require(r == "A" || r == "K", "realization must be A or K");
      ctx->realization = r == "A" ? Realization::A : Realization::K;
    }
    if (j.contains("sector")) {
      const auto s = j["sector"].get<std::string>();
      require(s == "nonunitary" || s == "unitary", "sector must be nonunitary or unitary");
      ctx->sector = s == "unitary" ? Sector::Unitary : Sector::Nonunitary;
    }
    if (j.contains("kappa")) ctx->kappa = rational_field(j, "kappa");
    if (j.contains("p")) ctx->p = rational_field(j, "p");
    if (j.contains("lambda")) ctx->lambda = rational_field(j, "lambda");
    if (j.contains("rho")) {
      const auto r = j["rho"].get<std::string>();
      if (r == "auto")
        ctx->rho = RhoOrientation::Auto;
      else if (r == "proof")
        ctx->rho = RhoOrientation::Proof;
      else if (r == "modes")
        ctx->rho = RhoOrientation::Modes;
      else
        throw Error(ErrorCode::InvalidArgument, "rho must be auto, proof or modes");
    }
    if (j.contains("xi")) ctx->seq = XiSequence::from_json(j["xi"]);
    if (j.contains("scheme")) {
      require(j["scheme"].is_object(), "scheme must be an object");
      ctx->scheme = j["scheme"];
    }
    if (j.contains("trunc")) ctx->trunc = j["trunc"].get<int>();
    require(ctx->trunc >= 1, "trunc must be positive");
    if (j.contains("radius")) ctx->radius = j["radius"].get<double>();
    require(ctx->radius > 0 && ctx->radius <= 1, "radius must lie in (0, 1]");
    if (j.contains("grid")) ctx->grid = j["grid"].get<int>();
    require(ctx->grid >= 0, "grid must be non-negative");
    // surface scheme errors at construction time
    ctx->renorm(ctx->realization.value_or(Realization::K));
    *out = ctx.release();
  });
}

void lc_context_destroy(lc_context* ctx) { delete ctx; }

lc_status lc_context_config(const lc_context* ctx, char** out_json) {
  return guarded([&] {
    require(ctx && out_json, "null argument");
    json j;
    if (ctx->realization) j["realization"] = realization_name(*ctx->realization);
    j["sector"] = sector_name(ctx->sector);
    if (ctx->kappa) j["kappa"] = rational_string(*ctx->kappa);
    if (ctx->p) j["p"] = rational_string(*ctx->p);
    if (ctx->lambda) j["lambda"] = rational_string(*ctx->lambda);
    j["xi"] = ctx->seq.to_json();
    j["scheme"] = ctx->renorm(ctx->realization.value_or(Realization::K)).to_json();
    j["trunc"] = ctx->trunc;
    j["radius"] = ctx->radius;
    *out_json = dup_string(j.dump(2));
  });
}

lc_status lc_evaluate(const lc_context* ctx, const char* word, lc_expr** out) {
  return guarded([&] {
    require(ctx && out, "null argument");
    *out = nullptr;
    CurrentWord w = ctx->word(word);
    require(!w.empty(), "empty word");
    auto scheme = ctx->renorm(ctx->realization_for(w));
    *out = new lc_expr{evaluate_correlator(w, scheme)};
  });
}

void lc_expr_destroy(lc_expr* e) { delete e; }

lc_status lc_expr_json(const lc_expr* e, char** out_json) {
  return guarded([&] {
    require(e && out_json, "null argument");
    *out_json = dup_string(to_json(e->value).dump(2));
  });
}

lc_status lc_expr_text(const lc_expr* e, char** out_text) {
  return guarded([&] {
    require(e && out_text, "null argument");
    *out_text = dup_string(e->value.str());
  });
}

size_t lc_expr_term_count(const lc_expr* e) { return e ? e->value.size() : 0; }

size_t lc_expr_singularity_count(const lc_expr* e) { return e ? detect_singular(e->value).size() : 0; }

lc_status lc_expr_singularities(const lc_expr* e, char** out_json) {
  return guarded([&] {
    require(e && out_json, "null argument");
    *out_json = dup_string(singularity_json(e->value).dump(2));
  });
}

lc_status lc_expr_smear(const lc_context* ctx, const lc_expr* e, const char* tests_json, double* re, double* im) {
  return guarded([&] {
    require(ctx && e && tests_json && re && im, "null argument");
    auto tests = parse_tests(json::parse(tests_json));
    auto num = ctx->numeric();
    KernelBackend kb(num.seq, num.modes, e->value.realization());
    cplx v = e->value.on_circle() ? smear(e->value, tests, kb, num.values(), num.smear)
                                  : smear_interior(e->value, tests, kb, num.values(), num.smear.grid ? num.smear.grid : 32);
    *re = v.real();
    *im = v.imag();
  });
}

lc_status lc_commcheck(const lc_context* ctx, int max_context, char** out_json, int* all_pass) {
  return guarded([&] {
    require(ctx && out_json && all_pass, "null argument");
    require(max_context >= 0, "context length must be non-negative");
    const Realization r = ctx->realization.value_or(Realization::K);
    auto scheme = ctx->renorm(r);
    auto rep = check_affine_relations(r, max_context, scheme);
    json cases = json::array();
    for (auto& res : rep.results) {
      json c = case_json(res.kase);
      c["relation"] = res.relation;
      c["pass"] = res.pass;
      c["residual"] = to_json(res.residual);
      cases.push_back(c);
    }
    json j{{"realization", realization_name(r)},
           {"context", max_context},
           {"scheme", scheme.to_json()},
           {"passed", rep.passed},
           {"failed", rep.failed},
           {"cases", cases}};
    *all_pass = rep.failed == 0;
    *out_json = dup_string(j.dump(2));
  });
}

lc_status lc_diagrams(const lc_context* ctx, const char* word, const char* format, char** out) {
  return guarded([&] {
    require(ctx && out, "null argument");
    const std::string fmt = format ? format : "dot";
    require(fmt == "dot" || fmt == "json", "diagram format must be dot or json");
    CurrentWord w = ctx->word(word);
    require(!w.empty(), "empty word");
    const SectorConfig cfg = ctx->sector_config(ctx->realization_for(w));
    std::string text;
    json arr = json::array();
    size_t index = 0;
    for_each_diagram(w, cfg, [&](const Diagram& d) {
      if (fmt == "dot") {
        text += "// diagram " + std::to_string(index) + "\n" + to_dot(d);
      } else {
        json dj = diagram_json(d);
        json comps = json::array();
        for (auto& c : components(d)) comps.push_back({{"vertices", c.vertices}, {"loops", c.loops}, {"cycle", c.cycle}});
        dj["components"] = comps;
        arr.push_back(dj);
      }
      ++index;
    });
    *out = dup_string(fmt == "dot" ? text : json{{"word", render_word(w)}, {"diagrams", arr}}.dump(2));
  });
}

lc_status lc_gram(const lc_context* ctx, const char* basis_json, char** out_json) {
  return guarded([&] {
    require(ctx && basis_json && out_json, "null argument");
    json j = json::parse(basis_json);
    require(j.is_array(), "basis must be a JSON array");
    std::vector<GramEntry> basis;
    std::optional<Realization> r = ctx->realization;
    for (auto& item : j) {
      GramEntry g;
      g.word = ctx->word(item.value("word", std::string()).c_str());
      if (item.contains("tests")) g.tests = parse_tests(item["tests"]);
      for (auto& it : g.word.items)
        if (!g.tests.count(it.label)) throw Error(ErrorCode::InvalidArgument, "missing test for label " + std::to_string(it.label));
      if (!g.word.empty()) {
        const Realization wr = g.word.realization();
        if (r && *r != wr) throw Error(ErrorCode::RealizationMismatch, "basis mixes realizations");
        r = wr;
      }
      basis.push_back(std::move(g));
    }
    auto scheme = ctx->renorm(r.value_or(Realization::K));
    *out_json = dup_string(gram_matrix(basis, scheme, ctx->numeric()).to_json().dump(2));
  });
}

lc_status lc_oracle(const lc_context* ctx, const char* word, const char* angles_json, double* re, double* im) {
  return guarded([&] {
    require(ctx && angles_json && re && im, "null argument");
    CurrentWord w = ctx->word(word);
    OracleModel m;
    m.realization = ctx->realization_for(w);
    m.sector = ctx->sector;
    m.seq = ctx->seq;
    m.modes = ctx->trunc;
    m.rho = ctx->rho;
    auto num = ctx->numeric();
    m.kappa = num.kappa;
    m.p = num.p;
    std::map<int, double> angles;
    const json aj = json::parse(angles_json);
    require(aj.is_object(), "angles must be an object keyed by label");
    for (auto& [k, v] : aj.items()) angles[std::stoi(k)] = v.get<double>();
    for (auto& it : w.items)
      if (!angles.count(it.label)) throw Error(ErrorCode::InvalidArgument, "missing angle for label " + std::to_string(it.label));
    cplx v = oracle_correlator(w, m, angles);
    *re = v.real();
    *im = v.imag();
  });
}

lc_status lc_selfcheck(const lc_context* ctx, char** out_json, int* all_pass) {
  return guarded([&] {
    require(ctx && out_json && all_pass, "null argument");
    json checks = json::array();
    bool ok = true;
    auto record = [&](const std::string& name, bool pass, json detail = json::object()) {
      detail["name"] = name;
      detail["pass"] = pass;
      checks.push_back(detail);
      ok = ok && pass;
    };
    for (auto r : {Realization::A, Realization::K}) {
      const std::string rn = realization_name(r);
      const SectorConfig cfg = ctx->sector_config(r);
      auto jac = jacobi_failures(cfg);
      record("jacobi " + rn, jac.empty(), {{"failures", jac}});

      for (auto& v : classical_check(r)) record("classical " + rn + " " + v.relation, v.pass, {{"residual", v.residual}});

      auto scheme = ctx->renorm(r);
      auto aff = check_affine_relations(r, 0, scheme);
      json fails = json::array();
      for (auto& res : aff.results)
        if (!res.pass) fails.push_back(res.relation);
      record("affine " + rn + " context 0", aff.failed == 0, {{"passed", aff.passed}, {"failed", fails}});

      size_t bad_loops = 0, bad_charge = 0;
      for (auto& w : words_over(r, 3)) {
        for_each_diagram(w, cfg, [&](const Diagram& d) {
          for (auto& c : components(d)) bad_loops += c.loops > 1;
        });
        if (r == Realization::K) {
          int net = 0;
          for (auto& it : w.items) net += it.current == Current::Jp ? 1 : it.current == Current::Jm ? -1 : 0;
          if (net != 0 && !evaluate_correlator(w, scheme).is_zero()) ++bad_charge;
        }
      }
      record("one loop " + rn + " length <= 3", bad_loops == 0);
      if (r == Realization::K) {
        record("charge rule K length <= 3", bad_charge == 0);
        size_t bad_herm = 0;
        for (auto& w : words_over(r, 3)) bad_herm += !check_hermiticity(w, scheme).is_zero();
        record("hermiticity K length <= 3", bad_herm == 0);
      }
    }
    for (Current c : {Current::J3, Current::Jp, Current::Jm, Current::E, Current::F, Current::H}) {
      auto v = star_check(c, ctx->sector_config(current_realization(c)));
      record(std::string("star ") + current_token(c), v.pass, {{"relation", v.relation}});
    }
    *all_pass = ok;
    *out_json = dup_string(json{{"all_pass", ok}, {"checks", checks}}.dump(2));
  });
}

}  // extern "C"
