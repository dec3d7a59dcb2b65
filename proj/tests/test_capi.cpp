#include <doctest.h>

#include <json.hpp>

#include <string>

#include "loopcorr/loopcorr.h"

using nlohmann::json;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  lc_free_string(s);
  return out;
}

struct Ctx {
  lc_context* ctx = nullptr;
  explicit Ctx(const char* cfg) { REQUIRE(lc_context_create(cfg, &ctx) == LC_OK); }
  ~Ctx() { lc_context_destroy(ctx); }
};

}  // namespace

TEST_CASE("context creation validates the configuration") {
  lc_context* ctx = nullptr;
  CHECK(lc_context_create("{\"realization\":\"Q\"}", &ctx) == LC_INVALID_ARGUMENT);
  CHECK(ctx == nullptr);
  CHECK(std::string(lc_last_error()).find("realization") != std::string::npos);
  CHECK(lc_context_create("{\"sector\":\"nonunitary\",\"scheme\":{\"policy\":\"unitary-dotted\"}}", &ctx) != LC_OK);
  CHECK(lc_context_create("{not json", &ctx) == LC_INVALID_ARGUMENT);
  CHECK(lc_context_create("{\"kappa\":0.5}", &ctx) == LC_INVALID_ARGUMENT);
  REQUIRE(lc_context_create(nullptr, &ctx) == LC_OK);
  char* cfg = nullptr;
  REQUIRE(lc_context_config(ctx, &cfg) == LC_OK);
  CHECK(json::parse(take(cfg))["scheme"]["policy"] == "drop-loops");
  lc_context_destroy(ctx);
}

TEST_CASE("evaluate a two-point function on the circle") {
  Ctx c("{\"kappa\":\"1/2\",\"p\":\"0\"}");
  lc_expr* e = nullptr;
  REQUIRE(lc_evaluate(c.ctx, "Jp(1) Jm(2)", &e) == LC_OK);
  CHECK(lc_expr_term_count(e) > 0);
  CHECK(lc_expr_singularity_count(e) == 0);
  char* js = nullptr;
  REQUIRE(lc_expr_json(e, &js) == LC_OK);
  auto j = json::parse(take(js));
  CHECK(j["realization"] == "K");
  // kappa and p were substituted, so no coefficient mentions them
  CHECK(j.dump().find("kappa") == std::string::npos);
  double re = 0, im = 0;
  CHECK(lc_expr_smear(c.ctx, e, "{\"1\":[[1,1,0]],\"2\":[[-1,1,0]]}", &re, &im) == LC_OK);
  CHECK(lc_expr_smear(c.ctx, e, "{\"1\":[[1,1]]}", &re, &im) == LC_INVALID_ARGUMENT);
  lc_expr_destroy(e);
}

TEST_CASE("parse errors carry the offset") {
  Ctx c("{}");
  lc_expr* e = nullptr;
  CHECK(lc_evaluate(c.ctx, "Jp(1", &e) == LC_PARSE_ERROR);
  CHECK(lc_last_error_offset() == 5);
  CHECK(e == nullptr);
  CHECK(lc_evaluate(c.ctx, "Jp(1) E(2)", &e) == LC_REALIZATION_MISMATCH);
  CHECK(lc_evaluate(c.ctx, "", &e) == LC_INVALID_ARGUMENT);
  Ctx a("{\"realization\":\"A\"}");
  CHECK(lc_evaluate(a.ctx, "Jp(1)", &e) == LC_REALIZATION_MISMATCH);
  CHECK(std::string(lc_status_name(LC_MISSING_MU)) == "MissingMu");
}

TEST_CASE("missing mu is reported") {
  Ctx c("{\"scheme\":{\"policy\":\"mu\",\"mu\":{\"3\":\"1\"}}}");
  lc_expr* e = nullptr;
  CHECK(lc_evaluate(c.ctx, "Jp(1) Jm(2)", &e) == LC_MISSING_MU);
}

TEST_CASE("commutator check at context zero") {
  Ctx c("{\"realization\":\"K\"}");
  char* out = nullptr;
  int all = 0;
  REQUIRE(lc_commcheck(c.ctx, 0, &out, &all) == LC_OK);
  auto j = json::parse(take(out));
  CHECK(all == 1);
  CHECK(j["cases"].size() == 9);
  CHECK(j["failed"] == 0);
}

TEST_CASE("diagrams in both formats") {
  Ctx c("{}");
  char* out = nullptr;
  REQUIRE(lc_diagrams(c.ctx, "Jp(1) Jm(2)", "dot", &out) == LC_OK);
  CHECK(take(out).find("digraph") != std::string::npos);
  REQUIRE(lc_diagrams(c.ctx, "Jp(1) Jm(2)", "json", &out) == LC_OK);
  auto j = json::parse(take(out));
  CHECK(j["diagrams"].size() > 0);
  CHECK(lc_diagrams(c.ctx, "Jp(1)", "svg", &out) == LC_INVALID_ARGUMENT);
}

TEST_CASE("oracle and gram") {
  Ctx c("{\"radius\":0.9,\"trunc\":4}");
  double re = 0, im = 0;
  REQUIRE(lc_oracle(c.ctx, "E(1) F(2)", "{\"1\":0.3,\"2\":1.2}", &re, &im) == LC_OK);
  CHECK(re * re + im * im > 0);
  CHECK(lc_oracle(c.ctx, "E(1) F(2)", "{\"1\":0.3}", &re, &im) == LC_INVALID_ARGUMENT);

  Ctx g("{\"trunc\":4,\"grid\":40}");
  char* out = nullptr;
  REQUIRE(lc_gram(g.ctx, "[{\"word\":\"\"},{\"word\":\"Jp(1)\",\"tests\":{\"1\":[[1,1,0]]}}]", &out) == LC_OK);
  auto j = json::parse(take(out));
  CHECK(j["basis"].size() == 2);
  CHECK(j["hermiticity_residual"].get<double>() < 1e-10);
  CHECK(lc_gram(g.ctx, "[{\"word\":\"Jp(1)\"}]", &out) == LC_INVALID_ARGUMENT);
}

TEST_CASE("selfcheck reports every check") {
  Ctx c("{}");
  char* out = nullptr;
  int all = -1;
  REQUIRE(lc_selfcheck(c.ctx, &out, &all) == LC_OK);
  auto j = json::parse(take(out));
  CHECK(j["checks"].size() > 10);
  CHECK(j["all_pass"].get<bool>() == bool(all));
}
