#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "loopcorr/loopcorr.h"

using nlohmann::json;

namespace {

enum class Level { Error = 0, Warn, Info, Debug };

Level log_level() {
  const char* env = std::getenv("LOOPCORR_LOG");
  if (!env) return Level::Warn;
  const std::string v = env;
  if (v == "error") return Level::Error;
  if (v == "info") return Level::Info;
  if (v == "debug") return Level::Debug;
  return Level::Warn;
}

void log(Level l, const std::string& msg) {
  static const Level threshold = log_level();
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (l <= threshold) std::cerr << json{{"level", names[int(l)]}, {"message", msg}}.dump() << "\n";
}

// Library status codes split into usage errors (2) and failed computations (1).
int exit_code_for(lc_status s) {
  switch (s) {
    case LC_OK: return 0;
    case LC_SINGULAR_PRODUCT:
    case LC_DIVERGENT_KERNEL:
    case LC_STRUCTURAL_VIOLATION:
    case LC_INTERNAL: return 1;
    default: return 2;
  }
}

int diagnose(lc_status s, const std::string& context) {
  json d{{"error", lc_status_name(s)}, {"message", lc_last_error()}, {"context", context}};
  if (lc_last_error_offset() >= 0) d["offset"] = lc_last_error_offset();
  std::cerr << d.dump() << "\n";
  return exit_code_for(s);
}

int usage_error(const std::string& msg) {
  std::cerr << json{{"error", "UsageError"}, {"message", msg}}.dump() << "\n";
  return 2;
}

struct UsageError {
  std::string msg;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError{"cannot open " + path};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError{path + ": " + e.what()};
  }
}

std::string take(char* s) {
  std::string out = s ? s : "";
  lc_free_string(s);
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Options {
  std::string realization, sector = "nonunitary", kappa, p, lambda, xi_file, mu_file, policy = "drop-loops";
  std::string rho = "auto", dotted_rule = "both", format;
  int trunc = 8, grid = 0;
  double radius = 1.0;
  bool on_circle = false;

  json config() const {
    json c;
    if (!realization.empty()) c["realization"] = realization;
    c["sector"] = sector;
    if (!kappa.empty()) c["kappa"] = kappa;
    if (!p.empty()) c["p"] = p;
    if (!lambda.empty()) c["lambda"] = lambda;
    if (!xi_file.empty()) c["xi"] = read_json_file(xi_file);
    json scheme{{"policy", policy}, {"dotted_rule", dotted_rule}};
    if (!mu_file.empty()) {
      json m = read_json_file(mu_file);
      if (!m.is_object()) throw UsageError{"mu file must hold a JSON object"};
      // either a bare {"2":"1",...} map or {"mu":{...},"mu_default":...}
      if (m.contains("mu") || m.contains("mu_default")) {
        for (auto& [k, v] : m.items()) scheme[k] = v;
      } else {
        scheme["mu"] = m;
      }
    }
    c["scheme"] = scheme;
    c["rho"] = rho;
    c["trunc"] = trunc;
    c["radius"] = on_circle ? 1.0 : radius;
    c["grid"] = grid;
    return c;
  }
};

class Context {
 public:
  explicit Context(const Options& o) {
    const std::string cfg = o.config().dump();
    log(Level::Debug, "configuration " + cfg);
    status_ = lc_context_create(cfg.c_str(), &ctx_);
  }
  ~Context() { lc_context_destroy(ctx_); }
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;
  lc_status status() const { return status_; }
  lc_context* get() const { return ctx_; }

 private:
  lc_context* ctx_ = nullptr;
  lc_status status_ = LC_OK;
};

int run_eval(const Context& ctx, const std::string& word, const std::string& format) {
  if (word.find_first_not_of(" \t") == std::string::npos) return usage_error("eval needs a non-empty current word");
  lc_expr* e = nullptr;
  if (auto s = lc_evaluate(ctx.get(), word.c_str(), &e); s != LC_OK) return diagnose(s, "eval");
  char* buf = nullptr;
  lc_status s = LC_OK;
  if (format == "text") {
    s = lc_expr_text(e, &buf);
    if (s == LC_OK) std::cout << take(buf) << "\n";
  } else if (format == "json") {
    char* sing = nullptr;
    char* cfg = nullptr;
    s = lc_expr_json(e, &buf);
    if (s == LC_OK) s = lc_expr_singularities(e, &sing);
    if (s == LC_OK) s = lc_context_config(ctx.get(), &cfg);
    if (s == LC_OK) {
      json out{{"word", word},
               {"config", json::parse(take(cfg))},
               {"expression", json::parse(take(buf))},
               {"singularities", json::parse(take(sing))}};
      std::cout << out.dump(2) << "\n";
    }
  } else {
    lc_expr_destroy(e);
    return usage_error("eval supports --format json or text");
  }
  lc_expr_destroy(e);
  return s == LC_OK ? 0 : diagnose(s, "eval");
}

int run_commcheck(const Context& ctx, int context, const std::string& format) {
  char* buf = nullptr;
  int all = 0;
  if (auto s = lc_commcheck(ctx.get(), context, &buf, &all); s != LC_OK) return diagnose(s, "commcheck");
  json rep = json::parse(take(buf));
  if (format == "text") {
    for (auto& c : rep["cases"])
      std::cout << (c["pass"].get<bool>() ? "pass " : "FAIL ") << c["relation"].get<std::string>() << " | prefix '"
                << c["prefix"].get<std::string>() << "' suffix '" << c["suffix"].get<std::string>() << "'\n";
    std::cout << rep["passed"] << " passed, " << rep["failed"] << " failed\n";
  } else {
    std::cout << rep.dump(2) << "\n";
  }
  log(Level::Info, "commcheck " + std::to_string(rep["passed"].get<int>()) + " passed");
  return all ? 0 : 1;
}

int run_diagrams(const Context& ctx, const std::string& word, const std::string& format) {
  if (word.find_first_not_of(" \t") == std::string::npos) return usage_error("diagrams needs a non-empty current word");
  char* buf = nullptr;
  if (auto s = lc_diagrams(ctx.get(), word.c_str(), format.c_str(), &buf); s != LC_OK) return diagnose(s, "diagrams");
  std::cout << take(buf);
  if (format == "json") std::cout << "\n";
  return 0;
}

int run_gram(const Context& ctx, const std::string& file) {
  const std::string basis = read_json_file(file).dump();
  char* buf = nullptr;
  if (auto s = lc_gram(ctx.get(), basis.c_str(), &buf); s != LC_OK) return diagnose(s, "gram");
  std::cout << take(buf) << "\n";
  return 0;
}

int run_oracle(const Context& ctx, const std::string& word, const std::vector<double>& angles,
               const std::string& format) {
  // angles are given in word order; labels are read back from the word text
  std::vector<int> labels;
  for (size_t pos = word.find('('); pos != std::string::npos; pos = word.find('(', pos + 1)) {
    try {
      labels.push_back(std::stoi(word.substr(pos + 1)));
    } catch (const std::exception&) {
      break;
    }
  }
  if (labels.size() != angles.size())
    return usage_error("oracle needs one angle per current (" + std::to_string(labels.size()) + " expected)");
  json a = json::object();
  for (size_t i = 0; i < labels.size(); ++i) a[std::to_string(labels[i])] = angles[i];
  double re = 0, im = 0;
  if (auto s = lc_oracle(ctx.get(), word.c_str(), a.dump().c_str(), &re, &im); s != LC_OK) return diagnose(s, "oracle");
  if (format == "text")
    std::cout << fmt_double(re) << " " << fmt_double(im) << "\n";
  else
    std::cout << "{\"re\": " << fmt_double(re) << ", \"im\": " << fmt_double(im) << "}\n";
  return 0;
}

int run_selfcheck(const Context& ctx, const std::string& format) {
  char* buf = nullptr;
  int all = 0;
  if (auto s = lc_selfcheck(ctx.get(), &buf, &all); s != LC_OK) return diagnose(s, "selfcheck");
  json rep = json::parse(take(buf));
  if (format == "text") {
    for (auto& c : rep["checks"])
      std::cout << (c["pass"].get<bool>() ? "pass " : "FAIL ") << c["name"].get<std::string>() << "\n";
  } else {
    std::cout << rep.dump(2) << "\n";
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renormalized current correlators: evaluation, diagrams and verification"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--realization", o.realization, "A or K (default: from the word, K otherwise)")
      ->check(CLI::IsMember({"A", "K"}));
  app.add_option("--sector", o.sector, "nonunitary or unitary")->check(CLI::IsMember({"nonunitary", "unitary"}));
  app.add_option("--kappa", o.kappa, "exact rational value for kappa (symbolic when omitted)");
  app.add_option("--p", o.p, "exact rational value for p (symbolic when omitted)");
  app.add_option("--lambda", o.lambda, "exact rational value for lambda");
  app.add_option("--xi", o.xi_file, "JSON file with the xi-sequence")->check(CLI::ExistingFile);
  app.add_option("--mu", o.mu_file, "JSON file with mu_k values")->check(CLI::ExistingFile);
  app.add_option("--policy", o.policy, "renormalization policy")
      ->check(CLI::IsMember({"drop-loops", "mu", "unitary-dotted"}));
  app.add_option("--dotted-rule", o.dotted_rule, "charge balance required on both or either side of a dotted line")
      ->check(CLI::IsMember({"both", "either"}));
  app.add_option("--rho", o.rho, "Fock two-point orientation")->check(CLI::IsMember({"auto", "proof", "modes"}));
  app.add_option("--trunc", o.trunc, "mode truncation for numerics")->check(CLI::PositiveNumber);
  auto* radius = app.add_option("--radius", o.radius, "insertion radius in (0, 1]");
  app.add_flag("--on-circle", o.on_circle, "place every insertion on the circle")->excludes(radius);
  app.add_option("--grid", o.grid, "quadrature points per dimension (0 picks a default)")->check(CLI::NonNegativeNumber);
  app.add_option("--format", o.format, "json, text or dot")->check(CLI::IsMember({"json", "text", "dot"}));

  std::string word, gram_file;
  int context = 0;
  std::vector<double> angles;

  auto* eval = app.add_subcommand("eval", "renormalized correlator of a current word");
  eval->add_option("word", word, "current word, e.g. \"Jp(1) Jm(2)\"")->required();
  auto* comm = app.add_subcommand("commcheck", "affine commutation relations inside correlators");
  comm->add_option("--context", context, "maximal spectator context length")->check(CLI::NonNegativeNumber);
  auto* diag = app.add_subcommand("diagrams", "contraction diagrams of a word");
  diag->add_option("word", word, "current word")->required();
  auto* gram = app.add_subcommand("gram", "Gram matrix of smeared words");
  gram->add_option("basis", gram_file, "JSON file: [{\"word\":\"Jp(1)\",\"tests\":{\"1\":[[n,re,im]]}}]")
      ->required()
      ->check(CLI::ExistingFile);
  auto* orc = app.add_subcommand("oracle", "brute-force operator correlator at given angles");
  orc->add_option("word", word, "current word")->required();
  orc->add_option("angles", angles, "one angle per current, in word order");
  auto* self = app.add_subcommand("selfcheck", "fast invariant suite");
  for (auto* sub : {eval, comm, diag, gram, orc, self}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return usage_error(e.what());
  }

  try {
    Context ctx(o);
    if (ctx.status() != LC_OK) return diagnose(ctx.status(), "configuration");
    if (*eval) return run_eval(ctx, word, o.format.empty() ? "json" : o.format);
    if (*comm) return run_commcheck(ctx, context, o.format.empty() ? "json" : o.format);
    if (*diag) return run_diagrams(ctx, word, o.format.empty() ? "dot" : o.format);
    if (*gram) return run_gram(ctx, gram_file);
    if (*orc) return run_oracle(ctx, word, angles, o.format.empty() ? "json" : o.format);
    if (*self) return run_selfcheck(ctx, o.format.empty() ? "json" : o.format);
  } catch (const UsageError& e) {
    return usage_error(e.msg);
  }
  return usage_error("no subcommand");
}
