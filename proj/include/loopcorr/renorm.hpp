#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopcorr/diagrams.hpp"

namespace loopcorr {

enum class Policy {
  DropLoops,
  MuFamily,
  UnitaryDotted,
  Raw,  // keeps the regularized loops; only meaningful inside the disc
};
const char* policy_name(Policy p);

// Which side of a dotted line must be charge balanced for the diagram to survive.
enum class DottedRule { BothSides, EitherSide };

struct RenormScheme {
  Policy policy = Policy::DropLoops;
  std::map<int, Poly> mu;
  std::optional<Poly> mu_default;
  bool symbolic_mu = false;  // use mu_k as a free symbol instead of a number
  DottedRule dotted = DottedRule::BothSides;
  SectorConfig sector;

  static RenormScheme drop_loops(const SectorConfig& s);
  static RenormScheme mu_family(const SectorConfig& s, std::map<int, Poly> mu, std::optional<Poly> dflt = {});
  static RenormScheme unitary_dotted(const SectorConfig& s, std::map<int, Poly> mu, std::optional<Poly> dflt = {});
  // {"policy":"mu","mu":{"2":"1","3":"0"},"mu_default":"0"}
  static RenormScheme from_json(const nlohmann::json& j, const SectorConfig& s);
  nlohmann::json to_json() const;

  void validate() const;
  // throws MissingMu when no value is available for loop length k
  Poly mu_for(int k) const;
};

// mu * delta(u1-u2)...delta(u_{k-1}-u_k) over the loop labels in word order
DistributionExpr renormalize_loop(const std::vector<int>& labels, const Poly& mu, Realization r);

bool dotted_filter(const Diagram& d, DottedRule rule = DottedRule::BothSides);

struct EvalOptions {
  // on the circle, diagrams whose weight is singular are set aside instead of throwing
  bool quarantine = false;
};

struct EvalReport {
  DistributionExpr value;
  size_t diagrams = 0;
  size_t kept = 0;
  std::vector<Diagram> quarantined;
};

EvalReport evaluate_correlator_report(const CurrentWord& word, const RenormScheme& scheme,
                                      const EvalOptions& opt = {});
DistributionExpr evaluate_correlator(const CurrentWord& word, const RenormScheme& scheme);

}  // namespace loopcorr
