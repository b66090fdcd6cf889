// krorder: command-line front end. Every subcommand prints one JSON
// document on stdout. Exit codes: 0 success, 1 input error, 2 numerical
// breakdown.

#include <openssl/evp.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "krorder/acceptance.hpp"
#include "krorder/json_io.hpp"
#include "krorder/krorder.hpp"

#ifndef KRORDER_VERSION
#define KRORDER_VERSION "dev"
#endif

using namespace krorder;
using io::json;

namespace {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::NumericalBreakdown, "sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// Loads input files and remembers their digests for the run manifest.
class Inputs {
 public:
  const io::Document& load(const std::string& path) {
    const std::string text = io::read_file(path);
    digests_.push_back({{"path", path}, {"sha256", sha256_hex(text)}});
    docs_.push_back(std::make_unique<io::Document>(io::parse_text(text, path)));
    return *docs_.back();
  }

  MetricSpace space(const std::string& path) { return io::parse_space(load(path)); }
  ProbMeasure prob(const std::string& path, const MetricSpace& s) { return io::parse_prob(load(path), s); }

  const json& digests() const { return digests_; }

 private:
  std::vector<std::unique_ptr<io::Document>> docs_;
  json digests_ = json::array();
};

json indices(const std::vector<std::size_t>& v) { return json(v); }

json witness_json(const WitnessResult& r) {
  json out;
  if (r.witness) {
    out["witness"] = r.witness->u.values();
    out["margin"] = r.witness->margin;
  } else {
    out["witness"] = nullptr;
  }
  out["optimum"] = r.optimum;
  out["boundary"] = r.boundary;
  return out;
}

json membership_json(const ConeMembership& m) {
  return {{"member", m.member}, {"coefficients", m.coefficients}, {"residual", m.residual}, {"boundary", m.boundary}};
}

json selftest_json(std::uint64_t seed) {
  auto results = acceptance::run_all(seed);
  json criteria = json::array();
  std::size_t passed = 0;
  for (const auto& r : results) {
    json metrics = json::object();
    for (const auto& m : r.metrics) metrics[m.name] = m.value;
    criteria.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"metrics", metrics}});
    passed += r.pass ? 1 : 0;
  }
  return {{"seed", seed}, {"criteria", criteria}, {"passed", passed}, {"total", criteria.size()}};
}

// Guesses the kind of a document from its keys and validates it.
json validate_document(Inputs& in, const std::string& path, const std::optional<std::string>& space_path) {
  const auto& doc = in.load(path);
  const io::Field f(doc);
  if (!f.value().is_object()) f.fail("expected an object");
  auto need_space = [&](const char* kind) {
    if (!space_path) throw Error(ErrorCode::MalformedInput, std::string(kind) + " needs --space to validate");
    return in.space(*space_path);
  };
  json out = {{"valid", true}};
  if (f.has("dist")) {
    const auto s = io::parse_space(f);
    out["type"] = f.has("leq") ? "poset" : "space";
    if (f.has("leq")) io::parse_poset(f, s);
    out["points"] = s.size();
    out["diameter"] = s.diameter();
  } else if (f.has("leq")) {
    const auto s = need_space("poset");
    io::parse_poset(f, s);
    out["type"] = "poset";
  } else if (f.has("w")) {
    const auto s = need_space("measure");
    const bool prob = !f.has("kind") || f["kind"].string() == "probability";
    if (prob) {
      io::parse_prob(f, s);
    } else {
      if (f["kind"].string() != "signed") f["kind"].fail("expected \"probability\" or \"signed\"");
      io::parse_signed(f, s);
    }
    out["type"] = prob ? "probability" : "signed";
  } else if (f.has("functionals")) {
    io::parse_oracle(f, need_space("oracle"));
    out["type"] = "oracle";
  } else if (f.has("members")) {
    const auto s = need_space("family");
    const auto& m = f["members"].value();
    const bool states = !m.empty() && m[0].is_array() && !m[0].empty() && m[0][0].is_array();
    if (states) {
      io::parse_state_family(f, s);
    } else {
      io::parse_family(f, s);
    }
    out["type"] = states ? "state_family" : "family";
  } else if (f.has("pairs") || f.has("generators")) {
    io::parse_cone(f, need_space("cone"));
    out["type"] = "cone";
  } else if (f.has("lotteries")) {
    io::parse_lotteries(f, need_space("choice set"));
    out["type"] = "choice_set";
  } else if (f.has("measures")) {
    io::parse_act(f, need_space("act"));
    out["type"] = "act";
  } else if (f.has("returns")) {
    io::parse_scenario(f);
    out["type"] = "scenario";
  } else if (f.has("slopes")) {
    out["concave"] = io::parse_utility(f).is_concave();
    out["type"] = "utility";
  } else {
    io::parse_tolerances(f, Tolerances{});
    out["type"] = "tolerances";
  }
  return out;
}

const std::vector<std::string> kCommands = {"validate", "w1",     "krnorm",     "compare",  "margin",
                                            "certify",  "witness", "membership", "represent", "dominance",
                                            "maxset",   "affinecore", "prior",  "portfolio", "selftest"};

void emit_error(const Error& e) {
  const json out = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  std::cout << io::dump(out) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lipschitz multi-utility and Kantorovich-Rubinstein toolkit", "krorder"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", KRORDER_VERSION);

  std::uint64_t seed = 0;
  std::string tol_file, manifest_path;
  app.add_option("--seed", seed, "seed for randomized commands")->capture_default_str();
  app.add_option("--tol-file", tol_file, "JSON object overriding tolerance fields");
  app.add_option("--manifest", manifest_path, "write a run manifest to this path");

  Inputs in;
  std::function<json()> action;

  // validate
  auto* validate = app.add_subcommand("validate", "validate an input document");
  std::string v_file;
  std::optional<std::string> v_space;
  validate->add_option("file", v_file)->required();
  validate->add_option("--space", v_space, "space file for measures, families, cones");
  validate->callback([&] { action = [&] { return validate_document(in, v_file, v_space); }; });

  // w1
  std::string a_space, a_p, a_q, a_family, a_cone, a_extra;
  auto* w1c = app.add_subcommand("w1", "Wasserstein-1 distance with plan and potential");
  w1c->add_option("space", a_space)->required();
  w1c->add_option("p", a_p)->required();
  w1c->add_option("q", a_q)->required();
  w1c->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      const auto p = in.prob(a_p, s), q = in.prob(a_q, s);
      const auto plan = w1_primal(p, q);
      const auto pot = w1_dual(p, q);
      return json{{"w1", plan.cost}, {"plan", io::to_json(plan.coupling)}, {"potential", pot.f.values()},
                  {"dual", pot.value}};
    };
  });

  // krnorm
  double alpha = 1.0;
  std::optional<std::string> kr_q;
  auto* krc = app.add_subcommand("krnorm", "KR norm of a signed measure, or of alpha (p - q)");
  krc->add_option("space", a_space)->required();
  krc->add_option("mu", a_p, "signed measure, or p when q is given")->required();
  krc->add_option("q", kr_q);
  krc->add_option("--alpha", alpha)->capture_default_str();
  krc->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      if (kr_q) {
        const auto p = in.prob(a_p, s), q = in.prob(*kr_q, s);
        const auto mu = kr_element(p, q, alpha);
        return json{{"kr_norm", kr_norm(mu)}, {"alpha_w1", alpha * w1(p, q)}};
      }
      const auto mu = io::parse_signed(in.load(a_p), s);
      return json{{"kr_norm", kr_norm(mu)}};
    };
  });

  auto family_pq = [&](CLI::App* c) {
    c->add_option("space", a_space)->required();
    c->add_option("family", a_family)->required();
    c->add_option("p", a_p)->required();
    c->add_option("q", a_q)->required();
  };

  auto* cmp = app.add_subcommand("compare", "compare two lotteries under a utility family");
  family_pq(cmp);
  cmp->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      const auto U = io::parse_family(in.load(a_family), s);
      const auto p = in.prob(a_p, s), q = in.prob(a_q, s);
      const auto c = compare_detailed(U, p, q);
      return json{{"result", to_string(c.result)}, {"margins", c.margins}};
    };
  });

  auto* mar = app.add_subcommand("margin", "Lipschitz margin of a failed comparison q >= p");
  family_pq(mar);
  mar->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      const auto U = io::parse_family(in.load(a_family), s);
      const auto m = lipschitz_margin(U, in.prob(a_p, s), in.prob(a_q, s));
      return json{{"K", m.K}, {"member", m.member}};
    };
  });

  std::size_t trials = 1000;
  auto* cert = app.add_subcommand("certify", "randomized check of the Lipschitz axiom");
  family_pq(cert);
  cert->add_option("--trials", trials)->capture_default_str();
  cert->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      const auto U = io::parse_family(in.load(a_family), s);
      LipschitzAxiomOptions opts;
      opts.trials = trials;
      Rng rng(seed);
      const auto r = certify_lipschitz_axiom(U, in.prob(a_p, s), in.prob(a_q, s), opts, rng);
      json ex = json::array();
      for (const auto& v : r.examples) ex.push_back({{"trial", v.trial}, {"lambda", v.lambda}, {"bound", v.bound}});
      return json{{"K", r.K},
                  {"checked", r.checked},
                  {"violations", r.violations},
                  {"inconclusive", r.inconclusive},
                  {"examples", ex}};
    };
  });

  auto cone_pq = [&](CLI::App* c) {
    c->add_option("space", a_space)->required();
    c->add_option("cone", a_cone)->required();
    c->add_option("p", a_p)->required();
    c->add_option("q", a_q)->required();
  };

  auto* wit = app.add_subcommand("witness", "separating witness for p over q against a cone");
  cone_pq(wit);
  wit->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      const auto C = io::parse_cone(in.load(a_cone), s);
      return witness_json(separating_witness(C, in.prob(a_p, s), in.prob(a_q, s)));
    };
  });

  auto* mem = app.add_subcommand("membership", "is p >= q implied by the cone");
  cone_pq(mem);
  mem->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      const auto C = io::parse_cone(in.load(a_cone), s);
      return membership_json(cone_membership(C, kr_element(in.prob(a_p, s), in.prob(a_q, s))));
    };
  });

  auto* rep = app.add_subcommand("represent", "utility family representing a cone on a panel");
  rep->add_option("space", a_space)->required();
  rep->add_option("cone", a_cone)->required();
  rep->add_option("panel", a_extra)->required();
  rep->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      const auto C = io::parse_cone(in.load(a_cone), s);
      const auto panel = io::parse_pairs(in.load(a_extra), s);
      const auto r = represent(C, panel);
      json cls = json::array();
      for (const auto& [p, q] : panel) {
        cls.push_back({{"p_over_q", weakly_prefers(r.family, p, q)}, {"q_over_p", weakly_prefers(r.family, q, p)}});
      }
      return json{{"members", io::values(r.family)},
                  {"witnesses", r.witnesses},
                  {"boundary_pairs", r.boundary_pairs},
                  {"classification", cls}};
    };
  });

  std::optional<std::string> poset_file;
  auto* dom = app.add_subcommand("dominance", "stochastic dominance of p over q");
  dom->add_option("space", a_space)->required();
  dom->add_option("p", a_p)->required();
  dom->add_option("q", a_q)->required();
  dom->add_option("--poset", poset_file, "order relation {\"leq\": [[bool]]}; default: labels on the line");
  dom->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      const auto p = in.prob(a_p, s), q = in.prob(a_q, s);
      const auto poset = poset_file ? io::parse_poset(in.load(*poset_file), s) : chain_by_labels(s);
      const auto r = dominance_check(p, q, poset);
      json out = {{"dominates", r.dominates}, {"lower_sets", r.lower_sets}, {"order", poset_file ? "poset" : "line"}};
      if (r.violating_set) out["violating_set"] = indices(*r.violating_set);
      return out;
    };
  });

  auto* mx = app.add_subcommand("maxset", "maximal lotteries and scalarization bounds");
  mx->add_option("space", a_space)->required();
  mx->add_option("family", a_family)->required();
  mx->add_option("choices", a_extra)->required();
  mx->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      const auto U = io::parse_family(in.load(a_family), s);
      const auto P = io::parse_lotteries(in.load(a_extra), s);
      const auto M = max_set(P, U);
      const auto b = scalarization_bounds(ChoiceProblem::with_proper_family(P, U));
      return json{{"maximal", indices(M)},
                  {"lower", indices(b.lower)},
                  {"upper", indices(b.upper)},
                  {"upper_convex", indices(b.upper_convex)}};
    };
  });

  std::optional<std::string> probes_file;
  auto* ac = app.add_subcommand("affinecore", "mixture test for p above q in the affine core");
  ac->add_option("space", a_space)->required();
  ac->add_option("oracle", a_family)->required();
  ac->add_option("p", a_p)->required();
  ac->add_option("q", a_q)->required();
  ac->add_option("--probes", probes_file, "extra probe lotteries {\"lotteries\": [...]}");
  ac->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      const auto oracle = io::parse_oracle(in.load(a_family), s);
      const auto p = in.prob(a_p, s), q = in.prob(a_q, s);
      const double sampled = oracle.sampled_lipschitz();
      if (oracle.lipschitz_bound() && sampled > *oracle.lipschitz_bound() * (1.0 + tolerances().lipschitz)) {
        throw Error(ErrorCode::OracleNotLipschitz, "sampled quotient exceeds the declared bound");
      }
      std::vector<ProbMeasure> extra;
      if (probes_file) extra = io::parse_lotteries(in.load(*probes_file), s);
      const auto r = affine_core_approx(oracle, p, q, default_probes(s, extra), default_lambda_grid());
      json out = {{"holds", r.holds}, {"approximate", r.approximate}, {"sampled_lipschitz", sampled}};
      out["failing_probe"] = r.failing_probe ? json(*r.failing_probe) : json(nullptr);
      out["failing_lambda"] = r.failing_probe ? json(r.failing_lambda) : json(nullptr);
      return out;
    };
  });

  std::optional<std::string> act_file;
  auto* pr = app.add_subcommand("prior", "single prior of a state-dependent family");
  pr->add_option("space", a_space)->required();
  pr->add_option("family", a_family)->required();
  pr->add_option("--act", act_file, "also test local probabilistic sophistication at this act");
  pr->callback([&] {
    action = [&] {
      const auto s = in.space(a_space);
      const auto F = io::parse_state_family(in.load(a_family), s);
      const auto e = extract_prior(F);
      json out = {{"prior", e.prior}, {"base_utilities", io::values(e.base)}};
      if (act_file) {
        const auto f = io::parse_act(in.load(*act_file), s);
        const auto a = is_locally_prob_sophisticated(F, f);
        out["locally_sophisticated"] = a ? json(*a) : json(nullptr);
      }
      return out;
    };
  });

  std::vector<double> prices, lower, upper;
  double wealth = 0.0;
  PortfolioOptions popt;
  auto* pf = app.add_subcommand("portfolio", "expected-utility portfolio choice");
  pf->add_option("scenario", a_p)->required();
  pf->add_option("utility", a_q)->required();
  pf->add_option("--prices", prices, "comma-separated prices")->delimiter(',')->required();
  pf->add_option("--wealth", wealth)->required();
  pf->add_option("--lower", lower, "comma-separated box lower bounds")->delimiter(',');
  pf->add_option("--upper", upper, "comma-separated box upper bounds")->delimiter(',');
  pf->add_option("--iterations", popt.iterations)->capture_default_str();
  pf->add_option("--starts", popt.starts, "starts for non-concave utilities")->capture_default_str();
  pf->callback([&] {
    action = [&] {
      const auto sc = io::parse_scenario(in.load(a_p));
      const auto u = io::parse_utility(in.load(a_q));
      std::optional<Box> box;
      if (!lower.empty() || !upper.empty()) {
        const double inf = std::numeric_limits<double>::infinity();
        Box b{lower.empty() ? std::vector<double>(prices.size(), -inf) : lower,
              upper.empty() ? std::vector<double>(prices.size(), inf) : upper};
        box = b;
      }
      popt.seed = seed;
      popt.threads = thread_limit();
      const auto r = maximize_portfolio(sc, u, prices, wealth, box, popt);
      return json{{"alpha", r.alpha},
                  {"value", r.value},
                  {"certificate_norm", r.certificate_norm},
                  {"certified", r.certified},
                  {"K", r.K},
                  {"concave", r.concave},
                  {"iterations", r.iterations},
                  {"starts", r.starts}};
    };
  });

  auto* st = app.add_subcommand("selftest", "run the acceptance checks");
  st->callback([&] {
    action = [&] { return selftest_json(seed); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    // A first positional that names no subcommand is an unknown command.
    for (int i = 1; i < argc; ++i) {
      const std::string a = argv[i];
      if (a.rfind("-", 0) == 0) {
        if (a == "--seed" || a == "--tol-file" || a == "--manifest") ++i;
        continue;
      }
      if (std::find(kCommands.begin(), kCommands.end(), a) == kCommands.end()) {
        emit_error(Error(ErrorCode::UnknownCommand, "'" + a + "' is not a subcommand"));
        return 1;
      }
      break;
    }
    emit_error(Error(ErrorCode::MalformedInput, e.what()));
    return 1;
  }

  try {
    Tolerances tol;
    if (!tol_file.empty()) {
      tol = io::parse_tolerances(in.load(tol_file), tol);
      set_tolerances(tol);
    }
    const std::string out = io::dump(action()) + "\n";
    std::cout << out << std::flush;
    if (!manifest_path.empty()) {
      json command = json::array();
      for (int i = 1; i < argc; ++i) command.push_back(argv[i]);
      const json manifest = {{"command", command},
                             {"inputs", in.digests()},
                             {"tolerances", io::to_json(tolerances())},
                             {"seed", seed},
                             {"version", KRORDER_VERSION},
                             {"outputs_sha256", sha256_hex(out)}};
      std::ofstream mf(manifest_path, std::ios::binary);
      if (!mf) throw Error(ErrorCode::MalformedInput, manifest_path + ": cannot write manifest");
      mf << io::dump(manifest) << "\n";
    }
    return 0;
  } catch (const Error& e) {
    emit_error(e);
    return e.is_numerical() ? 2 : 1;
  } catch (const std::bad_alloc&) {
    emit_error(Error(ErrorCode::NumericalBreakdown, "out of memory"));
    return 2;
  }
}
