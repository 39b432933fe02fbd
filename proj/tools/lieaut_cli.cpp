#include "lieaut/covering.hpp"
#include "lieaut/heisenberg.hpp"
#include "lieaut/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>

namespace {

using namespace lieaut;

struct Opts {
  std::uint64_t seed = 1;
  std::uint64_t trials = 0;  // 0 = per-command default
  int threads = 1;
  double eps = 1.0 / 3.0;
  double delta = 0.3;
  double iwasawa_T = 5.0;
  double iwasawa_N = 5.0;
  double tube_radius = 0.05;
  int k = 2;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Opts& o) {
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--trials", o.trials, "trial / sample count (0 = command default)");
  cmd->add_option("--threads", o.threads, "worker threads (results are thread-count invariant)");
  cmd->add_option("--eps", o.eps, "character lower bound epsilon");
  cmd->add_option("--delta", o.delta, "near-identity radius |h - I| < delta");
  cmd->add_option("--iwasawa-T", o.iwasawa_T, "diagonal Iwasawa range");
  cmd->add_option("--iwasawa-N", o.iwasawa_N, "unipotent Iwasawa range");
  cmd->add_option("--tube-radius", o.tube_radius, "orbit tube radius");
  cmd->add_option("--k", o.k, "cover sheet count");
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--format", o.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

ojson config_echo(const Opts& o, std::uint64_t trials) {
  ojson j;
  j["seed"] = o.seed;
  j["trials"] = trials;
  j["threads"] = o.threads;
  j["eps"] = o.eps;
  j["delta"] = o.delta;
  j["iwasawa_T"] = o.iwasawa_T;
  j["iwasawa_N"] = o.iwasawa_N;
  j["tube_radius"] = o.tube_radius;
  j["k"] = o.k;
  j["format"] = o.format;
  return j;
}

int emit(const ReportBundle& bundle, const Opts& o) {
  const std::string text =
      o.format == "csv" ? bundle.to_csv() : bundle.to_json().dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out);
    if (!f) throw ConfigError("cannot open output path: " + o.out);
    f << text;
  }
  return bundle.overall_pass() ? 0 : 1;
}

ReportBundle run_levi(const Opts& o, std::uint64_t trials) {
  ReportBundle bundle;
  bundle.command = "verify-levi";
  bundle.config = config_echo(o, trials);
  LeviConfig cfg;
  cfg.tube.radius = o.tube_radius;
  cfg.seed = o.seed;
  cfg.boundary_samples = int(trials);
  cfg.collect_samples = o.format == "csv";
  bundle.reports.push_back(levi_form_check(cfg));

  // Closed-form oracles for the finite-difference machinery.
  auto ball = [](const Triple& x) { return triple_norm2(x) - 1.0; };
  const Triple ball_point{Cx(0.6, 0.0), Cx(0.0, 0.48), Cx(0.384, 0.512)};
  const LeviSample bs = levi_restricted(ball, ball_point, 1e-4);
  VerificationReport ball_report;
  ball_report.name = "levi-oracle-ball";
  ball_report.samples = 1;
  ball_report.worst_margin = 0.01 - std::abs(bs.lambda_min - 1.0);
  ball_report.pass = ball_report.worst_margin > 0.0;
  ball_report.values["lambda_min"] = bs.lambda_min;
  if (!ball_report.pass) ball_report.witness["lambda_min"] = bs.lambda_min;
  bundle.reports.push_back(ball_report);

  auto flat = [](const Triple& x) {
    const double im = x.z1.imag();
    return im * im - 0.25;
  };
  const Triple flat_point{Cx(0.7, 0.5), Cx(0.3, -0.8), Cx(-1.1, 0.2)};
  const LeviSample fs = levi_restricted(flat, flat_point, 1e-4);
  VerificationReport flat_report;
  flat_report.name = "levi-oracle-flat-tube";
  flat_report.samples = 1;
  flat_report.worst_margin = 0.005 - std::abs(fs.full_max - 0.5);
  flat_report.pass = flat_report.worst_margin > 0.0;
  flat_report.values["complex_hessian_11"] = fs.full_max;
  if (!flat_report.pass) flat_report.witness["value"] = fs.full_max;
  bundle.reports.push_back(flat_report);
  return bundle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verification toolkit for Moebius / covering / Heisenberg group actions"};
  app.require_subcommand(1);

  Opts o;
  std::function<ReportBundle()> runner;

  auto* lemma = app.add_subcommand("verify-lemma", "certify |psi(g h)| > eps on the sampled family");
  add_common(lemma, o);
  lemma->callback([&] {
    runner = [&o] {
      const std::uint64_t trials = o.trials ? o.trials : 100000;
      LemmaConfig cfg{o.seed, trials, o.threads, o.eps, o.delta, o.iwasawa_T, o.iwasawa_N,
                      o.format == "csv"};
      ReportBundle b;
      b.command = "verify-lemma";
      b.config = config_echo(o, trials);
      b.reports.push_back(check_lemma(cfg));
      return b;
    };
  });

  auto* claim = app.add_subcommand("verify-claim", "certify the level-set norm inequality");
  add_common(claim, o);
  claim->callback([&] {
    runner = [&o] {
      const std::uint64_t trials = o.trials ? o.trials : 100000;
      ClaimConfig cfg{o.seed, trials, o.threads, o.eps, 5.0, o.format == "csv"};
      ReportBundle b;
      b.command = "verify-claim";
      b.config = config_echo(o, trials);
      b.reports.push_back(check_lemma_claim(cfg));
      return b;
    };
  });

  auto* winding = app.add_subcommand("verify-winding", "winding numbers of the three characters");
  add_common(winding, o);
  winding->callback([&] {
    runner = [&o] {
      ReportBundle b;
      b.command = "verify-winding";
      b.config = config_echo(o, 4);
      b.reports.push_back(winding_certification());
      return b;
    };
  });

  auto* treal = app.add_subcommand("verify-totally-real", "orbit tangent rank over random triples");
  add_common(treal, o);
  treal->callback([&] {
    runner = [&o] {
      const std::uint64_t trials = o.trials ? o.trials : 1000;
      ReportBundle b;
      b.command = "verify-totally-real";
      b.config = config_echo(o, trials);
      b.reports.push_back(totally_real_suite({o.seed, trials, o.threads}));
      return b;
    };
  });

  auto* free_cmd = app.add_subcommand("verify-free", "three-fixed-point nullspace certificates");
  add_common(free_cmd, o);
  free_cmd->callback([&] {
    runner = [&o] {
      const std::uint64_t trials = o.trials ? o.trials : 100;
      ReportBundle b;
      b.command = "verify-free";
      b.config = config_echo(o, trials);
      b.reports.push_back(freeness_suite({o.seed, trials, o.threads}));
      return b;
    };
  });

  auto* proper = app.add_subcommand("probe-proper", "heuristic escape probe along group rays");
  add_common(proper, o);
  proper->callback([&] {
    runner = [&o] {
      const std::uint64_t trials = o.trials ? o.trials : 64;
      ProperConfig cfg;
      cfg.seed = o.seed;
      cfg.rays = int(trials);
      ReportBundle b;
      b.command = "probe-proper";
      b.config = config_echo(o, trials);
      b.reports.push_back(properness_probe(kBaseTriple, cfg));
      return b;
    };
  });

  auto* levi = app.add_subcommand("verify-levi", "Levi positivity on the orbit tube boundary");
  add_common(levi, o);
  levi->callback([&] {
    runner = [&o] { return run_levi(o, o.trials ? o.trials : 200); };
  });

  auto* cover = app.add_subcommand("cover-demo", "deck shifts, sheet cycles, Re log phi bound");
  add_common(cover, o);
  cover->callback([&] {
    runner = [&o] {
      if (o.k < 2) throw ConfigError("cover-demo: --k must be >= 2");
      const std::uint64_t trials = o.trials ? o.trials : 1000;
      CoverSuiteConfig cfg;
      cfg.seed = o.seed;
      cfg.trials = trials;
      cfg.workers = o.threads;
      cfg.delta = o.delta;
      cfg.iwasawa_T = o.iwasawa_T;
      cfg.iwasawa_N = o.iwasawa_N;
      ReportBundle b;
      b.command = "cover-demo";
      b.config = config_echo(o, trials);
      b.reports.push_back(deck_commutation_check(cfg));
      b.reports.push_back(lifted_group_law_check(cfg));
      b.reports.push_back(sheet_cycle_check(o.k));
      CoverSuiteConfig bound_cfg = cfg;
      bound_cfg.trials = std::max<std::uint64_t>(trials, 10000);
      b.reports.push_back(re_log_phi_suite(bound_cfg, o.eps * o.eps / 4.0));
      return b;
    };
  });

  auto* zero = app.add_subcommand("find-phi2-zero", "construct a zero of the rejected character");
  add_common(zero, o);
  zero->callback([&] {
    runner = [&o] {
      const std::uint64_t trials = o.trials ? o.trials : 100000;
      ReportBundle b;
      b.command = "find-phi2-zero";
      b.config = config_echo(o, trials);
      b.reports.push_back(phi_zero_report(o.delta, o.seed, trials, o.threads));
      return b;
    };
  });

  auto* heis = app.add_subcommand("heisenberg", "membership, bounding-constant and embedding audits");
  add_common(heis, o);
  heis->callback([&] {
    runner = [&o] {
      const std::uint64_t trials = o.trials ? o.trials : 10000;
      HeisSuiteConfig cfg;
      cfg.seed = o.seed;
      cfg.trials = trials;
      cfg.workers = o.threads;
      cfg.collect_samples = o.format == "csv";
      ReportBundle b;
      b.command = "heisenberg";
      b.config = config_echo(o, trials);
      b.reports.push_back(heis_membership_agreement(cfg));
      b.reports.push_back(heis_bound_constant_audit(cfg));
      b.reports.push_back(heis_wprime_audit(cfg));
      b.reports.push_back(heis_embedding_audit(cfg));
      b.reports.push_back(heis_invariance_audit(cfg));
      b.reports.push_back(heis_totally_real_audit(cfg));
      return b;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return emit(runner(), o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
