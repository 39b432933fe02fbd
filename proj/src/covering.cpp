#include "lieaut/covering.hpp"

#include <cmath>

namespace lieaut {

namespace {

constexpr double kAdmissibleArg = 0.5 * kPi;

void check_initial(Cx value, Cx initial_log) {
  if (std::abs(std::exp(initial_log) - value) > 1e-9 * std::abs(value)) {
    throw std::invalid_argument("log continuation: initial log does not match values[0]");
  }
}

// Principal-log increment along the straight segment p -> q, bisecting until
// the argument jump is below pi/2. A straight segment cannot wind around the
// origin, so the telescoped principal logs equal the true continuation.
Cx segment_log(Cx p, Cx q, int depth, const ContinuationOptions& opts) {
  if (std::abs(q) <= opts.branch_floor) throw BranchFloorError{};
  const Cx ratio = q / p;
  if (std::abs(std::arg(ratio)) < kAdmissibleArg) return std::log(ratio);
  if (depth >= opts.refinement_budget) throw RefinementExhausted{};
  const Cx m = 0.5 * (p + q);
  if (std::abs(m) <= opts.branch_floor) throw BranchFloorError{};
  return segment_log(p, m, depth + 1, opts) + segment_log(m, q, depth + 1, opts);
}

Cx curve_segment_log(const std::function<Cx(double)>& f, double ta, Cx va, double tb, Cx vb,
                     int depth, const ContinuationOptions& opts) {
  if (std::abs(vb) <= opts.branch_floor) throw BranchFloorError{};
  const Cx ratio = vb / va;
  if (std::abs(std::arg(ratio)) < kAdmissibleArg) return std::log(ratio);
  if (depth >= opts.refinement_budget) throw RefinementExhausted{};
  const double tm = 0.5 * (ta + tb);
  const Cx vm = f(tm);
  if (std::abs(vm) <= opts.branch_floor) throw BranchFloorError{};
  return curve_segment_log(f, ta, va, tm, vm, depth + 1, opts) +
         curve_segment_log(f, tm, vm, tb, vb, depth + 1, opts);
}

}  // namespace

Cx log_continue(std::span<const Cx> values, Cx initial_log, const ContinuationOptions& opts) {
  if (values.empty()) throw std::invalid_argument("log_continue: empty value list");
  if (std::abs(values[0]) <= opts.branch_floor) throw BranchFloorError{};
  check_initial(values[0], initial_log);
  Cx acc = initial_log;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    acc += segment_log(values[i], values[i + 1], 0, opts);
  }
  return acc;
}

Cx root_continue_k(std::span<const Cx> values, Cx initial_root, int k,
                   const ContinuationOptions& opts) {
  if (k < 2) throw std::invalid_argument("root_continue_k: k must be >= 2");
  if (values.empty()) throw std::invalid_argument("root_continue_k: empty value list");
  Cx pow = initial_root;
  for (int i = 1; i < k; ++i) pow *= initial_root;
  if (std::abs(pow - values[0]) > 1e-9 * std::abs(values[0])) {
    throw std::invalid_argument("root_continue_k: initial root does not match values[0]");
  }
  // Continue the log whose 1/k power starts at initial_root, then exponentiate.
  const Cx initial_log = double(k) * std::log(initial_root);
  const Cx terminal_log = log_continue(values, initial_log, opts);
  return std::exp(terminal_log / double(k));
}

Cx continue_log_curve(const std::function<Cx(double)>& f, Cx initial_log, int base_segments,
                      const ContinuationOptions& opts) {
  if (base_segments < 1) base_segments = 1;
  Cx va = f(0.0);
  if (std::abs(va) <= opts.branch_floor) throw BranchFloorError{};
  check_initial(va, initial_log);
  Cx acc = initial_log;
  double ta = 0.0;
  for (int i = 1; i <= base_segments; ++i) {
    const double tb = double(i) / double(base_segments);
    const Cx vb = f(tb);
    acc += curve_segment_log(f, ta, va, tb, vb, 0, opts);
    ta = tb;
    va = vb;
  }
  return acc;
}

CoverElement cover_identity() { return CoverElement{projectivize(kIdentity), Cx(0.0, 0.0)}; }

CoverElement cover_loop(int n) { return CoverElement{projectivize(kIdentity), double(n) * kTwoPiI}; }

namespace {

// Canonical path of a cover element: |loops| traversals of the rotation loop
// theta: 0 -> +/-pi, then the short Iwasawa path with all three factors
// interpolated linearly. Continuation runs piecewise so each loop gets its
// own base grid.
struct CanonicalPath {
  int loops = 0;  // signed
  IwasawaParams end;

  int pieces() const { return std::abs(loops) + 1; }

  UniMat2 at(int piece, double t) const {
    if (piece < std::abs(loops)) {
      const double sign = loops >= 0 ? 1.0 : -1.0;
      return rotation(sign * t * kPi);
    }
    return mul(mul(rotation(t * end.theta), diag_flow(t * end.s)), shear(t * end.u));
  }
};

Cx short_path_branch(const IwasawaParams& p, const ContinuationOptions& opts) {
  return continue_log_curve(
      [&](double t) {
        return phi_main(mul(mul(rotation(t * p.theta), diag_flow(t * p.s)), shear(t * p.u)));
      },
      Cx(0.0, 0.0), 32, opts);
}

CanonicalPath canonical_path(const CoverElement& gt, const ContinuationOptions& opts) {
  CanonicalPath path;
  path.end = iwasawa_decompose(gt.endpoint);
  const Cx l0 = short_path_branch(path.end, opts);
  const double n_real = (gt.branch - l0).imag() / (2.0 * kPi);
  const double n = std::round(n_real);
  if (std::abs(gt.branch - (l0 + n * kTwoPiI)) > 1e-6) {
    throw std::invalid_argument("cover element branch is not a 2*pi*i shift of the short path");
  }
  path.loops = int(n);
  return path;
}

}  // namespace

Cx continue_logphi_canonical(const CoverElement& gt, const UniMat2& left, const UniMat2& right,
                             Cx initial_log, const ContinuationOptions& opts) {
  const CanonicalPath path = canonical_path(gt, opts);
  Cx acc = initial_log;
  for (int piece = 0; piece < path.pieces(); ++piece) {
    acc = continue_log_curve(
        [&](double t) { return phi_main(mul(mul(left, path.at(piece, t)), right)); }, acc, 32,
        opts);
  }
  return acc;
}

CoverElement cover_from_path(const GroupPath& path) {
  if (path.samples.empty()) throw std::invalid_argument("cover_from_path: empty path");
  if (proj_distance(path.samples.front(), projectivize(kIdentity)) > 1e-12) {
    throw std::invalid_argument("cover_from_path: path must start at the identity");
  }
  std::vector<Cx> values;
  values.reserve(path.samples.size());
  for (const ProjMat2& g : path.samples) values.push_back(phi_main(g));
  ContinuationOptions opts;
  opts.refinement_budget = path.refinement_budget;
  const Cx branch = log_continue(values, Cx(0.0, 0.0), opts);
  return CoverElement{path.samples.back(), branch};
}

CoverElement make_cover(const ProjMat2& endpoint, int extra_loops) {
  const IwasawaParams p = iwasawa_decompose(endpoint);
  const Cx l0 = short_path_branch(p, ContinuationOptions{});
  return CoverElement{endpoint, l0 + double(extra_loops) * kTwoPiI};
}

CoverElement cover_mul(const CoverElement& x, const CoverElement& y) {
  // Branch continued along t -> x.endpoint * gamma_y(t) from x.branch.
  const Cx branch = continue_logphi_canonical(y, x.endpoint.rep, kIdentity, x.branch);
  return CoverElement{mul(x.endpoint, y.endpoint), branch};
}

CoverElement cover_inv(const CoverElement& x) {
  // The inverse is represented by t -> gamma_x(t)^{-1}.
  const CanonicalPath path = canonical_path(x, ContinuationOptions{});
  Cx acc{0.0, 0.0};
  for (int piece = 0; piece < path.pieces(); ++piece) {
    acc = continue_log_curve([&](double t) { return phi_main(inv(path.at(piece, t))); }, acc, 32,
                             ContinuationOptions{});
  }
  return CoverElement{inv(x.endpoint), acc};
}

bool cover_approx_equal(const CoverElement& x, const CoverElement& y, double tol) {
  if (proj_distance(x.endpoint, y.endpoint) > tol) return false;
  return std::abs(x.branch - y.branch) < kPi;
}

Cx phi_hat(const Triple& z, const OmegaChart& chart) {
  return phi_main(mobius_from_three_points(chart.zeta, z));
}

BranchQuery omega_tilde_membership(const LiftedPoint& p, const OmegaChart& chart) {
  const Cx value = phi_hat(p.z, chart);
  if (std::abs(value) <= kBranchFloor) throw BranchFloorError{};
  const Cx principal = std::log(value);
  // Branches are spaced 2*pi apart vertically; at most one can be within
  // distance 1 of w.
  const double shift = std::round((p.w.imag() - principal.imag()) / (2.0 * kPi));
  const Cx branch = principal + shift * kTwoPiI;
  return BranchQuery{std::abs(p.w - branch) < 1.0, branch};
}

LiftedPoint lift_action(const CoverElement& gt, const LiftedPoint& p, const OmegaChart& chart) {
  const BranchQuery q = omega_tilde_membership(p, chart);
  if (!q.inside) throw NotInDomain{};
  const ProjMat2 hz = mobius_from_three_points(chart.zeta, p.z);
  // log phi continued along t -> gamma(t) * h_z from the located branch.
  const Cx lifted = continue_logphi_canonical(gt, kIdentity, hz.rep, q.branch);
  return LiftedPoint{act_triple(gt.endpoint, p.z), p.w - q.branch + lifted};
}

// --- sampled suites -----------------------------------------------------------

LiftedPoint sample_omega_tilde(RandomStream& rng, const CoverSuiteConfig& cfg,
                               const OmegaChart& chart) {
  const ProjMat2 g = sample_psl2r(rng, cfg.iwasawa_T, cfg.iwasawa_N);
  const UniMat2 h = sample_near_identity(rng, cfg.delta);
  const UniMat2 gh = mul(g.rep, h);
  const Triple z = act_triple(gh, chart.zeta);
  const int shift =
      int(rng.next_u64() % std::uint64_t(2 * cfg.max_extra_loops + 1)) - cfg.max_extra_loops;
  const Cx branch = std::log(phi_main(gh)) + double(shift) * kTwoPiI;
  return LiftedPoint{z, branch + rng.in_disc(1.0)};
}

CoverElement sample_cover_element(RandomStream& rng, const CoverSuiteConfig& cfg) {
  const ProjMat2 endpoint = sample_psl2r(rng, cfg.element_T, cfg.element_N);
  const int loops =
      int(rng.next_u64() % std::uint64_t(2 * cfg.max_extra_loops + 1)) - cfg.max_extra_loops;
  return make_cover(endpoint, loops);
}

namespace {

struct WorstCase {
  double worst = std::numeric_limits<double>::infinity();
  std::uint64_t worst_index = 0;
  std::uint64_t violations = 0;

  void feed(double margin, std::uint64_t i) {
    if (margin < worst || (margin == worst && i < worst_index)) {
      worst = margin;
      worst_index = i;
    }
    if (margin <= 0.0) ++violations;
  }
  static WorstCase merge(WorstCase a, const WorstCase& b) {
    a.violations += b.violations;
    if (b.worst < a.worst || (b.worst == a.worst && b.worst_index < a.worst_index)) {
      a.worst = b.worst;
      a.worst_index = b.worst_index;
    }
    return a;
  }
};

}  // namespace

VerificationReport deck_commutation_check(const CoverSuiteConfig& cfg) {
  return timed([&] {
    const OmegaChart chart;
    const WorstCase acc = run_trials<WorstCase>(
        cfg.trials, cfg.workers, WorstCase{},
        [&](std::uint64_t i, WorstCase& a) {
          RandomStream rng(cfg.seed, i);
          const CoverElement gt = sample_cover_element(rng, cfg);
          const LiftedPoint p = sample_omega_tilde(rng, cfg, chart);
          const LiftedPoint shifted{p.z, p.w + kTwoPiI};
          const LiftedPoint q1 = lift_action(gt, shifted, chart);
          const LiftedPoint q2 = lift_action(gt, p, chart);
          const double residual =
              std::abs(q1.w - (q2.w + kTwoPiI)) + triple_distance(q1.z, q2.z);
          a.feed(1e-8 - residual, i);
        },
        WorstCase::merge);
    VerificationReport r;
    r.name = "deck-commutation";
    r.seed = cfg.seed;
    r.samples = cfg.trials;
    r.pass = acc.violations == 0;
    r.worst_margin = acc.worst;
    r.values["max_residual"] = 1e-8 - acc.worst;
    if (!r.pass) r.witness["trial"] = acc.worst_index;
    return r;
  });
}

VerificationReport lifted_group_law_check(const CoverSuiteConfig& cfg) {
  return timed([&] {
    const OmegaChart chart;
    const WorstCase acc = run_trials<WorstCase>(
        cfg.trials, cfg.workers, WorstCase{},
        [&](std::uint64_t i, WorstCase& a) {
          RandomStream rng(cfg.seed, i);
          const CoverElement x = sample_cover_element(rng, cfg);
          const CoverElement y = sample_cover_element(rng, cfg);
          const LiftedPoint p = sample_omega_tilde(rng, cfg, chart);
          const LiftedPoint lhs = lift_action(cover_mul(x, y), p, chart);
          const LiftedPoint rhs = lift_action(x, lift_action(y, p, chart), chart);
          const double residual = std::abs(lhs.w - rhs.w) + triple_distance(lhs.z, rhs.z);
          a.feed(1e-8 - residual, i);
        },
        WorstCase::merge);
    VerificationReport r;
    r.name = "lifted-action-group-law";
    r.seed = cfg.seed;
    r.samples = cfg.trials;
    r.pass = acc.violations == 0;
    r.worst_margin = acc.worst;
    r.values["max_residual"] = 1e-8 - acc.worst;
    if (!r.pass) r.witness["trial"] = acc.worst_index;
    return r;
  });
}

VerificationReport sheet_cycle_check(int k) {
  if (k < 2) throw ConfigError("sheet_cycle_check: k must be >= 2");
  return timed([&] {
    // phi along the PSL generator loop winds once, so the continuous k-th
    // root advances one sheet per traversal.
    std::vector<Cx> loop;
    constexpr int kSteps = 256;
    loop.reserve(kSteps + 1);
    for (int j = 0; j <= kSteps; ++j) loop.push_back(phi_main(rotation(kPi * double(j) / kSteps)));
    VerificationReport r;
    r.name = "root-sheet-cycle-k" + std::to_string(k);
    r.samples = std::uint64_t(k);
    double worst = std::numeric_limits<double>::infinity();
    Cx root{1.0, 0.0};
    bool ok = true;
    for (int j = 1; j <= k; ++j) {
      root = root_continue_k(loop, root, k);
      const Cx expected = std::exp(kTwoPiI * double(j) / double(k));
      const double err = std::abs(root - expected);
      worst = std::min(worst, 1e-9 - err);
      if (err > 1e-9) ok = false;
      if (j < k && std::abs(root - Cx(1.0)) < 0.1) ok = false;  // premature sheet closure
    }
    r.pass = ok;
    r.worst_margin = worst;
    r.values["k"] = k;
    if (!ok) r.witness["k"] = k;
    return r;
  });
}

VerificationReport re_log_phi_lower_bound(std::span<const LiftedPoint> samples, double eps) {
  return timed([&] {
    VerificationReport r;
    r.name = "re-log-phi-lower-bound";
    r.samples = samples.size();
    const double bound = std::log(eps) - 1.0;
    r.values["eps"] = eps;
    r.values["bound"] = bound;
    if (samples.empty()) {
      r.pass = true;
      r.worst_margin = 0.0;
      r.values["vacuous"] = true;
      return r;
    }
    double worst = std::numeric_limits<double>::infinity();
    std::size_t worst_index = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double margin = samples[i].w.real() - bound;
      if (margin < worst) {
        worst = margin;
        worst_index = i;
      }
    }
    r.worst_margin = worst;
    r.pass = worst > 0.0;
    r.values["min_re_w"] = worst + bound;
    if (!r.pass) {
      r.witness["index"] = worst_index;
      r.witness["z"] = witness_triple(samples[worst_index].z);
      r.witness["w"] = ojson::array({samples[worst_index].w.real(), samples[worst_index].w.imag()});
    }
    return r;
  });
}

VerificationReport re_log_phi_suite(const CoverSuiteConfig& cfg, double eps) {
  return timed([&] {
    const OmegaChart chart;
    struct Acc {
      WorstCase margin;
      std::uint64_t membership_failures = 0;
    };
    const double bound = std::log(eps) - 1.0;
    const Acc acc = run_trials<Acc>(
        cfg.trials, cfg.workers, Acc{},
        [&](std::uint64_t i, Acc& a) {
          RandomStream rng(cfg.seed, i);
          const LiftedPoint p = sample_omega_tilde(rng, cfg, chart);
          if (!omega_tilde_membership(p, chart).inside) ++a.membership_failures;
          a.margin.feed(p.w.real() - bound, i);
        },
        [](Acc a, const Acc& b) {
          a.margin = WorstCase::merge(a.margin, b.margin);
          a.membership_failures += b.membership_failures;
          return a;
        });
    VerificationReport r;
    r.name = "re-log-phi-lower-bound";
    r.seed = cfg.seed;
    r.samples = cfg.trials;
    r.pass = acc.margin.violations == 0 && acc.membership_failures == 0;
    r.worst_margin = acc.margin.worst;
    r.values["eps"] = eps;
    r.values["bound"] = bound;
    r.values["min_re_w"] = acc.margin.worst + bound;
    r.values["membership_failures"] = acc.membership_failures;
    if (!r.pass) r.witness["trial"] = acc.margin.worst_index;
    return r;
  });
}

}  // namespace lieaut
