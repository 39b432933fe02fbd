#include "lieaut/covering.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace lieaut;

namespace {

std::vector<Cx> circle_loop(int turns, int steps) {
  std::vector<Cx> v;
  v.reserve(steps * turns + 1);
  for (int j = 0; j <= steps * turns; ++j) {
    v.push_back(std::polar(1.0, 2.0 * kPi * double(j) / steps));
  }
  return v;
}

}  // namespace

TEST_CASE("log_continue constants and circles") {
  const std::vector<Cx> ones(10, Cx(1.0));
  CHECK(std::abs(log_continue(ones, Cx(0.0))) < 1e-15);

  // one turn of the unit circle lifts to 2*pi*i
  CHECK(std::abs(log_continue(circle_loop(1, 64), Cx(0.0)) - kTwoPiI) < 1e-12);

  // traversed twice, started at 2*pi*i: additivity of winding
  CHECK(std::abs(log_continue(circle_loop(2, 64), kTwoPiI) - 3.0 * kTwoPiI) < 1e-12);
}

TEST_CASE("log_continue refines coarse arcs") {
  // 3 samples per turn violate the pi/2 criterion; bisection of the polyline
  // restores admissibility and the polyline (a triangle) has winding 1.
  std::vector<Cx> coarse;
  for (int j = 0; j <= 3; ++j) coarse.push_back(std::polar(1.0, 2.0 * kPi * j / 3.0));
  CHECK(std::abs(log_continue(coarse, Cx(0.0)) - kTwoPiI) < 1e-12);
}

TEST_CASE("log_continue error paths") {
  const std::vector<Cx> through_zero{Cx(1.0), Cx(1e-12), Cx(-1.0)};
  CHECK_THROWS_AS((void)log_continue(through_zero, Cx(0.0)), BranchFloorError);

  // antipodal straight segment passes through 0 exactly: the midpoint chain
  // never becomes admissible
  const std::vector<Cx> antipodal{Cx(1.0), Cx(-1.0)};
  CHECK_THROWS(log_continue(antipodal, Cx(0.0)));

  const std::vector<Cx> ones(4, Cx(1.0));
  CHECK_THROWS_AS((void)log_continue(ones, Cx(1.0)), std::invalid_argument);
}

TEST_CASE("root_continue_k monodromy") {
  const std::vector<Cx> ones(8, Cx(1.0));
  CHECK(std::abs(root_continue_k(ones, Cx(1.0), 2) - 1.0) < 1e-14);

  // square root monodromy: one circle flips the sheet
  CHECK(std::abs(root_continue_k(circle_loop(1, 64), Cx(1.0), 2) + 1.0) < 1e-12);
  // two circles restore it
  CHECK(std::abs(root_continue_k(circle_loop(2, 64), Cx(1.0), 2) - 1.0) < 1e-12);
}

TEST_CASE("sheet cycles have exact period k") {
  for (int k : {2, 3}) {
    const VerificationReport r = sheet_cycle_check(k);
    CHECK(r.pass);
  }
}

TEST_CASE("cover identity and loop") {
  const CoverElement e = cover_identity();
  CHECK(std::abs(e.branch) < 1e-15);
  const CoverElement loop = cover_loop();
  CHECK(std::abs(loop.branch - kTwoPiI) < 1e-15);
  CHECK(proj_distance(loop.endpoint, projectivize(kIdentity)) < 1e-15);
}

TEST_CASE("cover_from_path recovers the generator loop") {
  GroupPath path;
  for (int j = 0; j <= 128; ++j) {
    path.samples.push_back(projectivize(rotation(kPi * double(j) / 128.0)));
  }
  const CoverElement g = cover_from_path(path);
  CHECK(proj_distance(g.endpoint, projectivize(kIdentity)) < 1e-12);
  CHECK(std::abs(g.branch - kTwoPiI) < 1e-10);
}

TEST_CASE("cover element branch matches its endpoint") {
  RandomStream rng(21);
  CoverSuiteConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const CoverElement g = sample_cover_element(rng, cfg);
    CHECK(std::abs(std::exp(g.branch) - phi_main(g.endpoint)) <
          1e-9 * std::abs(phi_main(g.endpoint)));
  }
}

TEST_CASE("cover_mul on deck generators") {
  const CoverElement loop = cover_loop();
  const CoverElement twice = cover_mul(loop, loop);
  CHECK(proj_distance(twice.endpoint, projectivize(kIdentity)) < 1e-12);
  CHECK(std::abs(twice.branch - 2.0 * kTwoPiI) < 1e-10);

  // identity is a left and right unit
  RandomStream rng(22);
  CoverSuiteConfig cfg;
  for (int i = 0; i < 50; ++i) {
    const CoverElement x = sample_cover_element(rng, cfg);
    CHECK(cover_approx_equal(cover_mul(cover_identity(), x), x));
    CHECK(cover_approx_equal(cover_mul(x, cover_identity()), x));
  }
}

TEST_CASE("cover_inv is a two-sided inverse") {
  RandomStream rng(23);
  CoverSuiteConfig cfg;
  for (int i = 0; i < 100; ++i) {
    const CoverElement x = sample_cover_element(rng, cfg);
    const CoverElement xi = cover_inv(x);
    const CoverElement prod = cover_mul(x, xi);
    CHECK(proj_distance(prod.endpoint, projectivize(kIdentity)) < 1e-8);
    CHECK(std::abs(prod.branch) < 1e-8);
    const CoverElement prod2 = cover_mul(xi, x);
    CHECK(std::abs(prod2.branch) < 1e-8);
  }
}

TEST_CASE("cover_mul associativity") {
  RandomStream rng(24);
  CoverSuiteConfig cfg;
  for (int i = 0; i < 100; ++i) {
    const CoverElement x = sample_cover_element(rng, cfg);
    const CoverElement y = sample_cover_element(rng, cfg);
    const CoverElement z = sample_cover_element(rng, cfg);
    const CoverElement lhs = cover_mul(cover_mul(x, y), z);
    const CoverElement rhs = cover_mul(x, cover_mul(y, z));
    CHECK(proj_distance(lhs.endpoint, rhs.endpoint) < 1e-8 * (1 + lhs.endpoint.rep.norm2()));
    CHECK(std::abs(lhs.branch - rhs.branch) < 1e-8);
  }
}

TEST_CASE("branch invariant survives cover operations") {
  RandomStream rng(25);
  CoverSuiteConfig cfg;
  for (int i = 0; i < 100; ++i) {
    const CoverElement x = sample_cover_element(rng, cfg);
    const CoverElement y = sample_cover_element(rng, cfg);
    const CoverElement p = cover_mul(x, y);
    CHECK(std::abs(std::exp(p.branch) - phi_main(p.endpoint)) <
          1e-9 * std::abs(phi_main(p.endpoint)));
  }
}

TEST_CASE("path independence of the continuation") {
  // A homotopic detour (wiggled Iwasawa parameters, same endpoint, no extra
  // winding) must land on the same branch; one prepended loop shifts it by
  // exactly 2*pi*i.
  RandomStream rng(26);
  for (int i = 0; i < 50; ++i) {
    const double theta = rng.uniform(0, kPi), s = rng.uniform(-1.5, 1.5),
                 u = rng.uniform(-1.5, 1.5);
    auto wiggle = [&](double t) {
      const double bump = 0.2 * std::sin(kPi * t);
      return phi_main(mul(mul(rotation(t * theta + bump * (1.0 - t)), diag_flow(t * s + bump)),
                          shear(t * u - bump)));
    };
    auto straight = [&](double t) {
      return phi_main(mul(mul(rotation(t * theta), diag_flow(t * s)), shear(t * u)));
    };
    const Cx direct = continue_log_curve(straight, Cx(0.0));
    const Cx detour = continue_log_curve(wiggle, Cx(0.0));
    CHECK(std::abs(direct - detour) < 1e-8);

    auto looped = [&](double t) {
      if (t < 0.5) return phi_main(rotation(2.0 * t * kPi));
      return straight(2.0 * (t - 0.5));
    };
    const Cx with_loop = continue_log_curve(looped, Cx(0.0), 64);
    CHECK(std::abs(with_loop - direct - kTwoPiI) < 1e-8);
  }
}

TEST_CASE("phi_hat at the base point and on the orbit") {
  CHECK(std::abs(phi_hat(kBaseTriple) - 1.0) < 1e-12);
  RandomStream rng(27);
  for (int i = 0; i < 200; ++i) {
    const ProjMat2 g = sample_psl2r(rng, 1.5, 1.5);
    const Triple z = big_phi(g, kBaseTriple);
    CHECK(std::abs(phi_hat(z) - phi_main(g)) < 1e-8 * (1.0 + std::abs(phi_main(g))));
  }
}

TEST_CASE("omega_tilde_membership examples") {
  // phi(I) = 1, log = 0: the base disc
  const BranchQuery q0 = omega_tilde_membership(LiftedPoint{kBaseTriple, Cx(0.0)});
  CHECK(q0.inside);
  CHECK(std::abs(q0.branch) < 1e-12);

  // deck-shifted disc
  const BranchQuery q1 = omega_tilde_membership(LiftedPoint{kBaseTriple, kTwoPiI + Cx(0.5)});
  CHECK(q1.inside);
  CHECK(std::abs(q1.branch - kTwoPiI) < 1e-12);

  // the gap between discs: distance pi to both branches
  const BranchQuery q2 = omega_tilde_membership(LiftedPoint{kBaseTriple, Cx(0.0, kPi)});
  CHECK(!q2.inside);
}

TEST_CASE("lift_action identity and deck generator") {
  RandomStream rng(28);
  CoverSuiteConfig cfg;
  for (int i = 0; i < 100; ++i) {
    const LiftedPoint p = sample_omega_tilde(rng, cfg);
    const LiftedPoint q = lift_action(cover_identity(), p);
    CHECK(triple_distance(q.z, p.z) < 1e-12);
    CHECK(std::abs(q.w - p.w) < 1e-10);

    // deck generator: w -> w + 2*pi*i
    const LiftedPoint d = lift_action(cover_loop(), p);
    CHECK(triple_distance(d.z, p.z) < 1e-12);
    CHECK(std::abs(d.w - (p.w + kTwoPiI)) < 1e-8);
  }
}

TEST_CASE("lift_action rejects points off the lifted domain") {
  CHECK_THROWS_AS((void)lift_action(cover_loop(), LiftedPoint{kBaseTriple, Cx(0.0, kPi)}),
                  NotInDomain);
}

TEST_CASE("lift_action preserves disc membership and the branch invariant") {
  RandomStream rng(29);
  CoverSuiteConfig cfg;
  const OmegaChart chart;
  for (int i = 0; i < 100; ++i) {
    const CoverElement gt = sample_cover_element(rng, cfg);
    const LiftedPoint p = sample_omega_tilde(rng, cfg);
    const LiftedPoint q = lift_action(gt, p, chart);
    const BranchQuery b = omega_tilde_membership(q, chart);
    CHECK(b.inside);
    // the disc offset is transported unchanged
    const BranchQuery bp = omega_tilde_membership(p, chart);
    CHECK(std::abs((q.w - b.branch) - (p.w - bp.branch)) < 1e-8);
  }
}

TEST_CASE("suite reports pass at unit-test scale") {
  CoverSuiteConfig cfg;
  cfg.trials = 200;
  CHECK(deck_commutation_check(cfg).pass);
  CHECK(lifted_group_law_check(cfg).pass);
  CHECK(re_log_phi_suite(cfg).pass);
}

TEST_CASE("re_log_phi_lower_bound margins") {
  // (zeta, 0) against eps = 1/36: margin is 1 + log 36
  std::vector<LiftedPoint> pts{LiftedPoint{kBaseTriple, Cx(0.0)}};
  const VerificationReport r = re_log_phi_lower_bound(pts, 1.0 / 36.0);
  CHECK(r.pass);
  CHECK(r.worst_margin == doctest::Approx(1.0 + std::log(36.0)).epsilon(1e-12));

  const VerificationReport empty = re_log_phi_lower_bound({}, 1.0 / 36.0);
  CHECK(empty.pass);
  CHECK(empty.values.contains("vacuous"));

  // synthetic violation carries a witness
  std::vector<LiftedPoint> bad{LiftedPoint{kBaseTriple, Cx(-100.0)}};
  const VerificationReport rb = re_log_phi_lower_bound(bad, 1.0 / 36.0);
  CHECK(!rb.pass);
  CHECK(!rb.witness.is_null());
}

TEST_CASE("group path rejects bad inputs") {
  GroupPath not_from_identity;
  not_from_identity.samples = {projectivize(rotation(0.3)), projectivize(rotation(0.5))};
  CHECK_THROWS_AS((void)cover_from_path(not_from_identity), std::invalid_argument);
}
