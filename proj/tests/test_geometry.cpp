#include "lieaut/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace lieaut;

TEST_CASE("claim fixtures evaluate as frozen") {
  // det-1 matrix on the psi level set, solved in closed form: a = d = i,
  // b = 1 + c, c = (-1 + i sqrt 7)/2 gives psi = i, |Re g|^2 = 1/2,
  // 4 |Im g|^2 = 22.
  const Cx c(-0.5, std::sqrt(7.0) / 2.0);
  const UniMat2 g{Cx(0, 1), 1.0 + c, c, Cx(0, 1)};
  CHECK(std::abs(g.det() - 1.0) < 1e-14);
  CHECK(std::abs(psi(g) - Cx(0, 1)) < 1e-14);
  CHECK(re_norm(g) * re_norm(g) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(4.0 * im_norm(g) * im_norm(g) == doctest::Approx(22.0).epsilon(1e-12));
  CHECK(re_norm(g) <= 2.0 * im_norm(g));

  // exact psi = 0 solution: a = d = i, b = c + 2, c = -1 + i
  const Cx c0(-1.0, 1.0);
  const UniMat2 g0{Cx(0, 1), c0 + 2.0, c0, Cx(0, 1)};
  CHECK(std::abs(g0.det() - 1.0) < 1e-14);
  CHECK(std::abs(psi(g0)) < 1e-14);
  CHECK(re_norm(g0) <= 2.0 * im_norm(g0));
  const double eps = 1.0 / 3.0;
  const double bound = 4.0 * im_norm(g0) * im_norm(g0) + 5.0 * (43.0 / 6.0 * eps * eps - 1.0);
  CHECK(re_norm(g0) * re_norm(g0) <= bound);
}

TEST_CASE("check_lemma_claim passes and rejects bad eps") {
  ClaimConfig cfg;
  cfg.trials = 20000;
  cfg.seed = 3;
  const VerificationReport r = check_lemma_claim(cfg);
  CHECK(r.pass);
  CHECK(r.worst_margin > 0.0);
  // the constant 5(43/6 eps^2 - 1) is -55/54 at eps = 1/3
  CHECK(5.0 * (43.0 / 6.0 / 9.0 - 1.0) == doctest::Approx(-55.0 / 54.0));

  cfg.eps = 0.4;  // 43/6 eps^2 would exceed 1
  CHECK_THROWS_AS((void)check_lemma_claim(cfg), ConfigError);
}

TEST_CASE("check_lemma small run") {
  LemmaConfig cfg;
  cfg.trials = 5000;
  cfg.seed = 7;
  const VerificationReport r = check_lemma(cfg);
  CHECK(r.pass);
  CHECK(double(r.values["min_abs_psi"]) > 1.0 / 3.0);
  CHECK(double(r.values["min_abs_phi"]) > 1.0 / 36.0);

  // identity pair: |psi| = 2 > 1/3, and huge diagonals only grow it
  CHECK(std::abs(psi(kIdentity)) == doctest::Approx(2.0));
  CHECK(std::abs(psi(diag_flow(10.0))) > 1e4);

  cfg.delta = 0.4;
  CHECK_THROWS_AS((void)check_lemma(cfg), ConfigError);
}

TEST_CASE("lemma margin is seed stable at moderate sample counts") {
  LemmaConfig cfg;
  cfg.trials = 50000;
  double mins[3];
  for (std::uint64_t s = 0; s < 3; ++s) {
    cfg.seed = s + 1;
    mins[s] = double(check_lemma(cfg).values["min_abs_psi"]);
  }
  const double mid = (mins[0] + mins[1] + mins[2]) / 3.0;
  for (double m : mins) CHECK(std::abs(m - mid) < 0.10 * mid);
}

TEST_CASE("winding_number basics") {
  std::vector<Cx> constant(16, Cx(2.0, 1.0));
  CHECK(winding_number(constant) == 0);

  std::vector<Cx> circle;
  for (int j = 0; j <= 64; ++j) circle.push_back(std::polar(1.5, 2.0 * kPi * j / 64.0));
  CHECK(winding_number(circle) == 1);

  std::vector<Cx> open_arc;
  for (int j = 0; j <= 10; ++j) open_arc.push_back(std::polar(1.0, kPi * j / 10.0));
  CHECK_THROWS_AS((void)winding_number(open_arc), NotClosed);
}

TEST_CASE("winding certification report") {
  const VerificationReport r = winding_certification();
  CHECK(r.pass);
  CHECK(int(r.values["psi_sl_loop"]) == 1);
  CHECK(int(r.values["phi_prelim_sl_loop"]) == 1);
  CHECK(int(r.values["phi_square_sl_loop"]) == 2);
  CHECK(int(r.values["phi_main_psl_loop"]) == 1);
}

TEST_CASE("find_phi_square_zero produces exact witnesses") {
  for (double delta : {0.1, 0.01}) {
    const PhiZeroWitness w = find_phi_square_zero(delta, 17);
    CHECK(approx_real(w.g));
    CHECK(std::abs(w.g.det() - 1.0) < 1e-12);
    CHECK(frob_distance(w.h, kIdentity) < delta);
    CHECK(std::abs(w.h.det() - 1.0) < 1e-12);
    CHECK(std::abs(w.value) < 1e-6);
    CHECK(std::abs(phi_prelim(mul(w.g, w.h))) < 1e-6);
  }
  // smaller delta forces larger witnesses
  CHECK(find_phi_square_zero(0.01, 17).g.norm() > find_phi_square_zero(0.1, 17).g.norm());
}

TEST_CASE("phi_zero_report contrasts against phi_main") {
  const VerificationReport r = phi_zero_report(0.1, 5, 5000);
  CHECK(r.pass);
  CHECK(double(r.values["witness_abs_value"]) < 1e-6);
  CHECK(double(r.values["phi_main_min_same_neighborhood"]) > 1.0 / 36.0);
}

TEST_CASE("orbit frames and the totally real rank test") {
  const OrbitFrame frame = orbit_frame(kBaseTriple);
  // closed forms: E -> 1, F -> -z^2, H -> 2z componentwise
  CHECK(std::abs(frame.generators[0][0] - Cx(1.0)) < 1e-15);
  CHECK(std::abs(frame.generators[1][0] - (-kBaseTriple.z1 * kBaseTriple.z1)) < 1e-15);
  CHECK(std::abs(frame.generators[2][2] - 2.0 * kBaseTriple.z3) < 1e-15);

  CHECK(totally_real_rank(frame).rank6);

  // repeated component: the span sits in a complex 2-plane
  const RankResult degenerate = totally_real_rank(orbit_frame(Triple{Cx(0, 1), Cx(0, 1), Cx(0, 2)}));
  CHECK(degenerate.sigma_min < 1e-10);

  // near-degenerate is flagged by continuity of singular values
  const RankResult close =
      totally_real_rank(orbit_frame(Triple{Cx(0, 1), Cx(1e-6, 1), Cx(0, 2)}));
  CHECK(close.sigma_min < 1e-6 * close.sigma_max);
}

TEST_CASE("totally real suite") {
  const VerificationReport r = totally_real_suite({1, 1000, 2});
  CHECK(r.pass);
  CHECK(double(r.values["max_sigma_min_on_degenerate"]) < 1e-10);
}

TEST_CASE("freeness certificate") {
  const FreenessResult f = freeness_certificate(kBaseTriple);
  CHECK(f.free_action);
  CHECK(f.rank_ratio > 1e-6);
  CHECK(f.identity_residual < 1e-10);

  CHECK_THROWS_AS((void)freeness_certificate(Triple{Cx(0, 1), Cx(0, 1), Cx(0, 2)}),
                  DegenerateTriple);
}

TEST_CASE("random non-identity elements displace the base triple") {
  RandomStream rng(31);
  for (int i = 0; i < 10000; ++i) {
    const ProjMat2 g = sample_psl2r(rng, 5.0, 5.0);
    if (proj_distance(g, projectivize(kIdentity)) < 1e-6) continue;
    CHECK(triple_distance(act_triple(g, kBaseTriple), kBaseTriple) > 1e-9);
  }
}

TEST_CASE("properness probe flags escaping flows and exempts rotations") {
  // diagonal flow: score collapses as e^{-2s}
  const Triple t = kBaseTriple;
  auto score = [&](const UniMat2& g) {
    const Triple img = act_triple(g, t);
    return std::min(std::min({img.z1.imag(), img.z2.imag(), img.z3.imag()}), min_pairwise(img)) /
           (1.0 + triple_norm2(img));
  };
  CHECK(score(exp_sl2(kGenH, 12.0)) < 1e-3);
  // translation flow: |point| grows, differences constant
  CHECK(score(exp_sl2(kGenE, 12.0)) < 1e-3);
  // rotation flow is compact: bounded score, bounded norm
  const UniMat2 rot = exp_sl2(Sl2Element{1, -1, 0}, 12.0);
  CHECK(rot.norm() < 2.0);
  CHECK(score(rot) > 1e-3);

  ProperConfig cfg;
  cfg.rays = 64;
  const VerificationReport r = properness_probe(kBaseTriple, cfg);
  CHECK(r.heuristic);
  CHECK(r.pass);
}

TEST_CASE("tube_distance on and near the orbit") {
  TubeSpec spec;
  SUBCASE("base point") {
    const TubeDistanceResult r = tube_distance(kBaseTriple, spec);
    CHECK(r.dist < 1e-8);
    CHECK(std::abs(r.argmin.theta) + std::abs(r.argmin.s) + std::abs(r.argmin.u) < 1e-5);
  }
  SUBCASE("orbit points return to zero at the generating parameters") {
    RandomStream rng(32);
    for (int i = 0; i < 20; ++i) {
      const double theta = rng.uniform(0, kPi), s = rng.uniform(-1, 1), u = rng.uniform(-1, 1);
      const Triple x = act_triple(projectivize(iwasawa(theta, s, u)), kBaseTriple);
      const TubeDistanceResult r = tube_distance(x, spec);
      CHECK(r.dist < 1e-8);
      CHECK(frob_distance(iwasawa(r.argmin.theta, r.argmin.s, r.argmin.u), iwasawa(theta, s, u)) <
            1e-4 * (1.0 + iwasawa(theta, s, u).norm2()));
    }
  }
  SUBCASE("first-order normal displacement") {
    // push along a normal direction from the SVD complement of the frame
    const OrbitFrame frame = orbit_frame(kBaseTriple);
    double tangent[3][6];
    for (int v = 0; v < 3; ++v)
      for (int j = 0; j < 3; ++j) {
        tangent[v][2 * j] = frame.generators[std::size_t(v)][std::size_t(j)].real();
        tangent[v][2 * j + 1] = frame.generators[std::size_t(v)][std::size_t(j)].imag();
      }
    // orthonormalize and project a fixed vector onto the normal space
    for (int v = 0; v < 3; ++v) {
      for (int w = 0; w < v; ++w) {
        double dot = 0;
        for (int j = 0; j < 6; ++j) dot += tangent[v][j] * tangent[w][j];
        for (int j = 0; j < 6; ++j) tangent[v][j] -= dot * tangent[w][j];
      }
      double n2 = 0;
      for (int j = 0; j < 6; ++j) n2 += tangent[v][j] * tangent[v][j];
      for (int j = 0; j < 6; ++j) tangent[v][j] /= std::sqrt(n2);
    }
    double normal[6] = {1, 1, -1, 0.5, 0.25, -0.75};
    for (int v = 0; v < 3; ++v) {
      double dot = 0;
      for (int j = 0; j < 6; ++j) dot += normal[j] * tangent[v][j];
      for (int j = 0; j < 6; ++j) normal[j] -= dot * tangent[v][j];
    }
    double n2 = 0;
    for (double v : normal) n2 += v * v;
    const double n = std::sqrt(n2);
    const double delta = 0.01;
    const Triple x{kBaseTriple.z1 + delta * Cx(normal[0], normal[1]) / n,
                   kBaseTriple.z2 + delta * Cx(normal[2], normal[3]) / n,
                   kBaseTriple.z3 + delta * Cx(normal[4], normal[5]) / n};
    const TubeDistanceResult r = tube_distance(x, spec);
    CHECK(std::abs(r.dist - delta) < 1e-6);
  }
}

TEST_CASE("tube spec validation") {
  TubeSpec bad;
  bad.radius = 0.6;  // min pairwise distance of the base is 1
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("levi oracles: ball and flat tube") {
  auto ball = [](const Triple& x) { return triple_norm2(x) - 1.0; };
  const Triple on_sphere{Cx(0.6, 0.0), Cx(0.0, 0.48), Cx(0.384, 0.512)};
  const LeviSample b = levi_restricted(ball, on_sphere, 1e-4);
  CHECK(b.lambda_min == doctest::Approx(1.0).epsilon(0.01));
  CHECK(b.lambda_max == doctest::Approx(1.0).epsilon(0.01));

  auto flat = [](const Triple& x) {
    const double im = x.z1.imag();
    return im * im - 0.25;
  };
  const Triple on_flat{Cx(0.7, 0.5), Cx(0.3, -0.8), Cx(-1.1, 0.2)};
  const LeviSample f = levi_restricted(flat, on_flat, 1e-4);
  // complex Hessian of (Im z1)^2 has the single nonzero entry 1/2
  CHECK(f.full_max == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(f.lambda_min) < 1e-4);  // restricted to {v1 = 0} it vanishes
}

TEST_CASE("levi check on the orbit tube") {
  LeviConfig cfg;
  cfg.boundary_samples = 25;
  const VerificationReport r = levi_form_check(cfg);
  CHECK(r.pass);
  CHECK(r.worst_margin > 0.0);
}

TEST_CASE("normalized levi eigenvalue scales like 1/radius") {
  // Fixed boundary direction, radii 0.1 / 0.05 / 0.025: the eigenvalue of
  // the gradient-normalized Levi form doubles per halving.
  RandomStream rng(42, 7);
  const ProjMat2 g = sample_psl2r(rng, 1.0, 1.0);
  const Triple q = act_triple(g, kBaseTriple);
  const OrbitFrame frame = orbit_frame(q);
  double tangent[3][6];
  for (int v = 0; v < 3; ++v)
    for (int j = 0; j < 3; ++j) {
      tangent[v][2 * j] = frame.generators[std::size_t(v)][std::size_t(j)].real();
      tangent[v][2 * j + 1] = frame.generators[std::size_t(v)][std::size_t(j)].imag();
    }
  for (int v = 0; v < 3; ++v) {
    for (int w = 0; w < v; ++w) {
      double dot = 0;
      for (int j = 0; j < 6; ++j) dot += tangent[v][j] * tangent[w][j];
      for (int j = 0; j < 6; ++j) tangent[v][j] -= dot * tangent[w][j];
    }
    double n2 = 0;
    for (int j = 0; j < 6; ++j) n2 += tangent[v][j] * tangent[v][j];
    for (int j = 0; j < 6; ++j) tangent[v][j] /= std::sqrt(n2);
  }
  double normal[6];
  for (double& v : normal) v = rng.normal();
  for (int v = 0; v < 3; ++v) {
    double dot = 0;
    for (int j = 0; j < 6; ++j) dot += normal[j] * tangent[v][j];
    for (int j = 0; j < 6; ++j) normal[j] -= dot * tangent[v][j];
  }
  double n2 = 0;
  for (double v : normal) n2 += v * v;
  const double nn = std::sqrt(n2);
  const std::array<Cx, 3> qa = q.as_array();

  double normalized[3];
  const double radii[3] = {0.1, 0.05, 0.025};
  for (int k = 0; k < 3; ++k) {
    const double r = radii[k];
    const Triple p{qa[0] + r * Cx(normal[0], normal[1]) / nn,
                   qa[1] + r * Cx(normal[2], normal[3]) / nn,
                   qa[2] + r * Cx(normal[4], normal[5]) / nn};
    TubeSpec spec;
    spec.radius = r;
    auto rho = [&](const Triple& x) {
      const TubeDistanceResult t = tube_distance(x, spec);
      return t.dist * t.dist - r * r;
    };
    const LeviSample s = levi_restricted(rho, p, 1e-4);
    CHECK(s.lambda_min > 0.0);
    normalized[k] = s.lambda_min / s.grad_norm;
  }
  CHECK(normalized[1] / normalized[0] == doctest::Approx(2.0).epsilon(0.25));
  CHECK(normalized[2] / normalized[1] == doctest::Approx(2.0).epsilon(0.25));
}
