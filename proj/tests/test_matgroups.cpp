#include "lieaut/matgroups.hpp"

#include <doctest.h>

#include <cmath>

using namespace lieaut;

namespace {

UniMat2 series_exp(const UniMat2& m, int terms) {
  UniMat2 acc = kIdentity;
  UniMat2 power = kIdentity;
  double factorial = 1.0;
  for (int n = 1; n <= terms; ++n) {
    power = UniMat2{power.a * m.a + power.b * m.c, power.a * m.b + power.b * m.d,
                    power.c * m.a + power.d * m.c, power.c * m.b + power.d * m.d};
    factorial *= n;
    acc.a += power.a / factorial;
    acc.b += power.b / factorial;
    acc.c += power.c / factorial;
    acc.d += power.d / factorial;
  }
  return acc;
}

}  // namespace

TEST_CASE("mobius_apply basics") {
  CHECK(std::abs(mobius_apply(kIdentity, Cx(0, 1)) - Cx(0, 1)) < 1e-15);

  const UniMat2 translate{Cx(1), Cx(1), Cx(0), Cx(1)};
  CHECK(std::abs(mobius_apply(translate, Cx(0, 1)) - Cx(1, 1)) < 1e-15);

  const UniMat2 invert{Cx(0), Cx(-1), Cx(1), Cx(0)};  // z -> -1/z
  CHECK(std::abs(mobius_apply(invert, Cx(0, 2)) - Cx(0, 0.5)) < 1e-15);
}

TEST_CASE("mobius_apply pole detection") {
  const UniMat2 invert{Cx(0), Cx(-1), Cx(1), Cx(0)};
  CHECK_THROWS_AS((void)mobius_apply(invert, Cx(1e-15, 0)), PoleError);
}

TEST_CASE("act_triple identity and translation") {
  const Triple t{Cx(0, 1), Cx(0, 2), Cx(0, 3)};
  const Triple r = act_triple(kIdentity, t);
  CHECK(triple_distance(r, t) < 1e-15);

  const UniMat2 translate{Cx(1), Cx(1), Cx(0), Cx(1)};
  const Triple s = act_triple(translate, t);
  CHECK(std::abs(s.z1 - Cx(1, 1)) < 1e-15);
  CHECK(std::abs(s.z2 - Cx(1, 2)) < 1e-15);
  CHECK(std::abs(s.z3 - Cx(1, 3)) < 1e-15);
}

TEST_CASE("act_triple reports the pole component") {
  // det 1 with a pole at z = i
  const UniMat2 g{Cx(0, 1), Cx(0), Cx(1), Cx(0, -1)};
  try {
    (void)act_triple(g, kBaseTriple);
    CHECK(false);
  } catch (const PoleError& e) {
    CHECK(e.component == 0);
  }
}

TEST_CASE("act_triple preserves distinctness for real elements") {
  // Moebius maps are injective, so distinct components stay distinct.
  RandomStream rng(11);
  for (int i = 0; i < 1000; ++i) {
    const UniMat2 g = sample_sl2r(rng, 2.0, 2.0);
    Triple t{Cx(rng.uniform(-3, 3), rng.uniform(0.2, 3)),
             Cx(rng.uniform(-3, 3), rng.uniform(0.2, 3)),
             Cx(rng.uniform(-3, 3), rng.uniform(0.2, 3))};
    if (min_pairwise(t) < 1e-3) continue;
    const Triple img = act_triple(g, t);
    CHECK(min_pairwise(img) > 1e-9);
    CHECK(img.z1.imag() > 0.0);  // real det-1 elements preserve the half-plane
    CHECK(img.z2.imag() > 0.0);
    CHECK(img.z3.imag() > 0.0);
  }
}

TEST_CASE("group operations keep det 1") {
  RandomStream rng(5);
  for (int i = 0; i < 10000; ++i) {
    const UniMat2 g1 = sample_sl2r(rng, 1.0, 1.0);
    const UniMat2 g2 = sample_sl2r(rng, 1.0, 1.0);
    CHECK(std::abs(mul(g1, g2).det() - 1.0) < 1e-9);
  }
}

TEST_CASE("mobius action is a homomorphism") {
  RandomStream rng(6);
  for (int i = 0; i < 10000; ++i) {
    const UniMat2 g1 = sample_sl2r(rng, 1.0, 1.0);
    const UniMat2 g2 = sample_sl2r(rng, 1.0, 1.0);
    const Cx z(rng.uniform(-2, 2), rng.uniform(0.2, 2));
    CHECK(std::abs(mobius_apply(mul(g1, g2), z) - mobius_apply(g1, mobius_apply(g2, z))) < 1e-9);
  }
}

TEST_CASE("inv is the matrix inverse") {
  const UniMat2 i = inv(UniMat2{Cx(1), Cx(1), Cx(0), Cx(1)});
  CHECK(std::abs(i.a - 1.0) < 1e-15);
  CHECK(std::abs(i.b + 1.0) < 1e-15);
  CHECK(std::abs(i.c) < 1e-15);
  CHECK(std::abs(i.d - 1.0) < 1e-15);

  RandomStream rng(7);
  for (int k = 0; k < 100; ++k) {
    const UniMat2 g = sample_sl2r(rng, 3.0, 3.0);
    CHECK(frob_distance(mul(g, inv(g)), kIdentity) < 1e-10 * (1.0 + g.norm2()));
  }
}

TEST_CASE("exp_sl2 diagonal case") {
  const UniMat2 e = exp_sl2(kGenH, 0.8);
  CHECK(std::abs(e.a - std::exp(0.8)) < 1e-14);
  CHECK(std::abs(e.d - std::exp(-0.8)) < 1e-14);
  CHECK(std::abs(e.b) < 1e-15);
  CHECK(std::abs(e.c) < 1e-15);
}

TEST_CASE("exp_sl2 against the power series") {
  // 20-term series as the independent oracle, covering all trace classes.
  const Sl2Element cases[] = {
      {1, -1, 0},        // rotation generator E - F
      {0.3, 0.7, -0.2},  // generic
      {1, 0, 0},         // nilpotent E
      {0, 1, 0},         // nilpotent F
      {0.5, 0.5, 0.25},  // hyperbolic
  };
  for (const Sl2Element& X : cases) {
    for (double t : {0.0, 0.2, 1.0, -0.7}) {
      CHECK(frob_distance(exp_sl2(X, t), series_exp(X.realize(t), 20)) < 1e-12);
    }
  }
  // F - E generates k(theta) itself
  CHECK(frob_distance(exp_sl2(Sl2Element{-1, 1, 0}, 0.9), rotation(0.9)) < 1e-14);
}

TEST_CASE("exp_sl2 one-parameter group law") {
  RandomStream rng(8);
  for (int i = 0; i < 200; ++i) {
    const Sl2Element X{rng.normal(), rng.normal(), rng.normal()};
    const double s = rng.uniform(-1, 1), t = rng.uniform(-1, 1);
    CHECK(frob_distance(exp_sl2(X, s + t), mul(exp_sl2(X, s), exp_sl2(X, t))) < 1e-10);
  }
  CHECK(frob_distance(exp_sl2(Sl2Element{0.4, -1.2, 0.3}, 0.0), kIdentity) < 1e-15);
}

TEST_CASE("psi values") {
  CHECK(std::abs(psi(kIdentity) - 2.0) < 1e-15);
  // psi(k(theta)) = 2 e^{i theta}; |psi| = 2 exactly on SO(2)
  for (double th : {0.0, 0.3, 1.2, 2.9, 4.4}) {
    const Cx p = psi(rotation(th));
    CHECK(std::abs(p - 2.0 * std::polar(1.0, th)) < 1e-14);
    CHECK(std::abs(p) == doctest::Approx(2.0).epsilon(1e-15));
  }
  const UniMat2 diag{Cx(2), Cx(0), Cx(0), Cx(0.5)};
  CHECK(std::abs(psi(diag) - 2.5) < 1e-15);
  // psi flips sign with g
  CHECK(std::abs(psi(-diag) + psi(diag)) < 1e-15);
}

TEST_CASE("characters on rotations and diagonals") {
  CHECK(std::abs(phi_prelim(kIdentity) - 1.0) < 1e-15);
  for (double th : {0.0, 0.5, 1.7, 3.0}) {
    CHECK(std::abs(phi_prelim(rotation(th)) - std::polar(1.0, th)) < 1e-14);
    CHECK(std::abs(phi_square(projectivize(rotation(th))) - std::polar(1.0, 2 * th)) < 1e-14);
    CHECK(std::abs(phi_main(rotation(th)) - std::polar(1.0, 2 * th)) < 1e-14);
  }
  CHECK(std::abs(phi_main(kIdentity) - 1.0) < 1e-15);
  const UniMat2 diag{Cx(2), Cx(0), Cx(0), Cx(0.5)};
  CHECK(std::abs(phi_main(diag) - 25.0 / 16.0) < 1e-15);
}

TEST_CASE("projectivization is sign invariant") {
  RandomStream rng(9);
  for (int i = 0; i < 10000; ++i) {
    UniMat2 g = sample_sl2r(rng, 2.0, 2.0);
    if (i % 3 == 0) g = mul(g, sample_near_identity(rng, 0.3));
    const ProjMat2 p1 = projectivize(g);
    const ProjMat2 p2 = projectivize(-g);
    CHECK(frob_distance(p1.rep, p2.rep) == 0.0);
    CHECK(std::abs(phi_main(p1) - phi_main(g)) == 0.0);
    CHECK(std::abs(phi_square(p1) - phi_square(p2)) == 0.0);
  }
}

TEST_CASE("iwasawa decomposition round trip") {
  RandomStream rng(10);
  for (int i = 0; i < 1000; ++i) {
    const double theta = rng.uniform(0, 2 * kPi), s = rng.uniform(-3, 3), u = rng.uniform(-4, 4);
    const UniMat2 g = iwasawa(theta, s, u);
    const IwasawaParams p = iwasawa_decompose(g);
    CHECK(frob_distance(iwasawa(p.theta, p.s, p.u), g) < 1e-10 * (1 + g.norm2()));
    const ProjMat2 pg = projectivize(g);
    const IwasawaParams q = iwasawa_decompose(pg);
    CHECK(q.theta >= 0.0);
    CHECK(q.theta < kPi);
    CHECK(proj_distance(projectivize(iwasawa(q.theta, q.s, q.u)), pg) < 1e-9 * (1 + g.norm2()));
  }
}

TEST_CASE("sample_near_identity stays in the ball with det 1") {
  RandomStream rng(12);
  for (int i = 0; i < 2000; ++i) {
    const UniMat2 h = sample_near_identity(rng, 0.3);
    CHECK(frob_distance(h, kIdentity) < 0.3);
    CHECK(std::abs(h.det() - 1.0) < 1e-12);
  }
}

TEST_CASE("big_phi fixes the base point under the identity") {
  const Triple img = big_phi(projectivize(kIdentity), kBaseTriple);
  CHECK(triple_distance(img, kBaseTriple) < 1e-15);
}

TEST_CASE("big_phi equivariance") {
  // Phi(g h) = g Phi(h): associativity of the Moebius action is the oracle.
  RandomStream rng(13);
  for (int i = 0; i < 1000; ++i) {
    const ProjMat2 g = sample_psl2r(rng, 1.5, 1.5);
    const ProjMat2 h = sample_psl2r(rng, 1.5, 1.5);
    const Triple lhs = big_phi(mul(g, h), kBaseTriple);
    const Triple rhs = act_triple(g, big_phi(h, kBaseTriple));
    CHECK(triple_distance(lhs, rhs) < 1e-10 * (1.0 + triple_norm2(lhs)));
  }
}

TEST_CASE("big_phi injectivity") {
  // A Moebius map is determined by three points.
  RandomStream rng(14);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const ProjMat2 h1 = sample_psl2r(rng, 1.5, 1.5);
    const ProjMat2 h2 = sample_psl2r(rng, 1.5, 1.5);
    if (proj_distance(h1, h2) <= 1e-3) continue;
    ++checked;
    CHECK(triple_distance(big_phi(h1, kBaseTriple), big_phi(h2, kBaseTriple)) > 1e-6);
  }
  CHECK(checked > 900);
}

TEST_CASE("mobius_from_three_points inverts the orbit map") {
  RandomStream rng(15);
  for (int i = 0; i < 1000; ++i) {
    const ProjMat2 h = sample_psl2r(rng, 1.5, 1.5);
    const Triple img = big_phi(h, kBaseTriple);
    const ProjMat2 rec = mobius_from_three_points(kBaseTriple, img);
    CHECK(proj_distance(rec, h) < 1e-8 * (1.0 + h.rep.norm2()));
  }
  CHECK_THROWS_AS(
      (void)mobius_from_three_points(Triple{Cx(0, 1), Cx(0, 1), Cx(0, 2)}, kBaseTriple),
      DegenerateTriple);
}

TEST_CASE("base triple constants") {
  CHECK(kBaseTriple.z1 == Cx(0, 1));
  CHECK(kBaseTriple.z2 == Cx(1, 1));
  CHECK(kBaseTriple.z3 == Cx(0, 2));
  CHECK(is_distinct_halfplane(kBaseTriple));
  CHECK(min_pairwise(kBaseTriple) == doctest::Approx(1.0));
}
