#pragma once

#include "lieaut/report.hpp"
#include "lieaut/rng.hpp"

#include <array>
#include <optional>

namespace lieaut {

// Element of G = R x R x T, the non-linear Heisenberg quotient.
struct HeisElement {
  double a = 0.0, b = 0.0;
  Cx c{1.0, 0.0};  // unit circle
};

HeisElement make_heis(double a, double b, Cx c);  // renormalizes |c| to 1

// Point of the complexification G^c = C x C x C^*.
struct HeisCPoint {
  Cx x{0.0}, y{0.0}, z{1.0};  // z != 0
};

// Group law (a,b,c)(x,y,z) = (a+x, b+y, c z e^{iay}), as the action on G^c
// and, restricted to real arguments, as the law of G itself.
HeisCPoint heis_mul(const HeisElement& g, const HeisCPoint& p);
HeisElement heis_mul(const HeisElement& g, const HeisElement& h);
HeisElement heis_inv(const HeisElement& g);

// U = {|x| < 1, |y| < 1, |z| < 2}
bool in_U(const HeisCPoint& p);

struct HeisWitness {
  HeisElement g;
  HeisCPoint u;  // in U, with heis_mul(g, u) recovering the point
};

struct HeisMembership {
  bool inside = false;
  std::optional<HeisWitness> witness;
};

// Closed-form membership in Omega = G U: |Im u| < 1, |Im v| < 1, and some
// a in (Re u - s, Re u + s), s = sqrt(1 - (Im u)^2), has |w| < 2 e^{-a Im v}.
// The exponential is monotone in a, so the supremum sits at an endpoint.
HeisMembership omega_membership(const HeisCPoint& p);

// Grid search over the same existential, the independent oracle for the
// closed form.
bool omega_membership_bruteforce(const HeisCPoint& p, double a_step = 1e-3);

// Variant with every inequality tightened (band > 0) or loosened (band < 0);
// points whose verdict is stable under both are away from the boundary.
bool omega_membership_banded(const HeisCPoint& p, double band);

// The explicit sufficient constant 2 e^{13/4} dominating |w| / |e^{u^2}|
// over Omega (maximum of 2 e^{t + 3 - t^2} at t = 1/2).
double derive_C();

HeisCPoint bounding_map(const HeisCPoint& p, double C);  // (u, v, w + 2 C e^{u^2})

// (sigma(u), sigma(v), 1/w') with sigma(t) = tanh(pi t / 4): strip to disc,
// image inside the open unit polydisc.
std::array<Cx, 3> bounded_embedding(const HeisCPoint& p, double C);
HeisCPoint embedding_inverse(const std::array<Cx, 3>& q, double C);

// Random point of Omega = G U, drawn as g * u.
HeisCPoint sample_omega(RandomStream& rng, double element_range = 1.5);
HeisElement sample_heis(RandomStream& rng, double element_range = 1.5);

struct HeisSuiteConfig {
  std::uint64_t seed = 1;
  std::uint64_t trials = 10000;
  int workers = 1;
  double element_range = 1.5;
  double boundary_band = 1e-3;
  bool collect_samples = false;
};

VerificationReport heis_membership_agreement(const HeisSuiteConfig& cfg);
VerificationReport heis_bound_constant_audit(const HeisSuiteConfig& cfg);
VerificationReport heis_wprime_audit(const HeisSuiteConfig& cfg);
VerificationReport heis_embedding_audit(const HeisSuiteConfig& cfg);
VerificationReport heis_invariance_audit(const HeisSuiteConfig& cfg);
VerificationReport heis_totally_real_audit(const HeisSuiteConfig& cfg);

}  // namespace lieaut
