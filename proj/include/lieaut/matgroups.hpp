#pragma once

#include "lieaut/rng.hpp"
#include "lieaut/types.hpp"

#include <array>

namespace lieaut {

// 2x2 complex matrix with unit determinant, entries row-major.
struct UniMat2 {
  Cx a{1.0}, b{0.0}, c{0.0}, d{1.0};

  Cx det() const { return a * d - b * c; }
  double norm2() const { return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d); }
  double norm() const { return std::sqrt(norm2()); }
};

// Checks |det - 1| against the scale-aware tolerance and renormalizes
// g <- g / sqrt(det g) once drift exceeds half of it.
UniMat2 make_unimodular(Cx a, Cx b, Cx c, Cx d);

UniMat2 mul(const UniMat2& g1, const UniMat2& g2);
UniMat2 inv(const UniMat2& g);
UniMat2 operator-(const UniMat2& g);

double frob_distance(const UniMat2& g, const UniMat2& h);
double proj_distance(const UniMat2& g, const UniMat2& h);  // min(|g-h|, |g+h|)
double re_norm(const UniMat2& g);                          // |Re g|, entrywise
double im_norm(const UniMat2& g);                          // |Im g|, entrywise
bool approx_real(const UniMat2& g, double tol = 1e-9);

inline const UniMat2 kIdentity{};

// Element of PSL(2,C): the canonical representative of {+g, -g}.
// The representative is fixed by projectivize(); construct through it.
struct ProjMat2 {
  UniMat2 rep;
};

// Canonical sign: the first entry of largest modulus among (a,b,c,d) gets
// argument in (-pi/2, pi/2]; ties on the imaginary axis resolve to Im > 0.
ProjMat2 projectivize(const UniMat2& g);

ProjMat2 mul(const ProjMat2& g1, const ProjMat2& g2);
ProjMat2 inv(const ProjMat2& g);
double proj_distance(const ProjMat2& g, const ProjMat2& h);

// sl(2,R) element x*E + y*F + z*H in the basis
// E = [[0,1],[0,0]], F = [[0,0],[1,0]], H = [[1,0],[0,-1]].
struct Sl2Element {
  double x = 0.0, y = 0.0, z = 0.0;
  UniMat2 realize(double t = 1.0) const;  // the (traceless, real) matrix t*(xE + yF + zH)
};

inline constexpr Sl2Element kGenE{1.0, 0.0, 0.0};
inline constexpr Sl2Element kGenF{0.0, 1.0, 0.0};
inline constexpr Sl2Element kGenH{0.0, 0.0, 1.0};

// Closed-form exp(t*X) via the trace classification of 2x2 traceless
// matrices; exact group element up to rounding.
UniMat2 exp_sl2(const Sl2Element& X, double t);

// Point of C^3; the upper-half-plane and distinctness invariants are gated
// by is_distinct_halfplane where an operation needs them.
struct Triple {
  Cx z1{0.0, 1.0}, z2{1.0, 1.0}, z3{0.0, 2.0};
  std::array<Cx, 3> as_array() const { return {z1, z2, z3}; }
};

// Fixed base point zeta = (i, 1+i, 2i).
inline const Triple kBaseTriple{};

bool is_distinct_halfplane(const Triple& t, double tol = kDegenerateTol);
double min_pairwise(const Triple& t);
double triple_distance(const Triple& s, const Triple& t);
double triple_norm2(const Triple& t);

Cx mobius_apply(const UniMat2& g, Cx z);
Cx mobius_apply(const ProjMat2& g, Cx z);

// d/dt mobius_apply(g + t*dg, z) at t = 0
Cx mobius_derivative(const UniMat2& g, const UniMat2& dg, Cx z);

Triple act_triple(const UniMat2& g, const Triple& t);
Triple act_triple(const ProjMat2& g, const Triple& t);

inline Triple big_phi(const ProjMat2& h, const Triple& zeta) { return act_triple(h, zeta); }

// The three characters. psi is defined on SL(2,C) and flips sign with g;
// phi_square and phi_main are squares and therefore descend to PSL(2,C).
Cx psi(const UniMat2& g);
Cx phi_prelim(const UniMat2& g);                                     // a + ic
Cx phi_square(const ProjMat2& g);                                    // (a + ic)^2
inline Cx phi_main(const UniMat2& g) { Cx p = psi(g); return 0.25 * p * p; }
inline Cx phi_main(const ProjMat2& g) { return phi_main(g.rep); }

// Iwasawa factors: k(theta) a(s) n(u)
UniMat2 rotation(double theta);
UniMat2 diag_flow(double s);
UniMat2 shear(double u);
UniMat2 iwasawa(double theta, double s, double u);

struct IwasawaParams {
  double theta = 0.0, s = 0.0, u = 0.0;
};

IwasawaParams iwasawa_decompose(const UniMat2& g);   // real g, theta in [0, 2pi)
IwasawaParams iwasawa_decompose(const ProjMat2& g);  // theta in [0, pi)

UniMat2 sample_sl2r(RandomStream& rng, double T, double N);
ProjMat2 sample_psl2r(RandomStream& rng, double T, double N);

// h in SL(2,C) with |h - I| < delta (Euclidean norm), det corrected.
UniMat2 sample_near_identity(RandomStream& rng, double delta);

// The unique Moebius map sending src (3 distinct points) to dst; this is the
// closed-form inverse of h -> (h z1, h z2, h z3).
ProjMat2 mobius_from_three_points(const Triple& src, const Triple& dst);

}  // namespace lieaut
