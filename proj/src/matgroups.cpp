#include "lieaut/matgroups.hpp"

#include <cmath>
#include <cstdlib>

namespace lieaut {

UniMat2 make_unimodular(Cx a, Cx b, Cx c, Cx d) {
  UniMat2 g{a, b, c, d};
  const Cx det = g.det();
  if (!is_finite(det) || std::abs(det) < 1e-100) {
    throw std::invalid_argument("make_unimodular: singular or non-finite matrix");
  }
  const double tol = kDetTol * (1.0 + g.norm2());
  const double drift = std::abs(det - 1.0);
  if (drift > 0.5 * tol) {
    const Cx root = std::sqrt(det);
    g.a /= root;
    g.b /= root;
    g.c /= root;
    g.d /= root;
  }
  return g;
}

UniMat2 mul(const UniMat2& g1, const UniMat2& g2) {
  return make_unimodular(g1.a * g2.a + g1.b * g2.c, g1.a * g2.b + g1.b * g2.d,
                         g1.c * g2.a + g1.d * g2.c, g1.c * g2.b + g1.d * g2.d);
}

UniMat2 inv(const UniMat2& g) { return UniMat2{g.d, -g.b, -g.c, g.a}; }

UniMat2 operator-(const UniMat2& g) { return UniMat2{-g.a, -g.b, -g.c, -g.d}; }

double frob_distance(const UniMat2& g, const UniMat2& h) {
  return std::sqrt(std::norm(g.a - h.a) + std::norm(g.b - h.b) + std::norm(g.c - h.c) +
                   std::norm(g.d - h.d));
}

double proj_distance(const UniMat2& g, const UniMat2& h) {
  return std::min(frob_distance(g, h), frob_distance(g, -h));
}

double re_norm(const UniMat2& g) {
  const double ra = g.a.real(), rb = g.b.real(), rc = g.c.real(), rd = g.d.real();
  return std::sqrt(ra * ra + rb * rb + rc * rc + rd * rd);
}

double im_norm(const UniMat2& g) {
  const double ia = g.a.imag(), ib = g.b.imag(), ic = g.c.imag(), id = g.d.imag();
  return std::sqrt(ia * ia + ib * ib + ic * ic + id * id);
}

bool approx_real(const UniMat2& g, double tol) { return im_norm(g) <= tol * (1.0 + g.norm()); }

ProjMat2 projectivize(const UniMat2& g) {
  const Cx entries[4] = {g.a, g.b, g.c, g.d};
  int lead = 0;
  double best = std::abs(entries[0]);
  for (int i = 1; i < 4; ++i) {
    const double m = std::abs(entries[i]);
    if (m > best) {
      best = m;
      lead = i;
    }
  }
  const Cx t = entries[lead];
  const bool keep = (t.real() > 0.0) || (t.real() == 0.0 && t.imag() > 0.0);
  return ProjMat2{keep ? g : -g};
}

ProjMat2 mul(const ProjMat2& g1, const ProjMat2& g2) { return projectivize(mul(g1.rep, g2.rep)); }

ProjMat2 inv(const ProjMat2& g) { return projectivize(inv(g.rep)); }

double proj_distance(const ProjMat2& g, const ProjMat2& h) { return proj_distance(g.rep, h.rep); }

UniMat2 Sl2Element::realize(double t) const {
  return UniMat2{Cx(t * z), Cx(t * x), Cx(t * y), Cx(-t * z)};
}

UniMat2 exp_sl2(const Sl2Element& X, double t) {
  const UniMat2 m = X.realize(t);
  // m is traceless, so m^2 = q*I with q = -det m = z^2 + xy (scaled by t^2),
  // and exp m = c0(q) I + c1(q) m with c0 = cosh sqrt(q), c1 = sinh(sqrt q)/sqrt q.
  const double q = t * t * (X.z * X.z + X.x * X.y);
  double c0, c1;
  if (std::abs(q) < 1e-8) {
    c0 = 1.0 + q / 2.0 + q * q / 24.0;
    c1 = 1.0 + q / 6.0 + q * q / 120.0;
  } else if (q > 0.0) {
    const double mu = std::sqrt(q);
    c0 = std::cosh(mu);
    c1 = std::sinh(mu) / mu;
  } else {
    const double mu = std::sqrt(-q);
    c0 = std::cos(mu);
    c1 = std::sin(mu) / mu;
  }
  return UniMat2{c0 + c1 * m.a, c1 * m.b, c1 * m.c, c0 + c1 * m.d};
}

bool is_distinct_halfplane(const Triple& t, double tol) {
  if (t.z1.imag() <= 0.0 || t.z2.imag() <= 0.0 || t.z3.imag() <= 0.0) return false;
  return min_pairwise(t) > tol;
}

double min_pairwise(const Triple& t) {
  return std::min({std::abs(t.z1 - t.z2), std::abs(t.z1 - t.z3), std::abs(t.z2 - t.z3)});
}

double triple_distance(const Triple& s, const Triple& t) {
  return std::sqrt(std::norm(s.z1 - t.z1) + std::norm(s.z2 - t.z2) + std::norm(s.z3 - t.z3));
}

double triple_norm2(const Triple& t) { return std::norm(t.z1) + std::norm(t.z2) + std::norm(t.z3); }

Cx mobius_apply(const UniMat2& g, Cx z) {
  const Cx den = g.c * z + g.d;
  if (std::abs(den) <= kPoleTol * g.norm() * (1.0 + std::abs(z))) throw PoleError{};
  return (g.a * z + g.b) / den;
}

Cx mobius_apply(const ProjMat2& g, Cx z) { return mobius_apply(g.rep, z); }

Cx mobius_derivative(const UniMat2& g, const UniMat2& dg, Cx z) {
  const Cx den = g.c * z + g.d;
  const Cx num = g.a * z + g.b;
  return (dg.a * z + dg.b) / den - num * (dg.c * z + dg.d) / (den * den);
}

Triple act_triple(const UniMat2& g, const Triple& t) {
  Triple out;
  const std::array<Cx, 3> in = t.as_array();
  std::array<Cx, 3> res;
  for (int i = 0; i < 3; ++i) {
    try {
      res[std::size_t(i)] = mobius_apply(g, in[std::size_t(i)]);
    } catch (const PoleError&) {
      throw PoleError{i};
    }
  }
  out.z1 = res[0];
  out.z2 = res[1];
  out.z3 = res[2];
  return out;
}

Triple act_triple(const ProjMat2& g, const Triple& t) { return act_triple(g.rep, t); }

Cx psi(const UniMat2& g) { return (g.a + g.d) + Cx(0.0, 1.0) * (g.c - g.b); }

Cx phi_prelim(const UniMat2& g) { return g.a + Cx(0.0, 1.0) * g.c; }

Cx phi_square(const ProjMat2& g) {
  const Cx p = phi_prelim(g.rep);
  return p * p;
}

UniMat2 rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return UniMat2{Cx(c), Cx(-s), Cx(s), Cx(c)};
}

UniMat2 diag_flow(double s) { return UniMat2{Cx(std::exp(s)), Cx(0.0), Cx(0.0), Cx(std::exp(-s))}; }

UniMat2 shear(double u) { return UniMat2{Cx(1.0), Cx(u), Cx(0.0), Cx(1.0)}; }

UniMat2 iwasawa(double theta, double s, double u) {
  return mul(mul(rotation(theta), diag_flow(s)), shear(u));
}

IwasawaParams iwasawa_decompose(const UniMat2& g) {
  if (!approx_real(g)) throw std::invalid_argument("iwasawa_decompose: matrix is not real");
  double theta = std::atan2(g.c.real(), g.a.real());
  if (theta < 0.0) theta += 2.0 * kPi;
  const UniMat2 t = mul(rotation(-theta), g);  // upper triangular, t11 > 0
  const double t11 = t.a.real();
  return IwasawaParams{theta, std::log(t11), t.b.real() / t11};
}

IwasawaParams iwasawa_decompose(const ProjMat2& g) {
  IwasawaParams p = iwasawa_decompose(g.rep);
  p.theta = std::fmod(p.theta, kPi);  // k(theta + pi) = -k(theta)
  return p;
}

UniMat2 sample_sl2r(RandomStream& rng, double T, double N) {
  const double theta = rng.uniform(0.0, 2.0 * kPi);
  const double s = rng.uniform(-T, T);
  const double u = rng.uniform(-N, N);
  return iwasawa(theta, s, u);
}

ProjMat2 sample_psl2r(RandomStream& rng, double T, double N) {
  const double theta = rng.uniform(0.0, kPi);
  const double s = rng.uniform(-T, T);
  const double u = rng.uniform(-N, N);
  return projectivize(iwasawa(theta, s, u));
}

UniMat2 sample_near_identity(RandomStream& rng, double delta) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    double e[8];
    double n2 = 0.0;
    for (double& v : e) {
      v = rng.normal();
      n2 += v * v;
    }
    const double scale = rng.uniform() * delta / std::sqrt(n2);
    const UniMat2 h0{Cx(1.0 + scale * e[0], scale * e[1]), Cx(scale * e[2], scale * e[3]),
                     Cx(scale * e[4], scale * e[5]), Cx(1.0 + scale * e[6], scale * e[7])};
    const Cx root = std::sqrt(h0.det());
    const UniMat2 h{h0.a / root, h0.b / root, h0.c / root, h0.d / root};
    if (frob_distance(h, kIdentity) < delta) return h;
  }
  throw SearchFailed("sample_near_identity: det renormalization kept escaping the ball");
}

namespace {

// Raw (unnormalized) matrix sending (w1, w2, w3) to (0, 1, inf).
struct RawMat2 {
  Cx a, b, c, d;
};

RawMat2 to_zero_one_inf(const Triple& w) {
  const Cx w1 = w.z1, w2 = w.z2, w3 = w.z3;
  return RawMat2{w2 - w3, -w1 * (w2 - w3), w2 - w1, -w3 * (w2 - w1)};
}

}  // namespace

ProjMat2 mobius_from_three_points(const Triple& src, const Triple& dst) {
  if (min_pairwise(src) <= kDegenerateTol || min_pairwise(dst) <= kDegenerateTol) {
    throw DegenerateTriple{};
  }
  const RawMat2 s = to_zero_one_inf(src);
  const RawMat2 t = to_zero_one_inf(dst);
  // adj(t) * s, then det-normalize; the sign of the square root is absorbed
  // by the projectivization.
  const Cx a = t.d * s.a - t.b * s.c;
  const Cx b = t.d * s.b - t.b * s.d;
  const Cx c = -t.c * s.a + t.a * s.c;
  const Cx d = -t.c * s.b + t.a * s.d;
  const Cx det = a * d - b * c;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  if (std::abs(det) < 1e-20 * scale * scale) throw DegenerateTriple{};
  const Cx root = std::sqrt(det);
  return projectivize(UniMat2{a / root, b / root, c / root, d / root});
}

}  // namespace lieaut
