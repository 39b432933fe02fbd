#include "lieaut/heisenberg.hpp"

#include "lieaut/verify.hpp"

#include <cmath>

namespace lieaut {

HeisElement make_heis(double a, double b, Cx c) {
  const double m = std::abs(c);
  if (!(m > 0.0) || !is_finite(c)) throw std::invalid_argument("make_heis: c must be a unit phase");
  return HeisElement{a, b, c / m};
}

HeisCPoint heis_mul(const HeisElement& g, const HeisCPoint& p) {
  return HeisCPoint{g.a + p.x, g.b + p.y, g.c * p.z * std::exp(Cx(0.0, 1.0) * g.a * p.y)};
}

HeisElement heis_mul(const HeisElement& g, const HeisElement& h) {
  return make_heis(g.a + h.a, g.b + h.b, g.c * h.c * std::exp(Cx(0.0, g.a * h.b)));
}

HeisElement heis_inv(const HeisElement& g) {
  return make_heis(-g.a, -g.b, std::conj(g.c) * std::exp(Cx(0.0, g.a * g.b)));
}

bool in_U(const HeisCPoint& p) {
  return std::abs(p.x) < 1.0 && std::abs(p.y) < 1.0 && std::abs(p.z) < 2.0 && std::abs(p.z) > 0.0;
}

namespace {

// Membership in G U with the three box bounds as parameters, so the same
// routine serves the exact test and the band-tightened variants.
bool membership_core(const HeisCPoint& p, double xb, double yb, double zb) {
  const double im_u = p.x.imag();
  const double im_v = p.y.imag();
  if (std::abs(im_u) >= xb || std::abs(im_v) >= yb) return false;
  const double s = std::sqrt(xb * xb - im_u * im_u);
  const double w_abs = std::abs(p.z);
  if (im_v == 0.0) return w_abs < zb;
  const double a_end = p.x.real() - (im_v > 0.0 ? s : -s);
  return w_abs < zb * std::exp(-a_end * im_v);
}

}  // namespace

HeisMembership omega_membership(const HeisCPoint& p) {
  HeisMembership out;
  out.inside = membership_core(p, 1.0, 1.0, 2.0);
  if (!out.inside) return out;

  // Reconstruct a witness: pick an interior a with |w| < 2 e^{-a Im v},
  // b = Re v, and fold the leftover phase into c.
  const double im_u = p.x.imag();
  const double im_v = p.y.imag();
  const double s = std::sqrt(1.0 - im_u * im_u);
  double lo = p.x.real() - s, hi = p.x.real() + s;
  if (im_v != 0.0) {
    const double a_bound = -std::log(std::abs(p.z) / 2.0) / im_v;
    if (im_v > 0.0) {
      hi = std::min(hi, a_bound);
    } else {
      lo = std::max(lo, a_bound);
    }
  }
  const double a = 0.5 * (lo + hi);
  const double b = p.y.real();
  const Cx z_raw = p.z * std::exp(Cx(0.0, -1.0) * a * (p.y - b));
  const Cx c = z_raw / std::abs(z_raw);
  out.witness = HeisWitness{make_heis(a, b, c), HeisCPoint{p.x - a, p.y - b, Cx(std::abs(z_raw))}};
  return out;
}

bool omega_membership_bruteforce(const HeisCPoint& p, double a_step) {
  const double im_u = p.x.imag();
  const double im_v = p.y.imag();
  if (std::abs(im_v) >= 1.0) return false;
  const double re_u = p.x.real();
  const double w_abs = std::abs(p.z);
  for (double a = re_u - 1.0; a <= re_u + 1.0; a += a_step) {
    const double dx = re_u - a;
    if (dx * dx + im_u * im_u >= 1.0) continue;
    if (w_abs * std::exp(a * im_v) < 2.0) return true;
  }
  return false;
}

bool omega_membership_banded(const HeisCPoint& p, double band) {
  return membership_core(p, 1.0 - band, 1.0 - band, 2.0 - band);
}

double derive_C() { return 2.0 * std::exp(13.0 / 4.0); }

HeisCPoint bounding_map(const HeisCPoint& p, double C) {
  if (!membership_core(p, 1.0, 1.0, 2.0)) throw NotInOmega{};
  return HeisCPoint{p.x, p.y, p.z + 2.0 * C * std::exp(p.x * p.x)};
}

namespace {

Cx strip_to_disc(Cx t) { return std::tanh(kPi * t / 4.0); }
Cx disc_to_strip(Cx q) { return 4.0 / kPi * std::atanh(q); }

}  // namespace

std::array<Cx, 3> bounded_embedding(const HeisCPoint& p, double C) {
  const HeisCPoint bounded = bounding_map(p, C);
  return {strip_to_disc(bounded.x), strip_to_disc(bounded.y), 1.0 / bounded.z};
}

HeisCPoint embedding_inverse(const std::array<Cx, 3>& q, double C) {
  const Cx u = disc_to_strip(q[0]);
  const Cx v = disc_to_strip(q[1]);
  const Cx wprime = 1.0 / q[2];
  return HeisCPoint{u, v, wprime - 2.0 * C * std::exp(u * u)};
}

HeisElement sample_heis(RandomStream& rng, double element_range) {
  const double a = rng.uniform(-element_range, element_range);
  const double b = rng.uniform(-element_range, element_range);
  return HeisElement{a, b, rng.unit_phase()};
}

HeisCPoint sample_omega(RandomStream& rng, double element_range) {
  const HeisElement g = sample_heis(rng, element_range);
  Cx z = rng.in_disc(2.0);
  while (std::abs(z) < 1e-6) z = rng.in_disc(2.0);
  const HeisCPoint u{rng.in_disc(1.0), rng.in_disc(1.0), z};
  return heis_mul(g, u);
}

// --- audits -------------------------------------------------------------------

namespace {

struct Extremum {
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
  static Extremum merge(Extremum a, const Extremum& b) {
    a.violations += b.violations;
    if (b.worst < a.worst || (b.worst == a.worst && b.worst_index < a.worst_index)) {
      a.worst = b.worst;
      a.worst_index = b.worst_index;
    }
    return a;
  }
};

double point_distance(const HeisCPoint& p, const HeisCPoint& q) {
  return std::sqrt(std::norm(p.x - q.x) + std::norm(p.y - q.y) + std::norm(p.z - q.z));
}

HeisCPoint sample_box_point(RandomStream& rng) {
  return HeisCPoint{Cx(rng.uniform(-3.0, 3.0), rng.uniform(-1.5, 1.5)),
                    Cx(rng.uniform(-3.0, 3.0), rng.uniform(-1.5, 1.5)),
                    std::polar(std::exp(rng.uniform(-3.0, 2.0)), rng.uniform(0.0, 2.0 * kPi))};
}

}  // namespace

VerificationReport heis_membership_agreement(const HeisSuiteConfig& cfg) {
  return timed([&] {
    struct Acc {
      std::uint64_t disagreements = 0;
      std::uint64_t first_bad = 0;
      std::uint64_t robust = 0;
      std::uint64_t in_band = 0;
      std::uint64_t witness_failures = 0;
    };
    auto draw = [&](std::uint64_t i) {
      RandomStream rng(cfg.seed, i);
      return (i % 2 == 0) ? sample_omega(rng, cfg.element_range) : sample_box_point(rng);
    };
    const Acc acc = run_trials<Acc>(
        cfg.trials, cfg.workers, Acc{},
        [&](std::uint64_t i, Acc& a) {
          const HeisCPoint p = draw(i);
          const HeisMembership m = omega_membership(p);
          if (m.inside) {
            const HeisWitness& w = *m.witness;
            const double err = point_distance(heis_mul(w.g, w.u), p);
            if (!in_U(w.u) || err > 1e-9 * (1.0 + std::abs(p.z))) {
              if (a.witness_failures == 0) a.first_bad = i;
              ++a.witness_failures;
            }
          }
          const bool strict = omega_membership_banded(p, cfg.boundary_band);
          const bool loose = omega_membership_banded(p, -cfg.boundary_band);
          if (strict != loose) {
            ++a.in_band;
            return;
          }
          ++a.robust;
          if (omega_membership_bruteforce(p) != m.inside) {
            if (a.disagreements == 0) a.first_bad = i;
            ++a.disagreements;
          }
        },
        [](Acc a, const Acc& b) {
          if (a.disagreements + a.witness_failures == 0 && b.disagreements + b.witness_failures > 0)
            a.first_bad = b.first_bad;
          a.disagreements += b.disagreements;
          a.robust += b.robust;
          a.in_band += b.in_band;
          a.witness_failures += b.witness_failures;
          return a;
        });
    VerificationReport r;
    r.name = "heisenberg-membership-agreement";
    r.seed = cfg.seed;
    r.samples = cfg.trials;
    r.pass = acc.disagreements == 0 && acc.witness_failures == 0;
    r.worst_margin = r.pass ? 1.0 : -double(acc.disagreements + acc.witness_failures);
    r.values["robust_samples"] = acc.robust;
    r.values["boundary_band_skipped"] = acc.in_band;
    r.values["disagreements"] = acc.disagreements;
    r.values["witness_failures"] = acc.witness_failures;
    if (!r.pass) {
      const HeisCPoint p = draw(acc.first_bad);
      r.witness["trial"] = acc.first_bad;
      r.witness["point"] =
          ojson::array({p.x.real(), p.x.imag(), p.y.real(), p.y.imag(), p.z.real(), p.z.imag()});
    }
    return r;
  });
}

VerificationReport heis_bound_constant_audit(const HeisSuiteConfig& cfg) {
  return timed([&] {
    const double C = derive_C();
    std::vector<double> samples;
    double* out = nullptr;
    if (cfg.collect_samples) {
      samples.assign(cfg.trials, 0.0);
      out = samples.data();
    }
    const Extremum acc = run_trials<Extremum>(
        cfg.trials, cfg.workers, Extremum{},
        [&](std::uint64_t i, Extremum& a) {
          RandomStream rng(cfg.seed, i);
          const HeisCPoint p = sample_omega(rng, cfg.element_range);
          const double ratio = std::abs(p.z) * std::exp(-(p.x * p.x).real());
          if (out) out[i] = ratio;
          a.feed(C - ratio, i);
        },
        Extremum::merge);
    VerificationReport r;
    r.name = "heisenberg-bounding-constant";
    r.seed = cfg.seed;
    r.samples = cfg.trials;
    r.pass = acc.violations == 0;
    r.worst_margin = acc.worst;
    r.values["C"] = C;
    r.values["max_ratio"] = C - acc.worst;
    r.sample_values = std::move(samples);
    r.csv_metric = "w_over_exp_u2";
    if (!r.pass) r.witness["trial"] = acc.worst_index;
    return r;
  });
}

VerificationReport heis_wprime_audit(const HeisSuiteConfig& cfg) {
  return timed([&] {
    const double C = derive_C();
    const Extremum acc = run_trials<Extremum>(
        cfg.trials, cfg.workers, Extremum{},
        [&](std::uint64_t i, Extremum& a) {
          RandomStream rng(cfg.seed, i);
          const HeisCPoint p = sample_omega(rng, cfg.element_range);
          const HeisCPoint q = bounding_map(p, C);
          const double wp = std::abs(q.z);
          const double chain = C * std::abs(std::exp(p.x * p.x));
          a.feed(std::min(wp - chain, wp - 1.0), i);
        },
        Extremum::merge);
    VerificationReport r;
    r.name = "heisenberg-wprime-lower-bound";
    r.seed = cfg.seed;
    r.samples = cfg.trials;
    r.pass = acc.violations == 0;
    r.worst_margin = acc.worst;
    r.values["C"] = C;
    if (!r.pass) r.witness["trial"] = acc.worst_index;
    return r;
  });
}

VerificationReport heis_embedding_audit(const HeisSuiteConfig& cfg) {
  return timed([&] {
    const double C = derive_C();
    struct Acc {
      Extremum modulus;    // 1 - max |component|
      Extremum roundtrip;  // 1e-9 - error
      Extremum pair;       // separation - 1e-12
    };
    const Acc acc = run_trials<Acc>(
        cfg.trials, cfg.workers, Acc{},
        [&](std::uint64_t i, Acc& a) {
          RandomStream rng(cfg.seed, i);
          const HeisCPoint p = sample_omega(rng, cfg.element_range);
          const auto q = bounded_embedding(p, C);
          const double mod = std::max({std::abs(q[0]), std::abs(q[1]), std::abs(q[2])});
          a.modulus.feed(1.0 - mod, i);
          const HeisCPoint back = embedding_inverse(q, C);
          a.roundtrip.feed(1e-9 - point_distance(back, p), i);
          const HeisCPoint p2 = sample_omega(rng, cfg.element_range);
          if (point_distance(p, p2) > 1e-6) {
            const auto q2 = bounded_embedding(p2, C);
            const double sep = std::sqrt(std::norm(q[0] - q2[0]) + std::norm(q[1] - q2[1]) +
                                         std::norm(q[2] - q2[2]));
            a.pair.feed(sep - 1e-12, i);
          }
        },
        [](Acc a, const Acc& b) {
          a.modulus = Extremum::merge(a.modulus, b.modulus);
          a.roundtrip = Extremum::merge(a.roundtrip, b.roundtrip);
          a.pair = Extremum::merge(a.pair, b.pair);
          return a;
        });
    VerificationReport r;
    r.name = "heisenberg-bounded-embedding";
    r.seed = cfg.seed;
    r.samples = cfg.trials;
    r.pass =
        acc.modulus.violations == 0 && acc.roundtrip.violations == 0 && acc.pair.violations == 0;
    r.worst_margin = std::min({acc.modulus.worst, acc.roundtrip.worst, acc.pair.worst});
    r.values["max_component_modulus"] = 1.0 - acc.modulus.worst;
    r.values["max_roundtrip_error"] = 1e-9 - acc.roundtrip.worst;
    r.values["min_pair_separation"] = acc.pair.worst + 1e-12;
    if (!r.pass) r.witness["trial"] = acc.modulus.worst_index;
    return r;
  });
}

VerificationReport heis_invariance_audit(const HeisSuiteConfig& cfg) {
  return timed([&] {
    const Extremum acc = run_trials<Extremum>(
        cfg.trials, cfg.workers, Extremum{},
        [&](std::uint64_t i, Extremum& a) {
          RandomStream rng(cfg.seed, i);
          const HeisElement g = sample_heis(rng, cfg.element_range);
          const HeisCPoint p = sample_omega(rng, cfg.element_range);
          a.feed(omega_membership(heis_mul(g, p)).inside ? 1.0 : -1.0, i);
        },
        Extremum::merge);
    VerificationReport r;
    r.name = "heisenberg-omega-invariance";
    r.seed = cfg.seed;
    r.samples = cfg.trials;
    r.pass = acc.violations == 0;
    r.worst_margin = acc.worst;
    r.values["violations"] = acc.violations;
    if (!r.pass) r.witness["trial"] = acc.worst_index;
    return r;
  });
}

VerificationReport heis_totally_real_audit(const HeisSuiteConfig& cfg) {
  return timed([&] {
    const Extremum acc = run_trials<Extremum>(
        cfg.trials, cfg.workers, Extremum{},
        [&](std::uint64_t i, Extremum& a) {
          RandomStream rng(cfg.seed, i);
          const HeisCPoint p = sample_omega(rng, cfg.element_range);
          // Orbit tangent at p: the a, b and arg(c) flows of the left action.
          std::array<std::array<Cx, 3>, 3> gens;
          gens[0] = {Cx(1.0), Cx(0.0), Cx(0.0, 1.0) * p.y * p.z};
          gens[1] = {Cx(0.0), Cx(1.0), Cx(0.0)};
          gens[2] = {Cx(0.0), Cx(0.0), Cx(0.0, 1.0) * p.z};
          const RankResult rank = totally_real_rank(gens);
          a.feed(rank.sigma_min - 1e-6 * rank.sigma_max, i);
        },
        Extremum::merge);
    VerificationReport r;
    r.name = "heisenberg-totally-real-orbits";
    r.seed = cfg.seed;
    r.samples = cfg.trials;
    r.pass = acc.violations == 0;
    r.worst_margin = acc.worst;
    if (!r.pass) r.witness["trial"] = acc.worst_index;
    return r;
  });
}

}  // namespace lieaut
