#pragma once

#include "lieaut/covering.hpp"
#include "lieaut/report.hpp"

#include <array>
#include <functional>
#include <optional>

namespace lieaut {

// --- totally real orbits -----------------------------------------------

// Base point plus the three orbit tangent generators (images of E, F, H
// under the infinitesimal Moebius action, in closed form).
struct OrbitFrame {
  Triple base;
  std::array<std::array<Cx, 3>, 3> generators;  // rows: E, F, H flows
};

OrbitFrame orbit_frame(const Triple& base);

struct RankResult {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool rank6 = false;  // sigma_min > 1e-6 * sigma_max
};

RankResult totally_real_rank(const OrbitFrame& frame);
// Same test for arbitrary tangent generators (shared with the Heisenberg
// orbit check).
RankResult totally_real_rank(const std::array<std::array<Cx, 3>, 3>& generators);

// --- freeness ------------------------------------------------------------

struct FreenessResult {
  bool free_action = false;
  double rank_ratio = 0.0;          // sigma3 / sigma1 of the 3x4 fixed-point system
  double identity_residual = 0.0;   // distance of the nullspace to span{I}
};

// A Moebius map fixing three distinct points is the identity: the linear
// system a z_i + b - c z_i^2 - d z_i = 0 must have nullspace span{(1,0,0,1)}.
FreenessResult freeness_certificate(const Triple& t);

// --- winding -------------------------------------------------------------

int winding_number(std::span<const Cx> loop, const ContinuationOptions& opts = {});

// --- Monte-Carlo certifications -------------------------------------------

struct LemmaConfig {
  std::uint64_t seed = 1;
  std::uint64_t trials = 100000;
  int workers = 1;
  double eps = 1.0 / 3.0;
  double delta = 0.3;
  double iwasawa_T = 10.0;
  double iwasawa_N = 10.0;
  bool collect_samples = false;
};

// |psi(g h)| > eps over g in SL(2,R) (Iwasawa box) and |h - I| < delta.
VerificationReport check_lemma(const LemmaConfig& cfg);

struct ClaimConfig {
  std::uint64_t seed = 1;
  std::uint64_t trials = 100000;
  int workers = 1;
  double eps = 1.0 / 3.0;
  double coeff_range = 5.0;  // sampling box for the free entries b, c
  bool collect_samples = false;
};

// On the level set |psi(g)| <= eps in SL(2,C):
//   |Re g|^2 <= 4 |Im g|^2 + 5 (43/6 eps^2 - 1)   and   |Re g| <= 2 |Im g|.
VerificationReport check_lemma_claim(const ClaimConfig& cfg);

// Winding numbers of the three candidate characters around the compact
// generator loops; the pi_1 certification.
VerificationReport winding_certification();

// --- zeros of the rejected character --------------------------------------

struct PhiZeroWitness {
  UniMat2 g;  // real, det 1
  UniMat2 h;  // |h - I| < delta
  Cx value;   // (a + ic)(g h), ~0
};

PhiZeroWitness find_phi_square_zero(double delta, std::uint64_t seed);

// Witness report plus the contrast run: phi_main stays > eps^2/4 on the same
// neighborhood.
VerificationReport phi_zero_report(double delta, std::uint64_t seed, std::uint64_t contrast_trials,
                                   int workers = 1);

// --- properness probe ------------------------------------------------------

struct ProperConfig {
  std::uint64_t seed = 1;
  int rays = 64;
  int steps = 25;
  double s_max = 12.0;
  double iwasawa_T = 1.0;
  double iwasawa_N = 1.0;
  // Rays whose norm grows past the gate must have escaped; the score decays
  // like growth^-2, so 50x growth leaves an order of magnitude of slack
  // against the 1e-3 threshold. Slow near-parabolic rays stay exempt.
  double growth_gate = 50.0;
  double escape_score = 1e-3;
};

// Sampled evidence only: escape score along one-parameter rays. Heuristic by
// construction; never flips a bundle verdict.
VerificationReport properness_probe(const Triple& t, const ProperConfig& cfg);

// --- orbit tubes and the Levi form ----------------------------------------

struct TubeSpec {
  Triple base = kBaseTriple;
  double radius = 0.05;
};

// radius must stay below half the minimal pairwise distance of the base.
void validate(const TubeSpec& spec);

struct TubeDistanceResult {
  double dist = 0.0;
  IwasawaParams argmin;
};

// Distance from x to the orbit {g zeta : g in PSL(2,R)}, minimized over
// Iwasawa coordinates by multistart BFGS with analytic gradients.
TubeDistanceResult tube_distance(const Triple& x, const TubeSpec& spec);

using ScalarField = std::function<double(const Triple&)>;

struct LeviSample {
  double lambda_min = 0.0;   // restricted to the complex tangent space
  double lambda_max = 0.0;
  double full_min = 0.0;     // of the unrestricted 3x3 complex Hessian
  double full_max = 0.0;
  double grad_norm = 0.0;    // |complex gradient|
};

// Complex Hessian of rho at p by centered differences, restricted to the
// complex tangent of {rho = 0}; exposed for the ball / flat-tube oracles.
LeviSample levi_restricted(const ScalarField& rho, const Triple& p, double step);

struct LeviConfig {
  TubeSpec tube;
  std::uint64_t seed = 1;
  int boundary_samples = 200;
  double fd_step = 1e-4;
  double sample_T = 1.5;
  double sample_N = 1.5;
  bool collect_samples = false;
};

// Strong pseudoconvexity of the orbit tube boundary: minimum restricted Levi
// eigenvalue over sampled boundary points, with a Richardson step-halving
// consistency check on every sample.
VerificationReport levi_form_check(const LeviConfig& cfg);

// --- suite wrappers used by the CLI ----------------------------------------

struct TripleSuiteConfig {
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000;
  int workers = 1;
};

VerificationReport totally_real_suite(const TripleSuiteConfig& cfg);
VerificationReport freeness_suite(const TripleSuiteConfig& cfg);

Triple sample_distinct_triple(RandomStream& rng);

}  // namespace lieaut
