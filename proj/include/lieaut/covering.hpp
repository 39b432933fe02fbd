#pragma once

#include "lieaut/matgroups.hpp"
#include "lieaut/report.hpp"

#include <functional>
#include <span>
#include <vector>

namespace lieaut {

struct ContinuationOptions {
  double branch_floor = kBranchFloor;
  int refinement_budget = 20;  // max bisection depth per segment
};

// Terminal value of the continuous logarithm along the polyline through
// `values`, started at initial_log (which must be a log of values[0]).
// Segments whose argument jump reaches pi/2 are bisected until admissible.
Cx log_continue(std::span<const Cx> values, Cx initial_log, const ContinuationOptions& opts = {});

// Same machinery for the continuous k-th root, k >= 2.
Cx root_continue_k(std::span<const Cx> values, Cx initial_root, int k,
                   const ContinuationOptions& opts = {});

// Continuation along a genuine curve f : [0,1] -> C*, refining in the
// parameter so under-sampled stretches are resolved against f itself.
Cx continue_log_curve(const std::function<Cx(double)>& f, Cx initial_log, int base_segments = 32,
                      const ContinuationOptions& opts = {});

// Discretized path in PSL(2,R) from the identity; carrier of covering
// elements.
struct GroupPath {
  std::vector<ProjMat2> samples;
  int refinement_budget = 20;
};

// Element of the universal cover of PSL(2,R), encoded as its endpoint plus
// the branch of log phi continued from log phi(e) = 0 along a defining path.
struct CoverElement {
  ProjMat2 endpoint;
  Cx branch{0.0, 0.0};
};

CoverElement cover_identity();
CoverElement cover_loop(int n = 1);  // n-th deck power: endpoint I, branch 2*pi*i*n
CoverElement cover_from_path(const GroupPath& path);

// Cover element over a real endpoint carrying `extra_loops` full windings on
// top of the short-path branch.
CoverElement make_cover(const ProjMat2& endpoint, int extra_loops = 0);

CoverElement cover_mul(const CoverElement& x, const CoverElement& y);
CoverElement cover_inv(const CoverElement& x);
bool cover_approx_equal(const CoverElement& x, const CoverElement& y, double tol = 1e-8);

// Point of the thickened lifted domain: z in the base domain, w a point of
// some unit disc centered at a branch of log phi(z).
struct LiftedPoint {
  Triple z;
  Cx w{0.0, 0.0};
};

// Group-coordinate chart of the base domain: phi on a triple z is evaluated
// as phi(h) for the Moebius map h sending zeta to z.
struct OmegaChart {
  Triple zeta = kBaseTriple;
  double tube_radius = 0.1;
};

Cx phi_hat(const Triple& z, const OmegaChart& chart = {});

struct BranchQuery {
  bool inside = false;
  Cx branch{0.0, 0.0};  // the branch L with |w - L| < 1, when inside
};

BranchQuery omega_tilde_membership(const LiftedPoint& p, const OmegaChart& chart = {});

// (z, w) -> (g z, w - log phi(z) + log phi(g~ z)) along the canonical path of gt.
LiftedPoint lift_action(const CoverElement& gt, const LiftedPoint& p, const OmegaChart& chart = {});

// Continuation of log phi along t -> left * gamma(t) * right for the
// canonical path gamma of gt, starting from initial_log (a branch of
// log phi(left * right)). This is the single primitive behind cover_mul,
// cover_inv and lift_action.
Cx continue_logphi_canonical(const CoverElement& gt, const UniMat2& left, const UniMat2& right,
                             Cx initial_log, const ContinuationOptions& opts = {});

struct CoverSuiteConfig {
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000;
  int workers = 1;
  double delta = 0.3;        // near-identity spread of base-domain samples
  double iwasawa_T = 5.0;
  double iwasawa_N = 5.0;
  double element_T = 1.5;    // Iwasawa box for sampled cover elements
  double element_N = 1.5;
  int max_extra_loops = 2;
  bool collect_samples = false;
};

// Random point of the thickened lifted domain, drawn over z = (g h) zeta
// with |h - I| < delta, a random deck shift, and a disc offset.
LiftedPoint sample_omega_tilde(RandomStream& rng, const CoverSuiteConfig& cfg,
                               const OmegaChart& chart = {});
CoverElement sample_cover_element(RandomStream& rng, const CoverSuiteConfig& cfg);

VerificationReport deck_commutation_check(const CoverSuiteConfig& cfg);
VerificationReport lifted_group_law_check(const CoverSuiteConfig& cfg);
VerificationReport sheet_cycle_check(int k);
VerificationReport re_log_phi_lower_bound(std::span<const LiftedPoint> samples, double eps);
VerificationReport re_log_phi_suite(const CoverSuiteConfig& cfg, double eps = 1.0 / 36.0);

}  // namespace lieaut
