#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>

namespace lieaut {

using Cx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline const Cx kTwoPiI{0.0, 2.0 * kPi};

// Scale-aware tolerances shared across the group and continuation code.
inline constexpr double kDetTol = 1e-10;        // |det g - 1| <= kDetTol * (1 + |g|^2)
inline constexpr double kPoleTol = 1e-14;       // |c z + d| >  kPoleTol * |g| * (1 + |z|)
inline constexpr double kBranchFloor = 1e-8;    // moduli below this make log continuation ill-defined
inline constexpr double kDegenerateTol = 1e-9;  // pairwise-distance floor for triples

struct PoleError : std::runtime_error {
  int component;  // offending triple component, -1 for scalar application
  explicit PoleError(int comp = -1)
      : std::runtime_error("mobius_apply: point at or near a pole"), component(comp) {}
};

struct BranchFloorError : std::runtime_error {
  BranchFloorError() : std::runtime_error("continuation: modulus below branch floor") {}
};

struct RefinementExhausted : std::runtime_error {
  RefinementExhausted() : std::runtime_error("continuation: refinement budget exhausted") {}
};

struct NotClosed : std::runtime_error {
  NotClosed() : std::runtime_error("winding_number: loop does not close") {}
};

struct NotInDomain : std::runtime_error {
  NotInDomain() : std::runtime_error("lifted point has no log branch within unit distance") {}
};

struct NotInOmega : std::runtime_error {
  NotInOmega() : std::runtime_error("point is not in the invariant domain") {}
};

struct DegenerateTriple : std::runtime_error {
  DegenerateTriple() : std::runtime_error("triple has coinciding components") {}
};

struct ConvergenceFailure : std::runtime_error {
  explicit ConvergenceFailure(const char* what) : std::runtime_error(what) {}
};

struct SearchFailed : std::runtime_error {
  explicit SearchFailed(const char* what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline bool is_finite(Cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace lieaut
