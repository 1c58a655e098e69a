#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "gibbs/markov.hpp"
#include "gibbs/thermo.hpp"

namespace gibbs {

enum class Side { Unstable, Stable };

/// Input potential for one side of the synthesis: a forward cylinder table
/// on the side's shift, or a trigonometric polynomial on the torus sampled
/// through the coding at the working depth. Callers pass raw potentials;
/// pressure subtraction happens inside.
struct PotentialInput {
  std::optional<Potential> table;
  std::optional<TrigPolynomial> trig;

  static PotentialInput zero() { return PotentialInput{}; }
  static PotentialInput from_table(Potential p) {
    return PotentialInput{std::move(p), std::nullopt};
  }
  static PotentialInput from_trig(TrigPolynomial t) {
    return PotentialInput{std::nullopt, std::move(t)};
  }
  bool is_zero() const { return !table && !trig; }
};

/// Monotone cumulative-measure coordinate along a boundary segment:
/// breakpoints are the ordered cylinder-image endpoints at the build depth,
/// with linear interpolation inside the deepest cylinders.
struct CoordinateFunction {
  std::shared_ptr<const SegmentCoding> segment;
  int depth = 0;
  std::vector<double> breakpoints;  // ascending, spanning [t_min, t_max]
  std::vector<double> cumulative;   // F at breakpoints, 0 at start, 1 at end
  double resolution = 0.0;          // max cylinder mass

  double eval(double t) const;
  double inverse(double y) const;  // monotone bisection, 60 iterations
};

struct BoundaryMeasure {
  GibbsMeasure measure;      // BRS measure of the reduced, pressure-zero input
  double pressure_raw = 0.0; // pressure of the raw input potential
  double reduction_error = 0.0;
  std::shared_ptr<const SegmentCoding> segment;  // pi_1 presentation
  std::shared_ptr<const MarkovPartition> partition;  // the side's partition
};

/// nu+ (side u) or nu- (side s): BRS measure of the pressure-normalized,
/// forward-reduced potential, tagged with the segment presentation.
/// table_depth controls the sampling depth of trig inputs (0 = depth);
/// checks that shift the measure need it smaller than the measure depth.
BoundaryMeasure boundary_measure(std::shared_ptr<const MarkovPartition> part,
                                 const PotentialInput& phi, Side side,
                                 int depth, double tol = 1e-9,
                                 int table_depth = 0);

CoordinateFunction coordinate_function(const GibbsMeasure& measure,
                                       std::shared_ptr<const SegmentCoding> segment,
                                       int depth);

struct SmoothStructure {
  std::shared_ptr<const MarkovPartition> part;    // unstable-side partition
  std::shared_ptr<const MarkovPartition> part_t;  // transposed (stable side)
  BoundaryMeasure side_u, side_s;
  CoordinateFunction F_u, F_s;
  double P_u = 0.0, P_s = 0.0;
  int depth = 0;
  PotentialInput input_u, input_s;  // raw inputs, kept for predictions

  double resolution() const {
    return std::max(F_u.resolution, F_s.resolution);
  }
};

SmoothStructure synthesize_structure(std::shared_ptr<const MarkovPartition> part,
                                     const PotentialInput& phi_u,
                                     const PotentialInput& phi_s, int depth,
                                     double tol = 1e-9);

/// The structure-change map evaluated at a torus point: both coordinates are
/// rescaled cumulative measures along the two boundary segments.
Vec2 apply_h(const SmoothStructure& st, const Vec2& p);
Vec2 apply_h_inverse(const SmoothStructure& st, const Vec2& q);
/// g = h o L o h^{-1}.
Vec2 conjugated_map(const SmoothStructure& st, const Vec2& q);

struct EigenvaluePair {
  double lambda_u = 0.0;
  double lambda_s = 0.0;
};

/// Expansion measured as measure ratios of depth-controlled cylinders at a
/// periodic point (and the stable mirror through the transposed side).
EigenvaluePair measured_eigenvalues(const SmoothStructure& st, const Vec2& p,
                                    int period, int scale_depth);

/// lambda_u = exp(-S_n phi_u + n P_u), lambda_s = exp(S_n phi_s - n P_s),
/// with Birkhoff sums taken along the torus orbit.
EigenvaluePair predicted_eigenvalues(const SmoothStructure& st, const Vec2& p,
                                     int period);

/// Diagnostic cross-check of the measure-ratio route: the unstable
/// expansion of g^n at a periodic point estimated by finite differences of
/// the synthesized coordinate along the unstable fiber.
double finite_difference_expansion(const SmoothStructure& st, const Vec2& p,
                                   int period, double step);

/// Representatives of each periodic orbit of exact period n, one point per
/// orbit.
std::vector<Vec2> periodic_orbit_representatives(const ToralAutomorphism& aut,
                                                 int n);

}  // namespace gibbs
