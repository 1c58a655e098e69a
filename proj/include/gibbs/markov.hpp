#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbs/potentials.hpp"
#include "gibbs/sft.hpp"

namespace gibbs {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

using IntMat2 = std::array<std::array<long long, 2>, 2>;

/// A hyperbolic element of GL(2,Z) acting on the torus, with its eigendata.
struct ToralAutomorphism {
  IntMat2 m{};
  long long det = 1;
  double lambda_u = 0.0;  // |lambda_u| > 1, sign kept
  double lambda_s = 0.0;  // |lambda_s| < 1, sign kept
  Vec2 e_u, e_s;          // unit eigenvectors
  double entropy = 0.0;   // log |lambda_u|

  Vec2 apply(const Vec2& p) const;          // mod 1
  Vec2 apply_inverse(const Vec2& p) const;  // mod 1
  /// Plane coordinates from eigenbasis coefficients and back.
  Vec2 to_plane(double u, double s) const;
  std::pair<double, double> to_eigen(const Vec2& p) const;
};

ToralAutomorphism build_automorphism(const IntMat2& m);

/// Axis-aligned half-open box in eigenbasis coordinates:
/// [u0,u1) x [s0,s1). The lower edges are included (boundary convention).
struct EigenBox {
  double u0, u1, s0, s1;
  double u_extent() const { return u1 - u0; }
  double s_extent() const { return s1 - s0; }
};

struct PartitionCheckSummary {
  double cover_failures = 0;        // sampled points not in exactly one box
  double markov_s_deviation = 0;    // worst distance of f(stable bdry) to stable bdry
  double markov_u_deviation = 0;    // same for f^{-1}(unstable bdry)
  bool transitions_match = true;    // realized transitions == matrix
  double strip_tiling_deviation = 0;
  double area_deviation = 0;
  std::size_t samples = 0;
};

/// A Markov partition into parallelogram rectangles, stored axis-aligned in
/// the eigenbasis. Carries the induced subshift, lattice data, the affine
/// transition offsets, and the boundary-segment parameterizations.
struct MarkovPartition {
  ToralAutomorphism aut;
  std::vector<EigenBox> boxes;
  std::shared_ptr<const SubshiftSpec> shift;
  Vec2 z1, z2;  // lattice basis (1,0),(0,1) in eigen coordinates

  // v[a][b]: lattice offset with L(box_a) ∩ (box_b + v) the Markov strip;
  // image coordinates in box_b: u' = lambda_u * u - v.x, s' = lambda_s * s - v.y.
  std::vector<std::vector<Vec2>> pair_offset;

  // Boundary-segment parameterization. side 0 = lower-edge presentation
  // (pi_1), side 1 = upper-edge presentation (pi_2): a box-b point at local
  // coordinate u sits on tau_u at parameter t = u + tau_offset[side][b].
  std::array<std::vector<double>, 2> tau_offset;
  double t_min = 0.0, t_max = 0.0;

  // Frozen backward base codings per symbol and side (outward order).
  std::array<std::vector<std::vector<Symbol>>, 2> base_backward;

  PartitionCheckSummary build_checks;

  int symbols() const { return static_cast<int>(boxes.size()); }
  const SubshiftSpec& sft() const { return *shift; }

  /// Reduce a point in eigen coordinates into its half-open box.
  /// side_below selects the limit-from-below membership used by pi_2.
  struct Located {
    int box;
    double u, s;
  };
  Located locate(double u, double s, bool side_below = false) const;
  Located locate_point(const Vec2& torus_point, bool side_below = false) const;

  /// The partition for the inverse dynamics with stable/unstable exchanged.
  /// tau_u of the transposed partition is tau_s of this one.
  MarkovPartition transposed() const;
};

/// Built-in Adler-Weiss construction for [[2,1],[1,1]] and its powers.
MarkovPartition catmap_partition(const ToralAutomorphism& aut);

/// Assemble and verify a partition from explicit boxes and transition data
/// (the partition-file route; also used by the built-in constructor).
MarkovPartition build_partition(const ToralAutomorphism& aut,
                                std::vector<EigenBox> boxes,
                                const Matrix01& transition);

PartitionCheckSummary check_partition(const MarkovPartition& part,
                                      std::size_t samples, double tol,
                                      std::uint64_t seed = 20240ull);

/// Itinerary of a torus point: forward word x_0..x_n and backward word
/// x_{-1}..x_{-n} (outward order).
struct Itinerary {
  std::vector<Symbol> forward;
  std::vector<Symbol> backward;
};

Itinerary encode_point(const MarkovPartition& part, const Vec2& p, int n);

struct DecodedPoint {
  Vec2 point;
  double radius;  // Euclidean bound on the cylinder half-diameter
  double u, s;    // eigen coordinates (box-local, reduced)
  int box;
};

DecodedPoint decode_word(const MarkovPartition& part,
                         std::span<const Symbol> backward,
                         std::span<const Symbol> forward);

/// All solutions of L^n x = x (mod 1); count equals |det(L^n - I)|.
std::vector<Vec2> torus_periodic_points(const ToralAutomorphism& aut, int n);

/// An unstable fiber: the horizontal slice of a rectangle at height s.
struct UnstableFiber {
  int box;
  double s;
};

/// Projection along local stable leaves between two unstable fibers.
Vec2 stable_holonomy(const MarkovPartition& part, const UnstableFiber& from,
                     const UnstableFiber& to, const Vec2& point);

/// Coding of the unstable boundary segment by one-sided words: cylinder
/// images are intervals computed by exact affine chains.
class SegmentCoding {
 public:
  SegmentCoding(const MarkovPartition& part, int side);  // 0=pi1, 1=pi2

  struct Interval {
    double lo, hi;
    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
  };

  const MarkovPartition& partition() const { return *part_; }
  int side() const { return side_; }
  double t_min() const { return part_->t_min; }
  double t_max() const { return part_->t_max; }
  double total_length() const { return part_->t_max - part_->t_min; }

  Interval box_interval(Symbol b) const { return J_[b]; }
  /// Segment interval of the cylinder of a forward word.
  Interval cylinder_interval(std::span<const Symbol> word) const;
  /// Symbolic itinerary of the segment point at parameter t.
  std::vector<Symbol> encode_parameter(double t, int depth) const;
  /// Torus point on the segment at parameter t.
  Vec2 point_at(double t) const;

 private:
  const MarkovPartition* part_;
  int side_;
  std::vector<Interval> J_;
  std::vector<std::vector<double>> c_;  // affine offset per admissible pair
};

/// Sample a trigonometric polynomial on the torus through the coding,
/// producing a two-sided shift potential with measured Holder data.
struct TrigPolynomial {
  struct Term {
    int m = 0, n = 0;
    double cos_coeff = 0.0, sin_coeff = 0.0;
  };
  std::vector<Term> terms;

  double eval(const Vec2& p) const;
  double sup_bound() const;
  double lipschitz_bound() const;
  /// Exact composition with an integer matrix: frequencies map by L^T.
  TrigPolynomial compose_with(const IntMat2& m) const;
  TrigPolynomial operator+(const TrigPolynomial& other) const;
  TrigPolynomial operator*(double scale) const;
};

TwoSidedPotential torus_potential(const MarkovPartition& part,
                                  const TrigPolynomial& poly);

/// Locally constant forward approximation at `depth` (reduction included).
ForwardReduction sample_forward_potential(const MarkovPartition& part,
                                          const TrigPolynomial& poly,
                                          int depth, double tol);

}  // namespace gibbs
