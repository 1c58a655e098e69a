#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gibbs/charts.hpp"

namespace gibbs {

/// Outcome of one property check. pass holds exactly when the worst observed
/// deviation is within the bound; both are finite and reported verbatim.
struct CheckReport {
  std::string name;
  bool pass = false;
  double worst_deviation = 0.0;
  double bound = 0.0;
  std::size_t samples = 0;
  std::string params;

  static CheckReport make(std::string name, double deviation, double bound,
                          std::size_t samples, std::string params);
};

/// Periodic Birkhoff sums of the two potentials agree through max_period.
CheckReport livshitz_check(const SubshiftSpec& spec, const Potential& phi,
                           const Potential& psi, int max_period,
                           double tol = 1e-9);

/// Mass ratios of words with a common shifted tail reproduce the finite
/// Birkhoff difference (the one-sided Gibbs property).
CheckReport gibbs_onesided_check(const GibbsMeasure& measure,
                                 std::size_t samples,
                                 std::uint64_t seed = 7001);

/// Interval-mass ratios under stable holonomy match exp(Phi+) within a
/// depth-controlled bound; also replays the one-step cocycle identity.
CheckReport holonomy_rn_check(const BoundaryMeasure& side, std::size_t pairs,
                              int word_depth, std::uint64_t seed = 7002);

/// The three geometry inequalities for the cylinder-interval partitions of
/// the boundary segment in the maximal-entropy metric: exponentially
/// decreasing, bounded ratio, bounded nearby.
std::array<CheckReport, 3> partition_geometry_check(
    const MarkovPartition& part, int max_depth);

/// Empirical quasisymmetry constant of the identity map between the
/// maximal-entropy metric and the synthesized metric, against the
/// theoretical bound computed from the measured constants.
CheckReport quasisymmetry_check(const MarkovPartition& part,
                                const PotentialInput& phi, int depth,
                                int level_lo = 3, int level_hi = -1);

/// Mass of delta-neighborhoods of the partition boundary under the invariant
/// measure, decreasing in delta and below the configured threshold.
CheckReport boundary_mass_check(const MarkovPartition& part,
                                const PotentialInput& phi, int depth,
                                const std::vector<double>& deltas,
                                double threshold);

/// Variational principle: every candidate invariant measure has nonnegative
/// pressure deficit; the equilibrium state meets the bound.
CheckReport variational_check(const SubshiftSpec& spec, const Potential& phi,
                              int depth, int max_period, double tol);

/// The full default suite on a partition with a pair of side potentials.
std::vector<CheckReport> run_verify_suite(
    std::shared_ptr<const MarkovPartition> part, const PotentialInput& phi_u,
    const PotentialInput& phi_s, int depth, std::uint64_t seed);

std::string report_json_line(const CheckReport& rep);

}  // namespace gibbs
