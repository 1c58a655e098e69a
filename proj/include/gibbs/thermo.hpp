#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gibbs/potentials.hpp"

namespace gibbs {

/// A Gibbs measure materialized as cylinder masses at a working depth.
/// Masses are positive and sum to one; prefix masses are contiguous range
/// sums because word ranks are lexicographic.
struct GibbsMeasure {
  enum class Kind { BrsEigenmeasure, Invariant };

  const SubshiftSpec* spec = nullptr;
  Potential potential;     // the potential the measure was built from
  double pressure = 0.0;
  int depth = 0;
  std::shared_ptr<const WordIndexer> indexer;
  std::vector<double> masses;                      // over depth-words
  std::optional<std::vector<double>> eigenfunction; // h, when invariant-normalized
  Kind kind = Kind::BrsEigenmeasure;
  bool certified = true;
  double iteration_residual = 0.0;

  double mass_at_rank(std::size_t rank) const { return masses[rank]; }
  /// Mass of the cylinder of any word of length <= depth.
  double mass(std::span<const Symbol> word) const;
  double mass(const Word& word) const { return mass(std::span<const Symbol>(word.symbols)); }
  /// Mass of a cylinder of any length: words deeper than the materialized
  /// depth are priced by the defining Radon-Nikodym recursion, which is
  /// exact for a table potential.
  double deep_mass(std::span<const Symbol> word) const;
};

/// One application of the transfer operator L_phi to a table g over length-m
/// words: (L g)(w) = sum over admissible prepends j of e^{phi(jw)} g((jw)
/// truncated to m symbols). Requires m >= phi.depth() - 1.
std::vector<double> transfer_apply(const SubshiftSpec& spec,
                                   const Potential& phi,
                                   const std::vector<double>& g, int m);

/// Adjoint action on cylinder masses at depth m:
/// (L* nu)(w) = e^{phi(w)} sum over admissible appends a of nu(w_1..w_{m-1} a).
std::vector<double> transfer_adjoint_apply(const SubshiftSpec& spec,
                                           const Potential& phi,
                                           const std::vector<double>& nu,
                                           int m);

struct PressureResult {
  double value = 0.0;
  double error_bound = 0.0;
  int depth = 0;
};

PressureResult pressure(const SubshiftSpec& spec, const Potential& phi,
                        int depth, double tol = 1e-13);

GibbsMeasure brs_measure(const SubshiftSpec& spec, const Potential& phi,
                         int depth);

struct InvariantNormalization {
  Potential phi_prime;        // phi + log h - log h o sigma - P, pressure zero
  std::vector<double> log_h;  // over words of phi.depth()
  GibbsMeasure invariant;
  double expansion_constant;  // min over words of exp(-phi')
};

/// Prop-2 normalization. Throws PositivityFailure when phi' exceeds zero
/// beyond rounding at the working depth. exp(-phi') can equal 1 exactly on
/// shifts where a symbol has a unique admissible predecessor (e.g. the
/// golden-mean shift); the expansion constant reports the true minimum.
InvariantNormalization invariant_normalization(const SubshiftSpec& spec,
                                               const Potential& phi,
                                               int depth);

struct RatioReport {
  double constant = 0.0;       // fitted constant ratio
  double max_deviation = 0.0;  // max |ratio/constant - 1| over cylinders
  std::size_t cylinders = 0;
};

/// Compares a candidate measure, given as masses over a cylinder union V at
/// the measure's depth, against the BRS measure of phi restricted to V.
RatioReport local_uniqueness_check(const GibbsMeasure& reference,
                                   const std::vector<std::size_t>& v_ranks,
                                   const std::vector<double>& candidate);

}  // namespace gibbs
