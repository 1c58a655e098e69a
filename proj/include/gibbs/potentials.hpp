#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gibbs/sft.hpp"

namespace gibbs {

/// Holder regularity metadata: var_n <= c * beta^n.
struct HolderData {
  double c = 0.0;
  double beta = 0.5;

  double tail(int n) const {
    // sum_{k > n} c beta^k
    return c * std::pow(beta, n + 1) / (1.0 - beta);
  }
};

struct VariationProfile {
  std::vector<double> var;  // var_0 .. var_max_depth
  double total = 0.0;       // sum of computed var_n
  double tail_bound = 0.0;  // bound on the uncomputed tail
};

/// A Holder potential on the one-sided shift, stored as a cylinder table of
/// fixed depth. Values are attached to admissible words of length `depth`;
/// evaluation on a longer word reads its prefix. Potentials sampled from
/// torus functions carry their Holder metadata and sampling error.
class Potential {
 public:
  Potential() = default;
  Potential(const SubshiftSpec& spec, int depth, std::vector<double> values,
            std::optional<HolderData> holder = std::nullopt);

  static Potential constant(const SubshiftSpec& spec, double value);

  const SubshiftSpec& spec() const { return *spec_; }
  int depth() const { return depth_; }
  const WordIndexer& indexer() const { return *indexer_; }
  const std::vector<double>& values() const { return values_; }

  double value(std::span<const Symbol> word) const;
  double value_at_rank(std::size_t rank) const { return values_[rank]; }

  double sup_norm() const { return sup_norm_; }
  const HolderData& holder() const { return holder_; }

  /// Recorded bound on |table - true function| for sampled backends; zero
  /// for exact tables.
  double sampling_error() const { return sampling_error_; }
  void set_sampling_error(double e) { sampling_error_ = e; }

  Potential operator+(double k) const;
  bool same_spec(const Potential& other) const { return spec_ == other.spec_; }

 private:
  const SubshiftSpec* spec_ = nullptr;
  int depth_ = 0;
  std::shared_ptr<const WordIndexer> indexer_;
  std::vector<double> values_;
  double sup_norm_ = 0.0;
  HolderData holder_;
  double sampling_error_ = 0.0;
};

/// Transfer function of a coboundary. Either a cylinder table (shared
/// representation with Potential) or a two-sided evaluator produced by the
/// forward reduction.
struct TransferFunction {
  std::optional<Potential> table;
  std::function<double(std::span<const Symbol> bwd, std::span<const Symbol> fwd)>
      two_sided;

  bool is_table() const { return table.has_value(); }
};

/// A potential on the two-sided shift, presented as an evaluator over
/// (backward, forward) word pairs. bwd lists x_{-1}, x_{-2}, ... outward.
struct TwoSidedPotential {
  const SubshiftSpec* spec = nullptr;
  std::function<double(std::span<const Symbol> bwd, std::span<const Symbol> fwd)>
      eval;
  HolderData holder;
  double sup_norm = 0.0;
};

/// S_n phi along the word: sum of phi over the first n shifts. The word must
/// determine every term (length >= n + depth - 1).
double birkhoff_sum(const Potential& phi, std::span<const Symbol> word, int n);
double birkhoff_sum(const Potential& phi, const Word& word, int n);

/// Birkhoff sum of phi around a periodic cycle given by a periodic word.
double periodic_birkhoff_sum(const Potential& phi,
                             std::span<const Symbol> cycle);

VariationProfile variation_profile(const Potential& phi, int max_depth);

/// phi + u o sigma - u + K. For a table u of depth k the result has depth
/// max(phi.depth, k + 1).
Potential add_almost_coboundary(const Potential& phi,
                                const TransferFunction& u, double constant);

struct ForwardReduction {
  Potential forward;       // cohomologous, depends on forward symbols only
  TransferFunction transfer;
  double truncation_error; // series tail bound actually achieved
  int series_depth;        // number of terms used
};

/// Bowen's forward reduction: returns phi+ = phi + u o sigma - u depending
/// only on forward coordinates, as a table at `depth`. The retraction uses
/// the lexicographically minimal admissible backward extension as the base
/// point of each symbol.
ForwardReduction reduce_to_forward(const TwoSidedPotential& phi, int depth,
                                   double tol);

/// Transverse cocycle Phi(x -> y) = sum_{k>=0} (phi(sigma^k y) - phi(sigma^k x))
/// for forward words that agree from some index on (stable-related points).
double transverse_cocycle(const Potential& phi, std::span<const Symbol> x,
                          std::span<const Symbol> y, double tol);

}  // namespace gibbs
