#include "gibbs/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gibbs {

double GibbsMeasure::mass(std::span<const Symbol> word) const {
  if (static_cast<int>(word.size()) > depth)
    fail(ErrorCode::InsufficientDepth,
         "cylinder deeper than materialized depth");
  auto [first, last] = indexer->prefix_range(word);
  double acc = 0.0;
  for (std::size_t r = first; r < last; ++r) acc += masses[r];
  return acc;
}

double GibbsMeasure::deep_mass(std::span<const Symbol> word) const {
  double log_factor = 0.0;
  std::size_t pos = 0;
  while (word.size() - pos > static_cast<std::size_t>(depth)) {
    log_factor += potential.value(word.subspan(pos)) - pressure;
    ++pos;
  }
  return std::exp(log_factor) * mass(word.subspan(pos));
}

std::vector<double> transfer_apply(const SubshiftSpec& spec,
                                   const Potential& phi,
                                   const std::vector<double>& g, int m) {
  const int k = phi.depth();
  if (m < std::max(k - 1, 1))
    fail(ErrorCode::BadInput, "depth mismatch: need m >= potential depth - 1");
  WordIndexer idx(spec, m);
  if (g.size() != idx.count())
    fail(ErrorCode::BadInput, "table size does not match depth");
  std::vector<double> out(idx.count(), 0.0);
  std::vector<Symbol> jw(m + 1);
  for (std::size_t r = 0; r < idx.count(); ++r) {
    Word w = idx.word_at(r);
    std::copy(w.symbols.begin(), w.symbols.end(), jw.begin() + 1);
    double acc = 0.0;
    for (int j = 0; j < spec.alphabet_size; ++j) {
      if (!spec.admissible(static_cast<Symbol>(j), w.symbols[0])) continue;
      jw[0] = static_cast<Symbol>(j);
      std::span<const Symbol> s(jw);
      acc += std::exp(phi.value(s)) * g[idx.rank(s.first(m))];
    }
    out[r] = acc;
  }
  return out;
}

std::vector<double> transfer_adjoint_apply(const SubshiftSpec& spec,
                                           const Potential& phi,
                                           const std::vector<double>& nu,
                                           int m) {
  const int k = phi.depth();
  if (m < k)
    fail(ErrorCode::BadInput, "depth mismatch: need m >= potential depth");
  WordIndexer idx(spec, m);
  if (nu.size() != idx.count())
    fail(ErrorCode::BadInput, "table size does not match depth");
  std::vector<double> out(idx.count(), 0.0);
  std::vector<Symbol> shifted(m);
  for (std::size_t r = 0; r < idx.count(); ++r) {
    Word w = idx.word_at(r);
    std::copy(w.symbols.begin() + 1, w.symbols.end(), shifted.begin());
    double acc = 0.0;
    for (int a = 0; a < spec.alphabet_size; ++a) {
      if (!spec.admissible(w.symbols.back(), static_cast<Symbol>(a))) continue;
      shifted[m - 1] = static_cast<Symbol>(a);
      acc += nu[idx.rank(shifted)];
    }
    out[r] = std::exp(phi.value(w.symbols)) * acc;
  }
  return out;
}

namespace {

struct EigenResult {
  std::vector<double> vec;  // L1-normalized, positive
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Sparse form of one transfer step at a fixed depth: iterations then cost
// O(count * branching) instead of re-ranking every word.
struct SparseOp {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> cols;
  std::vector<double> weights;
  std::size_t rows = 0;

  std::vector<double> apply(const std::vector<double>& v) const {
    std::vector<double> out(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (std::size_t e = offsets[r]; e < offsets[r + 1]; ++e)
        acc += weights[e] * v[cols[e]];
      out[r] = acc;
    }
    return out;
  }
};

SparseOp build_sparse(const SubshiftSpec& spec, const Potential& phi, int m,
                      bool adjoint) {
  WordIndexer idx(spec, m);
  SparseOp op;
  op.rows = idx.count();
  op.offsets.reserve(op.rows + 1);
  op.offsets.push_back(0);
  std::vector<Symbol> buf(m + 1);
  for (std::size_t r = 0; r < op.rows; ++r) {
    Word w = idx.word_at(r);
    if (adjoint) {
      const double weight = std::exp(phi.value(w.symbols));
      std::copy(w.symbols.begin() + 1, w.symbols.end(), buf.begin());
      for (int a = 0; a < spec.alphabet_size; ++a) {
        if (!spec.admissible(w.symbols.back(), Symbol(a))) continue;
        buf[m - 1] = Symbol(a);
        op.cols.push_back(idx.rank(std::span<const Symbol>(buf.data(), m)));
        op.weights.push_back(weight);
      }
    } else {
      std::copy(w.symbols.begin(), w.symbols.end(), buf.begin() + 1);
      for (int j = 0; j < spec.alphabet_size; ++j) {
        if (!spec.admissible(Symbol(j), w.symbols.front())) continue;
        buf[0] = Symbol(j);
        std::span<const Symbol> s(buf);
        op.cols.push_back(idx.rank(s.first(m)));
        op.weights.push_back(std::exp(phi.value(s)));
      }
    }
    op.offsets.push_back(op.cols.size());
  }
  return op;
}

EigenResult iterate_to_eigen(
    const SubshiftSpec& spec, const Potential& phi, int m, bool adjoint,
    std::vector<double> start, double tol) {
  const SparseOp op = build_sparse(spec, phi, m, adjoint);
  double norm0 = std::accumulate(start.begin(), start.end(), 0.0);
  for (double& v : start) v /= norm0;
  EigenResult res;
  res.vec = std::move(start);
  double best_diff = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  for (int it = 0; it < kPowerIterationCap; ++it) {
    std::vector<double> next = op.apply(res.vec);
    const double norm = std::accumulate(next.begin(), next.end(), 0.0);
    for (double& v : next) v /= norm;
    double diff = 0.0, vmax = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      diff = std::max(diff, std::abs(next[i] - res.vec[i]));
      vmax = std::max(vmax, next[i]);
    }
    res.vec.swap(next);
    res.lambda = norm;
    res.iterations = it + 1;
    if (it > 4 && diff <= tol * vmax) break;
    if (diff < 0.5 * best_diff) {
      best_diff = diff;
      stagnant = 0;
    } else if (++stagnant > 50) {
      break;  // rounding floor reached; the residual check decides
    }
  }
  // residual in the scale of the eigenvalue equation
  std::vector<double> img = op.apply(res.vec);
  double worst = 0.0, vmax = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    worst = std::max(worst, std::abs(img[i] - res.lambda * res.vec[i]));
    vmax = std::max(vmax, res.vec[i]);
  }
  res.residual = worst / (res.lambda * vmax);
  return res;
}

double pressure_at_depth(const SubshiftSpec& spec, const Potential& phi,
                         int m, double tol, double* residual) {
  WordIndexer idx(spec, m);
  EigenResult res = iterate_to_eigen(spec, phi, m, /*adjoint=*/false,
                                     std::vector<double>(idx.count(), 1.0),
                                     tol);
  if (residual) *residual = res.residual;
  if (res.residual > 1e-9)
    fail(ErrorCode::NoConvergence, "transfer operator iteration stalled");
  return std::log(res.lambda);
}

}  // namespace

PressureResult pressure(const SubshiftSpec& spec, const Potential& phi,
                        int depth, double tol) {
  const int m = std::max({depth, phi.depth(), 1});
  double res_m = 0.0, res_m1 = 0.0;
  const double p_m = pressure_at_depth(spec, phi, m, tol, &res_m);
  const double p_m1 = pressure_at_depth(spec, phi, m + 1, tol, &res_m1);
  PressureResult out;
  out.value = p_m1;
  out.depth = m + 1;
  // Depth consistency plus spectral residuals plus the variation tail the
  // table cannot see. For exact tables the tail is zero and the bound is
  // numerical noise.
  const double tail = phi.depth() <= m ? 0.0 : phi.holder().tail(m);
  out.error_bound = std::abs(p_m1 - p_m) + res_m + res_m1 + tail +
                    phi.sampling_error();
  return out;
}

GibbsMeasure brs_measure(const SubshiftSpec& spec, const Potential& phi,
                         int depth) {
  if (depth < phi.depth())
    fail(ErrorCode::InsufficientDepth,
         "measure depth must be at least the potential depth");
  WordIndexer idx(spec, depth);
  EigenResult res = iterate_to_eigen(spec, phi, depth, /*adjoint=*/true,
                                     std::vector<double>(idx.count(), 1.0),
                                     1e-16);
  GibbsMeasure mu;
  mu.spec = &spec;
  mu.potential = phi;
  mu.pressure = std::log(res.lambda);
  mu.depth = depth;
  mu.indexer = std::make_shared<WordIndexer>(spec, depth);
  mu.masses = std::move(res.vec);
  mu.kind = GibbsMeasure::Kind::BrsEigenmeasure;
  mu.iteration_residual = res.residual;
  mu.certified = res.residual < 1e-9;
  return mu;
}

InvariantNormalization invariant_normalization(const SubshiftSpec& spec,
                                               const Potential& phi,
                                               int depth) {
  const int k = std::max(phi.depth(), 1);
  WordIndexer idx(spec, k);
  EigenResult h = iterate_to_eigen(spec, phi, k, /*adjoint=*/false,
                                   std::vector<double>(idx.count(), 1.0),
                                   1e-16);
  const double pressure_value = std::log(h.lambda);

  // phi'(w) = phi(w) + log h(w) - log h(sigma w) - P over (k+1)-words.
  WordIndexer idx1(spec, k + 1);
  std::vector<double> vals(idx1.count());
  for (std::size_t r = 0; r < idx1.count(); ++r) {
    Word w = idx1.word_at(r);
    std::span<const Symbol> s(w.symbols);
    vals[r] = phi.value(s) + std::log(h.vec[idx.rank(s)]) -
              std::log(h.vec[idx.rank(s.subspan(1))]) - pressure_value;
  }
  double max_val = -std::numeric_limits<double>::infinity();
  for (double v : vals) max_val = std::max(max_val, v);
  if (max_val > 1e-10)
    fail(ErrorCode::PositivityFailure,
         "normalized potential is positive at working depth (max " +
             std::to_string(max_val) + ")");

  InvariantNormalization out;
  out.phi_prime =
      Potential(spec, k + 1, std::move(vals),
                HolderData{phi.holder().c * 3.0, phi.holder().beta});
  out.phi_prime.set_sampling_error(phi.sampling_error());
  out.log_h.resize(idx.count());
  for (std::size_t r = 0; r < idx.count(); ++r)
    out.log_h[r] = std::log(h.vec[r]);
  out.invariant = brs_measure(spec, out.phi_prime, std::max(depth, k + 1));
  out.invariant.kind = GibbsMeasure::Kind::Invariant;
  out.invariant.pressure = 0.0;  // exact by construction; iteration confirms
  out.invariant.eigenfunction = std::vector<double>(h.vec);
  out.expansion_constant = std::exp(-max_val);
  return out;
}

RatioReport local_uniqueness_check(const GibbsMeasure& reference,
                                   const std::vector<std::size_t>& v_ranks,
                                   const std::vector<double>& candidate) {
  if (v_ranks.size() != candidate.size() || v_ranks.empty())
    fail(ErrorCode::BadInput, "candidate must cover the cylinder union");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v_ranks.size(); ++i) {
    num += candidate[i];
    den += reference.mass_at_rank(v_ranks[i]);
  }
  RatioReport rep;
  rep.constant = num / den;
  rep.cylinders = v_ranks.size();
  for (std::size_t i = 0; i < v_ranks.size(); ++i) {
    const double ratio = candidate[i] / reference.mass_at_rank(v_ranks[i]);
    rep.max_deviation =
        std::max(rep.max_deviation, std::abs(ratio / rep.constant - 1.0));
  }
  return rep;
}

}  // namespace gibbs
