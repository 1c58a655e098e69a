#include "gibbs/potentials.hpp"

#include <algorithm>
#include <cmath>

namespace gibbs {

Potential::Potential(const SubshiftSpec& spec, int depth,
                     std::vector<double> values,
                     std::optional<HolderData> holder)
    : spec_(&spec),
      depth_(depth),
      indexer_(std::make_shared<WordIndexer>(spec, depth)),
      values_(std::move(values)) {
  if (values_.size() != indexer_->count())
    fail(ErrorCode::BadInput,
         "table size does not match admissible word count");
  sup_norm_ = 0.0;
  for (double v : values_) sup_norm_ = std::max(sup_norm_, std::abs(v));
  if (holder) {
    holder_ = *holder;
    if (holder_.beta <= 0.0 || holder_.beta >= 1.0)
      fail(ErrorCode::BadInput, "holder rate must lie in (0,1)");
  } else {
    // Exact table: variations vanish at the table depth, so any rate works.
    holder_ = HolderData{2.0 * sup_norm_, 0.5};
  }
}

Potential Potential::constant(const SubshiftSpec& spec, double value) {
  WordIndexer idx(spec, 1);
  return Potential(spec, 1, std::vector<double>(idx.count(), value),
                   HolderData{0.0, 0.5});
}

double Potential::value(std::span<const Symbol> word) const {
  if (static_cast<int>(word.size()) < depth_)
    fail(ErrorCode::InsufficientDepth,
         "word does not determine a depth-" + std::to_string(depth_) +
             " table value");
  return values_[indexer_->rank(word)];
}

Potential Potential::operator+(double k) const {
  std::vector<double> vals = values_;
  for (double& v : vals) v += k;
  Potential out(*spec_, depth_, std::move(vals), holder_);
  out.sampling_error_ = sampling_error_;
  return out;
}

double birkhoff_sum(const Potential& phi, std::span<const Symbol> word,
                    int n) {
  if (n < 0) fail(ErrorCode::BadInput, "n must be nonnegative");
  const int need = n + phi.depth() - 1;
  if (static_cast<int>(word.size()) < need)
    fail(ErrorCode::InsufficientDepth,
         "word of length " + std::to_string(word.size()) +
             " cannot determine " + std::to_string(n) + " shifted terms");
  double acc = 0.0;
  for (int k = 0; k < n; ++k)
    acc += phi.value(word.subspan(k, phi.depth()));
  return acc;
}

double birkhoff_sum(const Potential& phi, const Word& word, int n) {
  return birkhoff_sum(phi, std::span<const Symbol>(word.symbols), n);
}

double periodic_birkhoff_sum(const Potential& phi,
                             std::span<const Symbol> cycle) {
  const auto& spec = phi.spec();
  const int n = static_cast<int>(cycle.size());
  if (!spec.admissible(cycle.back(), cycle.front()))
    fail(ErrorCode::InadmissibleWord, "cyclic closure not admissible");
  std::vector<Symbol> ext(cycle.begin(), cycle.end());
  for (int i = 0; i < phi.depth() - 1; ++i)
    ext.push_back(cycle[i % n]);
  return birkhoff_sum(phi, ext, n);
}

VariationProfile variation_profile(const Potential& phi, int max_depth) {
  if (max_depth < 1) fail(ErrorCode::BadInput, "max_depth must be >= 1");
  VariationProfile out;
  out.var.assign(max_depth + 1, 0.0);
  const int k = phi.depth();
  const auto& idx = phi.indexer();

  // var_n = max over length-n agreement classes of the value spread. For a
  // depth-k table this is exact and vanishes for n >= k. Words sharing a
  // prefix are contiguous in rank order, so sweep once per level.
  for (int n = 0; n < k && n <= max_depth; ++n) {
    double worst = 0.0;
    if (n == 0) {
      double lo = phi.values()[0], hi = phi.values()[0];
      for (double v : phi.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      worst = hi - lo;
    } else {
      WordIndexer pre(phi.spec(), n);
      for (std::size_t p = 0; p < pre.count(); ++p) {
        Word w = pre.word_at(p);
        auto [first, last] = idx.prefix_range(w.symbols);
        double lo = phi.values()[first], hi = lo;
        for (std::size_t r = first; r < last; ++r) {
          lo = std::min(lo, phi.values()[r]);
          hi = std::max(hi, phi.values()[r]);
        }
        worst = std::max(worst, hi - lo);
      }
    }
    out.var[n] = worst;
  }
  for (double v : out.var) out.total += v;
  out.tail_bound =
      max_depth >= k ? 0.0 : phi.holder().tail(max_depth);
  return out;
}

Potential add_almost_coboundary(const Potential& phi,
                                const TransferFunction& u, double constant) {
  if (!u.is_table())
    fail(ErrorCode::BackendMismatch,
         "transfer function must be a cylinder table here");
  const Potential& ut = *u.table;
  if (&phi.spec() != &ut.spec() &&
      phi.spec().matrix != ut.spec().matrix)
    fail(ErrorCode::BackendMismatch,
         "potential and transfer function live on different shifts");
  const int depth = std::max(phi.depth(), ut.depth() + 1);
  WordIndexer idx(phi.spec(), depth);
  std::vector<double> vals(idx.count());
  for (std::size_t r = 0; r < idx.count(); ++r) {
    Word w = idx.word_at(r);
    std::span<const Symbol> s(w.symbols);
    vals[r] = phi.value(s) + ut.value(s.subspan(1)) - ut.value(s) + constant;
  }
  HolderData h{phi.holder().c + 2.0 * ut.holder().c,
               std::max(phi.holder().beta, ut.holder().beta)};
  Potential out(phi.spec(), depth, std::move(vals), h);
  out.set_sampling_error(phi.sampling_error() + 2.0 * ut.sampling_error());
  return out;
}

ForwardReduction reduce_to_forward(const TwoSidedPotential& phi, int depth,
                                   double tol) {
  if (!phi.spec || !phi.eval) fail(ErrorCode::BadInput, "empty potential");
  if (tol <= 0.0) fail(ErrorCode::BadInput, "tol must be positive");
  const SubshiftSpec& spec = *phi.spec;
  const HolderData h = phi.holder;
  if (h.beta >= 1.0 || h.beta <= 0.0)
    fail(ErrorCode::NonSummableVariation, "variation rate not in (0,1)");

  // Truncation depth N with tail sum_{k>N} c beta^k < tol.
  int series = 1;
  while (h.tail(series) >= tol) {
    ++series;
    if (series > 4096)
      fail(ErrorCode::NonSummableVariation,
           "variation profile does not decay fast enough for tol");
  }
  const double achieved = h.tail(series);

  // Base points: the lexicographically minimal admissible backward extension
  // of each symbol, fixed once per spec.
  const int r = spec.alphabet_size;
  const int back_len = std::max(series + 2, 64);
  std::vector<std::vector<Symbol>> base_bwd(r);
  for (int s = 0; s < r; ++s) {
    std::vector<Symbol> w{static_cast<Symbol>(s)};
    WordIndexer::extend_min_backward(spec, w, back_len);
    // outward order x_{-1}, x_{-2}, ... (the symbol itself is position 0)
    base_bwd[s].assign(w.rbegin() + 1, w.rend());
  }

  // Take y to be the base-retracted point of the word, so u(y) = 0 and
  //   phi+(w) = phi(y) + u(sigma y)
  //          = phi(y) + sum_{k>=0} [phi(sigma^{k+1} y) - phi(sigma^k r(sigma y))].
  // The k-th pair shares its forward part, so the terms decay like var_k.
  WordIndexer idx(spec, depth);
  std::vector<Symbol> ext;
  auto eval_at = [&](std::span<const Symbol> whole, int j, int base_pos) {
    // point with forward part whole[j..] whose backward part runs through
    // whole[j-1],...,whole[base_pos] and then the base coding of
    // whole[base_pos]
    std::vector<Symbol> bwd;
    bwd.reserve(j - base_pos + base_bwd[whole[base_pos]].size());
    for (int i = j - 1; i >= base_pos; --i) bwd.push_back(whole[i]);
    for (Symbol s : base_bwd[whole[base_pos]]) bwd.push_back(s);
    return phi.eval(bwd, whole.subspan(j));
  };

  std::vector<double> vals(idx.count());
  const int need = series + 2;
  for (std::size_t rk = 0; rk < idx.count(); ++rk) {
    Word w = idx.word_at(rk);
    ext = w.symbols;
    WordIndexer::extend_min(spec, ext, need);
    std::span<const Symbol> y(ext);
    double acc = eval_at(y, 0, 0);
    for (int k = 0; k <= series; ++k)
      acc += eval_at(y, k + 1, 0) - eval_at(y, k + 1, 1);
    vals[rk] = acc;
  }

  ForwardReduction out;
  // The reduced potential keeps the rate; the constant doubles from the
  // paired series. Extension beyond the table depth adds a recorded error.
  HolderData hf{2.0 * h.c, h.beta};
  out.forward = Potential(spec, depth, std::move(vals), hf);
  out.forward.set_sampling_error(2.0 * achieved + h.tail(depth - 1));
  out.truncation_error = achieved;
  out.series_depth = series;

  auto eval = phi.eval;
  auto bases = base_bwd;
  int terms = series;
  out.transfer.two_sided = [eval, bases, terms](
                               std::span<const Symbol> bwd,
                               std::span<const Symbol> fwd) {
    // u(y) = sum_{k>=0} [phi(sigma^k y) - phi(sigma^k r(y))]
    double acc = 0.0;
    std::vector<Symbol> rb;
    for (int k = 0; k <= terms; ++k) {
      rb.clear();
      for (int i = k - 1; i >= 0; --i) rb.push_back(fwd[i]);
      for (Symbol s : bases[fwd[0]]) rb.push_back(s);
      std::vector<Symbol> yb;
      for (int i = k - 1; i >= 0; --i) yb.push_back(fwd[i]);
      for (Symbol s : bwd) yb.push_back(s);
      acc += eval(yb, fwd.subspan(k)) - eval(rb, fwd.subspan(k));
    }
    return acc;
  };
  return out;
}

double transverse_cocycle(const Potential& phi, std::span<const Symbol> x,
                          std::span<const Symbol> y, double tol) {
  if (tol <= 0.0) fail(ErrorCode::BadInput, "tol must be positive");
  if (x.size() != y.size())
    fail(ErrorCode::BadInput, "words must have equal length");
  const int len = static_cast<int>(x.size());
  int merge = len;
  for (int i = len; i-- > 0;) {
    if (x[i] != y[i]) break;
    merge = i;
  }
  if (merge == len && len > 0 && x[len - 1] != y[len - 1])
    fail(ErrorCode::NotStableRelated, "forward tails never merge");
  // Terms beyond k = merge are zero for a depth-k table once the table
  // window has crossed the merge point.
  const int k_table = phi.depth();
  const int terms = merge;  // sigma^k differs only for k < merge
  if (terms + k_table - 1 > len)
    fail(ErrorCode::InsufficientDepth,
         "words too short to evaluate the cocycle past the merge point");
  // Terms with k >= merge vanish exactly: both windows sit past the merge
  // point, where the words coincide. The sum below is therefore exact.
  double acc = 0.0;
  for (int k = 0; k < terms; ++k)
    acc += phi.value(y.subspan(k, k_table)) - phi.value(x.subspan(k, k_table));
  return acc;
}

}  // namespace gibbs
