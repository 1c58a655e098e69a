#include "gibbs/sft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace gibbs {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotMixing: return "NotMixing";
    case ErrorCode::ZeroRowOrColumn: return "ZeroRowOrColumn";
    case ErrorCode::DepthTooLarge: return "DepthTooLarge";
    case ErrorCode::InsufficientDepth: return "InsufficientDepth";
    case ErrorCode::BackendMismatch: return "BackendMismatch";
    case ErrorCode::NonSummableVariation: return "NonSummableVariation";
    case ErrorCode::NotStableRelated: return "NotStableRelated";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::UnsupportedMatrix: return "UnsupportedMatrix";
    case ErrorCode::MarkovPropertyViolation: return "MarkovPropertyViolation";
    case ErrorCode::InadmissibleWord: return "InadmissibleWord";
    case ErrorCode::NotHolonomyRelated: return "NotHolonomyRelated";
    case ErrorCode::PositivityFailure: return "PositivityFailure";
    case ErrorCode::OrderingFailure: return "OrderingFailure";
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::NoConvergence: return "NoConvergence";
  }
  return "Unknown";
}

bool SubshiftSpec::admissible_word(std::span<const Symbol> w) const {
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (!admissible(w[i], w[i + 1])) return false;
  }
  for (Symbol s : w) {
    if (s >= alphabet_size) return false;
  }
  return true;
}

std::string Word::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) os << ',';
    os << int(symbols[i]);
  }
  return os.str();
}

namespace {

Matrix01 bool_multiply(const Matrix01& a, const Matrix01& b) {
  const int r = static_cast<int>(a.size());
  Matrix01 c(r, std::vector<int>(r, 0));
  for (int i = 0; i < r; ++i) {
    for (int k = 0; k < r; ++k) {
      if (!a[i][k]) continue;
      for (int j = 0; j < r; ++j) {
        if (b[k][j]) c[i][j] = 1;
      }
    }
  }
  return c;
}

bool all_positive(const Matrix01& m) {
  for (const auto& row : m) {
    for (int v : row) {
      if (!v) return false;
    }
  }
  return true;
}

// Deterministic power iteration from the all-ones vector. Returns the
// dominant eigenvalue; `vec` holds the normalized eigenvector.
double power_iteration(const Matrix01& a, bool left,
                       std::vector<double>& vec) {
  const int r = static_cast<int>(a.size());
  vec.assign(r, 1.0);
  std::vector<double> next(r, 0.0);
  double lambda = 0.0;
  for (int it = 0; it < kPowerIterationCap; ++it) {
    for (int i = 0; i < r; ++i) {
      double acc = 0.0;
      for (int j = 0; j < r; ++j) {
        const int entry = left ? a[j][i] : a[i][j];
        if (entry) acc += vec[j];
      }
      next[i] = acc;
    }
    double norm = 0.0;
    for (double v : next) norm += std::abs(v);
    if (norm == 0.0) fail(ErrorCode::NotMixing, "transition matrix collapsed");
    for (int i = 0; i < r; ++i) next[i] /= norm;
    double diff = 0.0;
    for (int i = 0; i < r; ++i) diff = std::max(diff, std::abs(next[i] - vec[i]));
    vec.swap(next);
    lambda = norm;
    if (diff < 1e-16 && it > 4) break;
  }
  return lambda;
}

double residual_inf(const Matrix01& a, bool left, double lambda,
                    const std::vector<double>& vec) {
  const int r = static_cast<int>(a.size());
  double worst = 0.0;
  double vmax = 0.0;
  for (int i = 0; i < r; ++i) {
    double acc = 0.0;
    for (int j = 0; j < r; ++j) {
      const int entry = left ? a[j][i] : a[i][j];
      if (entry) acc += vec[j];
    }
    worst = std::max(worst, std::abs(acc - lambda * vec[i]));
    vmax = std::max(vmax, std::abs(vec[i]));
  }
  return worst / vmax;
}

}  // namespace

SubshiftSpec build_sft(const Matrix01& matrix) {
  const int r = static_cast<int>(matrix.size());
  if (r < 2) fail(ErrorCode::BadInput, "alphabet size must be at least 2");
  if (r > 255) fail(ErrorCode::BadInput, "alphabet size must fit one byte");
  for (const auto& row : matrix) {
    if (static_cast<int>(row.size()) != r)
      fail(ErrorCode::BadInput, "transition matrix must be square");
    for (int v : row) {
      if (v != 0 && v != 1)
        fail(ErrorCode::BadInput, "transition matrix entries must be 0 or 1");
    }
  }
  for (int i = 0; i < r; ++i) {
    bool row_ok = false, col_ok = false;
    for (int j = 0; j < r; ++j) {
      row_ok |= matrix[i][j] != 0;
      col_ok |= matrix[j][i] != 0;
    }
    if (!row_ok || !col_ok)
      fail(ErrorCode::ZeroRowOrColumn,
           "symbol " + std::to_string(i) + " has no transition");
  }

  SubshiftSpec spec;
  spec.matrix = matrix;
  spec.alphabet_size = r;

  Matrix01 pow = matrix;
  int m = 1;
  while (!all_positive(pow)) {
    if (m >= kMixingSearchCap)
      fail(ErrorCode::NotMixing,
           "no power up to " + std::to_string(kMixingSearchCap) +
               " is strictly positive");
    pow = bool_multiply(pow, matrix);
    ++m;
  }
  spec.mixing_time = m;

  spec.pf_eigenvalue = power_iteration(matrix, /*left=*/false, spec.pf_right);
  power_iteration(matrix, /*left=*/true, spec.pf_left);
  spec.entropy = std::log(spec.pf_eigenvalue);

  const double res_r =
      residual_inf(matrix, false, spec.pf_eigenvalue, spec.pf_right);
  const double res_l =
      residual_inf(matrix, true, spec.pf_eigenvalue, spec.pf_left);
  if (res_r > 1e-12 || res_l > 1e-12)
    fail(ErrorCode::NoConvergence, "power iteration residual above 1e-12");
  return spec;
}

std::uint64_t count_words(const SubshiftSpec& spec, int n) {
  const int r = spec.alphabet_size;
  std::vector<std::uint64_t> cnt(r, 1);
  for (int k = 1; k < n; ++k) {
    std::vector<std::uint64_t> next(r, 0);
    for (int s = 0; s < r; ++s) {
      std::uint64_t acc = 0;
      for (int t = 0; t < r; ++t) {
        if (spec.matrix[s][t]) acc += cnt[t];
      }
      next[s] = acc;
    }
    cnt.swap(next);
  }
  return std::accumulate(cnt.begin(), cnt.end(), std::uint64_t{0});
}

WordIndexer::WordIndexer(const SubshiftSpec& spec, int depth, std::size_t cap)
    : spec_(&spec), depth_(depth) {
  if (depth < 1) fail(ErrorCode::BadInput, "depth must be >= 1");
  const int r = spec.alphabet_size;
  counts_.assign(depth + 1, std::vector<std::uint64_t>(r, 0));
  for (int s = 0; s < r; ++s) counts_[1][s] = 1;
  for (int k = 2; k <= depth; ++k) {
    for (int s = 0; s < r; ++s) {
      std::uint64_t acc = 0;
      for (int t = 0; t < r; ++t) {
        if (spec.matrix[s][t]) acc += counts_[k - 1][t];
      }
      counts_[k][s] = acc;
    }
  }
  count_ = 0;
  for (int s = 0; s < r; ++s) count_ += counts_[depth][s];
  if (count_ > cap)
    fail(ErrorCode::DepthTooLarge,
         "word count " + std::to_string(count_) + " exceeds cap " +
             std::to_string(cap));
}

std::size_t WordIndexer::rank(std::span<const Symbol> word) const {
  if (static_cast<int>(word.size()) < depth_)
    fail(ErrorCode::BadInput, "word shorter than indexer depth");
  const int r = spec_->alphabet_size;
  std::uint64_t rank = 0;
  for (int i = 0; i < depth_; ++i) {
    const Symbol w = word[i];
    if (w >= r) fail(ErrorCode::InadmissibleWord, "symbol out of range");
    if (i > 0 && !spec_->admissible(word[i - 1], w))
      fail(ErrorCode::InadmissibleWord, "inadmissible transition in word");
    for (Symbol s = 0; s < w; ++s) {
      if (i == 0 || spec_->admissible(word[i - 1], s))
        rank += counts_[depth_ - i][s];
    }
  }
  return static_cast<std::size_t>(rank);
}

void WordIndexer::unrank(std::size_t rank_in, std::span<Symbol> out) const {
  std::uint64_t rank = rank_in;
  const int r = spec_->alphabet_size;
  for (int i = 0; i < depth_; ++i) {
    Symbol chosen = 0;
    bool found = false;
    for (Symbol s = 0; s < r; ++s) {
      if (i > 0 && !spec_->admissible(out[i - 1], s)) continue;
      const std::uint64_t c = counts_[depth_ - i][s];
      if (rank < c) {
        chosen = s;
        found = true;
        break;
      }
      rank -= c;
    }
    if (!found) fail(ErrorCode::BadInput, "rank out of range");
    out[i] = chosen;
  }
}

Word WordIndexer::word_at(std::size_t rank) const {
  Word w;
  w.symbols.resize(depth_);
  unrank(rank, w.symbols);
  return w;
}

std::pair<std::size_t, std::size_t> WordIndexer::prefix_range(
    std::span<const Symbol> prefix) const {
  const int m = static_cast<int>(prefix.size());
  if (m > depth_) fail(ErrorCode::BadInput, "prefix longer than depth");
  const int r = spec_->alphabet_size;
  std::uint64_t first = 0;
  for (int i = 0; i < m; ++i) {
    for (Symbol s = 0; s < prefix[i]; ++s) {
      if (i == 0 || spec_->admissible(prefix[i - 1], s))
        first += counts_[depth_ - i][s];
    }
  }
  std::uint64_t width = 0;
  if (m == 0) {
    width = count_;
  } else if (m == depth_) {
    width = 1;
  } else {
    // number of admissible completions of the prefix
    std::vector<std::uint64_t> cnt(r, 0);
    for (int t = 0; t < r; ++t)
      if (spec_->admissible(prefix[m - 1], t)) width += counts_[depth_ - m][t];
  }
  return {static_cast<std::size_t>(first),
          static_cast<std::size_t>(first + width)};
}

void WordIndexer::extend_min(const SubshiftSpec& spec,
                             std::vector<Symbol>& word, int m) {
  for (int i = 0; i < m; ++i) {
    const Symbol last = word.back();
    for (Symbol s = 0;; ++s) {
      if (spec.admissible(last, s)) {
        word.push_back(s);
        break;
      }
    }
  }
}

void WordIndexer::extend_min_backward(const SubshiftSpec& spec,
                                      std::vector<Symbol>& word, int m) {
  for (int i = 0; i < m; ++i) {
    const Symbol first = word.front();
    for (Symbol s = 0;; ++s) {
      if (spec.admissible(s, first)) {
        word.insert(word.begin(), s);
        break;
      }
    }
  }
}

std::vector<Word> admissible_words(const SubshiftSpec& spec, int n,
                                   std::size_t cap) {
  if (n < 1) fail(ErrorCode::BadInput, "depth must be >= 1");
  WordIndexer idx(spec, n, cap);
  std::vector<Word> out;
  out.reserve(idx.count());
  for (std::size_t k = 0; k < idx.count(); ++k) out.push_back(idx.word_at(k));
  return out;
}

std::vector<Word> periodic_words(const SubshiftSpec& spec, int n,
                                 std::size_t cap) {
  std::vector<Word> out;
  for (Word& w : admissible_words(spec, n, cap)) {
    if (spec.admissible(w.symbols.back(), w.symbols.front()))
      out.push_back(std::move(w));
  }
  return out;
}

Matrix01 transpose(const Matrix01& m) {
  const int r = static_cast<int>(m.size());
  Matrix01 t(r, std::vector<int>(r, 0));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) t[j][i] = m[i][j];
  return t;
}

}  // namespace gibbs
