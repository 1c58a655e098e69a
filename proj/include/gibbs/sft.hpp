#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gibbs/errors.hpp"

namespace gibbs {

using Symbol = std::uint8_t;
using Matrix01 = std::vector<std::vector<int>>;

inline constexpr std::size_t kDefaultWordCap = 10'000'000;
inline constexpr int kMixingSearchCap = 64;
inline constexpr int kPowerIterationCap = 10'000;

/// A subshift of finite type given by a 0/1 transition matrix, together with
/// its Perron-Frobenius data and combinatorial constants.
struct SubshiftSpec {
  Matrix01 matrix;
  int alphabet_size = 0;
  double pf_eigenvalue = 0.0;
  std::vector<double> pf_left;   // l A = lambda l, entrywise positive
  std::vector<double> pf_right;  // A r = lambda r, entrywise positive
  double entropy = 0.0;          // log(pf_eigenvalue)
  int mixing_time = 0;           // least M with A^M > 0

  bool admissible(Symbol a, Symbol b) const { return matrix[a][b] != 0; }
  bool admissible_word(std::span<const Symbol> w) const;
};

/// An admissible finite word over the alphabet of a subshift.
struct Word {
  std::vector<Symbol> symbols;

  int size() const { return static_cast<int>(symbols.size()); }
  std::string str() const;
};

SubshiftSpec build_sft(const Matrix01& matrix);

std::vector<Word> admissible_words(const SubshiftSpec& spec, int n,
                                   std::size_t cap = kDefaultWordCap);

/// Words of length n whose cyclic closure is admissible; count = trace(A^n).
std::vector<Word> periodic_words(const SubshiftSpec& spec, int n,
                                 std::size_t cap = kDefaultWordCap);

std::uint64_t count_words(const SubshiftSpec& spec, int n);

/// Diameter bound for points agreeing on their first n symbols in the
/// one-sided metric d(x,y) = sum_{x_i != y_i} 2^{-i}.
inline double cylinder_diameter_bound(int n) {
  return std::pow(2.0, 1 - n);
}

/// Lexicographic rank/unrank for admissible words of a fixed depth.
/// Ranks are contiguous in [0, count) and prefix ranges are contiguous,
/// which is what the measure tables rely on.
class WordIndexer {
 public:
  WordIndexer(const SubshiftSpec& spec, int depth,
              std::size_t cap = kDefaultWordCap);

  int depth() const { return depth_; }
  std::size_t count() const { return static_cast<std::size_t>(count_); }
  const SubshiftSpec& spec() const { return *spec_; }

  std::size_t rank(std::span<const Symbol> word) const;
  void unrank(std::size_t rank, std::span<Symbol> out) const;
  Word word_at(std::size_t rank) const;

  /// Ranks at this depth of all words extending the given prefix,
  /// as a half-open range [first, last).
  std::pair<std::size_t, std::size_t> prefix_range(
      std::span<const Symbol> prefix) const;

  /// Number of admissible suffix words of length k whose first symbol is s.
  std::uint64_t suffix_count(int k, Symbol s) const { return counts_[k][s]; }

  /// Lexicographically minimal admissible extension of the word by m symbols.
  static void extend_min(const SubshiftSpec& spec, std::vector<Symbol>& word,
                         int m);
  /// Lexicographically minimal admissible backward extension: prepends the
  /// smallest symbol that can precede the current first symbol, m times.
  static void extend_min_backward(const SubshiftSpec& spec,
                                  std::vector<Symbol>& word, int m);

 private:
  const SubshiftSpec* spec_;
  int depth_;
  std::uint64_t count_;
  // counts_[k][s]: number of admissible words of length k starting at s
  std::vector<std::vector<std::uint64_t>> counts_;
};

Matrix01 transpose(const Matrix01& m);

}  // namespace gibbs
