#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "gibbs/thermo.hpp"

using namespace gibbs;

namespace {

SubshiftSpec full2() { return build_sft({{1, 1}, {1, 1}}); }
SubshiftSpec golden() { return build_sft({{1, 1}, {1, 0}}); }

Potential random_table(const SubshiftSpec& spec, int depth,
                       std::uint64_t seed, double amp = 1.0) {
  WordIndexer idx(spec, depth);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-amp, amp);
  std::vector<double> vals(idx.count());
  for (double& v : vals) v = U(rng);
  return Potential(spec, depth, vals);
}

}  // namespace

TEST_CASE("transfer operator action") {
  SUBCASE("zero potential counts admissible prepends") {
    SubshiftSpec spec = full2();
    Potential zero = Potential::constant(spec, 0.0);
    WordIndexer idx(spec, 3);
    std::vector<double> ones(idx.count(), 1.0);
    auto out = transfer_apply(spec, zero, ones, 3);
    for (double v : out) CHECK(v == doctest::Approx(2.0));
  }
  SUBCASE("golden-mean column counts") {
    SubshiftSpec spec = golden();
    Potential zero = Potential::constant(spec, 0.0);
    WordIndexer idx(spec, 3);
    std::vector<double> ones(idx.count(), 1.0);
    auto out = transfer_apply(spec, zero, ones, 3);
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      CHECK(out[r] == doctest::Approx(w.symbols[0] == 0 ? 2.0 : 1.0));
    }
  }
  SUBCASE("Bernoulli weights sum over prepends") {
    SubshiftSpec spec = full2();
    Potential phi(spec, 1, {std::log(1.0), std::log(2.0)});
    WordIndexer idx(spec, 2);
    std::vector<double> ones(idx.count(), 1.0);
    auto out = transfer_apply(spec, phi, ones, 2);
    for (double v : out) CHECK(v == doctest::Approx(3.0).epsilon(1e-14));
  }
}

TEST_CASE("pressure") {
  SUBCASE("zero potential gives topological entropy") {
    for (auto spec : {full2(), golden()}) {
      Potential zero = Potential::constant(spec, 0.0);
      PressureResult pr = pressure(spec, zero, 6);
      CHECK(pr.value == doctest::Approx(spec.entropy).epsilon(1e-12));
      CHECK(pr.error_bound < 1e-9);
    }
  }
  SUBCASE("Bernoulli weights (1,2) give log 3") {
    SubshiftSpec spec = full2();
    Potential phi(spec, 1, {std::log(1.0), std::log(2.0)});
    PressureResult pr = pressure(spec, phi, 8);
    CHECK(std::abs(pr.value - std::log(3.0)) < 1e-10);
  }
  SUBCASE("P(phi + K) = P(phi) + K") {
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (auto spec : {full2(), golden()}) {
      for (int trial = 0; trial < 10; ++trial) {
        Potential phi = random_table(spec, 1 + int(rng() % 3), rng());
        const double k = U(rng);
        const double p0 = pressure(spec, phi, 6).value;
        const double p1 = pressure(spec, phi + k, 6).value;
        CHECK(std::abs(p1 - (p0 + k)) < 1e-10);
      }
    }
  }
  SUBCASE("coboundary invariance of the pressure") {
    SubshiftSpec spec = golden();
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 6; ++trial) {
      Potential phi = random_table(spec, 2, rng());
      TransferFunction u;
      u.table = random_table(spec, 1, rng());
      Potential moved = add_almost_coboundary(phi, u, 0.0);
      const double p0 = pressure(spec, phi, 7).value;
      const double p1 = pressure(spec, moved, 7).value;
      CHECK(std::abs(p1 - p0) < 1e-9);
    }
  }
}

TEST_CASE("brs eigenmeasures") {
  SUBCASE("uniform measure on the full shift") {
    SubshiftSpec spec = full2();
    GibbsMeasure mu = brs_measure(spec, Potential::constant(spec, 0.0), 8);
    for (double m : mu.masses)
      CHECK(m == doctest::Approx(std::pow(2.0, -8)).epsilon(1e-11));
    CHECK(mu.pressure == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("Bernoulli eigenmeasure (1,2)/3") {
    SubshiftSpec spec = full2();
    Potential phi(spec, 1, {std::log(1.0), std::log(2.0)});
    GibbsMeasure mu = brs_measure(spec, phi, 7);
    std::vector<Symbol> w0{0}, w1{1};
    CHECK(mu.mass(std::span<const Symbol>(w0)) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-11));
    CHECK(mu.mass(std::span<const Symbol>(w1)) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-11));
    // product structure: mass of a word is the product of symbol weights
    WordIndexer idx(spec, 7);
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      double expect = 1.0;
      for (Symbol s : w.symbols) expect *= (s == 0 ? 1.0 : 2.0) / 3.0;
      CHECK(mu.mass_at_rank(r) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
  SUBCASE("Parry masses on the golden shift from PF data") {
    SubshiftSpec spec = golden();
    GibbsMeasure mu = brs_measure(spec, Potential::constant(spec, 0.0), 9);
    // eigenmeasure of the constant potential: mass[w] = r_{w_last} /
    // (lambda^{n-1} sum r)
    const double sum_r =
        std::accumulate(spec.pf_right.begin(), spec.pf_right.end(), 0.0);
    WordIndexer idx(spec, 9);
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      const double expect = spec.pf_right[w.symbols.back()] /
                            (std::pow(spec.pf_eigenvalue, 8) * sum_r);
      CHECK(mu.mass_at_rank(r) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
  SUBCASE("additivity across depths") {
    SubshiftSpec spec = golden();
    Potential phi = random_table(spec, 2, 31, 0.5);
    GibbsMeasure mu7 = brs_measure(spec, phi, 7);
    GibbsMeasure mu8 = brs_measure(spec, phi, 8);
    WordIndexer idx(spec, 7);
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      CHECK(mu7.mass_at_rank(r) ==
            doctest::Approx(mu8.mass(std::span<const Symbol>(w.symbols)))
                .epsilon(1e-10));
    }
  }
  SUBCASE("radon-nikodym identity is exact for tables") {
    SubshiftSpec spec = golden();
    Potential phi = random_table(spec, 2, 33, 0.5);
    const int depth = 8;
    GibbsMeasure mu = brs_measure(spec, phi, depth);
    WordIndexer idx(spec, depth);
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      std::span<const Symbol> s(w.symbols);
      const double lhs = std::log(mu.mass(s.subspan(1)) / mu.mass_at_rank(r));
      const double rhs = -phi.value(s) + mu.pressure;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
  SUBCASE("independent restart reproduces the masses") {
    SubshiftSpec spec = golden();
    Potential phi = random_table(spec, 1, 35, 0.8);
    const int depth = 6;
    GibbsMeasure mu = brs_measure(spec, phi, depth);
    // second start: seeded random positive vector, plain adjoint iteration
    WordIndexer idx(spec, depth);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0.5, 2.0);
    std::vector<double> v(idx.count());
    for (double& x : v) x = U(rng);
    for (int it = 0; it < 400; ++it) {
      v = transfer_adjoint_apply(spec, phi, v, depth);
      double norm = std::accumulate(v.begin(), v.end(), 0.0);
      for (double& x : v) x /= norm;
    }
    for (std::size_t r = 0; r < idx.count(); ++r)
      CHECK(std::abs(v[r] - mu.mass_at_rank(r)) < 1e-9);
  }
  SUBCASE("deep masses extend the table consistently") {
    SubshiftSpec spec = golden();
    Potential phi = random_table(spec, 2, 37, 0.4);
    GibbsMeasure mu = brs_measure(spec, phi, 6);
    // parent mass equals the sum of deep child masses one level past depth
    WordIndexer idx(spec, 6);
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      double acc = 0.0;
      for (int a = 0; a < spec.alphabet_size; ++a) {
        if (!spec.admissible(w.symbols.back(), Symbol(a))) continue;
        std::vector<Symbol> child = w.symbols;
        child.push_back(Symbol(a));
        acc += mu.deep_mass(child);
      }
      CHECK(acc == doctest::Approx(mu.mass_at_rank(r)).epsilon(1e-9));
    }
  }
}

TEST_CASE("invariant normalization") {
  SUBCASE("full shift, zero potential") {
    SubshiftSpec spec = full2();
    auto norm = invariant_normalization(spec, Potential::constant(spec, 0.0), 7);
    for (double v : norm.phi_prime.values())
      CHECK(v == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    for (double m : norm.invariant.masses)
      CHECK(m == doctest::Approx(std::pow(2.0, -7)).epsilon(1e-10));
    CHECK(norm.expansion_constant == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("Bernoulli (1,2): invariant masses and phi'") {
    SubshiftSpec spec = full2();
    Potential phi(spec, 1, {std::log(1.0), std::log(2.0)});
    auto norm = invariant_normalization(spec, phi, 7);
    std::vector<Symbol> w0{0}, w1{1};
    CHECK(norm.invariant.mass(std::span<const Symbol>(w0)) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(norm.invariant.mass(std::span<const Symbol>(w1)) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    // h constant on a Bernoulli full shift: phi'(i..) = phi(i) - log 3
    WordIndexer idx(spec, norm.phi_prime.depth());
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      const double expect =
          (w.symbols[0] == 0 ? 0.0 : std::log(2.0)) - std::log(3.0);
      CHECK(norm.phi_prime.value(w.symbols) ==
            doctest::Approx(expect).epsilon(1e-11));
    }
  }
  SUBCASE("golden shift, zero potential gives the Parry measure") {
    SubshiftSpec spec = golden();
    auto norm = invariant_normalization(spec, Potential::constant(spec, 0.0), 8);
    const double lam = spec.pf_eigenvalue;
    double lr = 0.0;
    for (int i = 0; i < 2; ++i) lr += spec.pf_left[i] * spec.pf_right[i];
    WordIndexer idx(spec, 8);
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      const double parry = spec.pf_left[w.symbols.front()] *
                           spec.pf_right[w.symbols.back()] /
                           (std::pow(lam, 7) * lr);
      CHECK(norm.invariant.mass_at_rank(r) ==
            doctest::Approx(parry).epsilon(1e-9));
    }
    // expansion equals 1 exactly at the unique-predecessor word 01
    CHECK(norm.expansion_constant == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("shift invariance at cylinder level") {
    SubshiftSpec spec = golden();
    Potential phi = random_table(spec, 2, 51, 0.5);
    auto norm = invariant_normalization(spec, phi, 8);
    WordIndexer idx(spec, 7);
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      double preimage_mass = 0.0;
      for (int a = 0; a < spec.alphabet_size; ++a) {
        if (!spec.admissible(Symbol(a), w.symbols.front())) continue;
        std::vector<Symbol> ext{Symbol(a)};
        ext.insert(ext.end(), w.symbols.begin(), w.symbols.end());
        preimage_mass += norm.invariant.mass(std::span<const Symbol>(ext));
      }
      CHECK(preimage_mass ==
            doctest::Approx(norm.invariant.mass(
                                std::span<const Symbol>(w.symbols)))
                .epsilon(1e-9));
    }
  }
  SUBCASE("phi' is nonpositive and relates the two measures by h") {
    SubshiftSpec spec = golden();
    Potential phi = random_table(spec, 1, 53, 0.6);
    auto norm = invariant_normalization(spec, phi, 8);
    for (double v : norm.phi_prime.values()) CHECK(v <= 1e-12);
    GibbsMeasure raw = brs_measure(spec, phi, 8);
    // d mu_inv / d mu_phi proportional to h = exp(log_h)
    WordIndexer idx1(spec, 1);
    WordIndexer idx(spec, 8);
    double ratio0 = 0.0;
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      const double h = std::exp(norm.log_h[idx1.rank(w.symbols)]);
      const double ratio =
          norm.invariant.mass_at_rank(r) / (raw.mass_at_rank(r) * h);
      if (r == 0) ratio0 = ratio;
      CHECK(ratio == doctest::Approx(ratio0).epsilon(1e-8));
    }
  }
  SUBCASE("bowen bounds hold for the invariant measure") {
    SubshiftSpec spec = golden();
    Potential phi = random_table(spec, 2, 55, 0.4);
    const int depth = 9;
    auto norm = invariant_normalization(spec, phi, depth);
    const Potential& pp = norm.phi_prime;
    VariationProfile vp = variation_profile(pp, pp.depth());
    const double var_phi = vp.total;
    const double c1 =
        std::exp(-spec.mixing_time * pp.sup_norm()) * std::exp(-var_phi);
    const double c2 = std::exp(var_phi);
    WordIndexer idx(spec, depth);
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      std::vector<Symbol> ext = w.symbols;
      WordIndexer::extend_min(spec, ext, pp.depth());
      const double sn = birkhoff_sum(pp, ext, depth);
      const double ratio = norm.invariant.mass_at_rank(r) / std::exp(sn);
      CHECK(ratio >= c1 - 1e-12);
      CHECK(ratio <= c2 + 1e-12);
    }
  }
}

TEST_CASE("local uniqueness diagnostics") {
  SubshiftSpec spec = golden();
  Potential phi = random_table(spec, 1, 61, 0.5);
  const int depth = 7;
  GibbsMeasure mu = brs_measure(spec, phi, depth);
  // V: all cylinders starting with symbol 0
  WordIndexer idx(spec, depth);
  std::vector<Symbol> prefix{0};
  auto [lo, hi] = idx.prefix_range(prefix);
  std::vector<std::size_t> ranks;
  for (std::size_t r = lo; r < hi; ++r) ranks.push_back(r);

  SUBCASE("restriction of the measure itself") {
    std::vector<double> cand;
    for (std::size_t r : ranks) cand.push_back(mu.mass_at_rank(r));
    auto rep = local_uniqueness_check(mu, ranks, cand);
    CHECK(rep.max_deviation < 1e-12);
    CHECK(rep.constant == doctest::Approx(1.0));
  }
  SUBCASE("scaled restriction keeps deviation zero") {
    std::vector<double> cand;
    for (std::size_t r : ranks) cand.push_back(2.0 * mu.mass_at_rank(r));
    auto rep = local_uniqueness_check(mu, ranks, cand);
    CHECK(rep.max_deviation < 1e-12);
    CHECK(rep.constant == doctest::Approx(2.0));
  }
  SUBCASE("non-cohomologous candidate deviates") {
    Potential psi = random_table(spec, 1, 62, 0.5);
    GibbsMeasure nu = brs_measure(spec, psi, depth);
    std::vector<double> cand;
    for (std::size_t r : ranks) cand.push_back(nu.mass_at_rank(r));
    auto rep = local_uniqueness_check(mu, ranks, cand);
    CHECK(rep.max_deviation > 1e-3);
  }
}
