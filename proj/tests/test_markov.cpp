#include <doctest.h>

#include <cmath>
#include <random>

#include "gibbs/markov.hpp"

using namespace gibbs;

namespace {

ToralAutomorphism cat() { return build_automorphism({{{2, 1}, {1, 1}}}); }

double torus_dist(const Vec2& a, const Vec2& b) {
  auto d = [](double x, double y) {
    double t = std::abs(x - y);
    return std::min(t, 1.0 - t);
  };
  return std::hypot(d(a.x, b.x), d(a.y, b.y));
}

}  // namespace

TEST_CASE("automorphism eigendata") {
  SUBCASE("cat map against the quadratic formula") {
    ToralAutomorphism aut = cat();
    const double expect = (3.0 + std::sqrt(5.0)) / 2.0;  // roots of t^2-3t+1
    CHECK(aut.lambda_u == doctest::Approx(expect).epsilon(1e-14));
    CHECK(aut.lambda_s == doctest::Approx(1.0 / expect).epsilon(1e-14));
    CHECK(aut.det == 1);
    CHECK(aut.entropy == doctest::Approx(std::log(expect)).epsilon(1e-14));
  }
  SUBCASE("[[1,1],[1,0]] is hyperbolic with the golden ratio") {
    ToralAutomorphism aut = build_automorphism({{{1, 1}, {1, 0}}});
    CHECK(aut.lambda_u ==
          doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-14));
    CHECK(aut.det == -1);
    CHECK(aut.lambda_s < 0.0);  // orientation-reversing stable direction
  }
  SUBCASE("parabolic matrix rejected") {
    try {
      build_automorphism({{{1, 1}, {0, 1}}});
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotHyperbolic);
    }
  }
  SUBCASE("non-unimodular matrix rejected") {
    try {
      build_automorphism({{{2, 0}, {0, 1}}});
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotUnimodular);
    }
  }
  SUBCASE("eigen equation residual") {
    ToralAutomorphism aut = cat();
    const double rx = 2.0 * aut.e_u.x + 1.0 * aut.e_u.y - aut.lambda_u * aut.e_u.x;
    const double ry = 1.0 * aut.e_u.x + 1.0 * aut.e_u.y - aut.lambda_u * aut.e_u.y;
    CHECK(std::hypot(rx, ry) < 1e-12);
  }
}

TEST_CASE("cat-map partition") {
  MarkovPartition part = catmap_partition(cat());

  SUBCASE("build-time checks") {
    CHECK(part.symbols() == 5);
    CHECK(part.build_checks.cover_failures == 0);
    CHECK(part.build_checks.transitions_match);
    CHECK(part.build_checks.markov_s_deviation < 1e-9);
    CHECK(part.build_checks.markov_u_deviation < 1e-9);
    CHECK(part.build_checks.strip_tiling_deviation < 1e-9);
    CHECK(part.build_checks.area_deviation < 1e-9);
  }
  SUBCASE("induced shift has the automorphism's entropy") {
    CHECK(part.sft().pf_eigenvalue ==
          doctest::Approx(part.aut.lambda_u).epsilon(1e-12));
    CHECK(part.sft().mixing_time == 2);
  }
  SUBCASE("total area is one") {
    double area = 0.0;
    for (const auto& b : part.boxes) area += b.u_extent() * b.s_extent();
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("unsupported matrix refers to the partition-file route") {
    try {
      catmap_partition(build_automorphism({{{3, 2}, {1, 1}}}));
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedMatrix);
    }
  }
  SUBCASE("square of the cat map builds by refinement") {
    ToralAutomorphism cat2 = build_automorphism({{{5, 3}, {3, 2}}});
    MarkovPartition p2 = catmap_partition(cat2);
    CHECK(p2.sft().pf_eigenvalue ==
          doctest::Approx(part.aut.lambda_u * part.aut.lambda_u)
              .epsilon(1e-10));
    // encode/decode round trip in the refined partition
    Vec2 p{0.31, 0.77};
    Itinerary it = encode_point(p2, p, 6);
    DecodedPoint d = decode_word(p2, it.backward, it.forward);
    CHECK(torus_dist(d.point, p) <= d.radius + 1e-12);
  }
}

TEST_CASE("coding") {
  MarkovPartition part = catmap_partition(cat());

  SUBCASE("origin has a constant itinerary") {
    Itinerary it = encode_point(part, Vec2{0.0, 0.0}, 10);
    for (Symbol s : it.forward) CHECK(s == it.forward[0]);
    for (Symbol s : it.backward) CHECK(s == it.backward[0]);
  }
  SUBCASE("decode inverts encode within the contraction radius") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
      Vec2 p{U(rng), U(rng)};
      const int n = 4 + int(rng() % 8);
      Itinerary it = encode_point(part, p, n);
      DecodedPoint d = decode_word(part, it.backward, it.forward);
      CHECK(torus_dist(d.point, p) <= d.radius + 1e-12);
      CHECK(d.radius <=
            2.0 * std::pow(part.aut.lambda_u, -n) + 1e-12);
    }
  }
  SUBCASE("coding semiconjugacy: decode of the shift is L of decode") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
      Vec2 p{U(rng), U(rng)};
      Itinerary it = encode_point(part, p, 10);
      DecodedPoint d0 = decode_word(part, it.backward, it.forward);
      // shift the two-sided word left by one
      std::vector<Symbol> bwd2{it.forward[0]};
      bwd2.insert(bwd2.end(), it.backward.begin(), it.backward.end() - 1);
      std::vector<Symbol> fwd2(it.forward.begin() + 1, it.forward.end());
      DecodedPoint d1 = decode_word(part, bwd2, fwd2);
      const Vec2 Ld0 = part.aut.apply(d0.point);
      CHECK(torus_dist(d1.point, Ld0) <= d0.radius + d1.radius + 1e-10);
    }
  }
  SUBCASE("words agreeing to depth n decode exponentially close") {
    std::mt19937_64 rng(10);
    WordIndexer idx(part.sft(), 12);
    for (int t = 0; t < 100; ++t) {
      Word a = idx.word_at(rng() % idx.count());
      // re-draw an admissible tail after position n
      const int n = 3 + int(rng() % 6);
      Word b = a;
      std::vector<Symbol> head(b.symbols.begin(), b.symbols.begin() + n);
      WordIndexer::extend_min(part.sft(), head, 12 - n);
      // nudge the extension pseudo-randomly while staying admissible
      for (int i = n; i < 12; ++i) {
        std::vector<Symbol> choices;
        for (int s = 0; s < part.symbols(); ++s)
          if (part.sft().admissible(head[i - 1], Symbol(s)))
            choices.push_back(Symbol(s));
        head[i] = choices[rng() % choices.size()];
      }
      b.symbols = head;
      DecodedPoint da = decode_word(part, {}, a.symbols);
      DecodedPoint db = decode_word(part, {}, b.symbols);
      CHECK(std::abs(da.u - db.u) <=
            2.0 * std::pow(part.aut.lambda_u, -(n - 1)));
    }
  }
  SUBCASE("inadmissible words are rejected") {
    std::vector<Symbol> bad{2, 0};  // box 2 maps only to 3,4
    CHECK_THROWS_AS(decode_word(part, {}, bad), Error);
  }
}

TEST_CASE("torus periodic points") {
  ToralAutomorphism aut = cat();
  SUBCASE("counts match |det(L^n - I)|") {
    // |det(L^n - I)| = lambda^n + lambda^{-n} - 2 for the cat map
    for (int n = 1; n <= 12; ++n) {
      const double expect = std::pow(aut.lambda_u, n) +
                            std::pow(aut.lambda_u, -n) - 2.0;
      CHECK(torus_periodic_points(aut, n).size() ==
            std::size_t(std::llround(expect)));
    }
    CHECK(torus_periodic_points(aut, 1).size() == 1);
    CHECK(torus_periodic_points(aut, 2).size() == 5);
  }
  SUBCASE("every point satisfies the defining equation") {
    for (int n = 1; n <= 8; ++n) {
      for (const Vec2& p : torus_periodic_points(aut, n)) {
        Vec2 q = p;
        for (int k = 0; k < n; ++k) q = aut.apply(q);
        CHECK(torus_dist(q, p) < 1e-12);
      }
    }
  }
}

TEST_CASE("stable holonomy") {
  MarkovPartition part = catmap_partition(cat());
  const EigenBox& b0 = part.boxes[0];

  SUBCASE("same fiber is the identity") {
    UnstableFiber f{0, 0.5 * (b0.s0 + b0.s1)};
    const Vec2 plane = part.aut.to_plane(0.5 * (b0.u0 + b0.u1), f.s);
    Vec2 p{plane.x - std::floor(plane.x), plane.y - std::floor(plane.y)};
    Vec2 q = stable_holonomy(part, f, f, p);
    CHECK(torus_dist(p, q) < 1e-12);
  }
  SUBCASE("holonomy composed with its inverse is the identity") {
    UnstableFiber f1{0, b0.s0 + 0.3 * (b0.s1 - b0.s0)};
    UnstableFiber f2{3, part.boxes[3].s0 +
                            0.6 * (part.boxes[3].s1 - part.boxes[3].s0)};
    std::mt19937_64 rng(12);
    for (int t = 0; t < 40; ++t) {
      const double u = b0.u0 + (0.05 + 0.9 * (rng() % 1000) / 1000.0) *
                                   (b0.u1 - b0.u0);
      const Vec2 plane = part.aut.to_plane(u, f1.s);
      Vec2 p{plane.x - std::floor(plane.x), plane.y - std::floor(plane.y)};
      Vec2 q = stable_holonomy(part, f1, f2, p);
      Vec2 back = stable_holonomy(part, f2, f1, q);
      CHECK(torus_dist(p, back) < 1e-12);
    }
  }
  SUBCASE("holonomy image shares the forward coding tail") {
    UnstableFiber f1{0, b0.s0 + 0.2 * (b0.s1 - b0.s0)};
    UnstableFiber f2{3, part.boxes[3].s0 +
                            0.7 * (part.boxes[3].s1 - part.boxes[3].s0)};
    std::mt19937_64 rng(13);
    for (int t = 0; t < 40; ++t) {
      const double u = b0.u0 + (0.05 + 0.9 * (rng() % 1000) / 1000.0) *
                                   (b0.u1 - b0.u0);
      const Vec2 plane = part.aut.to_plane(u, f1.s);
      Vec2 p{plane.x - std::floor(plane.x), plane.y - std::floor(plane.y)};
      Vec2 q = stable_holonomy(part, f1, f2, p);
      Itinerary ip = encode_point(part, p, 12);
      Itinerary iq = encode_point(part, q, 12);
      // tails agree after a bounded delay
      int delay = 0;
      for (int i = 11; i >= 0; --i) {
        if (ip.forward[i] != iq.forward[i]) {
          delay = i + 1;
          break;
        }
      }
      CHECK(delay <= 3);
    }
  }
}

TEST_CASE("segment coding") {
  MarkovPartition part = catmap_partition(cat());
  SegmentCoding seg(part, 0);
  SegmentCoding seg2(part, 1);
  const SubshiftSpec& spec = part.sft();

  SUBCASE("children tile their parent interval") {
    std::mt19937_64 rng(14);
    WordIndexer idx(spec, 6);
    for (int t = 0; t < 60; ++t) {
      Word w = idx.word_at(rng() % idx.count());
      auto parent = seg.cylinder_interval(w.symbols);
      double total = 0.0;
      double lo = 1e300, hi = -1e300;
      for (int a = 0; a < spec.alphabet_size; ++a) {
        if (!spec.admissible(w.symbols.back(), Symbol(a))) continue;
        std::vector<Symbol> child = w.symbols;
        child.push_back(Symbol(a));
        auto iv = seg.cylinder_interval(child);
        total += iv.length();
        lo = std::min(lo, iv.lo);
        hi = std::max(hi, iv.hi);
      }
      CHECK(total == doctest::Approx(parent.length()).epsilon(1e-9));
      CHECK(lo == doctest::Approx(parent.lo).epsilon(1e-9));
      CHECK(hi == doctest::Approx(parent.hi).epsilon(1e-9));
    }
  }
  SUBCASE("box intervals tile the segment for both presentations") {
    for (const SegmentCoding* s : {&seg, &seg2}) {
      std::vector<std::pair<double, double>> iv;
      for (int b = 0; b < part.symbols(); ++b)
        iv.push_back({s->box_interval(Symbol(b)).lo,
                      s->box_interval(Symbol(b)).hi});
      std::sort(iv.begin(), iv.end());
      CHECK(iv.front().first == doctest::Approx(part.t_min));
      CHECK(iv.back().second == doctest::Approx(part.t_max));
      for (std::size_t i = 0; i + 1 < iv.size(); ++i)
        CHECK(iv[i].second == doctest::Approx(iv[i + 1].first).epsilon(1e-12));
    }
  }
  SUBCASE("encode_parameter recovers the interval") {
    std::mt19937_64 rng(15);
    for (int t = 0; t < 100; ++t) {
      const double x =
          part.t_min + (part.t_max - part.t_min) * (rng() % 100000) / 100000.0;
      auto code = seg.encode_parameter(x, 8);
      auto iv = seg.cylinder_interval(code);
      CHECK(x >= iv.lo - 1e-9);
      CHECK(x <= iv.hi + 1e-9);
    }
  }
  SUBCASE("the two presentations parameterize the same segment points") {
    std::mt19937_64 rng(16);
    for (int t = 0; t < 100; ++t) {
      const double x =
          part.t_min + (part.t_max - part.t_min) * (rng() % 100000) / 100000.0;
      CHECK(torus_dist(seg.point_at(x), seg2.point_at(x)) < 1e-9);
    }
  }
  SUBCASE("interval order is monotone within a rectangle's sub-segment") {
    // deeper cylinders with the same leading symbol stay ordered by their
    // second-symbol intervals
    for (int b = 0; b < part.symbols(); ++b) {
      double prev_hi = -1e300;
      for (int a = 0; a < part.symbols(); ++a) {
        if (!spec.admissible(Symbol(b), Symbol(a))) continue;
        std::vector<Symbol> w{Symbol(b), Symbol(a)};
        auto iv = seg.cylinder_interval(w);
        CHECK(iv.lo >= prev_hi - 1e-12);
        prev_hi = iv.hi;
      }
    }
  }
}

TEST_CASE("torus potentials through the coding") {
  MarkovPartition part = catmap_partition(cat());
  TrigPolynomial poly;
  poly.terms.push_back({1, 0, 0.2, 0.0});
  poly.terms.push_back({1, 1, 0.0, 0.1});

  SUBCASE("sup and lipschitz bounds") {
    CHECK(poly.sup_bound() == doctest::Approx(0.3));
    CHECK(poly.eval(Vec2{0.0, 0.0}) == doctest::Approx(0.2));
    CHECK(poly.lipschitz_bound() >= 2.0 * 3.14159 * (0.2 + std::sqrt(2.0) * 0.1));
  }
  SUBCASE("composition with the matrix is exact") {
    TrigPolynomial comp = poly.compose_with(part.aut.m);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
      Vec2 p{U(rng), U(rng)};
      CHECK(comp.eval(p) ==
            doctest::Approx(poly.eval(part.aut.apply(p))).epsilon(1e-12));
    }
  }
  SUBCASE("fast sampler matches the generic reduction") {
    ForwardReduction fast = sample_forward_potential(part, poly, 5, 1e-8);
    ForwardReduction slow =
        reduce_to_forward(torus_potential(part, poly), 5, 1e-8);
    for (std::size_t r = 0; r < fast.forward.values().size(); ++r)
      CHECK(fast.forward.values()[r] ==
            doctest::Approx(slow.forward.values()[r]).epsilon(1e-9));
  }
  SUBCASE("measured variation decays at the contraction rate") {
    ForwardReduction red = sample_forward_potential(part, poly, 9, 1e-9);
    VariationProfile vp = variation_profile(red.forward, 8);
    // var_n <= c * lambda^{-n} with a conservative constant
    const double lam = part.aut.lambda_u;
    for (int n = 2; n <= 8; ++n)
      CHECK(vp.var[n] <= 40.0 * poly.lipschitz_bound() * std::pow(lam, -n));
  }
}

TEST_CASE("period-2 torus points have period-2 itineraries") {
  MarkovPartition part = catmap_partition(cat());
  auto pts = torus_periodic_points(part.aut, 2);
  CHECK(pts.size() == 5);
  for (const Vec2& p : pts) {
    // skip the fixed point (period 1, constant itinerary)
    if (torus_dist(p, Vec2{0.0, 0.0}) < 1e-12) continue;
    Itinerary it = encode_point(part, p, 10);
    for (int k = 0; k + 2 < int(it.forward.size()); ++k)
      CHECK(it.forward[k] == it.forward[k + 2]);
  }
}
