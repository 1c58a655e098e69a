#include <doctest.h>

#include <cmath>
#include <random>

#include "gibbs/charts.hpp"

using namespace gibbs;

namespace {

std::shared_ptr<const MarkovPartition> cat_part() {
  static auto part = std::make_shared<const MarkovPartition>(
      catmap_partition(build_automorphism({{{2, 1}, {1, 1}}})));
  return part;
}

double torus_dist(const Vec2& a, const Vec2& b) {
  auto d = [](double x, double y) {
    double t = std::abs(x - y);
    return std::min(t, 1.0 - t);
  };
  return std::hypot(d(a.x, b.x), d(a.y, b.y));
}

}  // namespace

TEST_CASE("boundary measures") {
  auto part = cat_part();
  SUBCASE("zero potential pushes to normalized arclength") {
    BoundaryMeasure bm =
        boundary_measure(part, PotentialInput::zero(), Side::Unstable, 10);
    CHECK(bm.pressure_raw ==
          doctest::Approx(std::log(part->aut.lambda_u)).epsilon(1e-12));
    double total = 0.0;
    const double seg_len = part->t_max - part->t_min;
    WordIndexer idx(part->sft(), 10);
    SegmentCoding seg(*part, 0);
    for (std::size_t r = 0; r < idx.count(); ++r) {
      Word w = idx.word_at(r);
      const double mass = bm.measure.mass_at_rank(r);
      total += mass;
      const double len = seg.cylinder_interval(w.symbols).length() / seg_len;
      CHECK(std::abs(mass - len) < 1e-6);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("stable side mirrors on the transpose") {
    BoundaryMeasure bm =
        boundary_measure(part, PotentialInput::zero(), Side::Stable, 8);
    CHECK(bm.pressure_raw ==
          doctest::Approx(std::log(part->aut.lambda_u)).epsilon(1e-10));
    CHECK(bm.partition->sft().matrix == transpose(part->sft().matrix));
    double total = 0.0;
    for (double m : bm.measure.masses) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("coordinate functions") {
  auto part = cat_part();
  SUBCASE("endpoints and monotonicity") {
    SmoothStructure st = synthesize_structure(part, PotentialInput::zero(),
                                              PotentialInput::zero(), 8);
    CHECK(st.F_u.eval(part->t_min) == 0.0);
    CHECK(st.F_u.eval(part->t_max) == 1.0);
    double prev = -1.0;
    for (int i = 0; i <= 64; ++i) {
      const double t =
          part->t_min + (part->t_max - part->t_min) * i / 64.0;
      const double v = st.F_u.eval(t);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
  }
  SUBCASE("zero potential gives an affine coordinate") {
    SmoothStructure st = synthesize_structure(part, PotentialInput::zero(),
                                              PotentialInput::zero(), 10);
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double t =
          part->t_min + (part->t_max - part->t_min) * i / 200.0;
      const double affine = (t - part->t_min) / (part->t_max - part->t_min);
      worst = std::max(worst, std::abs(st.F_u.eval(t) - affine));
    }
    CHECK(worst <= st.F_u.resolution);
    CHECK(st.F_u.resolution < 5e-3);
  }
  SUBCASE("refinement consistency at shared breakpoints") {
    TrigPolynomial poly;
    poly.terms.push_back({1, 0, 0.1, 0.05});
    BoundaryMeasure bm = boundary_measure(
        part, PotentialInput::from_trig(poly), Side::Unstable, 9);
    CoordinateFunction F8 = coordinate_function(bm.measure, bm.segment, 8);
    CoordinateFunction F9 = coordinate_function(bm.measure, bm.segment, 9);
    // every depth-8 breakpoint appears at depth 9 with the same cumulative
    for (std::size_t i = 0; i < F8.breakpoints.size(); ++i) {
      const double t = F8.breakpoints[i];
      CHECK(std::abs(F9.eval(t) - F8.cumulative[i]) < 1e-10);
    }
  }
  SUBCASE("inverse is a right inverse") {
    SmoothStructure st = synthesize_structure(part, PotentialInput::zero(),
                                              PotentialInput::zero(), 8);
    for (int i = 1; i < 20; ++i) {
      const double y = i / 20.0;
      CHECK(st.F_u.eval(st.F_u.inverse(y)) == doctest::Approx(y).epsilon(1e-10));
    }
  }
}

TEST_CASE("structure synthesis and the conjugacy") {
  auto part = cat_part();
  SmoothStructure st = synthesize_structure(part, PotentialInput::zero(),
                                            PotentialInput::zero(), 10);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  SUBCASE("linear case: h is the identity within resolution") {
    for (int t = 0; t < 200; ++t) {
      Vec2 p{U(rng), U(rng)};
      CHECK(torus_dist(apply_h(st, p), p) <= st.resolution() + 1e-9);
    }
  }
  SUBCASE("h is monotone along unstable fibers") {
    const EigenBox& b = part->boxes[1];
    const double s = 0.4 * b.s0 + 0.6 * b.s1;
    double prev = -1e300;
    for (int i = 1; i < 30; ++i) {
      const double u = b.u0 + (b.u1 - b.u0) * i / 30.0;
      const Vec2 pl = part->aut.to_plane(u, s);
      Vec2 p{pl.x - std::floor(pl.x), pl.y - std::floor(pl.y)};
      auto loc = part->locate_point(apply_h(st, p));
      const double tu = loc.u + part->tau_offset[0][loc.box];
      CHECK(tu >= prev - 1e-12);
      prev = tu;
    }
  }
  SUBCASE("h inverse round trip") {
    for (int t = 0; t < 100; ++t) {
      Vec2 p{U(rng), U(rng)};
      CHECK(torus_dist(apply_h_inverse(st, apply_h(st, p)), p) <=
            2.0 * st.resolution() + 1e-9);
    }
  }
  SUBCASE("conjugated map fixes the image of the fixed point") {
    Vec2 h0 = apply_h(st, Vec2{0.0, 0.0});
    CHECK(torus_dist(conjugated_map(st, h0), h0) <= 2.0 * st.resolution());
  }
  SUBCASE("conjugated map returns after a full period") {
    for (const Vec2& p : periodic_orbit_representatives(part->aut, 2)) {
      Vec2 q = apply_h(st, p);
      Vec2 g2 = conjugated_map(st, conjugated_map(st, q));
      CHECK(torus_dist(g2, q) <= 4.0 * st.resolution());
    }
  }
  SUBCASE("linear case: g agrees with L") {
    for (int t = 0; t < 100; ++t) {
      Vec2 q{U(rng), U(rng)};
      CHECK(torus_dist(conjugated_map(st, q), part->aut.apply(q)) <=
            3.0 * st.resolution() + 1e-9);
    }
  }
}

TEST_CASE("eigenvalue measurement") {
  auto part = cat_part();

  SUBCASE("linear case measures exact powers") {
    SmoothStructure st = synthesize_structure(part, PotentialInput::zero(),
                                              PotentialInput::zero(), 10);
    for (int n = 1; n <= 6; ++n) {
      for (const Vec2& p : periodic_orbit_representatives(part->aut, n)) {
        auto meas = measured_eigenvalues(st, p, n, 10);
        const double lun = std::pow(part->aut.lambda_u, n);
        CHECK(std::abs(meas.lambda_u / lun - 1.0) < 1e-3);
        CHECK(std::abs(meas.lambda_s * lun - 1.0) < 1e-3);
      }
    }
  }
  SUBCASE("depth-1 table on the period-2 orbit against direct sums") {
    // explicit table potential on the partition shift
    WordIndexer idx(part->sft(), 1);
    std::vector<double> vals(idx.count());
    for (std::size_t i = 0; i < vals.size(); ++i)
      vals[i] = 0.05 * double(i) - 0.1;
    Potential phi(part->sft(), 1, vals);
    SmoothStructure st =
        synthesize_structure(part, PotentialInput::from_table(phi),
                             PotentialInput::zero(), 10);
    for (const Vec2& p : periodic_orbit_representatives(part->aut, 2)) {
      auto meas = measured_eigenvalues(st, p, 2, 10);
      // oracle: direct summation of the table along the coded orbit
      Itinerary it = encode_point(*part, p, 4);
      const double s2 = vals[it.forward[0]] + vals[it.forward[1]];
      const double pred = std::exp(-s2 + 2.0 * st.P_u);
      CHECK(std::log(meas.lambda_u) ==
            doctest::Approx(std::log(pred)).epsilon(1e-6));
      auto pred_pair = predicted_eigenvalues(st, p, 2);
      CHECK(pred_pair.lambda_u == doctest::Approx(pred).epsilon(1e-10));
    }
  }
  SUBCASE("trig potentials satisfy the identity at depth 10") {
    TrigPolynomial pu, ps;
    pu.terms.push_back({1, 0, 0.12, 0.0});
    pu.terms.push_back({0, 1, 0.0, 0.08});
    ps.terms.push_back({1, 1, 0.06, 0.04});
    SmoothStructure st = synthesize_structure(
        part, PotentialInput::from_trig(pu), PotentialInput::from_trig(ps), 10);
    for (int n = 1; n <= 4; ++n) {
      for (const Vec2& p : periodic_orbit_representatives(part->aut, n)) {
        auto meas = measured_eigenvalues(st, p, n, 10);
        auto pred = predicted_eigenvalues(st, p, n);
        CHECK(std::abs(std::log(meas.lambda_u) - std::log(pred.lambda_u)) <
              5e-3);
        CHECK(std::abs(std::log(meas.lambda_s) - std::log(pred.lambda_s)) <
              5e-3);
      }
    }
  }
  SUBCASE("almost coboundaries leave predictions unchanged") {
    TrigPolynomial pu, u;
    pu.terms.push_back({1, 0, 0.1, 0.0});
    u.terms.push_back({0, 1, 0.05, 0.0});
    // phi2 = phi + u o L - u + K exactly, as trig data
    TrigPolynomial pu2 = pu + u.compose_with(part->aut.m) + u * (-1.0);
    const double K = 0.2;
    SmoothStructure st1 = synthesize_structure(
        part, PotentialInput::from_trig(pu), PotentialInput::zero(), 9);
    SmoothStructure st2 = synthesize_structure(
        part, PotentialInput::from_trig(pu2), PotentialInput::zero(), 9);
    // the constant K shifts the pressure, not the prediction
    CHECK(st2.P_u == doctest::Approx(st1.P_u).epsilon(1e-4));
    for (const Vec2& p : periodic_orbit_representatives(part->aut, 3)) {
      auto pr1 = predicted_eigenvalues(st1, p, 3);
      auto pr2 = predicted_eigenvalues(st2, p, 3);
      CHECK(std::log(pr1.lambda_u) ==
            doctest::Approx(std::log(pr2.lambda_u)).epsilon(1e-4));
    }
    (void)K;
  }
}

TEST_CASE("coboundary-invariant synthesis") {
  auto part = cat_part();
  TrigPolynomial pu, u;
  pu.terms.push_back({1, 0, 0.1, 0.0});
  pu.terms.push_back({0, 1, 0.0, 0.07});
  u.terms.push_back({1, 0, 0.0, 0.04});
  TrigPolynomial moved = pu + u.compose_with(part->aut.m) + u * (-1.0);
  // also add a constant through an extra zero-frequency term
  moved.terms.push_back({0, 0, 0.3, 0.0});

  SmoothStructure st1 = synthesize_structure(
      part, PotentialInput::from_trig(pu), PotentialInput::zero(), 10);
  SmoothStructure st2 = synthesize_structure(
      part, PotentialInput::from_trig(moved), PotentialInput::zero(), 10);

  SUBCASE("pressures differ by the constant") {
    CHECK(st2.P_u - st1.P_u == doctest::Approx(0.3).epsilon(1e-4));
  }
  SUBCASE("coordinate functions agree within combined resolution") {
    double worst = 0.0;
    for (int i = 0; i <= 300; ++i) {
      const double t =
          part->t_min + (part->t_max - part->t_min) * i / 300.0;
      worst = std::max(worst, std::abs(st1.F_u.eval(t) - st2.F_u.eval(t)));
    }
    const double budget = st1.F_u.resolution + st2.F_u.resolution +
                          20.0 * (st1.side_u.reduction_error +
                                  st2.side_u.reduction_error);
    CHECK(worst <= budget);
  }
}

TEST_CASE("comparison map between the two presentations") {
  auto part = cat_part();
  TrigPolynomial poly;
  poly.terms.push_back({1, 0, 0.1, 0.0});
  BoundaryMeasure bm = boundary_measure(
      part, PotentialInput::from_trig(poly), Side::Unstable, 10);
  auto seg2 = std::make_shared<const SegmentCoding>(*part, 1);
  CoordinateFunction C1 = coordinate_function(bm.measure, bm.segment, 10);
  CoordinateFunction C2 = coordinate_function(bm.measure, seg2, 10);

  // The change of presentation transports nu+ with bounded distortion:
  // difference quotients of C2 o C1^{-1} over dyadic pairs stay within
  // [1/D, D] for a moderate D.
  double D = 1.0;
  for (int level = 3; level <= 7; ++level) {
    const std::size_t steps = std::size_t(1) << level;
    for (std::size_t i = 0; i + 1 < steps; ++i) {
      const double y0 = double(i) / double(steps);
      const double y1 = double(i + 1) / double(steps);
      const double g0 = C2.eval(C1.inverse(y0));
      const double g1 = C2.eval(C1.inverse(y1));
      const double quotient = (g1 - g0) / (y1 - y0);
      REQUIRE(quotient > 0.0);
      D = std::max({D, quotient, 1.0 / quotient});
    }
  }
  CHECK(D < 50.0);
  CHECK(D >= 1.0);
}

TEST_CASE("the shift expands coordinate lengths in the new structure") {
  auto part = cat_part();
  const SubshiftSpec& spec = part->sft();
  TrigPolynomial poly;
  poly.terms.push_back({0, 1, 0.0, 0.08});
  ForwardReduction red = sample_forward_potential(*part, poly, 6, 1e-9);
  auto norm = invariant_normalization(spec, red.forward, 9);
  const double c = norm.expansion_constant;
  CHECK(c > 1.0);  // every symbol of the cat shift has >= 2 predecessors

  // one step multiplies the F_u-length (invariant mass) of every cylinder
  // by at least c
  WordIndexer idx(spec, 9);
  for (std::size_t r = 0; r < idx.count(); ++r) {
    Word w = idx.word_at(r);
    std::span<const Symbol> s(w.symbols);
    const double ratio =
        norm.invariant.mass(s.subspan(1)) / norm.invariant.mass_at_rank(r);
    CHECK(ratio >= c - 1e-9);
  }
}

TEST_CASE("stable side with zero potential is proportional to length") {
  auto part = cat_part();
  BoundaryMeasure bm =
      boundary_measure(part, PotentialInput::zero(), Side::Stable, 9);
  const MarkovPartition& pt = *bm.partition;
  SegmentCoding seg(pt, 0);
  const double seg_len = pt.t_max - pt.t_min;
  WordIndexer idx(pt.sft(), 9);
  for (std::size_t r = 0; r < idx.count(); ++r) {
    Word w = idx.word_at(r);
    const double len = seg.cylinder_interval(w.symbols).length() / seg_len;
    CHECK(std::abs(bm.measure.mass_at_rank(r) - len) < 1e-6);
  }
}

TEST_CASE("synthesis on the refined power partition") {
  // square of the cat map: 13-symbol refinement, same machinery end to end
  auto part2 = std::make_shared<const MarkovPartition>(
      catmap_partition(build_automorphism({{{5, 3}, {3, 2}}})));
  CHECK(part2->symbols() == 13);
  SmoothStructure st = synthesize_structure(part2, PotentialInput::zero(),
                                            PotentialInput::zero(), 6);
  const double lam2 = part2->aut.lambda_u;
  CHECK(st.P_u == doctest::Approx(std::log(lam2)).epsilon(1e-10));
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Vec2 p{U(rng), U(rng)};
    CHECK(torus_dist(apply_h(st, p), p) <= st.resolution() + 1e-9);
  }
  for (int n = 1; n <= 3; ++n) {
    for (const Vec2& p : periodic_orbit_representatives(part2->aut, n)) {
      auto meas = measured_eigenvalues(st, p, n, 6);
      CHECK(std::abs(meas.lambda_u / std::pow(lam2, n) - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("finite-difference diagnostic agrees with the measured route") {
  auto part = cat_part();
  SUBCASE("linear case") {
    SmoothStructure st = synthesize_structure(part, PotentialInput::zero(),
                                              PotentialInput::zero(), 10);
    for (int n = 1; n <= 2; ++n) {
      for (const Vec2& p : periodic_orbit_representatives(part->aut, n)) {
        const double fd = finite_difference_expansion(st, p, n, 1e-4);
        const double lun = std::pow(part->aut.lambda_u, n);
        CHECK(std::abs(fd / lun - 1.0) < 1e-3);
      }
    }
  }
  SUBCASE("trig case stays near the measure-ratio value") {
    TrigPolynomial poly;
    poly.terms.push_back({1, 0, 0.1, 0.0});
    SmoothStructure st = synthesize_structure(
        part, PotentialInput::from_trig(poly), PotentialInput::zero(), 10);
    for (const Vec2& p : periodic_orbit_representatives(part->aut, 2)) {
      const double fd = finite_difference_expansion(st, p, 2, 1e-4);
      auto meas = measured_eigenvalues(st, p, 2, 10);
      CHECK(std::abs(std::log(fd) - std::log(meas.lambda_u)) < 5e-2);
    }
  }
}
