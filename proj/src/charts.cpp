#include "gibbs/charts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gibbs {

namespace {

double mod1(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y -= 1.0;
  return y;
}

BoundaryMeasure boundary_measure_on(std::shared_ptr<const MarkovPartition> sp,
                                    const PotentialInput& phi, int depth,
                                    double tol, int table_depth = 0) {
  const SubshiftSpec& spec = sp->sft();
  if (table_depth <= 0 || table_depth > depth) table_depth = depth;
  Potential raw;
  double reduction_error = 0.0;
  if (phi.trig) {
    ForwardReduction red =
        sample_forward_potential(*sp, *phi.trig, table_depth, tol);
    raw = std::move(red.forward);
    reduction_error = red.truncation_error + raw.sampling_error();
  } else if (phi.table) {
    if (phi.table->spec().matrix != spec.matrix)
      fail(ErrorCode::BackendMismatch,
           "table potential lives on a different shift than this side");
    raw = *phi.table;
  } else {
    raw = Potential::constant(spec, 0.0);
  }

  PressureResult pr = pressure(spec, raw, raw.depth());
  Potential normalized = raw + (-pr.value);

  BoundaryMeasure out;
  out.measure = brs_measure(spec, normalized, depth);
  out.pressure_raw = pr.value;
  out.reduction_error = reduction_error + pr.error_bound;
  out.partition = sp;
  out.segment = std::make_shared<SegmentCoding>(*sp, 0);
  return out;
}

}  // namespace

BoundaryMeasure boundary_measure(std::shared_ptr<const MarkovPartition> part,
                                 const PotentialInput& phi, Side side,
                                 int depth, double tol, int table_depth) {
  if (side == Side::Unstable)
    return boundary_measure_on(std::move(part), phi, depth, tol, table_depth);
  auto part_t = std::make_shared<const MarkovPartition>(part->transposed());
  return boundary_measure_on(std::move(part_t), phi, depth, tol, table_depth);
}

double CoordinateFunction::eval(double t) const {
  const double lo = breakpoints.front(), hi = breakpoints.back();
  if (t <= lo) return 0.0;
  if (t >= hi) return 1.0;
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - breakpoints.begin());
  const double t0 = breakpoints[i - 1], t1 = breakpoints[i];
  const double f0 = cumulative[i - 1], f1 = cumulative[i];
  if (t1 <= t0) return f1;
  return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
}

double CoordinateFunction::inverse(double y) const {
  double lo = breakpoints.front(), hi = breakpoints.back();
  if (y <= 0.0) return lo;
  if (y >= 1.0) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eval(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

CoordinateFunction coordinate_function(
    const GibbsMeasure& measure, std::shared_ptr<const SegmentCoding> segment,
    int depth) {
  if (depth > measure.depth)
    fail(ErrorCode::InsufficientDepth,
         "coordinate depth exceeds the materialized measure depth");
  const SubshiftSpec& spec = *measure.spec;
  WordIndexer idx(spec, depth);
  struct Piece {
    double lo, hi, mass;
  };
  std::vector<Piece> pieces;
  pieces.reserve(idx.count());
  double max_mass = 0.0;
  for (std::size_t r = 0; r < idx.count(); ++r) {
    Word w = idx.word_at(r);
    const auto iv = segment->cylinder_interval(w.symbols);
    const double m = depth == measure.depth
                         ? measure.mass_at_rank(r)
                         : measure.mass(std::span<const Symbol>(w.symbols));
    pieces.push_back(Piece{iv.lo, iv.hi, m});
    max_mass = std::max(max_mass, m);
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  const double scale = segment->total_length();
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    if (pieces[i + 1].lo < pieces[i].hi - 1e-9 * scale)
      fail(ErrorCode::OrderingFailure,
           "cylinder images overlap beyond tolerance");
  }
  CoordinateFunction F;
  F.segment = std::move(segment);
  F.depth = depth;
  F.breakpoints.reserve(pieces.size() + 1);
  F.cumulative.reserve(pieces.size() + 1);
  double acc = 0.0;
  F.breakpoints.push_back(pieces.front().lo);
  F.cumulative.push_back(0.0);
  for (const Piece& p : pieces) {
    acc += p.mass;
    F.breakpoints.push_back(p.hi);
    F.cumulative.push_back(acc);
  }
  // normalize the accumulated total to exactly 1
  for (double& v : F.cumulative) v /= acc;
  F.resolution = max_mass / acc;
  return F;
}

SmoothStructure synthesize_structure(
    std::shared_ptr<const MarkovPartition> part, const PotentialInput& phi_u,
    const PotentialInput& phi_s, int depth, double tol) {
  SmoothStructure st;
  st.part = part;
  st.part_t = std::make_shared<const MarkovPartition>(part->transposed());
  st.depth = depth;
  st.side_u = boundary_measure_on(st.part, phi_u, depth, tol);
  st.side_s = boundary_measure_on(st.part_t, phi_s, depth, tol);
  st.P_u = st.side_u.pressure_raw;
  st.P_s = st.side_s.pressure_raw;
  st.F_u = coordinate_function(st.side_u.measure, st.side_u.segment, depth);
  st.F_s = coordinate_function(st.side_s.measure, st.side_s.segment, depth);
  st.input_u = phi_u;
  st.input_s = phi_s;
  return st;
}

namespace {

// Torus point with unstable-segment parameter tu and stable-segment
// parameter ts. Direct when one box carries both offsets; otherwise resolved
// through the smallest lattice translations connecting the two leaves.
Vec2 segment_pair_point(const SmoothStructure& st, double tu, double ts) {
  const MarkovPartition& P = *st.part;
  const MarkovPartition& Pt = *st.part_t;
  const int r = P.symbols();
  // parameters live on half-open ranges; F values of exactly 1 would land
  // on the excluded endpoint
  tu = std::min(std::max(tu, P.t_min), std::nextafter(P.t_max, P.t_min));
  ts = std::min(std::max(ts, Pt.t_min), std::nextafter(Pt.t_max, Pt.t_min));
  // edge-snapped membership, matching the locate() convention
  constexpr double kEdgeTol = 1e-12;
  auto in_range = [](double x, double lo, double hi) {
    return x >= lo - kEdgeTol && x < hi - kEdgeTol;
  };
  auto clamp_range = [](double x, double lo, double hi) {
    return std::min(std::max(x, lo), hi);
  };
  for (int b = 0; b < r; ++b) {
    const double u = tu - P.tau_offset[0][b];
    const double s = ts - Pt.tau_offset[0][b];
    if (in_range(u, P.boxes[b].u0, P.boxes[b].u1) &&
        in_range(s, P.boxes[b].s0, P.boxes[b].s1)) {
      const Vec2 plane =
          P.aut.to_plane(clamp_range(u, P.boxes[b].u0, P.boxes[b].u1),
                         clamp_range(s, P.boxes[b].s0, P.boxes[b].s1));
      return Vec2{mod1(plane.x), mod1(plane.y)};
    }
  }
  // Mixed pair: the two segment points sit in boxes with different offsets.
  // Take the leaf intersection with the least travel along both leaves.
  int b_u = -1, b_s = -1;
  double u_loc = 0.0, s_loc = 0.0;
  for (int b = 0; b < r; ++b) {
    const double u = tu - P.tau_offset[0][b];
    if (in_range(u, P.boxes[b].u0, P.boxes[b].u1)) {
      b_u = b;
      u_loc = clamp_range(u, P.boxes[b].u0, P.boxes[b].u1);
    }
    const double s = ts - Pt.tau_offset[0][b];
    if (in_range(s, P.boxes[b].s0, P.boxes[b].s1)) {
      b_s = b;
      s_loc = clamp_range(s, P.boxes[b].s0, P.boxes[b].s1);
    }
  }
  if (b_u < 0 || b_s < 0)
    fail(ErrorCode::BadInput, "segment parameters outside their ranges");
  // tau_u point in box coordinates (on its lower edge); tau_s point on its
  // left edge
  const double pu_s = P.boxes[b_u].s0;
  const double ps_u = P.boxes[b_s].u0;

  auto leaf_travel = [&](double uq, double sq, bool stable_leaf) {
    // distance along the stable (vertical) leaf from the tau_u point, or
    // along the unstable (horizontal) leaf from the tau_s point
    double best = std::numeric_limits<double>::infinity();
    for (int a = -3; a <= 3; ++a)
      for (int b = -3; b <= 3; ++b) {
        const double wx = a * P.z1.x + b * P.z2.x;
        const double wy = a * P.z1.y + b * P.z2.y;
        if (stable_leaf) {
          if (std::abs(uq - (u_loc + wx)) < 1e-9)
            best = std::min(best, std::abs(sq - (pu_s + wy)));
        } else {
          if (std::abs(sq - (s_loc + wy)) < 1e-9)
            best = std::min(best, std::abs(uq - (ps_u + wx)));
        }
      }
    return best;
  };

  double best_cost = std::numeric_limits<double>::infinity();
  Vec2 best{};
  for (int a1 = -2; a1 <= 2; ++a1)
    for (int b1 = -2; b1 <= 2; ++b1)
      for (int a2 = -2; a2 <= 2; ++a2)
        for (int b2 = -2; b2 <= 2; ++b2) {
          const double u = u_loc + a1 * P.z1.x + b1 * P.z2.x;
          const double s = s_loc + a2 * P.z1.y + b2 * P.z2.y;
          for (int b = 0; b < r; ++b) {
            if (in_range(u, P.boxes[b].u0, P.boxes[b].u1) &&
                in_range(s, P.boxes[b].s0, P.boxes[b].s1)) {
              const double cost =
                  leaf_travel(u, s, true) + leaf_travel(u, s, false);
              if (cost < best_cost - 1e-15) {
                best_cost = cost;
                const Vec2 plane = P.aut.to_plane(u, s);
                best = Vec2{mod1(plane.x), mod1(plane.y)};
              }
            }
          }
        }
  if (!std::isfinite(best_cost))
    fail(ErrorCode::BadInput, "segment pair does not resolve to a point");
  return best;
}

std::pair<double, double> segment_parameters(const SmoothStructure& st,
                                             const Vec2& p) {
  const auto loc = st.part->locate_point(p);
  const double tu = loc.u + st.part->tau_offset[0][loc.box];
  const double ts = loc.s + st.part_t->tau_offset[0][loc.box];
  return {tu, ts};
}

}  // namespace

Vec2 apply_h(const SmoothStructure& st, const Vec2& p) {
  auto [tu, ts] = segment_parameters(st, p);
  const double lu0 = st.part->t_min, lu1 = st.part->t_max;
  const double ls0 = st.part_t->t_min, ls1 = st.part_t->t_max;
  const double X = lu0 + (lu1 - lu0) * st.F_u.eval(tu);
  const double Y = ls0 + (ls1 - ls0) * st.F_s.eval(ts);
  return segment_pair_point(st, X, Y);
}

Vec2 apply_h_inverse(const SmoothStructure& st, const Vec2& q) {
  auto [X, Y] = segment_parameters(st, q);
  const double lu0 = st.part->t_min, lu1 = st.part->t_max;
  const double ls0 = st.part_t->t_min, ls1 = st.part_t->t_max;
  const double tu = st.F_u.inverse((X - lu0) / (lu1 - lu0));
  const double ts = st.F_s.inverse((Y - ls0) / (ls1 - ls0));
  return segment_pair_point(st, tu, ts);
}

Vec2 conjugated_map(const SmoothStructure& st, const Vec2& q) {
  return apply_h(st, st.part->aut.apply(apply_h_inverse(st, q)));
}

EigenvaluePair measured_eigenvalues(const SmoothStructure& st, const Vec2& p,
                                    int period, int scale_depth) {
  const int n = period;
  if (scale_depth < 2)
    fail(ErrorCode::InsufficientDepth, "scale depth must be at least 2");
  // Interval of the depth-(scale_depth + n) cylinder at p and of its n-fold
  // shift; cylinders deeper than the materialized tables are priced by the
  // Radon-Nikodym recursion inside deep_mass.
  const int len = scale_depth + n;
  Itinerary it = encode_point(*st.part, p, len + 1);

  EigenvaluePair out;
  {
    std::span<const Symbol> w(it.forward.data(), len);
    const double full = st.side_u.measure.deep_mass(w);
    const double stripped = st.side_u.measure.deep_mass(w.subspan(n));
    out.lambda_u = stripped / full;
  }
  {
    // transpose-side forward word: x_0, x_{-1}, x_{-2}, ...
    std::vector<Symbol> v;
    v.reserve(len);
    v.push_back(it.forward[0]);
    for (int i = 0; i + 1 < len; ++i) v.push_back(it.backward[i]);
    std::span<const Symbol> ws(v);
    const double full = st.side_s.measure.deep_mass(ws);
    const double stripped = st.side_s.measure.deep_mass(ws.subspan(n));
    out.lambda_s = full / stripped;
  }
  return out;
}

namespace {

double birkhoff_on_torus(const PotentialInput& input,
                         const MarkovPartition& part, const Vec2& p, int n,
                         bool inverse_orbit) {
  if (input.trig) {
    double acc = 0.0;
    Vec2 q = p;
    for (int k = 0; k < n; ++k) {
      acc += input.trig->eval(q);
      q = inverse_orbit ? part.aut.apply_inverse(q) : part.aut.apply(q);
    }
    return acc;
  }
  if (input.table) {
    const int k = input.table->depth();
    Itinerary it = encode_point(part, p, n + k + 2);
    std::vector<Symbol> w;
    if (!inverse_orbit) {
      w.assign(it.forward.begin(), it.forward.end());
    } else {
      w.push_back(it.forward[0]);
      w.insert(w.end(), it.backward.begin(), it.backward.end());
    }
    return birkhoff_sum(*input.table, std::span<const Symbol>(w), n);
  }
  return 0.0;
}

}  // namespace

EigenvaluePair predicted_eigenvalues(const SmoothStructure& st, const Vec2& p,
                                     int period) {
  EigenvaluePair out;
  const double su =
      birkhoff_on_torus(st.input_u, *st.part, p, period, /*inverse=*/false);
  // stable-side tables live on the transposed shift and sum along the
  // backward orbit; torus functions sum along the forward orbit directly
  const double ss = st.input_s.table
                        ? birkhoff_on_torus(st.input_s, *st.part_t, p, period,
                                            /*inverse=*/false)
                        : birkhoff_on_torus(st.input_s, *st.part, p, period,
                                            /*inverse=*/false);
  out.lambda_u = std::exp(-su + period * st.P_u);
  out.lambda_s = std::exp(ss - period * st.P_s);
  return out;
}

double finite_difference_expansion(const SmoothStructure& st, const Vec2& p,
                                   int period, double step) {
  if (step <= 0.0) fail(ErrorCode::BadInput, "step must be positive");
  // displace p along its unstable fiber in synthesized coordinates, push
  // both points through g^n, and compare the coordinate displacements
  const auto loc = st.part->locate_point(p);
  const double tu = loc.u + st.part->tau_offset[0][loc.box];
  const double ts = loc.s + st.part_t->tau_offset[0][loc.box];
  const double len = st.part->t_max - st.part->t_min;
  const double y0 = st.F_u.eval(tu);
  const double y1 = y0 + step / len;
  if (y1 >= 1.0) fail(ErrorCode::BadInput, "step leaves the chart");
  const Vec2 q0 = apply_h(st, p);
  // neighbour with the same stable coordinate, offset in F_u
  const double tu1 = st.F_u.inverse(y1);
  const Vec2 p1 = [&] {
    // same box, same s, displaced u
    const double u1 = tu1 - st.part->tau_offset[0][loc.box];
    const Vec2 pl = st.part->aut.to_plane(u1, loc.s);
    return Vec2{mod1(pl.x), mod1(pl.y)};
  }();
  (void)ts;
  const Vec2 q1 = apply_h(st, p1);
  Vec2 g0 = q0, g1 = q1;
  for (int k = 0; k < period; ++k) {
    g0 = conjugated_map(st, g0);
    g1 = conjugated_map(st, g1);
  }
  auto coord = [&](const Vec2& q) {
    const auto l = st.part->locate_point(q);
    return l.u + st.part->tau_offset[0][l.box];
  };
  const double before = coord(q1) - coord(q0);
  const double after = coord(g1) - coord(g0);
  if (before == 0.0) fail(ErrorCode::BadInput, "degenerate displacement");
  return std::abs(after / before);
}

std::vector<Vec2> periodic_orbit_representatives(const ToralAutomorphism& aut,
                                                 int n) {
  std::vector<Vec2> pts = torus_periodic_points(aut, n);
  // drop points of strictly smaller period
  std::vector<Vec2> lower;
  for (int m = 1; m < n; ++m) {
    if (n % m != 0) continue;
    auto sub = torus_periodic_points(aut, m);
    lower.insert(lower.end(), sub.begin(), sub.end());
  }
  auto near = [](const Vec2& a, const Vec2& b) {
    auto d = [](double x, double y) {
      double t = std::abs(x - y);
      return std::min(t, 1.0 - t);
    };
    return d(a.x, b.x) < 1e-9 && d(a.y, b.y) < 1e-9;
  };
  std::vector<Vec2> exact;
  for (const Vec2& p : pts) {
    bool low = false;
    for (const Vec2& q : lower)
      if (near(p, q)) {
        low = true;
        break;
      }
    if (!low) exact.push_back(p);
  }
  std::vector<Vec2> reps;
  std::vector<char> used(exact.size(), 0);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    if (used[i]) continue;
    reps.push_back(exact[i]);
    Vec2 q = exact[i];
    for (int k = 0; k + 1 < n; ++k) {
      q = aut.apply(q);
      for (std::size_t j = 0; j < exact.size(); ++j)
        if (!used[j] && near(q, exact[j])) used[j] = 1;
    }
  }
  return reps;
}

}  // namespace gibbs
