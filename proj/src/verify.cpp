#include "gibbs/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace gibbs {

CheckReport CheckReport::make(std::string name, double deviation, double bound,
                              std::size_t samples, std::string params) {
  CheckReport rep;
  rep.name = std::move(name);
  rep.worst_deviation = deviation;
  rep.bound = bound;
  rep.samples = samples;
  rep.params = std::move(params);
  rep.pass = std::isfinite(deviation) && std::isfinite(bound) &&
             deviation <= bound;
  return rep;
}

CheckReport livshitz_check(const SubshiftSpec& spec, const Potential& phi,
                           const Potential& psi, int max_period, double tol) {
  double worst = 0.0;
  std::size_t count = 0;
  for (int n = 1; n <= max_period; ++n) {
    for (const Word& w : periodic_words(spec, n)) {
      const double a = periodic_birkhoff_sum(phi, w.symbols);
      const double b = periodic_birkhoff_sum(psi, w.symbols);
      worst = std::max(worst, std::abs(a - b));
      ++count;
    }
  }
  std::ostringstream os;
  os << "max_period=" << max_period << " tol=" << tol;
  return CheckReport::make("livshitz_periodic_sums", worst, tol, count,
                           os.str());
}

CheckReport gibbs_onesided_check(const GibbsMeasure& measure,
                                 std::size_t samples, std::uint64_t seed) {
  const SubshiftSpec& spec = *measure.spec;
  const Potential& phi = measure.potential;
  const int depth = measure.depth;
  const int k = phi.depth();
  std::mt19937_64 rng(seed);
  WordIndexer idx(spec, depth);
  double worst = 0.0;
  std::size_t done = 0;
  const int n_max = depth - k;
  if (n_max < 1)
    fail(ErrorCode::InsufficientDepth, "measure too shallow for the check");
  for (std::size_t i = 0; i < samples; ++i) {
    const int n = 1 + int(rng() % std::uint64_t(n_max));
    Word w = idx.word_at(rng() % idx.count());
    // replace the first n symbols by another admissible n-prefix
    std::vector<Symbol> tail(w.symbols.begin() + n, w.symbols.end());
    std::vector<Symbol> v;
    for (int attempt = 0; attempt < 32 && v.empty(); ++attempt) {
      std::vector<Symbol> cand(n);
      bool ok = true;
      for (int j = n - 1; j >= 0; --j) {
        const Symbol next = (j == n - 1) ? tail.front() : cand[j + 1];
        std::vector<Symbol> choices;
        for (int s = 0; s < spec.alphabet_size; ++s)
          if (spec.admissible(Symbol(s), next)) choices.push_back(Symbol(s));
        if (choices.empty()) {
          ok = false;
          break;
        }
        cand[j] = choices[rng() % choices.size()];
      }
      if (ok) {
        v = std::move(cand);
        v.insert(v.end(), tail.begin(), tail.end());
      }
    }
    if (v.empty()) continue;
    const double mw = measure.mass(std::span<const Symbol>(w.symbols));
    const double mv = measure.mass(std::span<const Symbol>(v));
    const double lhs = std::log(mv / mw);
    const double rhs = birkhoff_sum(phi, std::span<const Symbol>(v), n) -
                       birkhoff_sum(phi, w.symbols, n);
    worst = std::max(worst, std::abs(lhs - rhs));
    ++done;
  }
  const double tail_bound = phi.holder().tail(depth - k - 1);
  const double bound = 1e-10 + tail_bound + 4.0 * phi.sampling_error() +
                       measure.iteration_residual * 10.0;
  std::ostringstream os;
  os << "depth=" << depth << " potential_depth=" << k;
  return CheckReport::make("gibbs_onesided_ratio", worst, bound, done,
                           os.str());
}

CheckReport holonomy_rn_check(const BoundaryMeasure& side, std::size_t pairs,
                              int word_depth, std::uint64_t seed) {
  const MarkovPartition& part = *side.partition;
  const GibbsMeasure& mu = side.measure;
  const SubshiftSpec& spec = *mu.spec;
  const Potential& phi = mu.potential;  // pressure-zero reduced table
  const SegmentCoding seg(part, 0);
  std::mt19937_64 rng(seed);

  // deep cumulative over the segment for interval masses
  CoordinateFunction C = coordinate_function(mu, side.segment, mu.depth);
  const double res = C.resolution;

  WordIndexer idx(spec, word_depth);
  std::size_t ok = 0, failed = 0, done = 0, boundary_flagged = 0;
  double worst_ratio_dev = 0.0;
  double one_step_worst = 0.0;
  const int code_depth = mu.depth;

  for (std::size_t i = 0; i < 20 * pairs && done < pairs; ++i) {
    // source fiber: a box and an interior height; target fiber likewise,
    // connected along the stable direction
    const int a = int(rng() % part.symbols());
    const EigenBox& A = part.boxes[a];
    std::uniform_real_distribution<double> SU(0.05, 0.95);
    const double s1 = A.s0 + SU(rng) * (A.s1 - A.s0);
    const int b = int(rng() % part.symbols());
    const EigenBox& B = part.boxes[b];
    const double s2 = B.s0 + SU(rng) * (B.s1 - B.s0);

    // a cylinder sub-interval on the source fiber, starting with symbol a
    Word w = idx.word_at(idx.prefix_range(std::vector<Symbol>{Symbol(a)}).first +
                         rng() % (idx.prefix_range(std::vector<Symbol>{Symbol(a)}).second -
                                  idx.prefix_range(std::vector<Symbol>{Symbol(a)}).first));
    const auto I = seg.cylinder_interval(w.symbols);
    const double u_lo = I.lo - part.tau_offset[0][a];
    const double u_hi = I.hi - part.tau_offset[0][a];
    const double u_c = 0.5 * (u_lo + u_hi);

    // lattice translation with the translated interval inside box b
    bool found = false;
    double du = 0.0;
    for (int p = -2; p <= 2 && !found; ++p)
      for (int q = -2; q <= 2 && !found; ++q) {
        const double off = p * part.z1.x + q * part.z2.x;
        if (u_lo + off >= B.u0 - 1e-12 && u_hi + off <= B.u1 + 1e-12) {
          du = off;
          found = true;
        }
      }
    if (!found) continue;  // fibers not holonomy related for this interval
    ++done;

    // measured interval masses through the cumulative function
    const double t1_lo = I.lo, t1_hi = I.hi;
    const double t2_lo = u_lo + du + part.tau_offset[0][b];
    const double t2_hi = u_hi + du + part.tau_offset[0][b];
    const double mU = C.eval(t1_hi) - C.eval(t1_lo);
    const double mV = C.eval(t2_hi) - C.eval(t2_lo);

    // transverse cocycle between the two fiber points over the interval
    const Vec2 y = [&] {
      const Vec2 pl = part.aut.to_plane(u_c, s1);
      return Vec2{pl.x - std::floor(pl.x), pl.y - std::floor(pl.y)};
    }();
    const Vec2 yp = [&] {
      const Vec2 pl = part.aut.to_plane(u_c + du, s2);
      return Vec2{pl.x - std::floor(pl.x), pl.y - std::floor(pl.y)};
    }();
    Itinerary iy = encode_point(part, y, code_depth);
    Itinerary iyp = encode_point(part, yp, code_depth);
    double cocycle;
    try {
      cocycle = transverse_cocycle(phi, iy.forward, iyp.forward, 1e-12);
    } catch (const Error&) {
      ++boundary_flagged;
      continue;
    }

    const double lhs = std::log(mV / mU);
    const double dev = std::abs(lhs - cocycle);
    const double bound = 4.0 * res / std::max(mU, 1e-300) +
                         8.0 * phi.sampling_error() + 1e-8;
    worst_ratio_dev = std::max(worst_ratio_dev, dev / bound);
    if (dev <= bound)
      ++ok;
    else
      ++failed;

    // one-step identity: Phi+(Ly -> Ly') - Phi+(y -> y') = -phi+(y') + phi+(y)
    std::span<const Symbol> fy(iy.forward.begin() + 1, iy.forward.end());
    std::span<const Symbol> fyp(iyp.forward.begin() + 1, iyp.forward.end());
    try {
      const double c2 = transverse_cocycle(phi, fy, fyp, 1e-12);
      const double one_step = c2 - cocycle + phi.value(iyp.forward) -
                              phi.value(iy.forward);
      one_step_worst = std::max(one_step_worst, std::abs(one_step));
    } catch (const Error&) {
    }
  }

  const double frac_ok = done == 0 ? 0.0 : double(ok) / double(done);
  std::ostringstream os;
  os << "pairs=" << done << " word_depth=" << word_depth
     << " one_step_identity_worst=" << one_step_worst
     << " boundary_flagged=" << boundary_flagged
     << " worst_relative=" << worst_ratio_dev;
  // pass when at least 99% of sampled pairs meet their bound
  CheckReport rep = CheckReport::make("holonomy_radon_nikodym",
                                      1.0 - frac_ok, 0.01, done, os.str());
  return rep;
}

std::array<CheckReport, 3> partition_geometry_check(
    const MarkovPartition& part, int max_depth) {
  const SubshiftSpec& spec = part.sft();
  const double lam = spec.pf_eigenvalue;
  const int M = spec.mixing_time;
  const int r = spec.alphabet_size;
  // Parry masses mu0[w] = l_{w0} r_{wl} / (lam^{n-1} (l.r))
  const auto& lv = spec.pf_left;
  const auto& rv = spec.pf_right;

  // 1) exponentially decreasing: nested ratio <= lam^{M - m}
  double worst1 = -1e300;
  std::size_t n1 = 0;
  {
    // reachability of symbol pairs in m steps
    std::vector<std::vector<char>> reach(r, std::vector<char>(r, 0));
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) reach[a][b] = char(spec.matrix[a][b] != 0);
    for (int m = 1; m < max_depth; ++m) {
      double worst_ratio = 0.0;
      for (int a_last = 0; a_last < r; ++a_last)
        for (int b_last = 0; b_last < r; ++b_last)
          if (reach[a_last][b_last])
            worst_ratio = std::max(
                worst_ratio, rv[b_last] / rv[a_last] / std::pow(lam, m));
      const double bound = std::pow(lam, M - m);
      worst1 = std::max(worst1, worst_ratio - bound);
      ++n1;
      // advance reachability one step
      std::vector<std::vector<char>> next(r, std::vector<char>(r, 0));
      for (int a = 0; a < r; ++a)
        for (int c = 0; c < r; ++c)
          if (reach[a][c])
            for (int b = 0; b < r; ++b)
              if (spec.matrix[c][b]) next[a][b] = 1;
      reach.swap(next);
    }
  }

  // 2) bounded ratio: child/parent >= lam^{-(M+1)}
  double worst2 = -1e300;
  std::size_t n2 = 0;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      if (spec.matrix[a][b]) {
        const double ratio = rv[b] / (rv[a] * lam);
        worst2 = std::max(worst2, std::pow(lam, -(M + 1)) - ratio);
        ++n2;
      }

  // 3) bounded nearby: adjacent same-depth ratios within [lam^-M, lam^M]
  double worst3 = -1e300;
  std::size_t n3 = 0;
  {
    SegmentCoding seg(part, 0);
    const double lr = [&] {
      double acc = 0.0;
      for (int s = 0; s < r; ++s) acc += lv[s] * rv[s];
      return acc;
    }();
    for (int n = 2; n <= std::min(max_depth, 10); ++n) {
      WordIndexer idx(spec, n);
      std::vector<std::pair<double, double>> iv;  // (lo, mass0)
      iv.reserve(idx.count());
      for (std::size_t k = 0; k < idx.count(); ++k) {
        Word w = idx.word_at(k);
        const double m0 = lv[w.symbols.front()] * rv[w.symbols.back()] /
                          (std::pow(lam, n - 1) * lr);
        iv.push_back({seg.cylinder_interval(w.symbols).lo, m0});
      }
      std::sort(iv.begin(), iv.end());
      for (std::size_t k = 0; k + 1 < iv.size(); ++k) {
        const double ratio = iv[k].second / iv[k + 1].second;
        worst3 = std::max(worst3, ratio - std::pow(lam, M));
        worst3 = std::max(worst3, std::pow(lam, -M) - ratio);
        ++n3;
      }
    }
  }

  std::ostringstream base;
  base << "lambda=" << lam << " M=" << M << " max_depth=" << max_depth;
  return {CheckReport::make("geometry_exponentially_decreasing", worst1, 0.0,
                            n1, base.str()),
          CheckReport::make("geometry_bounded_ratio", worst2, 0.0, n2,
                            base.str()),
          CheckReport::make("geometry_bounded_nearby", worst3, 0.0, n3,
                            base.str())};
}

CheckReport quasisymmetry_check(const MarkovPartition& part,
                                const PotentialInput& phi, int depth,
                                int level_lo, int level_hi) {
  const SubshiftSpec& spec = part.sft();
  auto sp = std::make_shared<const MarkovPartition>(part);

  // d_phi: cumulative of the invariant-normalized measure; d_0: Parry.
  Potential raw;
  if (phi.trig) {
    raw = sample_forward_potential(part, *phi.trig, depth, 1e-9).forward;
  } else if (phi.table) {
    raw = *phi.table;
  } else {
    raw = Potential::constant(spec, 0.0);
  }
  InvariantNormalization norm_phi = invariant_normalization(spec, raw, depth);
  InvariantNormalization norm_0 =
      invariant_normalization(spec, Potential::constant(spec, 0.0), depth);
  auto segment = std::make_shared<const SegmentCoding>(part, 0);
  CoordinateFunction Fphi =
      coordinate_function(norm_phi.invariant, segment, depth);
  CoordinateFunction F0 = coordinate_function(norm_0.invariant, segment, depth);

  if (level_hi < 0) level_hi = depth - 2;
  double K_emp = 1.0;
  std::size_t done = 0;
  for (int j = level_lo; j <= level_hi; ++j) {
    const std::size_t steps = std::size_t(1) << j;
    for (std::size_t i = 0; i + 2 <= steps; ++i) {
      const double t_x = F0.inverse(double(i) / double(steps));
      const double t_z = F0.inverse((double(i) + 1.0) / double(steps));
      const double t_y = F0.inverse((double(i) + 2.0) / double(steps));
      const double lenR = Fphi.eval(t_z) - Fphi.eval(t_x);
      const double lenS = Fphi.eval(t_y) - Fphi.eval(t_z);
      if (lenR <= 0.0 || lenS <= 0.0) continue;
      const double ratio = lenR / lenS;
      K_emp = std::max({K_emp, ratio, 1.0 / ratio});
      ++done;
    }
  }

  // theoretical bound from the measured constants of phi'
  const Potential& phi_prime = norm_phi.phi_prime;
  VariationProfile vp = variation_profile(phi_prime, phi_prime.depth());
  const double var_phi = vp.total + vp.tail_bound;
  const double sup_phi = phi_prime.sup_norm();
  const int M = spec.mixing_time;
  const double h = spec.entropy;
  const double L = std::exp(2.0 * var_phi) * std::exp(M * sup_phi);
  const double N = std::ceil(4.0 * M + 1.0 + std::log(2.0) / h);
  const double K_bound =
      std::pow(L, 2.0 * N + 2.0) * std::exp((2.0 * N + 1.0) * sup_phi);

  std::ostringstream os;
  os << "levels=" << level_lo << ".." << level_hi << " var_phi=" << var_phi
     << " sup_phi=" << sup_phi << " L=" << L << " N=" << N;
  return CheckReport::make("quasisymmetry", K_emp, K_bound, done, os.str());
}

CheckReport boundary_mass_check(const MarkovPartition& part,
                                const PotentialInput& phi, int depth,
                                const std::vector<double>& deltas,
                                double threshold) {
  const SubshiftSpec& spec = part.sft();
  Potential raw;
  if (phi.trig) {
    raw = sample_forward_potential(part, *phi.trig, depth, 1e-9).forward;
  } else if (phi.table) {
    raw = *phi.table;
  } else {
    raw = Potential::constant(spec, 0.0);
  }
  InvariantNormalization norm = invariant_normalization(spec, raw, depth);
  const GibbsMeasure& mu = norm.invariant;

  // two-sided cylinders from words of length 2q+1 (positions -q..q)
  const int q = std::max(1, (mu.depth - 1) / 2);
  const int len = 2 * q + 1;
  WordIndexer idx(spec, len);

  // boundary edges as segments: vertical (fixed u, s-interval) and
  // horizontal (fixed s, u-interval) sides of every rectangle
  struct Edge {
    bool vertical;
    double coord;      // the fixed coordinate
    double lo, hi;     // extent along the edge
  };
  std::vector<Edge> edges;
  for (const auto& b : part.boxes) {
    edges.push_back(Edge{true, b.u0, b.s0, b.s1});
    edges.push_back(Edge{true, b.u1, b.s0, b.s1});
    edges.push_back(Edge{false, b.s0, b.u0, b.u1});
    edges.push_back(Edge{false, b.s1, b.u0, b.u1});
  }

  struct CylBox {
    double u0, u1, s0, s1, mass;
  };
  std::vector<CylBox> cyls;
  cyls.reserve(idx.count());
  const double lu = part.aut.lambda_u, ls = part.aut.lambda_s;
  for (std::size_t k = 0; k < idx.count(); ++k) {
    Word w = idx.word_at(k);
    std::span<const Symbol> s(w.symbols);
    // forward part w[q..], backward part w[q-1], w[q-2], ...
    std::span<const Symbol> fwd = s.subspan(q);
    double ulo = part.boxes[fwd.back()].u0, uhi = part.boxes[fwd.back()].u1;
    for (int i = int(fwd.size()) - 2; i >= 0; --i) {
      const Vec2 v = part.pair_offset[fwd[i]][fwd[i + 1]];
      ulo = (ulo + v.x) / lu;
      uhi = (uhi + v.x) / lu;
      if (ulo > uhi) std::swap(ulo, uhi);
    }
    double slo = part.boxes[s.front()].s0, shi = part.boxes[s.front()].s1;
    for (int i = 0; i + 1 <= q; ++i) {
      // pair (w[i] -> w[i+1]) pushes the s-interval forward
      const Vec2 v = part.pair_offset[s[i]][s[i + 1]];
      slo = ls * slo - v.y;
      shi = ls * shi - v.y;
      if (slo > shi) std::swap(slo, shi);
    }
    cyls.push_back(CylBox{ulo, uhi, slo, shi, mu.mass_at_rank(idx.rank(s))});
  }

  auto interval_dist = [](double lo1, double hi1, double lo2, double hi2) {
    if (hi1 < lo2) return lo2 - hi1;
    if (hi2 < lo1) return lo1 - hi2;
    return 0.0;
  };
  auto dist_to_edges = [&](const CylBox& c) {
    double best = 1e300;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b) {
        const double ou = a * part.z1.x + b * part.z2.x;
        const double os = a * part.z1.y + b * part.z2.y;
        for (const Edge& e : edges) {
          double du, ds;
          if (e.vertical) {
            du = interval_dist(c.u0, c.u1, e.coord + ou, e.coord + ou);
            ds = interval_dist(c.s0, c.s1, e.lo + os, e.hi + os);
          } else {
            ds = interval_dist(c.s0, c.s1, e.coord + os, e.coord + os);
            du = interval_dist(c.u0, c.u1, e.lo + ou, e.hi + ou);
          }
          best = std::min(best, std::hypot(du, ds));
        }
      }
    return best;
  };

  std::vector<double> masses;
  for (double delta : deltas) {
    double acc = 0.0;
    for (const CylBox& c : cyls)
      if (dist_to_edges(c) < delta) acc += c.mass;
    masses.push_back(acc);
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < masses.size(); ++i)
    if (deltas[i] > deltas[i + 1] && masses[i] < masses[i + 1] - 1e-12)
      monotone = false;
  double smallest_mass = masses.empty() ? 0.0 : masses.back();
  std::size_t arg_min = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i)
    if (deltas[i] <= deltas[arg_min]) {
      arg_min = i;
      smallest_mass = masses[i];
    }

  std::ostringstream os;
  os << "q=" << q << " deltas=";
  for (std::size_t i = 0; i < deltas.size(); ++i)
    os << (i ? "," : "") << deltas[i] << ":" << masses[i];
  os << " monotone=" << (monotone ? 1 : 0);
  const double dev = monotone ? smallest_mass : 1e300;
  return CheckReport::make("boundary_mass", dev, threshold, cyls.size(),
                           os.str());
}

CheckReport variational_check(const SubshiftSpec& spec, const Potential& phi,
                              int depth, int max_period, double tol) {
  PressureResult pr = pressure(spec, phi, depth);
  const int k = phi.depth();
  const int d = std::max(depth - 1, k);

  auto shannon = [](const std::vector<double>& masses) {
    double acc = 0.0;
    for (double m : masses)
      if (m > 0.0) acc -= m * std::log(m);
    return acc;
  };
  auto candidate_deficit = [&](const std::vector<double>& m_d,
                               const std::vector<double>& m_d1) {
    WordIndexer idx(spec, d);
    double integral = 0.0;
    for (std::size_t r = 0; r < idx.count(); ++r) {
      if (m_d[r] <= 0.0) continue;
      Word w = idx.word_at(r);
      integral += m_d[r] * phi.value(w.symbols);
    }
    const double entropy = shannon(m_d1) - shannon(m_d);
    return pr.value - (entropy + integral);
  };

  double worst_negative = 0.0;  // most negative deficit (should stay >= -tol)
  double equilibrium_deficit = 0.0;
  std::size_t count = 0;

  // equilibrium state
  {
    InvariantNormalization norm = invariant_normalization(spec, phi, d + 1);
    WordIndexer idx_d(spec, d);
    std::vector<double> m_d(idx_d.count());
    for (std::size_t r = 0; r < idx_d.count(); ++r) {
      Word w = idx_d.word_at(r);
      m_d[r] = norm.invariant.mass(std::span<const Symbol>(w.symbols));
    }
    WordIndexer idx_d1(spec, d + 1);
    std::vector<double> m_d1(idx_d1.count());
    for (std::size_t r = 0; r < idx_d1.count(); ++r)
      m_d1[r] = norm.invariant.mass_at_rank(r);
    equilibrium_deficit = candidate_deficit(m_d, m_d1);
    worst_negative = std::min(worst_negative, equilibrium_deficit);
    ++count;
  }
  // Parry measure
  {
    InvariantNormalization norm =
        invariant_normalization(spec, Potential::constant(spec, 0.0), d + 1);
    WordIndexer idx_d(spec, d);
    std::vector<double> m_d(idx_d.count());
    for (std::size_t r = 0; r < idx_d.count(); ++r) {
      Word w = idx_d.word_at(r);
      m_d[r] = norm.invariant.mass(std::span<const Symbol>(w.symbols));
    }
    WordIndexer idx_d1(spec, d + 1);
    std::vector<double> m_d1(idx_d1.count());
    for (std::size_t r = 0; r < idx_d1.count(); ++r)
      m_d1[r] = norm.invariant.mass_at_rank(r);
    worst_negative = std::min(worst_negative, candidate_deficit(m_d, m_d1));
    ++count;
  }
  // periodic-orbit measures
  auto periodic_masses = [&](std::span<const Symbol> cycle, int length) {
    WordIndexer idx(spec, length);
    std::vector<double> m(idx.count(), 0.0);
    const int n = int(cycle.size());
    std::vector<Symbol> ext(cycle.begin(), cycle.end());
    for (int i = 0; i < length; ++i) ext.push_back(cycle[i % n]);
    for (int shift = 0; shift < n; ++shift)
      m[idx.rank(std::span<const Symbol>(ext).subspan(shift, length))] +=
          1.0 / n;
    return m;
  };
  for (int n = 1; n <= max_period; ++n) {
    for (const Word& w : periodic_words(spec, n)) {
      auto m_d = periodic_masses(w.symbols, d);
      auto m_d1 = periodic_masses(w.symbols, d + 1);
      worst_negative = std::min(worst_negative, candidate_deficit(m_d, m_d1));
      ++count;
    }
  }

  std::ostringstream os;
  os << "P=" << pr.value << " equilibrium_deficit=" << equilibrium_deficit
     << " max_period=" << max_period << " depth=" << d;
  // deviation: how far the worst candidate dips below zero, and how far the
  // equilibrium state sits above the depth tolerance
  const double deviation =
      std::max(-worst_negative, std::abs(equilibrium_deficit));
  return CheckReport::make("variational_principle", deviation, tol, count,
                           os.str());
}

std::vector<CheckReport> run_verify_suite(
    std::shared_ptr<const MarkovPartition> part, const PotentialInput& phi_u,
    const PotentialInput& phi_s, int depth, std::uint64_t seed) {
  std::vector<CheckReport> out;
  const SubshiftSpec& spec = part->sft();

  SmoothStructure st = synthesize_structure(part, phi_u, phi_s, depth);

  // livshitz on a constructed coboundary pair
  {
    const Potential& base = st.side_u.measure.potential;
    WordIndexer idx(spec, 1);
    std::vector<double> uvals(idx.count());
    for (std::size_t i = 0; i < uvals.size(); ++i)
      uvals[i] = 0.25 * std::sin(1.0 + double(i));
    TransferFunction u;
    u.table = Potential(spec, 1, uvals);
    Potential moved = add_almost_coboundary(base, u, 0.0);
    out.push_back(livshitz_check(spec, base, moved, 5));
  }
  // ratio checks shift cylinders, so they need a potential table strictly
  // shallower than the measure depth
  BoundaryMeasure shallow = boundary_measure(part, phi_u, Side::Unstable,
                                             depth, 1e-9,
                                             std::max(2, depth - 6));
  out.push_back(gibbs_onesided_check(shallow.measure, 400, seed));
  out.push_back(holonomy_rn_check(shallow, 1000,
                                  std::max(4, depth - 6), seed + 1));
  {
    auto geo = partition_geometry_check(*part, depth);
    out.insert(out.end(), geo.begin(), geo.end());
  }
  out.push_back(quasisymmetry_check(*part, phi_u, depth));
  {
    const double lam = std::abs(part->aut.lambda_u);
    std::vector<double> deltas;
    for (int e = 4; e <= 10; e += 2) deltas.push_back(std::pow(lam, -e / 2.0));
    std::sort(deltas.rbegin(), deltas.rend());
    out.push_back(boundary_mass_check(*part, phi_u, depth, deltas, 0.2));
  }
  out.push_back(variational_check(spec, st.side_u.measure.potential,
                                  std::min(depth, 8), 4, 0.05));
  std::sort(out.begin(), out.end(),
            [](const CheckReport& a, const CheckReport& b) {
              return a.name < b.name;
            });
  return out;
}

std::string report_json_line(const CheckReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"name\":\"" << rep.name << "\",\"pass\":"
     << (rep.pass ? "true" : "false")
     << ",\"worst_deviation\":" << rep.worst_deviation
     << ",\"bound\":" << rep.bound << ",\"samples\":" << rep.samples
     << ",\"params\":\"" << rep.params << "\"}";
  return os.str();
}

}  // namespace gibbs
