#include "gibbs/markov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

namespace gibbs {

namespace {

double mod1(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y -= 1.0;
  return y;
}

constexpr int kLatticeSearch = 5;
constexpr double kGeomTol = 1e-9;

}  // namespace

Vec2 ToralAutomorphism::apply(const Vec2& p) const {
  return Vec2{mod1(double(m[0][0]) * p.x + double(m[0][1]) * p.y),
              mod1(double(m[1][0]) * p.x + double(m[1][1]) * p.y)};
}

Vec2 ToralAutomorphism::apply_inverse(const Vec2& p) const {
  // inverse of an integer unimodular matrix
  const double d = double(det);
  const double a = double(m[1][1]) / d, b = -double(m[0][1]) / d;
  const double c = -double(m[1][0]) / d, e = double(m[0][0]) / d;
  return Vec2{mod1(a * p.x + b * p.y), mod1(c * p.x + e * p.y)};
}

Vec2 ToralAutomorphism::to_plane(double u, double s) const {
  return Vec2{u * e_u.x + s * e_s.x, u * e_u.y + s * e_s.y};
}

std::pair<double, double> ToralAutomorphism::to_eigen(const Vec2& p) const {
  const double d = e_u.x * e_s.y - e_s.x * e_u.y;
  return {(p.x * e_s.y - e_s.x * p.y) / d, (e_u.x * p.y - p.x * e_u.y) / d};
}

ToralAutomorphism build_automorphism(const IntMat2& m) {
  ToralAutomorphism aut;
  aut.m = m;
  aut.det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  if (aut.det != 1 && aut.det != -1)
    fail(ErrorCode::NotUnimodular,
         "determinant " + std::to_string(aut.det) + " must be +-1");
  const double tr = double(m[0][0] + m[1][1]);
  const double disc = tr * tr - 4.0 * double(aut.det);
  if (disc <= 0.0)
    fail(ErrorCode::NotHyperbolic, "no real eigenvalue splitting");
  const double sq = std::sqrt(disc);
  const double l1 = (tr + sq) / 2.0, l2 = (tr - sq) / 2.0;
  aut.lambda_u = std::abs(l1) >= std::abs(l2) ? l1 : l2;
  aut.lambda_s = std::abs(l1) >= std::abs(l2) ? l2 : l1;
  if (std::abs(std::abs(aut.lambda_u) - 1.0) < 1e-12 ||
      std::abs(std::abs(aut.lambda_s) - 1.0) < 1e-12)
    fail(ErrorCode::NotHyperbolic, "eigenvalue on the unit circle");
  aut.entropy = std::log(std::abs(aut.lambda_u));

  auto eigvec = [&](double lambda) {
    // (m00 - l) x + m01 y = 0
    Vec2 v;
    if (std::abs(double(m[0][1])) > 1e-14) {
      v = Vec2{double(m[0][1]), lambda - double(m[0][0])};
    } else {
      v = Vec2{lambda - double(m[1][1]), double(m[1][0])};
    }
    const double n = std::hypot(v.x, v.y);
    v = Vec2{v.x / n, v.y / n};
    // fixed orientation: positive y component (positive x when horizontal)
    if (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)) v = Vec2{-v.x, -v.y};
    return v;
  };
  aut.e_u = eigvec(aut.lambda_u);
  aut.e_s = eigvec(aut.lambda_s);

  // eigen-equation residual check
  auto residual = [&](const Vec2& v, double lambda) {
    const double rx = double(m[0][0]) * v.x + double(m[0][1]) * v.y - lambda * v.x;
    const double ry = double(m[1][0]) * v.x + double(m[1][1]) * v.y - lambda * v.y;
    return std::hypot(rx, ry);
  };
  if (residual(aut.e_u, aut.lambda_u) > 1e-12 ||
      residual(aut.e_s, aut.lambda_s) > 1e-12)
    fail(ErrorCode::NoConvergence, "eigenvector residual above 1e-12");
  return aut;
}

MarkovPartition::Located MarkovPartition::locate(double u, double s,
                                                 bool side_below) const {
  // Half-open membership with edge snapping: coordinates within kEdgeTol of
  // an edge are assigned by the lower-closed (or, for side_below, the
  // upper-closed) convention, so exact boundary orbits reduce consistently.
  constexpr double kEdgeTol = 1e-12;
  for (int pass = 0; pass < 2; ++pass) {
    const int K = pass == 0 ? kLatticeSearch : 3 * kLatticeSearch;
    for (int a = -K; a <= K; ++a) {
      for (int b = -K; b <= K; ++b) {
        const double uu = u - a * z1.x - b * z2.x;
        const double ss = s - a * z1.y - b * z2.y;
        for (int k = 0; k < symbols(); ++k) {
          const EigenBox& box = boxes[k];
          if (uu < box.u0 - kEdgeTol || uu >= box.u1 - kEdgeTol) continue;
          const bool s_in = side_below
                                ? (ss > box.s0 + kEdgeTol &&
                                   ss <= box.s1 + kEdgeTol)
                                : (ss >= box.s0 - kEdgeTol &&
                                   ss < box.s1 - kEdgeTol);
          if (s_in)
            return Located{k, std::min(std::max(uu, box.u0), box.u1),
                           std::min(std::max(ss, box.s0), box.s1)};
        }
      }
    }
  }
  fail(ErrorCode::BadInput, "point could not be reduced into the partition");
}

MarkovPartition::Located MarkovPartition::locate_point(const Vec2& p,
                                                       bool side_below) const {
  const Vec2 q{mod1(p.x), mod1(p.y)};
  auto [u, s] = aut.to_eigen(q);
  return locate(u, s, side_below);
}

namespace {

// Lattice offset v = i z1 + j z2 whose second coordinate matches `target`.
std::optional<Vec2> lattice_with_s(const Vec2& z1, const Vec2& z2,
                                   double target) {
  for (int i = -8; i <= 8; ++i) {
    for (int j = -8; j <= 8; ++j) {
      const double vy = i * z1.y + j * z2.y;
      if (std::abs(vy - target) < kGeomTol)
        return Vec2{i * z1.x + j * z2.x, vy};
    }
  }
  return std::nullopt;
}

}  // namespace

MarkovPartition build_partition(const ToralAutomorphism& aut,
                                std::vector<EigenBox> boxes,
                                const Matrix01& transition) {
  MarkovPartition part;
  part.aut = aut;
  part.boxes = std::move(boxes);
  part.shift = std::make_shared<SubshiftSpec>(build_sft(transition));
  if (part.symbols() != part.shift->alphabet_size)
    fail(ErrorCode::BadInput, "box count does not match transition matrix");
  {
    auto [u1, s1] = aut.to_eigen(Vec2{1.0, 0.0});
    auto [u2, s2] = aut.to_eigen(Vec2{0.0, 1.0});
    part.z1 = Vec2{u1, s1};
    part.z2 = Vec2{u2, s2};
  }
  const int r = part.symbols();
  const double lu = aut.lambda_u, ls = aut.lambda_s;

  // Derive the per-pair lattice offsets by sweeping a u-grid at mid-height
  // through each box and reducing the images. A Markov partition with a 0/1
  // coding must realize every transition as a single u-full strip.
  part.pair_offset.assign(r, std::vector<Vec2>(r));
  std::vector<std::vector<char>> realized(r, std::vector<char>(r, 0));
  double strip_dev = 0.0;
  const int grid = 4096;
  for (int a = 0; a < r; ++a) {
    const EigenBox& A = part.boxes[a];
    const double smid = 0.5 * (A.s0 + A.s1);
    int prev_box = -1;
    for (int g = 0; g <= grid; ++g) {
      const double frac = (g + 0.5) / (grid + 1);
      const double u = A.u0 + frac * (A.u1 - A.u0);
      const auto loc = part.locate(lu * u, ls * smid);
      const Vec2 v{lu * u - loc.u, ls * smid - loc.s};
      if (loc.box != prev_box) {
        if (realized[a][loc.box]) {
          // a target revisited after leaving: multiple strips
          fail(ErrorCode::MarkovPropertyViolation,
               "transition " + std::to_string(a) + "->" +
                   std::to_string(loc.box) + " crosses in several strips");
        }
        realized[a][loc.box] = 1;
        part.pair_offset[a][loc.box] = v;
        prev_box = loc.box;
      } else {
        const Vec2& w = part.pair_offset[a][loc.box];
        if (std::hypot(v.x - w.x, v.y - w.y) > 1e-7)
          fail(ErrorCode::MarkovPropertyViolation,
               "inconsistent lattice offset within a strip");
      }
    }
    // Exact strip tiling: from the discovered offsets, the source
    // subinterval for a->b is the affine preimage of box b's u-extent.
    // Their union must tile box a's u-extent.
    std::vector<std::pair<double, double>> strips;
    for (int b = 0; b < r; ++b) {
      if (!realized[a][b]) continue;
      const EigenBox& B = part.boxes[b];
      double lo = (B.u0 + part.pair_offset[a][b].x) / lu;
      double hi = (B.u1 + part.pair_offset[a][b].x) / lu;
      if (lo > hi) std::swap(lo, hi);
      strips.push_back({lo, hi});
    }
    std::sort(strips.begin(), strips.end());
    strip_dev = std::max(strip_dev, std::abs(strips.front().first - A.u0));
    strip_dev = std::max(strip_dev, std::abs(strips.back().second - A.u1));
    for (std::size_t i = 0; i + 1 < strips.size(); ++i)
      strip_dev = std::max(strip_dev,
                           std::abs(strips[i].second - strips[i + 1].first));
  }
  bool match = true;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      if ((transition[a][b] != 0) != (realized[a][b] != 0)) match = false;
  if (!match)
    fail(ErrorCode::MarkovPropertyViolation,
         "realized transitions do not match the transition matrix");
  part.build_checks.transitions_match = true;
  part.build_checks.strip_tiling_deviation = strip_dev;
  if (strip_dev > 1e-6)
    fail(ErrorCode::MarkovPropertyViolation,
         "image strips do not tile target boxes (deviation " +
             std::to_string(strip_dev) + ")");

  // Boundary-segment offsets: each box edge lies on the segment through the
  // origin; the lattice shift with matching s-component gives the parameter.
  for (int side = 0; side < 2; ++side) {
    part.tau_offset[side].assign(r, 0.0);
    for (int b = 0; b < r; ++b) {
      const double s_edge = side == 0 ? part.boxes[b].s0 : part.boxes[b].s1;
      auto v = lattice_with_s(part.z1, part.z2, s_edge);
      if (!v)
        fail(ErrorCode::MarkovPropertyViolation,
             "box edge does not sit on the boundary segment");
      part.tau_offset[side][b] = -v->x;
    }
  }
  // Segment extent: lower-edge intervals must tile an interval.
  {
    std::vector<std::pair<double, double>> iv;
    for (int b = 0; b < r; ++b)
      iv.push_back({part.boxes[b].u0 + part.tau_offset[0][b],
                    part.boxes[b].u1 + part.tau_offset[0][b]});
    std::sort(iv.begin(), iv.end());
    for (std::size_t i = 0; i + 1 < iv.size(); ++i)
      if (std::abs(iv[i].second - iv[i + 1].first) > kGeomTol)
        fail(ErrorCode::MarkovPropertyViolation,
             "boundary segment intervals do not tile");
    part.t_min = iv.front().first;
    part.t_max = iv.back().second;
  }

  // Frozen backward base codings per symbol and side: the backward itinerary
  // of the mid-edge point, long enough for any series truncation in use.
  const int base_len = 96;
  for (int side = 0; side < 2; ++side) {
    part.base_backward[side].assign(r, {});
    for (int b = 0; b < r; ++b) {
      double u = 0.5 * (part.boxes[b].u0 + part.boxes[b].u1);
      double s = side == 0 ? part.boxes[b].s0 : part.boxes[b].s1;
      bool below = side == 1;
      auto& word = part.base_backward[side][b];
      word.reserve(base_len);
      for (int k = 0; k < base_len; ++k) {
        if (ls < 0.0) below = !below;  // orientation flip per backward step
        const auto loc = part.locate(u / lu, s / ls, below);
        word.push_back(static_cast<Symbol>(loc.box));
        u = loc.u;
        s = loc.s;
      }
    }
  }

  double area = 0.0;
  for (const auto& b : part.boxes) area += b.u_extent() * b.s_extent();
  const double basis_det =
      std::abs(aut.e_u.x * aut.e_s.y - aut.e_s.x * aut.e_u.y);
  part.build_checks.area_deviation = std::abs(area * basis_det - 1.0);
  if (part.build_checks.area_deviation > 1e-9)
    fail(ErrorCode::MarkovPropertyViolation, "boxes do not have total area 1");

  auto checks = check_partition(part, 20000, kGeomTol);
  if (checks.cover_failures > 0 || !checks.transitions_match ||
      checks.markov_s_deviation > kGeomTol ||
      checks.markov_u_deviation > kGeomTol)
    fail(ErrorCode::MarkovPropertyViolation, "sampled Markov checks failed");
  checks.strip_tiling_deviation = strip_dev;
  checks.area_deviation = part.build_checks.area_deviation;
  part.build_checks = checks;
  return part;
}

PartitionCheckSummary check_partition(const MarkovPartition& part,
                                      std::size_t samples, double tol,
                                      std::uint64_t seed) {
  PartitionCheckSummary sum;
  sum.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int r = part.symbols();
  const double lu = part.aut.lambda_u, ls = part.aut.lambda_s;

  // cover: random torus points land in exactly one box (locate is exhaustive
  // by construction, so count double-memberships over nearby translates)
  for (std::size_t i = 0; i < samples / 2; ++i) {
    const Vec2 p{U(rng), U(rng)};
    auto [u, s] = part.aut.to_eigen(p);
    int hits = 0;
    for (int a = -kLatticeSearch; a <= kLatticeSearch; ++a)
      for (int b = -kLatticeSearch; b <= kLatticeSearch; ++b) {
        const double uu = u - a * part.z1.x - b * part.z2.x;
        const double ss = s - a * part.z1.y - b * part.z2.y;
        for (int k = 0; k < r; ++k)
          if (uu >= part.boxes[k].u0 && uu < part.boxes[k].u1 &&
              ss >= part.boxes[k].s0 && ss < part.boxes[k].s1)
            ++hits;
      }
    if (hits != 1) sum.cover_failures += 1;
  }

  // Markov iii: images of stable-boundary points stay on stable boundary
  // (vertical edge set); iv: preimages of unstable-boundary points stay on
  // the horizontal edge set.
  auto vertical_dist = [&](double u) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = -2 * kLatticeSearch; a <= 2 * kLatticeSearch; ++a)
      for (int b = -2 * kLatticeSearch; b <= 2 * kLatticeSearch; ++b) {
        const double uu = u - a * part.z1.x - b * part.z2.x;
        for (int k = 0; k < r; ++k) {
          best = std::min(best, std::abs(uu - part.boxes[k].u0));
          best = std::min(best, std::abs(uu - part.boxes[k].u1));
        }
      }
    return best;
  };
  auto horizontal_dist = [&](double s) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = -2 * kLatticeSearch; a <= 2 * kLatticeSearch; ++a)
      for (int b = -2 * kLatticeSearch; b <= 2 * kLatticeSearch; ++b) {
        const double ss = s - a * part.z1.y - b * part.z2.y;
        for (int k = 0; k < r; ++k) {
          best = std::min(best, std::abs(ss - part.boxes[k].s0));
          best = std::min(best, std::abs(ss - part.boxes[k].s1));
        }
      }
    return best;
  };
  for (std::size_t i = 0; i < samples / 4; ++i) {
    const int k = int(rng() % r);
    const EigenBox& box = part.boxes[k];
    const double u = (rng() & 1) ? box.u0 : box.u1;
    sum.markov_s_deviation = std::max(sum.markov_s_deviation,
                                      vertical_dist(lu * u));
    const double s = (rng() & 1) ? box.s0 : box.s1;
    sum.markov_u_deviation = std::max(sum.markov_u_deviation,
                                      horizontal_dist(s / ls));
  }

  // transitions realized on random interior points
  std::vector<std::vector<char>> seen(r, std::vector<char>(r, 0));
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec2 p{U(rng), U(rng)};
    const auto loc = part.locate_point(p);
    const auto img = part.locate(lu * loc.u, ls * loc.s);
    seen[loc.box][img.box] = 1;
    if (!part.sft().matrix[loc.box][img.box]) sum.transitions_match = false;
  }
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      if (part.sft().matrix[a][b] && !seen[a][b]) sum.transitions_match = false;
  (void)tol;
  return sum;
}

namespace {

// The 5-box Adler-Weiss staircase for [[2,1],[1,1]] in the orthonormal
// eigenbasis: the golden two-box fundamental domain refined once under the
// half-step, so that every transition crosses in a single strip.
std::pair<std::vector<EigenBox>, Matrix01> catmap_boxes() {
  const double lam = (1.0 + std::sqrt(5.0)) / 2.0;
  const double a = 1.0 / std::sqrt(lam * lam + 1.0);
  std::vector<EigenBox> boxes = {
      {0.0, a / lam, 0.0, lam * a},
      {a / lam, 2.0 * a / lam, 0.0, lam * a},
      {2.0 * a / lam, lam * a, 0.0, lam * a},
      {0.0, a / lam, lam * a, lam * lam * a},
      {a / lam, a, lam * a, lam * lam * a},
  };
  Matrix01 A = {{1, 1, 1, 0, 0},
                {1, 1, 1, 0, 0},
                {0, 0, 0, 1, 1},
                {1, 1, 1, 0, 0},
                {0, 0, 0, 1, 1}};
  return {std::move(boxes), std::move(A)};
}

IntMat2 mat_mul(const IntMat2& x, const IntMat2& y) {
  IntMat2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
  return out;
}

IntMat2 mat_pow(const IntMat2& x, int n) {
  IntMat2 out{{{1, 0}, {0, 1}}};
  for (int i = 0; i < n; ++i) out = mat_mul(out, x);
  return out;
}

}  // namespace

MarkovPartition catmap_partition(const ToralAutomorphism& aut) {
  const IntMat2 cat{{{2, 1}, {1, 1}}};
  int power = 0;
  for (int p = 1; p <= 6; ++p) {
    if (aut.m == mat_pow(cat, p)) {
      power = p;
      break;
    }
  }
  if (power == 0)
    fail(ErrorCode::UnsupportedMatrix,
         "built-in partition covers [[2,1],[1,1]] and its powers; "
         "supply a partition file for other matrices");

  auto [boxes, A] = catmap_boxes();
  ToralAutomorphism base = build_automorphism(cat);
  MarkovPartition part = build_partition(base, std::move(boxes), A);
  if (power == 1) return part;

  // Refine by admissible words of length `power`: the refined boxes are
  // u-subintervals (full in s) of their leading box, and the word shift
  // gives the transition structure for the power map.
  const SubshiftSpec& spec = part.sft();
  WordIndexer idx(spec, power);
  const int n = static_cast<int>(idx.count());
  std::vector<EigenBox> rboxes(n);
  for (int i = 0; i < n; ++i) {
    Word w = idx.word_at(i);
    // nested affine chain in box-local u coordinates
    double lo = part.boxes[w.symbols.back()].u0;
    double hi = part.boxes[w.symbols.back()].u1;
    for (int k = static_cast<int>(w.symbols.size()) - 2; k >= 0; --k) {
      const Vec2 v = part.pair_offset[w.symbols[k]][w.symbols[k + 1]];
      lo = (lo + v.x) / part.aut.lambda_u;
      hi = (hi + v.x) / part.aut.lambda_u;
      if (lo > hi) std::swap(lo, hi);
    }
    const EigenBox& head = part.boxes[w.symbols.front()];
    rboxes[i] = EigenBox{lo, hi, head.s0, head.s1};
  }
  Matrix01 B(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) {
    Word wi = idx.word_at(i);
    for (int j = 0; j < n; ++j) {
      Word wj = idx.word_at(j);
      B[i][j] = spec.admissible(wi.symbols.back(), wj.symbols.front()) ? 1 : 0;
    }
  }
  return build_partition(build_automorphism(aut.m), std::move(rboxes), B);
}

MarkovPartition MarkovPartition::transposed() const {
  IntMat2 inv{};
  inv[0][0] = aut.det * aut.m[1][1];
  inv[0][1] = -aut.det * aut.m[0][1];
  inv[1][0] = -aut.det * aut.m[1][0];
  inv[1][1] = aut.det * aut.m[0][0];
  // aut.det is +-1 so this is the integer inverse
  ToralAutomorphism ia = build_automorphism(inv);
  std::vector<EigenBox> tboxes(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i)
    tboxes[i] = EigenBox{boxes[i].s0, boxes[i].s1, boxes[i].u0, boxes[i].u1};
  return build_partition(ia, std::move(tboxes), transpose(shift->matrix));
}

Itinerary encode_point(const MarkovPartition& part, const Vec2& p, int n) {
  Itinerary it;
  const double lu = part.aut.lambda_u, ls = part.aut.lambda_s;
  auto loc = part.locate_point(p);
  it.forward.push_back(static_cast<Symbol>(loc.box));
  {
    auto cur = loc;
    for (int k = 0; k < n; ++k) {
      cur = part.locate(lu * cur.u, ls * cur.s);
      it.forward.push_back(static_cast<Symbol>(cur.box));
    }
  }
  {
    auto cur = loc;
    for (int k = 0; k < n; ++k) {
      cur = part.locate(cur.u / lu, cur.s / ls);
      it.backward.push_back(static_cast<Symbol>(cur.box));
    }
  }
  return it;
}

DecodedPoint decode_word(const MarkovPartition& part,
                         std::span<const Symbol> backward,
                         std::span<const Symbol> forward) {
  if (forward.empty()) fail(ErrorCode::BadInput, "empty forward word");
  const SubshiftSpec& spec = part.sft();
  for (std::size_t i = 0; i + 1 < forward.size(); ++i)
    if (!spec.admissible(forward[i], forward[i + 1]))
      fail(ErrorCode::InadmissibleWord, "forward word inadmissible");
  if (!backward.empty()) {
    if (!spec.admissible(backward[0], forward[0]))
      fail(ErrorCode::InadmissibleWord, "backward word inadmissible");
    for (std::size_t i = 0; i + 1 < backward.size(); ++i)
      if (!spec.admissible(backward[i + 1], backward[i]))
        fail(ErrorCode::InadmissibleWord, "backward word inadmissible");
  }
  const double lu = part.aut.lambda_u, ls = part.aut.lambda_s;

  // forward word pins u by an affine contraction per symbol
  double ulo = part.boxes[forward.back()].u0;
  double uhi = part.boxes[forward.back()].u1;
  for (int k = static_cast<int>(forward.size()) - 2; k >= 0; --k) {
    const Vec2 v = part.pair_offset[forward[k]][forward[k + 1]];
    ulo = (ulo + v.x) / lu;
    uhi = (uhi + v.x) / lu;
    if (ulo > uhi) std::swap(ulo, uhi);
  }
  // backward word pins s: push the base box interval forward
  double slo, shi;
  if (backward.empty()) {
    slo = part.boxes[forward[0]].s0;
    shi = part.boxes[forward[0]].s1;
  } else {
    slo = part.boxes[backward.back()].s0;
    shi = part.boxes[backward.back()].s1;
    for (int k = static_cast<int>(backward.size()) - 1; k >= 1; --k) {
      const Vec2 v = part.pair_offset[backward[k]][backward[k - 1]];
      slo = ls * slo - v.y;
      shi = ls * shi - v.y;
      if (slo > shi) std::swap(slo, shi);
    }
    const Vec2 v = part.pair_offset[backward[0]][forward[0]];
    slo = ls * slo - v.y;
    shi = ls * shi - v.y;
    if (slo > shi) std::swap(slo, shi);
  }

  DecodedPoint out;
  out.box = forward[0];
  out.u = 0.5 * (ulo + uhi);
  out.s = 0.5 * (slo + shi);
  out.radius = 0.5 * std::hypot(uhi - ulo, shi - slo);
  const Vec2 plane = part.aut.to_plane(out.u, out.s);
  out.point = Vec2{mod1(plane.x), mod1(plane.y)};
  return out;
}

std::vector<Vec2> torus_periodic_points(const ToralAutomorphism& aut, int n) {
  if (n < 1) fail(ErrorCode::BadInput, "period must be >= 1");
  IntMat2 p = mat_pow(aut.m, n);
  p[0][0] -= 1;
  p[1][1] -= 1;
  const long long det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
  if (det == 0) fail(ErrorCode::NotHyperbolic, "L^n - I is singular");
  // x = adj(P) k / det with both coordinates in [0,1): exact integer tests
  const long long adj[2][2] = {{p[1][1], -p[0][1]}, {-p[1][0], p[0][0]}};
  const long long d = det;
  // bounding box for k = P x, x in [0,1)^2
  long long kx_lo = 0, kx_hi = 0, ky_lo = 0, ky_hi = 0;
  for (int cx = 0; cx <= 1; ++cx)
    for (int cy = 0; cy <= 1; ++cy) {
      const long long vx = p[0][0] * cx + p[0][1] * cy;
      const long long vy = p[1][0] * cx + p[1][1] * cy;
      kx_lo = std::min(kx_lo, vx);
      kx_hi = std::max(kx_hi, vx);
      ky_lo = std::min(ky_lo, vy);
      ky_hi = std::max(ky_hi, vy);
    }
  std::vector<Vec2> out;
  for (long long kx = kx_lo - 1; kx <= kx_hi + 1; ++kx) {
    for (long long ky = ky_lo - 1; ky <= ky_hi + 1; ++ky) {
      const long long nx = adj[0][0] * kx + adj[0][1] * ky;
      const long long ny = adj[1][0] * kx + adj[1][1] * ky;
      // x = nx/d in [0,1) and y = ny/d in [0,1)
      auto in_unit = [&](long long num) {
        if (d > 0) return num >= 0 && num < d;
        return num <= 0 && num > d;
      };
      if (in_unit(nx) && in_unit(ny))
        out.push_back(Vec2{double(nx) / double(d), double(ny) / double(d)});
    }
  }
  const std::size_t expect = static_cast<std::size_t>(std::llabs(det));
  if (out.size() != expect)
    fail(ErrorCode::NoConvergence,
         "periodic point enumeration mismatch: got " +
             std::to_string(out.size()) + ", expected " +
             std::to_string(expect));
  std::sort(out.begin(), out.end(), [](const Vec2& a, const Vec2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  return out;
}

Vec2 stable_holonomy(const MarkovPartition& part, const UnstableFiber& from,
                     const UnstableFiber& to, const Vec2& point) {
  const auto loc = part.locate_point(point);
  if (loc.box != from.box || std::abs(loc.s - from.s) > 1e-9)
    fail(ErrorCode::BadInput, "point does not lie on the source fiber");
  const EigenBox& target = part.boxes[to.box];
  if (to.s < target.s0 - 1e-12 || to.s > target.s1 + 1e-12)
    fail(ErrorCode::BadInput, "target fiber height outside its rectangle");
  // transport along the stable direction: same unstable coordinate up to a
  // small lattice translation connecting the two product charts
  double best_cost = std::numeric_limits<double>::infinity();
  double best_u = 0.0;
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      const double u = loc.u + a * part.z1.x + b * part.z2.x;
      if (u < target.u0 - 1e-12 || u >= target.u1 + 1e-12) continue;
      const double s_travel =
          std::abs((loc.s + a * part.z1.y + b * part.z2.y) - to.s);
      const double cost = s_travel + 1e-6 * (std::abs(a) + std::abs(b));
      if (cost < best_cost) {
        best_cost = cost;
        best_u = std::min(std::max(u, target.u0), target.u1);
      }
    }
  }
  if (!std::isfinite(best_cost))
    fail(ErrorCode::NotHolonomyRelated,
         "fibers are not connected by local stable leaves");
  const Vec2 plane = part.aut.to_plane(best_u, to.s);
  return Vec2{mod1(plane.x), mod1(plane.y)};
}

SegmentCoding::SegmentCoding(const MarkovPartition& part, int side)
    : part_(&part), side_(side) {
  if (side != 0 && side != 1) fail(ErrorCode::BadInput, "side must be 0 or 1");
  const int r = part.symbols();
  J_.resize(r);
  for (int b = 0; b < r; ++b) {
    J_[b] = Interval{part.boxes[b].u0 + part.tau_offset[side][b],
                     part.boxes[b].u1 + part.tau_offset[side][b]};
  }
  c_.assign(r, std::vector<double>(r, 0.0));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      if (part.sft().matrix[a][b])
        c_[a][b] = part.tau_offset[side][b] - part.pair_offset[a][b].x -
                   part.aut.lambda_u * part.tau_offset[side][a];
}

SegmentCoding::Interval SegmentCoding::cylinder_interval(
    std::span<const Symbol> word) const {
  if (word.empty()) return Interval{t_min(), t_max()};
  const double lu = part_->aut.lambda_u;
  double lo = J_[word.back()].lo, hi = J_[word.back()].hi;
  for (int k = static_cast<int>(word.size()) - 2; k >= 0; --k) {
    if (!part_->sft().matrix[word[k]][word[k + 1]])
      fail(ErrorCode::InadmissibleWord, "inadmissible word");
    const double c = c_[word[k]][word[k + 1]];
    lo = (lo - c) / lu;
    hi = (hi - c) / lu;
    if (lo > hi) std::swap(lo, hi);
  }
  return Interval{lo, hi};
}

std::vector<Symbol> SegmentCoding::encode_parameter(double t, int depth) const {
  std::vector<Symbol> out;
  out.reserve(depth);
  const double lu = part_->aut.lambda_u;
  auto find_box = [&](double tt) {
    for (std::size_t b = 0; b < J_.size(); ++b)
      if (tt >= J_[b].lo && tt < J_[b].hi) return static_cast<int>(b);
    return -1;
  };
  int b = find_box(t);
  if (b < 0) fail(ErrorCode::BadInput, "parameter outside the segment");
  out.push_back(static_cast<Symbol>(b));
  for (int k = 1; k < depth; ++k) {
    const double t_next_base = lu * t;
    int nb = -1;
    for (int cand = 0; cand < part_->symbols(); ++cand) {
      if (!part_->sft().matrix[b][cand]) continue;
      const double tn = t_next_base + c_[b][cand];
      if (tn >= J_[cand].lo - 1e-12 && tn < J_[cand].hi + 1e-12) {
        nb = cand;
        t = std::min(std::max(tn, J_[cand].lo), J_[cand].hi);
        break;
      }
    }
    if (nb < 0) fail(ErrorCode::NoConvergence, "segment dynamics left the tiling");
    out.push_back(static_cast<Symbol>(nb));
    b = nb;
  }
  return out;
}

Vec2 SegmentCoding::point_at(double t) const {
  for (std::size_t b = 0; b < J_.size(); ++b) {
    if (t >= J_[b].lo && t < J_[b].hi) {
      const double u = t - part_->tau_offset[side_][b];
      const double s = side_ == 0 ? part_->boxes[b].s0 : part_->boxes[b].s1;
      const Vec2 plane = part_->aut.to_plane(u, s);
      return Vec2{mod1(plane.x), mod1(plane.y)};
    }
  }
  fail(ErrorCode::BadInput, "parameter outside the segment");
}

double TrigPolynomial::eval(const Vec2& p) const {
  double acc = 0.0;
  for (const Term& t : terms) {
    const double phase = 2.0 * std::numbers::pi * (t.m * p.x + t.n * p.y);
    acc += t.cos_coeff * std::cos(phase) + t.sin_coeff * std::sin(phase);
  }
  return acc;
}

double TrigPolynomial::sup_bound() const {
  double acc = 0.0;
  for (const Term& t : terms)
    acc += std::hypot(t.cos_coeff, t.sin_coeff);
  return acc;
}

double TrigPolynomial::lipschitz_bound() const {
  double acc = 0.0;
  for (const Term& t : terms)
    acc += 2.0 * std::numbers::pi * std::hypot(double(t.m), double(t.n)) *
           std::hypot(t.cos_coeff, t.sin_coeff);
  return acc;
}

TrigPolynomial TrigPolynomial::compose_with(const IntMat2& m) const {
  // cos(2 pi <k, Mx>) = cos(2 pi <M^T k, x>)
  TrigPolynomial out;
  for (const Term& t : terms) {
    Term nt = t;
    nt.m = static_cast<int>(m[0][0] * t.m + m[1][0] * t.n);
    nt.n = static_cast<int>(m[0][1] * t.m + m[1][1] * t.n);
    out.terms.push_back(nt);
  }
  return out;
}

TrigPolynomial TrigPolynomial::operator+(const TrigPolynomial& other) const {
  TrigPolynomial out = *this;
  out.terms.insert(out.terms.end(), other.terms.begin(), other.terms.end());
  return out;
}

TrigPolynomial TrigPolynomial::operator*(double scale) const {
  TrigPolynomial out = *this;
  for (Term& t : out.terms) {
    t.cos_coeff *= scale;
    t.sin_coeff *= scale;
  }
  return out;
}

TwoSidedPotential torus_potential(const MarkovPartition& part,
                                  const TrigPolynomial& poly) {
  TwoSidedPotential phi;
  phi.spec = part.shift.get();
  phi.sup_norm = poly.sup_bound();
  double maxdiag = 0.0;
  for (const auto& b : part.boxes)
    maxdiag = std::max(maxdiag, std::hypot(b.u_extent(), b.s_extent()));
  phi.holder =
      HolderData{2.0 * poly.lipschitz_bound() * maxdiag *
                     std::abs(part.aut.lambda_u),
                 1.0 / std::abs(part.aut.lambda_u)};
  const MarkovPartition* p = &part;
  TrigPolynomial poly_copy = poly;
  phi.eval = [p, poly_copy](std::span<const Symbol> bwd,
                            std::span<const Symbol> fwd) {
    return poly_copy.eval(decode_word(*p, bwd, fwd).point);
  };
  return phi;
}

ForwardReduction sample_forward_potential(const MarkovPartition& part,
                                          const TrigPolynomial& poly,
                                          int depth, double tol) {
  // Same series as reduce_to_forward applied to torus_potential, but the
  // decoded coordinates are advanced by the affine transition chains, one
  // sweep per word, instead of a fresh nested decode per term.
  const SubshiftSpec& spec = part.sft();
  TwoSidedPotential ts = torus_potential(part, poly);
  const HolderData h = ts.holder;
  if (h.beta >= 1.0 || h.beta <= 0.0)
    fail(ErrorCode::NonSummableVariation, "variation rate not in (0,1)");
  int series = 1;
  while (h.tail(series) >= tol) {
    ++series;
    if (series > 4096)
      fail(ErrorCode::NonSummableVariation,
           "variation profile does not decay fast enough for tol");
  }
  const double achieved = h.tail(series);
  const int r = spec.alphabet_size;
  const double lu = part.aut.lambda_u, ls = part.aut.lambda_s;

  // s-coordinate of the base-retracted point of each symbol (the
  // lexicographically minimal admissible backward extension)
  std::vector<double> s_base(r);
  for (int b = 0; b < r; ++b) {
    std::vector<Symbol> w{Symbol(b)};
    WordIndexer::extend_min_backward(spec, w, 64);
    std::vector<Symbol> bwd(w.rbegin() + 1, w.rend());
    s_base[b] = decode_word(part, bwd, std::span<const Symbol>(&w.back(), 1)).s;
  }

  auto value_at = [&](double u, double s) {
    const Vec2 plane = part.aut.to_plane(u, s);
    return poly.eval(Vec2{mod1(plane.x), mod1(plane.y)});
  };

  WordIndexer idx(spec, depth);
  std::vector<double> vals(idx.count());
  const int need = series + 2;
  std::vector<Symbol> ext;
  std::vector<double> u_chain, sa, sb;
  for (std::size_t rk = 0; rk < idx.count(); ++rk) {
    Word w = idx.word_at(rk);
    ext = w.symbols;
    WordIndexer::extend_min(spec, ext, need);
    const int len = static_cast<int>(ext.size());
    u_chain.assign(len, 0.0);
    const EigenBox& last = part.boxes[ext.back()];
    u_chain[len - 1] = 0.5 * (last.u0 + last.u1);
    for (int j = len - 2; j >= 0; --j)
      u_chain[j] =
          (u_chain[j + 1] + part.pair_offset[ext[j]][ext[j + 1]].x) / lu;
    sa.assign(len, 0.0);
    sa[0] = s_base[ext[0]];
    for (int j = 0; j + 1 < len; ++j)
      sa[j + 1] = ls * sa[j] - part.pair_offset[ext[j]][ext[j + 1]].y;
    sb.assign(len, 0.0);
    sb[1] = s_base[ext[1]];
    for (int j = 1; j + 1 < len; ++j)
      sb[j + 1] = ls * sb[j] - part.pair_offset[ext[j]][ext[j + 1]].y;

    double acc = value_at(u_chain[0], sa[0]);
    for (int k = 0; k <= series; ++k)
      acc += value_at(u_chain[k + 1], sa[k + 1]) -
             value_at(u_chain[k + 1], sb[k + 1]);
    vals[rk] = acc;
  }

  ForwardReduction out;
  HolderData hf{2.0 * h.c, h.beta};
  out.forward = Potential(spec, depth, std::move(vals), hf);
  out.forward.set_sampling_error(2.0 * achieved + h.tail(depth - 1));
  out.truncation_error = achieved;
  out.series_depth = series;
  out.transfer = reduce_to_forward(ts, 2, tol).transfer;
  return out;
}

}  // namespace gibbs
