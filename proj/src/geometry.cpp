#include "actopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace actopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Merge touching/overlapping intervals and drop empty ones.
std::vector<Interval> normalize_intervals(std::vector<Interval> iv) {
  std::vector<Interval> out;
  std::sort(iv.begin(), iv.end(), [](const Interval& p, const Interval& q) { return p.a < q.a; });
  for (const Interval& i : iv) {
    if (!(i.b > i.a)) continue;
    if (!out.empty() && i.a <= out.back().b) {
      out.back().b = std::max(out.back().b, i.b);
    } else {
      out.push_back(i);
    }
  }
  return out;
}

// Total length of the intersection of two sorted disjoint interval lists.
double intersection_measure(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  double len = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double lo = std::max(a[i].a, b[j].a);
    double hi = std::min(a[i].b, b[j].b);
    if (hi > lo) len += hi - lo;
    if (a[i].b < b[j].b) ++i; else ++j;
  }
  return len;
}

}  // namespace

ActuatorShape ActuatorShape::from_intervals(std::vector<Interval> iv) {
  ActuatorShape s;
  s.is2d = false;
  s.intervals = normalize_intervals(std::move(iv));
  return s;
}

ActuatorShape ActuatorShape::from_mask(int m, std::vector<std::uint8_t> mask) {
  if (static_cast<int>(mask.size()) != m * m)
    throw std::invalid_argument("from_mask: mask size does not match grid");
  ActuatorShape s;
  s.is2d = true;
  s.grid_m = m;
  s.mask = std::move(mask);
  return s;
}

ActuatorShape ActuatorShape::empty1d() { return ActuatorShape{}; }

bool ActuatorShape::contains(double x) const {
  for (const Interval& i : intervals)
    if (x >= i.a && x <= i.b) return true;
  return false;
}

bool ActuatorShape::contains(double x, double y) const {
  if (!is2d) return false;
  int ix = static_cast<int>(std::floor(x * grid_m));
  int iy = static_cast<int>(std::floor(y * grid_m));
  ix = std::clamp(ix, 0, grid_m - 1);
  iy = std::clamp(iy, 0, grid_m - 1);
  return mask[static_cast<size_t>(iy) * grid_m + ix] != 0;
}

double measure(const ActuatorShape& shape) {
  if (shape.is2d) {
    double cell = 1.0 / (static_cast<double>(shape.grid_m) * shape.grid_m);
    long count = std::count_if(shape.mask.begin(), shape.mask.end(),
                               [](std::uint8_t v) { return v != 0; });
    return cell * static_cast<double>(count);
  }
  double len = 0.0;
  for (const Interval& i : shape.intervals) len += i.b - i.a;
  return len;
}

ActuatorShape shape_from_levelset(const LevelSetField& f) {
  if (f.is2d) {
    std::vector<std::uint8_t> mask(f.psi.size());
    for (int i = 0; i < f.psi.size(); ++i) mask[i] = f.psi(i) < 0.0 ? 1 : 0;
    return ActuatorShape::from_mask(f.m, std::move(mask));
  }
  const int n = f.size();
  std::vector<Interval> iv;
  bool inside = f.psi(0) < 0.0;
  double start = f.x[0];
  for (int i = 0; i + 1 < n; ++i) {
    bool next_inside = f.psi(i + 1) < 0.0;
    if (inside == next_inside) continue;
    // Linear interpolant of psi crosses zero between nodes i and i+1.
    double t = f.psi(i) / (f.psi(i) - f.psi(i + 1));
    double xc = f.x[i] + t * (f.x[i + 1] - f.x[i]);
    if (inside) {
      iv.push_back({start, xc});
    } else {
      start = xc;
    }
    inside = next_inside;
  }
  if (inside) iv.push_back({start, f.x[n - 1]});
  return ActuatorShape::from_intervals(std::move(iv));
}

namespace {

LevelSetField reinitialize_1d(const LevelSetField& f) {
  const int n = f.size();
  const double h = f.x[1] - f.x[0];
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, kInf);
  std::vector<bool> frozen(n, false);
  // Pin nodes adjacent to a sign change at their interpolated distance to the
  // crossing; this keeps the zero set (and hence the induced shape) in place.
  for (int i = 0; i + 1 < n; ++i) {
    bool si = f.psi(i) < 0.0, sj = f.psi(i + 1) < 0.0;
    if (si == sj) continue;
    double t = f.psi(i) / (f.psi(i) - f.psi(i + 1));  // crossing at x_i + t*h
    dist(i) = std::min(dist(i), t * h);
    dist(i + 1) = std::min(dist(i + 1), (1.0 - t) * h);
    frozen[i] = frozen[i + 1] = true;
  }
  // Fast sweeping: two passes propagate distances away from the interface.
  for (int sweep = 0; sweep < 2; ++sweep) {
    if (sweep == 0) {
      for (int i = 1; i < n; ++i)
        if (!frozen[i]) dist(i) = std::min(dist(i), dist(i - 1) + h);
    } else {
      for (int i = n - 2; i >= 0; --i)
        if (!frozen[i]) dist(i) = std::min(dist(i), dist(i + 1) + h);
    }
  }
  LevelSetField out = f;
  for (int i = 0; i < n; ++i) out.psi(i) = (f.psi(i) < 0.0 ? -1.0 : 1.0) * dist(i);
  out.reinit_warning = false;
  return out;
}

LevelSetField reinitialize_2d(const LevelSetField& f) {
  const int m = f.m;
  const double h = 1.0 / m;
  auto at = [m](const Eigen::VectorXd& v, int ix, int iy) { return v(iy * m + ix); };
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(f.psi.size(), kInf);
  std::vector<bool> frozen(f.psi.size(), false);
  // Interface initialization from axis-aligned sign changes.
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      int idx = iy * m + ix;
      double pi = at(f.psi, ix, iy);
      bool si = pi < 0.0;
      const int nb[4][2] = {{ix + 1, iy}, {ix - 1, iy}, {ix, iy + 1}, {ix, iy - 1}};
      for (auto& q : nb) {
        if (q[0] < 0 || q[0] >= m || q[1] < 0 || q[1] >= m) continue;
        double pj = at(f.psi, q[0], q[1]);
        if ((pj < 0.0) == si) continue;
        double d = h * std::abs(pi) / std::abs(pi - pj);
        if (d < dist(idx)) dist(idx) = d;
        frozen[idx] = true;
      }
    }
  }
  // Godunov update from the smaller of each axis pair of neighbor values.
  auto update = [&](int ix, int iy) {
    int idx = iy * m + ix;
    if (frozen[idx]) return 0.0;
    double a = std::min(ix > 0 ? dist(idx - 1) : kInf, ix + 1 < m ? dist(idx + 1) : kInf);
    double b = std::min(iy > 0 ? dist(idx - m) : kInf, iy + 1 < m ? dist(idx + m) : kInf);
    if (a > b) std::swap(a, b);
    if (a == kInf) return 0.0;
    double d = (b - a >= h) ? a + h : 0.5 * (a + b + std::sqrt(2.0 * h * h - (a - b) * (a - b)));
    if (d < dist(idx)) {
      double change = dist(idx) - d;
      dist(idx) = d;
      return change == kInf ? 1.0 : change;
    }
    return 0.0;
  };
  // Four sweep orderings, iterated until the largest update falls below 1e-8.
  for (int pass = 0; pass < 16; ++pass) {
    double max_change = 0.0;
    for (int iy = 0; iy < m; ++iy)
      for (int ix = 0; ix < m; ++ix) max_change = std::max(max_change, update(ix, iy));
    for (int iy = 0; iy < m; ++iy)
      for (int ix = m - 1; ix >= 0; --ix) max_change = std::max(max_change, update(ix, iy));
    for (int iy = m - 1; iy >= 0; --iy)
      for (int ix = 0; ix < m; ++ix) max_change = std::max(max_change, update(ix, iy));
    for (int iy = m - 1; iy >= 0; --iy)
      for (int ix = m - 1; ix >= 0; --ix) max_change = std::max(max_change, update(ix, iy));
    if (max_change < 1e-8) break;
  }
  LevelSetField out = f;
  for (int i = 0; i < f.psi.size(); ++i)
    out.psi(i) = (f.psi(i) < 0.0 ? -1.0 : 1.0) * dist(i);
  out.reinit_warning = false;
  return out;
}

}  // namespace

LevelSetField reinitialize(const LevelSetField& f) {
  bool has_neg = false, has_pos = false;
  for (int i = 0; i < f.psi.size(); ++i) {
    (f.psi(i) < 0.0 ? has_neg : has_pos) = true;
  }
  if (!has_neg || !has_pos) {
    LevelSetField out = f;
    out.reinit_warning = true;
    return out;
  }
  return f.is2d ? reinitialize_2d(f) : reinitialize_1d(f);
}

double symmetric_difference_measure(const ActuatorShape& a, const ActuatorShape& b) {
  if (a.is2d != b.is2d) throw std::invalid_argument("symmetric_difference_measure: mixed 1D/2D shapes");
  if (a.is2d) {
    if (a.grid_m != b.grid_m)
      throw std::invalid_argument("symmetric_difference_measure: grid mismatch");
    double cell = 1.0 / (static_cast<double>(a.grid_m) * a.grid_m);
    long count = 0;
    for (size_t i = 0; i < a.mask.size(); ++i) count += (a.mask[i] != 0) != (b.mask[i] != 0);
    return cell * static_cast<double>(count);
  }
  return measure(a) + measure(b) - 2.0 * intersection_measure(a.intervals, b.intervals);
}

ActuatorShape translate(const ActuatorShape& shape, const Eigen::VectorXd& v) {
  if (!shape.is2d) {
    if (v.size() != 1) throw std::invalid_argument("translate: 1D shape needs a scalar displacement");
    ActuatorShape out = shape;
    out.clamped = false;
    if (shape.intervals.empty() || v(0) == 0.0) return out;
    double lo = shape.intervals.front().a, hi = shape.intervals.back().b;
    double d = std::clamp(v(0), -lo, 1.0 - hi);
    if (d != v(0)) out.clamped = true;
    for (Interval& i : out.intervals) {
      i.a += d;
      i.b += d;
    }
    return out;
  }
  if (v.size() != 2) throw std::invalid_argument("translate: 2D shape needs a 2-vector displacement");
  const int m = shape.grid_m;
  // Quantize to whole cells, then reduce the shift until no cell leaves.
  int sx = static_cast<int>(std::lround(v(0) * m));
  int sy = static_cast<int>(std::lround(v(1) * m));
  int min_x = m, max_x = -1, min_y = m, max_y = -1;
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix)
      if (shape.mask[static_cast<size_t>(iy) * m + ix]) {
        min_x = std::min(min_x, ix); max_x = std::max(max_x, ix);
        min_y = std::min(min_y, iy); max_y = std::max(max_y, iy);
      }
  ActuatorShape out = shape;
  out.clamped = false;
  if (max_x < 0) return out;  // empty shape
  int cx = std::clamp(sx, -min_x, m - 1 - max_x);
  int cy = std::clamp(sy, -min_y, m - 1 - max_y);
  if (cx != sx || cy != sy) out.clamped = true;
  std::fill(out.mask.begin(), out.mask.end(), 0);
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix)
      if (shape.mask[static_cast<size_t>(iy) * m + ix])
        out.mask[static_cast<size_t>(iy + cy) * m + (ix + cx)] = 1;
  return out;
}

Eigen::VectorXd upwind_gradient_norm(const LevelSetField& f) {
  if (!f.is2d) {
    const int n = f.size();
    const double h = f.x[1] - f.x[0];
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) {
      // Mirror the interior slope at the ends so boundary nodes still see an
      // upwind difference.
      double dm = i > 0 ? (f.psi(i) - f.psi(i - 1)) / h : (f.psi(i + 1) - f.psi(i)) / h;
      double dp = i + 1 < n ? (f.psi(i + 1) - f.psi(i)) / h : (f.psi(i) - f.psi(i - 1)) / h;
      g(i) = std::max(std::max(dm, 0.0), std::max(-dp, 0.0));
    }
    return g;
  }
  const int m = f.m;
  const double h = 1.0 / m;
  Eigen::VectorXd g(f.psi.size());
  auto at = [&](int ix, int iy) { return f.psi(iy * m + ix); };
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      double dmx = ix > 0 ? (at(ix, iy) - at(ix - 1, iy)) / h : (at(ix + 1, iy) - at(ix, iy)) / h;
      double dpx = ix + 1 < m ? (at(ix + 1, iy) - at(ix, iy)) / h : (at(ix, iy) - at(ix - 1, iy)) / h;
      double dmy = iy > 0 ? (at(ix, iy) - at(ix, iy - 1)) / h : (at(ix, iy + 1) - at(ix, iy)) / h;
      double dpy = iy + 1 < m ? (at(ix, iy + 1) - at(ix, iy)) / h : (at(ix, iy) - at(ix, iy - 1)) / h;
      double gx = std::max(std::max(dmx, 0.0), std::max(-dpx, 0.0));
      double gy = std::max(std::max(dmy, 0.0), std::max(-dpy, 0.0));
      g(iy * m + ix) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return g;
}

}  // namespace actopt
