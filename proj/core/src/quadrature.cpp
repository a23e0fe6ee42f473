#include <jumplab/quadrature.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace jumplab {

namespace {

constexpr std::array<double, 5> kNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                          0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kWeights = {0.2369268850561891, 0.4786286704993665,
                                            0.5688888888888889, 0.4786286704993665,
                                            0.2369268850561891};
constexpr int kRootSamples = 9;

struct Cell {
  Param lo;
  Param hi;

  double volume() const {
    double v = 1.0;
    for (Eigen::Index i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
  }
};

struct Estimate {
  Vec value;
  double abs_mass = 0.0;
};

enum class Placement { Keep, Drop, Straddle };

std::vector<Cell> split(const Cell& c) {
  std::vector<Cell> out;
  const Param mid = 0.5 * (c.lo + c.hi);
  if (c.lo.size() == 1) {
    out.push_back({c.lo, mid});
    out.push_back({mid, c.hi});
    return out;
  }
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      Cell child{c.lo, c.hi};
      if (i == 0) child.hi[0] = mid[0]; else child.lo[0] = mid[0];
      if (k == 0) child.hi[1] = mid[1]; else child.lo[1] = mid[1];
      out.push_back(child);
    }
  }
  return out;
}

class Cubature {
 public:
  using WeightedFn = std::function<Vec(const Param&)>;

  Cubature(int dim, int out_dim, WeightedFn f, const Patch* patch, const Region& region,
           const QuadConfig& cfg)
      : dim_(dim), out_dim_(out_dim), f_(std::move(f)), patch_(patch), region_(region), cfg_(cfg) {}

  QuadResult run(const Param& lo, const Param& hi, double tol_share) {
    total_volume_ = Cell{lo, hi}.volume();
    total_edge_ = 0.0;
    for (Eigen::Index i = 0; i < lo.size(); ++i) total_edge_ += hi[i] - lo[i];
    tol_share_ = tol_share;
    std::vector<Cell> roots;
    const int m = std::max(1, cfg_.initial_cells);
    if (dim_ == 1) {
      for (int i = 0; i < m; ++i) {
        Param a = lo, b = hi;
        a[0] = lo[0] + (hi[0] - lo[0]) * i / m;
        b[0] = i + 1 == m ? hi[0] : lo[0] + (hi[0] - lo[0]) * (i + 1) / m;
        roots.push_back({a, b});
      }
    } else {
      for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) {
          Param a = lo, b = hi;
          a[0] = lo[0] + (hi[0] - lo[0]) * i / m;
          b[0] = i + 1 == m ? hi[0] : lo[0] + (hi[0] - lo[0]) * (i + 1) / m;
          a[1] = lo[1] + (hi[1] - lo[1]) * k / m;
          b[1] = k + 1 == m ? hi[1] : lo[1] + (hi[1] - lo[1]) * (k + 1) / m;
          roots.push_back({a, b});
        }
      }
    }
    std::vector<Vec> parts;
    parts.reserve(roots.size());
    for (const Cell& c : roots) parts.push_back(process(c, nullptr, 0));
    QuadResult r;
    r.value = pairwise_sum(parts, out_dim_);
    r.error = error_;
    r.cells = cells_;
    r.converged = converged_;
    return r;
  }

  long cells() const { return cells_; }

 private:
  double cell_tol(const Cell& c, Placement placement) const {
    const double by_volume = tol_share_ * c.volume() / total_volume_;
    if (dim_ == 1 || placement != Placement::Straddle) return by_volume;
    // Cut cells: the clipped length can have square-root kinks where the
    // ball boundary is tangent to a grid line, so share by edge length.
    double edge = 0.0;
    for (Eigen::Index i = 0; i < c.lo.size(); ++i) edge = std::max(edge, c.hi[i] - c.lo[i]);
    return std::max(by_volume, 0.125 * tol_share_ * edge / total_edge_);
  }

  bool keep_point(const Vec& x) const {
    const double d2 = (x - region_.center).squaredNorm();
    const double r2 = region_.radius * region_.radius;
    return region_.kind == Region::Kind::OutsideBall ? d2 > r2 : d2 <= r2;
  }

  double ball_gap(const Param& t) const {
    return (patch_->point(t) - region_.center).squaredNorm() - region_.radius * region_.radius;
  }

  struct Geometry {
    Placement placement = Placement::Keep;
    double image_diam = 0.0;
    // Lower estimate of the distance from the focus to the cell image.
    double focus_dist = std::numeric_limits<double>::infinity();
  };

  Geometry place(const Cell& c) const {
    Geometry g;
    if (patch_ == nullptr) return g;
    const bool ball = region_.kind != Region::Kind::Everywhere;
    if (!ball && !region_.focus) return g;
    const Param mid = 0.5 * (c.lo + c.hi);
    const Vec center = patch_->point(mid);
    double spread = 0.0;
    const int steps = 2;
    for (int i = 0; i <= steps; ++i) {
      for (int k = 0; k <= (dim_ == 2 ? steps : 0); ++k) {
        Param t = c.lo;
        t[0] = c.lo[0] + (c.hi[0] - c.lo[0]) * i / steps;
        if (dim_ == 2) t[1] = c.lo[1] + (c.hi[1] - c.lo[1]) * k / steps;
        spread = std::max(spread, (patch_->point(t) - center).norm());
      }
    }
    g.image_diam = 2.0 * spread;
    const double reach = 1.25 * spread;
    if (region_.focus) g.focus_dist = std::max(0.0, (center - *region_.focus).norm() - reach);
    if (!ball) return g;
    const double d = (center - region_.center).norm();
    const double r = region_.radius;
    g.placement = Placement::Straddle;
    if (region_.kind == Region::Kind::OutsideBall) {
      if (d - reach > r) g.placement = Placement::Keep;
      else if (d + reach < r) g.placement = Placement::Drop;
    } else {
      if (d + reach <= r) g.placement = Placement::Keep;
      else if (d - reach > r) g.placement = Placement::Drop;
    }
    return g;
  }

  // Gauss-Legendre on [a, b] along `axis` with the other coordinate fixed.
  void gl_line(Param t, int axis, double a, double b, double scale, Estimate& acc) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t q = 0; q < kNodes.size(); ++q) {
      t[axis] = mid + half * kNodes[q];
      const Vec v = f_(t);
      const double w = scale * half * kWeights[q];
      acc.value += w * v;
      acc.abs_mass += std::abs(w) * v.norm();
    }
  }

  // Root of the ball gap between a and b (opposite signs at the ends), by
  // Illinois-modified regula falsi.
  double refine_root(Param t, int axis, double a, double b, double ga, double gb) const {
    int side = 0;
    for (int it = 0; it < 100; ++it) {
      double c = (a * gb - b * ga) / (gb - ga);
      if (!(c > a && c < b)) c = 0.5 * (a + b);
      t[axis] = c;
      const double gc = ball_gap(t);
      if (gc == 0.0) return c;
      if ((gc > 0.0) == (gb > 0.0)) {
        b = c;
        gb = gc;
        if (side == -1) ga *= 0.5;
        side = -1;
      } else {
        a = c;
        ga = gc;
        if (side == 1) gb *= 0.5;
        side = 1;
      }
      if (std::abs(b - a) <= 4e-16 * std::max(std::abs(a), std::abs(b)) + 1e-300) break;
    }
    return 0.5 * (a + b);
  }

  // Integral over the kept part of the segment [a, b] along `axis`.
  void clipped_line(Param t, int axis, double a, double b, double scale, Estimate& acc) const {
    std::array<double, kRootSamples> ts{};
    std::array<double, kRootSamples> gs{};
    for (int i = 0; i < kRootSamples; ++i) {
      ts[i] = a + (b - a) * i / (kRootSamples - 1);
      t[axis] = ts[i];
      gs[i] = ball_gap(t);
    }
    const bool keep_positive = region_.kind == Region::Kind::OutsideBall;
    auto kept = [&](double g) { return keep_positive ? g > 0.0 : g <= 0.0; };
    double start = a;
    bool inside_kept = kept(gs[0]);
    for (int i = 0; i + 1 < kRootSamples; ++i) {
      if (kept(gs[i]) == kept(gs[i + 1])) continue;
      const double root = refine_root(t, axis, ts[i], ts[i + 1], gs[i], gs[i + 1]);
      if (inside_kept && root > start) gl_line(t, axis, start, root, scale, acc);
      inside_kept = !inside_kept;
      start = root;
    }
    if (inside_kept && b > start) gl_line(t, axis, start, b, scale, acc);
  }

  Estimate estimate(const Cell& c, Placement placement) {
    ++cells_;
    Estimate e{Vec::Zero(out_dim_), 0.0};
    if (placement == Placement::Drop) return e;
    if (dim_ == 1) {
      if (placement == Placement::Keep) gl_line(c.lo, 0, c.lo[0], c.hi[0], 1.0, e);
      else clipped_line(c.lo, 0, c.lo[0], c.hi[0], 1.0, e);
      return e;
    }
    // Clip along the axis where the ball gap varies most, so the outer rule
    // sees a continuous clipped length.
    int inner = 1;
    if (placement == Placement::Straddle) {
      const Param mid = 0.5 * (c.lo + c.hi);
      double swing[2];
      for (int a = 0; a < 2; ++a) {
        Param p = mid, m = mid;
        p[a] = c.hi[a];
        m[a] = c.lo[a];
        swing[a] = std::abs(ball_gap(p) - ball_gap(m));
      }
      if (swing[0] > swing[1]) inner = 0;
    }
    const int outer = 1 - inner;
    // Breaks of the outer rule: where the ball boundary meets the two edges
    // running along the outer axis. Between them the clipped length is smooth.
    std::vector<double> breaks{c.lo[outer], c.hi[outer]};
    if (placement == Placement::Straddle) {
      for (double edge : {c.lo[inner], c.hi[inner]}) {
        Param t = c.lo;
        t[inner] = edge;
        edge_roots(t, outer, c.lo[outer], c.hi[outer], breaks);
      }
      std::sort(breaks.begin(), breaks.end());
    }
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double a = breaks[k];
      const double b = breaks[k + 1];
      if (!(b > a)) continue;
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      Param t = c.lo;
      for (std::size_t q = 0; q < kNodes.size(); ++q) {
        t[outer] = mid + half * kNodes[q];
        const double w = half * kWeights[q];
        if (placement == Placement::Keep) gl_line(t, inner, c.lo[inner], c.hi[inner], w, e);
        else clipped_line(t, inner, c.lo[inner], c.hi[inner], w, e);
      }
    }
    return e;
  }

  void edge_roots(Param t, int axis, double a, double b, std::vector<double>& out) const {
    std::array<double, kRootSamples> ts{};
    std::array<double, kRootSamples> gs{};
    for (int i = 0; i < kRootSamples; ++i) {
      ts[i] = a + (b - a) * i / (kRootSamples - 1);
      t[axis] = ts[i];
      gs[i] = ball_gap(t);
    }
    for (int i = 0; i + 1 < kRootSamples; ++i) {
      if ((gs[i] > 0.0) == (gs[i + 1] > 0.0)) continue;
      const double r = refine_root(t, axis, ts[i], ts[i + 1], gs[i], gs[i + 1]);
      if (r > a && r < b) out.push_back(r);
    }
  }

  bool can_split(int depth) const { return depth < cfg_.max_depth && cells_ < cfg_.max_cells; }

  Vec split_all(const Cell& c, int depth) {
    std::vector<Vec> parts;
    for (const Cell& child : split(c)) parts.push_back(process(child, nullptr, depth + 1));
    return pairwise_sum(parts, out_dim_);
  }

  Vec process(const Cell& c, const Estimate* known, int depth) {
    const Geometry geom = place(c);
    if (geom.placement == Placement::Drop) return Vec::Zero(out_dim_);
    if (geom.placement == Placement::Straddle &&
        geom.image_diam > cfg_.straddle_ratio * region_.radius && can_split(depth)) {
      return split_all(c, depth);
    }
    if (region_.focus && geom.image_diam > cfg_.near_ratio * geom.focus_dist && can_split(depth)) {
      return split_all(c, depth);
    }
    const Estimate whole = known ? *known : estimate(c, geom.placement);
    const std::vector<Cell> children = split(c);
    std::vector<Estimate> parts;
    parts.reserve(children.size());
    Vec refined = Vec::Zero(out_dim_);
    double mass = 0.0;
    for (const Cell& child : children) {
      parts.push_back(estimate(child, place(child).placement));
      refined += parts.back().value;
      mass += parts.back().abs_mass;
    }
    const double diff = (refined - whole.value).norm();
    double floor = cfg_.rel_floor;
    if (region_.focus) {
      const double dist = std::max(geom.focus_dist, 1e-300);
      floor = std::max(floor, cfg_.noise_factor * std::numeric_limits<double>::epsilon() *
                                  (1.0 + region_.focus->norm()) /
                                  std::pow(dist, cfg_.noise_order));
    }
    const double tol = std::max(cell_tol(c, geom.placement), floor * mass);
    if (diff <= tol) {
      error_ += diff;
      return refined;
    }
    if (!can_split(depth)) {
      error_ += diff;
      converged_ = false;
      return refined;
    }
    std::vector<Vec> sums;
    sums.reserve(children.size());
    for (std::size_t i = 0; i < children.size(); ++i) {
      sums.push_back(process(children[i], &parts[i], depth + 1));
    }
    return pairwise_sum(sums, out_dim_);
  }

  int dim_;
  int out_dim_;
  WeightedFn f_;
  const Patch* patch_;
  Region region_;
  QuadConfig cfg_;
  double total_volume_ = 1.0;
  double total_edge_ = 1.0;
  double tol_share_ = 0.0;
  double error_ = 0.0;
  long cells_ = 0;
  bool converged_ = true;
};

}  // namespace

Vec pairwise_sum(const std::vector<Vec>& terms, int dim) {
  if (terms.empty()) return Vec::Zero(dim);
  std::vector<Vec> level = terms;
  while (level.size() > 1) {
    std::vector<Vec> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(level[i] + level[i + 1]);
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

QuadResult integrate_measure_detailed(const RectifiableSet& set, int out_dim,
                                      const SurfaceIntegrand& integrand, const Region& region,
                                      const QuadConfig& cfg) {
  QuadResult total;
  total.value = Vec::Zero(out_dim);
  if (set.empty()) return total;
  if (region.kind != Region::Kind::Everywhere) {
    if (region.center.size() != set.ambient_dim()) throw DomainError("ball center dimension mismatch");
    if (region.kind == Region::Kind::InsideBall && !(region.radius >= 0.0)) {
      throw DomainError("ball radius must be nonnegative");
    }
  }
  const double share = cfg.abs_tol / static_cast<double>(set.patch_count());
  std::vector<Vec> parts;
  QuadConfig local = cfg;
  for (int p = 0; p < static_cast<int>(set.patch_count()); ++p) {
    const Patch& patch = set.patch(p);
    auto weighted = [&patch, &integrand, p](const Param& t) -> Vec {
      const Vec x = patch.point(t);
      return area_element(patch.jacobian(t)) * integrand(p, t, x);
    };
    local.max_cells = cfg.max_cells - total.cells;
    Cubature cub(set.n(), out_dim, weighted, &patch, region, local);
    const QuadResult r = cub.run(patch.lower(), patch.upper(), share);
    parts.push_back(r.value);
    total.error += r.error;
    total.cells += r.cells;
    total.converged = total.converged && r.converged;
  }
  total.value = pairwise_sum(parts, out_dim);
  return total;
}

Vec integrate_measure(const RectifiableSet& set, int out_dim, const SurfaceIntegrand& integrand,
                      const Region& region, const QuadConfig& cfg) {
  QuadResult r = integrate_measure_detailed(set, out_dim, integrand, region, cfg);
  if (!r.converged) {
    throw ConvergenceFailure("quadrature did not reach tolerance within " +
                                 std::to_string(cfg.max_cells) + " cells",
                             r.value, r.error);
  }
  return r.value;
}

QuadResult integrate_box(const Param& lo, const Param& hi, int out_dim, const BoxIntegrand& f,
                         const QuadConfig& cfg) {
  if (lo.size() != hi.size() || lo.size() < 1 || lo.size() > 2) {
    throw DomainError("integrate_box supports 1- and 2-dimensional boxes");
  }
  Cubature cub(static_cast<int>(lo.size()), out_dim, f, nullptr, Region::everywhere(), cfg);
  return cub.run(lo, hi, cfg.abs_tol);
}

}  // namespace jumplab
