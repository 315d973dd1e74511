#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler {

// One grid axis of a box domain. Endpoints are closed by default; an open
// endpoint is excluded from sampling and refinement marches points toward
// it, which is how limit behaviour at open boundaries gets probed.
struct BoxAxis {
  double lo = 0.0;
  double hi = 1.0;
  int count = 2;
  bool open_lo = false;
  bool open_hi = false;
};

// Parameter set S: a box grid, the unit simplex sampled at resolution
// k_i / D, or an explicit finite point list. Points are materialized in a
// fixed deterministic order.
class ParamDomain {
 public:
  enum class Kind { box_grid, simplex_grid, finite_set };

  static ParamDomain box(std::vector<BoxAxis> axes) {
    if (axes.empty()) throw InvalidInput("ParamDomain: box needs at least one axis");
    for (const auto& a : axes) {
      if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.lo < a.hi))
        throw InvalidInput("ParamDomain: box axis must have finite lo < hi");
      if (a.count < 2) throw InvalidInput("ParamDomain: box axis needs count >= 2");
    }
    ParamDomain d;
    d.kind_ = Kind::box_grid;
    d.axes_ = std::move(axes);
    return d;
  }

  static ParamDomain simplex(int n_vertices, int depth) {
    if (n_vertices < 1) throw InvalidInput("ParamDomain: simplex needs N >= 1");
    if (depth < 1) throw InvalidInput("ParamDomain: simplex needs depth >= 1");
    ParamDomain d;
    d.kind_ = Kind::simplex_grid;
    d.simplex_n_ = n_vertices;
    d.simplex_d_ = depth;
    return d;
  }

  static ParamDomain finite(std::vector<std::vector<double>> pts) {
    if (pts.empty()) throw InvalidInput("ParamDomain: finite set must be nonempty");
    const std::size_t dim = pts[0].size();
    if (dim == 0) throw InvalidInput("ParamDomain: points must have dimension >= 1");
    for (const auto& p : pts) {
      if (p.size() != dim) throw InvalidInput("ParamDomain: inconsistent point dimensions");
      for (double v : p)
        if (!std::isfinite(v)) throw InvalidInput("ParamDomain: non-finite point");
    }
    ParamDomain d;
    d.kind_ = Kind::finite_set;
    d.points_ = std::move(pts);
    return d;
  }

  Kind kind() const { return kind_; }

  int dim() const {
    switch (kind_) {
      case Kind::box_grid:
        return static_cast<int>(axes_.size());
      case Kind::simplex_grid:
        return simplex_n_;
      case Kind::finite_set:
        return static_cast<int>(points_[0].size());
    }
    return 0;
  }

  const std::vector<BoxAxis>& axes() const { return axes_; }
  int simplex_vertices() const { return simplex_n_; }
  int simplex_depth() const { return simplex_d_; }

  std::vector<double> axis_points(int axis) const {
    const BoxAxis& a = axes_[axis];
    std::vector<double> pts(a.count);
    const double span = a.hi - a.lo;
    if (!a.open_lo && !a.open_hi) {
      for (int i = 0; i < a.count; ++i)
        pts[i] = (i == a.count - 1) ? a.hi : a.lo + span * i / (a.count - 1);
    } else if (a.open_lo && !a.open_hi) {
      for (int i = 0; i < a.count; ++i)
        pts[i] = (i == a.count - 1) ? a.hi : a.lo + span * (i + 1) / a.count;
    } else if (!a.open_lo && a.open_hi) {
      for (int i = 0; i < a.count; ++i) pts[i] = a.lo + span * i / a.count;
    } else {
      for (int i = 0; i < a.count; ++i) pts[i] = a.lo + span * (i + 1) / (a.count + 1);
    }
    return pts;
  }

  std::size_t size() const {
    switch (kind_) {
      case Kind::box_grid: {
        std::size_t s = 1;
        for (const auto& a : axes_) s *= static_cast<std::size_t>(a.count);
        return s;
      }
      case Kind::simplex_grid: {
        // C(D + N - 1, N - 1) compositions of D into N parts.
        std::size_t c = 1;
        for (int i = 1; i <= simplex_n_ - 1; ++i)
          c = c * static_cast<std::size_t>(simplex_d_ + i) / static_cast<std::size_t>(i);
        return c;
      }
      case Kind::finite_set:
        return points_.size();
    }
    return 0;
  }

  // Box grids enumerate row-major with axis 0 slowest; simplex grids
  // enumerate compositions lexicographically with the first coordinate
  // descending; finite sets keep their given order.
  std::vector<std::vector<double>> points() const {
    switch (kind_) {
      case Kind::finite_set:
        return points_;
      case Kind::box_grid: {
        std::vector<std::vector<double>> axis_pts(axes_.size());
        for (std::size_t a = 0; a < axes_.size(); ++a) axis_pts[a] = axis_points(static_cast<int>(a));
        std::vector<std::vector<double>> out;
        out.reserve(size());
        std::vector<std::size_t> idx(axes_.size(), 0);
        while (true) {
          std::vector<double> p(axes_.size());
          for (std::size_t a = 0; a < axes_.size(); ++a) p[a] = axis_pts[a][idx[a]];
          out.push_back(std::move(p));
          int a = static_cast<int>(axes_.size()) - 1;
          for (; a >= 0; --a) {
            if (++idx[a] < axis_pts[a].size()) break;
            idx[a] = 0;
          }
          if (a < 0) break;
        }
        return out;
      }
      case Kind::simplex_grid: {
        std::vector<std::vector<double>> out;
        out.reserve(size());
        std::vector<int> k(simplex_n_, 0);
        emit_compositions(0, simplex_d_, k, out);
        return out;
      }
    }
    return {};
  }

  // Refinement always produces a superset of the current points: closed
  // axes go count -> 2*count-1, half-open -> 2*count, open-open ->
  // 2*count+1; simplex depth doubles; finite sets are unchanged.
  ParamDomain refined(int levels = 1) const {
    ParamDomain d = *this;
    for (int l = 0; l < levels; ++l) {
      switch (d.kind_) {
        case Kind::box_grid:
          for (auto& a : d.axes_) {
            if (!a.open_lo && !a.open_hi)
              a.count = 2 * a.count - 1;
            else if (a.open_lo && a.open_hi)
              a.count = 2 * a.count + 1;
            else
              a.count = 2 * a.count;
          }
          break;
        case Kind::simplex_grid:
          d.simplex_d_ *= 2;
          break;
        case Kind::finite_set:
          break;
      }
    }
    return d;
  }

 private:
  void emit_compositions(int pos, int remaining, std::vector<int>& k,
                         std::vector<std::vector<double>>& out) const {
    if (pos == simplex_n_ - 1) {
      k[pos] = remaining;
      std::vector<double> alpha(simplex_n_);
      double partial = 0.0;
      for (int i = 0; i < simplex_n_ - 1; ++i) {
        alpha[i] = static_cast<double>(k[i]) / simplex_d_;
        partial += alpha[i];
      }
      // Last coordinate balances the sum so it is exactly 1.
      alpha[simplex_n_ - 1] = (simplex_n_ == 1) ? 1.0 : 1.0 - partial;
      out.push_back(std::move(alpha));
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      k[pos] = v;
      emit_compositions(pos + 1, remaining - v, k, out);
    }
  }

  Kind kind_ = Kind::finite_set;
  std::vector<BoxAxis> axes_;
  int simplex_n_ = 0;
  int simplex_d_ = 0;
  std::vector<std::vector<double>> points_;
};

}  // namespace finsler
