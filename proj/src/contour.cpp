#include "bqp/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace bqp::contour {

namespace {

struct Segment {
  long e0;
  long e1;
};

Real wrap_delta(Real d, Real period) { return d - period * std::round(d / period); }

Real point_segment_distance(const Vec2& p, const Vec2& q0, const Vec2& q1, Real period) {
  // Move p to the image closest to q0, then measure in the plane.
  const Vec2 pp(q0.x() + wrap_delta(p.x() - q0.x(), period), q0.y() + wrap_delta(p.y() - q0.y(), period));
  const Vec2 d = q1 - q0;
  const Real len2 = d.squaredNorm();
  const Real t = len2 > 0.0 ? std::clamp((pp - q0).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (pp - (q0 + t * d)).norm();
}

Real distance_to(const Vec2& p, const Polyline& b, Real period) {
  const std::size_t m = b.points.size();
  if (m == 0) throw ArgumentError("Hausdorff distance of an empty polyline");
  if (m == 1) return point_segment_distance(p, b.points[0], b.points[0], period);
  const std::size_t segs = b.closed ? m : m - 1;
  Real best = std::numeric_limits<Real>::infinity();
  for (std::size_t i = 0; i < segs; ++i)
    best = std::min(best, point_segment_distance(p, b.points[i], b.points[(i + 1) % m], period));
  return best;
}

}  // namespace

std::vector<Polyline> zero_contour(const ScalarField& f, const Values* mask) {
  const int n = f.n();
  const Real h = f.grid->spacing();
  const auto node = [n](int ix, int iy) { return static_cast<long>((iy + n) % n) * n + (ix + n) % n; };
  const auto h_edge = [&](int ix, int iy) { return 2 * node(ix, iy); };
  const auto v_edge = [&](int ix, int iy) { return 2 * node(ix, iy) + 1; };
  const auto value = [&](int ix, int iy) { return f((iy + n) % n, (ix + n) % n); };

  // Crossing point of an edge, in canonical coordinates of its first node.
  const auto crossing = [&](long edge) {
    const long id = edge / 2;
    const int ix = static_cast<int>(id % n), iy = static_cast<int>(id / n);
    const bool vertical = edge % 2 == 1;
    const Real a = value(ix, iy);
    const Real b = vertical ? value(ix, iy + 1) : value(ix + 1, iy);
    const Real t = a / (a - b);
    return vertical ? Vec2(ix * h, (iy + t) * h) : Vec2((ix + t) * h, iy * h);
  };

  std::vector<Segment> segments;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      if (mask && (*mask)(iy, ix) == 0.0 && (*mask)(iy, (ix + 1) % n) == 0.0 && (*mask)((iy + 1) % n, ix) == 0.0 &&
          (*mask)((iy + 1) % n, (ix + 1) % n) == 0.0)
        continue;
      // corners a, b, c, d counter-clockwise from the lower left
      const std::array<Real, 4> v = {value(ix, iy), value(ix + 1, iy), value(ix + 1, iy + 1), value(ix, iy + 1)};
      const std::array<bool, 4> neg = {v[0] < 0.0, v[1] < 0.0, v[2] < 0.0, v[3] < 0.0};
      // edges: bottom, right, top, left
      const std::array<long, 4> e = {h_edge(ix, iy), v_edge(ix + 1, iy), h_edge(ix, iy + 1), v_edge(ix, iy)};
      const int changes = (neg[0] != neg[1]) + (neg[1] != neg[2]) + (neg[2] != neg[3]) + (neg[3] != neg[0]);
      if (changes == 0) continue;
      if (changes == 2) {
        std::array<long, 2> hit{};
        int k = 0;
        for (int i = 0; i < 4; ++i)
          if (neg[i] != neg[(i + 1) % 4]) hit[k++] = e[i];
        segments.push_back({hit[0], hit[1]});
        continue;
      }
      // Saddle: isolate the two corners whose sign differs from the cell average.
      const bool centre_neg = (v[0] + v[1] + v[2] + v[3]) < 0.0;
      for (int c = 0; c < 4; ++c) {
        if (neg[c] == centre_neg) continue;
        segments.push_back({e[(c + 3) % 4], e[c]});
      }
    }
  }

  std::unordered_map<long, std::array<int, 2>> touching;
  for (int i = 0; i < static_cast<int>(segments.size()); ++i) {
    for (long edge : {segments[i].e0, segments[i].e1}) {
      auto [it, fresh] = touching.try_emplace(edge, std::array<int, 2>{-1, -1});
      it->second[it->second[0] < 0 ? 0 : 1] = i;
    }
  }
  const auto other = [&](long edge, int seg) {
    const auto& t = touching.at(edge);
    return t[0] == seg ? t[1] : t[0];
  };

  const Real period = f.grid->length();
  std::vector<char> used(segments.size(), 0);
  std::vector<Polyline> out;
  for (int start = 0; start < static_cast<int>(segments.size()); ++start) {
    if (used[start]) continue;
    // Walk forward from e1, then backward from e0 if the chain is open.
    std::vector<long> forward{segments[start].e0, segments[start].e1};
    used[start] = 1;
    bool closed = false;
    int seg = start;
    long edge = segments[start].e1;
    while (true) {
      const int next = other(edge, seg);
      if (next < 0) break;
      if (next == start) {
        closed = true;
        break;
      }
      used[next] = 1;
      edge = segments[next].e0 == edge ? segments[next].e1 : segments[next].e0;
      forward.push_back(edge);
      seg = next;
    }
    if (closed) forward.pop_back();
    std::vector<long> backward;
    if (!closed) {
      seg = start;
      edge = segments[start].e0;
      while (true) {
        const int next = other(edge, seg);
        if (next < 0 || used[next]) break;
        used[next] = 1;
        edge = segments[next].e0 == edge ? segments[next].e1 : segments[next].e0;
        backward.push_back(edge);
        seg = next;
      }
    }
    std::vector<long> chain(backward.rbegin(), backward.rend());
    chain.insert(chain.end(), forward.begin(), forward.end());

    Polyline line;
    line.closed = closed;
    for (long id : chain) {
      Vec2 p = crossing(id);
      if (!line.points.empty()) {
        const Vec2& q = line.points.back();
        p = Vec2(q.x() + wrap_delta(p.x() - q.x(), period), q.y() + wrap_delta(p.y() - q.y(), period));
      }
      line.points.push_back(p);
    }
    out.push_back(std::move(line));
  }
  return out;
}

Real hausdorff_distance(const Polyline& a, const Polyline& b, Real period) {
  return hausdorff_distance(std::vector<Polyline>{a}, std::vector<Polyline>{b}, period);
}

Real hausdorff_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b, Real period) {
  const auto one_way = [period](const std::vector<Polyline>& from, const std::vector<Polyline>& to) {
    Real worst = 0.0;
    for (const auto& line : from) {
      if (line.points.empty()) throw ArgumentError("Hausdorff distance of an empty polyline");
      for (const Vec2& p : line.points) {
        Real best = std::numeric_limits<Real>::infinity();
        for (const auto& target : to) best = std::min(best, distance_to(p, target, period));
        worst = std::max(worst, best);
      }
    }
    return worst;
  };
  if (a.empty() || b.empty()) throw ArgumentError("Hausdorff distance of an empty set");
  return std::max(one_way(a, b), one_way(b, a));
}

}  // namespace bqp::contour
