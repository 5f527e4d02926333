#pragma once

#include "bqp/interpolation.hpp"

#include <vector>

namespace bqp::contour {

using interp::Vec2;

/// Piece of a level curve; consecutive points are unwrapped so that the
/// polyline is continuous in the plane even when it crosses the box edge.
struct Polyline {
  std::vector<Vec2> points;
  bool closed = false;
};

/// Zero level set of the bilinear interpolant of f by marching squares.
/// Saddle cells are split according to the sign of the cell average. If mask
/// is given, only cells with at least one masked corner are traced.
std::vector<Polyline> zero_contour(const ScalarField& f, const Values* mask = nullptr);

/// Symmetric Hausdorff distance between two polylines, measured from the
/// vertices of each to the segments of the other with the periodic minimum
/// image of period L.
Real hausdorff_distance(const Polyline& a, const Polyline& b, Real period);
/// Same for the unions of several polylines.
Real hausdorff_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b, Real period);

}  // namespace bqp::contour
