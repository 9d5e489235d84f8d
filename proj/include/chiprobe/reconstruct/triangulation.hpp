#pragma once

// Incremental Delaunay triangulation (Bowyer-Watson) of scattered points.

#include <array>
#include <cstddef>
#include <vector>

namespace chiprobe::reconstruct {

struct Point {
  double x = 0;
  double y = 0;
};

class Triangulation {
 public:
  /// Coordinates are snapped to a lattice of 2^28 steps across the bounding
  /// box, which makes the orientation and incircle predicates exact. Points
  /// sharing a lattice site are triangulated once; the others stay isolated.
  /// Insertion follows a Hilbert order.
  explicit Triangulation(const std::vector<Point>& points);

  std::size_t point_count() const { return points_.size(); }
  /// Snapped coordinates actually triangulated.
  const std::vector<Point>& points() const { return points_; }

  /// Counter-clockwise vertex triples.
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  /// neighbors()[t][k] is the triangle across the edge opposite vertex k, -1 on the hull.
  const std::vector<std::array<int, 3>>& neighbors() const { return neighbors_; }

  /// True when every point is collinear (no triangle survives).
  bool degenerate() const { return triangles_.empty(); }

  struct Location {
    int triangle = -1;
    std::array<double, 3> bary{};
  };

  /// Triangle containing p with barycentric coordinates, or triangle = -1 when
  /// p lies outside the hull. `hint` seeds the walk.
  Location locate(Point p, int hint = -1) const;

  /// Sorted adjacency lists of the vertices.
  std::vector<std::vector<int>> vertex_neighbors() const;

 private:
  std::vector<Point> points_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 3>> neighbors_;
};

/// Twice the signed area of (a, b, c); positive for counter-clockwise order.
double orient(Point a, Point b, Point c);

}  // namespace chiprobe::reconstruct
