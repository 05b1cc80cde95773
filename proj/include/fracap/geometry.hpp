#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fracap {

using Point = std::array<double, 3>;  // first n entries meaningful

struct VoxelMask {
  int n = 0;
  Point origin{0, 0, 0};  // corner of cell (0,0,0)
  double h = 0.0;
  std::array<int, 3> dims{1, 1, 1};
  std::vector<std::uint8_t> mask;  // row-major, x fastest

  std::size_t cellCount() const {
    std::size_t c = 1;
    for (int k = 0; k < n; ++k) c *= (std::size_t)dims[k];
    return c;
  }
  std::size_t flatIndex(const std::array<int, 3>& idx) const {
    std::size_t f = 0;
    for (int k = n - 1; k >= 0; --k) f = f * dims[k] + idx[k];
    return f;
  }
  Point cellCenter(const std::array<int, 3>& idx) const {
    Point p{0, 0, 0};
    for (int k = 0; k < n; ++k) p[k] = origin[k] + (idx[k] + 0.5) * h;
    return p;
  }
  bool at(const std::array<int, 3>& idx) const {
    for (int k = 0; k < n; ++k)
      if (idx[k] < 0 || idx[k] >= dims[k]) return false;
    return mask[flatIndex(idx)] != 0;
  }
  double volume() const;      // set cells * h^n
  std::size_t setCount() const;
};

struct Shape {
  enum class Kind { Ball, Box, Union, Voxels };
  Kind kind = Kind::Ball;
  int n = 3;

  // ball
  Point center{0, 0, 0};
  double radius = 1.0;
  // box
  Point lo{0, 0, 0}, hi{1, 1, 1};
  // union
  std::vector<Shape> parts;
  // voxels
  VoxelMask voxels;

  static Shape ball(int n, Point c, double r);
  static Shape box(int n, Point lo, Point hi);
  static Shape unionOf(std::vector<Shape> parts);
  static Shape fromVoxels(VoxelMask m);

  bool contains(const Point& p) const;
  void boundingBox(Point& outLo, Point& outHi) const;
  double circumRadiusAboutOrigin() const;
  void validate() const;

  Shape translated(const Point& dx) const;
  Shape scaled(double lam) const;  // about the origin
};

// Lebesgue measure. resolution == 0 requests the analytic value and throws
// std::runtime_error("needs rasterization") when it is not available
// (overlapping union members). resolution > 0 falls back to cell counting.
double volume(const Shape& shape, double resolution);

// Rasterization by cell-center sampling onto a grid of spacing h covering the
// bounding box (optionally a caller-supplied box).
VoxelMask rasterize(const Shape& shape, double h);
VoxelMask rasterize(const Shape& shape, double h, const Point& boxLo, const Point& boxHi);

// |a Delta b|; analytic for ball-vs-ball, rasterized on the joint bounding
// box otherwise.
double symmetricDifference(const Shape& a, const Shape& b, double resolution);

// closed-form |B(c1,r1) ^ B(c2,r2)| intersection volume, n in {1,2,3}
double ballIntersectionVolume(int n, double d, double r1, double r2);

struct AsymmetryResult {
  double value = 0.0;
  Point optimalCenter{0, 0, 0};
  double optimalRadius = 0.0;
};

// Fraenkel asymmetry: inf |Omega ^ B| / |Omega| over balls of equal volume.
// Exhaustive center grid at spacing 2h, then coordinate descent at h/4.
AsymmetryResult fraenkelAsymmetry(const Shape& shape, double resolution);

// Same optimizer run directly on a voxel set.
AsymmetryResult fraenkelAsymmetryOfMask(const VoxelMask& m);

// exposed-face estimator, length^{n-1}
double voxelPerimeter(const VoxelMask& m);

}  // namespace fracap
