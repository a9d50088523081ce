#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "seedo/error.hpp"

namespace seedo {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

/// Vertex list, one row per point.
template <typename Scalar>
using PointList = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

using Point2d = Point2<double>;
using PointListd = PointList<double>;

template <typename Scalar>
struct BBox {
  Point2<Scalar> min;
  Point2<Scalar> max;

  bool contains(const Point2<Scalar>& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool operator==(const BBox&) const = default;
};

using BBoxd = BBox<double>;

template <typename Derived>
BBox<typename Derived::Scalar> bounding_box(const Eigen::MatrixBase<Derived>& points) {
  return {points.colwise().minCoeff().transpose(), points.colwise().maxCoeff().transpose()};
}

/// Arithmetic mean of a non-empty keypoint list.
template <typename Derived>
Point2<typename Derived::Scalar> center_of_keypoints(const Eigen::MatrixBase<Derived>& keypoints) {
  if (keypoints.rows() == 0) throw Error(ErrorKind::EmptyKeypoints, "keypoint list is empty");
  return keypoints.colwise().mean().transpose();
}

/// Area centroid of a simple polygon via the shoelace formula. Zero-area
/// polygons fall back to the vertex mean.
template <typename Derived>
Point2<typename Derived::Scalar> centroid_of_contour(const Eigen::MatrixBase<Derived>& contour) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = contour.rows();
  if (n < 3) throw Error(ErrorKind::DegenerateContour, "contour needs at least 3 vertices");

  // Shift to the first vertex so large pixel coordinates do not cancel.
  const Point2<Scalar> origin = contour.row(0).transpose();
  Scalar twice_area = 0;
  Point2<Scalar> acc = Point2<Scalar>::Zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point2<Scalar> a = contour.row(i).transpose() - origin;
    const Point2<Scalar> b = contour.row((i + 1) % n).transpose() - origin;
    const Scalar cross = a.x() * b.y() - b.x() * a.y();
    twice_area += cross;
    acc += (a + b) * cross;
  }
  const Scalar scale = contour.cwiseAbs().maxCoeff() + Scalar(1);
  if (std::abs(twice_area) <= Scalar(1e-12) * scale * scale) {
    return contour.colwise().mean().transpose();
  }
  return origin + acc / (Scalar(3) * twice_area);
}

}  // namespace seedo
