#include "reflsolve/sphere.hpp"

#include <string>

#include "reflsolve/errors.hpp"

namespace reflsolve {

namespace {

constexpr double kRankTol = 1e-10;

SvdResult checked_svd(const DenseMatrix& b, const char* who) {
  if (b.rows() < b.cols()) {
    throw DegenerateCloudError(std::string(who) + ": fewer equations than unknowns");
  }
  SvdResult svd = singular_values(b);
  if (!(svd.largest() > 0.0) || svd.smallest() <= kRankTol * svd.largest()) {
    throw DegenerateCloudError(std::string(who) + ": Thales matrix is rank deficient (sigma_min " +
                               std::to_string(svd.smallest()) + ", sigma_max " +
                               std::to_string(svd.largest()) + ")");
  }
  return svd;
}

}  // namespace

PointCloud::PointCloud(std::vector<Vector> points) : points_(std::move(points)) {
  for (const Vector& p : points_) {
    if (p.size() != points_.front().size()) {
      throw DimensionError("PointCloud: points have different dimensions");
    }
  }
  if (!points_.empty() && points_.front().empty()) {
    throw DimensionError("PointCloud: zero-dimensional points");
  }
}

PointCloud PointCloud::from_rows(const DenseMatrix& rows) {
  std::vector<Vector> pts;
  pts.reserve(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) pts.emplace_back(rows.row(i).begin(), rows.row(i).end());
  return PointCloud(std::move(pts));
}

ThalesSystem build_thales_system(const PointCloud& cloud) {
  if (cloud.size() < 2) throw DimensionError("build_thales_system: need at least 2 points");
  const auto& pts = cloud.points();
  const std::size_t n = cloud.dimension();
  ThalesSystem sys{DenseMatrix(pts.size() - 1, n), Vector(pts.size() - 1), pts.front()};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    auto row = sys.b.row(i - 1);
    for (std::size_t j = 0; j < n; ++j) row[j] = pts[i][j] - pts[0][j];
    sys.c[i - 1] = squared_norm(row);
  }
  return sys;
}

Vector center_via_thales(const PointCloud& cloud) {
  const std::size_t n = cloud.dimension();
  if (cloud.size() < n + 1) {
    throw DegenerateCloudError("center_via_thales: need at least n+1 = " + std::to_string(n + 1) +
                               " points, got " + std::to_string(cloud.size()));
  }
  const ThalesSystem sys = build_thales_system(cloud);
  checked_svd(sys.b, "center_via_thales");

  Vector y;
  if (sys.b.rows() == n) {
    y = solve_direct(sys.b, sys.c);
  } else {
    y = solve_direct(gram(sys.b), transpose_matvec(sys.b, sys.c));
  }
  Vector center = sys.base_point;
  axpy(0.5, y, center);
  return center;
}

Vector center_via_average(const PointCloud& cloud) {
  if (cloud.size() == 0) throw std::invalid_argument("center_via_average: empty cloud");
  Vector mean(cloud.dimension(), 0.0);
  for (const Vector& p : cloud.points()) axpy(1.0, p, mean);
  for (double& v : mean) v /= static_cast<double>(cloud.size());
  return mean;
}

ConditioningReport conditioning_report(const DenseMatrix& b) {
  const SvdResult svd = checked_svd(b, "conditioning_report");
  const double fro = frobenius_norm(b);
  return ConditioningReport{
      .frobenius_norm = fro,
      .inverse_norm = 1.0 / svd.smallest(),
      .inverse_frobenius_condition = svd.smallest() / fro,
      .condition_number = svd.largest() / svd.smallest(),
  };
}

}  // namespace reflsolve
