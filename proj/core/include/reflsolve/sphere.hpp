#pragma once

#include <vector>

#include "reflsolve/linalg.hpp"

namespace reflsolve {

/// Points in R^n, all of the same dimension.
class PointCloud {
 public:
  explicit PointCloud(std::vector<Vector> points);
  /// Each matrix row is one point.
  static PointCloud from_rows(const DenseMatrix& rows);

  const std::vector<Vector>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dimension() const noexcept { return points_.empty() ? 0 : points_.front().size(); }

 private:
  std::vector<Vector> points_;
};

/// ⟨x_i − x_1, y⟩ = ‖x_i − x_1‖² for i = 2..m, whose solution y = 2r puts the
/// center at x_1 + y/2. Rows of B are x_i − x_1 (not 2(x_i − x_1)); scaling B
/// by 2 halves y and leaves 1/(‖B⁻¹‖‖B‖_F) unchanged.
struct ThalesSystem {
  DenseMatrix b;
  Vector c;
  Vector base_point;
};

ThalesSystem build_thales_system(const PointCloud& cloud);

/// Direct solve when m − 1 = n, normal equations BᵀB y = Bᵀc when m − 1 > n.
/// Throws DegenerateCloudError when σ_min(B) <= 1e-10·σ_max(B) or m < n + 1.
Vector center_via_thales(const PointCloud& cloud);

Vector center_via_average(const PointCloud& cloud);

struct ConditioningReport {
  double frobenius_norm;
  /// 1/σ_min
  double inverse_norm;
  /// 1/(‖B⁻¹‖·‖B‖_F) = σ_min/‖B‖_F
  double inverse_frobenius_condition;
  /// σ_max/σ_min
  double condition_number;
};

/// Works for tall B as well; there ‖B⁻¹‖ means 1/σ_min(B). Throws
/// DegenerateCloudError on numerical rank deficiency.
ConditioningReport conditioning_report(const DenseMatrix& b);

}  // namespace reflsolve
