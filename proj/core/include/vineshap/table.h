#ifndef VINESHAP_TABLE_H_
#define VINESHAP_TABLE_H_

#include <span>

#include <Eigen/Core>

namespace vineshap {

// Observations are stored one per row so that a row can be handed out as a
// contiguous span.
using Table = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> Row(const Table& t, Eigen::Index i) {
  return {t.data() + i * t.cols(), static_cast<std::size_t>(t.cols())};
}

inline std::span<double> Row(Table& t, Eigen::Index i) {
  return {t.data() + i * t.cols(), static_cast<std::size_t>(t.cols())};
}

}  // namespace vineshap

#endif  // VINESHAP_TABLE_H_
