#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace causal {

/// Static kd-tree over the columns of a matrix, Euclidean metric.
class KdTree {
 public:
  /// Copies `points` (one point per column).
  explicit KdTree(const Eigen::MatrixXd& points, std::size_t leaf_size = 8);

  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  std::size_t dimension() const { return static_cast<std::size_t>(points_.rows()); }

  /// Distance from `query` to its r-th nearest point (r >= 1). The point with
  /// column index `exclude` is skipped when exclude >= 0.
  double rth_distance(const double* query, std::size_t r, long exclude = -1) const;

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    long dim = -1;  // -1 marks a leaf
    double split = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  void search(std::size_t node, const double* query, std::size_t r, long exclude,
              std::vector<double>& heap) const;

  Eigen::MatrixXd points_;
  std::vector<std::size_t> index_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
};

}  // namespace causal
