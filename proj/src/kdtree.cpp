#include "causal/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "causal/error.hpp"

namespace causal {

KdTree::KdTree(const Eigen::MatrixXd& points, std::size_t leaf_size)
    : points_(points), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  index_.resize(size());
  std::iota(index_.begin(), index_.end(), std::size_t{0});
  if (size() > 0) build(0, size());
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end});
  if (end - begin <= leaf_size_ || points_.rows() == 0) return id;

  // Split on the dimension of widest spread, at the median.
  long best_dim = 0;
  double best_spread = -1.0;
  for (long d = 0; d < points_.rows(); ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = begin; k < end; ++k) {
      const double v = points_(d, static_cast<long>(index_[k]));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = d;
    }
  }
  if (best_spread <= 0.0) return id;

  const std::size_t mid = begin + (end - begin) / 2;
  auto first = index_.begin() + static_cast<long>(begin);
  std::nth_element(first, index_.begin() + static_cast<long>(mid), index_.begin() + static_cast<long>(end),
                   [&](std::size_t a, std::size_t b) {
                     return points_(best_dim, static_cast<long>(a)) < points_(best_dim, static_cast<long>(b));
                   });
  const double split = points_(best_dim, static_cast<long>(index_[mid]));
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[id].dim = best_dim;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(std::size_t node_id, const double* query, std::size_t r, long exclude,
                    std::vector<double>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.dim < 0) {
    const long dims = points_.rows();
    for (std::size_t k = node.begin; k < node.end; ++k) {
      const std::size_t p = index_[k];
      if (static_cast<long>(p) == exclude) continue;
      double d2 = 0.0;
      for (long d = 0; d < dims; ++d) {
        const double diff = points_(d, static_cast<long>(p)) - query[d];
        d2 += diff * diff;
      }
      if (heap.size() < r) {
        heap.push_back(d2);
        std::push_heap(heap.begin(), heap.end());
      } else if (d2 < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = d2;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  const double diff = query[node.dim] - node.split;
  const std::size_t near = diff < 0.0 ? node.left : node.right;
  const std::size_t far = diff < 0.0 ? node.right : node.left;
  search(near, query, r, exclude, heap);
  if (heap.size() < r || diff * diff <= heap.front()) search(far, query, r, exclude, heap);
}

double KdTree::rth_distance(const double* query, std::size_t r, long exclude) const {
  const std::size_t available = size() - (exclude >= 0 && static_cast<std::size_t>(exclude) < size() ? 1 : 0);
  if (r == 0 || r > available) {
    throw UsageError("neighbour rank " + std::to_string(r) + " exceeds the " + std::to_string(available) +
                     " available points");
  }
  std::vector<double> heap;
  heap.reserve(r);
  search(0, query, r, exclude, heap);
  return std::sqrt(heap.front());
}

}  // namespace causal
