#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace forecastability::knn {

/// Static 2-d tree for exact k-nearest-neighbour distances under the
/// max-norm. Built once over (x, y) pairs; queries are const and may run
/// concurrently.
class MaxNormTree2d {
 public:
  MaxNormTree2d(std::span<const double> x, std::span<const double> y, std::size_t leaf_size = 8);

  /// Distance from point `i` to its k-th nearest other point (the point itself
  /// is excluded). Requires k < size().
  double kth_distance(std::size_t i, std::size_t k) const;

  std::size_t size() const noexcept { return x_.size(); }

 private:
  struct Node {
    std::size_t begin;
    std::size_t end;
    double lo[2];
    double hi[2];
    std::size_t left = 0;   // child indices, 0 = leaf
    std::size_t right = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end);

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
};

/// Number of j != i with |v[j] - v[i]| < radius, given `sorted` as an
/// ascending copy of v. Exactly matches the brute-force comparison in
/// floating point.
std::size_t count_strictly_within(std::span<const double> sorted, double center, double radius);

}  // namespace forecastability::knn
