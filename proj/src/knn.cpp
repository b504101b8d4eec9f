#include "forecastability/knn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "forecastability/error.hpp"

namespace forecastability::knn {

MaxNormTree2d::MaxNormTree2d(std::span<const double> x, std::span<const double> y,
                             std::size_t leaf_size)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "x and y differ in length");
  order_.resize(x_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * (x_.size() / leaf_size_ + 1));
  if (!x_.empty()) build(0, x_.size());
}

std::size_t MaxNormTree2d::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back(Node{begin, end, {0, 0}, {0, 0}});
  double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double hi[2] = {-lo[0], -lo[1]};
  for (std::size_t p = begin; p < end; ++p) {
    const std::size_t i = order_[p];
    lo[0] = std::min(lo[0], x_[i]);
    hi[0] = std::max(hi[0], x_[i]);
    lo[1] = std::min(lo[1], y_[i]);
    hi[1] = std::max(hi[1], y_[i]);
  }
  nodes_[id].lo[0] = lo[0];
  nodes_[id].lo[1] = lo[1];
  nodes_[id].hi[0] = hi[0];
  nodes_[id].hi[1] = hi[1];
  if (end - begin <= leaf_size_) return id;

  const int dim = (hi[0] - lo[0]) >= (hi[1] - lo[1]) ? 0 : 1;
  const std::vector<double>& coord = dim == 0 ? x_ : y_;
  const std::size_t mid = begin + (end - begin) / 2;
  // Ties on the coordinate are ordered by index so the layout is reproducible.
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     return coord[a] < coord[b] || (coord[a] == coord[b] && a < b);
                   });
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double MaxNormTree2d::kth_distance(std::size_t i, std::size_t k) const {
  if (k == 0 || k >= x_.size()) {
    throw Error(ErrorCode::TooFewPoints, "k must satisfy 0 < k < N");
  }
  const double qx = x_[i];
  const double qy = y_[i];
  // Max-heap of the k best distances seen so far.
  std::vector<double> best;
  best.reserve(k + 1);
  auto worst = [&] {
    return best.size() < k ? std::numeric_limits<double>::infinity() : best.front();
  };
  auto box_distance = [&](const Node& n) {
    const double dx = std::max({n.lo[0] - qx, qx - n.hi[0], 0.0});
    const double dy = std::max({n.lo[1] - qy, qy - n.hi[1], 0.0});
    return std::max(dx, dy);
  };

  std::array<std::size_t, 128> stack{};
  std::size_t top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_distance(node) >= worst() && best.size() == k) continue;
    if (node.left == 0) {
      for (std::size_t p = node.begin; p < node.end; ++p) {
        const std::size_t j = order_[p];
        if (j == i) continue;
        const double d = std::max(std::abs(x_[j] - qx), std::abs(y_[j] - qy));
        if (best.size() < k) {
          best.push_back(d);
          std::push_heap(best.begin(), best.end());
        } else if (d < best.front()) {
          std::pop_heap(best.begin(), best.end());
          best.back() = d;
          std::push_heap(best.begin(), best.end());
        }
      }
      continue;
    }
    const Node& l = nodes_[node.left];
    const Node& r = nodes_[node.right];
    // Visit the nearer child first: push it last.
    if (box_distance(l) <= box_distance(r)) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best.front();
}

std::size_t count_strictly_within(std::span<const double> sorted, double center, double radius) {
  // |v - c| computed as (c - v) below the centre and (v - c) above it; both
  // are monotone in v, so partition points reproduce the elementwise test.
  const auto lower = std::partition_point(sorted.begin(), sorted.end(), [&](double v) {
    return v < center && !(std::abs(v - center) < radius);
  });
  const auto upper = std::partition_point(lower, sorted.end(), [&](double v) {
    return v < center || std::abs(v - center) < radius;
  });
  const auto total = static_cast<std::size_t>(upper - lower);
  // The centre itself is always inside (distance 0 < radius when radius > 0).
  return total > 0 && radius > 0.0 ? total - 1 : total;
}

}  // namespace forecastability::knn
