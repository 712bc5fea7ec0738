#pragma once

#include "acetrec/curve.hpp"

#include <vector>

namespace acetrec {

/// One 2D-3D link: vertex `vertex` should project onto `point` in view `view`.
struct Correspondence {
  int view = 0;
  int vertex = 0;
  Vec2 point = Vec2::Zero();
};

struct CorrespondenceSet {
  std::vector<Correspondence> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }

  void append(const CorrespondenceSet& other) {
    items.insert(items.end(), other.items.begin(), other.items.end());
  }

  /// Positions in `items` that belong to view k, in stored order.
  std::vector<int> indices_for_view(int k) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].view == k) out.push_back(static_cast<int>(i));
    }
    return out;
  }
};

}  // namespace acetrec
