#pragma once

#include <algorithm>
#include <initializer_list>
#include <vector>

namespace pkb {

/// Sorted, duplicate-free value set with the handful of set-algebra
/// operations the engine needs. Extents and world sets are both IndexSets;
/// everything modal in the engine reduces to these operations.
template <typename T>
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<T> xs) : items_(xs) { normalize(); }
  explicit IndexSet(std::vector<T> xs) : items_(std::move(xs)) { normalize(); }

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  bool contains(const T& x) const {
    return std::binary_search(items_.begin(), items_.end(), x);
  }

  void insert(const T& x) {
    auto it = std::lower_bound(items_.begin(), items_.end(), x);
    if (it == items_.end() || *it != x) items_.insert(it, x);
  }

  bool is_subset_of(const IndexSet& other) const {
    return std::includes(other.items_.begin(), other.items_.end(),
                         items_.begin(), items_.end());
  }

  bool overlaps(const IndexSet& other) const {
    auto a = items_.begin();
    auto b = other.items_.begin();
    while (a != items_.end() && b != other.items_.end()) {
      if (*a < *b)
        ++a;
      else if (*b < *a)
        ++b;
      else
        return true;
    }
    return false;
  }

  static IndexSet intersect(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_intersection(a.items_.begin(), a.items_.end(), b.items_.begin(),
                          b.items_.end(), std::back_inserter(out.items_));
    return out;
  }

  static IndexSet unite(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_union(a.items_.begin(), a.items_.end(), b.items_.begin(),
                   b.items_.end(), std::back_inserter(out.items_));
    return out;
  }

  static IndexSet minus(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_difference(a.items_.begin(), a.items_.end(), b.items_.begin(),
                        b.items_.end(), std::back_inserter(out.items_));
    return out;
  }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const std::vector<T>& items() const { return items_; }

  friend auto operator<=>(const IndexSet&, const IndexSet&) = default;

 private:
  void normalize() {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  }

  std::vector<T> items_;
};

}  // namespace pkb
