#include "sscc/str_tree.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>

namespace sscc {

namespace {

// STR ordering of n boxes: x-sorted vertical slices, each y-sorted. Returns the
// permutation and the group boundaries (runs of at most `capacity` within a slice).
template <typename BoxAt, typename Less>
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> str_pack(std::size_t n,
                                                                       std::size_t capacity,
                                                                       BoxAt box_at, Less tie) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto by = [&](auto coord) {
    return [&, coord](std::size_t a, std::size_t b) {
      const double ca = coord(box_at(a).center());
      const double cb = coord(box_at(b).center());
      if (ca != cb) return ca < cb;
      return tie(a, b);
    };
  };
  std::sort(order.begin(), order.end(), by([](Point p) { return p.x; }));

  const std::size_t leaves = (n + capacity - 1) / capacity;
  const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(leaves))));
  const std::size_t slice_size = slices * capacity;

  std::vector<std::size_t> bounds{0};
  for (std::size_t start = 0; start < n; start += slice_size) {
    const std::size_t stop = std::min(n, start + slice_size);
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(start),
              order.begin() + static_cast<std::ptrdiff_t>(stop), by([](Point p) { return p.y; }));
    for (std::size_t g = start; g < stop; g += capacity) {
      bounds.push_back(std::min(stop, g + capacity));
    }
  }
  return {std::move(order), std::move(bounds)};
}

BoundingBox cover(auto first, auto last, auto box_of) {
  BoundingBox b = box_of(*first);
  for (auto it = first; it != last; ++it) b.extend(box_of(*it));
  return b;
}

}  // namespace

StrTree StrTree::build(std::vector<IndexEntry> entries, std::size_t node_capacity) {
  if (node_capacity < 2) throw ConfigError("node_capacity must be at least 2");
  StrTree tree;
  tree.capacity_ = node_capacity;
  if (entries.empty()) return tree;

  const std::size_t n = entries.size();
  auto [order, bounds] = str_pack(
      n, node_capacity, [&](std::size_t i) -> const BoundingBox& { return entries[i].bbox; },
      [&](std::size_t a, std::size_t b) {
        return std::tie(entries[a].item_id, a) < std::tie(entries[b].item_id, b);
      });
  tree.entries_.reserve(n);
  for (std::size_t i : order) tree.entries_.push_back(entries[i]);

  std::vector<Node> level;
  for (std::size_t g = 0; g + 1 < bounds.size(); ++g) {
    Node node;
    node.leaf = true;
    node.first = static_cast<std::uint32_t>(bounds[g]);
    node.count = static_cast<std::uint32_t>(bounds[g + 1] - bounds[g]);
    node.bbox = cover(tree.entries_.begin() + bounds[g], tree.entries_.begin() + bounds[g + 1],
                      [](const IndexEntry& e) { return e.bbox; });
    level.push_back(node);
  }
  tree.levels_ = 1;

  while (true) {
    auto [lorder, lbounds] = str_pack(
        level.size(), node_capacity,
        [&](std::size_t i) -> const BoundingBox& { return level[i].bbox; },
        [](std::size_t a, std::size_t b) { return a < b; });
    const std::size_t base = tree.nodes_.size();
    for (std::size_t i : lorder) tree.nodes_.push_back(level[i]);
    if (level.size() == 1) {
      tree.root_ = base;
      break;
    }
    std::vector<Node> parents;
    for (std::size_t g = 0; g + 1 < lbounds.size(); ++g) {
      Node node;
      node.first = static_cast<std::uint32_t>(base + lbounds[g]);
      node.count = static_cast<std::uint32_t>(lbounds[g + 1] - lbounds[g]);
      node.bbox = cover(tree.nodes_.begin() + static_cast<std::ptrdiff_t>(node.first),
                        tree.nodes_.begin() + static_cast<std::ptrdiff_t>(node.first + node.count),
                        [](const Node& c) { return c.bbox; });
      parents.push_back(node);
    }
    level = std::move(parents);
    ++tree.levels_;
  }
  return tree;
}

std::size_t StrTree::root_child_count() const { return nodes_.empty() ? 0 : nodes_[root_].count; }

BoundingBox StrTree::bounds() const { return nodes_.empty() ? BoundingBox{} : nodes_[root_].bbox; }

void StrTree::visit_bbox(const BoundingBox& window,
                         const std::function<void(ItemId)>& visit) const {
  if (nodes_.empty()) return;
  std::vector<std::size_t> stack{root_};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!node.bbox.intersects(window)) continue;
    for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
      if (node.leaf) {
        if (entries_[i].bbox.intersects(window)) visit(entries_[i].item_id);
      } else {
        stack.push_back(i);
      }
    }
  }
}

std::vector<ItemId> StrTree::query_bbox(const BoundingBox& window) const {
  std::vector<ItemId> out;
  visit_bbox(window, [&](ItemId id) { out.push_back(id); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Neighbor> StrTree::nearest(const BoundingBox& origin_box, std::size_t k,
                                       const DistanceFn& exact, double max_distance,
                                       const std::function<bool(ItemId)>& exclude) const {
  std::vector<Neighbor> out;
  if (nodes_.empty() || k == 0) return out;

  enum Rank : int { kNode = 0, kEntry = 1, kExact = 2 };
  // (lower bound, rank, ref): nodes and unresolved entries pop before exact hits
  // at equal distance, so equal-distance exact hits are all queued before the
  // first one is emitted and the id tie-break is honoured.
  using Item = std::tuple<double, int, ItemId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  queue.emplace(nodes_[root_].bbox.distance(origin_box), kNode, static_cast<ItemId>(root_));

  while (!queue.empty()) {
    const auto [key, rank, ref] = queue.top();
    queue.pop();
    if (key > max_distance) break;
    if (rank == kExact) {
      out.push_back({ref, key});
      if (out.size() == k) break;
      continue;
    }
    if (rank == kEntry) {
      const IndexEntry& e = entries_[static_cast<std::size_t>(ref)];
      const double d = exact(e.item_id);
      assert(d + kTolerance >= key && "bbox lower bound exceeds exact distance");
      queue.emplace(d, kExact, e.item_id);
      continue;
    }
    const Node& node = nodes_[static_cast<std::size_t>(ref)];
    for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
      if (node.leaf) {
        if (exclude && exclude(entries_[i].item_id)) continue;
        queue.emplace(entries_[i].bbox.distance(origin_box), kEntry, static_cast<ItemId>(i));
      } else {
        queue.emplace(nodes_[i].bbox.distance(origin_box), kNode, static_cast<ItemId>(i));
      }
    }
  }
  return out;
}

std::vector<Neighbor> StrTree::nearest_k(Point origin, std::size_t k,
                                         const GeometryLookup& lookup) const {
  const Geometry probe = Geometry::point(origin.x, origin.y);
  return nearest_k(probe, k, lookup);
}

std::vector<Neighbor> StrTree::nearest_k(const Geometry& origin, std::size_t k,
                                         const GeometryLookup& lookup, double max_distance,
                                         const std::function<bool(ItemId)>& exclude) const {
  return nearest(
      origin.bbox(), k, [&](ItemId id) { return distance(origin, lookup(id)); }, max_distance,
      exclude);
}

bool StrTree::check_invariants() const {
  for (const Node& node : nodes_) {
    if (node.leaf && node.count > capacity_) return false;
    if (node.count == 0) return false;
    for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
      const BoundingBox& child = node.leaf ? entries_[i].bbox : nodes_[i].bbox;
      if (!node.bbox.contains(child)) return false;
    }
  }
  return true;
}

}  // namespace sscc
