#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sscc/geometry.hpp"

namespace sscc {

using ItemId = std::int64_t;

struct IndexEntry {
  ItemId item_id = 0;
  BoundingBox bbox;
};

struct Neighbor {
  ItemId item_id = 0;
  double distance = 0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sort-Tile-Recursive packed R-tree. Bulk loaded once, read-only afterwards.
class StrTree {
 public:
  static constexpr std::size_t kDefaultNodeCapacity = 16;

  using GeometryLookup = std::function<const Geometry&(ItemId)>;
  /// Exact distance from the query origin to an indexed item.
  using DistanceFn = std::function<double(ItemId)>;

  StrTree() = default;

  /// Throws ConfigError when node_capacity < 2.
  static StrTree build(std::vector<IndexEntry> entries,
                       std::size_t node_capacity = kDefaultNodeCapacity);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t node_capacity() const { return capacity_; }
  /// Number of levels including the leaf level; 0 for an empty tree.
  std::size_t height() const { return levels_; }
  /// Children of the root node (entries when the root is a leaf).
  std::size_t root_child_count() const;
  BoundingBox bounds() const;
  /// Entries in packed order.
  const std::vector<IndexEntry>& entries() const { return entries_; }

  /// Ids of entries whose bbox intersects the window, ascending.
  std::vector<ItemId> query_bbox(const BoundingBox& window) const;

  /// Visits every entry whose bbox intersects the window, in tree order.
  void visit_bbox(const BoundingBox& window, const std::function<void(ItemId)>& visit) const;

  /// k nearest items to origin by exact geometry distance, ascending, ties by id.
  std::vector<Neighbor> nearest_k(Point origin, std::size_t k, const GeometryLookup& lookup) const;

  /// k nearest items to an arbitrary geometry, skipping `exclude` and anything
  /// farther than max_distance.
  std::vector<Neighbor> nearest_k(const Geometry& origin, std::size_t k, const GeometryLookup& lookup,
                                  double max_distance = std::numeric_limits<double>::infinity(),
                                  const std::function<bool(ItemId)>& exclude = {}) const;

  /// Best-first core: origin_box bounds the query geometry; exact() returns the
  /// true distance, which must not be below the bbox-to-bbox distance.
  std::vector<Neighbor> nearest(const BoundingBox& origin_box, std::size_t k, const DistanceFn& exact,
                                double max_distance = std::numeric_limits<double>::infinity(),
                                const std::function<bool(ItemId)>& exclude = {}) const;

  /// Checks the structural invariants (parent boxes cover children, leaf capacity).
  bool check_invariants() const;

 private:
  struct Node {
    BoundingBox bbox;
    std::uint32_t first = 0;  // first child node, or first entry for leaves
    std::uint32_t count = 0;
    bool leaf = false;
  };

  std::vector<IndexEntry> entries_;
  std::vector<Node> nodes_;
  std::size_t root_ = 0;
  std::size_t levels_ = 0;
  std::size_t capacity_ = kDefaultNodeCapacity;
};

}  // namespace sscc
