#pragma once

#include <vector>

#include "recordminer/dom.hpp"
#include "recordminer/layout.hpp"

namespace recordminer {

/// The relevant data region: a container node and those of its element
/// children that are at least as tall as the average child.
struct DataRegion {
    NodeId container = 0;
    std::vector<NodeId> kept_children;
    Rect rect;
    Px avg_child_height = 0;
};

/// Largest-area element child of body; the first one wins ties.
/// Throws NoChildren when body has no element children.
NodeId find_max_rect(const LayoutTree& tree);

/// Smallest-area descendant of `max_rect_node` (depth-first, pre-order)
/// whose area is strictly more than half of max_rect_node's area. Falls back
/// to `max_rect_node` when nothing qualifies.
NodeId find_container(const LayoutTree& tree, NodeId max_rect_node);

/// Drops the container's element children whose height is below the
/// integer-division average. Throws NoChildren for a childless container.
DataRegion filter_data_region(const LayoutTree& tree, NodeId container);

DataRegion mine_region(const LayoutTree& tree);
DataRegion mine_region(const Document& doc, const LayoutConfig& config = {});

}  // namespace recordminer
