#include "recordminer/region.hpp"

#include "recordminer/error.hpp"

namespace recordminer {

NodeId find_max_rect(const LayoutTree& tree) {
    const auto& doc = tree.document();
    const auto children = doc.element_children(doc.body_id());
    if (children.empty()) {
        throw Error(ErrorKind::NoChildren, "region", "body has no element children");
    }
    NodeId best = children.front();
    Px best_area = rect_area(tree.rect_of(best));
    for (const auto child : children) {
        const Px area = rect_area(tree.rect_of(child));
        if (area > best_area) {
            best = child;
            best_area = area;
        }
    }
    return best;
}

NodeId find_container(const LayoutTree& tree, NodeId max_rect_node) {
    const auto& doc = tree.document();
    const Px max_area = rect_area(tree.rect_of(max_rect_node));

    NodeId best = max_rect_node;
    bool found = false;
    Px best_area = 0;
    std::vector<NodeId> pending;
    const auto push_children = [&](NodeId id) {
        const auto& children = doc.node(id).children;
        for (auto it = children.rbegin(); it != children.rend(); ++it) {
            if (doc.node(*it).is_element()) pending.push_back(*it);
        }
    };
    push_children(max_rect_node);
    while (!pending.empty()) {
        const auto id = pending.back();
        pending.pop_back();
        const Px area = rect_area(tree.rect_of(id));
        if (2 * area > max_area && (!found || area < best_area)) {
            best = id;
            best_area = area;
            found = true;
        }
        push_children(id);
    }
    return best;
}

DataRegion filter_data_region(const LayoutTree& tree, NodeId container) {
    const auto children = tree.document().element_children(container);
    if (children.empty()) {
        throw Error(ErrorKind::NoChildren, "region",
                    "container " + std::to_string(container) + " has no element children");
    }
    Px total = 0;
    for (const auto child : children) total += tree.rect_of(child).height;
    DataRegion region;
    region.container = container;
    region.rect = tree.rect_of(container);
    region.avg_child_height = total / static_cast<Px>(children.size());
    for (const auto child : children) {
        if (tree.rect_of(child).height >= region.avg_child_height) {
            region.kept_children.push_back(child);
        }
    }
    return region;
}

DataRegion mine_region(const LayoutTree& tree) {
    const auto max_rect = find_max_rect(tree);
    const auto container = find_container(tree, max_rect);
    return filter_data_region(tree, container);
}

DataRegion mine_region(const Document& doc, const LayoutConfig& config) {
    return mine_region(layout_document(doc, config));
}

}  // namespace recordminer
