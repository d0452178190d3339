#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recordminer/dom.hpp"

namespace recordminer {

using Px = std::int64_t;

/// Bounding rectangle in abstract pixels, absolute page coordinates.
struct Rect {
    Px left = 0;
    Px top = 0;
    Px width = 0;
    Px height = 0;

    Px right() const noexcept { return left + width; }
    Px bottom() const noexcept { return top + height; }
    bool contains(const Rect& other) const noexcept {
        return left <= other.left && other.right() <= right() && top <= other.top &&
               other.bottom() <= bottom();
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

Px rect_area(const Rect& r) noexcept;

struct LayoutConfig {
    Px viewport_width = 1024;
    Px line_height = 18;
    Px char_width = 8;
    Px default_image_width = 100;
    Px default_image_height = 100;
    Px block_gap = 0;

    /// Throws ConfigError unless every field is positive (block_gap >= 0).
    void validate() const;
    friend bool operator==(const LayoutConfig&, const LayoutConfig&) = default;
};

class LayoutTree {
public:
    LayoutTree(std::shared_ptr<const Document> doc, LayoutConfig config, std::vector<std::optional<Rect>> rects)
        : doc_(std::move(doc)), config_(config), rects_(std::move(rects)) {}

    const Document& document() const noexcept { return *doc_; }
    std::shared_ptr<const Document> shared_document() const noexcept { return doc_; }
    const LayoutConfig& config() const noexcept { return config_; }

    /// Throws UnknownNode for ids outside the document, NotAnElement for text.
    const Rect& rect_of(NodeId id) const;

    /// One line per element: `id tag left top width height`.
    std::string rect_table() const;

private:
    std::shared_ptr<const Document> doc_;
    LayoutConfig config_;
    std::vector<std::optional<Rect>> rects_;  // indexed by node id
};

LayoutTree layout_document(std::shared_ptr<const Document> doc, const LayoutConfig& config = {});
LayoutTree layout_document(const Document& doc, const LayoutConfig& config = {});

inline const Rect& rect_of(const LayoutTree& tree, NodeId id) { return tree.rect_of(id); }

/// Length as written in a `width`/`height` attribute or inline style.
struct Length {
    enum class Unit { Px, Percent } unit = Unit::Px;
    Px value = 0;          // px, or percent in thousandths
    Px resolve(Px reference) const noexcept;
};

std::optional<Length> parse_length(std::string_view text);

/// Block-level tags stack vertically and take the parent's full width.
bool is_block_tag(std::string_view tag);

}  // namespace recordminer
