#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace recordminer {

using NodeId = std::uint32_t;

enum class NodeKind { Element, Text };

struct DomNode {
    NodeKind kind = NodeKind::Element;
    NodeId id = 0;
    std::optional<NodeId> parent;
    std::string tag;  // lowercase, elements only
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string text;  // text nodes only
    std::vector<NodeId> children;

    bool is_element() const noexcept { return kind == NodeKind::Element; }
    bool is_text() const noexcept { return kind == NodeKind::Text; }

    /// First attribute with the given (lowercase) name.
    std::optional<std::string_view> attribute(std::string_view name) const;
};

enum class Encoding { Utf8, Latin1 };

/// Immutable parsed page. Nodes are stored in pre-order, so a node's id is
/// also its index and document order is id order.
class Document {
public:
    const DomNode& root() const { return nodes_.front(); }
    const DomNode& body() const { return nodes_[body_]; }
    NodeId body_id() const noexcept { return body_; }

    const DomNode& node(NodeId id) const;  // throws UnknownNode
    bool contains(NodeId id) const noexcept { return id < nodes_.size(); }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::span<const DomNode> nodes() const noexcept { return nodes_; }
    std::size_t source_length() const noexcept { return source_length_; }

    /// Element children only, in document order.
    std::vector<NodeId> element_children(NodeId id) const;

    /// Index path of element children from body to `id`; nullopt when `id`
    /// is not inside body.
    std::optional<std::vector<std::size_t>> selector_of(NodeId id) const;

private:
    friend class TreeBuilder;
    std::vector<DomNode> nodes_;
    NodeId body_ = 0;
    std::size_t source_length_ = 0;
};

Document parse_html(std::string_view input, Encoding encoding = Encoding::Utf8);

/// Resolves "utf-8"/"utf8"/"latin-1"/"iso-8859-1" (case-insensitive); throws
/// EncodingError for anything else.
Encoding encoding_from_name(std::string_view name);

const DomNode& find_body(const Document& doc);

/// Writes the tree back to markup with every element explicitly closed.
std::string serialize(const Document& doc);

/// Tag is rendered as a raw-text container (script/style).
bool is_raw_text_tag(std::string_view tag);

/// ASCII whitespace runs collapsed to one space, ends trimmed.
std::string collapse_whitespace(std::string_view text);

}  // namespace recordminer
