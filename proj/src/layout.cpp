#include "recordminer/layout.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <sstream>

#include "recordminer/error.hpp"

namespace recordminer {

namespace {

constexpr std::array<std::string_view, 48> kBlockTags = {
    "html",    "body",     "div",      "p",       "table",  "tr",      "ul",      "ol",
    "li",      "h1",       "h2",       "h3",      "h4",     "h5",      "h6",      "form",
    "center",  "blockquote", "dl",     "dd",      "dt",     "section", "article", "header",
    "footer",  "nav",      "aside",    "main",    "pre",    "hr",      "address", "fieldset",
    "tbody",   "thead",    "tfoot",    "caption", "td",     "th",      "figure",  "figcaption",
    "menu",    "hgroup",   "details",  "summary", "legend", "dir",     "listing", "xmp"};

constexpr std::array<std::string_view, 10> kHiddenTags = {
    "script", "style", "head", "title", "meta", "link", "base", "noscript", "template", "param"};

constexpr std::array<std::string_view, 6> kReplacedTags = {
    "iframe", "embed", "object", "video", "canvas", "frame"};

template <std::size_t N>
bool one_of(std::string_view tag, const std::array<std::string_view, N>& set) {
    return std::find(set.begin(), set.end(), tag) != set.end();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Inline style declarations we care about: width, height, display.
struct InlineStyle {
    std::optional<Length> width;
    std::optional<Length> height;
    bool display_none = false;
};

InlineStyle parse_style(std::string_view style) {
    InlineStyle out;
    while (!style.empty()) {
        const auto semi = style.find(';');
        const auto decl = style.substr(0, semi);
        style = semi == std::string_view::npos ? std::string_view{} : style.substr(semi + 1);
        const auto colon = decl.find(':');
        if (colon == std::string_view::npos) continue;
        const auto key = lower(trim(decl.substr(0, colon)));
        auto value = lower(trim(decl.substr(colon + 1)));
        if (const auto bang = value.find('!'); bang != std::string::npos) {
            value = std::string(trim(std::string_view(value).substr(0, bang)));
        }
        if (key == "width") {
            out.width = parse_length(value);
        } else if (key == "height") {
            out.height = parse_length(value);
        } else if (key == "display") {
            out.display_none = value == "none";
        }
    }
    return out;
}

std::size_t codepoints(std::string_view s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

// Inline formatting context for one block container: words and atoms flow
// left to right and wrap into lines.
class Flow {
public:
    Flow(Px left, Px top, Px width, const LayoutConfig& config)
        : left_(left), width_(width), y_(top), config_(config) {}

    Px y() const noexcept { return y_; }
    void set_y(Px y) noexcept { y_ = y; }
    bool has_content() const noexcept { return has_content_; }
    void mark_content() noexcept { has_content_ = true; }

    struct Placement {
        Px left;
        Px top;
    };

    Placement place(Px w, Px h) {
        if (line_open_ && line_atoms_ > 0) {
            const Px needed = (pending_space_ ? config_.char_width : 0) + w;
            if (cursor_ + needed > left_ + width_) end_line();
        }
        if (!line_open_) open_line();
        if (pending_space_ && line_atoms_ > 0) cursor_ += config_.char_width;
        pending_space_ = false;
        const Px x0 = cursor_;
        cursor_ += w;
        ++line_atoms_;
        auto& line = lines_.back();
        line.height = std::max(line.height, h);
        for (const auto index : open_inlines_) {
            auto& rec = inlines_[index];
            const auto line_index = lines_.size() - 1;
            if (!rec.any) {
                rec.any = true;
                rec.first_line = line_index;
                rec.min_x = x0;
                rec.max_x = cursor_;
            }
            rec.last_line = line_index;
            rec.min_x = std::min(rec.min_x, x0);
            rec.max_x = std::max(rec.max_x, cursor_);
        }
        return {x0, line.top};
    }

    void add_text(std::string_view text) {
        const Px per_line = std::max<Px>(1, width_ / config_.char_width);
        std::size_t i = 0;
        while (i < text.size()) {
            if (is_space(text[i])) {
                pending_space_ = true;
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < text.size() && !is_space(text[j])) ++j;
            auto word = text.substr(i, j - i);
            auto count = static_cast<Px>(codepoints(word));
            // Words wider than the line are broken into line-sized chunks.
            while (count > per_line) {
                std::size_t cut = 0;
                for (Px n = 0; n < per_line;) {
                    ++cut;
                    while (cut < word.size() &&
                           (static_cast<unsigned char>(word[cut]) & 0xC0) == 0x80) {
                        ++cut;
                    }
                    ++n;
                }
                place(per_line * config_.char_width, config_.line_height);
                word.remove_prefix(cut);
                count -= per_line;
            }
            if (count > 0) place(count * config_.char_width, config_.line_height);
            i = j;
        }
    }

    Rect line_break() {
        Rect r;
        if (line_open_) {
            r = {cursor_, lines_.back().top, 0, config_.line_height};
            lines_.back().height = std::max(lines_.back().height, config_.line_height);
            end_line();
        } else {
            open_line();
            lines_.back().height = config_.line_height;
            r = {left_, lines_.back().top, 0, config_.line_height};
            end_line();
        }
        pending_space_ = false;
        return r;
    }

    void end_line() {
        if (!line_open_) return;
        y_ = lines_.back().top + lines_.back().height;
        line_open_ = false;
        line_atoms_ = 0;
        pending_space_ = false;
    }

    // Position where an empty atom would land now.
    Placement cursor() const {
        if (line_open_) return {cursor_, lines_.back().top};
        return {left_, y_};
    }

    void open_inline(NodeId id) {
        const auto at = cursor();
        inlines_.push_back({id, at.left, at.top});
        open_inlines_.push_back(inlines_.size() - 1);
    }

    void close_inline() { open_inlines_.pop_back(); }

    // Inline element rects are unions of the line boxes they touch; line
    // heights are only final once the flow is done.
    void finish(std::vector<std::optional<Rect>>& rects) {
        end_line();
        for (const auto& rec : inlines_) {
            if (!rec.any) {
                rects[rec.id] = Rect{rec.open_x, rec.open_y, 0, 0};
                continue;
            }
            const auto& first = lines_[rec.first_line];
            const auto& last = lines_[rec.last_line];
            rects[rec.id] = Rect{rec.min_x, first.top, rec.max_x - rec.min_x,
                                 last.top + last.height - first.top};
        }
    }

private:
    struct Line {
        Px top;
        Px height;
    };
    struct InlineRecord {
        NodeId id;
        Px open_x;
        Px open_y;
        bool any = false;
        std::size_t first_line = 0;
        std::size_t last_line = 0;
        Px min_x = 0;
        Px max_x = 0;
    };

    void open_line() {
        lines_.push_back({y_, 0});
        line_open_ = true;
        line_atoms_ = 0;
        cursor_ = left_;
        has_content_ = true;
    }

    Px left_;
    Px width_;
    Px y_;
    const LayoutConfig& config_;
    std::vector<Line> lines_;
    bool line_open_ = false;
    std::size_t line_atoms_ = 0;
    Px cursor_ = 0;
    bool pending_space_ = false;
    bool has_content_ = false;
    std::vector<InlineRecord> inlines_;
    std::vector<std::size_t> open_inlines_;
};

class Engine {
public:
    Engine(const Document& doc, const LayoutConfig& config)
        : doc_(doc), config_(config), rects_(doc.size()), styles_(doc.size()),
          hidden_(doc.size(), 0), block_level_(doc.size(), 0) {
        for (const auto& node : doc.nodes()) {
            if (!node.is_element()) continue;
            if (const auto style = node.attribute("style")) styles_[node.id] = parse_style(*style);
            hidden_[node.id] = one_of(node.tag, kHiddenTags) || styles_[node.id].display_none;
        }
        // Pre-order ids: children always have larger ids than their parent.
        for (auto i = doc.size(); i-- > 0;) {
            const auto& node = doc.nodes()[i];
            if (!node.is_element() || hidden_[i]) continue;
            bool block = is_block_tag(node.tag);
            for (const auto child : node.children) {
                if (doc.nodes()[child].is_element() && !hidden_[child] && block_level_[child]) {
                    block = true;  // inline wrapping a block is laid out as a block
                    break;
                }
            }
            block_level_[i] = block;
        }
        hidden_[doc.body_id()] = 0;
        block_level_[doc.body_id()] = 1;
        hidden_[0] = 0;
        block_level_[0] = 1;
    }

    std::vector<std::optional<Rect>> run() && {
        layout_box(0, 0, 0, config_.viewport_width);
        return std::move(rects_);
    }

private:
    std::optional<Length> spec_width(NodeId id) const {
        if (styles_[id].width) return styles_[id].width;
        if (const auto attr = doc_.node(id).attribute("width")) return parse_length(*attr);
        return std::nullopt;
    }

    std::optional<Px> spec_height(NodeId id) const {
        std::optional<Length> len = styles_[id].height;
        if (!len) {
            if (const auto attr = doc_.node(id).attribute("height")) len = parse_length(*attr);
        }
        if (!len || len->unit == Length::Unit::Percent) return std::nullopt;
        return len->value;
    }

    void hide_subtree(NodeId id, Px left, Px top) {
        const auto& node = doc_.node(id);
        if (!node.is_element()) return;
        rects_[id] = Rect{left, top, 0, 0};
        for (const auto child : node.children) hide_subtree(child, left, top);
    }

    Rect layout_box(NodeId id, Px left, Px top, Px avail) {
        const auto& node = doc_.node(id);
        if (node.tag == "tr") return layout_row(id, left, top, avail);
        Px width = avail;
        if (id != doc_.body_id() && id != 0) {
            if (const auto w = spec_width(id)) width = std::min(w->resolve(avail), avail);
        }
        const Px content = layout_flow(id, left, top, width);
        Px height = content;
        if (id != doc_.body_id() && id != 0) {
            if (const auto h = spec_height(id)) height = std::max(height, *h);
        }
        rects_[id] = Rect{left, top, width, height};
        return *rects_[id];
    }

    Rect layout_row(NodeId row, Px left, Px top, Px width) {
        std::vector<NodeId> cells;
        for (const auto child : doc_.node(row).children) {
            const auto& c = doc_.node(child);
            if (!c.is_element()) continue;
            if (hidden_[child] || (c.tag != "td" && c.tag != "th")) {
                hide_subtree(child, left, top);
                continue;
            }
            cells.push_back(child);
        }
        // Explicit widths first (clamped to what is left), then an equal
        // split of the remainder; the last free cell takes the leftover px.
        std::vector<std::optional<Px>> widths(cells.size());
        Px used = 0;
        std::size_t free_cells = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (const auto w = spec_width(cells[i])) {
                widths[i] = std::min(w->resolve(width), width - used);
                used += *widths[i];
            } else {
                ++free_cells;
            }
        }
        const Px remaining = width - used;
        const Px share = free_cells ? remaining / static_cast<Px>(free_cells) : 0;
        const Px extra = free_cells ? remaining % static_cast<Px>(free_cells) : 0;
        std::size_t seen_free = 0;
        for (auto& w : widths) {
            if (w) continue;
            ++seen_free;
            w = share + (seen_free == free_cells ? extra : 0);
        }

        Px row_height = spec_height(row).value_or(0);
        Px x = left;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const Px content = layout_flow(cells[i], x, top, *widths[i]);
            row_height = std::max({row_height, content, spec_height(cells[i]).value_or(0)});
            x += *widths[i];
        }
        x = left;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            rects_[cells[i]] = Rect{x, top, *widths[i], row_height};
            x += *widths[i];
        }
        rects_[row] = Rect{left, top, width, row_height};
        return *rects_[row];
    }

    Px layout_flow(NodeId container, Px left, Px top, Px width) {
        const auto& node = doc_.node(container);
        const bool tabular = node.tag == "table" || node.tag == "tbody" || node.tag == "thead" ||
                             node.tag == "tfoot" || node.tag == "tr";
        Flow flow(left, top, width, config_);
        for (const auto child : node.children) {
            const auto& c = doc_.node(child);
            if (c.is_text()) {
                if (!tabular && !is_raw_text_tag(node.tag)) flow.add_text(c.text);
                continue;
            }
            if (hidden_[child]) {
                hide_subtree(child, left, top);
            } else if (block_level_[child]) {
                flow.end_line();
                if (flow.has_content()) flow.set_y(flow.y() + config_.block_gap);
                const auto r = layout_box(child, left, flow.y(), width);
                flow.set_y(r.bottom());
                flow.mark_content();
            } else {
                layout_inline(child, flow, width);
            }
        }
        flow.finish(rects_);
        return flow.y() - top;
    }

    void layout_inline(NodeId id, Flow& flow, Px container_width) {
        const auto& node = doc_.node(id);
        if (node.tag == "br") {
            rects_[id] = flow.line_break();
            return;
        }
        const bool image = node.tag == "img";
        if (image || one_of(node.tag, kReplacedTags)) {
            const auto w = spec_width(id);
            const auto h = spec_height(id);
            const Px width = w ? w->resolve(container_width) : (image ? config_.default_image_width : 0);
            const Px height = h ? *h : (image ? config_.default_image_height : 0);
            if (width == 0 && height == 0) {
                const auto at = flow.cursor();
                rects_[id] = Rect{at.left, at.top, 0, 0};
            } else {
                const auto at = flow.place(width, height);
                rects_[id] = Rect{at.left, at.top, width, height};
            }
            for (const auto child : node.children) {
                hide_subtree(child, rects_[id]->left, rects_[id]->top);
            }
            return;
        }
        flow.open_inline(id);
        const auto origin = flow.cursor();
        for (const auto child : node.children) {
            const auto& c = doc_.node(child);
            if (c.is_text()) {
                if (!is_raw_text_tag(node.tag)) flow.add_text(c.text);
            } else if (hidden_[child]) {
                hide_subtree(child, origin.left, origin.top);
            } else {
                layout_inline(child, flow, container_width);
            }
        }
        flow.close_inline();
    }

    const Document& doc_;
    const LayoutConfig& config_;
    std::vector<std::optional<Rect>> rects_;
    std::vector<InlineStyle> styles_;
    std::vector<char> hidden_;
    std::vector<char> block_level_;
};

}  // namespace

Px rect_area(const Rect& r) noexcept { return r.width * r.height; }

void LayoutConfig::validate() const {
    const auto fail = [](const char* what) {
        throw Error(ErrorKind::ConfigError, "layout", std::string(what) + " must be positive");
    };
    if (viewport_width <= 0) fail("viewport_width");
    if (line_height <= 0) fail("line_height");
    if (char_width <= 0) fail("char_width");
    if (default_image_width <= 0) fail("default_image_width");
    if (default_image_height <= 0) fail("default_image_height");
    if (block_gap < 0) {
        throw Error(ErrorKind::ConfigError, "layout", "block_gap must be non-negative");
    }
}

Px Length::resolve(Px reference) const noexcept {
    if (unit == Unit::Px) return value;
    return reference * value / 100000;
}

std::optional<Length> parse_length(std::string_view text) {
    auto s = trim(text);
    Length out;
    if (s.ends_with('%')) {
        out.unit = Length::Unit::Percent;
        s.remove_suffix(1);
    } else if (s.size() >= 2 && lower(s.substr(s.size() - 2)) == "px") {
        s.remove_suffix(2);
    }
    s = trim(s);
    if (s.empty()) return std::nullopt;
    Px whole = 0;
    Px frac = 0;
    Px frac_scale = 1;
    bool digits = false;
    bool dot = false;
    for (char c : s) {
        if (c == '.' && !dot) {
            dot = true;
            continue;
        }
        if (c < '0' || c > '9') return std::nullopt;
        digits = true;
        if (!dot) {
            whole = std::min<Px>(whole * 10 + (c - '0'), Px{1} << 40);
        } else if (frac_scale < 1000) {
            frac = frac * 10 + (c - '0');
            frac_scale *= 10;
        }
    }
    if (!digits) return std::nullopt;
    if (out.unit == Length::Unit::Px) {
        out.value = whole;
    } else {
        out.value = whole * 1000 + frac * (1000 / frac_scale);
    }
    return out;
}

bool is_block_tag(std::string_view tag) { return one_of(tag, kBlockTags); }

const Rect& LayoutTree::rect_of(NodeId id) const {
    const auto& node = doc_->node(id);
    if (!node.is_element()) {
        throw Error(ErrorKind::NotAnElement, "layout",
                    "node " + std::to_string(id) + " is a text node");
    }
    return *rects_[id];
}

std::string LayoutTree::rect_table() const {
    std::ostringstream out;
    for (const auto& node : doc_->nodes()) {
        if (!node.is_element()) continue;
        const auto& r = *rects_[node.id];
        out << node.id << ' ' << node.tag << ' ' << r.left << ' ' << r.top << ' ' << r.width
            << ' ' << r.height << '\n';
    }
    return out.str();
}

LayoutTree layout_document(std::shared_ptr<const Document> doc, const LayoutConfig& config) {
    config.validate();
    auto rects = Engine(*doc, config).run();
    for (const auto& node : doc->nodes()) {
        if (node.is_element() && !rects[node.id]) rects[node.id] = Rect{};
    }
    return LayoutTree(std::move(doc), config, std::move(rects));
}

LayoutTree layout_document(const Document& doc, const LayoutConfig& config) {
    return layout_document(std::make_shared<const Document>(doc), config);
}

}  // namespace recordminer
