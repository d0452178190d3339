#include "recordminer/dom.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "recordminer/error.hpp"

namespace recordminer {

namespace {

constexpr std::size_t kMaxDepth = 512;

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

bool is_ascii_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char to_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), to_lower);
    return out;
}

template <std::size_t N>
bool one_of(std::string_view tag, const std::array<std::string_view, N>& set) {
    return std::find(set.begin(), set.end(), tag) != set.end();
}

constexpr std::array<std::string_view, 17> kVoidTags = {
    "area", "base", "basefont", "br", "col", "embed", "frame", "hr", "img",
    "input", "keygen", "link", "meta", "param", "source", "track", "wbr"};

constexpr std::array<std::string_view, 6> kHeadTags = {
    "title", "meta", "link", "script", "style", "base"};

void append_utf8(std::string& out, char32_t cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Invalid sequences become U+FFFD, one replacement per offending byte.
std::string decode_utf8_lossy(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        const auto b0 = static_cast<unsigned char>(in[i]);
        if (b0 < 0x80) {
            out += static_cast<char>(b0);
            ++i;
            continue;
        }
        std::size_t len = 0;
        char32_t cp = 0;
        char32_t min = 0;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2, cp = b0 & 0x1F, min = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3, cp = b0 & 0x0F, min = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4, cp = b0 & 0x07, min = 0x10000;
        }
        bool ok = len != 0 && i + len <= in.size();
        for (std::size_t k = 1; ok && k < len; ++k) {
            const auto b = static_cast<unsigned char>(in[i + k]);
            if ((b & 0xC0) != 0x80) ok = false;
            cp = (cp << 6) | (b & 0x3F);
        }
        if (ok && (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
        if (ok) {
            out.append(in.substr(i, len));
            i += len;
        } else {
            append_utf8(out, 0xFFFD);
            ++i;
        }
    }
    return out;
}

std::string decode_latin1(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (char c : in) append_utf8(out, static_cast<unsigned char>(c));
    return out;
}

// Expands &amp; &lt; &gt; &quot; and numeric references; everything else is
// kept verbatim.
std::string decode_entities(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        if (in[i] != '&') {
            out += in[i++];
            continue;
        }
        const auto semi = in.find(';', i);
        if (semi == std::string_view::npos || semi - i > 12) {
            out += in[i++];
            continue;
        }
        const auto name = in.substr(i + 1, semi - i - 1);
        bool done = true;
        if (name == "amp") {
            out += '&';
        } else if (name == "lt") {
            out += '<';
        } else if (name == "gt") {
            out += '>';
        } else if (name == "quot") {
            out += '"';
        } else if (name.size() >= 2 && name[0] == '#') {
            const bool hex = name[1] == 'x' || name[1] == 'X';
            const auto digits = name.substr(hex ? 2 : 1);
            char32_t cp = 0;
            bool valid = !digits.empty();
            for (char c : digits) {
                int v = -1;
                if (c >= '0' && c <= '9') v = c - '0';
                else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                if (v < 0) {
                    valid = false;
                    break;
                }
                cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
                if (cp > 0x10FFFF) cp = 0x110000;  // saturate, replaced below
            }
            if (valid) append_utf8(out, cp);
            done = valid;
        } else {
            done = false;
        }
        if (done) {
            i = semi + 1;
        } else {
            out += in[i++];
        }
    }
    return out;
}

struct CloseRule {
    std::string_view tag;
    std::vector<std::string_view> closes;
    std::vector<std::string_view> boundary;
};

// Opening `tag` closes the nearest open element in `closes`, provided no
// `boundary` element sits between it and the insertion point.
const std::vector<CloseRule>& close_rules() {
    static const std::vector<CloseRule> rules = {
        {"li", {"li"}, {"ul", "ol", "menu", "table", "td", "th"}},
        {"dd", {"dd", "dt"}, {"dl", "table", "td", "th"}},
        {"dt", {"dd", "dt"}, {"dl", "table", "td", "th"}},
        {"td", {"td", "th"}, {"table", "tr"}},
        {"th", {"td", "th"}, {"table", "tr"}},
        {"tr", {"tr"}, {"table"}},
        {"option", {"option"}, {"select", "datalist"}},
        {"p",
         {"p"},
         {"div", "table", "td", "th", "li", "ul", "ol", "dl", "dd", "dt", "form", "blockquote",
          "section", "article", "aside", "nav", "header", "footer", "main", "center"}},
    };
    return rules;
}

}  // namespace

class TreeBuilder {
public:
    explicit TreeBuilder(std::size_t source_length) {
        doc_.source_length_ = source_length;
        DomNode root;
        root.kind = NodeKind::Element;
        root.tag = "html";
        root.id = 0;
        doc_.nodes_.push_back(std::move(root));
        stack_.push_back(0);
    }

    void start_tag(std::string tag, std::vector<std::pair<std::string, std::string>> attrs,
                   bool self_closing) {
        if (tag == "html") {
            auto& root = doc_.nodes_[0];
            for (auto& [name, value] : attrs) {
                if (!root.attribute(name)) root.attributes.emplace_back(name, value);
            }
            return;
        }
        if (mode_ != Mode::InBody) {
            if (tag == "head") {
                if (mode_ == Mode::BeforeBody) open_head();
                return;
            }
            if (tag == "body") {
                leave_head();
                open_body(std::move(attrs));
                return;
            }
            if (one_of(tag, kHeadTags)) {
                if (mode_ == Mode::BeforeBody) open_head();
                insert_element(std::move(tag), std::move(attrs), self_closing);
                return;
            }
            leave_head();
            open_body({});
        }
        if (tag == "body") tag = "div";
        apply_implied_closes(tag);
        insert_element(std::move(tag), std::move(attrs), self_closing);
    }

    void end_tag(const std::string& tag) {
        if (tag == "html" || tag == "body") return;
        if (mode_ == Mode::InHead && tag == "head") {
            leave_head();
            return;
        }
        // Never pop the root, head or body through a stray close tag.
        const std::size_t floor = mode_ == Mode::InBody ? body_depth_ + 1 : (head_ ? 2 : 1);
        for (std::size_t i = stack_.size(); i > floor; --i) {
            if (doc_.nodes_[stack_[i - 1]].tag == tag) {
                stack_.resize(i - 1);
                return;
            }
        }
    }

    void text(std::string content) {
        if (content.empty()) return;
        if (mode_ != Mode::InBody) {
            const bool blank = std::all_of(content.begin(), content.end(), is_ascii_space);
            const auto& top = doc_.nodes_[stack_.back()];
            if (mode_ == Mode::InHead && top.tag != "head" && top.tag != "html") {
                append_text(std::move(content));
                return;
            }
            if (blank) return;
            leave_head();
            open_body({});
        }
        append_text(std::move(content));
    }

    // Content of a raw-text element goes straight to the current node.
    void raw_text(std::string content) {
        if (!content.empty()) append_text(std::move(content));
    }

    bool current_is(std::string_view tag) const {
        return doc_.nodes_[stack_.back()].tag == tag;
    }

    Document finish() && {
        if (mode_ != Mode::InBody) {
            leave_head();
            open_body({});
        }
        return std::move(doc_);
    }

private:
    enum class Mode { BeforeBody, InHead, InBody };

    NodeId new_node(DomNode node) {
        const auto id = static_cast<NodeId>(doc_.nodes_.size());
        node.id = id;
        node.parent = stack_.back();
        doc_.nodes_[stack_.back()].children.push_back(id);
        doc_.nodes_.push_back(std::move(node));
        return id;
    }

    void insert_element(std::string tag, std::vector<std::pair<std::string, std::string>> attrs,
                        bool self_closing) {
        const bool is_void = one_of(tag, kVoidTags);
        if (stack_.size() >= kMaxDepth) stack_.pop_back();
        DomNode node;
        node.kind = NodeKind::Element;
        node.tag = std::move(tag);
        node.attributes = std::move(attrs);
        const auto id = new_node(std::move(node));
        if (!is_void && !self_closing) stack_.push_back(id);
    }

    void append_text(std::string content) {
        auto& parent = doc_.nodes_[stack_.back()];
        if (!parent.children.empty()) {
            auto& last = doc_.nodes_[parent.children.back()];
            if (last.is_text()) {
                last.text += content;
                return;
            }
        }
        DomNode node;
        node.kind = NodeKind::Text;
        node.text = std::move(content);
        new_node(std::move(node));
    }

    // Head is always the last child of root before body exists, so it can be
    // reopened without breaking pre-order ids.
    void open_head() {
        if (head_) {
            stack_.resize(1);
            stack_.push_back(*head_);
            mode_ = Mode::InHead;
            return;
        }
        DomNode node;
        node.tag = "head";
        head_ = new_node(std::move(node));
        stack_.push_back(*head_);
        mode_ = Mode::InHead;
    }

    void leave_head() {
        if (mode_ == Mode::InHead) {
            stack_.resize(1);
            mode_ = Mode::BeforeBody;
        }
    }

    void open_body(std::vector<std::pair<std::string, std::string>> attrs) {
        stack_.resize(1);
        DomNode node;
        node.tag = "body";
        node.attributes = std::move(attrs);
        const auto id = new_node(std::move(node));
        doc_.body_ = id;
        stack_.push_back(id);
        body_depth_ = stack_.size() - 1;
        mode_ = Mode::InBody;
    }

    void apply_implied_closes(std::string_view tag) {
        for (const auto& rule : close_rules()) {
            if (rule.tag != tag) continue;
            for (std::size_t i = stack_.size(); i > body_depth_ + 1; --i) {
                const auto& open = doc_.nodes_[stack_[i - 1]].tag;
                if (std::find(rule.closes.begin(), rule.closes.end(), open) != rule.closes.end()) {
                    stack_.resize(i - 1);
                    return;
                }
                if (std::find(rule.boundary.begin(), rule.boundary.end(), open) !=
                    rule.boundary.end()) {
                    return;
                }
            }
            return;
        }
    }

    Document doc_;
    std::vector<NodeId> stack_;
    Mode mode_ = Mode::BeforeBody;
    std::optional<NodeId> head_;
    std::size_t body_depth_ = 0;
};

namespace {

class Tokenizer {
public:
    Tokenizer(std::string_view src, TreeBuilder& builder) : src_(src), builder_(builder) {}

    void run() {
        while (pos_ < src_.size()) {
            const auto lt = src_.find('<', pos_);
            if (lt == std::string_view::npos) {
                emit_text(src_.substr(pos_));
                pos_ = src_.size();
                break;
            }
            if (lt > pos_) emit_text(src_.substr(pos_, lt - pos_));
            pos_ = lt;
            markup();
        }
    }

private:
    void emit_text(std::string_view raw) {
        pending_text_ += decode_entities(raw);
    }

    void flush_text() {
        if (!pending_text_.empty()) {
            builder_.text(std::move(pending_text_));
            pending_text_.clear();
        }
    }

    bool starts_with_at(std::size_t at, std::string_view s) const {
        return src_.substr(at, s.size()) == s;
    }

    void skip_past(char c) {
        const auto end = src_.find(c, pos_);
        pos_ = end == std::string_view::npos ? src_.size() : end + 1;
    }

    // pos_ is on '<'.
    void markup() {
        const std::size_t next = pos_ + 1;
        if (starts_with_at(pos_, "<!--")) {
            const auto end = src_.find("-->", pos_ + 4);
            pos_ = end == std::string_view::npos ? src_.size() : end + 3;
            return;
        }
        if (next < src_.size() && (src_[next] == '!' || src_[next] == '?')) {
            skip_past('>');
            return;
        }
        if (next < src_.size() && src_[next] == '/') {
            if (next + 1 < src_.size() && is_ascii_alpha(src_[next + 1])) {
                std::size_t p = next + 1;
                while (p < src_.size() && !is_ascii_space(src_[p]) && src_[p] != '/' &&
                       src_[p] != '>') {
                    ++p;
                }
                const auto name = lowercase(src_.substr(next + 1, p - next - 1));
                pos_ = p;
                skip_past('>');
                flush_text();
                builder_.end_tag(name);
            } else {
                skip_past('>');
            }
            return;
        }
        if (next < src_.size() && is_ascii_alpha(src_[next])) {
            start_tag();
            return;
        }
        emit_text("<");
        ++pos_;
    }

    void start_tag() {
        std::size_t p = pos_ + 1;
        while (p < src_.size() && !is_ascii_space(src_[p]) && src_[p] != '/' && src_[p] != '>') {
            ++p;
        }
        auto name = lowercase(src_.substr(pos_ + 1, p - pos_ - 1));
        std::vector<std::pair<std::string, std::string>> attrs;
        bool self_closing = false;
        bool closed = false;
        while (p < src_.size()) {
            while (p < src_.size() && is_ascii_space(src_[p])) ++p;
            if (p >= src_.size()) break;
            if (src_[p] == '>') {
                ++p;
                closed = true;
                break;
            }
            if (src_[p] == '/') {
                if (p + 1 < src_.size() && src_[p + 1] == '>') {
                    self_closing = true;
                    p += 2;
                    closed = true;
                    break;
                }
                ++p;
                continue;
            }
            std::size_t a = p;
            while (p < src_.size() && !is_ascii_space(src_[p]) && src_[p] != '/' &&
                   src_[p] != '>' && (src_[p] != '=' || p == a)) {
                ++p;
            }
            auto attr_name = lowercase(src_.substr(a, p - a));
            while (p < src_.size() && is_ascii_space(src_[p])) ++p;
            std::string value;
            if (p < src_.size() && src_[p] == '=') {
                ++p;
                while (p < src_.size() && is_ascii_space(src_[p])) ++p;
                if (p < src_.size() && (src_[p] == '"' || src_[p] == '\'')) {
                    const char quote = src_[p];
                    const auto end = src_.find(quote, p + 1);
                    const auto stop = end == std::string_view::npos ? src_.size() : end;
                    value = decode_entities(src_.substr(p + 1, stop - p - 1));
                    p = end == std::string_view::npos ? src_.size() : end + 1;
                } else {
                    const std::size_t v = p;
                    while (p < src_.size() && !is_ascii_space(src_[p]) && src_[p] != '>') ++p;
                    value = decode_entities(src_.substr(v, p - v));
                }
            }
            const bool seen = std::any_of(attrs.begin(), attrs.end(),
                                          [&](const auto& kv) { return kv.first == attr_name; });
            if (!seen) attrs.emplace_back(std::move(attr_name), std::move(value));
        }
        pos_ = p;
        if (!closed) return;  // tag cut off by end of input

        flush_text();
        if (name == "iframe" || name == "noembed" || name == "noframes") {
            // Opaque: content discarded, element kept empty.
            builder_.start_tag(name, std::move(attrs), true);
            if (!self_closing) skip_raw(name);
            return;
        }
        const bool raw = is_raw_text_tag(name) || name == "title" || name == "textarea";
        builder_.start_tag(name, std::move(attrs), self_closing);
        if (raw && !self_closing && builder_.current_is(name)) {
            builder_.raw_text(skip_raw(name));
            builder_.end_tag(name);
        }
    }

    // Consumes up to and including `</tag ...>`, returning the content.
    std::string skip_raw(const std::string& tag) {
        std::size_t p = pos_;
        while (true) {
            const auto lt = src_.find("</", p);
            if (lt == std::string_view::npos) {
                std::string content(src_.substr(pos_));
                pos_ = src_.size();
                return content;
            }
            const auto after = lt + 2 + tag.size();
            if (lowercase(src_.substr(lt + 2, tag.size())) == tag &&
                (after >= src_.size() || is_ascii_space(src_[after]) || src_[after] == '/' ||
                 src_[after] == '>')) {
                std::string content(src_.substr(pos_, lt - pos_));
                pos_ = after;
                skip_past('>');
                return content;
            }
            p = lt + 2;
        }
    }

public:
    void finish() { flush_text(); }

private:
    std::string_view src_;
    TreeBuilder& builder_;
    std::size_t pos_ = 0;
    std::string pending_text_;
};

void serialize_node(const Document& doc, const DomNode& node, std::string& out, bool raw_parent) {
    if (node.is_text()) {
        if (raw_parent) {
            out += node.text;
            return;
        }
        for (char c : node.text) {
            switch (c) {
                case '&': out += "&amp;"; break;
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                default: out += c;
            }
        }
        return;
    }
    out += '<';
    out += node.tag;
    for (const auto& [name, value] : node.attributes) {
        out += ' ';
        out += name;
        out += "=\"";
        for (char c : value) {
            switch (c) {
                case '&': out += "&amp;"; break;
                case '"': out += "&quot;"; break;
                default: out += c;
            }
        }
        out += '"';
    }
    out += '>';
    if (one_of(node.tag, kVoidTags)) return;
    const bool raw = is_raw_text_tag(node.tag) || node.tag == "title" || node.tag == "textarea";
    for (const auto child : node.children) serialize_node(doc, doc.node(child), out, raw);
    out += "</";
    out += node.tag;
    out += '>';
}

}  // namespace

std::optional<std::string_view> DomNode::attribute(std::string_view name) const {
    for (const auto& [key, value] : attributes) {
        if (key == name) return std::string_view(value);
    }
    return std::nullopt;
}

const DomNode& Document::node(NodeId id) const {
    if (id >= nodes_.size()) {
        throw Error(ErrorKind::UnknownNode, "dom", "no node with id " + std::to_string(id));
    }
    return nodes_[id];
}

std::vector<NodeId> Document::element_children(NodeId id) const {
    std::vector<NodeId> out;
    for (const auto child : node(id).children) {
        if (nodes_[child].is_element()) out.push_back(child);
    }
    return out;
}

std::optional<std::vector<std::size_t>> Document::selector_of(NodeId id) const {
    std::vector<std::size_t> path;
    NodeId current = node(id).id;
    while (current != body_) {
        const auto& n = nodes_[current];
        if (!n.parent) return std::nullopt;
        std::size_t index = 0;
        for (const auto sibling : nodes_[*n.parent].children) {
            if (sibling == current) break;
            if (nodes_[sibling].is_element()) ++index;
        }
        path.push_back(index);
        current = *n.parent;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

bool is_raw_text_tag(std::string_view tag) {
    return tag == "script" || tag == "style";
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool space = false;
    for (char c : text) {
        if (is_ascii_space(c)) {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

Encoding encoding_from_name(std::string_view name) {
    const auto n = lowercase(name);
    if (n == "utf-8" || n == "utf8") return Encoding::Utf8;
    if (n == "latin-1" || n == "latin1" || n == "iso-8859-1") return Encoding::Latin1;
    throw Error(ErrorKind::EncodingError, "dom", "unsupported encoding '" + std::string(name) + "'");
}

Document parse_html(std::string_view input, Encoding encoding) {
    if (std::all_of(input.begin(), input.end(), is_ascii_space)) {
        throw Error(ErrorKind::EmptyInput, "dom", "input is empty");
    }
    const auto decoded =
        encoding == Encoding::Latin1 ? decode_latin1(input) : decode_utf8_lossy(input);
    TreeBuilder builder(input.size());
    Tokenizer tokenizer(decoded, builder);
    tokenizer.run();
    tokenizer.finish();
    return std::move(builder).finish();
}

const DomNode& find_body(const Document& doc) { return doc.body(); }

std::string serialize(const Document& doc) {
    std::string out;
    serialize_node(doc, doc.root(), out, false);
    return out;
}

}  // namespace recordminer
