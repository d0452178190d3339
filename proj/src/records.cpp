#include "recordminer/records.hpp"

#include <cctype>
#include <charconv>
#include <numeric>

#include "recordminer/error.hpp"

namespace recordminer {

namespace {

void gather_text(const Document& doc, NodeId id, std::string& out) {
    const auto& node = doc.node(id);
    if (node.is_text()) {
        out += node.text;
        return;
    }
    if (is_raw_text_tag(node.tag)) return;
    const bool breaks = is_block_tag(node.tag) || node.tag == "br";
    if (breaks) out += ' ';
    for (const auto child : node.children) gather_text(doc, child, out);
    if (breaks) out += ' ';
}

template <typename Visit>
void walk_elements(const Document& doc, NodeId root, Visit&& visit) {
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        const auto id = stack.back();
        stack.pop_back();
        const auto& node = doc.node(id);
        if (!node.is_element()) continue;
        visit(node);
        for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
            stack.push_back(*it);
        }
    }
}

}  // namespace

std::string_view to_string(RecordKind kind) {
    switch (kind) {
        case RecordKind::Flat: return "flat";
        case RecordKind::Nested: return "nested";
        case RecordKind::Undetermined: return "undetermined";
    }
    return "undetermined";
}

FieldTagSet::FieldTagSet() : tags_{"a", "td", "tr"} {}

FieldTagSet::FieldTagSet(std::set<std::string> tags) : tags_(std::move(tags)) {
    if (tags_.empty()) throw Error(ErrorKind::ConfigError, "records", "field tag set is empty");
}

FieldTagSet FieldTagSet::parse(std::string_view list) {
    std::set<std::string> tags;
    while (!list.empty()) {
        const auto comma = list.find(',');
        auto item = list.substr(0, comma);
        list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
        std::string tag;
        for (char c : item) {
            if (c == ' ' || c == '\t') continue;
            tag += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        if (!tag.empty()) tags.insert(std::move(tag));
    }
    return FieldTagSet(std::move(tags));
}

std::string FieldTagSet::to_string() const {
    std::string out;
    for (const auto& tag : tags_) {
        if (!out.empty()) out += ',';
        out += tag;
    }
    return out;
}

Ratio Ratio::parse(std::string_view text) {
    const auto fail = [&] {
        return Error(ErrorKind::ConfigError, "records",
                     "invalid nested ratio '" + std::string(text) + "'");
    };
    const auto parse_int = [&](std::string_view s) {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v < 0) throw fail();
        return v;
    };
    Ratio r;
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        r.num = parse_int(text.substr(0, slash));
        r.den = parse_int(text.substr(slash + 1));
    } else if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        const auto whole = text.substr(0, dot);
        const auto frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 9) throw fail();
        r.den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) r.den *= 10;
        r.num = (whole.empty() ? 0 : parse_int(whole)) * r.den + parse_int(frac);
    } else {
        r.num = parse_int(text);
        r.den = 1;
    }
    if (r.den == 0 || r.num <= r.den) throw fail();
    const auto g = std::gcd(r.num, r.den);
    r.num /= g;
    r.den /= g;
    return r;
}

std::string Ratio::to_string() const {
    // Shortest exact decimal, falling back to num/den.
    std::int64_t pow10 = 1;
    for (std::size_t places = 0; places <= 6; ++places, pow10 *= 10) {
        if ((num * pow10) % den != 0) continue;
        const auto scaled = num * pow10 / den;
        if (places == 0) return std::to_string(scaled);
        auto frac = std::to_string(scaled % pow10);
        frac.insert(0, places - frac.size(), '0');
        return std::to_string(scaled / pow10) + "." + frac;
    }
    return std::to_string(num) + "/" + std::to_string(den);
}

std::vector<DataRecord> extract_data_records(const LayoutTree& tree, const DataRegion& region) {
    if (region.kept_children.empty()) {
        throw Error(ErrorKind::NoChildren, "records", "data region has no children");
    }
    Px total = 0;
    for (const auto child : region.kept_children) total += tree.rect_of(child).height;
    const Px average = total / static_cast<Px>(region.kept_children.size());
    std::vector<DataRecord> records;
    for (const auto child : region.kept_children) {
        const auto& rect = tree.rect_of(child);
        if (rect.height >= average) {
            DataRecord record;
            record.node = child;
            record.rect = rect;
            records.push_back(std::move(record));
        }
    }
    return records;
}

std::size_t count_fields(const Document& doc, NodeId record_node, const FieldTagSet& fields) {
    std::size_t count = 0;
    walk_elements(doc, record_node, [&](const DomNode& node) {
        if (fields.contains(node.tag)) ++count;
    });
    return count;
}

std::vector<DataRecord> classify_records(std::vector<DataRecord> records, const Ratio& nested_ratio) {
    for (auto& r : records) r.kind = RecordKind::Undetermined;
    if (records.size() < 2) return records;

    const auto dominates = [&](std::size_t larger, std::size_t smaller) {
        const auto big = static_cast<std::int64_t>(records[larger].field_count);
        const auto small = static_cast<std::int64_t>(records[smaller].field_count);
        return big > small && big * nested_ratio.den >= nested_ratio.num * small;
    };
    const auto settle = [&](std::size_t i, RecordKind kind) {
        if (records[i].kind == RecordKind::Undetermined) records[i].kind = kind;
    };

    std::vector<std::size_t> waiting{0};
    for (std::size_t a = 0; a + 1 < records.size(); ++a) {
        const auto b = a + 1;
        if (dominates(b, a)) {
            for (const auto i : waiting) settle(i, RecordKind::Flat);
            waiting.clear();
            settle(b, RecordKind::Nested);
        } else if (dominates(a, b)) {
            for (const auto i : waiting) settle(i, RecordKind::Nested);
            waiting.clear();
            settle(b, RecordKind::Flat);
        } else if (records[a].kind != RecordKind::Undetermined) {
            settle(b, records[a].kind);
        } else {
            waiting.push_back(b);
        }
    }
    for (const auto i : waiting) settle(i, RecordKind::Flat);
    return records;
}

std::vector<DataItem> extract_data_items(const Document& doc, const DataRecord& record,
                                         const FieldTagSet& fields) {
    std::vector<DataItem> items;
    walk_elements(doc, record.node, [&](const DomNode& node) {
        if (!fields.contains(node.tag)) return;
        std::string raw;
        for (const auto child : node.children) gather_text(doc, child, raw);
        DataItem item;
        item.source_node = node.id;
        item.tag = node.tag;
        item.text = collapse_whitespace(raw);
        item.empty = item.text.empty();
        items.push_back(std::move(item));
    });
    return items;
}

ExtractionResult extract_all(const LayoutTree& tree, const FieldTagSet& fields,
                             const Ratio& nested_ratio) {
    auto region = mine_region(tree);
    auto records = extract_data_records(tree, region);
    const auto& doc = tree.document();
    for (auto& record : records) record.field_count = count_fields(doc, record.node, fields);
    records = classify_records(std::move(records), nested_ratio);
    for (auto& record : records) record.items = extract_data_items(doc, record, fields);
    return ExtractionResult{tree, std::move(region), std::move(records)};
}

ExtractionResult extract_all(const Document& doc, const LayoutConfig& config,
                             const FieldTagSet& fields, const Ratio& nested_ratio) {
    return extract_all(layout_document(doc, config), fields, nested_ratio);
}

}  // namespace recordminer
