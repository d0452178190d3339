#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "recordminer/dom.hpp"
#include "recordminer/layout.hpp"
#include "recordminer/region.hpp"

namespace recordminer {

enum class RecordKind { Flat, Nested, Undetermined };

std::string_view to_string(RecordKind kind);

struct DataItem {
    NodeId source_node = 0;
    std::string tag;
    std::string text;  // whitespace-collapsed
    bool empty = false;
};

struct DataRecord {
    NodeId node = 0;
    Rect rect;
    std::size_t field_count = 0;
    RecordKind kind = RecordKind::Undetermined;
    std::vector<DataItem> items;
};

/// Tags whose occurrences count as data fields.
class FieldTagSet {
public:
    FieldTagSet();  // {td, tr, a}
    explicit FieldTagSet(std::set<std::string> tags);  // throws ConfigError when empty

    /// Comma-separated list, e.g. "td,tr,a".
    static FieldTagSet parse(std::string_view list);

    bool contains(std::string_view tag) const { return tags_.contains(std::string(tag)); }
    const std::set<std::string>& tags() const noexcept { return tags_; }
    std::string to_string() const;

private:
    std::set<std::string> tags_;
};

/// Exact ratio num/den, used for the nested-record threshold.
struct Ratio {
    std::int64_t num = 14;
    std::int64_t den = 10;

    /// Decimal literal such as "1.4" or "3/2"; throws ConfigError.
    static Ratio parse(std::string_view text);
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    std::string to_string() const;
};

/// One record per kept region child at least as tall as the kept children's
/// average height. Throws NoChildren for an empty region.
std::vector<DataRecord> extract_data_records(const LayoutTree& tree, const DataRegion& region);

/// Field-tag elements in the subtree rooted at `record_node`, itself included.
std::size_t count_fields(const Document& doc, NodeId record_node, const FieldTagSet& fields);

/// Marks each record Flat or Nested by comparing field counts of neighbours.
///
/// Walking adjacent pairs (A, B): when B has at least `nested_ratio` times
/// A's fields, B is nested and A flat; when A has at least that many times
/// B's, A is nested and B flat. A pair within the ratio is undecided: if A
/// already has a kind, B takes it; otherwise both wait for the first later
/// record that settles the group. A kind, once set, is never overwritten, and
/// records still undecided at the end are flat. A lone record stays
/// Undetermined.
std::vector<DataRecord> classify_records(std::vector<DataRecord> records,
                                         const Ratio& nested_ratio = {});

std::vector<DataItem> extract_data_items(const Document& doc, const DataRecord& record,
                                         const FieldTagSet& fields);

struct ExtractionResult {
    LayoutTree layout;
    DataRegion region;
    std::vector<DataRecord> records;
};

ExtractionResult extract_all(const LayoutTree& tree, const FieldTagSet& fields = {},
                             const Ratio& nested_ratio = {});
ExtractionResult extract_all(const Document& doc, const LayoutConfig& config = {},
                             const FieldTagSet& fields = {}, const Ratio& nested_ratio = {});

}  // namespace recordminer
