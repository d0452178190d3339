#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recordminer/error.hpp"
#include "recordminer/eval.hpp"
#include "recordminer/records.hpp"

namespace recordminer {

enum class OutputFormat { Json, Ndjson };

struct ReportItem {
    NodeId node = 0;
    std::string tag;
    std::string text;
    bool empty = false;
    friend bool operator==(const ReportItem&, const ReportItem&) = default;
};

struct ReportRecord {
    NodeId node = 0;
    std::string tag;
    std::vector<std::size_t> selector;
    RecordKind kind = RecordKind::Flat;  // a lone record is reported flat
    bool single_record = false;
    std::size_t field_count = 0;
    Rect rect;
    std::vector<ReportItem> items;
    friend bool operator==(const ReportRecord&, const ReportRecord&) = default;
};

/// What `extract` prints, versioned as schema 1.
struct ExtractionReport {
    std::string source;
    NodeId container = 0;
    std::string container_tag;
    std::vector<std::size_t> container_selector;
    Rect region_rect;
    Px avg_child_height = 0;
    std::vector<NodeId> kept_children;
    std::vector<ReportRecord> records;
    std::optional<double> timing_ms;
    friend bool operator==(const ExtractionReport&, const ExtractionReport&) = default;
};

ExtractionReport make_report(const ExtractionResult& result, std::string source,
                             std::optional<double> timing_ms = std::nullopt);

std::string render_report(const ExtractionReport& report, OutputFormat format);

/// Inverse of render_report for the JSON format. Throws SchemaError.
ExtractionReport parse_report(std::string_view json);

/// `{"schema":1,"error":{"kind":..,"stage":..,"message":..}}` plus newline.
std::string render_error(const Error& error);
std::string render_error(std::string_view kind, std::string_view stage, std::string_view message);

/// Outline of every visible element under body, the region outlined in red
/// and records shaded. `region`/`records` may be empty.
std::string render_overlay_svg(const LayoutTree& tree, const DataRegion* region,
                               std::span<const DataRecord> records);

/// Per-page rows (correct, wrong as false-positives/misses, recall,
/// precision) followed by pooled totals.
std::string render_eval_table(const CorpusEvaluation& evaluation);
std::string render_eval_json(const CorpusEvaluation& evaluation);

}  // namespace recordminer
