#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recordminer/dom.hpp"
#include "recordminer/layout.hpp"
#include "recordminer/records.hpp"

namespace recordminer {

struct TruthRecord {
    std::vector<std::size_t> selector;  // element-child indices from body
    RecordKind kind = RecordKind::Flat;
    std::optional<std::size_t> field_count;
};

struct GroundTruth {
    std::string page_id;
    std::vector<TruthRecord> records;
};

/// Parses an annotation document (`"schema": 1`). Throws SchemaError or
/// DuplicateSelector; `source` prefixes diagnostics.
GroundTruth parse_ground_truth(std::string_view json, std::string_view source = "<memory>");
GroundTruth load_ground_truth(const std::filesystem::path& path);

/// Follows a selector from body. Throws SelectorResolutionError.
NodeId resolve_selector(const Document& doc, std::span<const std::size_t> selector);

struct MatchCounts {
    std::size_t correct = 0;    // Ec
    std::size_t extracted = 0;  // Et
    std::size_t truth = 0;      // Nt
    std::size_t kind_agreements = 0;  // matched pairs whose flat/nested label agrees

    std::size_t false_positives() const noexcept { return extracted - correct; }
    std::size_t misses() const noexcept { return truth - correct; }
    MatchCounts& operator+=(const MatchCounts& other) noexcept;
    friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

/// Non-negative fraction kept in lowest terms.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Fraction of(std::int64_t num, std::int64_t den);
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct Metrics {
    Fraction recall;
    Fraction precision;
};

/// recall = Ec/Nt, precision = Ec/Et; an empty denominator (with Ec = 0)
/// yields 1.
Metrics compute_metrics(const MatchCounts& counts);

/// Intersection-over-union of two rects is at least num/den.
bool iou_at_least(const Rect& a, const Rect& b, std::int64_t num = 8, std::int64_t den = 10);

/// One-to-one matching: identical nodes first, then rect IoU >= 0.8, both
/// greedy in document order.
MatchCounts match_records(std::span<const DataRecord> extracted, const GroundTruth& truth,
                          const LayoutTree& tree);

struct PipelineOptions {
    LayoutConfig layout;
    FieldTagSet fields;
    Ratio nested_ratio;
};

struct PageEvaluation {
    std::string page_id;
    MatchCounts counts;
    Metrics metrics;
    std::optional<std::string> error;
};

struct CorpusEvaluation {
    std::vector<PageEvaluation> pages;  // sorted by page id
    MatchCounts pooled;
    Metrics metrics;  // micro-averaged over pooled counts
};

/// Scores one page. Pipeline or selector failures are reported in `error`
/// and the page scores (0, 0, Nt).
PageEvaluation evaluate_page(std::string page_id, std::string_view html, const GroundTruth& truth,
                             const PipelineOptions& options);

/// Evaluates `<dir>/<id>.html` against `<dir>/<id>.truth.json` for every id
/// present. Throws EmptyCorpus when there is nothing to score.
CorpusEvaluation evaluate_corpus(const std::filesystem::path& dir,
                                 const PipelineOptions& options = {}, unsigned jobs = 1);

}  // namespace recordminer
