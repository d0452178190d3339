#include "recordminer/eval.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include <json.hpp>

#include "recordminer/error.hpp"
#include "recordminer/io.hpp"

namespace recordminer {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(std::string_view source, const std::string& what) {
    throw Error(ErrorKind::SchemaError, "eval", std::string(source) + ": " + what);
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::optional<std::size_t> as_count(const json& value) {
    if (value.is_number_unsigned()) return value.get<std::size_t>();
    if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
        return static_cast<std::size_t>(value.get<std::int64_t>());
    }
    return std::nullopt;
}

}  // namespace

GroundTruth parse_ground_truth(std::string_view text, std::string_view source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        schema_error(source, "line " + std::to_string(line_of(text, e.byte > 0 ? e.byte - 1 : 0)) +
                                 ": malformed JSON");
    }
    if (!doc.is_object()) schema_error(source, "top level must be an object");
    if (!doc.contains("schema") || doc["schema"] != 1) {
        schema_error(source, "field 'schema': expected 1");
    }
    if (!doc.contains("page_id") || !doc["page_id"].is_string()) {
        schema_error(source, "field 'page_id': expected string");
    }
    if (!doc.contains("records") || !doc["records"].is_array()) {
        schema_error(source, "field 'records': expected array");
    }
    GroundTruth truth;
    truth.page_id = doc["page_id"].get<std::string>();
    std::set<std::vector<std::size_t>> seen;
    std::size_t index = 0;
    for (const auto& entry : doc["records"]) {
        const auto where = "records[" + std::to_string(index++) + "]";
        if (!entry.is_object()) schema_error(source, where + ": expected object");
        if (!entry.contains("selector") || !entry["selector"].is_array()) {
            schema_error(source, where + ".selector: expected array of non-negative integers");
        }
        TruthRecord record;
        for (const auto& step : entry["selector"]) {
            const auto v = as_count(step);
            if (!v) schema_error(source, where + ".selector: expected array of non-negative integers");
            record.selector.push_back(*v);
        }
        if (!entry.contains("kind") || !entry["kind"].is_string()) {
            schema_error(source, where + ".kind: expected \"flat\" or \"nested\"");
        }
        const auto kind = entry["kind"].get<std::string>();
        if (kind == "flat") {
            record.kind = RecordKind::Flat;
        } else if (kind == "nested") {
            record.kind = RecordKind::Nested;
        } else {
            schema_error(source, where + ".kind: expected \"flat\" or \"nested\"");
        }
        if (entry.contains("field_count") && !entry["field_count"].is_null()) {
            const auto v = as_count(entry["field_count"]);
            if (!v) schema_error(source, where + ".field_count: expected non-negative integer");
            record.field_count = v;
        }
        if (!seen.insert(record.selector).second) {
            throw Error(ErrorKind::DuplicateSelector, "eval",
                        std::string(source) + ": " + where + " repeats a selector");
        }
        truth.records.push_back(std::move(record));
    }
    return truth;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
    return parse_ground_truth(read_file(path), path.string());
}

NodeId resolve_selector(const Document& doc, std::span<const std::size_t> selector) {
    NodeId current = doc.body_id();
    for (std::size_t depth = 0; depth < selector.size(); ++depth) {
        const auto children = doc.element_children(current);
        if (selector[depth] >= children.size()) {
            throw Error(ErrorKind::SelectorResolutionError, "eval",
                        "selector step " + std::to_string(depth) + " (index " +
                            std::to_string(selector[depth]) + ") is outside the tree");
        }
        current = children[selector[depth]];
    }
    return current;
}

MatchCounts& MatchCounts::operator+=(const MatchCounts& other) noexcept {
    correct += other.correct;
    extracted += other.extracted;
    truth += other.truth;
    kind_agreements += other.kind_agreements;
    return *this;
}

Fraction Fraction::of(std::int64_t num, std::int64_t den) {
    if (den == 0) return {1, 1};
    const auto g = std::gcd(num, den);
    return g == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
}

Metrics compute_metrics(const MatchCounts& counts) {
    const auto ec = static_cast<std::int64_t>(counts.correct);
    return Metrics{Fraction::of(ec, static_cast<std::int64_t>(counts.truth)),
                   Fraction::of(ec, static_cast<std::int64_t>(counts.extracted))};
}

bool iou_at_least(const Rect& a, const Rect& b, std::int64_t num, std::int64_t den) {
    const Px ix = std::max<Px>(0, std::min(a.right(), b.right()) - std::max(a.left, b.left));
    const Px iy = std::max<Px>(0, std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top));
    const Px inter = ix * iy;
    const Px uni = rect_area(a) + rect_area(b) - inter;
    if (uni <= 0) return false;
    return inter * den >= num * uni;
}

MatchCounts match_records(std::span<const DataRecord> extracted, const GroundTruth& truth,
                          const LayoutTree& tree) {
    const auto& doc = tree.document();
    struct Target {
        NodeId node;
        RecordKind kind;
    };
    std::vector<Target> targets;
    for (const auto& record : truth.records) {
        targets.push_back({resolve_selector(doc, record.selector), record.kind});
    }
    std::sort(targets.begin(), targets.end(),
              [](const Target& a, const Target& b) { return a.node < b.node; });
    std::vector<std::size_t> order(extracted.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return extracted[a].node < extracted[b].node;
    });

    MatchCounts counts;
    counts.extracted = extracted.size();
    counts.truth = truth.records.size();
    std::vector<bool> used(extracted.size(), false);
    std::vector<bool> matched(targets.size(), false);
    const auto accept = [&](std::size_t t, std::size_t e) {
        used[e] = true;
        matched[t] = true;
        ++counts.correct;
        auto kind = extracted[e].kind;
        if (kind == RecordKind::Undetermined) kind = RecordKind::Flat;
        if (kind == targets[t].kind) ++counts.kind_agreements;
    };
    for (std::size_t t = 0; t < targets.size(); ++t) {
        for (const auto e : order) {
            if (!used[e] && extracted[e].node == targets[t].node) {
                accept(t, e);
                break;
            }
        }
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (matched[t]) continue;
        const auto& want = tree.rect_of(targets[t].node);
        for (const auto e : order) {
            if (!used[e] && iou_at_least(tree.rect_of(extracted[e].node), want)) {
                accept(t, e);
                break;
            }
        }
    }
    return counts;
}

PageEvaluation evaluate_page(std::string page_id, std::string_view html, const GroundTruth& truth,
                             const PipelineOptions& options) {
    PageEvaluation page;
    page.page_id = std::move(page_id);
    page.counts.truth = truth.records.size();
    try {
        const auto doc = parse_html(html);
        const auto result = extract_all(layout_document(doc, options.layout), options.fields,
                                        options.nested_ratio);
        page.counts = match_records(result.records, truth, result.layout);
    } catch (const Error& e) {
        page.counts = MatchCounts{0, 0, truth.records.size(), 0};
        page.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    page.metrics = compute_metrics(page.counts);
    return page;
}

CorpusEvaluation evaluate_corpus(const std::filesystem::path& dir, const PipelineOptions& options,
                                 unsigned jobs) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw Error(ErrorKind::InputNotFound, "eval", "no such corpus directory: " + dir.string());
    }
    constexpr std::string_view kTruthSuffix = ".truth.json";
    std::map<std::string, std::pair<bool, bool>> ids;  // id -> (has html, has truth)
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto name = entry.path().filename().string();
        if (name.ends_with(kTruthSuffix)) {
            ids[name.substr(0, name.size() - kTruthSuffix.size())].second = true;
        } else if (name.ends_with(".html")) {
            ids[name.substr(0, name.size() - 5)].first = true;
        }
    }
    if (ids.empty()) throw Error(ErrorKind::EmptyCorpus, "eval", "corpus has no pages: " + dir.string());

    std::vector<std::pair<std::string, std::pair<bool, bool>>> work(ids.begin(), ids.end());
    CorpusEvaluation out;
    out.pages.resize(work.size());

    const auto score = [&](std::size_t i) {
        const auto& [id, present] = work[i];
        PageEvaluation page;
        page.page_id = id;
        try {
            if (!present.second) {
                throw Error(ErrorKind::InputNotFound, "eval", "missing truth file for " + id);
            }
            const auto truth = load_ground_truth(dir / (id + std::string(kTruthSuffix)));
            page.counts.truth = truth.records.size();
            if (!present.first) {
                throw Error(ErrorKind::InputNotFound, "eval", "missing page file for " + id);
            }
            page = evaluate_page(id, read_file(dir / (id + ".html")), truth, options);
        } catch (const Error& e) {
            page.counts = MatchCounts{0, 0, page.counts.truth, 0};
            page.error = std::string(to_string(e.kind())) + ": " + e.what();
        }
        page.metrics = compute_metrics(page.counts);
        out.pages[i] = std::move(page);
    };

    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(work.size())));
    if (jobs == 1) {
        for (std::size_t i = 0; i < work.size(); ++i) score(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        for (unsigned j = 0; j < jobs; ++j) {
            workers.emplace_back([&] {
                for (auto i = next++; i < work.size(); i = next++) score(i);
            });
        }
    }
    for (const auto& page : out.pages) out.pooled += page.counts;
    out.metrics = compute_metrics(out.pooled);
    return out;
}

}  // namespace recordminer
