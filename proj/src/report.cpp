#include "recordminer/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "recordminer/fetch.hpp"

namespace recordminer {

namespace {

using nlohmann::ordered_json;

ordered_json rect_json(const Rect& r) {
    return ordered_json{{"left", r.left}, {"top", r.top}, {"width", r.width}, {"height", r.height}};
}

Rect rect_from(const ordered_json& j) {
    return Rect{j.at("left").get<Px>(), j.at("top").get<Px>(), j.at("width").get<Px>(),
                j.at("height").get<Px>()};
}

ordered_json record_json(const ReportRecord& r) {
    ordered_json items = ordered_json::array();
    for (const auto& item : r.items) {
        items.push_back({{"node", item.node}, {"tag", item.tag}, {"text", item.text}, {"empty", item.empty}});
    }
    return ordered_json{{"node", r.node},
                        {"tag", r.tag},
                        {"selector", r.selector},
                        {"kind", to_string(r.kind)},
                        {"single_record", r.single_record},
                        {"field_count", r.field_count},
                        {"rect", rect_json(r.rect)},
                        {"items", std::move(items)}};
}

ordered_json region_json(const ExtractionReport& report) {
    return ordered_json{{"container", report.container},
                        {"tag", report.container_tag},
                        {"selector", report.container_selector},
                        {"rect", rect_json(report.region_rect)},
                        {"avg_child_height", report.avg_child_height},
                        {"kept_children", report.kept_children}};
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string svg_rect(const Rect& r, std::string_view attrs) {
    std::ostringstream out;
    out << "<rect x=\"" << r.left << "\" y=\"" << r.top << "\" width=\"" << r.width
        << "\" height=\"" << r.height << "\" " << attrs << "/>\n";
    return out.str();
}

}  // namespace

ExtractionReport make_report(const ExtractionResult& result, std::string source,
                             std::optional<double> timing_ms) {
    const auto& doc = result.layout.document();
    ExtractionReport report;
    report.source = std::move(source);
    report.container = result.region.container;
    report.container_tag = doc.node(result.region.container).tag;
    report.container_selector = doc.selector_of(result.region.container).value_or(std::vector<std::size_t>{});
    report.region_rect = result.region.rect;
    report.avg_child_height = result.region.avg_child_height;
    report.kept_children = result.region.kept_children;
    report.timing_ms = timing_ms;
    for (const auto& record : result.records) {
        ReportRecord r;
        r.node = record.node;
        r.tag = doc.node(record.node).tag;
        r.selector = doc.selector_of(record.node).value_or(std::vector<std::size_t>{});
        r.single_record = record.kind == RecordKind::Undetermined;
        r.kind = r.single_record ? RecordKind::Flat : record.kind;
        r.field_count = record.field_count;
        r.rect = record.rect;
        for (const auto& item : record.items) {
            r.items.push_back({item.source_node, item.tag, item.text, item.empty});
        }
        report.records.push_back(std::move(r));
    }
    return report;
}

std::string render_report(const ExtractionReport& report, OutputFormat format) {
    if (format == OutputFormat::Json) {
        ordered_json records = ordered_json::array();
        for (const auto& r : report.records) records.push_back(record_json(r));
        ordered_json out{{"schema", 1},
                         {"source", report.source},
                         {"region", region_json(report)},
                         {"records", std::move(records)}};
        if (report.timing_ms) out["timing_ms"] = *report.timing_ms;
        return out.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
    }
    std::string text;
    ordered_json head{{"schema", 1}, {"type", "region"}, {"source", report.source},
                      {"region", region_json(report)}, {"record_count", report.records.size()}};
    if (report.timing_ms) head["timing_ms"] = *report.timing_ms;
    text += head.dump(-1, ' ', false, ordered_json::error_handler_t::replace) + "\n";
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        ordered_json line{{"schema", 1}, {"type", "record"}, {"source", report.source},
                          {"index", i}, {"record", record_json(report.records[i])}};
        text += line.dump(-1, ' ', false, ordered_json::error_handler_t::replace) + "\n";
    }
    return text;
}

ExtractionReport parse_report(std::string_view text) {
    try {
        const auto j = ordered_json::parse(text);
        if (j.at("schema") != 1) {
            throw Error(ErrorKind::SchemaError, "cli", "unsupported report schema");
        }
        ExtractionReport report;
        report.source = j.at("source").get<std::string>();
        const auto& region = j.at("region");
        report.container = region.at("container").get<NodeId>();
        report.container_tag = region.at("tag").get<std::string>();
        report.container_selector = region.at("selector").get<std::vector<std::size_t>>();
        report.region_rect = rect_from(region.at("rect"));
        report.avg_child_height = region.at("avg_child_height").get<Px>();
        report.kept_children = region.at("kept_children").get<std::vector<NodeId>>();
        for (const auto& r : j.at("records")) {
            ReportRecord record;
            record.node = r.at("node").get<NodeId>();
            record.tag = r.at("tag").get<std::string>();
            record.selector = r.at("selector").get<std::vector<std::size_t>>();
            record.kind = r.at("kind") == "nested" ? RecordKind::Nested : RecordKind::Flat;
            record.single_record = r.at("single_record").get<bool>();
            record.field_count = r.at("field_count").get<std::size_t>();
            record.rect = rect_from(r.at("rect"));
            for (const auto& item : r.at("items")) {
                record.items.push_back({item.at("node").get<NodeId>(), item.at("tag").get<std::string>(),
                                        item.at("text").get<std::string>(), item.at("empty").get<bool>()});
            }
            report.records.push_back(std::move(record));
        }
        if (j.contains("timing_ms")) report.timing_ms = j.at("timing_ms").get<double>();
        return report;
    } catch (const ordered_json::exception& e) {
        throw Error(ErrorKind::SchemaError, "cli", std::string("malformed report: ") + e.what());
    }
}

std::string render_error(std::string_view kind, std::string_view stage, std::string_view message) {
    ordered_json out{{"schema", 1},
                     {"error", {{"kind", kind}, {"stage", stage}, {"message", message}}}};
    return out.dump(-1, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

std::string render_error(const Error& error) {
    ordered_json detail{{"kind", to_string(error.kind())},
                        {"stage", error.stage()},
                        {"message", error.what()}};
    if (const auto* fetch = dynamic_cast<const FetchError*>(&error)) {
        detail["reason"] = fetch->reason();
        detail["status"] = fetch->status();
    }
    const ordered_json out{{"schema", 1}, {"error", std::move(detail)}};
    return out.dump(-1, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

std::string render_overlay_svg(const LayoutTree& tree, const DataRegion* region,
                               std::span<const DataRecord> records) {
    const auto& doc = tree.document();
    const auto& page = tree.rect_of(0);
    const Px width = std::max<Px>(1, page.width);
    const Px height = std::max<Px>(1, page.height);
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<g class=\"elements\" fill=\"none\" stroke=\"#9ca3af\" stroke-width=\"1\">\n";
    const auto body = doc.body_id();
    for (const auto& node : doc.nodes()) {
        if (!node.is_element() || node.id < body) continue;
        const auto& r = tree.rect_of(node.id);
        if (node.id != body && r.width == 0 && r.height == 0) continue;
        out << svg_rect(r, "data-node=\"" + std::to_string(node.id) + "\" data-tag=\"" +
                               xml_escape(node.tag) + "\"");
    }
    out << "</g>\n";
    if (!records.empty()) {
        out << "<g class=\"records\" fill=\"#3b82f6\" fill-opacity=\"0.25\" stroke=\"#1d4ed8\" stroke-width=\"1\">\n";
        for (const auto& record : records) {
            out << svg_rect(record.rect, "data-node=\"" + std::to_string(record.node) +
                                             "\" data-kind=\"" + std::string(to_string(record.kind)) + "\"");
        }
        out << "</g>\n";
    }
    if (region) {
        out << "<g class=\"region\" fill=\"none\" stroke=\"#dc2626\" stroke-width=\"3\" stroke-dasharray=\"8 4\">\n";
        out << svg_rect(region->rect, "data-node=\"" + std::to_string(region->container) + "\"");
        out << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string render_eval_table(const CorpusEvaluation& evaluation) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-28s %6s %10s %6s %8s %10s\n", "page", "Cor.", "Wr.", "Nt",
                  "recall", "precision");
    out << line;
    const auto row = [&](const std::string& name, const MatchCounts& c, const Metrics& m,
                         const std::string& note) {
        const auto wrong = std::to_string(c.false_positives()) + "/" + std::to_string(c.misses());
        std::snprintf(line, sizeof line, "%-28s %6zu %10s %6zu %8s %10s", name.c_str(), c.correct,
                      wrong.c_str(), c.truth, fixed4(m.recall.value()).c_str(),
                      fixed4(m.precision.value()).c_str());
        out << line;
        if (!note.empty()) out << "  " << note;
        out << '\n';
    };
    for (const auto& page : evaluation.pages) {
        row(page.page_id, page.counts, page.metrics, page.error ? "error: " + *page.error : "");
    }
    row("TOTAL", evaluation.pooled, evaluation.metrics, "");
    out << "recall    " << fixed4(evaluation.metrics.recall.value()) << '\n';
    out << "precision " << fixed4(evaluation.metrics.precision.value()) << '\n';
    return out.str();
}

std::string render_eval_json(const CorpusEvaluation& evaluation) {
    const auto counts = [](const MatchCounts& c, const Metrics& m) {
        return ordered_json{{"correct", c.correct},
                            {"extracted", c.extracted},
                            {"truth", c.truth},
                            {"false_positives", c.false_positives()},
                            {"misses", c.misses()},
                            {"kind_agreements", c.kind_agreements},
                            {"recall", m.recall.value()},
                            {"precision", m.precision.value()},
                            {"recall_exact", std::to_string(m.recall.num) + "/" + std::to_string(m.recall.den)},
                            {"precision_exact",
                             std::to_string(m.precision.num) + "/" + std::to_string(m.precision.den)}};
    };
    ordered_json pages = ordered_json::array();
    for (const auto& page : evaluation.pages) {
        auto j = counts(page.counts, page.metrics);
        j["page_id"] = page.page_id;
        if (page.error) j["error"] = *page.error;
        pages.push_back(std::move(j));
    }
    ordered_json out{{"schema", 1},
                     {"pages", std::move(pages)},
                     {"pooled", counts(evaluation.pooled, evaluation.metrics)}};
    return out.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace recordminer
