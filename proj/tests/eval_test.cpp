#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "recordminer/error.hpp"
#include "recordminer/eval.hpp"
#include "test_support.hpp"

using namespace recordminer;
namespace fs = std::filesystem;

using testsupport::row_selectors;
using testsupport::rows_page;
using testsupport::truth_json;

namespace {

ErrorKind kind_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::IoError;
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("recordminer-eval-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    void write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name, std::ios::binary) << text;
    }
};

MatchCounts counts(std::size_t correct, std::size_t extracted, std::size_t truth) {
    return MatchCounts{correct, extracted, truth, 0};
}

}  // namespace

TEST_CASE("ground truth parsing") {
    const auto truth = parse_ground_truth(R"({"schema": 1, "page_id": "p", "records": [
        {"selector": [1, 0], "kind": "flat", "field_count": 7},
        {"selector": [1, 1], "kind": "nested"},
        {"selector": [1, 2], "kind": "flat"},
        {"selector": [1, 3], "kind": "flat", "field_count": null}]})");
    CHECK(truth.page_id == "p");
    REQUIRE(truth.records.size() == 4);
    CHECK(truth.records[0].field_count == 7u);
    CHECK(truth.records[1].kind == RecordKind::Nested);
    CHECK_FALSE(truth.records[3].field_count.has_value());

    CHECK(parse_ground_truth(R"({"schema":1,"page_id":"e","records":[]})").records.empty());
    CHECK(kind_of([] {
              parse_ground_truth(R"({"schema":1,"page_id":"d","records":[
                  {"selector":[0],"kind":"flat"},{"selector":[0],"kind":"nested"}]})");
          }) == ErrorKind::DuplicateSelector);
}

TEST_CASE("ground truth schema errors name the location") {
    const auto message = [](std::string_view text) {
        try {
            parse_ground_truth(text, "t.json");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SchemaError);
            return std::string(e.what());
        }
        FAIL("expected SchemaError");
        return std::string();
    };
    CHECK(message("{\n\"schema\": 1,\n oops}").find("line 3") != std::string::npos);
    CHECK(message(R"({"schema":2,"page_id":"x","records":[]})").find("schema") != std::string::npos);
    CHECK(message(R"({"schema":1,"page_id":"x","records":[{"selector":[-1],"kind":"flat"}]})")
              .find("records[0].selector") != std::string::npos);
    CHECK(message(R"({"schema":1,"page_id":"x","records":[{"selector":[0],"kind":"deep"}]})")
              .find("records[0].kind") != std::string::npos);
}

TEST_CASE("load_ground_truth reads files") {
    const TempDir dir;
    dir.write("p.truth.json", truth_json("p", row_selectors(4)));
    CHECK(load_ground_truth(dir.path / "p.truth.json").records.size() == 4);
    CHECK(kind_of([&] { load_ground_truth(dir.path / "missing.json"); }) == ErrorKind::InputNotFound);
}

TEST_CASE("selector resolution") {
    const auto doc = parse_html(rows_page(3));
    CHECK(doc.node(resolve_selector(doc, std::vector<std::size_t>{1, 2})).tag == "tr");
    CHECK(resolve_selector(doc, std::vector<std::size_t>{}) == doc.body_id());
    CHECK(kind_of([&] { resolve_selector(doc, std::vector<std::size_t>{1, 3}); }) ==
          ErrorKind::SelectorResolutionError);
}

TEST_CASE("match counting: 10 true, 9 extracted, 8 identical") {
    std::string html;
    for (int i = 0; i < 12; ++i) html += "<div>row " + std::to_string(i) + "</div>";
    const auto tree = layout_document(parse_html(html));
    const auto& doc = tree.document();
    const auto divs = doc.element_children(doc.body_id());
    GroundTruth truth;
    for (std::size_t i = 0; i < 10; ++i) truth.records.push_back({{i}, RecordKind::Flat, std::nullopt});
    std::vector<DataRecord> extracted;
    for (std::size_t i : {0, 1, 2, 3, 4, 5, 6, 7, 11}) {
        extracted.push_back({divs[i], tree.rect_of(divs[i]), 0, RecordKind::Flat, {}});
    }
    const auto c = match_records(extracted, truth, tree);
    CHECK(c.correct == 8);
    CHECK(c.extracted == 9);
    CHECK(c.truth == 10);
    CHECK(c.kind_agreements == 8);
    CHECK(c.false_positives() == 1);
    CHECK(c.misses() == 2);
}

TEST_CASE("a wrapper with IoU 0.95 matches by geometry") {
    const auto tree = layout_document(parse_html("<div height=100><div height=95>record</div></div><div>x</div>"));
    const auto& doc = tree.document();
    const auto wrapper = doc.element_children(doc.body_id())[0];
    CHECK(rect_area(tree.rect_of(wrapper)) == 102400);
    CHECK(rect_area(tree.rect_of(doc.element_children(wrapper)[0])) == 97280);
    GroundTruth truth{"w", {{{0, 0}, RecordKind::Flat, std::nullopt}}};
    const std::vector<DataRecord> extracted{{wrapper, tree.rect_of(wrapper), 0, RecordKind::Flat, {}}};
    CHECK(match_records(extracted, truth, tree) == MatchCounts{1, 1, 1, 1});

    const auto other = doc.element_children(doc.body_id())[1];
    const std::vector<DataRecord> disjoint{{other, tree.rect_of(other), 0, RecordKind::Flat, {}}};
    CHECK(match_records(disjoint, truth, tree) == MatchCounts{0, 1, 1, 0});
}

TEST_CASE("IoU threshold") {
    CHECK(iou_at_least({0, 0, 100, 95}, {0, 0, 100, 100}));
    CHECK(iou_at_least({0, 0, 100, 80}, {0, 0, 100, 100}));
    CHECK_FALSE(iou_at_least({0, 0, 100, 79}, {0, 0, 100, 100}));
    CHECK_FALSE(iou_at_least({0, 0, 0, 0}, {0, 0, 0, 0}));
    CHECK_FALSE(iou_at_least({0, 0, 10, 10}, {10, 0, 10, 10}));
}

TEST_CASE("metrics are exact fractions") {
    const auto m = compute_metrics(counts(8, 9, 10));
    CHECK(m.recall == Fraction{4, 5});
    CHECK(m.precision == Fraction{8, 9});
    CHECK(m.recall.value() == 0.8);

    const auto table = compute_metrics(counts(316, 316, 326));
    CHECK(table.recall == Fraction{158, 163});
    CHECK(table.recall.value() == doctest::Approx(0.9693).epsilon(0.00005));
    CHECK(table.precision == Fraction{1, 1});

    const auto empty = compute_metrics(counts(0, 0, 0));
    CHECK(empty.recall == Fraction{1, 1});
    CHECK(empty.precision == Fraction{1, 1});
}

TEST_CASE("corpus evaluation pools counts before dividing") {
    const TempDir dir;
    dir.write("a.html", rows_page(9));
    auto a_truth = row_selectors(8);
    a_truth.push_back({0});
    a_truth.push_back({2});
    dir.write("a.truth.json", truth_json("a", a_truth));
    dir.write("b.html", rows_page(10));
    dir.write("b.truth.json", truth_json("b", row_selectors(10)));

    const auto result = evaluate_corpus(dir.path);
    REQUIRE(result.pages.size() == 2);
    CHECK(result.pages[0].page_id == "a");
    CHECK(result.pages[0].counts == MatchCounts{8, 9, 10, 8});
    CHECK(result.pages[1].counts == MatchCounts{10, 10, 10, 10});
    CHECK(result.metrics.recall == Fraction{9, 10});
    CHECK(result.metrics.precision == Fraction{18, 19});

    const auto parallel = evaluate_corpus(dir.path, {}, 4);
    CHECK(parallel.pooled == result.pooled);
}

TEST_CASE("corpus evaluation scores failures") {
    const TempDir dir;
    dir.write("broken.html", "   ");
    dir.write("broken.truth.json", truth_json("broken", row_selectors(5)));
    dir.write("lonely.html", rows_page(3));
    dir.write("nohtml.truth.json", truth_json("nohtml", row_selectors(2)));
    dir.write("badsel.html", rows_page(2));
    dir.write("badsel.truth.json", truth_json("badsel", {{7, 7}}));
    const auto result = evaluate_corpus(dir.path);
    REQUIRE(result.pages.size() == 4);
    const auto find = [&](const std::string& id) -> const PageEvaluation& {
        for (const auto& p : result.pages) {
            if (p.page_id == id) return p;
        }
        FAIL("no page " << id);
        return result.pages.front();
    };
    CHECK(find("broken").counts == MatchCounts{0, 0, 5, 0});
    CHECK(find("broken").error->find("EmptyInput") == 0);
    CHECK(find("lonely").counts == MatchCounts{0, 0, 0, 0});
    CHECK(find("lonely").error.has_value());
    CHECK(find("nohtml").counts == MatchCounts{0, 0, 2, 0});
    CHECK(find("badsel").counts == MatchCounts{0, 0, 1, 0});
    CHECK(find("badsel").error->find("SelectorResolutionError") == 0);
}

TEST_CASE("corpus evaluation errors") {
    const TempDir dir;
    dir.write("notes.txt", "nothing to score");
    CHECK(kind_of([&] { evaluate_corpus(dir.path); }) == ErrorKind::EmptyCorpus);
    CHECK(kind_of([&] { evaluate_corpus(dir.path / "nope"); }) == ErrorKind::InputNotFound);
}

TEST_CASE("property: metrics stay within [0, 1] and IoU is symmetric") {
    std::mt19937 rng(51);
    for (int i = 0; i < 1000; ++i) {
        const auto truth = rng() % 50;
        const auto extracted = rng() % 50;
        const auto correct = rng() % (std::min(truth, extracted) + 1);
        const auto m = compute_metrics(counts(correct, extracted, truth));
        CHECK(m.recall.num >= 0);
        CHECK(m.recall.num <= m.recall.den);
        CHECK(m.precision.num <= m.precision.den);
        const Rect a{Px(rng() % 100), Px(rng() % 100), Px(rng() % 100), Px(rng() % 100)};
        const Rect b{Px(rng() % 100), Px(rng() % 100), Px(rng() % 100), Px(rng() % 100)};
        CHECK(iou_at_least(a, b) == iou_at_least(b, a));
    }
}

TEST_CASE("property: extracting exactly the truth scores perfectly") {
    std::mt19937 rng(52);
    for (int i = 0; i < 50; ++i) {
        const int n = 2 + static_cast<int>(rng() % 14);  // one row would tie the header
        const auto doc = parse_html(rows_page(n));
        GroundTruth truth;
        for (const auto& s : row_selectors(n)) truth.records.push_back({s, RecordKind::Flat, std::nullopt});
        const auto result = extract_all(doc);
        const auto c = match_records(result.records, truth, result.layout);
        CHECK(c == MatchCounts{std::size_t(n), std::size_t(n), std::size_t(n), std::size_t(n)});
    }
}
