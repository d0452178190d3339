#include <doctest.h>

#include <random>

#include "recordminer/error.hpp"
#include "recordminer/region.hpp"
#include "test_support.hpp"

using namespace recordminer;

namespace {

struct Page {
    std::shared_ptr<const Document> doc;
    LayoutTree tree;

    explicit Page(std::string_view html)
        : doc(std::make_shared<const Document>(parse_html(html))), tree(layout_document(doc)) {}

    NodeId at(std::vector<std::size_t> path) const {
        NodeId id = doc->body_id();
        for (const auto i : path) id = doc->element_children(id).at(i);
        return id;
    }
};

std::string box(Px w, Px h, std::string_view inner = "") {
    return "<div width=" + std::to_string(w) + " height=" + std::to_string(h) + ">" + std::string(inner) +
           "</div>";
}

ErrorKind kind_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("find_max_rect picks the largest body child") {
    const Page p(box(100, 12) + box(500, 100) + box(40, 20));
    CHECK(rect_area(p.tree.rect_of(p.at({0}))) == 1200);
    CHECK(rect_area(p.tree.rect_of(p.at({1}))) == 50000);
    CHECK(rect_area(p.tree.rect_of(p.at({2}))) == 800);
    CHECK(find_max_rect(p.tree) == p.at({1}));
    CHECK(find_max_rect(p.tree) == testsupport::oracle_max_rect(p.tree));
}

TEST_CASE("find_max_rect single child and ties") {
    const Page single(box(10, 10));
    CHECK(find_max_rect(single.tree) == single.at({0}));
    const Page tie(box(100, 50) + box(50, 100));
    CHECK(find_max_rect(tie.tree) == tie.at({0}));
}

TEST_CASE("find_container takes the smallest node above half the area") {
    const Page p(box(1000, 100, box(900, 100, box(600, 100, box(300, 100)))));
    const auto max = find_max_rect(p.tree);
    CHECK(rect_area(p.tree.rect_of(max)) == 100000);
    CHECK(find_container(p.tree, max) == p.at({0, 0, 0}));
    CHECK(rect_area(p.tree.rect_of(p.at({0, 0, 0}))) == 60000);
    CHECK(find_container(p.tree, max) == testsupport::oracle_container(p.tree, max));
}

TEST_CASE("find_container falls back to the max node; half does not qualify") {
    const Page none(box(1000, 100, box(300, 100)));
    CHECK(find_container(none.tree, none.at({0})) == none.at({0}));
    const Page half(box(1000, 100, box(500, 100)));
    CHECK(rect_area(half.tree.rect_of(half.at({0, 0}))) == 50000);
    CHECK(find_container(half.tree, half.at({0})) == half.at({0}));
}

TEST_CASE("find_container prefers the earlier node on equal areas") {
    const Page p(box(1000, 100, box(800, 100, box(800, 100))));
    CHECK(find_container(p.tree, p.at({0})) == p.at({0, 0}));
}

TEST_CASE("filter_data_region keeps children at or above the average") {
    const Page p(box(1000, 0, box(10, 30) + box(10, 100) + box(10, 100) + box(10, 100) + box(10, 20)));
    const auto region = filter_data_region(p.tree, p.at({0}));
    CHECK(region.avg_child_height == 70);
    CHECK(region.kept_children == std::vector<NodeId>{p.at({0, 1}), p.at({0, 2}), p.at({0, 3})});
    CHECK(region.container == p.at({0}));
    CHECK(region.rect == p.tree.rect_of(p.at({0})));
}

TEST_CASE("filter_data_region with equal heights and a single child") {
    const Page equal(box(1000, 0, box(10, 40) + box(10, 40) + box(10, 40)));
    const auto all = filter_data_region(equal.tree, equal.at({0}));
    CHECK(all.avg_child_height == 40);
    CHECK(all.kept_children.size() == 3);
    const Page one(box(1000, 0, box(10, 40)));
    CHECK(filter_data_region(one.tree, one.at({0})).kept_children == std::vector<NodeId>{one.at({0, 0})});
    const Page empty(box(1000, 40));
    CHECK(kind_of([&] { filter_data_region(empty.tree, empty.at({0})); }) == ErrorKind::NoChildren);
}

TEST_CASE("mine_region on the four-book page") {
    const auto doc = parse_html(testsupport::fixture("books4.html"));
    const auto region = mine_region(doc);
    CHECK(doc.node(region.container).tag == "table");
    CHECK(doc.selector_of(region.container) == std::vector<std::size_t>{1, 0, 1, 1});
    REQUIRE(region.kept_children.size() == 4);
    for (const auto id : region.kept_children) CHECK(doc.node(id).tag == "tr");
}

TEST_CASE("mine_region on a page that is one table") {
    const auto doc = parse_html(
        "<table><tr><td>a</td><td>1</td></tr><tr><td>b</td><td>2</td></tr><tr><td>c</td><td>3</td></tr></table>");
    const auto region = mine_region(doc);
    CHECK(doc.node(region.container).tag == "table");
    CHECK(region.kept_children.size() == 3);
}

TEST_CASE("mine_region on an empty body") {
    CHECK(kind_of([] { mine_region(parse_html("<html><body> </body></html>")); }) == ErrorKind::NoChildren);
    CHECK(kind_of([] { mine_region(parse_html("<body>only text</body>")); }) == ErrorKind::NoChildren);
}

TEST_CASE("property: region search agrees with the brute-force scan") {
    std::mt19937 rng(31);
    for (int i = 0; i < 300; ++i) {
        const auto html = testsupport::random_document(rng);
        CAPTURE(html);
        const Page p(html);
        const auto expected = testsupport::oracle_max_rect(p.tree);
        if (!expected) {
            CHECK_THROWS_AS(find_max_rect(p.tree), Error);
            continue;
        }
        const auto max = find_max_rect(p.tree);
        CHECK(max == *expected);
        CHECK(find_container(p.tree, max) == testsupport::oracle_container(p.tree, max));
    }
}

TEST_CASE("property: filter splits on the average") {
    std::mt19937 rng(32);
    for (int i = 0; i < 200; ++i) {
        std::string inner;
        const int n = 1 + static_cast<int>(rng() % 12);
        for (int c = 0; c < n; ++c) inner += box(10, static_cast<Px>(rng() % 200));
        const Page p(box(1000, 0, inner));
        const auto region = filter_data_region(p.tree, p.at({0}));
        Px total = 0;
        for (const auto c : p.doc->element_children(p.at({0}))) total += p.tree.rect_of(c).height;
        CHECK(region.avg_child_height == total / n);
        for (const auto c : p.doc->element_children(p.at({0}))) {
            const bool kept = std::find(region.kept_children.begin(), region.kept_children.end(), c) !=
                              region.kept_children.end();
            CHECK(kept == (p.tree.rect_of(c).height >= region.avg_child_height));
        }
    }
}
