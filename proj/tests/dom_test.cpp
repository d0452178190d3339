#include <doctest.h>

#include <random>
#include <set>

#include "recordminer/dom.hpp"
#include "recordminer/error.hpp"
#include "test_support.hpp"

using namespace recordminer;
using testsupport::dump;
using testsupport::dump_body;

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

/// Structural shape ignoring ids: same as dump() from the root.
std::string shape(const Document& doc) { return dump(doc, 0); }

}  // namespace

TEST_CASE("minimal document") {
    const auto doc = parse_html("<html><body><p>x</p></body></html>");
    CHECK(dump_body(doc) == R"(body(p("x")))");
    CHECK(doc.root().tag == "html");
    CHECK(doc.node(doc.body_id()).tag == "body");
    CHECK(doc.source_length() == 34);
}

TEST_CASE("implied td close") {
    const auto doc = parse_html("<body><table><tr><td>a<td>b</table>");
    CHECK(dump_body(doc) == R"(body(table(tr(td("a") td("b")))))");
}

TEST_CASE("empty and whitespace input") {
    CHECK(kind_of([] { parse_html(""); }) == ErrorKind::EmptyInput);
    CHECK(kind_of([] { parse_html(" \n\t "); }) == ErrorKind::EmptyInput);
}

TEST_CASE("find_body") {
    SUBCASE("explicit body") {
        const auto doc = parse_html("<html><body><p>x</p></body></html>");
        CHECK(&find_body(doc) == &doc.body());
        CHECK(find_body(doc).tag == "body");
    }
    SUBCASE("synthesized body holds all content") {
        const auto doc = parse_html("<div>a</div><p>b</p>");
        CHECK(dump_body(doc) == R"(body(div("a") p("b")))");
    }
    SUBCASE("duplicate body is demoted") {
        const auto doc = parse_html("<body id=1><div>a</div><body id=2><div>b</div>");
        CHECK(find_body(doc).attribute("id") == "1");
        CHECK(dump_body(doc) == R"(body[id=1](div("a") div[id=2](div("b"))))");
    }
    SUBCASE("head content stays out of body") {
        const auto doc = parse_html("<title>T</title><meta charset=utf-8><p>x");
        CHECK(shape(doc) == R"(html(head(title("T") meta[charset=utf-8]) body(p("x"))))");
    }
}

TEST_CASE("malformed fixtures parse to the expected trees") {
    for (const auto& c : testsupport::malformed_cases()) {
        CAPTURE(c.name);
        CHECK(dump_body(parse_html(c.html)) == c.expected);
    }
}

TEST_CASE("node lookup and selectors") {
    const auto doc = parse_html("<div>a</div><ul><li>x</li><li>y</li></ul>");
    CHECK(kind_of([&] { doc.node(1000000); }) == ErrorKind::UnknownNode);
    const auto ul = doc.element_children(doc.body_id()).at(1);
    CHECK(doc.node(ul).tag == "ul");
    const auto second_li = doc.element_children(ul).at(1);
    CHECK(doc.selector_of(second_li) == std::vector<std::size_t>{1, 1});
    CHECK(doc.selector_of(doc.body_id()) == std::vector<std::size_t>{});
    CHECK_FALSE(doc.selector_of(0).has_value());
}

TEST_CASE("ids follow document order") {
    const auto doc = parse_html("<div><p>a<b>b</b></p><span>c</span></div>");
    for (const auto& n : doc.nodes()) {
        for (const auto child : n.children) {
            CHECK(child > n.id);
            CHECK(doc.node(child).parent == n.id);
        }
    }
}

TEST_CASE("encodings") {
    CHECK(encoding_from_name("UTF-8") == Encoding::Utf8);
    CHECK(encoding_from_name("latin1") == Encoding::Latin1);
    CHECK(encoding_from_name("ISO-8859-1") == Encoding::Latin1);
    CHECK(kind_of([] { encoding_from_name("ebcdic"); }) == ErrorKind::EncodingError);
    const std::string latin = "<p>caf\xe9</p>";
    CHECK(dump_body(parse_html(latin, Encoding::Latin1)) == "body(p(\"caf\xc3\xa9\"))");
    CHECK(dump_body(parse_html(latin)) == "body(p(\"caf\xef\xbf\xbd\"))");
}

TEST_CASE("raw text and opaque elements") {
    const auto doc = parse_html("<style>p{}</style><p>a</p><script>x='</p>'</script><iframe><p>no</p></iframe>");
    CHECK(dump_body(doc) == R"(body(p("a") script("x='</p>'") iframe))");
    CHECK(is_raw_text_tag("script"));
    CHECK_FALSE(is_raw_text_tag("div"));
}

TEST_CASE("collapse_whitespace") {
    CHECK(collapse_whitespace("  a \n\t b  ") == "a b");
    CHECK(collapse_whitespace("") == "");
}

TEST_CASE("deep nesting is capped without failing") {
    std::string html;
    for (int i = 0; i < 5000; ++i) html += "<div>";
    html += "deep";
    const auto doc = parse_html(html);
    std::size_t deepest = 0;
    for (const auto& n : doc.nodes()) {
        std::size_t depth = 0;
        for (auto p = n.parent; p; p = doc.node(*p).parent) ++depth;
        deepest = std::max(deepest, depth);
    }
    CHECK(deepest <= 512);
    CHECK(doc.size() == 5003);  // html, body, 5000 divs, one text node
}

TEST_CASE("property: serialize round-trips to an isomorphic tree") {
    std::mt19937 rng(11);
    for (int i = 0; i < 300; ++i) {
        const auto html = testsupport::random_document(rng);
        CAPTURE(html);
        const auto first = parse_html(html);
        const auto again = parse_html(serialize(first));
        CHECK(shape(again) == shape(first));
        CHECK(serialize(again) == serialize(first));
    }
}

TEST_CASE("property: parsing is deterministic") {
    std::mt19937 rng(12);
    for (int i = 0; i < 200; ++i) {
        const auto html = testsupport::random_document(rng);
        const auto a = parse_html(html);
        const auto b = parse_html(html);
        REQUIRE(a.size() == b.size());
        for (std::size_t id = 0; id < a.size(); ++id) {
            CHECK(a.nodes()[id].tag == b.nodes()[id].tag);
            CHECK(a.nodes()[id].text == b.nodes()[id].text);
            CHECK(a.nodes()[id].children == b.nodes()[id].children);
        }
    }
}

TEST_CASE("property: every word of the text appears exactly once") {
    std::mt19937 rng(13);
    for (int i = 0; i < 200; ++i) {
        std::string html;
        std::vector<std::string> words;
        static const char* tags[] = {"div", "p", "li", "td", "tr", "span", "b", "dd", "option"};
        for (int w = 0; w < 30; ++w) {
            if (rng() % 2) html += std::string("<") + tags[rng() % 9] + ">";
            if (rng() % 4 == 0) html += std::string("</") + tags[rng() % 9] + ">";
            words.push_back("w" + std::to_string(w) + "z");
            html += " " + words.back() + " ";
        }
        const auto doc = parse_html(html);
        std::string text;
        for (const auto& n : doc.nodes()) {
            if (n.is_text()) text += " " + n.text + " ";
        }
        for (const auto& w : words) {
            const auto first = text.find(" " + w + " ");
            CHECK(first != std::string::npos);
            CHECK(text.find(" " + w + " ", first + 1) == std::string::npos);
        }
    }
}

TEST_CASE("property: random bytes never crash the parser") {
    std::mt19937 rng(14);
    for (int i = 0; i < 2000; ++i) {
        const auto bytes = testsupport::random_bytes(rng, 300);
        try {
            const auto doc = parse_html(bytes);
            CHECK(doc.body().tag == "body");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::EmptyInput);
        }
    }
}
