#!/usr/bin/env python3
"""Regenerates the synthetic evaluation corpus under tests/corpus/.

Every page is built as a tree first; the ground-truth selectors and field
counts are read off that tree, never off the extractor's output.

    python3 tools/gen_corpus.py [--out tests/corpus] [--seed 2007]
"""

import argparse
import json
import random
from pathlib import Path

FIELD_TAGS = {"td", "tr", "a"}

PRODUCTS = [
    "Compaq Presario", "Dell Inspiron", "IBM ThinkPad", "Sony Vaio", "Toshiba Satellite",
    "HP Pavilion", "Acer Aspire", "Apple iBook", "Gateway Solo", "Fujitsu Lifebook",
    "Canon PowerShot", "Nikon Coolpix", "Olympus Camedia", "Kodak EasyShare", "Casio Exilim",
    "Data Mining Concepts", "Web Data Extraction", "Information Retrieval", "Compiler Design",
    "Operating Systems", "Database Internals", "Network Security", "Machine Learning",
]
SIZES = ["S", "M", "L", "XL", "XXL"]


class El:
    def __init__(self, tag, attrs=None, children=None, close=True):
        self.tag = tag
        self.attrs = attrs or {}
        self.children = children or []
        self.close = close

    def add(self, *kids):
        self.children.extend(kids)
        return self

    def render(self, out):
        attrs = "".join(f' {k}="{v}"' for k, v in self.attrs.items())
        out.append(f"<{self.tag}{attrs}>")
        for child in self.children:
            if isinstance(child, str):
                out.append(child)
            else:
                child.render(out)
        if self.close and self.tag not in ("img", "br"):
            out.append(f"</{self.tag}>")

    def field_count(self):
        own = 1 if self.tag in FIELD_TAGS else 0
        return own + sum(c.field_count() for c in self.children if isinstance(c, El))


def selector(body, target):
    def walk(node, path):
        if node is target:
            return path
        index = 0
        for child in node.children:
            if isinstance(child, El):
                found = walk(child, path + [index])
                if found is not None:
                    return found
                index += 1
        return None

    return walk(body, [])


def price(rng):
    return f"${rng.randint(5, 2999)}.{rng.randint(0, 99):02d}"


def header(rng):
    return El("div", {"class": "header"}).add(
        El("a", {"href": "/"}).add("Home"), " | ", El("a", {"href": "/deals"}).add("Deals"),
        " | Welcome to the store")


def banner(rng):
    return El("div", {"class": "banner"}).add(El("img", {"src": "ad.gif", "width": "468", "height": "60"}))


def footer(rng):
    return El("div", {"class": "footer"}).add(
        "Copyright 2007 Example Stores. ", El("a", {"href": "/privacy"}).add("Privacy"))


def nav_cell(rng):
    cell = El("td", {"width": "180"})
    for name in rng.sample(["Laptops", "Cameras", "Books", "Music", "Garden", "Toys"], 4):
        cell.add(El("a", {"href": "/" + name.lower()}).add(name), El("br"))
    return cell


def ads_cell(rng):
    return El("td", {"width": "200"}).add("Sponsored", El("br"), El("a", {"href": "/ad"}).add("Buy now"))


def flat_row(rng, name, loose):
    row = El("tr")
    row.add(El("td", close=not loose).add(El("img", {"src": "p.jpg", "width": "80", "height": "80"})))
    row.add(El("td", close=not loose).add(El("a", {"href": "/p"}).add(name), " ", price(rng)))
    row.add(El("td", close=not loose).add(El("a", {"href": "/buy"}).add("Buy"), " ",
                                          El("a", {"href": "/info"}).add("Info")))
    return row  # tr + 3 td + 3 a = 7 fields


def nested_row(rng, name, variants):
    row = El("tr")
    row.add(El("td").add(El("img", {"src": "p.jpg", "width": "80", "height": "80"})))
    grid = El("table")
    line = El("tr")
    for size in variants:
        line.add(El("td").add(f"{size} {price(rng)}"))
    grid.add(line)
    row.add(El("td").add(El("a", {"href": "/p"}).add(name), grid))
    row.add(El("td").add(El("a", {"href": "/buy"}).add("Buy"), " ",
                         El("a", {"href": "/info"}).add("Info")))
    return row


def div_record(rng, name, variants=None):
    rec = El("div", {"class": "item"})
    rec.add(El("img", {"src": "p.jpg", "width": "90", "height": "90"}))
    rec.add(El("a", {"href": "/p"}).add(name), " ", price(rng), " ")
    if variants:
        for size in variants:
            rec.add(El("a", {"href": "/v/" + size}).add(size), " ")
    rec.add(El("a", {"href": "/buy"}).add("Add to cart"))
    return rec


def li_record(rng, name, loose):
    rec = El("li", close=not loose)
    rec.add(El("img", {"src": "b.jpg", "width": "60", "height": "75"}), " ")
    rec.add(El("a", {"href": "/b"}).add(name), " by A. Author, ", price(rng))
    return rec


def three_column(rng, content):
    layout = El("table", {"width": "100%"})
    row = El("tr")
    row.add(nav_cell(rng), content, ads_cell(rng))
    layout.add(row)
    return layout


def make_page(rng, kind, index):
    body = El("body")
    names = rng.sample(PRODUCTS, rng.randint(4, 9))
    loose = index % 2 == 1  # omit optional close tags on odd pages
    records = []
    nested = set()

    if kind == "nested":
        count = rng.randint(1, 2)
        nested = set(rng.sample(range(1, len(names)), count))

    content = El("td")
    content.add(El("h2").add(rng.choice(["Search results", "Top sellers", "New arrivals"])))
    style = kind if kind != "nested" else rng.choice(["table", "div"])
    if kind == "noisy":
        style = rng.choice(["table", "div", "list"])

    # Noise inside the listing: a sponsored look-alike that is not a true
    # record, or a true record without its picture (too short to survive).
    sponsored = kind == "noisy" and index in (0, 3)
    short = kind == "noisy" and index == 2

    if style == "table":
        listing = El("table", {"class": "results"})
        if sponsored:
            listing.add(flat_row(rng, "Sponsored: " + rng.choice(PRODUCTS), False))
        for i, name in enumerate(names):
            if short and i == 1:
                row = El("tr").add(El("td").add(El("a", {"href": "/p"}).add(name)), El("td").add(price(rng)))
            elif i in nested:
                row = nested_row(rng, name, rng.sample(SIZES, rng.randint(3, 5)))
            else:
                row = flat_row(rng, name, loose)
            listing.add(row)
            records.append((row, "nested" if i in nested else "flat"))
        content.add(listing)
    elif style == "div":
        listing = El("div", {"class": "results"})
        if sponsored:
            listing.add(div_record(rng, "Sponsored: " + rng.choice(PRODUCTS)))
        for i, name in enumerate(names):
            if short and i == 1:
                rec = El("div", {"class": "item"}).add(El("a", {"href": "/p"}).add(name), " ", price(rng))
            else:
                rec = div_record(rng, name, rng.sample(SIZES, 4) if i in nested else None)
            listing.add(rec)
            records.append((rec, "nested" if i in nested else "flat"))
        content.add(listing)
    else:
        listing = El("ul")
        if sponsored:
            listing.add(li_record(rng, "Sponsored: " + rng.choice(PRODUCTS), loose))
        for i, name in enumerate(names):
            if short and i == 1:
                rec = El("li", close=not loose).add(El("a", {"href": "/b"}).add(name), " ", price(rng))
            else:
                rec = li_record(rng, name, loose)
            listing.add(rec)
            records.append((rec, "flat"))
        content.add(listing)
    content.add(El("div", {"class": "pager"}).add("Page 1 of 3 ", El("a", {"href": "?p=2"}).add("Next")))

    body.add(header(rng))
    if kind == "noisy" or rng.random() < 0.5:
        body.add(banner(rng))
    body.add(three_column(rng, content))
    body.add(footer(rng))
    if kind == "noisy":
        body.add(El("div").add(El("a", {"href": "/sitemap"}).add("Sitemap")))

    out = ["<!DOCTYPE html>\n<html><head><title>Store</title>",
           "<style>.item{color:red}</style></head>\n"]
    body.render(out)
    out.append("\n</html>\n")
    truth = {
        "schema": 1,
        "page_id": None,
        "records": [
            {"selector": selector(body, rec), "kind": k, "field_count": rec.field_count()}
            for rec, k in records
        ],
    }
    return "".join(out), truth


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "corpus"))
    parser.add_argument("--seed", type=int, default=2007)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    plan = [("table", 6), ("div", 5), ("list", 5), ("nested", 5), ("noisy", 5)]
    for kind, count in plan:
        for i in range(count):
            page_id = f"{kind}-{i + 1:02d}"
            html, truth = make_page(rng, kind, i)
            truth["page_id"] = page_id
            (out / f"{page_id}.html").write_text(html)
            (out / f"{page_id}.truth.json").write_text(json.dumps(truth, indent=2) + "\n")


if __name__ == "__main__":
    main()
