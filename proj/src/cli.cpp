#include "recordminer/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "recordminer/config.hpp"
#include "recordminer/error.hpp"
#include "recordminer/eval.hpp"
#include "recordminer/fetch.hpp"
#include "recordminer/io.hpp"
#include "recordminer/report.hpp"

namespace recordminer::cli {

namespace {

struct Flags {
    std::string config_path;
    std::optional<std::string> nested_ratio;
    std::optional<std::string> field_tags;
    std::optional<long long> viewport;
    std::optional<std::string> format;
    std::optional<double> timeout;
    std::optional<std::string> user_agent;
    std::string encoding = "utf-8";
    bool no_timing = false;
    unsigned jobs = 0;
    std::string input;
    std::string url;
    std::string out_path;
};

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::ConfigError: return kUsage;
        case ErrorKind::FetchError:
        case ErrorKind::IoError: return kIo;
        default: return kPipeline;
    }
}

CliConfig resolve_config(const Flags& flags) {
    CliConfig config;
    std::string path = flags.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("RECORDMINER_CONFIG"); env && *env) path = env;
    }
    if (!path.empty()) {
        try {
            apply_config_text(config, read_file(path), path);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::ConfigError) throw;
            throw Error(ErrorKind::ConfigError, "cli", std::string("cannot read config: ") + e.what());
        }
    }
    if (flags.nested_ratio) apply_setting(config, "nested_ratio", *flags.nested_ratio);
    if (flags.field_tags) apply_setting(config, "field_tags", *flags.field_tags);
    if (flags.viewport) config.layout.viewport_width = *flags.viewport;
    if (flags.format) apply_setting(config, "format", *flags.format);
    if (flags.timeout) apply_setting(config, "fetch_timeout", std::to_string(*flags.timeout));
    if (flags.user_agent) config.user_agent = *flags.user_agent;
    config.validate();
    return config;
}

struct Input {
    std::string source;
    std::string bytes;
};

Input load_input(const std::string& input, const CliConfig& config, std::istream& in) {
    if (input.empty() || input == "-") return {"stdin", read_stream(in)};
    if (is_url(input)) {
        auto fetched = fetch_url(input, FetchOptions{config.fetch_timeout, config.user_agent});
        return {input, std::move(fetched.body)};
    }
    return {input, read_file(input)};
}

int cmd_extract(const Flags& flags, std::istream& in, std::ostream& out) {
    const auto config = resolve_config(flags);
    const auto input = load_input(flags.input, config, in);
    const auto started = std::chrono::steady_clock::now();
    const auto doc = parse_html(input.bytes, encoding_from_name(flags.encoding));
    const auto result = extract_all(layout_document(doc, config.layout), config.field_tags, config.nested_ratio);
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - started;
    std::optional<double> timing;
    if (!flags.no_timing) timing = std::round(elapsed.count() * 1000.0) / 1000.0;
    out << render_report(make_report(result, input.source, timing), config.output_format);
    return kSuccess;
}

int cmd_overlay(const Flags& flags, std::istream& in, std::ostream& out) {
    const auto config = resolve_config(flags);
    const auto input = load_input(flags.input, config, in);
    const auto doc = parse_html(input.bytes, encoding_from_name(flags.encoding));
    const auto tree = layout_document(doc, config.layout);
    try {
        const auto result = extract_all(tree, config.field_tags, config.nested_ratio);
        out << render_overlay_svg(tree, &result.region, result.records);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoChildren) throw;
        out << render_overlay_svg(tree, nullptr, {});
    }
    return kSuccess;
}

int cmd_eval(const Flags& flags, std::ostream& out) {
    const auto config = resolve_config(flags);
    const PipelineOptions options{config.layout, config.field_tags, config.nested_ratio};
    const unsigned jobs = flags.jobs ? flags.jobs : std::max(1u, std::thread::hardware_concurrency());
    const auto evaluation = evaluate_corpus(flags.input, options, jobs);
    if (flags.format && *flags.format == "json") {
        out << render_eval_json(evaluation);
    } else {
        out << render_eval_table(evaluation);
    }
    return kSuccess;
}

int cmd_fetch(const Flags& flags, std::ostream& out) {
    const auto config = resolve_config(flags);
    const auto result = fetch_url(flags.url, FetchOptions{config.fetch_timeout, config.user_agent});
    save_snapshot(result, flags.out_path);
    out << "saved " << result.body.size() << " bytes from " << result.final_url << " to "
        << flags.out_path << " (status " << result.status << ")\n";
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Extracts data records from listing pages using layout geometry", "recordminer"};
    app.require_subcommand(1);
    Flags flags;
    app.add_option("--config", flags.config_path, "key=value config file (default: $RECORDMINER_CONFIG)");
    app.add_option("--nested-ratio", flags.nested_ratio, "field-count ratio that marks a record nested (1.4)");
    app.add_option("--field-tags", flags.field_tags, "comma-separated field tags (td,tr,a)");
    app.add_option("--viewport", flags.viewport, "viewport width in px (1024)");
    app.add_option("--format", flags.format, "json|ndjson (extract), json (eval)");
    app.add_option("--timeout", flags.timeout, "fetch timeout in seconds (15)");
    app.add_option("--user-agent", flags.user_agent, "User-Agent for HTTP fetches");

    auto* extract = app.add_subcommand("extract", "print the data region and records of a page");
    extract->add_option("input", flags.input, "file, URL, or - for stdin");
    extract->add_option("--encoding", flags.encoding, "utf-8 or latin-1");
    extract->add_flag("--no-timing", flags.no_timing, "omit timing_ms from the report");
    extract->fallthrough();

    auto* eval = app.add_subcommand("eval", "score a corpus of <id>.html / <id>.truth.json pairs");
    eval->add_option("corpus", flags.input, "corpus directory")->required();
    eval->add_option("--jobs", flags.jobs, "pages scored in parallel (default: hardware threads)");
    eval->fallthrough();

    auto* overlay = app.add_subcommand("overlay", "render element rectangles as SVG");
    overlay->add_option("input", flags.input, "file, URL, or - for stdin");
    overlay->add_option("--encoding", flags.encoding, "utf-8 or latin-1");
    overlay->fallthrough();

    auto* fetch = app.add_subcommand("fetch", "save a page snapshot with a metadata sidecar");
    fetch->add_option("url", flags.url, "http(s) URL")->required();
    fetch->add_option("out", flags.out_path, "output file")->required();
    fetch->fallthrough();

    auto* config = app.add_subcommand("config", "print the effective configuration");
    config->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (*extract) return cmd_extract(flags, in, out);
        if (*overlay) return cmd_overlay(flags, in, out);
        if (*eval) return cmd_eval(flags, out);
        if (*fetch) return cmd_fetch(flags, out);
        if (*config) {
            out << render_config(resolve_config(flags));
            return kSuccess;
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigError) {
            err << "recordminer: " << e.what() << '\n';
        }
        out << render_error(e);
        return exit_code_for(e);
    }
    return kUsage;
}

}  // namespace recordminer::cli
