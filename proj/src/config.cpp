#include "recordminer/config.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace recordminer {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw Error(ErrorKind::ConfigError, "cli",
                "invalid value '" + std::string(value) + "' for " + std::string(key));
}

Px parse_px(std::string_view key, std::string_view value) {
    Px v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
    return v;
}

}  // namespace

void CliConfig::validate() const {
    layout.validate();
    if (nested_ratio.num <= nested_ratio.den) {
        throw Error(ErrorKind::ConfigError, "cli", "nested_ratio must be greater than 1");
    }
    if (!(fetch_timeout > 0)) throw Error(ErrorKind::ConfigError, "cli", "fetch_timeout must be positive");
}

void apply_setting(CliConfig& config, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "viewport_width" || key == "viewport") {
        config.layout.viewport_width = parse_px(key, value);
    } else if (key == "line_height") {
        config.layout.line_height = parse_px(key, value);
    } else if (key == "char_width") {
        config.layout.char_width = parse_px(key, value);
    } else if (key == "default_image_width") {
        config.layout.default_image_width = parse_px(key, value);
    } else if (key == "default_image_height") {
        config.layout.default_image_height = parse_px(key, value);
    } else if (key == "block_gap") {
        config.layout.block_gap = parse_px(key, value);
    } else if (key == "field_tags") {
        config.field_tags = FieldTagSet::parse(value);
    } else if (key == "nested_ratio") {
        config.nested_ratio = Ratio::parse(value);
    } else if (key == "format" || key == "output_format") {
        if (value == "json") {
            config.output_format = OutputFormat::Json;
        } else if (value == "ndjson") {
            config.output_format = OutputFormat::Ndjson;
        } else {
            bad_value(key, value);
        }
    } else if (key == "fetch_timeout" || key == "timeout") {
        double v = 0;
        std::istringstream in{std::string(value)};
        if (!(in >> v) || !in.eof() || !(v > 0)) bad_value(key, value);
        config.fetch_timeout = v;
    } else if (key == "user_agent") {
        config.user_agent = std::string(value);
    } else {
        throw Error(ErrorKind::ConfigError, "cli", "unknown configuration key '" + std::string(key) + "'");
    }
}

void apply_config_text(CliConfig& config, std::string_view text, std::string_view source) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        const auto where = std::string(source) + ":" + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::ConfigError, "cli", where + "expected key=value");
        }
        try {
            apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(ErrorKind::ConfigError, "cli", where + e.what());
        }
    }
    config.validate();
}

std::string render_config(const CliConfig& config) {
    std::ostringstream out;
    out << "viewport_width = " << config.layout.viewport_width << '\n'
        << "line_height = " << config.layout.line_height << '\n'
        << "char_width = " << config.layout.char_width << '\n'
        << "default_image_width = " << config.layout.default_image_width << '\n'
        << "default_image_height = " << config.layout.default_image_height << '\n'
        << "block_gap = " << config.layout.block_gap << '\n'
        << "field_tags = " << config.field_tags.to_string() << '\n'
        << "nested_ratio = " << config.nested_ratio.to_string() << '\n'
        << "format = " << (config.output_format == OutputFormat::Json ? "json" : "ndjson") << '\n'
        << "fetch_timeout = " << config.fetch_timeout << '\n'
        << "user_agent = " << config.user_agent << '\n';
    return out.str();
}

}  // namespace recordminer
