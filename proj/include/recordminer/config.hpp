#pragma once

#include <string>
#include <string_view>

#include "recordminer/layout.hpp"
#include "recordminer/records.hpp"
#include "recordminer/report.hpp"

namespace recordminer {

struct CliConfig {
    LayoutConfig layout;
    FieldTagSet field_tags;
    Ratio nested_ratio;
    OutputFormat output_format = OutputFormat::Json;
    double fetch_timeout = 15;
    std::string user_agent = "recordminer/1.0";

    void validate() const;  // throws ConfigError
};

/// Sets one key (see `render_config` for the key names). Throws ConfigError.
void apply_setting(CliConfig& config, std::string_view key, std::string_view value);

/// `key = value` lines; blank lines and `#` comments are skipped.
void apply_config_text(CliConfig& config, std::string_view text, std::string_view source);

/// Effective configuration in the same key=value format.
std::string render_config(const CliConfig& config);

}  // namespace recordminer
