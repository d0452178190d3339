#pragma once

#include <filesystem>
#include <istream>
#include <string>

namespace recordminer {

/// Whole file as bytes. Throws InputNotFound or IoError.
std::string read_file(const std::filesystem::path& path);

std::string read_stream(std::istream& in);

void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace recordminer
