#pragma once

#include <string>

namespace nldiff {

/// shortest exact decimal form of a double (round-trips bit-exactly)
std::string format_double(double v);

/// Write via a temp file in the same directory and rename into place, so
/// a failed run never leaves a partial output.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace nldiff
