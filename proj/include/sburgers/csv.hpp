#pragma once

#include <filesystem>
#include <fstream>
#include <string>

namespace sburgers::csv {

/// Opens `file` for CSV output: binary mode (LF endings), classic locale, 17 significant digits.
/// Creates parent directories. Throws std::runtime_error if the file cannot be opened.
std::ofstream open(const std::filesystem::path& file);

/// Shortest round-trip decimal with '.' separator; "nan" for NaN.
std::string fmt(double v);

}  // namespace sburgers::csv
