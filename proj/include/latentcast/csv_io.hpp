#pragma once

#include "latentcast/series.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace latentcast::io {

/**
 * @brief Reads an M4-style panel: one series per row, id first, then values.
 *
 * Rows may be ragged; empty, "NA" and "NaN" cells are unobserved. Cells may be
 * double-quoted. A first row whose value cells are not numeric is taken as a
 * header and skipped. Malformed cells raise DataError with line and column.
 */
SeriesMatrix read_panel(std::istream& in, std::size_t period, const std::string& source = "<stream>");
SeriesMatrix read_panel(const std::filesystem::path& path, std::size_t period);

/// id -> category. A header row "id,category" is optional.
std::map<std::string, std::string> read_metadata(const std::filesystem::path& path);
std::map<std::string, std::string> read_metadata(std::istream& in, const std::string& source = "<stream>");

/// Writes the panel in the format read_panel() accepts, unobserved cells left empty.
void write_panel(std::ostream& out, const SeriesMatrix& m, const std::string& column_prefix = "V");
void write_panel(const std::filesystem::path& path, const SeriesMatrix& m, const std::string& column_prefix = "V");

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);
/// Strict full-string parse; throws std::invalid_argument.
double parse_double(std::string_view text);

} // namespace latentcast::io
