#include "latentcast/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace latentcast::io {

namespace {

std::string_view trim(std::string_view s) {
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
		s.remove_prefix(1);
	}
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
		s.remove_suffix(1);
	}
	if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
		s = s.substr(1, s.size() - 2);
	}
	return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
	std::vector<std::string_view> cells;
	std::size_t start = 0;
	while (true) {
		const std::size_t comma = line.find(',', start);
		if (comma == std::string_view::npos) {
			cells.push_back(trim(line.substr(start)));
			break;
		}
		cells.push_back(trim(line.substr(start, comma - start)));
		start = comma + 1;
	}
	return cells;
}

bool is_missing(std::string_view cell) {
	return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

bool looks_numeric(std::string_view cell) {
	try {
		parse_double(cell);
		return true;
	} catch (const std::invalid_argument&) {
		return false;
	}
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in) {
		throw DataError("cannot open " + path.string());
	}
	return in;
}

} // namespace

double parse_double(std::string_view text) {
	if (!text.empty() && text.front() == '+') {
		text.remove_prefix(1);
	}
	double v = 0.0;
	const auto* end = text.data() + text.size();
	const auto res = std::from_chars(text.data(), end, v);
	if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
		throw std::invalid_argument("not a number: '" + std::string(text) + "'");
	}
	return v;
}

std::string format_double(double v) {
	char buf[64];
	const auto res = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, res.ptr);
}

SeriesMatrix read_panel(std::istream& in, std::size_t period, const std::string& source) {
	std::vector<std::string> ids;
	std::vector<std::vector<double>> rows;
	std::vector<std::vector<std::uint8_t>> masks;
	std::string line;
	std::size_t line_no = 0;
	bool first_content = true;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty()) {
			continue;
		}
		const auto cells = split_cells(line);
		if (first_content) {
			first_content = false;
			// Header only if every non-empty value cell is non-numeric.
			bool header = false;
			for (std::size_t c = 1; c < cells.size(); ++c) {
				if (is_missing(cells[c])) {
					continue;
				}
				if (looks_numeric(cells[c])) {
					header = false;
					break;
				}
				header = true;
			}
			if (header) {
				continue;
			}
		}
		if (cells.front().empty()) {
			throw DataError(source + ":" + std::to_string(line_no) + ": empty series id");
		}
		std::size_t last = cells.size();
		while (last > 1 && is_missing(cells[last - 1])) {
			--last;
		}
		std::vector<double> values;
		std::vector<std::uint8_t> mask;
		for (std::size_t c = 1; c < last; ++c) {
			if (is_missing(cells[c])) {
				values.push_back(std::numeric_limits<double>::quiet_NaN());
				mask.push_back(0);
				continue;
			}
			double v = 0.0;
			try {
				v = parse_double(cells[c]);
			} catch (const std::invalid_argument&) {
				throw DataError(source + ":" + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
				                ": malformed number '" + std::string(cells[c]) + "'");
			}
			if (!std::isfinite(v)) {
				throw DataError(source + ":" + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
				                ": non-finite value");
			}
			values.push_back(v);
			mask.push_back(1);
		}
		ids.emplace_back(cells.front());
		rows.push_back(std::move(values));
		masks.push_back(std::move(mask));
	}
	if (rows.empty()) {
		throw DataError(source + ": empty dataset");
	}
	std::size_t width = 0;
	for (const auto& r : rows) {
		width = std::max(width, r.size());
	}
	if (width == 0) {
		throw DataError(source + ": no observations in any series");
	}
	std::vector<double> values(rows.size() * width, std::numeric_limits<double>::quiet_NaN());
	std::vector<std::uint8_t> mask(rows.size() * width, 0);
	for (std::size_t i = 0; i < rows.size(); ++i) {
		std::copy(rows[i].begin(), rows[i].end(), values.begin() + static_cast<std::ptrdiff_t>(i * width));
		std::copy(masks[i].begin(), masks[i].end(), mask.begin() + static_cast<std::ptrdiff_t>(i * width));
	}
	return SeriesMatrix(rows.size(), width, std::move(values), std::move(mask), std::move(ids), period);
}

SeriesMatrix read_panel(const std::filesystem::path& path, std::size_t period) {
	auto in = open_or_throw(path);
	return read_panel(in, period, path.string());
}

std::map<std::string, std::string> read_metadata(std::istream& in, const std::string& source) {
	std::map<std::string, std::string> out;
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty()) {
			continue;
		}
		const auto cells = split_cells(line);
		if (cells.size() < 2) {
			throw DataError(source + ":" + std::to_string(line_no) + ": expected id,category");
		}
		if (out.empty() && line_no == 1 && cells[0] == "id") {
			continue;
		}
		out[std::string(cells[0])] = std::string(cells[1]);
	}
	return out;
}

std::map<std::string, std::string> read_metadata(const std::filesystem::path& path) {
	auto in = open_or_throw(path);
	return read_metadata(in, path.string());
}

void write_panel(std::ostream& out, const SeriesMatrix& m, const std::string& column_prefix) {
	out << "id";
	for (std::size_t t = 0; t < m.cols(); ++t) {
		out << ',' << column_prefix << (t + 1);
	}
	out << '\n';
	for (std::size_t i = 0; i < m.rows(); ++i) {
		out << m.id(i);
		for (std::size_t t = 0; t < m.cols(); ++t) {
			out << ',';
			if (m.observed(i, t)) {
				out << format_double(m.value(i, t));
			}
		}
		out << '\n';
	}
}

void write_panel(const std::filesystem::path& path, const SeriesMatrix& m, const std::string& column_prefix) {
	std::ofstream out(path);
	if (!out) {
		throw DataError("cannot write " + path.string());
	}
	write_panel(out, m, column_prefix);
}

} // namespace latentcast::io
