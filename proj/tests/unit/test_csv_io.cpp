#include "latentcast/csv_io.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace latentcast;

TEST_CASE("a plain row becomes fully observed points") {
	std::istringstream in("M1,1,2,3\n");
	const auto m = io::read_panel(in, 12);
	REQUIRE(m.rows() == 1);
	CHECK(m.id(0) == "M1");
	CHECK(m.observed_count(0) == 3);
	CHECK(m.period() == 12);
}

TEST_CASE("trailing empty cells are masked out") {
	std::istringstream in("V1,V2,V3,V4\nA,1,2,3,4\nB,5,6,,\n");
	const auto m = io::read_panel(in, 1);
	REQUIRE(m.rows() == 2);
	REQUIRE(m.cols() == 4);
	CHECK(m.observed_count(1) == 2);
	CHECK_FALSE(m.observed(1, 2));
	CHECK_FALSE(m.observed(1, 3));
}

TEST_CASE("NA tokens and quoted cells are accepted") {
	std::istringstream in("\"X\",\"1.5\",NA,NaN,2\n");
	const auto m = io::read_panel(in, 1);
	CHECK(m.id(0) == "X");
	CHECK(m.value(0, 0) == 1.5);
	CHECK_FALSE(m.observed(0, 1));
	CHECK_FALSE(m.observed(0, 2));
	CHECK(m.value(0, 3) == 2.0);
}

TEST_CASE("malformed cells name line and column") {
	std::istringstream in("A,1,2\nB,3,oops\n");
	CHECK_THROWS_WITH_AS(io::read_panel(in, 1, "data.csv"), doctest::Contains("data.csv:2, column 3"), DataError);
}

TEST_CASE("an empty file is an error") {
	std::istringstream in("");
	CHECK_THROWS_AS(io::read_panel(in, 1), DataError);
}

TEST_CASE("values and mask round-trip through the writer bit-exactly") {
	std::mt19937_64 rng(17);
	std::normal_distribution<double> n01;
	std::bernoulli_distribution hole(0.2);
	const std::size_t rows = 7;
	const std::size_t cols = 11;
	std::vector<double> values(rows * cols);
	std::vector<std::uint8_t> mask(rows * cols);
	std::vector<std::string> ids;
	for (std::size_t i = 0; i < rows; ++i) {
		ids.push_back("S" + std::to_string(i));
		for (std::size_t t = 0; t < cols; ++t) {
			const bool seen = t == 0 || !hole(rng);
			mask[i * cols + t] = seen ? 1 : 0;
			values[i * cols + t] = seen ? n01(rng) * std::pow(10.0, n01(rng) * 3) : std::numeric_limits<double>::quiet_NaN();
		}
	}
	const SeriesMatrix m(rows, cols, values, mask, ids, 4);
	std::stringstream buf;
	io::write_panel(buf, m);
	const auto back = io::read_panel(buf, 4);
	REQUIRE(back.rows() == rows);
	for (std::size_t i = 0; i < rows; ++i) {
		CHECK(back.id(i) == m.id(i));
		for (std::size_t t = 0; t < back.cols(); ++t) {
			CHECK(back.observed(i, t) == m.observed(i, t));
			if (m.observed(i, t)) {
				CHECK(back.value(i, t) == m.value(i, t));
			}
		}
		for (std::size_t t = back.cols(); t < cols; ++t) {
			CHECK_FALSE(m.observed(i, t));
		}
	}
}

TEST_CASE("format_double is shortest round-trip") {
	for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, 123456789.0}) {
		CHECK(io::parse_double(io::format_double(v)) == v);
	}
	CHECK(io::format_double(0.1) == "0.1");
	CHECK_THROWS(io::parse_double("1.0x"));
}

TEST_CASE("metadata with and without header") {
	std::istringstream with("id,category\nM1,Micro\nM2,Finance\n");
	const auto a = io::read_metadata(with);
	CHECK(a.at("M1") == "Micro");
	CHECK(a.size() == 2);
	std::istringstream without("M3,Macro\n");
	CHECK(io::read_metadata(without).at("M3") == "Macro");
}

TEST_CASE("a 48000-row monthly file parses quickly") {
	std::ostringstream text;
	std::mt19937_64 rng(1);
	std::uniform_real_distribution<double> u(100.0, 10000.0);
	for (int i = 0; i < 48000; ++i) {
		text << 'M' << i;
		const int len = 42 + i % 60;
		for (int t = 0; t < len; ++t) {
			text << ',' << io::format_double(std::round(u(rng) * 100.0) / 100.0);
		}
		text << '\n';
	}
	std::istringstream in(text.str());
	const auto t0 = std::chrono::steady_clock::now();
	const auto m = io::read_panel(in, 12);
	const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
	CHECK(m.rows() == 48000);
	CHECK(secs < 10.0);
}
