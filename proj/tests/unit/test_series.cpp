#include "latentcast/series.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace latentcast;

namespace {

SeriesMatrix ramp(std::size_t rows, std::size_t cols) {
	std::vector<std::vector<double>> data(rows, std::vector<double>(cols));
	for (std::size_t i = 0; i < rows; ++i) {
		for (std::size_t t = 0; t < cols; ++t) {
			data[i][t] = static_cast<double>(100 * i + t + 1);
		}
	}
	return SeriesMatrix::from_rows(data);
}

// Brute-force slicer: trailing window of a fully observed row.
std::vector<double> slice(const SeriesMatrix& m, std::size_t i, std::size_t first, std::size_t last) {
	std::vector<double> out;
	for (std::size_t t = first; t < last; ++t) {
		out.push_back(m.value(i, t));
	}
	return out;
}

std::vector<double> row_vec(const SeriesMatrix& m, std::size_t i) {
	const auto r = m.row(i);
	return {r.begin(), r.end()};
}

} // namespace

TEST_CASE("split of a 72-column panel keeps 60 train and 12 test columns") {
	const auto m = ramp(2, 72);
	const auto parts = split(m, {60, 12});
	REQUIRE(parts.train.cols() == 60);
	REQUIRE(parts.test.cols() == 12);
	CHECK(row_vec(parts.train, 1) == slice(m, 1, 0, 60));
	CHECK(row_vec(parts.test, 1) == slice(m, 1, 60, 72));
}

TEST_CASE("split of a 13-point series leaves one training column") {
	const auto parts = split(ramp(1, 13), {60, 12});
	CHECK(parts.train.cols() == 1);
	CHECK(parts.test.cols() == 12);
	CHECK(parts.train.value(0, 0) == 1.0);
}

TEST_CASE("split of a 100-point series takes columns 29..88 and 89..100") {
	const auto m = ramp(1, 100);
	const auto parts = split(m, {60, 12});
	CHECK(row_vec(parts.train, 0) == slice(m, 0, 28, 88));
	CHECK(row_vec(parts.test, 0) == slice(m, 0, 88, 100));
}

TEST_CASE("split then concatenation reproduces the trailing window") {
	const auto m = ramp(3, 90);
	const auto parts = split(m, {50, 7});
	for (std::size_t i = 0; i < 3; ++i) {
		auto joined = row_vec(parts.train, i);
		const auto test = row_vec(parts.test, i);
		joined.insert(joined.end(), test.begin(), test.end());
		CHECK(joined == slice(m, i, 90 - 57, 90));
	}
}

TEST_CASE("series with at most h points are rejected by id") {
	const auto m = SeriesMatrix::from_rows({{1, 2, 3}}, {"short"});
	CHECK_THROWS_WITH_AS(split(m, {60, 3}), doctest::Contains("short"), DataError);
	const auto both = SeriesMatrix::from_rows({{1, 2, 3, 0}, {1, 2, 3, 4}}, {"short", "ok"});
	auto values = both.values();
	auto mask = both.mask();
	mask[0] = 0;
	values[0] = std::nan("");
	const SeriesMatrix ragged(2, 4, values, mask, both.ids(), 1);
	CHECK_THROWS_WITH_AS(split(ragged, {60, 3}), doctest::Contains("short"), DataError);
	const auto lenient = split_lenient(ragged, {60, 3});
	REQUIRE(lenient.rejected.size() == 1);
	CHECK(lenient.rejected[0].id == "short");
}

TEST_CASE("ragged rows are right-aligned on their last observation") {
	const double nan = std::numeric_limits<double>::quiet_NaN();
	std::vector<double> values{1, 2, 3, 4, 5, 6, 10, 20, 30, nan, nan, nan};
	std::vector<std::uint8_t> mask{1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0};
	SeriesMatrix m(2, 6, values, mask, {"a", "b"}, 1);
	const auto parts = split(m, {4, 2});
	CHECK(parts.test.value(0, 0) == 5.0);
	CHECK(parts.test.value(1, 0) == 20.0);
	CHECK(parts.test.value(1, 1) == 30.0);
	CHECK(parts.train.value(1, parts.train.cols() - 1) == 10.0);
	CHECK_FALSE(parts.train.observed(1, 0));
}

TEST_CASE("reconstruct computes inner products") {
	Eigen::MatrixXd f(1, 2);
	f << 2, 3;
	Eigen::MatrixXd x(1, 3);
	x << 1, 2, 3;
	const auto y = reconstruct(f, x);
	CHECK(row_vec(y, 0) == std::vector<double>{2, 4, 6});
	CHECK(row_vec(y, 1) == std::vector<double>{3, 6, 9});
	CHECK(y.fully_observed());

	const auto zero = reconstruct(Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Random(2, 4));
	for (double v : zero.values()) {
		CHECK(v == 0.0);
	}

	const Eigen::MatrixXd xr = Eigen::MatrixXd::Random(3, 5);
	const auto ident = reconstruct(Eigen::MatrixXd::Identity(3, 3), xr);
	for (std::size_t i = 0; i < 3; ++i) {
		for (std::size_t t = 0; t < 5; ++t) {
			CHECK(ident.value(i, t) == xr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)));
		}
	}
}

TEST_CASE("reconstruct entries equal the explicit inner product") {
	std::mt19937_64 rng(5);
	std::normal_distribution<double> n01;
	Eigen::MatrixXd f(4, 6);
	Eigen::MatrixXd x(4, 9);
	for (Eigen::Index i = 0; i < f.size(); ++i) {
		f.data()[i] = n01(rng);
	}
	for (Eigen::Index i = 0; i < x.size(); ++i) {
		x.data()[i] = n01(rng);
	}
	const auto y = reconstruct(f, x);
	for (Eigen::Index i = 0; i < 6; ++i) {
		for (Eigen::Index t = 0; t < 9; ++t) {
			const double expect = f.col(i).dot(x.col(t));
			CHECK(std::abs(y.value(static_cast<std::size_t>(i), static_cast<std::size_t>(t)) - expect) <=
			      4 * std::numeric_limits<double>::epsilon() * (1.0 + f.col(i).cwiseAbs().dot(x.col(t).cwiseAbs())));
		}
	}
	CHECK_THROWS(reconstruct(Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(3, 3)));
}

TEST_CASE("construction rejects invalid panels") {
	CHECK_THROWS_AS(SeriesMatrix::from_rows({{1, 2}, {3, 4}}, {"a", "a"}), DataError);
	CHECK_THROWS_AS(SeriesMatrix(1, 2, {1.0, std::nan("")}, {1, 1}, {"a"}, 1), DataError);
	CHECK_THROWS_AS(SeriesMatrix(1, 2, {1.0}, {1, 1}, {"a"}, 1), DataError);
}

TEST_CASE("views expose observed values and the trailing segment") {
	const double nan = std::numeric_limits<double>::quiet_NaN();
	SeriesMatrix m(1, 6, {1, 2, nan, 4, 5, 6}, {1, 1, 0, 1, 1, 1}, {"a"}, 3);
	const auto v = m.view(0);
	CHECK(v.observed_count() == 5);
	CHECK(v.observed_values() == std::vector<double>{1, 2, 4, 5, 6});
	CHECK(v.trailing_segment() == std::vector<double>{4, 5, 6});
	CHECK(v.period() == 3);
}
