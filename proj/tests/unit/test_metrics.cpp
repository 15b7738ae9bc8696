#include "latentcast/metrics.hpp"

#include "../oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace latentcast;

TEST_CASE("smape hand-evaluated cases") {
	const std::vector<double> y{100, 200};
	const std::vector<double> f{110, 190};
	CHECK(metrics::smape(y, f) == doctest::Approx((10.0 / 210.0 + 10.0 / 390.0) * 100.0).epsilon(1e-12));
	CHECK(metrics::smape(y, f) == doctest::Approx(7.3260).epsilon(1e-4));
	CHECK(metrics::smape(y, y) == 0.0);
	CHECK(metrics::smape(std::vector<double>{0.0}, std::vector<double>{3.0}) == 200.0);
	CHECK(metrics::smape(std::vector<double>{0.0, 5.0}, std::vector<double>{0.0, 5.0}) == 0.0);
}

TEST_CASE("smape input errors") {
	CHECK_THROWS_AS(metrics::smape(std::vector<double>{1, 2}, std::vector<double>{1}), metrics::MetricError);
	CHECK_THROWS_AS(metrics::smape(std::vector<double>{}, std::vector<double>{}), metrics::MetricError);
}

TEST_CASE("mase hand-evaluated cases") {
	std::vector<double> insample(24);
	for (int i = 0; i < 24; ++i) {
		insample[static_cast<std::size_t>(i)] = i + 1;
	}
	const auto m = metrics::mase(std::vector<double>{25}, std::vector<double>{24}, insample, 12);
	REQUIRE(m.has_value());
	CHECK(*m == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
	CHECK(*metrics::mase(std::vector<double>{25}, std::vector<double>{25}, insample, 12) == 0.0);
}

TEST_CASE("mase of a seasonal-naive continuation of a periodic series is zero") {
	std::vector<double> x;
	for (int t = 0; t < 48; ++t) {
		x.push_back(10.0 + (t % 4) + 0.5 * (t % 12));
	}
	std::vector<double> insample(x.begin(), x.begin() + 36);
	insample[0] += 1.0; // one nonzero seasonal difference
	const std::vector<double> actual(x.begin() + 36, x.end());
	const std::vector<double> forecast(x.begin() + 24, x.begin() + 36);
	CHECK(*metrics::mase(actual, forecast, insample, 12) == 0.0);
}

TEST_CASE("constant seasonal differences make mase degenerate") {
	const std::vector<double> flat(30, 4.0);
	CHECK_FALSE(metrics::mase(std::vector<double>{5}, std::vector<double>{4}, flat, 12).has_value());
	CHECK_FALSE(metrics::mase_scale(std::vector<double>{1, 2}, 12).has_value());
}

TEST_CASE("metric properties on random cases") {
	std::mt19937_64 rng(23);
	std::uniform_real_distribution<double> u(1.0, 100.0);
	std::uniform_real_distribution<double> scale(0.01, 100.0);
	for (int trial = 0; trial < 100; ++trial) {
		const std::size_t h = 1 + static_cast<std::size_t>(trial % 12);
		std::vector<double> y(h);
		std::vector<double> f(h);
		std::vector<double> ins(30);
		for (auto& v : y) v = u(rng);
		for (auto& v : f) v = u(rng);
		for (auto& v : ins) v = u(rng);
		const double s = metrics::smape(y, f);
		CHECK(s >= 0.0);
		CHECK(s <= 200.0);
		CHECK(metrics::smape(f, y) == doctest::Approx(s).epsilon(1e-14));
		CHECK(s == doctest::Approx(oracle::smape(y, f)).epsilon(1e-12));
		const double m = *metrics::mase(y, f, ins, 12);
		CHECK(m == doctest::Approx(oracle::mase(y, f, ins, 12)).epsilon(1e-12));

		const double c = scale(rng);
		auto yc = y;
		auto fc = f;
		auto ic = ins;
		for (auto& v : yc) v *= c;
		for (auto& v : fc) v *= c;
		for (auto& v : ic) v *= c;
		CHECK(metrics::smape(yc, fc) == doctest::Approx(s).epsilon(1e-12));
		CHECK(*metrics::mase(yc, fc, ic, 12) == doctest::Approx(m).epsilon(1e-12));

		std::vector<std::size_t> perm(h);
		for (std::size_t i = 0; i < h; ++i) perm[i] = i;
		std::shuffle(perm.begin(), perm.end(), rng);
		std::vector<double> yp(h);
		std::vector<double> fp(h);
		for (std::size_t i = 0; i < h; ++i) {
			yp[i] = y[perm[i]];
			fp[i] = f[perm[i]];
		}
		CHECK(metrics::smape(yp, fp) == doctest::Approx(s).epsilon(1e-12));
		CHECK(*metrics::mase(yp, fp, ins, 12) == doctest::Approx(m).epsilon(1e-12));
	}
}

TEST_CASE("owa cases") {
	CHECK(metrics::owa(12.0, 1.1, 12.0, 1.1).owa == 1.0);
	CHECK(metrics::owa(24.0, 2.2, 12.0, 1.1).owa == doctest::Approx(2.0).epsilon(1e-15));
	CHECK_THROWS_AS(metrics::owa(1.0, 1.0, 0.0, 1.0), metrics::MetricError);
}

TEST_CASE("published table rows are consistent under one Naive2 reference") {
	// Solve 1/sMAPE_n2 and 1/MASE_n2 from two rows, then check a third.
	const double s1 = 8.22, m1 = 0.49, o1 = 0.58;
	const double s2 = 9.12, m2 = 0.56, o2 = 0.65;
	const double det = s1 * m2 - m1 * s2;
	const double a = (2 * o1 * m2 - m1 * 2 * o2) / det;
	const double b = (s1 * 2 * o2 - s2 * 2 * o1) / det;
	const double smape_n2 = 1.0 / a;
	const double mase_n2 = 1.0 / b;
	CHECK(metrics::owa(s1, m1, smape_n2, mase_n2).owa == doctest::Approx(o1).epsilon(1e-9));
	CHECK(metrics::owa(8.73, 0.50, smape_n2, mase_n2).owa == doctest::Approx(0.61).epsilon(0.01));
}

TEST_CASE("naive2 cases") {
	CHECK(metrics::naive2(std::vector<double>(40, 7.0), 12, 5) == std::vector<double>(5, 7.0));

	std::vector<double> factors{0.8, 0.9, 1.0, 1.1, 1.3, 1.2, 1.0, 0.9, 0.85, 0.95, 1.05, 0.95};
	std::vector<double> x;
	for (int t = 0; t < 48; ++t) {
		x.push_back(100.0 * factors[static_cast<std::size_t>(t % 12)]);
	}
	const auto fc = metrics::naive2(x, 12, 12);
	for (std::size_t j = 0; j < 12; ++j) {
		CHECK(fc[j] == doctest::Approx(x[36 + j]).epsilon(1e-9));
	}
	const auto oracle_fc = oracle::naive2(x, 12, 12);
	for (std::size_t j = 0; j < 12; ++j) {
		CHECK(fc[j] == doctest::Approx(oracle_fc[j]).epsilon(1e-12));
	}

	const std::vector<double> shorter(x.begin(), x.begin() + 35);
	CHECK(metrics::naive2(shorter, 12, 3) == std::vector<double>(3, shorter.back()));
}

TEST_CASE("naive2 on a non-seasonal series is last-value naive") {
	std::mt19937_64 rng(2);
	std::normal_distribution<double> n01;
	for (int trial = 0; trial < 20; ++trial) {
		std::vector<double> x;
		double level = 50.0;
		for (int t = 0; t < 60; ++t) {
			level += n01(rng);
			x.push_back(level);
		}
		if (metrics::seasonality_test(x, 12)) {
			continue;
		}
		CHECK(metrics::naive2(x, 12, 6) == std::vector<double>(6, x.back()));
	}
}

TEST_CASE("decomposition figure matches the oracle") {
	std::mt19937_64 rng(4);
	std::uniform_real_distribution<double> u(50.0, 150.0);
	std::vector<double> x(50);
	for (auto& v : x) v = u(rng);
	for (std::size_t m : {4u, 7u, 12u}) {
		const auto d = metrics::decompose_multiplicative(x, m);
		const auto fig = oracle::seasonal_figure(x, m);
		for (std::size_t j = 0; j < m; ++j) {
			CHECK(d.figure[j] == doctest::Approx(fig[j]).epsilon(1e-12));
		}
	}
}

TEST_CASE("evaluate aggregates over non-degenerate series") {
	std::vector<metrics::SeriesScore> method{{"a", 10.0, 1.0, "", false}, {"b", 20.0, std::nullopt, "", false}};
	std::vector<metrics::SeriesScore> ref{{"a", 20.0, 2.0, "", false}, {"b", 20.0, std::nullopt, "", false}};
	const auto rep = metrics::evaluate("m", method, ref);
	CHECK(rep.aggregate.smape == 15.0);
	CHECK(rep.aggregate.degenerate == 1);
	REQUIRE(rep.owa.has_value());
	CHECK(rep.owa->owa == doctest::Approx(0.5));
	const auto self = metrics::evaluate("n2", ref, ref);
	CHECK(self.owa->owa == 1.0);
}
