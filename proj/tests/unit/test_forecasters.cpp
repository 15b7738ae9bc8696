#include "latentcast/forecasters.hpp"

#include "latentcast/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace latentcast;
using forecast::fit_predict;
using forecast::make_method;

namespace {

std::vector<double> periodic(std::size_t n) {
	const std::vector<double> cycle{5, 7, 9, 4, 3, 8, 12, 6, 5, 10, 11, 2};
	std::vector<double> x(n);
	for (std::size_t t = 0; t < n; ++t) {
		x[t] = cycle[t % 12];
	}
	return x;
}

} // namespace

TEST_CASE("naive repeats the last value") {
	const std::vector<double> x{3, 1, 4, 1, 5, 7};
	const auto r = fit_predict(*make_method("naive"), x, 1, 3);
	REQUIRE(r.ok());
	CHECK(r.values == std::vector<double>{7, 7, 7});
}

TEST_CASE("seasonal naive continues a periodic history exactly") {
	const auto x = periodic(36);
	const auto r = fit_predict(*make_method("snaive"), x, 12, 12);
	REQUIRE(r.ok());
	const auto next = periodic(48);
	CHECK(r.values == std::vector<double>(next.begin() + 36, next.end()));
}

TEST_CASE("AR(1) recovers its coefficient") {
	std::mt19937_64 rng(8);
	std::normal_distribution<double> eps(0.0, 0.1);
	std::vector<double> x{1.0};
	for (int t = 1; t < 60; ++t) {
		x.push_back(0.8 * x.back() + eps(rng));
	}
	forecast::ArForecaster ar(6, 1);
	ar.fit(x, 1);
	REQUIRE(ar.order() == 1);
	CHECK(ar.coefficients()[0] == doctest::Approx(0.8).epsilon(0.125));
	forecast::ArForecaster automatic;
	automatic.fit(x, 1);
	CHECK(automatic.order() >= 1);
}

TEST_CASE("every method forecasts a constant series as that constant") {
	const std::vector<double> x(48, 42.0);
	for (const auto& name : forecast::builtin_method_names()) {
		CAPTURE(name);
		const auto r = fit_predict(*make_method(name), x, 12, 6);
		REQUIRE(r.ok());
		for (double v : r.values) {
			CHECK(v == doctest::Approx(42.0).epsilon(1e-9));
		}
	}
}

TEST_CASE("forecasts have length h, are finite and deterministic") {
	std::mt19937_64 rng(14);
	std::normal_distribution<double> n01;
	for (int trial = 0; trial < 5; ++trial) {
		std::vector<double> x;
		for (int t = 0; t < 40; ++t) {
			x.push_back(50.0 + 10.0 * std::sin(t * 0.52) + 3.0 * n01(rng) + (trial == 4 ? -60.0 : 0.0));
		}
		for (const auto& name : forecast::builtin_method_names()) {
			CAPTURE(name);
			const auto a = fit_predict(*make_method(name), x, 12, 9);
			const auto b = fit_predict(*make_method(name), x, 12, 9);
			CHECK(a.values == b.values);
			CHECK(a.inapplicable == b.inapplicable);
			if (a.ok()) {
				REQUIRE(a.values.size() == 9);
				for (double v : a.values) {
					CHECK(std::isfinite(v));
				}
			}
		}
	}
}

TEST_CASE("short or unsuitable histories are inapplicable") {
	CHECK_FALSE(fit_predict(*make_method("snaive"), std::vector<double>{1, 2, 3}, 12, 2).ok());
	CHECK_FALSE(fit_predict(*make_method("hw_additive"), std::vector<double>(20, 1.0), 12, 2).ok());
	auto negative = periodic(48);
	negative[5] = -1.0;
	CHECK_FALSE(fit_predict(*make_method("hw_multiplicative"), negative, 12, 2).ok());
	CHECK_FALSE(fit_predict(*make_method("ses_boxcox"), negative, 12, 2).ok());
	CHECK_FALSE(fit_predict(*make_method("mean"), std::vector<double>{1.0, std::nan("")}, 1, 2).ok());
	CHECK_FALSE(fit_predict(*make_method("mean"), std::vector<double>{}, 1, 2).ok());
}

TEST_CASE("predict before fit is a logic error") {
	const auto m = make_method("mean");
	CHECK_THROWS_AS(m->predict(3), std::logic_error);
}

TEST_CASE("unknown names and parameters are rejected") {
	CHECK_THROWS_AS(make_method("arima"), std::invalid_argument);
	CHECK_THROWS_AS(make_method("mean", {{"order", 2}}), std::invalid_argument);
	CHECK_NOTHROW(make_method("ar", {{"max_order", 3}}));
	CHECK_NOTHROW(make_method("holt_damped", {{"phi", 0.9}}));
}

TEST_CASE("menus keep order and unique names") {
	const auto menu = forecast::MethodMenu::builtin();
	CHECK(menu.names() == forecast::builtin_method_names());
	CHECK(menu.find("snaive") == 3);
	CHECK(menu.find("nope") == menu.size());
	CHECK_THROWS(forecast::MethodMenu::from_names({"mean", "mean", "naive", "drift"}));
	CHECK_THROWS(forecast::MethodMenu::from_names({"mean", "naive"}).require_at_least(4));
	CHECK_THROWS(forecast::MethodMenu::from_names({"mean", "naive", "drift", "ses"}, {{"ar", {{"max_order", 2}}}}));
}

TEST_CASE("Box-Cox round-trip on random positive vectors") {
	std::mt19937_64 rng(31);
	std::uniform_real_distribution<double> u(0.01, 1000.0);
	std::uniform_real_distribution<double> lam(-1.0, 2.0);
	double worst = 0.0;
	for (int trial = 0; trial < 200; ++trial) {
		std::vector<double> x(25);
		for (auto& v : x) v = u(rng);
		const double l = trial % 10 == 0 ? 0.0 : lam(rng);
		const auto back = forecast::boxcox_inverse(forecast::boxcox_transform(x, l), l);
		for (std::size_t i = 0; i < x.size(); ++i) {
			worst = std::max(worst, std::abs(back[i] - x[i]) / x[i]);
		}
	}
	CHECK(worst < 1e-9);
}

TEST_CASE("Box-Cox of a constant series round-trips exactly") {
	const std::vector<double> x(30, 5.0);
	const auto r = forecast::boxcox(x, 12);
	for (double v : r.values) {
		CHECK(v == r.values.front());
	}
	CHECK(forecast::boxcox_inverse(r.values, r.lambda) == x);
}

TEST_CASE("exponential growth selects lambda near zero") {
	std::vector<double> x;
	for (int t = 0; t < 60; ++t) {
		x.push_back(10.0 * std::exp(0.05 * t) * (1.0 + 0.02 * std::sin(t * 0.523599)));
	}
	const double l = forecast::guerrero_lambda(x, 12);
	// Grid oracle: coefficient of variation of sd / mean^(1 - lambda) over yearly groups.
	auto cv = [&](double lambda) {
		std::vector<double> ratio;
		for (std::size_t g = 0; g + 12 <= x.size(); g += 12) {
			double mu = 0.0;
			for (std::size_t j = 0; j < 12; ++j) mu += x[g + j];
			mu /= 12.0;
			double ss = 0.0;
			for (std::size_t j = 0; j < 12; ++j) ss += (x[g + j] - mu) * (x[g + j] - mu);
			ratio.push_back(std::sqrt(ss / 11.0) / std::pow(mu, 1.0 - lambda));
		}
		double m = 0.0;
		for (double r : ratio) m += r;
		m /= static_cast<double>(ratio.size());
		double s = 0.0;
		for (double r : ratio) s += (r - m) * (r - m);
		return std::sqrt(s / static_cast<double>(ratio.size() - 1)) / m;
	};
	double best = -1.0;
	double best_cv = std::numeric_limits<double>::infinity();
	for (int i = 0; i <= 300; ++i) {
		const double lambda = -1.0 + 0.01 * i;
		if (cv(lambda) < best_cv) {
			best_cv = cv(lambda);
			best = lambda;
		}
	}
	CHECK(std::abs(best) < 0.2);
	CHECK(l == doctest::Approx(best).epsilon(0.02).scale(1.0));
	CHECK(std::abs(l) < 0.2);
}

TEST_CASE("Box-Cox with lambda 1 is a shift of the inner method") {
	std::mt19937_64 rng(3);
	std::uniform_real_distribution<double> u(20.0, 80.0);
	std::vector<double> x(40);
	for (auto& v : x) v = u(rng);
	for (const std::string name : {"mean", "naive", "drift", "ses", "theta"}) {
		CAPTURE(name);
		const auto plain = fit_predict(*make_method(name), x, 12, 5);
		const auto wrapped = fit_predict(*make_method(name + "_boxcox", {{"lambda", 1.0}}), x, 12, 5);
		REQUIRE(plain.ok());
		REQUIRE(wrapped.ok());
		for (std::size_t j = 0; j < 5; ++j) {
			CHECK(wrapped.values[j] == doctest::Approx(plain.values[j]).epsilon(1e-12));
		}
	}
}

TEST_CASE("Holt-Winters follows a seasonal pattern of its own form") {
	auto additive = [](double t) { return 100.0 + t + 10.0 * std::sin(t * 0.523599); };
	auto multiplicative = [](double t) { return (100.0 + t) * (1.0 + 0.1 * std::sin(t * 0.523599)); };
	for (const std::string name : {"hw_additive", "hw_multiplicative"}) {
		CAPTURE(name);
		const auto truth = [&](double t) { return name == "hw_additive" ? additive(t) : multiplicative(t); };
		std::vector<double> x;
		for (int t = 0; t < 48; ++t) {
			x.push_back(truth(t));
		}
		const auto r = fit_predict(*make_method(name), x, 12, 12);
		REQUIRE(r.ok());
		for (std::size_t j = 0; j < 12; ++j) {
			CHECK(r.values[j] == doctest::Approx(truth(48.0 + static_cast<double>(j))).epsilon(0.015));
		}
	}
}

TEST_CASE("drift extends the line through the end points") {
	const auto r = fit_predict(*make_method("drift"), std::vector<double>{1, 5, 2, 7}, 1, 2);
	CHECK(r.values[0] == doctest::Approx(9.0));
	CHECK(r.values[1] == doctest::Approx(11.0));
}
