#include "latentcast/trmf.hpp"

#include "latentcast/synthetic.hpp"

#include "../oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace latentcast;

namespace {

SeriesMatrix from_dense(const Eigen::MatrixXd& y) {
	std::vector<std::vector<double>> rows(static_cast<std::size_t>(y.rows()));
	for (Eigen::Index i = 0; i < y.rows(); ++i) {
		for (Eigen::Index t = 0; t < y.cols(); ++t) {
			rows[static_cast<std::size_t>(i)].push_back(y(i, t));
		}
	}
	return SeriesMatrix::from_rows(rows);
}

trmf::TrmfConfig plain(std::size_t rank) {
	trmf::TrmfConfig c;
	c.rank = rank;
	c.lags.clear();
	c.lambda_f = 1e-10;
	c.lambda_x = 0.0;
	c.lambda_theta = 0.0;
	c.tolerance = 1e-14;
	c.max_iterations = 5000;
	c.seed = 3;
	return c;
}

} // namespace

TEST_CASE("exact rank-1 data is reconstructed") {
	Eigen::VectorXd f(5);
	f << 1, 2, -1, 0.5, 3;
	Eigen::RowVectorXd x(12);
	for (int t = 0; t < 12; ++t) {
		x(t) = std::sin(0.7 * t) + 2.0 + 0.1 * t;
	}
	const Eigen::MatrixXd y = f * x;
	const auto oracle_fit = oracle::truncated_svd(y, 1);
	CHECK((oracle_fit - y).norm() < 1e-9 * y.norm());
	const auto model = trmf::fit(from_dense(y), plain(1));
	const auto err = trmf::reconstruction_error(model, from_dense(y).with_period(1));
	CHECK(err.aggregate < 1e-6);
}

TEST_CASE("K = N reconstructs the panel") {
	const auto panel = synth::low_rank_panel(4, 10, 4, 0.3, 9);
	auto cfg = plain(4);
	cfg.lambda_f = 1e-12;
	const auto model = trmf::fit(panel.data, cfg);
	CHECK(trmf::reconstruction_error(model, panel.data).aggregate < 1e-4);
}

TEST_CASE("reconstruction error is positive below the true rank and shrinks with K") {
	Eigen::MatrixXd y = Eigen::MatrixXd::Zero(6, 8);
	for (int t = 0; t < 8; ++t) {
		y(0, t) = y(1, t) = std::cos(t * 0.9);
		y(2, t) = y(3, t) = 2.0 * std::sin(t * 1.7);
		y(4, t) = y(5, t) = 1.0 + 0.1 * t;
	}
	const auto data = from_dense(y);
	const double e1 = trmf::reconstruction_error(trmf::fit(data, plain(1)), data).aggregate;
	const double e3 = trmf::reconstruction_error(trmf::fit(data, plain(3)), data).aggregate;
	const double oracle1 = oracle::reconstruction_mase(y, oracle::truncated_svd(y, 1), 1);
	CHECK(e1 > 0.0);
	CHECK(e1 == doctest::Approx(oracle1).epsilon(1e-4));
	CHECK(e3 <= e1);
}

TEST_CASE("default configuration gives a non-increasing objective trace") {
	const auto panel = synth::latent_panel({60, 60, 12, 0.05, 4});
	trmf::TrmfConfig cfg;
	cfg.seed = 2;
	cfg.max_iterations = 200;
	const auto model = trmf::fit(panel.data, cfg);
	for (std::size_t i = 1; i < model.objective_trace.size(); ++i) {
		CHECK(model.objective_trace[i] <= model.objective_trace[i - 1] * (1.0 + 1e-12));
	}
}

TEST_CASE("every block update is monotone") {
	const auto panel = synth::low_rank_panel(15, 30, 3, 0.1, 21);
	trmf::TrmfConfig cfg;
	cfg.rank = 3;
	cfg.check_blocks = true;
	cfg.max_iterations = 30;
	SUBCASE("unconstrained") {}
	SUBCASE("nonnegative") {
		cfg.nonnegative_factors = true;
	}
	const auto model = trmf::fit(panel.data, cfg);
	REQUIRE_FALSE(model.block_trace.empty());
	for (const auto& step : model.block_trace) {
		CHECK(step.after <= step.before + 1e-10 * std::abs(step.before));
	}
	if (cfg.nonnegative_factors) {
		CHECK(model.factors.minCoeff() >= 0.0);
		CHECK(model.temporal.minCoeff() >= 0.0);
	}
}

TEST_CASE("masked cells are ignored by the fit") {
	const auto panel = synth::low_rank_panel(8, 20, 2, 0.0, 5);
	auto values = panel.data.values();
	auto mask = panel.data.mask();
	values[3] = std::numeric_limits<double>::quiet_NaN();
	mask[3] = 0;
	values[50] = std::numeric_limits<double>::quiet_NaN();
	mask[50] = 0;
	const SeriesMatrix holes(8, 20, values, mask, panel.data.ids(), 1);
	const auto model = trmf::fit(holes, plain(2));
	CHECK(model.factors.allFinite());
	CHECK(trmf::reconstruction_error(model, holes).aggregate < 1e-5);
}

TEST_CASE("objective is invariant under permuting latent dimensions") {
	const auto panel = synth::low_rank_panel(10, 25, 3, 0.1, 8);
	trmf::TrmfConfig cfg;
	cfg.rank = 3;
	cfg.max_iterations = 20;
	const auto model = trmf::fit(panel.data, cfg);
	Eigen::PermutationMatrix<Eigen::Dynamic> p(3);
	p.indices() << 2, 0, 1;
	const Eigen::MatrixXd f2 = p * model.factors;
	const Eigen::MatrixXd x2 = p * model.temporal;
	const Eigen::MatrixXd th2 = p * model.theta;
	const double a = trmf::objective(panel.data, model.factors, model.temporal, model.theta, cfg).total();
	const double b = trmf::objective(panel.data, f2, x2, th2, cfg).total();
	CHECK(b == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("ar_forecast hand cases") {
	const std::vector<std::size_t> lags{1, 2};
	Eigen::MatrixXd hist(2, 3);
	hist << 1, 2, 5, 3, 4, 7;
	Eigen::MatrixXd walk(2, 2);
	walk << 1, 0, 1, 0;
	const auto flat = trmf::ar_forecast(walk, lags, hist, 4);
	for (Eigen::Index j = 0; j < 4; ++j) {
		CHECK(flat(0, j) == 5.0);
		CHECK(flat(1, j) == 7.0);
	}
	const auto zero = trmf::ar_forecast(Eigen::MatrixXd::Zero(2, 2), lags, hist, 3);
	CHECK(zero.isZero(0.0));

	const std::vector<std::size_t> season{1, 12};
	Eigen::MatrixXd cyc(1, 24);
	for (int t = 0; t < 24; ++t) {
		cyc(0, t) = (t % 12) * (t % 12) - 3.0;
	}
	Eigen::MatrixXd th(1, 2);
	th << 0, 1;
	const auto cont = trmf::ar_forecast(th, season, cyc, 12);
	for (Eigen::Index j = 0; j < 12; ++j) {
		CHECK(cont(0, j) == cyc(0, j));
	}
}

TEST_CASE("ar_forecast over h1 + h2 equals two chained calls") {
	std::mt19937_64 rng(6);
	std::normal_distribution<double> n01;
	const std::vector<std::size_t> lags{1, 3, 4};
	Eigen::MatrixXd th(3, 3);
	Eigen::MatrixXd hist(3, 10);
	for (Eigen::Index i = 0; i < th.size(); ++i) th.data()[i] = 0.3 * n01(rng);
	for (Eigen::Index i = 0; i < hist.size(); ++i) hist.data()[i] = n01(rng);
	const auto whole = trmf::ar_forecast(th, lags, hist, 9);
	const auto first = trmf::ar_forecast(th, lags, hist, 4);
	Eigen::MatrixXd extended(3, 14);
	extended << hist, first;
	const auto second = trmf::ar_forecast(th, lags, extended, 5);
	CHECK((whole.leftCols(4) - first).norm() == 0.0);
	CHECK((whole.rightCols(5) - second).norm() == 0.0);
}

TEST_CASE("model save and load round-trip") {
	const auto panel = synth::low_rank_panel(6, 20, 2, 0.1, 10);
	trmf::TrmfConfig cfg;
	cfg.rank = 2;
	cfg.lags = {1, 2};
	cfg.max_iterations = 15;
	const auto model = trmf::fit(panel.data, cfg);
	std::stringstream buf;
	trmf::save(model, buf);
	const auto back = trmf::load(buf);
	CHECK(back.factors == model.factors);
	CHECK(back.temporal == model.temporal);
	CHECK(back.theta == model.theta);
	CHECK(back.objective_trace == model.objective_trace);
	CHECK(back.config.lags == model.config.lags);
	CHECK(back.converged == model.converged);
}

TEST_CASE("config validation") {
	trmf::TrmfConfig cfg;
	CHECK_THROWS_AS(cfg.validate(10, 6), trmf::TrmfError);
	cfg.rank = 0;
	CHECK_THROWS_AS(cfg.validate(10, 60), trmf::TrmfError);
	cfg.rank = 2;
	cfg.lags = {2, 1};
	CHECK_THROWS_AS(cfg.validate(10, 60), trmf::TrmfError);
	cfg.lags = {1};
	cfg.tolerance = 0.0;
	CHECK_THROWS_AS(cfg.validate(10, 60), trmf::TrmfError);
}

TEST_CASE("an unregularized singular system is reported") {
	// One series cannot determine two temporal coordinates without a penalty.
	const auto data = SeriesMatrix::from_rows({{1, 2, 3, 4}});
	auto cfg = plain(2);
	cfg.lambda_f = 0.0;
	CHECK_THROWS_WITH_AS(trmf::fit(data, cfg), doctest::Contains("singular"), trmf::TrmfError);
}

TEST_CASE("fit is deterministic for a seed") {
	const auto panel = synth::low_rank_panel(12, 24, 3, 0.1, 12);
	trmf::TrmfConfig cfg;
	cfg.rank = 3;
	cfg.max_iterations = 25;
	const auto a = trmf::fit(panel.data, cfg);
	cfg.threads = 3;
	const auto b = trmf::fit(panel.data, cfg);
	CHECK(a.factors == b.factors);
	CHECK(a.temporal == b.temporal);
}
