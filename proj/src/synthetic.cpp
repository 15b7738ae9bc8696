#include "latentcast/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace latentcast::synth {

LowRankPanel low_rank_panel(std::size_t n, std::size_t t, std::size_t rank, double noise, std::uint64_t seed,
                            std::size_t period) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> normal(0.0, 1.0);
	LowRankPanel out;
	const auto K = static_cast<Eigen::Index>(rank);
	out.factors = Eigen::MatrixXd::NullaryExpr(K, static_cast<Eigen::Index>(n), [&] { return normal(rng); });
	out.temporal = Eigen::MatrixXd::NullaryExpr(K, static_cast<Eigen::Index>(t), [&] { return normal(rng); });
	const Eigen::MatrixXd clean = out.factors.transpose() * out.temporal;
	const double rms = std::sqrt(clean.squaredNorm() / static_cast<double>(clean.size()));
	std::vector<std::vector<double>> rows(n, std::vector<double>(t));
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j < t; ++j) {
			rows[i][j] = clean(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) + noise * rms * normal(rng);
		}
	}
	out.data = SeriesMatrix::from_rows(rows, {}, period);
	return out;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Zero-mean, unit-RMS copy.
void standardize(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> z) {
	z.array() -= z.mean();
	const double rms = std::sqrt(z.squaredNorm() / static_cast<double>(z.size()));
	if (rms > 0.0) {
		z /= rms;
	}
}

} // namespace

LatentPanel latent_panel(const LatentPanelSpec& spec) {
	const std::size_t T = spec.length;
	const auto TT = static_cast<Eigen::Index>(T);
	const double m = static_cast<double>(spec.period);
	std::mt19937_64 rng(spec.seed);
	std::normal_distribution<double> normal(0.0, 1.0);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	Eigen::MatrixXd z(static_cast<Eigen::Index>(kLatentProcesses), TT);
	for (Eigen::Index t = 0; t < TT; ++t) {
		const double s = static_cast<double>(t);
		const double u = s / static_cast<double>(T) - 0.5;
		z(0, t) = 1.0;
		for (int h = 1; h <= 4; ++h) {
			const auto row = static_cast<Eigen::Index>(h <= 3 ? 2 * h - 1 : 10);
			z(row, t) = std::sin(kTwoPi * h * s / m);
			z(row + 1, t) = std::cos(kTwoPi * h * s / m);
		}
		z(7, t) = u;
		z(8, t) = u * std::sin(kTwoPi * s / m);
		z(9, t) = u * std::cos(kTwoPi * s / m);
		const double cycles[] = {18.0, 24.0, 30.0};
		for (int c = 0; c < 3; ++c) {
			z(12 + 2 * c, t) = std::sin(kTwoPi * s / cycles[c]);
			z(13 + 2 * c, t) = std::cos(kTwoPi * s / cycles[c]);
		}
	}
	for (Eigen::Index k = 1; k < static_cast<Eigen::Index>(kLatentProcesses); ++k) {
		standardize(z.row(k));
	}

	LatentPanel out;
	out.latent = z;
	out.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kLatentProcesses), static_cast<Eigen::Index>(spec.series));
	std::vector<std::vector<double>> rows(spec.series, std::vector<double>(T));
	std::vector<std::string> ids(spec.series);
	for (std::size_t i = 0; i < spec.series; ++i) {
		const auto col = static_cast<Eigen::Index>(i);
		out.weights(0, col) = 1.0;
		for (Eigen::Index k = 1; k < static_cast<Eigen::Index>(kLatentProcesses); ++k) {
			// Sparse loadings: each series mixes a handful of processes.
			if (unit(rng) < 0.35) {
				out.weights(k, col) = 0.06 * normal(rng);
			}
		}
		Eigen::RowVectorXd shape = out.weights.col(col).transpose() * z;
		// Keep the multiplier comfortably positive.
		const double lo = shape.minCoeff();
		if (lo < 0.3) {
			const double shrink = 0.7 / (1.0 - lo);
			out.weights.col(col).tail(kLatentProcesses - 1) *= shrink;
			shape = out.weights.col(col).transpose() * z;
		}
		const double level = std::exp(std::log(50.0) + unit(rng) * (std::log(5000.0) - std::log(50.0)));
		out.weights.col(col) *= level;
		for (std::size_t t = 0; t < T; ++t) {
			rows[i][t] = level * shape(static_cast<Eigen::Index>(t)) * (1.0 + spec.noise * normal(rng));
		}
		ids[i] = "S" + std::to_string(i + 1);
	}
	out.data = SeriesMatrix::from_rows(rows, std::move(ids), spec.period);
	return out;
}

std::vector<double> seasonal_series(std::size_t n, std::size_t period, std::uint64_t seed) {
	std::mt19937_64 rng(seed);
	std::uniform_real_distribution<double> unit(0.5, 1.5);
	std::vector<double> cycle(period);
	for (auto& c : cycle) {
		c = 100.0 * unit(rng);
	}
	std::vector<double> out(n);
	for (std::size_t t = 0; t < n; ++t) {
		out[t] = cycle[t % period];
	}
	return out;
}

std::vector<double> trend_series(std::size_t n, double level, double slope, double sd, std::uint64_t seed) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> normal(0.0, sd);
	std::vector<double> out(n);
	for (std::size_t t = 0; t < n; ++t) {
		out[t] = level + slope * static_cast<double>(t) + normal(rng);
	}
	return out;
}

std::vector<double> white_noise_series(std::size_t n, double level, double sd, std::uint64_t seed) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> normal(0.0, sd);
	std::vector<double> out(n);
	for (auto& v : out) {
		v = level + normal(rng);
	}
	return out;
}

} // namespace latentcast::synth
