#pragma once

#include "latentcast/series.hpp"

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace latentcast::synth {

/// Y = F^T X with Gaussian F (K x N) and X (K x T), plus iid Gaussian noise
/// with standard deviation `noise` times the RMS of the clean entries.
struct LowRankPanel {
	SeriesMatrix data;
	Eigen::MatrixXd factors;
	Eigen::MatrixXd temporal;
};
LowRankPanel low_rank_panel(std::size_t n, std::size_t t, std::size_t rank, double noise, std::uint64_t seed,
                            std::size_t period = 1);

struct LatentPanelSpec {
	std::size_t series = 500;
	std::size_t length = 72;
	std::size_t period = 12;
	double noise = 0.05; // multiplicative, standard deviation
	std::uint64_t seed = 1;
};

/**
 * @brief Positive panel driven by 18 forecastable latent processes.
 *
 * Series i is level_i * (1 + sum_k w_ik z_k(t)) * (1 + noise * e_it): the
 * processes are a constant, four period-m harmonic pairs, a linear trend,
 * trend-modulated seasonality and sine/cosine cycles of 18, 24 and 30 steps,
 * all deterministic and standardized over the full length. Loadings are
 * sparse (about 6 active per series).
 */
struct LatentPanel {
	SeriesMatrix data;
	Eigen::MatrixXd latent;  // 18 x length, the processes z
	Eigen::MatrixXd weights; // 18 x series
};
LatentPanel latent_panel(const LatentPanelSpec& spec);

inline constexpr std::size_t kLatentProcesses = 18;

/// Positive strictly periodic series: a random cycle repeated.
std::vector<double> seasonal_series(std::size_t n, std::size_t period, std::uint64_t seed);
/// level + slope * t + N(0, sd).
std::vector<double> trend_series(std::size_t n, double level, double slope, double sd, std::uint64_t seed);
/// level + N(0, sd).
std::vector<double> white_noise_series(std::size_t n, double level, double sd, std::uint64_t seed);

} // namespace latentcast::synth
