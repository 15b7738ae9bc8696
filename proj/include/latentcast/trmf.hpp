#pragma once

#include "latentcast/series.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace latentcast {
class AccessAudit;
}

namespace latentcast::trmf {

class TrmfError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/**
 * @brief Hyperparameters of the temporally regularized factorization.
 *
 * The fitted objective is
 *
 *   sum_{(i,t) observed} (y_it - f_i^T x_t)^2 + lambda_f ||F||^2
 *     + lambda_x [ sum_k sum_{t >= max lag} (x_kt - sum_l theta_kl x_k,t-l)^2 + eta ||X||^2 ]
 *     + lambda_theta ||theta||^2
 *
 * with one scalar AR weight per latent dimension and lag.
 */
struct TrmfConfig {
	std::size_t rank = 18;
	std::vector<std::size_t> lags = {1, 2, 3, 4, 5, 6};
	double lambda_f = 5e-4;
	double lambda_x = 5e1;
	double lambda_theta = 1e-4;
	double eta = 0.25;
	std::size_t max_iterations = 1000;
	double tolerance = 1e-5;
	bool nonnegative_factors = false;
	std::uint64_t seed = 0;
	/// Standard deviation of the Gaussian initial F and X entries.
	double init_scale = 0.1;
	/// Record the objective around every block update (slow; for diagnostics).
	bool check_blocks = false;
	std::size_t threads = 1;

	std::size_t max_lag() const;
	/// Throws TrmfError if the config is unusable for an n_series x n_times panel.
	void validate(std::size_t n_series, std::size_t n_times) const;
};

struct BlockStep {
	std::size_t iteration;
	char block; // 'F', 'X' or 'T'
	double before;
	double after;
};

struct TrmfModel {
	TrmfConfig config;
	Eigen::MatrixXd factors;  // K x N, column i is f_i
	Eigen::MatrixXd temporal; // K x T, column t is x_t
	Eigen::MatrixXd theta;    // K x |lags|
	std::vector<double> objective_trace;
	std::vector<BlockStep> block_trace;
	bool converged = false;

	std::size_t rank() const { return static_cast<std::size_t>(factors.rows()); }
	std::size_t series() const { return static_cast<std::size_t>(factors.cols()); }
	std::size_t length() const { return static_cast<std::size_t>(temporal.cols()); }
};

struct ObjectiveTerms {
	double fit = 0.0;
	double factor_penalty = 0.0;   // lambda_f ||F||^2
	double ar_penalty = 0.0;       // lambda_x * AR residuals
	double temporal_ridge = 0.0;   // lambda_x * eta ||X||^2
	double theta_penalty = 0.0;    // lambda_theta ||theta||^2
	double total() const { return fit + factor_penalty + ar_penalty + temporal_ridge + theta_penalty; }
};

ObjectiveTerms objective(const SeriesMatrix& y, const Eigen::MatrixXd& factors, const Eigen::MatrixXd& temporal,
                         const Eigen::MatrixXd& theta, const TrmfConfig& config);

/**
 * @brief Fits F, X and theta by cyclic exact block minimization.
 *
 * Each outer iteration solves one ridge system per series (F), sweeps
 * t = 0..T-1 solving for x_t with its AR coupling (X), then refits the AR
 * weights per latent dimension (theta). Stops when the relative objective
 * decrease drops below `tolerance` or after `max_iterations`.
 */
TrmfModel fit(const SeriesMatrix& train, const TrmfConfig& config, AccessAudit* audit = nullptr);

/// Recursive AR continuation of `history` (K x T'): x_k,t = sum_l theta_kl x_k,t-l.
Eigen::MatrixXd ar_forecast(const Eigen::MatrixXd& theta, std::span<const std::size_t> lags,
                            const Eigen::MatrixXd& history, std::size_t horizon);
Eigen::MatrixXd ar_forecast(const TrmfModel& model, std::size_t horizon);

struct ReconstructionError {
	std::vector<std::optional<double>> per_series; // nullopt: degenerate MASE scale
	double aggregate = 0.0;                        // mean over non-degenerate series
	std::size_t degenerate = 0;
};

/// MASE of F^T X against the observed entries of `train`, scaled per series by
/// the in-sample seasonal-naive error of `train` itself.
ReconstructionError reconstruction_error(const TrmfModel& model, const SeriesMatrix& train);

void save(const TrmfModel& model, std::ostream& out);
TrmfModel load(std::istream& in);
void save(const TrmfModel& model, const std::filesystem::path& path);
TrmfModel load(const std::filesystem::path& path);

} // namespace latentcast::trmf
