#pragma once

#include "latentcast/series.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace latentcast::metrics {

class MetricError : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

/**
 * @brief Symmetric MAPE in percent: (2/h) * sum |y - f| / (|y| + |f|) * 100.
 *
 * For same-sign pairs |y| + |f| == |y + f|. A pair with y == f == 0
 * contributes 0. Result lies in [0, 200].
 */
double smape(std::span<const double> actual, std::span<const double> forecast);

/// In-sample seasonal-naive MAE over t = m+1..n; nullopt when n <= m or it is 0.
std::optional<double> mase_scale(std::span<const double> insample, std::size_t period);
/// Same, pairing only positions where both y_t and y_{t-m} are observed.
std::optional<double> mase_scale(const SeriesView& insample);

/// Mean absolute scaled error; nullopt marks a degenerate (zero or undefined) scale.
std::optional<double> mase(std::span<const double> actual, std::span<const double> forecast,
                           std::span<const double> insample, std::size_t period);

/// Sample autocorrelations r_1..r_max_lag (denominator n, mean-centred).
std::vector<double> acf(std::span<const double> x, std::size_t max_lag);

/// 90% lag-m autocorrelation seasonality test used by the M4 benchmarks.
/// False whenever n < 3m, m <= 1 or the series has zero variance.
bool seasonality_test(std::span<const double> x, std::size_t period);

struct Decomposition {
	std::vector<double> trend;    // centred moving average, NaN where undefined
	std::vector<double> seasonal; // index for every input position
	std::vector<double> figure;   // one index per cycle position, mean 1
};

/// Classical multiplicative decomposition (centred MA trend, averaged ratios).
Decomposition decompose_multiplicative(std::span<const double> x, std::size_t period);

struct SeasonalAdjustment {
	bool seasonal = false;
	std::vector<double> adjusted;      // x divided by in-sample indices
	std::vector<double> future_index;  // indices for the next `horizon` steps
};

/// Applies the seasonality test and, if it passes on strictly positive data,
/// divides out the multiplicative seasonal indices.
SeasonalAdjustment seasonal_adjust(std::span<const double> x, std::size_t period, std::size_t horizon);

/// M4 Naive2: last value of the seasonally adjusted series, reseasonalized.
std::vector<double> naive2(std::span<const double> insample, std::size_t period, std::size_t horizon);

struct OwaReport {
	double smape_method = 0.0;
	double mase_method = 0.0;
	double smape_naive2 = 0.0;
	double mase_naive2 = 0.0;
	double owa = 0.0;
};

/// 0.5 * (sMAPE / sMAPE_naive2 + MASE / MASE_naive2); reference values must be positive.
OwaReport owa(double smape_method, double mase_method, double smape_naive2, double mase_naive2);

struct SeriesScore {
	std::string id;
	double smape = 0.0;
	std::optional<double> mase; // nullopt: degenerate scale
	std::string category;
	bool fallback = false;      // forecast replaced by Naive2
};

struct Aggregate {
	double smape = 0.0;        // mean over all series
	double mase = 0.0;         // mean over non-degenerate series
	double smape_scored = 0.0; // mean over non-degenerate series (used for OWA)
	std::size_t series = 0;
	std::size_t degenerate = 0;
};

struct CategoryBlock {
	Aggregate method;
	Aggregate naive2;
	std::optional<OwaReport> owa;
};

struct EvalReport {
	std::string method;
	std::vector<SeriesScore> rows;
	Aggregate aggregate;
	Aggregate naive2;
	std::optional<OwaReport> owa;
	std::map<std::string, CategoryBlock> categories;
	std::size_t fallbacks = 0;
};

/// Per-series scores of forecasts against actuals with MASE scaled by the training rows.
std::vector<SeriesScore> score(const SeriesMatrix& train, const SeriesMatrix& actual, const SeriesMatrix& forecast,
                               const std::map<std::string, std::string>& categories = {});

Aggregate aggregate(std::span<const SeriesScore> rows);
Aggregate aggregate(std::span<const SeriesScore> rows, const std::vector<std::uint8_t>& keep);

/// Naive2 forecast for every training row (trailing contiguous segment).
SeriesMatrix naive2_panel(const SeriesMatrix& train, std::size_t horizon);

/**
 * @brief Scores a method and its OWA against precomputed Naive2 scores.
 *
 * OWA uses the series whose MASE scale is defined for both method and
 * reference; degenerate series are only counted.
 */
EvalReport evaluate(std::string method, std::vector<SeriesScore> method_rows, std::span<const SeriesScore> naive2_rows);

nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const Aggregate& agg);
nlohmann::json to_json(const OwaReport& owa);

} // namespace latentcast::metrics
