#pragma once

#include "latentcast/audit.hpp"
#include "latentcast/forecasters.hpp"
#include "latentcast/series.hpp"
#include "latentcast/trmf.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace latentcast::select {

class SelectionError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Score given to a fold on which a method could not produce a forecast.
inline constexpr double kInapplicableSmape = 200.0;

struct Fold {
	std::size_t train_end;      // fit on [0, train_end)
	std::size_t validate_begin; // == train_end
	std::size_t validate_end;   // exclusive
};

struct FoldPlan {
	std::size_t fold_length = 6;
	std::size_t min_train = 24;
	std::vector<Fold> folds;
	std::string warning; // non-empty for the short-series fallback
};

/**
 * @brief Expanding-window folds: train_end = min_train, min_train + fold_length,
 * ... while train_end + fold_length <= n.
 *
 * When no full fold fits but n >= min_train + 1, a single shorter fold
 * validating [min_train, n) is returned with a warning. Otherwise throws
 * SelectionError.
 */
FoldPlan plan_folds(std::size_t n, std::size_t fold_length = 6, std::size_t min_train = 24);

struct MethodScore {
	std::string method;
	std::size_t menu_index = 0;
	std::vector<std::optional<double>> fold_smape; // nullopt: inapplicable on that fold
	std::vector<std::string> failures;             // reason per inapplicable fold
	double mean_smape = 0.0;                       // inapplicable folds count as kInapplicableSmape
	std::size_t applicable_folds = 0;
	std::size_t rank = 0; // 1-based
	bool eligible() const { return applicable_folds > 0; }
};

struct LatentRanking {
	std::size_t latent = 0;
	std::vector<MethodScore> methods; // menu order
	std::vector<std::string> top3;    // best first; fewer when fewer methods are eligible

	/// Eligible menu indices in rank order.
	std::vector<std::size_t> ranked_indices() const;
};

struct CvReport {
	FoldPlan plan;
	std::vector<LatentRanking> latents;
};

/// Runs every fold for one method. All fits go through latent.fit_prefix.
MethodScore score_method(const AuditedSeries& latent, std::size_t period, const forecast::MethodMenu& menu,
                         std::size_t method, const FoldPlan& plan);

/// Assigns ranks by mean sMAPE (ties: menu order); methods inapplicable on
/// every fold rank after all others and are never in the top 3.
LatentRanking finalize_ranking(std::size_t latent, std::vector<MethodScore> scores);

LatentRanking rank_methods(const AuditedSeries& latent, std::size_t period, const forecast::MethodMenu& menu,
                           const FoldPlan& plan, std::size_t latent_id = 0);
LatentRanking rank_methods(std::span<const double> latent, std::size_t period, const forecast::MethodMenu& menu,
                           const FoldPlan& plan, std::size_t latent_id = 0);

/// Elementwise median; an even count averages the middle pair.
std::vector<double> elementwise_median(const std::vector<std::vector<double>>& forecasts);

struct EnsembleForecast {
	std::vector<double> values;
	std::vector<std::string> methods; // contributors, best rank first
};

/**
 * @brief Median of the top three methods refit on the full series.
 *
 * A top-ranked method that fails on the full series is replaced by the next
 * eligible one. Throws SelectionError if no eligible method succeeds.
 */
EnsembleForecast ensemble_forecast(const AuditedSeries& latent, std::size_t period, const LatentRanking& ranking,
                                   const forecast::MethodMenu& menu, std::size_t horizon);
EnsembleForecast ensemble_forecast(std::span<const double> latent, std::size_t period, const LatentRanking& ranking,
                                   const forecast::MethodMenu& menu, std::size_t horizon);

struct CvOptions {
	std::size_t fold_length = 6;
	std::size_t min_train = 24;
	std::size_t threads = 1;
	/// Latent rows are shifted into [offset * range, (offset + 1) * range]
	/// before cross-validation and the shift is removed afterwards, so sMAPE
	/// is scored on positive series. 0 disables the shift.
	double latent_offset = 1.0;
};

/// Constant c with min(x + c) = offset * (max(x) - min(x)).
double positive_shift(std::span<const double> x, double offset);

struct PanelForecast {
	SeriesMatrix forecasts;         // N x h, F^T X_hat
	Eigen::MatrixXd latent_forecast; // K x h
	CvReport cv;
	std::vector<EnsembleForecast> provenance; // per latent series
};

/// Cross-validates the menu on every latent series of `model` (F fixed),
/// ensembles, and maps X_hat back through F.
PanelForecast forecast_panel(const trmf::TrmfModel& model, const forecast::MethodMenu& menu, const CvOptions& options,
                             std::size_t horizon, std::size_t period, std::vector<std::string> ids = {},
                             AccessAudit* audit = nullptr);

/// latent_id,method,fold,smape; inapplicable folds have an empty smape cell.
void write_folds_csv(const CvReport& report, std::ostream& out);
nlohmann::json summary_json(const CvReport& report, std::span<const EnsembleForecast> provenance = {});

} // namespace latentcast::select
