#include "latentcast/selection.hpp"

#include "latentcast/csv_io.hpp"
#include "latentcast/metrics.hpp"
#include "latentcast/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace latentcast::select {

FoldPlan plan_folds(std::size_t n, std::size_t fold_length, std::size_t min_train) {
	if (fold_length == 0 || min_train == 0) {
		throw SelectionError("fold_length and min_train must be positive");
	}
	FoldPlan plan;
	plan.fold_length = fold_length;
	plan.min_train = min_train;
	for (std::size_t end = min_train; end + fold_length <= n; end += fold_length) {
		plan.folds.push_back({end, end, end + fold_length});
	}
	if (plan.folds.empty()) {
		if (n < min_train + 1) {
			throw SelectionError("series of length " + std::to_string(n) + " leaves no validation data after min_train=" +
			                     std::to_string(min_train));
		}
		plan.folds.push_back({min_train, min_train, n});
		plan.warning = "series of length " + std::to_string(n) + " is shorter than min_train + fold_length; using one " +
		               std::to_string(n - min_train) + "-point fold";
	}
	return plan;
}

std::vector<std::size_t> LatentRanking::ranked_indices() const {
	std::vector<std::size_t> out;
	for (std::size_t i = 0; i < methods.size(); ++i) {
		if (methods[i].eligible()) {
			out.push_back(i);
		}
	}
	std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return methods[a].rank < methods[b].rank; });
	return out;
}

MethodScore score_method(const AuditedSeries& latent, std::size_t period, const forecast::MethodMenu& menu,
                         std::size_t method, const FoldPlan& plan) {
	MethodScore score;
	score.method = menu.name(method);
	score.menu_index = method;
	const auto proto = menu.make(method);
	double total = 0.0;
	for (const auto& fold : plan.folds) {
		if (fold.validate_end > latent.size()) {
			throw SelectionError("fold plan exceeds the series length");
		}
		const std::size_t h = fold.validate_end - fold.validate_begin;
		const auto history = latent.fit_prefix(fold.train_end, fold.validate_begin);
		const auto result = forecast::fit_predict(*proto, history, period, h);
		if (result.ok()) {
			const double s = metrics::smape(latent.scoring_block(fold.validate_begin, h), result.values);
			score.fold_smape.emplace_back(s);
			score.applicable_folds += 1;
			total += s;
		} else {
			score.fold_smape.emplace_back(std::nullopt);
			score.failures.push_back(result.inapplicable);
			total += kInapplicableSmape;
		}
	}
	score.mean_smape = plan.folds.empty() ? kInapplicableSmape : total / static_cast<double>(plan.folds.size());
	return score;
}

LatentRanking finalize_ranking(std::size_t latent, std::vector<MethodScore> scores) {
	std::vector<std::size_t> order(scores.size());
	std::iota(order.begin(), order.end(), 0);
	std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
		const auto& x = scores[a];
		const auto& y = scores[b];
		if (x.eligible() != y.eligible()) {
			return x.eligible();
		}
		if (!x.eligible()) {
			return false;
		}
		// Scores equal up to rounding are ties and keep menu order.
		const double tol = 1e-12 * std::max(std::abs(x.mean_smape), std::abs(y.mean_smape));
		return x.mean_smape < y.mean_smape - tol;
	});
	LatentRanking out;
	out.latent = latent;
	for (std::size_t r = 0; r < order.size(); ++r) {
		scores[order[r]].rank = r + 1;
		if (out.top3.size() < 3 && scores[order[r]].eligible()) {
			out.top3.push_back(scores[order[r]].method);
		}
	}
	out.methods = std::move(scores);
	return out;
}

LatentRanking rank_methods(const AuditedSeries& latent, std::size_t period, const forecast::MethodMenu& menu,
                           const FoldPlan& plan, std::size_t latent_id) {
	std::vector<MethodScore> scores;
	scores.reserve(menu.size());
	for (std::size_t m = 0; m < menu.size(); ++m) {
		scores.push_back(score_method(latent, period, menu, m, plan));
	}
	return finalize_ranking(latent_id, std::move(scores));
}

LatentRanking rank_methods(std::span<const double> latent, std::size_t period, const forecast::MethodMenu& menu,
                           const FoldPlan& plan, std::size_t latent_id) {
	return rank_methods(AuditedSeries(latent, nullptr), period, menu, plan, latent_id);
}

std::vector<double> elementwise_median(const std::vector<std::vector<double>>& forecasts) {
	if (forecasts.empty()) {
		throw SelectionError("median of zero forecasts");
	}
	const std::size_t h = forecasts.front().size();
	for (const auto& f : forecasts) {
		if (f.size() != h) {
			throw SelectionError("median over forecasts of different lengths");
		}
	}
	std::vector<double> out(h);
	std::vector<double> column(forecasts.size());
	for (std::size_t j = 0; j < h; ++j) {
		for (std::size_t i = 0; i < forecasts.size(); ++i) {
			column[i] = forecasts[i][j];
		}
		std::sort(column.begin(), column.end());
		const std::size_t mid = column.size() / 2;
		out[j] = column.size() % 2 == 1 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
	}
	return out;
}

EnsembleForecast ensemble_forecast(const AuditedSeries& latent, std::size_t period, const LatentRanking& ranking,
                                   const forecast::MethodMenu& menu, std::size_t horizon) {
	if (ranking.methods.size() != menu.size()) {
		throw SelectionError("ranking and menu disagree in size");
	}
	const auto history = latent.fit_prefix(latent.size(), latent.size());
	EnsembleForecast out;
	std::vector<std::vector<double>> members;
	for (std::size_t idx : ranking.ranked_indices()) {
		if (members.size() == 3) {
			break;
		}
		const auto proto = menu.make(idx);
		auto result = forecast::fit_predict(*proto, history, period, horizon);
		if (result.ok()) {
			members.push_back(std::move(result.values));
			out.methods.push_back(menu.name(idx));
		}
	}
	if (members.empty()) {
		throw SelectionError("latent series " + std::to_string(ranking.latent) +
		                     ": no eligible method produced a forecast on the full series");
	}
	out.values = elementwise_median(members);
	return out;
}

EnsembleForecast ensemble_forecast(std::span<const double> latent, std::size_t period, const LatentRanking& ranking,
                                   const forecast::MethodMenu& menu, std::size_t horizon) {
	return ensemble_forecast(AuditedSeries(latent, nullptr), period, ranking, menu, horizon);
}

double positive_shift(std::span<const double> x, double offset) {
	const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
	double range = *hi - *lo;
	if (!(range > 0.0)) {
		range = std::max(std::abs(*lo), 1.0);
	}
	return offset * range - *lo;
}

PanelForecast forecast_panel(const trmf::TrmfModel& model, const forecast::MethodMenu& menu, const CvOptions& options,
                             std::size_t horizon, std::size_t period, std::vector<std::string> ids, AccessAudit* audit) {
	if (horizon == 0) {
		throw SelectionError("horizon must be positive");
	}
	menu.require_at_least(1);
	const std::size_t k_count = model.rank();
	const std::size_t t_count = model.length();
	const std::size_t m_count = menu.size();

	std::vector<std::vector<double>> latents(k_count, std::vector<double>(t_count));
	std::vector<std::string> labels(k_count);
	std::vector<double> shift(k_count, 0.0);
	for (std::size_t k = 0; k < k_count; ++k) {
		for (std::size_t t = 0; t < t_count; ++t) {
			latents[k][t] = model.temporal(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
		}
		if (options.latent_offset > 0.0) {
			shift[k] = positive_shift(latents[k], options.latent_offset);
			for (auto& v : latents[k]) {
				v += shift[k];
			}
		}
		labels[k] = "latent " + std::to_string(k);
	}

	PanelForecast out;
	out.cv.plan = plan_folds(t_count, options.fold_length, options.min_train);

	std::vector<MethodScore> scores(k_count * m_count);
	parallel_for(scores.size(), options.threads, [&](std::size_t task) {
		const std::size_t k = task / m_count;
		const AuditedSeries series(latents[k], audit, labels[k]);
		scores[task] = score_method(series, period, menu, task % m_count, out.cv.plan);
	});
	out.cv.latents.reserve(k_count);
	for (std::size_t k = 0; k < k_count; ++k) {
		std::vector<MethodScore> row(std::make_move_iterator(scores.begin() + static_cast<std::ptrdiff_t>(k * m_count)),
		                             std::make_move_iterator(scores.begin() + static_cast<std::ptrdiff_t>((k + 1) * m_count)));
		out.cv.latents.push_back(finalize_ranking(k, std::move(row)));
	}

	out.provenance.resize(k_count);
	parallel_for(k_count, options.threads, [&](std::size_t k) {
		const AuditedSeries series(latents[k], audit, labels[k]);
		out.provenance[k] = ensemble_forecast(series, period, out.cv.latents[k], menu, horizon);
	});

	out.latent_forecast.resize(static_cast<Eigen::Index>(k_count), static_cast<Eigen::Index>(horizon));
	for (std::size_t k = 0; k < k_count; ++k) {
		for (std::size_t j = 0; j < horizon; ++j) {
			out.latent_forecast(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
			    out.provenance[k].values[j] - shift[k];
		}
	}
	out.forecasts = reconstruct(model.factors, out.latent_forecast, std::move(ids), period);
	return out;
}

void write_folds_csv(const CvReport& report, std::ostream& out) {
	out << "latent_id,method,fold,smape\n";
	for (const auto& latent : report.latents) {
		for (const auto& m : latent.methods) {
			for (std::size_t f = 0; f < m.fold_smape.size(); ++f) {
				out << latent.latent << ',' << m.method << ',' << f + 1 << ',';
				if (m.fold_smape[f]) {
					out << io::format_double(*m.fold_smape[f]);
				}
				out << '\n';
			}
		}
	}
}

nlohmann::json summary_json(const CvReport& report, std::span<const EnsembleForecast> provenance) {
	nlohmann::json folds = nlohmann::json::array();
	for (const auto& f : report.plan.folds) {
		folds.push_back({{"train_end", f.train_end}, {"validate_begin", f.validate_begin}, {"validate_end", f.validate_end}});
	}
	nlohmann::json latents = nlohmann::json::array();
	for (const auto& latent : report.latents) {
		nlohmann::json ranking = nlohmann::json::array();
		for (std::size_t idx = 0; idx < latent.methods.size(); ++idx) {
			const auto& m = latent.methods[idx];
			ranking.push_back({{"method", m.method},
			                   {"rank", m.rank},
			                   {"mean_smape", m.mean_smape},
			                   {"applicable_folds", m.applicable_folds},
			                   {"eligible", m.eligible()}});
		}
		std::sort(ranking.begin(), ranking.end(),
		          [](const nlohmann::json& a, const nlohmann::json& b) { return a["rank"] < b["rank"]; });
		nlohmann::json entry{{"latent_id", latent.latent}, {"ranking", ranking}, {"top3", latent.top3}};
		if (latent.latent < provenance.size()) {
			entry["ensemble_methods"] = provenance[latent.latent].methods;
		}
		latents.push_back(std::move(entry));
	}
	nlohmann::json out{{"fold_length", report.plan.fold_length},
	                   {"min_train", report.plan.min_train},
	                   {"folds", folds},
	                   {"latents", latents}};
	if (!report.plan.warning.empty()) {
		out["warning"] = report.plan.warning;
	}
	return out;
}

} // namespace latentcast::select
