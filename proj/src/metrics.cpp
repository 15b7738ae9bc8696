#include "latentcast/metrics.hpp"

#include "latentcast/kernels.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace latentcast::metrics {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
	if (a.empty()) {
		throw MetricError("empty forecast");
	}
	if (a.size() != b.size()) {
		throw MetricError("actual and forecast differ in length (" + std::to_string(a.size()) + " vs " +
		                  std::to_string(b.size()) + ")");
	}
}

void check_finite(std::span<const double> x, const char* what) {
	for (double v : x) {
		if (!std::isfinite(v)) {
			throw MetricError(std::string("non-finite value in ") + what);
		}
	}
}

double mean_of(std::span<const double> x) {
	return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

} // namespace

double smape(std::span<const double> actual, std::span<const double> forecast) {
	check_pair(actual, forecast);
	const double h = static_cast<double>(actual.size());
	return 2.0 / h * kernels::smape_sum(actual, forecast) * 100.0;
}

std::optional<double> mase_scale(std::span<const double> insample, std::size_t period) {
	if (period == 0) {
		throw MetricError("period must be positive");
	}
	if (insample.size() <= period) {
		return std::nullopt;
	}
	const double scale =
	    kernels::seasonal_abs_diff(insample, period) / static_cast<double>(insample.size() - period);
	if (!(scale > 0.0)) {
		return std::nullopt;
	}
	return scale;
}

std::optional<double> mase_scale(const SeriesView& insample) {
	const std::size_t m = insample.period();
	double total = 0.0;
	std::size_t pairs = 0;
	for (std::size_t t = m; t < insample.size(); ++t) {
		if (insample.observed(t) && insample.observed(t - m)) {
			total += std::abs(insample.values()[t] - insample.values()[t - m]);
			++pairs;
		}
	}
	if (pairs == 0 || !(total > 0.0)) {
		return std::nullopt;
	}
	return total / static_cast<double>(pairs);
}

std::optional<double> mase(std::span<const double> actual, std::span<const double> forecast,
                           std::span<const double> insample, std::size_t period) {
	check_pair(actual, forecast);
	const auto scale = mase_scale(insample, period);
	if (!scale) {
		return std::nullopt;
	}
	return kernels::sum_abs_diff(actual, forecast) / static_cast<double>(actual.size()) / *scale;
}

std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
	const std::size_t n = x.size();
	std::vector<double> r(max_lag, 0.0);
	if (n == 0) {
		return r;
	}
	const double mu = mean_of(x);
	double denom = 0.0;
	for (double v : x) {
		denom += (v - mu) * (v - mu);
	}
	if (!(denom > 0.0)) {
		return r;
	}
	for (std::size_t k = 1; k <= max_lag && k < n; ++k) {
		double num = 0.0;
		for (std::size_t t = 0; t + k < n; ++t) {
			num += (x[t] - mu) * (x[t + k] - mu);
		}
		r[k - 1] = num / denom;
	}
	return r;
}

bool seasonality_test(std::span<const double> x, std::size_t period) {
	constexpr double kCritical = 1.645;
	const std::size_t n = x.size();
	if (period <= 1 || n < 3 * period) {
		return false;
	}
	const auto r = acf(x, period);
	double cum = 1.0;
	for (std::size_t j = 0; j + 1 < period; ++j) {
		cum += 2.0 * r[j] * r[j];
	}
	const double limit = kCritical / std::sqrt(static_cast<double>(n)) * std::sqrt(cum);
	return std::abs(r[period - 1]) > limit;
}

Decomposition decompose_multiplicative(std::span<const double> x, std::size_t period) {
	const std::size_t n = x.size();
	if (period < 2 || n < 2 * period) {
		throw MetricError("decomposition needs at least two full periods");
	}
	const double nan = std::numeric_limits<double>::quiet_NaN();
	std::vector<double> weights;
	if (period % 2 == 0) {
		weights.assign(period + 1, 1.0 / static_cast<double>(period));
		weights.front() = weights.back() = 0.5 / static_cast<double>(period);
	} else {
		weights.assign(period, 1.0 / static_cast<double>(period));
	}
	const std::size_t half = weights.size() / 2;

	Decomposition d;
	d.trend.assign(n, nan);
	for (std::size_t t = half; t + half < n; ++t) {
		double acc = 0.0;
		for (std::size_t j = 0; j < weights.size(); ++j) {
			acc += weights[j] * x[t - half + j];
		}
		d.trend[t] = acc;
	}

	d.figure.assign(period, 0.0);
	std::vector<std::size_t> counts(period, 0);
	for (std::size_t t = 0; t < n; ++t) {
		if (!std::isnan(d.trend[t])) {
			d.figure[t % period] += x[t] / d.trend[t];
			++counts[t % period];
		}
	}
	for (std::size_t i = 0; i < period; ++i) {
		d.figure[i] /= static_cast<double>(counts[i]);
	}
	const double norm = mean_of(d.figure);
	for (double& f : d.figure) {
		f /= norm;
	}
	d.seasonal.resize(n);
	for (std::size_t t = 0; t < n; ++t) {
		d.seasonal[t] = d.figure[t % period];
	}
	return d;
}

SeasonalAdjustment seasonal_adjust(std::span<const double> x, std::size_t period, std::size_t horizon) {
	check_finite(x, "insample");
	SeasonalAdjustment out;
	out.adjusted.assign(x.begin(), x.end());
	out.future_index.assign(horizon, 1.0);
	bool positive = true;
	for (double v : x) {
		positive = positive && v > 0.0;
	}
	// Multiplicative indices are undefined for non-positive data.
	if (!positive || !seasonality_test(x, period)) {
		return out;
	}
	const auto d = decompose_multiplicative(x, period);
	out.seasonal = true;
	for (std::size_t t = 0; t < x.size(); ++t) {
		out.adjusted[t] = x[t] / d.seasonal[t];
	}
	for (std::size_t j = 0; j < horizon; ++j) {
		out.future_index[j] = d.figure[(x.size() + j) % period];
	}
	return out;
}

std::vector<double> naive2(std::span<const double> insample, std::size_t period, std::size_t horizon) {
	if (insample.empty()) {
		throw MetricError("naive2 needs a non-empty history");
	}
	if (horizon == 0) {
		throw MetricError("horizon must be positive");
	}
	const auto adj = seasonal_adjust(insample, period, horizon);
	std::vector<double> out(horizon);
	for (std::size_t j = 0; j < horizon; ++j) {
		out[j] = adj.adjusted.back() * adj.future_index[j];
	}
	return out;
}

OwaReport owa(double smape_method, double mase_method, double smape_naive2, double mase_naive2) {
	if (!(smape_naive2 > 0.0) || !(mase_naive2 > 0.0)) {
		throw MetricError("Naive2 reference aggregates must be positive");
	}
	OwaReport r{smape_method, mase_method, smape_naive2, mase_naive2, 0.0};
	r.owa = 0.5 * (smape_method / smape_naive2 + mase_method / mase_naive2);
	return r;
}

std::vector<SeriesScore> score(const SeriesMatrix& train, const SeriesMatrix& actual, const SeriesMatrix& forecast,
                               const std::map<std::string, std::string>& categories) {
	if (train.rows() != actual.rows() || actual.rows() != forecast.rows() || actual.cols() != forecast.cols()) {
		throw MetricError("train, actual and forecast panels disagree in shape");
	}
	std::vector<SeriesScore> rows;
	rows.reserve(actual.rows());
	for (std::size_t i = 0; i < actual.rows(); ++i) {
		SeriesScore s;
		s.id = actual.id(i);
		s.smape = smape(actual.row(i), forecast.row(i));
		if (const auto scale = mase_scale(train.view(i))) {
			s.mase = kernels::sum_abs_diff(actual.row(i), forecast.row(i)) / static_cast<double>(actual.cols()) / *scale;
		}
		if (const auto it = categories.find(s.id); it != categories.end()) {
			s.category = it->second;
		}
		rows.push_back(std::move(s));
	}
	return rows;
}

Aggregate aggregate(std::span<const SeriesScore> rows, const std::vector<std::uint8_t>& keep) {
	Aggregate a;
	double smape_all = 0.0;
	double smape_scored = 0.0;
	double mase_total = 0.0;
	std::size_t scored = 0;
	for (std::size_t i = 0; i < rows.size(); ++i) {
		if (!keep.empty() && keep[i] == 0) {
			continue;
		}
		++a.series;
		smape_all += rows[i].smape;
		if (rows[i].mase) {
			mase_total += *rows[i].mase;
			smape_scored += rows[i].smape;
			++scored;
		} else {
			++a.degenerate;
		}
	}
	if (a.series > 0) {
		a.smape = smape_all / static_cast<double>(a.series);
	}
	if (scored > 0) {
		a.mase = mase_total / static_cast<double>(scored);
		a.smape_scored = smape_scored / static_cast<double>(scored);
	}
	return a;
}

Aggregate aggregate(std::span<const SeriesScore> rows) {
	return aggregate(rows, {});
}

SeriesMatrix naive2_panel(const SeriesMatrix& train, std::size_t horizon) {
	std::vector<double> values;
	values.reserve(train.rows() * horizon);
	for (std::size_t i = 0; i < train.rows(); ++i) {
		const auto history = train.view(i).trailing_segment();
		const auto f = naive2(history, train.period(), horizon);
		values.insert(values.end(), f.begin(), f.end());
	}
	std::vector<std::uint8_t> mask(values.size(), 1);
	return SeriesMatrix(train.rows(), horizon, std::move(values), std::move(mask), train.ids(), train.period());
}

namespace {

std::optional<OwaReport> owa_over(std::span<const SeriesScore> method, std::span<const SeriesScore> reference,
                                  const std::vector<std::uint8_t>& subset) {
	std::vector<std::uint8_t> keep(method.size(), 0);
	for (std::size_t i = 0; i < method.size(); ++i) {
		const bool in_subset = subset.empty() || subset[i] != 0;
		keep[i] = in_subset && method[i].mase && reference[i].mase ? 1 : 0;
	}
	const auto m = aggregate(method, keep);
	const auto r = aggregate(reference, keep);
	if (m.series == 0 || !(r.smape_scored > 0.0) || !(r.mase > 0.0)) {
		return std::nullopt;
	}
	return owa(m.smape_scored, m.mase, r.smape_scored, r.mase);
}

} // namespace

EvalReport evaluate(std::string method, std::vector<SeriesScore> method_rows, std::span<const SeriesScore> naive2_rows) {
	if (method_rows.size() != naive2_rows.size()) {
		throw MetricError("method and Naive2 rows differ in count");
	}
	EvalReport report;
	report.method = std::move(method);
	report.rows = std::move(method_rows);
	report.aggregate = aggregate(report.rows);
	report.naive2 = aggregate(naive2_rows);
	report.owa = owa_over(report.rows, naive2_rows, {});
	for (const auto& r : report.rows) {
		report.fallbacks += r.fallback ? 1 : 0;
	}

	std::map<std::string, std::vector<std::uint8_t>> members;
	for (std::size_t i = 0; i < report.rows.size(); ++i) {
		const auto& cat = report.rows[i].category;
		if (cat.empty()) {
			continue;
		}
		auto& keep = members[cat];
		keep.resize(report.rows.size(), 0);
		keep[i] = 1;
	}
	for (const auto& [cat, keep] : members) {
		CategoryBlock block;
		block.method = aggregate(report.rows, keep);
		block.naive2 = aggregate(naive2_rows, keep);
		block.owa = owa_over(report.rows, naive2_rows, keep);
		report.categories.emplace(cat, block);
	}
	return report;
}

nlohmann::json to_json(const Aggregate& agg) {
	return {{"smape", agg.smape},
	        {"mase", agg.mase},
	        {"smape_scored", agg.smape_scored},
	        {"series", agg.series},
	        {"degenerate", agg.degenerate}};
}

nlohmann::json to_json(const OwaReport& r) {
	return {{"smape_method", r.smape_method},
	        {"mase_method", r.mase_method},
	        {"smape_naive2", r.smape_naive2},
	        {"mase_naive2", r.mase_naive2},
	        {"owa", r.owa}};
}

nlohmann::json to_json(const EvalReport& report) {
	nlohmann::json j;
	j["method"] = report.method;
	j["aggregate"] = to_json(report.aggregate);
	j["naive2"] = to_json(report.naive2);
	j["owa"] = report.owa ? to_json(*report.owa) : nlohmann::json(nullptr);
	j["fallbacks"] = report.fallbacks;
	auto& rows = j["series"] = nlohmann::json::array();
	for (const auto& r : report.rows) {
		nlohmann::json row{{"id", r.id}, {"smape", r.smape}, {"degenerate", !r.mase.has_value()}};
		row["mase"] = r.mase ? nlohmann::json(*r.mase) : nlohmann::json(nullptr);
		if (!r.category.empty()) {
			row["category"] = r.category;
		}
		if (r.fallback) {
			row["fallback"] = true;
		}
		rows.push_back(std::move(row));
	}
	if (!report.categories.empty()) {
		auto& cats = j["categories"];
		for (const auto& [name, block] : report.categories) {
			cats[name] = {{"method", to_json(block.method)},
			              {"naive2", to_json(block.naive2)},
			              {"owa", block.owa ? to_json(*block.owa) : nlohmann::json(nullptr)}};
		}
	}
	return j;
}

} // namespace latentcast::metrics
