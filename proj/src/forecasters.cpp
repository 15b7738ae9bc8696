#include "latentcast/forecasters.hpp"

#include "latentcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

namespace latentcast::forecast {

void Forecaster::fit(std::span<const double> history, std::size_t period) {
	fitted_ = false;
	if (period == 0) {
		throw Inapplicable("period must be positive");
	}
	const std::size_t need = min_history(period);
	if (history.size() < need) {
		throw Inapplicable(name() + " needs at least " + std::to_string(need) + " points, got " +
		                   std::to_string(history.size()));
	}
	for (double v : history) {
		if (!std::isfinite(v)) {
			throw Inapplicable(name() + ": non-finite history");
		}
	}
	do_fit(history, period);
	fitted_ = true;
}

std::vector<double> Forecaster::predict(std::size_t horizon) const {
	if (!fitted_) {
		throw std::logic_error(name() + ": predict() called before fit()");
	}
	return do_predict(horizon);
}

ForecastResult fit_predict(const Forecaster& method, std::span<const double> history, std::size_t period,
                           std::size_t horizon) {
	ForecastResult out;
	if (horizon == 0) {
		out.inapplicable = "horizon must be positive";
		return out;
	}
	try {
		auto model = method.clone();
		model->fit(history, period);
		out.values = model->predict(horizon);
	} catch (const std::exception& e) {
		out.values.clear();
		out.inapplicable = e.what();
		return out;
	}
	if (out.values.size() != horizon) {
		out.values.clear();
		out.inapplicable = method.name() + ": wrong forecast length";
		return out;
	}
	for (double v : out.values) {
		if (!std::isfinite(v)) {
			out.values.clear();
			out.inapplicable = method.name() + ": non-finite forecast";
			break;
		}
	}
	return out;
}

ForecastResult fit_predict(const Forecaster& method, const SeriesView& history, std::size_t horizon) {
	const auto segment = history.trailing_segment();
	return fit_predict(method, segment, history.period(), horizon);
}

namespace {

constexpr std::size_t kGridSize = 19;

double grid_value(std::size_t i) {
	return 0.05 * static_cast<double>(i + 1);
}

double mean_of(std::span<const double> x) {
	return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

struct Line {
	double intercept = 0.0; // value at t = 0
	double slope = 0.0;
};

Line least_squares_line(std::span<const double> y) {
	const auto n = static_cast<double>(y.size());
	if (y.size() < 2) {
		return {y.empty() ? 0.0 : y[0], 0.0};
	}
	const double t_mean = (n - 1.0) / 2.0;
	const double y_mean = mean_of(y);
	double sxy = 0.0;
	double sxx = 0.0;
	for (std::size_t t = 0; t < y.size(); ++t) {
		const double dt = static_cast<double>(t) - t_mean;
		sxy += dt * (y[t] - y_mean);
		sxx += dt * dt;
	}
	const double slope = sxy / sxx;
	return {y_mean - slope * t_mean, slope};
}

// Simple exponential smoothing over the alpha grid; returns the final level.
double ses_level(std::span<const double> y) {
	double best_sse = std::numeric_limits<double>::infinity();
	double best_level = y.back();
	for (std::size_t g = 0; g < kGridSize; ++g) {
		const double alpha = grid_value(g);
		double level = y[0];
		double sse = 0.0;
		for (std::size_t t = 1; t < y.size(); ++t) {
			const double err = y[t] - level;
			sse += err * err;
			level += alpha * err;
		}
		if (sse < best_sse) {
			best_sse = sse;
			best_level = level;
		}
	}
	return best_level;
}

class MeanForecaster final : public Forecaster {
public:
	std::string name() const override { return "mean"; }
	std::size_t min_history(std::size_t) const override { return 1; }
	std::unique_ptr<Forecaster> clone() const override { return std::make_unique<MeanForecaster>(*this); }

protected:
	void do_fit(std::span<const double> y, std::size_t) override { mean_ = mean_of(y); }
	std::vector<double> do_predict(std::size_t h) const override { return std::vector<double>(h, mean_); }

private:
	double mean_ = 0.0;
};

class NaiveForecaster final : public Forecaster {
public:
	std::string name() const override { return "naive"; }
	std::size_t min_history(std::size_t) const override { return 1; }
	std::unique_ptr<Forecaster> clone() const override { return std::make_unique<NaiveForecaster>(*this); }

protected:
	void do_fit(std::span<const double> y, std::size_t) override { last_ = y.back(); }
	std::vector<double> do_predict(std::size_t h) const override { return std::vector<double>(h, last_); }

private:
	double last_ = 0.0;
};

class DriftForecaster final : public Forecaster {
public:
	std::string name() const override { return "drift"; }
	std::size_t min_history(std::size_t) const override { return 2; }
	std::unique_ptr<Forecaster> clone() const override { return std::make_unique<DriftForecaster>(*this); }

protected:
	void do_fit(std::span<const double> y, std::size_t) override {
		last_ = y.back();
		slope_ = (y.back() - y.front()) / static_cast<double>(y.size() - 1);
	}
	std::vector<double> do_predict(std::size_t h) const override {
		std::vector<double> out(h);
		for (std::size_t j = 0; j < h; ++j) {
			out[j] = last_ + slope_ * static_cast<double>(j + 1);
		}
		return out;
	}

private:
	double last_ = 0.0;
	double slope_ = 0.0;
};

class SeasonalNaiveForecaster final : public Forecaster {
public:
	std::string name() const override { return "snaive"; }
	std::size_t min_history(std::size_t period) const override { return period; }
	std::unique_ptr<Forecaster> clone() const override { return std::make_unique<SeasonalNaiveForecaster>(*this); }

protected:
	void do_fit(std::span<const double> y, std::size_t period) override {
		last_cycle_.assign(y.end() - static_cast<std::ptrdiff_t>(period), y.end());
	}
	std::vector<double> do_predict(std::size_t h) const override {
		std::vector<double> out(h);
		for (std::size_t j = 0; j < h; ++j) {
			out[j] = last_cycle_[j % last_cycle_.size()];
		}
		return out;
	}

private:
	std::vector<double> last_cycle_;
};

class SesForecaster final : public Forecaster {
public:
	std::string name() const override { return "ses"; }
	std::size_t min_history(std::size_t) const override { return 2; }
	std::unique_ptr<Forecaster> clone() const override { return std::make_unique<SesForecaster>(*this); }

protected:
	void do_fit(std::span<const double> y, std::size_t) override { level_ = ses_level(y); }
	std::vector<double> do_predict(std::size_t h) const override { return std::vector<double>(h, level_); }

private:
	double level_ = 0.0;
};

// Holt's linear method, optionally damped. Smoothing weights (and phi when
// damped) are picked from a grid by in-sample one-step SSE.
class HoltForecaster final : public Forecaster {
public:
	explicit HoltForecaster(bool damped, double fixed_phi = std::numeric_limits<double>::quiet_NaN())
	    : damped_(damped), fixed_phi_(fixed_phi) {}

	std::string name() const override { return damped_ ? "holt_damped" : "holt"; }
	std::size_t min_history(std::size_t) const override { return 3; }
	std::unique_ptr<Forecaster> clone() const override { return std::make_unique<HoltForecaster>(*this); }

protected:
	void do_fit(std::span<const double> y, std::size_t) override {
		std::vector<double> phis{1.0};
		if (damped_) {
			phis = std::isnan(fixed_phi_) ? std::vector<double>{0.8, 0.85, 0.9, 0.95, 0.98} : std::vector<double>{fixed_phi_};
		}
		const Line line = least_squares_line(y);
		double best = std::numeric_limits<double>::infinity();
		for (double phi : phis) {
			for (std::size_t a = 0; a < kGridSize; ++a) {
				for (std::size_t b = 0; b < kGridSize; ++b) {
					const double alpha = grid_value(a);
					const double beta = grid_value(b);
					double level = line.intercept;
					double trend = line.slope;
					double sse = 0.0;
					for (std::size_t t = 1; t < y.size(); ++t) {
						const double pred = level + phi * trend;
						const double err = y[t] - pred;
						sse += err * err;
						const double next_level = pred + alpha * err;
						trend = beta * (next_level - level) + (1.0 - beta) * phi * trend;
						level = next_level;
					}
					if (sse < best) {
						best = sse;
						level_ = level;
						trend_ = trend;
						phi_ = phi;
					}
				}
			}
		}
	}
	std::vector<double> do_predict(std::size_t h) const override {
		std::vector<double> out(h);
		double damp = 0.0;
		double power = 1.0;
		for (std::size_t j = 0; j < h; ++j) {
			power *= phi_;
			damp += power;
			out[j] = level_ + damp * trend_;
		}
		return out;
	}

private:
	bool damped_;
	double fixed_phi_;
	double level_ = 0.0;
	double trend_ = 0.0;
	double phi_ = 1.0;
};

// Holt-Winters with additive or multiplicative seasonality. The level and
// seasonal states start from the detrended first cycle, the trend from a
// least-squares line; alpha, beta and gamma are grid-searched.
class HoltWintersForecaster final : public Forecaster {
public:
	explicit HoltWintersForecaster(bool multiplicative) : multiplicative_(multiplicative) {}

	std::string name() const override { return multiplicative_ ? "hw_multiplicative" : "hw_additive"; }
	std::size_t min_history(std::size_t period) const override { return 2 * std::max<std::size_t>(period, 2); }
	std::unique_ptr<Forecaster> clone() const override { return std::make_unique<HoltWintersForecaster>(*this); }

protected:
	void do_fit(std::span<const double> y, std::size_t period) override {
		if (period < 2) {
			throw Inapplicable(name() + " needs a seasonal period of at least 2");
		}
		if (multiplicative_ && std::any_of(y.begin(), y.end(), [](double v) { return v <= 0.0; })) {
			throw Inapplicable(name() + " needs strictly positive data");
		}
		const std::size_t m = period;
		const double cycle_mean = mean_of(y.first(m));
		const double slope0 = least_squares_line(y).slope;
		const double mid = (static_cast<double>(m) - 1.0) / 2.0;
		const double level0 = cycle_mean + slope0 * mid;
		std::vector<double> season0(m);
		for (std::size_t j = 0; j < m; ++j) {
			const double base = cycle_mean + slope0 * (static_cast<double>(j) - mid);
			if (multiplicative_) {
				if (base <= 0.0) {
					throw Inapplicable(name() + ": non-positive initial level");
				}
				season0[j] = y[j] / base;
			} else {
				season0[j] = y[j] - base;
			}
		}

		double best = std::numeric_limits<double>::infinity();
		std::vector<double> season(m);
		for (std::size_t a = 0; a < kGridSize; ++a) {
			for (std::size_t b = 0; b < kGridSize; ++b) {
				for (std::size_t g = 0; g < kGridSize; ++g) {
					const double alpha = grid_value(a);
					const double beta = grid_value(b);
					const double gamma = grid_value(g);
					double level = level0;
					double trend = slope0;
					std::copy(season0.begin(), season0.end(), season.begin());
					double sse = 0.0;
					bool valid = true;
					for (std::size_t t = m; t < y.size() && sse < best; ++t) {
						double& s = season[t % m];
						const double base = level + trend;
						const double pred = multiplicative_ ? base * s : base + s;
						const double err = y[t] - pred;
						sse += err * err;
						double next_level = 0.0;
						if (multiplicative_) {
							next_level = alpha * (y[t] / s) + (1.0 - alpha) * base;
							if (!(next_level > 0.0)) {
								valid = false;
								break;
							}
							s = gamma * (y[t] / next_level) + (1.0 - gamma) * s;
						} else {
							next_level = alpha * (y[t] - s) + (1.0 - alpha) * base;
							s = gamma * (y[t] - next_level) + (1.0 - gamma) * s;
						}
						trend = beta * (next_level - level) + (1.0 - beta) * trend;
						level = next_level;
					}
					if (valid && sse < best) {
						best = sse;
						level_ = level;
						trend_ = trend;
						season_ = season;
					}
				}
			}
		}
		if (!std::isfinite(best)) {
			throw Inapplicable(name() + ": no valid smoothing parameters");
		}
		n_ = y.size();
	}
	std::vector<double> do_predict(std::size_t h) const override {
		const std::size_t m = season_.size();
		std::vector<double> out(h);
		for (std::size_t j = 0; j < h; ++j) {
			const double base = level_ + static_cast<double>(j + 1) * trend_;
			const double s = season_[(n_ + j) % m];
			out[j] = multiplicative_ ? base * s : base + s;
		}
		return out;
	}

private:
	bool multiplicative_;
	double level_ = 0.0;
	double trend_ = 0.0;
	std::vector<double> season_;
	std::size_t n_ = 0;
};

// Classic Theta: average of the extrapolated regression line (theta = 0) and
// SES on the theta = 2 line, after multiplicative seasonal adjustment when the
// seasonality test passes.
class ThetaForecaster final : public Forecaster {
public:
	std::string name() const override { return "theta"; }
	std::size_t min_history(std::size_t) const override { return 3; }
	std::unique_ptr<Forecaster> clone() const override { return std::make_unique<ThetaForecaster>(*this); }

protected:
	void do_fit(std::span<const double> y, std::size_t period) override {
		history_.assign(y.begin(), y.end());
		period_ = period;
	}
	std::vector<double> do_predict(std::size_t h) const override {
		const auto adj = metrics::seasonal_adjust(history_, period_, h);
		const auto& x = adj.adjusted;
		const Line line = least_squares_line(x);
		std::vector<double> theta2(x.size());
		for (std::size_t t = 0; t < x.size(); ++t) {
			theta2[t] = 2.0 * x[t] - (line.intercept + line.slope * static_cast<double>(t));
		}
		const double ses = ses_level(theta2);
		std::vector<double> out(h);
		const auto n = static_cast<double>(x.size());
		for (std::size_t j = 0; j < h; ++j) {
			const double trend_line = line.intercept + line.slope * (n - 1.0 + static_cast<double>(j + 1));
			out[j] = (0.5 * trend_line + 0.5 * ses) * adj.future_index[j];
		}
		return out;
	}

private:
	std::vector<double> history_;
	std::size_t period_ = 1;
};

struct LinearFit {
	double intercept = 0.0;
	std::vector<double> coefficients;
	double sse = 0.0;
};

// OLS of y_t on [1, y_{t-1}, ..., y_{t-p}] for t in [start, n).
LinearFit fit_ar(std::span<const double> y, std::size_t p, std::size_t start) {
	const std::size_t rows = y.size() - start;
	Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p + 1));
	Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
	for (std::size_t r = 0; r < rows; ++r) {
		const std::size_t t = start + r;
		const auto ri = static_cast<Eigen::Index>(r);
		design(ri, 0) = 1.0;
		for (std::size_t l = 1; l <= p; ++l) {
			design(ri, static_cast<Eigen::Index>(l)) = y[t - l];
		}
		target(ri) = y[t];
	}
	const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
	LinearFit fit;
	fit.intercept = beta(0);
	fit.coefficients.resize(p);
	for (std::size_t l = 0; l < p; ++l) {
		fit.coefficients[l] = beta(static_cast<Eigen::Index>(l + 1));
	}
	fit.sse = (design * beta - target).squaredNorm();
	return fit;
}

} // namespace

void ArForecaster::do_fit(std::span<const double> y, std::size_t) {
	const std::size_t n = y.size();
	std::size_t order = 0;
	if (fixed_order_ >= 0) {
		order = static_cast<std::size_t>(fixed_order_);
		if (n < 2 * order + 2) {
			throw Inapplicable("ar(" + std::to_string(order) + ") needs at least " + std::to_string(2 * order + 2) +
			                   " points");
		}
	} else {
		// Keep n_eff - k - 1 > 0 for the AICc correction at the largest order.
		const std::size_t cap = (n - 3) / 2;
		const std::size_t p_max = std::min(static_cast<std::size_t>(std::max(max_order_, 0)), cap);
		const auto n_eff = static_cast<double>(n - p_max);
		double best = std::numeric_limits<double>::infinity();
		bool first = true;
		for (std::size_t p = 0; p <= p_max; ++p) {
			const auto fit = fit_ar(y, p, p_max);
			const double k = static_cast<double>(p + 2);
			const double sigma2 = fit.sse / n_eff;
			const double aicc = (sigma2 > 0.0 ? n_eff * std::log(sigma2) : -std::numeric_limits<double>::infinity()) +
			                    2.0 * k + 2.0 * k * (k + 1.0) / (n_eff - k - 1.0);
			if (first || aicc < best) {
				best = aicc;
				order = p;
				first = false;
			}
		}
	}
	const auto fit = fit_ar(y, order, order);
	intercept_ = fit.intercept;
	coefficients_ = fit.coefficients;
	tail_.assign(y.end() - static_cast<std::ptrdiff_t>(order), y.end());
}

std::vector<double> ArForecaster::do_predict(std::size_t h) const {
	const std::size_t p = coefficients_.size();
	std::vector<double> buf = tail_;
	buf.reserve(p + h);
	for (std::size_t j = 0; j < h; ++j) {
		double v = intercept_;
		for (std::size_t l = 1; l <= p; ++l) {
			v += coefficients_[l - 1] * buf[buf.size() - l];
		}
		buf.push_back(v);
	}
	return {buf.end() - static_cast<std::ptrdiff_t>(h), buf.end()};
}

double guerrero_lambda(std::span<const double> x, std::size_t period, double lower, double upper) {
	const std::size_t width = std::max<std::size_t>(period, 2);
	const std::size_t groups = x.size() / width;
	if (groups < 2) {
		return 1.0;
	}
	const std::size_t offset = x.size() - groups * width;
	std::vector<double> means(groups);
	std::vector<double> sds(groups);
	for (std::size_t g = 0; g < groups; ++g) {
		const auto block = x.subspan(offset + g * width, width);
		const double mu = mean_of(block);
		double ss = 0.0;
		for (double v : block) {
			ss += (v - mu) * (v - mu);
		}
		means[g] = mu;
		sds[g] = std::sqrt(ss / static_cast<double>(width - 1));
	}
	if (std::all_of(sds.begin(), sds.end(), [](double s) { return s == 0.0; })) {
		return 1.0;
	}
	auto cv = [&](double lambda) {
		std::vector<double> ratio(groups);
		for (std::size_t g = 0; g < groups; ++g) {
			ratio[g] = sds[g] / std::pow(means[g], 1.0 - lambda);
		}
		const double mu = mean_of(ratio);
		double ss = 0.0;
		for (double r : ratio) {
			ss += (r - mu) * (r - mu);
		}
		return std::sqrt(ss / static_cast<double>(groups - 1)) / mu;
	};
	const auto result = boost::math::tools::brent_find_minima(cv, lower, upper, 40);
	return result.first;
}

std::vector<double> boxcox_transform(std::span<const double> x, double lambda) {
	std::vector<double> out(x.size());
	for (std::size_t i = 0; i < x.size(); ++i) {
		out[i] = lambda == 0.0 ? std::log(x[i]) : (std::pow(x[i], lambda) - 1.0) / lambda;
	}
	return out;
}

std::vector<double> boxcox_inverse(std::span<const double> z, double lambda) {
	std::vector<double> out(z.size());
	for (std::size_t i = 0; i < z.size(); ++i) {
		if (lambda == 0.0) {
			out[i] = std::exp(z[i]);
		} else {
			const double base = lambda * z[i] + 1.0;
			out[i] = base > 0.0 ? std::pow(base, 1.0 / lambda) : std::numeric_limits<double>::quiet_NaN();
		}
	}
	return out;
}

BoxCoxResult boxcox(std::span<const double> history, std::size_t period) {
	for (double v : history) {
		if (!(v > 0.0)) {
			throw Inapplicable("Box-Cox needs strictly positive data");
		}
	}
	BoxCoxResult out;
	out.lambda = guerrero_lambda(history, period);
	out.values = boxcox_transform(history, out.lambda);
	return out;
}

BoxCoxForecaster::BoxCoxForecaster(std::unique_ptr<Forecaster> inner, double lambda)
    : inner_(std::move(inner)), lambda_(lambda) {}

BoxCoxForecaster::BoxCoxForecaster(const BoxCoxForecaster& other)
    : Forecaster(other), inner_(other.inner_->clone()), lambda_(other.lambda_), fitted_lambda_(other.fitted_lambda_) {}

void BoxCoxForecaster::do_fit(std::span<const double> y, std::size_t period) {
	if (std::isnan(lambda_)) {
		const auto bc = boxcox(y, period);
		fitted_lambda_ = bc.lambda;
		inner_->fit(bc.values, period);
		return;
	}
	if (std::any_of(y.begin(), y.end(), [](double v) { return !(v > 0.0); })) {
		throw Inapplicable("Box-Cox needs strictly positive data");
	}
	fitted_lambda_ = lambda_;
	inner_->fit(boxcox_transform(y, lambda_), period);
}

std::vector<double> BoxCoxForecaster::do_predict(std::size_t h) const {
	return boxcox_inverse(inner_->predict(h), fitted_lambda_);
}

namespace {

double take(MethodParams& params, const std::string& key, double fallback) {
	const auto it = params.find(key);
	if (it == params.end()) {
		return fallback;
	}
	const double v = it->second;
	params.erase(it);
	return v;
}

void reject_leftovers(const std::string& method, const MethodParams& params) {
	if (!params.empty()) {
		throw std::invalid_argument("unknown parameter '" + params.begin()->first + "' for method " + method);
	}
}

} // namespace

std::unique_ptr<Forecaster> make_method(const std::string& name, const MethodParams& params_in) {
	MethodParams params = params_in;
	constexpr std::string_view kSuffix = "_boxcox";
	if (name.size() > kSuffix.size() && name.ends_with(kSuffix)) {
		const double lambda = take(params, "lambda", std::numeric_limits<double>::quiet_NaN());
		auto inner = make_method(name.substr(0, name.size() - kSuffix.size()), params);
		return std::make_unique<BoxCoxForecaster>(std::move(inner), lambda);
	}
	std::unique_ptr<Forecaster> out;
	if (name == "mean") {
		out = std::make_unique<MeanForecaster>();
	} else if (name == "naive") {
		out = std::make_unique<NaiveForecaster>();
	} else if (name == "drift") {
		out = std::make_unique<DriftForecaster>();
	} else if (name == "snaive") {
		out = std::make_unique<SeasonalNaiveForecaster>();
	} else if (name == "ses") {
		out = std::make_unique<SesForecaster>();
	} else if (name == "holt") {
		out = std::make_unique<HoltForecaster>(false);
	} else if (name == "holt_damped") {
		out = std::make_unique<HoltForecaster>(true, take(params, "phi", std::numeric_limits<double>::quiet_NaN()));
	} else if (name == "hw_additive") {
		out = std::make_unique<HoltWintersForecaster>(false);
	} else if (name == "hw_multiplicative") {
		out = std::make_unique<HoltWintersForecaster>(true);
	} else if (name == "ar") {
		const auto max_order = static_cast<int>(take(params, "max_order", 6));
		const auto order = static_cast<int>(take(params, "order", -1));
		out = std::make_unique<ArForecaster>(max_order, order);
	} else if (name == "theta") {
		out = std::make_unique<ThetaForecaster>();
	} else {
		throw std::invalid_argument("unknown forecasting method '" + name + "'");
	}
	reject_leftovers(name, params);
	return out;
}

std::vector<std::string> builtin_method_names() {
	return {"mean",  "naive",       "drift",       "snaive",      "ses",          "holt",
	        "holt_damped", "hw_additive", "hw_multiplicative", "ar", "theta", "ses_boxcox",
	        "ar_boxcox",   "theta_boxcox"};
}

void MethodMenu::add(std::string name, Factory factory) {
	if (find(name) != size()) {
		throw std::invalid_argument("duplicate method '" + name + "' in menu");
	}
	entries_.push_back({std::move(name), std::move(factory)});
}

void MethodMenu::add(std::unique_ptr<Forecaster> prototype) {
	std::shared_ptr<const Forecaster> proto(std::move(prototype));
	auto name = proto->name();
	add(std::move(name), [proto] { return proto->clone(); });
}

std::vector<std::string> MethodMenu::names() const {
	std::vector<std::string> out;
	out.reserve(entries_.size());
	for (const auto& e : entries_) {
		out.push_back(e.name);
	}
	return out;
}

std::size_t MethodMenu::find(const std::string& name) const {
	for (std::size_t i = 0; i < entries_.size(); ++i) {
		if (entries_[i].name == name) {
			return i;
		}
	}
	return entries_.size();
}

void MethodMenu::require_at_least(std::size_t minimum) const {
	if (entries_.size() < minimum) {
		throw std::invalid_argument("method menu needs at least " + std::to_string(minimum) + " methods, has " +
		                            std::to_string(entries_.size()));
	}
}

MethodMenu MethodMenu::builtin() {
	return from_names(builtin_method_names());
}

MethodMenu MethodMenu::from_names(const std::vector<std::string>& names,
                                  const std::map<std::string, MethodParams>& overrides) {
	MethodMenu menu;
	for (const auto& n : names) {
		MethodParams params;
		if (const auto it = overrides.find(n); it != overrides.end()) {
			params = it->second;
		}
		// Build once up front so bad names and parameters fail at menu construction.
		make_method(n, params);
		menu.add(n, [n, params] { return make_method(n, params); });
	}
	for (const auto& [n, _] : overrides) {
		if (menu.find(n) == menu.size()) {
			throw std::invalid_argument("parameter overrides given for method '" + n + "' which is not in the menu");
		}
	}
	return menu;
}

} // namespace latentcast::forecast
