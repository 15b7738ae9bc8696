#pragma once

#include "latentcast/series.hpp"

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace latentcast::forecast {

/// Raised by a method that cannot be fitted to the given history.
class Inapplicable : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/**
 * @brief Univariate forecasting method with a fit/predict contract.
 *
 * fit() validates the history against min_history() and finiteness before
 * delegating to the method. predict() on an unfitted instance throws
 * std::logic_error. Fitting is deterministic.
 */
class Forecaster {
public:
	virtual ~Forecaster() = default;

	virtual std::string name() const = 0;
	virtual std::size_t min_history(std::size_t period) const = 0;
	virtual std::unique_ptr<Forecaster> clone() const = 0;

	void fit(std::span<const double> history, std::size_t period);
	std::vector<double> predict(std::size_t horizon) const;
	bool fitted() const { return fitted_; }

protected:
	virtual void do_fit(std::span<const double> history, std::size_t period) = 0;
	virtual std::vector<double> do_predict(std::size_t horizon) const = 0;

private:
	bool fitted_ = false;
};

struct ForecastResult {
	std::vector<double> values;
	std::string inapplicable; // reason; empty when values are usable

	bool ok() const { return inapplicable.empty(); }
};

/// Fits a fresh copy of `method` and forecasts `horizon` steps. Never throws
/// for method failures: those, and any non-finite output, become inapplicable.
ForecastResult fit_predict(const Forecaster& method, std::span<const double> history, std::size_t period,
                           std::size_t horizon);
/// Uses the trailing gap-free segment of the view.
ForecastResult fit_predict(const Forecaster& method, const SeriesView& history, std::size_t horizon);

/// Per-method numeric overrides, e.g. {"max_order", 4}.
using MethodParams = std::map<std::string, double>;

/**
 * @brief Builds a method by name.
 *
 * Known names: mean, naive, drift, snaive, ses, holt, holt_damped,
 * hw_additive, hw_multiplicative, ar, theta. A "_boxcox" suffix wraps the
 * method in an automatic Box-Cox transform. Throws std::invalid_argument for
 * unknown names or parameters.
 */
std::unique_ptr<Forecaster> make_method(const std::string& name, const MethodParams& params = {});
std::vector<std::string> builtin_method_names();

/// Ordered, uniquely named list of method constructors.
class MethodMenu {
public:
	using Factory = std::function<std::unique_ptr<Forecaster>()>;

	void add(std::string name, Factory factory);
	void add(std::unique_ptr<Forecaster> prototype);

	std::size_t size() const { return entries_.size(); }
	const std::string& name(std::size_t i) const { return entries_.at(i).name; }
	std::vector<std::string> names() const;
	std::unique_ptr<Forecaster> make(std::size_t i) const { return entries_.at(i).factory(); }
	/// Index of `name`, or size() when absent.
	std::size_t find(const std::string& name) const;

	/// Throws std::invalid_argument unless the menu has at least `minimum` methods.
	void require_at_least(std::size_t minimum) const;

	static MethodMenu builtin();
	static MethodMenu from_names(const std::vector<std::string>& names,
	                             const std::map<std::string, MethodParams>& overrides = {});

private:
	struct Entry {
		std::string name;
		Factory factory;
	};
	std::vector<Entry> entries_;
};

// Methods with inspectable fits.

class ArForecaster final : public Forecaster {
public:
	/// order < 0 selects the order by AICc over 0..max_order.
	explicit ArForecaster(int max_order = 6, int order = -1) : max_order_(max_order), fixed_order_(order) {}

	std::string name() const override { return "ar"; }
	std::size_t min_history(std::size_t) const override { return 3; }
	std::unique_ptr<Forecaster> clone() const override { return std::make_unique<ArForecaster>(*this); }

	std::size_t order() const { return coefficients_.size(); }
	double intercept() const { return intercept_; }
	const std::vector<double>& coefficients() const { return coefficients_; }

protected:
	void do_fit(std::span<const double> history, std::size_t period) override;
	std::vector<double> do_predict(std::size_t horizon) const override;

private:
	int max_order_;
	int fixed_order_;
	double intercept_ = 0.0;
	std::vector<double> coefficients_;
	std::vector<double> tail_;
};

struct BoxCoxResult {
	std::vector<double> values;
	double lambda = 1.0;
};

/// Guerrero coefficient-of-variation lambda over [lower, upper]; 1 when undetermined.
double guerrero_lambda(std::span<const double> x, std::size_t period, double lower = -1.0, double upper = 2.0);
std::vector<double> boxcox_transform(std::span<const double> x, double lambda);
std::vector<double> boxcox_inverse(std::span<const double> z, double lambda);
/// Automatic Box-Cox of a strictly positive history; throws Inapplicable otherwise.
BoxCoxResult boxcox(std::span<const double> history, std::size_t period);

/// Wraps a method in a Box-Cox transform; lambda NaN means automatic.
class BoxCoxForecaster final : public Forecaster {
public:
	BoxCoxForecaster(std::unique_ptr<Forecaster> inner, double lambda);
	BoxCoxForecaster(const BoxCoxForecaster& other);

	std::string name() const override { return inner_->name() + "_boxcox"; }
	std::size_t min_history(std::size_t period) const override { return inner_->min_history(period); }
	std::unique_ptr<Forecaster> clone() const override { return std::make_unique<BoxCoxForecaster>(*this); }
	double lambda() const { return fitted_lambda_; }

protected:
	void do_fit(std::span<const double> history, std::size_t period) override;
	std::vector<double> do_predict(std::size_t horizon) const override;

private:
	std::unique_ptr<Forecaster> inner_;
	double lambda_;
	double fitted_lambda_ = 1.0;
};

} // namespace latentcast::forecast
