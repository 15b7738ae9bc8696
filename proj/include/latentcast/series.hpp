#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace latentcast {

class DataError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

class SeriesView;

/**
 * @brief Panel of N series over T positional time steps with an observation mask.
 *
 * Values are stored row-major. Unobserved cells hold NaN and must be tested
 * through the mask; every observed cell is finite. Immutable once built.
 */
class SeriesMatrix {
public:
	SeriesMatrix() = default;
	SeriesMatrix(std::size_t rows, std::size_t cols, std::vector<double> values, std::vector<std::uint8_t> mask,
	             std::vector<std::string> ids, std::size_t period);

	/// Fully observed matrix from equal-length rows.
	static SeriesMatrix from_rows(const std::vector<std::vector<double>>& rows, std::vector<std::string> ids = {},
	                              std::size_t period = 1);

	std::size_t rows() const { return rows_; }
	std::size_t cols() const { return cols_; }
	std::size_t period() const { return period_; }
	bool empty() const { return rows_ == 0; }

	const std::string& id(std::size_t i) const { return ids_.at(i); }
	const std::vector<std::string>& ids() const { return ids_; }

	double value(std::size_t i, std::size_t t) const { return values_[i * cols_ + t]; }
	bool observed(std::size_t i, std::size_t t) const { return mask_[i * cols_ + t] != 0; }

	std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
	std::span<const std::uint8_t> mask_row(std::size_t i) const { return {mask_.data() + i * cols_, cols_}; }
	const std::vector<double>& values() const { return values_; }
	const std::vector<std::uint8_t>& mask() const { return mask_; }

	SeriesView view(std::size_t i) const;
	std::size_t observed_count(std::size_t i) const;
	std::size_t observed_count() const;
	bool fully_observed() const;

	SeriesMatrix select_rows(std::span<const std::size_t> indices) const;
	/// Copy with row i multiplied by factors[i]; the mask is preserved.
	SeriesMatrix scale_rows(std::span<const double> factors) const;
	SeriesMatrix with_period(std::size_t period) const;

private:
	std::size_t rows_ = 0;
	std::size_t cols_ = 0;
	std::vector<double> values_;
	std::vector<std::uint8_t> mask_;
	std::vector<std::string> ids_;
	std::size_t period_ = 1;
};

/// Read-only view of a single row.
class SeriesView {
public:
	SeriesView(std::span<const double> values, std::span<const std::uint8_t> mask, std::size_t period,
	           std::string_view id = {})
	    : values_(values), mask_(mask), period_(period), id_(id) {}

	std::size_t size() const { return values_.size(); }
	std::size_t period() const { return period_; }
	std::string_view id() const { return id_; }
	std::span<const double> values() const { return values_; }
	std::span<const std::uint8_t> mask() const { return mask_; }
	bool observed(std::size_t t) const { return mask_[t] != 0; }

	std::size_t observed_count() const;
	/// Observed values in time order with gaps removed.
	std::vector<double> observed_values() const;
	/// The trailing run of observed values after the last gap.
	std::vector<double> trailing_segment() const;

private:
	std::span<const double> values_;
	std::span<const std::uint8_t> mask_;
	std::size_t period_;
	std::string_view id_;
};

struct SplitSpec {
	std::size_t max_train = 60;
	std::size_t horizon = 12;
};

struct TrainTest {
	SeriesMatrix train;
	SeriesMatrix test;
};

struct RejectedSeries {
	std::string id;
	std::string reason;
};

struct LenientSplit {
	TrainTest parts;
	std::vector<std::size_t> kept; // source row of each output row
	std::vector<RejectedSeries> rejected;
};

/**
 * @brief Holds out the final `horizon` observations of every series.
 *
 * Each series is aligned on its last observed point: the test block is its
 * final `horizon` observations, the train block the up to `max_train`
 * columns before that. Shorter series are left-padded with unobserved cells
 * so all rows share the forecast origin. Throws DataError naming the first
 * series that is too short or has a gap inside its test block.
 */
TrainTest split(const SeriesMatrix& matrix, const SplitSpec& spec);

/// Same as split(), but collects unusable series instead of throwing.
LenientSplit split_lenient(const SeriesMatrix& matrix, const SplitSpec& spec);

/// output(i, t) = dot(F.col(i), X.col(t)); fully observed.
SeriesMatrix reconstruct(const Eigen::MatrixXd& factors, const Eigen::MatrixXd& temporal, std::vector<std::string> ids = {},
                         std::size_t period = 1);

} // namespace latentcast
