#include "latentcast/series.hpp"

#include "latentcast/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace latentcast {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> default_ids(std::size_t n) {
	std::vector<std::string> ids;
	ids.reserve(n);
	for (std::size_t i = 0; i < n; ++i) {
		ids.push_back(std::to_string(i));
	}
	return ids;
}

} // namespace

SeriesMatrix::SeriesMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                           std::vector<std::uint8_t> mask, std::vector<std::string> ids, std::size_t period)
    : rows_(rows), cols_(cols), values_(std::move(values)), mask_(std::move(mask)), ids_(std::move(ids)),
      period_(period) {
	if (rows_ == 0 || cols_ == 0) {
		throw DataError("series matrix needs at least one row and one column");
	}
	if (values_.size() != rows_ * cols_ || mask_.size() != rows_ * cols_) {
		throw DataError("values and mask must both be rows x cols");
	}
	if (period_ == 0) {
		throw DataError("seasonal period must be positive");
	}
	if (ids_.empty()) {
		ids_ = default_ids(rows_);
	}
	if (ids_.size() != rows_) {
		throw DataError("expected one id per series");
	}
	std::unordered_set<std::string> seen;
	for (const auto& id : ids_) {
		if (!seen.insert(id).second) {
			throw DataError("duplicate series id '" + id + "'");
		}
	}
	for (std::size_t k = 0; k < values_.size(); ++k) {
		if (mask_[k] != 0) {
			mask_[k] = 1;
			if (!std::isfinite(values_[k])) {
				throw DataError("non-finite observed value in series '" + ids_[k / cols_] + "' at column " +
				                std::to_string(k % cols_ + 1));
			}
		} else {
			values_[k] = kMissing;
		}
	}
}

SeriesMatrix SeriesMatrix::from_rows(const std::vector<std::vector<double>>& rows, std::vector<std::string> ids,
                                     std::size_t period) {
	if (rows.empty()) {
		throw DataError("no rows given");
	}
	const std::size_t cols = rows.front().size();
	std::vector<double> values;
	values.reserve(rows.size() * cols);
	for (const auto& r : rows) {
		if (r.size() != cols) {
			throw DataError("rows differ in length");
		}
		values.insert(values.end(), r.begin(), r.end());
	}
	std::vector<std::uint8_t> mask(values.size(), 1);
	return SeriesMatrix(rows.size(), cols, std::move(values), std::move(mask), std::move(ids), period);
}

SeriesView SeriesMatrix::view(std::size_t i) const {
	return SeriesView(row(i), mask_row(i), period_, ids_[i]);
}

std::size_t SeriesMatrix::observed_count(std::size_t i) const {
	const auto m = mask_row(i);
	return static_cast<std::size_t>(std::count(m.begin(), m.end(), std::uint8_t{1}));
}

std::size_t SeriesMatrix::observed_count() const {
	return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

bool SeriesMatrix::fully_observed() const {
	return observed_count() == mask_.size();
}

SeriesMatrix SeriesMatrix::select_rows(std::span<const std::size_t> indices) const {
	std::vector<double> values;
	std::vector<std::uint8_t> mask;
	std::vector<std::string> ids;
	values.reserve(indices.size() * cols_);
	mask.reserve(indices.size() * cols_);
	for (std::size_t i : indices) {
		const auto r = row(i);
		const auto m = mask_row(i);
		values.insert(values.end(), r.begin(), r.end());
		mask.insert(mask.end(), m.begin(), m.end());
		ids.push_back(ids_.at(i));
	}
	return SeriesMatrix(indices.size(), cols_, std::move(values), std::move(mask), std::move(ids), period_);
}

SeriesMatrix SeriesMatrix::scale_rows(std::span<const double> factors) const {
	if (factors.size() != rows_) {
		throw DataError("one scale factor per row required");
	}
	std::vector<double> values = values_;
	for (std::size_t i = 0; i < rows_; ++i) {
		for (std::size_t t = 0; t < cols_; ++t) {
			values[i * cols_ + t] *= factors[i];
		}
	}
	return SeriesMatrix(rows_, cols_, std::move(values), mask_, ids_, period_);
}

SeriesMatrix SeriesMatrix::with_period(std::size_t period) const {
	return SeriesMatrix(rows_, cols_, values_, mask_, ids_, period);
}

std::size_t SeriesView::observed_count() const {
	return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::vector<double> SeriesView::observed_values() const {
	std::vector<double> out;
	out.reserve(values_.size());
	for (std::size_t t = 0; t < values_.size(); ++t) {
		if (mask_[t] != 0) {
			out.push_back(values_[t]);
		}
	}
	return out;
}

std::vector<double> SeriesView::trailing_segment() const {
	std::size_t end = values_.size();
	while (end > 0 && mask_[end - 1] == 0) {
		--end;
	}
	std::size_t begin = end;
	while (begin > 0 && mask_[begin - 1] != 0) {
		--begin;
	}
	return {values_.begin() + static_cast<std::ptrdiff_t>(begin), values_.begin() + static_cast<std::ptrdiff_t>(end)};
}

namespace {

struct RowWindow {
	std::size_t train_begin;
	std::size_t test_begin; // == train end
	std::size_t test_end;
};

// Returns an error message, or empty when the row is usable.
std::string locate_window(const SeriesMatrix& m, std::size_t i, const SplitSpec& spec, RowWindow& out) {
	const auto mask = m.mask_row(i);
	std::size_t last = mask.size();
	while (last > 0 && mask[last - 1] == 0) {
		--last;
	}
	std::size_t first = 0;
	while (first < last && mask[first] == 0) {
		++first;
	}
	const std::size_t observed = m.observed_count(i);
	if (observed <= spec.horizon) {
		return "series '" + m.id(i) + "' has " + std::to_string(observed) + " observed points, needs more than " +
		       std::to_string(spec.horizon);
	}
	const std::size_t test_begin = last - spec.horizon;
	for (std::size_t t = test_begin; t < last; ++t) {
		if (mask[t] == 0) {
			return "series '" + m.id(i) + "' has a missing value inside its test window";
		}
	}
	out.test_begin = test_begin;
	out.test_end = last;
	out.train_begin = std::max(first, test_begin >= spec.max_train ? test_begin - spec.max_train : std::size_t{0});
	return {};
}

TrainTest assemble(const SeriesMatrix& m, std::span<const std::size_t> rows, std::span<const RowWindow> windows,
                   const SplitSpec& spec) {
	std::size_t width = 1;
	for (const auto& w : windows) {
		width = std::max(width, w.test_begin - w.train_begin);
	}
	const std::size_t n = rows.size();
	std::vector<double> tv(n * width, kMissing);
	std::vector<std::uint8_t> tm(n * width, 0);
	std::vector<double> hv(n * spec.horizon);
	std::vector<std::uint8_t> hm(n * spec.horizon, 1);
	std::vector<std::string> ids;
	ids.reserve(n);
	for (std::size_t r = 0; r < n; ++r) {
		const std::size_t i = rows[r];
		const auto& w = windows[r];
		const auto values = m.row(i);
		const auto mask = m.mask_row(i);
		const std::size_t len = w.test_begin - w.train_begin;
		const std::size_t offset = width - len;
		for (std::size_t t = 0; t < len; ++t) {
			tv[r * width + offset + t] = values[w.train_begin + t];
			tm[r * width + offset + t] = mask[w.train_begin + t];
		}
		for (std::size_t t = 0; t < spec.horizon; ++t) {
			hv[r * spec.horizon + t] = values[w.test_begin + t];
		}
		ids.push_back(m.id(i));
	}
	auto test_ids = ids;
	return {SeriesMatrix(n, width, std::move(tv), std::move(tm), std::move(ids), m.period()),
	        SeriesMatrix(n, spec.horizon, std::move(hv), std::move(hm), std::move(test_ids), m.period())};
}

void check_spec(const SplitSpec& spec) {
	if (spec.horizon == 0 || spec.max_train == 0) {
		throw DataError("split needs positive horizon and max_train");
	}
}

} // namespace

TrainTest split(const SeriesMatrix& matrix, const SplitSpec& spec) {
	check_spec(spec);
	std::vector<std::size_t> rows(matrix.rows());
	std::vector<RowWindow> windows(matrix.rows());
	for (std::size_t i = 0; i < matrix.rows(); ++i) {
		rows[i] = i;
		if (auto err = locate_window(matrix, i, spec, windows[i]); !err.empty()) {
			throw DataError(err);
		}
	}
	return assemble(matrix, rows, windows, spec);
}

LenientSplit split_lenient(const SeriesMatrix& matrix, const SplitSpec& spec) {
	check_spec(spec);
	LenientSplit out;
	std::vector<RowWindow> windows;
	for (std::size_t i = 0; i < matrix.rows(); ++i) {
		RowWindow w{};
		if (auto err = locate_window(matrix, i, spec, w); !err.empty()) {
			out.rejected.push_back({matrix.id(i), std::move(err)});
			continue;
		}
		out.kept.push_back(i);
		windows.push_back(w);
	}
	if (out.kept.empty()) {
		throw DataError("no series long enough to split");
	}
	out.parts = assemble(matrix, out.kept, windows, spec);
	return out;
}

SeriesMatrix reconstruct(const Eigen::MatrixXd& factors, const Eigen::MatrixXd& temporal, std::vector<std::string> ids,
                         std::size_t period) {
	if (factors.rows() != temporal.rows()) {
		throw DataError("factor and temporal matrices disagree on the latent dimension (" +
		                std::to_string(factors.rows()) + " vs " + std::to_string(temporal.rows()) + ")");
	}
	const auto k = static_cast<std::size_t>(factors.rows());
	const auto n = static_cast<std::size_t>(factors.cols());
	const auto t_len = static_cast<std::size_t>(temporal.cols());
	std::vector<double> values(n * t_len);
	for (std::size_t i = 0; i < n; ++i) {
		const std::span<const double> f(factors.col(static_cast<Eigen::Index>(i)).data(), k);
		for (std::size_t t = 0; t < t_len; ++t) {
			const std::span<const double> x(temporal.col(static_cast<Eigen::Index>(t)).data(), k);
			values[i * t_len + t] = kernels::dot(f, x);
		}
	}
	std::vector<std::uint8_t> mask(values.size(), 1);
	return SeriesMatrix(n, t_len, std::move(values), std::move(mask), std::move(ids), period);
}

} // namespace latentcast
