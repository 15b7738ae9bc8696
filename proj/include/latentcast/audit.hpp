#pragma once

#include "latentcast/series.hpp"

#include <atomic>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace latentcast {

/**
 * @brief Records which data a fit was allowed to see.
 *
 * Fits obtain their history through AuditedSeries::fit_prefix, declaring the
 * first index they must not see (the validation or test start). Held-out test
 * values go through HeldOutPanel::reveal, which counts as a leak unless the
 * run has entered its evaluation stage. Thread-safe.
 */
class AccessAudit {
public:
	void record_fit_window(std::size_t end, std::size_t forbidden_from, std::string_view what = {});
	void record_holdout_read(std::string_view what = {});
	void begin_evaluation() { evaluating_.store(true); }
	bool evaluating() const { return evaluating_.load(); }

	std::size_t fit_reads() const { return fit_reads_.load(); }
	std::size_t holdout_reads() const { return holdout_reads_.load(); }
	std::size_t violations() const { return violations_.load(); }
	std::vector<std::string> violation_log() const;

private:
	void flag(std::string message);

	std::atomic<bool> evaluating_{false};
	std::atomic<std::size_t> fit_reads_{0};
	std::atomic<std::size_t> holdout_reads_{0};
	std::atomic<std::size_t> violations_{0};
	mutable std::mutex log_mutex_;
	std::vector<std::string> log_;
};

/// Read accessor over one series; audit may be null.
class AuditedSeries {
public:
	AuditedSeries(std::span<const double> data, AccessAudit* audit, std::string label = {})
	    : data_(data), audit_(audit), label_(std::move(label)) {}

	std::size_t size() const { return data_.size(); }
	/// Values [0, end) for fitting; data at forbidden_from and later must stay unseen.
	std::span<const double> fit_prefix(std::size_t end, std::size_t forbidden_from) const;
	/// Values [begin, begin + length) for scoring a forecast; not a fit read.
	std::span<const double> scoring_block(std::size_t begin, std::size_t length) const;

private:
	std::span<const double> data_;
	AccessAudit* audit_;
	std::string label_;
};

/// The held-out test block of a run.
class HeldOutPanel {
public:
	HeldOutPanel(SeriesMatrix test, AccessAudit* audit) : test_(std::move(test)), audit_(audit) {}

	std::size_t horizon() const { return test_.cols(); }
	std::size_t rows() const { return test_.rows(); }
	const SeriesMatrix& reveal(std::string_view what = {}) const;

private:
	SeriesMatrix test_;
	AccessAudit* audit_;
};

} // namespace latentcast
