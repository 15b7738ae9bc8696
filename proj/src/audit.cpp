#include "latentcast/audit.hpp"

namespace latentcast {

void AccessAudit::record_fit_window(std::size_t end, std::size_t forbidden_from, std::string_view what) {
	fit_reads_.fetch_add(1);
	if (end > forbidden_from) {
		flag("fit '" + std::string(what) + "' read up to index " + std::to_string(end) + " but index " +
		     std::to_string(forbidden_from) + " onward is held out");
	}
}

void AccessAudit::record_holdout_read(std::string_view what) {
	holdout_reads_.fetch_add(1);
	if (!evaluating()) {
		flag("held-out values read before evaluation by '" + std::string(what) + "'");
	}
}

std::vector<std::string> AccessAudit::violation_log() const {
	std::lock_guard lock(log_mutex_);
	return log_;
}

void AccessAudit::flag(std::string message) {
	violations_.fetch_add(1);
	std::lock_guard lock(log_mutex_);
	log_.push_back(std::move(message));
}

std::span<const double> AuditedSeries::fit_prefix(std::size_t end, std::size_t forbidden_from) const {
	if (end > data_.size()) {
		throw std::out_of_range("fit window beyond series end");
	}
	if (audit_ != nullptr) {
		audit_->record_fit_window(end, forbidden_from, label_);
	}
	return data_.first(end);
}

std::span<const double> AuditedSeries::scoring_block(std::size_t begin, std::size_t length) const {
	if (begin + length > data_.size()) {
		throw std::out_of_range("scoring block beyond series end");
	}
	return data_.subspan(begin, length);
}

const SeriesMatrix& HeldOutPanel::reveal(std::string_view what) const {
	if (audit_ != nullptr) {
		audit_->record_holdout_read(what);
	}
	return test_;
}

} // namespace latentcast
