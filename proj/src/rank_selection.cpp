#include "latentcast/rank_selection.hpp"

#include "latentcast/csv_io.hpp"
#include "latentcast/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace latentcast::rank {

ElbowCurve sweep(const SeriesMatrix& train, const std::vector<std::size_t>& ks, const trmf::TrmfConfig& config,
                 std::size_t threads) {
	if (ks.empty()) {
		throw std::invalid_argument("rank sweep needs at least one candidate K");
	}
	const std::size_t bound = std::min(train.rows(), train.cols());
	for (std::size_t i = 0; i < ks.size(); ++i) {
		if (ks[i] == 0 || ks[i] >= bound) {
			throw std::invalid_argument("candidate K=" + std::to_string(ks[i]) + " must lie in [1, min(N, T)) = [1, " +
			                            std::to_string(bound) + ")");
		}
		if (i > 0 && ks[i] <= ks[i - 1]) {
			throw std::invalid_argument("candidate ranks must be strictly ascending");
		}
	}
	ElbowCurve curve;
	curve.ks = ks;
	curve.errors.assign(ks.size(), 0.0);
	parallel_for(ks.size(), threads, [&](std::size_t i) {
		trmf::TrmfConfig cfg = config;
		cfg.rank = ks[i];
		cfg.threads = 1;
		try {
			const auto model = trmf::fit(train, cfg);
			curve.errors[i] = trmf::reconstruction_error(model, train).aggregate;
		} catch (const std::exception& e) {
			throw trmf::TrmfError("rank sweep at K=" + std::to_string(ks[i]) + ": " + e.what());
		}
	});
	return curve;
}

ElbowPick pick_elbow(const ElbowCurve& curve) {
	const std::size_t n = curve.ks.size();
	if (n != curve.errors.size()) {
		throw std::invalid_argument("elbow curve: ks and errors differ in length");
	}
	if (n < 3) {
		throw std::invalid_argument("elbow detection needs at least 3 candidate ranks, got " + std::to_string(n));
	}
	for (std::size_t i = 1; i < n; ++i) {
		if (curve.ks[i] <= curve.ks[i - 1]) {
			throw std::invalid_argument("elbow curve ranks must be strictly ascending");
		}
	}
	for (double e : curve.errors) {
		if (!std::isfinite(e)) {
			throw std::invalid_argument("elbow curve contains a non-finite error");
		}
	}
	const auto [lo, hi] = std::minmax_element(curve.errors.begin(), curve.errors.end());
	const double range = *hi - *lo;
	ElbowPick pick{curve.ks.front(), 0, true};
	if (!(range > 0.0)) {
		return pick;
	}
	const double x0 = static_cast<double>(curve.ks.front());
	const double xspan = static_cast<double>(curve.ks.back()) - x0;
	const double y0 = (curve.errors.front() - *lo) / range;
	const double y1 = (curve.errors.back() - *lo) / range;
	// Vertical gap to the chord; proportional to the perpendicular distance.
	constexpr double kTol = 1e-9;
	double best = kTol;
	for (std::size_t i = 1; i + 1 < n; ++i) {
		const double x = (static_cast<double>(curve.ks[i]) - x0) / xspan;
		const double y = (curve.errors[i] - *lo) / range;
		const double gap = (y0 + (y1 - y0) * x) - y;
		if (gap > best + kTol) {
			best = gap;
			pick = {curve.ks[i], i, false};
		}
	}
	return pick;
}

std::vector<std::size_t> default_grid() {
	std::vector<std::size_t> out;
	for (std::size_t k = 2; k <= 30; k += 2) {
		out.push_back(k);
	}
	return out;
}

void write_csv(const ElbowCurve& curve, std::ostream& out) {
	out << "k,mase\n";
	for (std::size_t i = 0; i < curve.ks.size(); ++i) {
		out << curve.ks[i] << ',' << io::format_double(curve.errors[i]) << '\n';
	}
}

} // namespace latentcast::rank
