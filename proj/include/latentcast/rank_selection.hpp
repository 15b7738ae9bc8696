#pragma once

#include "latentcast/series.hpp"
#include "latentcast/trmf.hpp"

#include <iosfwd>
#include <vector>

namespace latentcast::rank {

/// Reconstruction error (aggregate MASE) per candidate rank.
struct ElbowCurve {
	std::vector<std::size_t> ks;
	std::vector<double> errors;
};

struct ElbowPick {
	std::size_t k = 0;
	std::size_t index = 0;
	bool flat = false; // no elbow: smallest K returned
};

/// Fits one factorization per K with otherwise identical settings (same
/// seed). K must be below min(N, T). Solver failures are rethrown with K.
ElbowCurve sweep(const SeriesMatrix& train, const std::vector<std::size_t>& ks, const trmf::TrmfConfig& config,
                 std::size_t threads = 1);

/**
 * @brief Kneedle-style elbow: the K furthest below the chord joining the first
 * and last points, in axes normalized to [0, 1].
 *
 * Needs at least 3 points with ascending K; ties go to the smaller K. A curve
 * with no point strictly below the chord returns the smallest K and flat.
 */
ElbowPick pick_elbow(const ElbowCurve& curve);

/// 2, 4, ..., 30.
std::vector<std::size_t> default_grid();

void write_csv(const ElbowCurve& curve, std::ostream& out);

} // namespace latentcast::rank
