#include "latentcast/rank_selection.hpp"

#include "latentcast/synthetic.hpp"

#include <doctest.h>

#include <sstream>

using namespace latentcast;

TEST_CASE("hand-computed elbow") {
	const auto pick = rank::pick_elbow({{1, 2, 3, 4, 5}, {10, 2, 1.9, 1.8, 1.7}});
	CHECK(pick.k == 2);
	CHECK_FALSE(pick.flat);
}

TEST_CASE("a straight line has no elbow") {
	const auto pick = rank::pick_elbow({{2, 4, 6, 8}, {4, 3, 2, 1}});
	CHECK(pick.k == 2);
	CHECK(pick.flat);
	const auto constant = rank::pick_elbow({{1, 2, 3}, {1, 1, 1}});
	CHECK(constant.k == 1);
	CHECK(constant.flat);
}

TEST_CASE("too few points are refused") {
	CHECK_THROWS(rank::pick_elbow({{1}, {3.0}}));
	CHECK_THROWS(rank::pick_elbow({{1, 2}, {3.0, 1.0}}));
	CHECK_THROWS(rank::pick_elbow({{3, 2, 1}, {3.0, 2.0, 1.0}}));
}

TEST_CASE("elbow is invariant under affine rescaling of errors") {
	const rank::ElbowCurve c{{2, 4, 6, 8, 10, 12}, {5.0, 3.1, 1.2, 1.0, 0.9, 0.85}};
	const auto base = rank::pick_elbow(c).k;
	for (auto [a, b] : {std::pair{3.0, 0.0}, std::pair{0.01, 7.0}, std::pair{250.0, -3.0}}) {
		rank::ElbowCurve s = c;
		for (auto& e : s.errors) {
			e = a * e + b;
		}
		CHECK(rank::pick_elbow(s).k == base);
	}
}

TEST_CASE("a flat tail beyond the elbow does not move it") {
	rank::ElbowCurve c{{1, 2, 3, 4, 5}, {10, 2, 1.9, 1.8, 1.7}};
	for (std::size_t k = 6; k <= 12; ++k) {
		c.ks.push_back(k);
		c.errors.push_back(1.7);
		CHECK(rank::pick_elbow(c).k == 2);
	}
}

TEST_CASE("a curve bending between 12 and 20 picks a K there") {
	rank::ElbowCurve c;
	for (std::size_t k : rank::default_grid()) {
		c.ks.push_back(k);
		const double kk = static_cast<double>(k);
		c.errors.push_back(kk < 16 ? 2.0 - 0.1 * kk : 0.4 - 0.005 * (kk - 16));
	}
	const auto pick = rank::pick_elbow(c);
	CHECK(pick.k >= 12);
	CHECK(pick.k <= 20);
}

TEST_CASE("sweep on exact rank-3 data decreases to 3 and flattens") {
	const auto panel = synth::low_rank_panel(30, 40, 3, 0.01, 77);
	trmf::TrmfConfig cfg;
	const auto curve = rank::sweep(panel.data, {1, 2, 3, 4, 5, 6}, cfg, 2);
	REQUIRE(curve.errors.size() == 6);
	CHECK(curve.errors[0] > curve.errors[1]);
	CHECK(curve.errors[1] > curve.errors[2]);
	for (std::size_t i = 3; i < 6; ++i) {
		CHECK(curve.errors[i] <= curve.errors[i - 1] * 1.05);
		CHECK(curve.errors[i] < 0.5 * curve.errors[1]);
	}
	CHECK(rank::pick_elbow(curve).k == 3);
	std::ostringstream csv;
	rank::write_csv(curve, csv);
	CHECK(csv.str().rfind("k,mase\n1,", 0) == 0);
}

TEST_CASE("sweep rejects ranks outside [1, min(N, T))") {
	const auto panel = synth::low_rank_panel(5, 40, 2, 0.01, 1);
	CHECK_THROWS(rank::sweep(panel.data, {2, 5}, {}));
	CHECK_THROWS(rank::sweep(panel.data, {0, 2}, {}));
	CHECK(rank::default_grid().front() == 2);
	CHECK(rank::default_grid().back() == 30);
}
