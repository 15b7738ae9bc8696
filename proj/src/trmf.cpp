#include "latentcast/trmf.hpp"

#include "latentcast/audit.hpp"
#include "latentcast/csv_io.hpp"
#include "latentcast/kernels.hpp"
#include "latentcast/metrics.hpp"
#include "latentcast/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Cholesky>

namespace latentcast::trmf {

std::size_t TrmfConfig::max_lag() const {
	return lags.empty() ? 0 : *std::max_element(lags.begin(), lags.end());
}

void TrmfConfig::validate(std::size_t n_series, std::size_t n_times) const {
	if (rank == 0) {
		throw TrmfError("rank must be at least 1");
	}
	if (lambda_f < 0.0 || lambda_x < 0.0 || lambda_theta < 0.0 || eta < 0.0) {
		throw TrmfError("regularization weights must be non-negative");
	}
	if (!(tolerance > 0.0)) {
		throw TrmfError("tolerance must be positive");
	}
	if (!(init_scale > 0.0)) {
		throw TrmfError("init_scale must be positive");
	}
	std::set<std::size_t> unique(lags.begin(), lags.end());
	if (unique.size() != lags.size() || unique.count(0) != 0) {
		throw TrmfError("lags must be distinct positive integers");
	}
	if (!std::is_sorted(lags.begin(), lags.end())) {
		throw TrmfError("lags must be in ascending order");
	}
	if (n_series == 0 || n_times == 0) {
		throw TrmfError("empty training panel");
	}
	if (!lags.empty() && n_times < max_lag() + 2) {
		throw TrmfError("training panel has " + std::to_string(n_times) + " columns; lag " +
		                std::to_string(max_lag()) + " needs at least " + std::to_string(max_lag() + 2));
	}
}

ObjectiveTerms objective(const SeriesMatrix& y, const Eigen::MatrixXd& factors, const Eigen::MatrixXd& temporal,
                         const Eigen::MatrixXd& theta, const TrmfConfig& config) {
	const auto k = static_cast<std::size_t>(factors.rows());
	ObjectiveTerms terms;
	for (std::size_t i = 0; i < y.rows(); ++i) {
		const std::span<const double> f(factors.col(static_cast<Eigen::Index>(i)).data(), k);
		for (std::size_t t = 0; t < y.cols(); ++t) {
			if (!y.observed(i, t)) {
				continue;
			}
			const std::span<const double> x(temporal.col(static_cast<Eigen::Index>(t)).data(), k);
			const double r = y.value(i, t) - kernels::dot(f, x);
			terms.fit += r * r;
		}
	}
	terms.factor_penalty = config.lambda_f * factors.squaredNorm();
	terms.temporal_ridge = config.lambda_x * config.eta * temporal.squaredNorm();
	terms.theta_penalty = config.lambda_theta * theta.squaredNorm();
	if (!config.lags.empty() && config.lambda_x > 0.0) {
		const std::size_t lmax = config.max_lag();
		double ar = 0.0;
		for (Eigen::Index d = 0; d < temporal.rows(); ++d) {
			for (auto s = static_cast<Eigen::Index>(lmax); s < temporal.cols(); ++s) {
				double pred = 0.0;
				for (std::size_t j = 0; j < config.lags.size(); ++j) {
					pred += theta(d, static_cast<Eigen::Index>(j)) * temporal(d, s - static_cast<Eigen::Index>(config.lags[j]));
				}
				const double r = temporal(d, s) - pred;
				ar += r * r;
			}
		}
		terms.ar_penalty = config.lambda_x * ar;
	}
	return terms;
}

namespace {

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs, const char* what) {
	Eigen::LLT<Eigen::MatrixXd> llt(gram);
	if (llt.info() != Eigen::Success) {
		throw TrmfError(std::string("singular ") + what + " solve; add regularization");
	}
	Eigen::VectorXd sol = llt.solve(rhs);
	if (!sol.allFinite()) {
		throw TrmfError(std::string("singular ") + what + " solve; add regularization");
	}
	return sol;
}

// Projected coordinate descent on 0.5 v'Gv - rhs'v over v >= 0, starting
// from the (feasible) current v. Each coordinate step is an exact minimizer,
// so the block objective never increases.
void solve_nonnegative(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs, Eigen::Ref<Eigen::VectorXd> v) {
	constexpr int kSweeps = 200;
	for (int sweep = 0; sweep < kSweeps; ++sweep) {
		double change = 0.0;
		for (Eigen::Index j = 0; j < v.size(); ++j) {
			const double gjj = gram(j, j);
			if (!(gjj > 0.0)) {
				continue;
			}
			const double r = rhs(j) - gram.col(j).dot(v) + gjj * v(j);
			const double next = std::max(0.0, r / gjj);
			change = std::max(change, std::abs(next - v(j)));
			v(j) = next;
		}
		if (change <= 1e-13 * (1.0 + v.lpNorm<Eigen::Infinity>())) {
			break;
		}
	}
}

class Solver {
public:
	Solver(const SeriesMatrix& y, const TrmfConfig& cfg)
	    : y_(y), cfg_(cfg), n_(y.rows()), t_(y.cols()), k_(cfg.rank), lmax_(cfg.max_lag()),
	      row_count_(n_, 0), col_count_(t_, 0) {
		for (std::size_t i = 0; i < n_; ++i) {
			for (std::size_t t = 0; t < t_; ++t) {
				if (y.observed(i, t)) {
					++row_count_[i];
					++col_count_[t];
				}
			}
		}
	}

	void initialize(TrmfModel& m) const {
		std::mt19937_64 rng(cfg_.seed);
		std::normal_distribution<double> normal(0.0, cfg_.init_scale);
		m.factors.resize(static_cast<Eigen::Index>(k_), static_cast<Eigen::Index>(n_));
		m.temporal.resize(static_cast<Eigen::Index>(k_), static_cast<Eigen::Index>(t_));
		for (Eigen::Index c = 0; c < m.factors.cols(); ++c) {
			for (Eigen::Index r = 0; r < m.factors.rows(); ++r) {
				m.factors(r, c) = normal(rng);
			}
		}
		for (Eigen::Index c = 0; c < m.temporal.cols(); ++c) {
			for (Eigen::Index r = 0; r < m.temporal.rows(); ++r) {
				m.temporal(r, c) = normal(rng);
			}
		}
		if (cfg_.nonnegative_factors) {
			m.factors = m.factors.cwiseAbs();
			m.temporal = m.temporal.cwiseAbs();
		}
		for (std::size_t i = 0; i < n_; ++i) {
			if (row_count_[i] == 0) {
				m.factors.col(static_cast<Eigen::Index>(i)).setZero();
			}
		}
		const auto p = static_cast<Eigen::Index>(cfg_.lags.size());
		m.theta = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(k_), p, p > 0 ? 1.0 / static_cast<double>(p) : 0.0);
	}

	double total(const TrmfModel& m) const {
		return objective(y_, m.factors, m.temporal, m.theta, cfg_).total();
	}

	void update_factors(TrmfModel& m) const {
		const auto kk = static_cast<Eigen::Index>(k_);
		Eigen::MatrixXd shared = Eigen::MatrixXd::Zero(kk, kk);
		for (std::size_t t = 0; t < t_; ++t) {
			kernels::syr(1.0, column(m.temporal, t), gram_span(shared));
		}
		shared.diagonal().array() += cfg_.lambda_f;

		parallel_for(n_, cfg_.threads, [&](std::size_t i) {
			auto f = m.factors.col(static_cast<Eigen::Index>(i));
			if (row_count_[i] == 0) {
				f.setZero();
				return;
			}
			Eigen::VectorXd rhs = Eigen::VectorXd::Zero(kk);
			Eigen::MatrixXd own;
			const bool full = row_count_[i] == t_;
			if (!full) {
				own = Eigen::MatrixXd::Zero(kk, kk);
				own.diagonal().array() += cfg_.lambda_f;
			}
			for (std::size_t t = 0; t < t_; ++t) {
				if (!y_.observed(i, t)) {
					continue;
				}
				const auto x = column(m.temporal, t);
				kernels::axpy(y_.value(i, t), x, {rhs.data(), k_});
				if (!full) {
					kernels::syr(1.0, x, gram_span(own));
				}
			}
			const Eigen::MatrixXd& gram = full ? shared : own;
			if (cfg_.nonnegative_factors) {
				Eigen::VectorXd v = f;
				solve_nonnegative(gram, rhs, v);
				f = v;
			} else {
				f = solve_spd(gram, rhs, "factor");
			}
		});
	}

	void update_temporal(TrmfModel& m) const {
		const auto kk = static_cast<Eigen::Index>(k_);
		Eigen::MatrixXd shared = Eigen::MatrixXd::Zero(kk, kk);
		for (std::size_t i = 0; i < n_; ++i) {
			kernels::syr(1.0, column(m.factors, i), gram_span(shared));
		}
		Eigen::MatrixXd gram(kk, kk);
		Eigen::VectorXd rhs(kk);
		auto& x_mat = m.temporal;
		const auto& theta = m.theta;
		const auto& lags = cfg_.lags;
		const auto tt = static_cast<Eigen::Index>(t_);
		for (std::size_t t = 0; t < t_; ++t) {
			const auto tc = static_cast<Eigen::Index>(t);
			rhs.setZero();
			if (col_count_[t] == n_) {
				gram = shared;
			} else {
				gram.setZero();
			}
			for (std::size_t i = 0; i < n_; ++i) {
				if (!y_.observed(i, t)) {
					continue;
				}
				const auto f = column(m.factors, i);
				kernels::axpy(y_.value(i, t), f, {rhs.data(), k_});
				if (col_count_[t] != n_) {
					kernels::syr(1.0, f, gram_span(gram));
				}
			}
			if (cfg_.lambda_x > 0.0) {
				for (Eigen::Index d = 0; d < kk; ++d) {
					double diag = cfg_.eta;
					double target = 0.0;
					if (!lags.empty() && t >= lmax_) {
						diag += 1.0;
						for (std::size_t j = 0; j < lags.size(); ++j) {
							target += theta(d, static_cast<Eigen::Index>(j)) *
							          x_mat(d, tc - static_cast<Eigen::Index>(lags[j]));
						}
					}
					for (std::size_t j = 0; j < lags.size(); ++j) {
						const auto s = tc + static_cast<Eigen::Index>(lags[j]);
						if (s < static_cast<Eigen::Index>(lmax_) || s >= tt) {
							continue;
						}
						const double w = theta(d, static_cast<Eigen::Index>(j));
						double rest = x_mat(d, s);
						for (std::size_t q = 0; q < lags.size(); ++q) {
							if (q != j) {
								rest -= theta(d, static_cast<Eigen::Index>(q)) * x_mat(d, s - static_cast<Eigen::Index>(lags[q]));
							}
						}
						diag += w * w;
						target += w * rest;
					}
					gram(d, d) += cfg_.lambda_x * diag;
					rhs(d) += cfg_.lambda_x * target;
				}
			}
			if (cfg_.nonnegative_factors) {
				Eigen::VectorXd v = x_mat.col(tc);
				solve_nonnegative(gram, rhs, v);
				x_mat.col(tc) = v;
			} else {
				x_mat.col(tc) = solve_spd(gram, rhs, "temporal");
			}
		}
	}

	void update_theta(TrmfModel& m) const {
		const auto p = static_cast<Eigen::Index>(cfg_.lags.size());
		if (p == 0) {
			return;
		}
		if (!(cfg_.lambda_x > 0.0)) {
			// theta only enters through its own penalty.
			if (cfg_.lambda_theta > 0.0) {
				m.theta.setZero();
			}
			return;
		}
		const auto& x_mat = m.temporal;
		parallel_for(k_, cfg_.threads, [&](std::size_t dim) {
			const auto d = static_cast<Eigen::Index>(dim);
			Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(p, p);
			Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
			Eigen::VectorXd lagged(p);
			for (auto s = static_cast<Eigen::Index>(lmax_); s < x_mat.cols(); ++s) {
				for (Eigen::Index j = 0; j < p; ++j) {
					lagged(j) = x_mat(d, s - static_cast<Eigen::Index>(cfg_.lags[static_cast<std::size_t>(j)]));
				}
				kernels::syr(cfg_.lambda_x, {lagged.data(), static_cast<std::size_t>(p)}, gram_span(normal));
				rhs += cfg_.lambda_x * x_mat(d, s) * lagged;
			}
			normal.diagonal().array() += cfg_.lambda_theta;
			m.theta.row(d) = solve_spd(normal, rhs, "autoregressive").transpose();
		});
	}

private:
	static std::span<const double> column(const Eigen::MatrixXd& m, std::size_t c) {
		return {m.col(static_cast<Eigen::Index>(c)).data(), static_cast<std::size_t>(m.rows())};
	}
	static std::span<double> gram_span(Eigen::MatrixXd& g) {
		return {g.data(), static_cast<std::size_t>(g.size())};
	}

	const SeriesMatrix& y_;
	const TrmfConfig& cfg_;
	std::size_t n_;
	std::size_t t_;
	std::size_t k_;
	std::size_t lmax_;
	std::vector<std::size_t> row_count_;
	std::vector<std::size_t> col_count_;
};

} // namespace

TrmfModel fit(const SeriesMatrix& train, const TrmfConfig& config, AccessAudit* audit) {
	config.validate(train.rows(), train.cols());
	if (audit != nullptr) {
		audit->record_fit_window(train.cols(), train.cols(), "trmf");
	}
	Solver solver(train, config);
	TrmfModel model;
	model.config = config;
	solver.initialize(model);

	double previous = solver.total(model);
	for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
		if (config.check_blocks) {
			double before = previous;
			solver.update_factors(model);
			double after = solver.total(model);
			model.block_trace.push_back({iter, 'F', before, after});
			before = after;
			solver.update_temporal(model);
			after = solver.total(model);
			model.block_trace.push_back({iter, 'X', before, after});
			before = after;
			solver.update_theta(model);
			after = solver.total(model);
			model.block_trace.push_back({iter, 'T', before, after});
		} else {
			solver.update_factors(model);
			solver.update_temporal(model);
			solver.update_theta(model);
		}
		const double current = solver.total(model);
		if (!std::isfinite(current)) {
			throw TrmfError("objective became non-finite at iteration " + std::to_string(iter));
		}
		model.objective_trace.push_back(current);
		const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
		const double relative_decrease = (previous - current) / scale;
		previous = current;
		if (relative_decrease < config.tolerance) {
			model.converged = true;
			break;
		}
	}
	return model;
}

Eigen::MatrixXd ar_forecast(const Eigen::MatrixXd& theta, std::span<const std::size_t> lags,
                            const Eigen::MatrixXd& history, std::size_t horizon) {
	if (theta.cols() != static_cast<Eigen::Index>(lags.size()) || theta.rows() != history.rows()) {
		throw TrmfError("AR weights do not match the latent history");
	}
	const std::size_t lmax = lags.empty() ? 0 : *std::max_element(lags.begin(), lags.end());
	const auto len = static_cast<std::size_t>(history.cols());
	if (len < lmax) {
		throw TrmfError("latent history shorter than the largest lag");
	}
	const auto h = static_cast<Eigen::Index>(horizon);
	Eigen::MatrixXd extended(history.rows(), history.cols() + h);
	extended.leftCols(history.cols()) = history;
	for (Eigen::Index step = 0; step < h; ++step) {
		const Eigen::Index s = history.cols() + step;
		for (Eigen::Index d = 0; d < history.rows(); ++d) {
			double v = 0.0;
			for (std::size_t j = 0; j < lags.size(); ++j) {
				v += theta(d, static_cast<Eigen::Index>(j)) * extended(d, s - static_cast<Eigen::Index>(lags[j]));
			}
			extended(d, s) = v;
		}
	}
	return extended.rightCols(h);
}

Eigen::MatrixXd ar_forecast(const TrmfModel& model, std::size_t horizon) {
	if (model.temporal.size() == 0) {
		throw TrmfError("model is not fitted");
	}
	return ar_forecast(model.theta, model.config.lags, model.temporal, horizon);
}

ReconstructionError reconstruction_error(const TrmfModel& model, const SeriesMatrix& train) {
	if (model.series() != train.rows() || model.length() != train.cols()) {
		throw TrmfError("model and training panel differ in shape");
	}
	const std::size_t k = model.rank();
	ReconstructionError out;
	out.per_series.resize(train.rows());
	double total = 0.0;
	std::size_t scored = 0;
	for (std::size_t i = 0; i < train.rows(); ++i) {
		const auto scale = metrics::mase_scale(train.view(i));
		if (!scale) {
			++out.degenerate;
			continue;
		}
		const std::span<const double> f(model.factors.col(static_cast<Eigen::Index>(i)).data(), k);
		double abs_err = 0.0;
		std::size_t count = 0;
		for (std::size_t t = 0; t < train.cols(); ++t) {
			if (!train.observed(i, t)) {
				continue;
			}
			const std::span<const double> x(model.temporal.col(static_cast<Eigen::Index>(t)).data(), k);
			abs_err += std::abs(train.value(i, t) - kernels::dot(f, x));
			++count;
		}
		const double value = abs_err / static_cast<double>(count) / *scale;
		out.per_series[i] = value;
		total += value;
		++scored;
	}
	out.aggregate = scored > 0 ? total / static_cast<double>(scored) : 0.0;
	return out;
}

namespace {

constexpr const char* kMagic = "latentcast-trmf";
constexpr int kFormatVersion = 1;

void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& m) {
	out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
	for (Eigen::Index r = 0; r < m.rows(); ++r) {
		for (Eigen::Index c = 0; c < m.cols(); ++c) {
			out << (c == 0 ? "" : " ") << io::format_double(m(r, c));
		}
		out << '\n';
	}
}

std::string expect_token(std::istream& in, std::string_view expected) {
	std::string tok;
	if (!(in >> tok) || (!expected.empty() && tok != expected)) {
		throw TrmfError("malformed model file: expected '" + std::string(expected) + "', got '" + tok + "'");
	}
	return tok;
}

double read_double(std::istream& in) {
	std::string tok;
	if (!(in >> tok)) {
		throw TrmfError("malformed model file: truncated");
	}
	try {
		return io::parse_double(tok);
	} catch (const std::invalid_argument& e) {
		throw TrmfError(std::string("malformed model file: ") + e.what());
	}
}

std::size_t read_size(std::istream& in) {
	long long v = -1;
	if (!(in >> v) || v < 0) {
		throw TrmfError("malformed model file: bad size");
	}
	return static_cast<std::size_t>(v);
}

Eigen::MatrixXd read_matrix(std::istream& in, const char* name) {
	expect_token(in, name);
	const auto rows = static_cast<Eigen::Index>(read_size(in));
	const auto cols = static_cast<Eigen::Index>(read_size(in));
	Eigen::MatrixXd m(rows, cols);
	for (Eigen::Index r = 0; r < rows; ++r) {
		for (Eigen::Index c = 0; c < cols; ++c) {
			m(r, c) = read_double(in);
		}
	}
	return m;
}

} // namespace

void save(const TrmfModel& model, std::ostream& out) {
	const auto& c = model.config;
	out << kMagic << ' ' << kFormatVersion << '\n';
	out << "rank " << c.rank << '\n';
	out << "lags " << c.lags.size();
	for (auto l : c.lags) {
		out << ' ' << l;
	}
	out << '\n';
	out << "lambda_f " << io::format_double(c.lambda_f) << '\n';
	out << "lambda_x " << io::format_double(c.lambda_x) << '\n';
	out << "lambda_theta " << io::format_double(c.lambda_theta) << '\n';
	out << "eta " << io::format_double(c.eta) << '\n';
	out << "max_iterations " << c.max_iterations << '\n';
	out << "tolerance " << io::format_double(c.tolerance) << '\n';
	out << "nonnegative_factors " << (c.nonnegative_factors ? 1 : 0) << '\n';
	out << "seed " << c.seed << '\n';
	out << "init_scale " << io::format_double(c.init_scale) << '\n';
	out << "converged " << (model.converged ? 1 : 0) << '\n';
	write_matrix(out, "factors", model.factors);
	write_matrix(out, "temporal", model.temporal);
	write_matrix(out, "theta", model.theta);
	out << "objective_trace " << model.objective_trace.size() << '\n';
	for (std::size_t i = 0; i < model.objective_trace.size(); ++i) {
		out << (i == 0 ? "" : " ") << io::format_double(model.objective_trace[i]);
	}
	out << '\n';
}

TrmfModel load(std::istream& in) {
	TrmfModel model;
	auto& c = model.config;
	expect_token(in, kMagic);
	if (read_size(in) != static_cast<std::size_t>(kFormatVersion)) {
		throw TrmfError("unsupported model format version");
	}
	expect_token(in, "rank");
	c.rank = read_size(in);
	expect_token(in, "lags");
	c.lags.resize(read_size(in));
	for (auto& l : c.lags) {
		l = read_size(in);
	}
	expect_token(in, "lambda_f");
	c.lambda_f = read_double(in);
	expect_token(in, "lambda_x");
	c.lambda_x = read_double(in);
	expect_token(in, "lambda_theta");
	c.lambda_theta = read_double(in);
	expect_token(in, "eta");
	c.eta = read_double(in);
	expect_token(in, "max_iterations");
	c.max_iterations = read_size(in);
	expect_token(in, "tolerance");
	c.tolerance = read_double(in);
	expect_token(in, "nonnegative_factors");
	c.nonnegative_factors = read_size(in) != 0;
	expect_token(in, "seed");
	in >> c.seed;
	expect_token(in, "init_scale");
	c.init_scale = read_double(in);
	expect_token(in, "converged");
	model.converged = read_size(in) != 0;
	model.factors = read_matrix(in, "factors");
	model.temporal = read_matrix(in, "temporal");
	model.theta = read_matrix(in, "theta");
	expect_token(in, "objective_trace");
	model.objective_trace.resize(read_size(in));
	for (auto& v : model.objective_trace) {
		v = read_double(in);
	}
	if (model.factors.rows() != static_cast<Eigen::Index>(c.rank) || model.temporal.rows() != model.factors.rows()) {
		throw TrmfError("model file dimensions are inconsistent");
	}
	return model;
}

void save(const TrmfModel& model, const std::filesystem::path& path) {
	std::ofstream out(path);
	if (!out) {
		throw TrmfError("cannot write " + path.string());
	}
	save(model, out);
}

TrmfModel load(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in) {
		throw TrmfError("cannot open " + path.string());
	}
	return load(in);
}

} // namespace latentcast::trmf
