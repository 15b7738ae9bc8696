#include "latentcast/pipeline.hpp"

#include "latentcast/csv_io.hpp"
#include "latentcast/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace latentcast::pipeline {

namespace {

std::vector<std::string> split_list(const std::string& text) {
	std::vector<std::string> out;
	std::stringstream ss(text);
	std::string item;
	while (std::getline(ss, item, ',')) {
		const auto b = item.find_first_not_of(" \t");
		const auto e = item.find_last_not_of(" \t");
		if (b != std::string::npos) {
			out.push_back(item.substr(b, e - b + 1));
		}
	}
	return out;
}

std::string join(const std::vector<std::string>& items) {
	std::string out;
	for (std::size_t i = 0; i < items.size(); ++i) {
		out += (i ? "," : "") + items[i];
	}
	return out;
}

std::string join(const std::vector<std::size_t>& items) {
	std::vector<std::string> s;
	for (auto v : items) {
		s.push_back(std::to_string(v));
	}
	return join(s);
}

class ConfigReader {
public:
	ConfigReader(const boost::property_tree::ptree& tree, std::string source) : tree_(tree), source_(std::move(source)) {}

	std::optional<std::string> raw(const std::string& key) {
		const auto node = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '/'));
		if (!node) {
			return std::nullopt;
		}
		used_.insert(key);
		return *node;
	}

	void read(const std::string& key, std::string& out) {
		if (auto v = raw(key)) {
			out = *v;
		}
	}
	void read(const std::string& key, double& out) {
		if (auto v = raw(key)) {
			try {
				out = io::parse_double(*v);
			} catch (const std::exception&) {
				fail(key, "expected a number, got '" + *v + "'");
			}
		}
	}
	void read(const std::string& key, std::size_t& out) {
		if (auto v = raw(key)) {
			out = parse_count(key, *v);
		}
	}
	void read(const std::string& key, std::uint64_t& out, int) {
		if (auto v = raw(key)) {
			out = parse_count(key, *v);
		}
	}
	void read(const std::string& key, bool& out) {
		if (auto v = raw(key)) {
			if (*v == "true" || *v == "1" || *v == "yes") {
				out = true;
			} else if (*v == "false" || *v == "0" || *v == "no") {
				out = false;
			} else {
				fail(key, "expected true or false, got '" + *v + "'");
			}
		}
	}
	void read(const std::string& key, std::vector<std::size_t>& out) {
		if (auto v = raw(key)) {
			out.clear();
			for (const auto& item : split_list(*v)) {
				out.push_back(parse_count(key, item));
			}
		}
	}

	[[noreturn]] void fail(const std::string& key, const std::string& what) const {
		throw ConfigError(source_ + ": key '" + dotted(key) + "': " + what);
	}

	void reject_unknown() const {
		for (const auto& [section, node] : tree_) {
			if (node.empty()) {
				check_used(section);
				continue;
			}
			for (const auto& [key, _] : node) {
				check_used(section + "/" + key);
			}
		}
	}

private:
	static std::string dotted(std::string key) {
		std::replace(key.begin(), key.end(), '/', '.');
		return key;
	}

	std::uint64_t parse_count(const std::string& key, const std::string& text) const {
		std::uint64_t v = 0;
		const auto* end = text.data() + text.size();
		const auto [ptr, ec] = std::from_chars(text.data(), end, v);
		if (ec != std::errc() || ptr != end) {
			fail(key, "expected a non-negative integer, got '" + text + "'");
		}
		return v;
	}

	void check_used(const std::string& key) const {
		if (key.starts_with("method.")) {
			return; // handled by the menu parser
		}
		if (!used_.contains(key)) {
			throw ConfigError(source_ + ": unknown key '" + dotted(key) + "'");
		}
	}

	const boost::property_tree::ptree& tree_;
	std::string source_;
	std::set<std::string> used_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
	if (value.empty()) {
		return {};
	}
	std::filesystem::path p(value);
	return p.is_absolute() || base.empty() ? p : base / p;
}

} // namespace

void RunConfig::sync() {
	trmf.seed = seed;
	trmf.threads = threads;
	cv.threads = threads;
}

void RunConfig::validate() const {
	if (!data.empty() && !std::filesystem::exists(data)) {
		throw ConfigError("data file not found: " + data.string());
	}
	if (!metadata.empty() && !std::filesystem::exists(metadata)) {
		throw ConfigError("metadata file not found: " + metadata.string());
	}
	if (period == 0) {
		throw ConfigError("period must be positive");
	}
	if (split.horizon == 0 || split.max_train == 0) {
		throw ConfigError("split.horizon and split.max_train must be positive");
	}
	if (cv.fold_length == 0 || cv.min_train == 0) {
		throw ConfigError("cv.fold_length and cv.min_train must be positive");
	}
	if (!(cv.latent_offset >= 0.0) || !std::isfinite(cv.latent_offset)) {
		throw ConfigError("cv.latent_offset must be a non-negative number");
	}
	if (trmf.rank == 0) {
		throw ConfigError("trmf.rank must be positive");
	}
	if (rank_mode == RankMode::Elbow && rank_grid.size() < 3) {
		throw ConfigError("rank.grid needs at least 3 candidates for elbow selection");
	}
	if (threads == 0) {
		throw ConfigError("threads must be at least 1");
	}
	try {
		menu().require_at_least(4);
	} catch (const std::invalid_argument& e) {
		throw ConfigError(std::string("methods: ") + e.what());
	}
}

forecast::MethodMenu RunConfig::menu() const {
	return forecast::MethodMenu::from_names(methods, method_params);
}

RunConfig parse_config(std::istream& in, const std::string& source) {
	boost::property_tree::ptree tree;
	try {
		boost::property_tree::ini_parser::read_ini(in, tree);
	} catch (const boost::property_tree::ini_parser_error& e) {
		throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
	}
	ConfigReader r(tree, source);
	const auto version = r.raw("format_version");
	if (!version) {
		throw ConfigError(source + ": missing format_version");
	}
	if (*version != std::to_string(kConfigFormatVersion)) {
		throw ConfigError(source + ": unsupported format_version " + *version + " (expected " +
		                  std::to_string(kConfigFormatVersion) + ")");
	}
	const auto base = std::filesystem::path(source).parent_path();

	RunConfig c;
	if (auto v = r.raw("data/path")) {
		c.data = resolve(base, *v);
	}
	if (auto v = r.raw("data/metadata")) {
		c.metadata = resolve(base, *v);
	}
	r.read("data/period", c.period);
	r.read("split/max_train", c.split.max_train);
	r.read("split/horizon", c.split.horizon);

	r.read("trmf/rank", c.trmf.rank);
	r.read("trmf/lags", c.trmf.lags);
	r.read("trmf/lambda_f", c.trmf.lambda_f);
	r.read("trmf/lambda_x", c.trmf.lambda_x);
	r.read("trmf/lambda_theta", c.trmf.lambda_theta);
	r.read("trmf/eta", c.trmf.eta);
	r.read("trmf/max_iterations", c.trmf.max_iterations);
	r.read("trmf/tolerance", c.trmf.tolerance);
	r.read("trmf/nonnegative_factors", c.trmf.nonnegative_factors);
	r.read("trmf/init_scale", c.trmf.init_scale);

	if (auto v = r.raw("rank/mode")) {
		if (*v == "fixed") {
			c.rank_mode = RankMode::Fixed;
		} else if (*v == "elbow") {
			c.rank_mode = RankMode::Elbow;
		} else {
			r.fail("rank/mode", "expected fixed or elbow, got '" + *v + "'");
		}
	}
	r.read("rank/grid", c.rank_grid);

	r.read("cv/fold_length", c.cv.fold_length);
	r.read("cv/min_train", c.cv.min_train);
	r.read("cv/latent_offset", c.cv.latent_offset);

	if (auto v = r.raw("methods/menu")) {
		c.methods = split_list(*v);
	}
	for (const auto& [section, node] : tree) {
		if (!section.starts_with("method.")) {
			continue;
		}
		auto& params = c.method_params[section.substr(7)];
		for (const auto& [key, value] : node) {
			try {
				params[key] = io::parse_double(value.data());
			} catch (const std::exception&) {
				throw ConfigError(source + ": key '" + section + "." + key + "': expected a number");
			}
		}
	}

	if (auto v = r.raw("run/output")) {
		c.output = resolve(base, *v);
	}
	r.read("run/seed", c.seed, 0);
	r.read("run/threads", c.threads);
	r.read("run/scale_series", c.scale_series);
	r.read("run/benchmark_direct", c.benchmark_direct);
	r.reject_unknown();
	c.sync();
	return c;
}

RunConfig load_config(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in) {
		throw ConfigError("cannot open config file " + path.string());
	}
	return parse_config(in, path.string());
}

void write_config(const RunConfig& c, std::ostream& out) {
	const auto f = [](double v) { return io::format_double(v); };
	out << "format_version = " << kConfigFormatVersion << "\n\n";
	out << "[data]\n";
	if (!c.data.empty()) {
		out << "path = " << c.data.string() << '\n';
	}
	if (!c.metadata.empty()) {
		out << "metadata = " << c.metadata.string() << '\n';
	}
	out << "period = " << c.period << "\n\n";
	out << "[split]\nmax_train = " << c.split.max_train << "\nhorizon = " << c.split.horizon << "\n\n";
	out << "[trmf]\nrank = " << c.trmf.rank << "\nlags = " << join(c.trmf.lags) << "\nlambda_f = " << f(c.trmf.lambda_f)
	    << "\nlambda_x = " << f(c.trmf.lambda_x) << "\nlambda_theta = " << f(c.trmf.lambda_theta)
	    << "\neta = " << f(c.trmf.eta) << "\nmax_iterations = " << c.trmf.max_iterations
	    << "\ntolerance = " << f(c.trmf.tolerance) << "\nnonnegative_factors = "
	    << (c.trmf.nonnegative_factors ? "true" : "false") << "\ninit_scale = " << f(c.trmf.init_scale) << "\n\n";
	out << "[rank]\nmode = " << (c.rank_mode == RankMode::Elbow ? "elbow" : "fixed") << "\ngrid = " << join(c.rank_grid)
	    << "\n\n";
	out << "[cv]\nfold_length = " << c.cv.fold_length << "\nmin_train = " << c.cv.min_train
	    << "\nlatent_offset = " << f(c.cv.latent_offset) << "\n\n";
	out << "[methods]\nmenu = " << join(c.methods) << "\n\n";
	for (const auto& [name, params] : c.method_params) {
		out << "[method." << name << "]\n";
		for (const auto& [k, v] : params) {
			out << k << " = " << f(v) << '\n';
		}
		out << '\n';
	}
	out << "[run]\noutput = " << c.output.string() << "\nseed = " << c.seed << "\nthreads = " << c.threads
	    << "\nscale_series = " << (c.scale_series ? "true" : "false")
	    << "\nbenchmark_direct = " << (c.benchmark_direct ? "true" : "false") << '\n';
}

void StageClock::lap(std::string stage) {
	const auto now = std::chrono::steady_clock::now();
	if (sink_ != nullptr) {
		sink_->push_back({std::move(stage), std::chrono::duration<double>(now - last_).count()});
	}
	last_ = now;
}

Dataset prepare(const SeriesMatrix& panel, const SplitSpec& split, std::map<std::string, std::string> categories) {
	auto parts = split_lenient(panel, split);
	Dataset d;
	d.train = std::move(parts.parts.train);
	d.test = std::move(parts.parts.test);
	d.rejected = std::move(parts.rejected);
	d.categories = std::move(categories);
	return d;
}

Dataset ingest(const RunConfig& config) {
	const auto panel = io::read_panel(config.data, config.period);
	std::map<std::string, std::string> categories;
	if (!config.metadata.empty()) {
		categories = io::read_metadata(config.metadata);
	}
	return prepare(panel, config.split, std::move(categories));
}

std::vector<double> mean_abs_scales(const SeriesMatrix& train) {
	std::vector<double> scales(train.rows(), 1.0);
	for (std::size_t i = 0; i < train.rows(); ++i) {
		const auto values = train.view(i).observed_values();
		double sum = 0.0;
		for (double v : values) {
			sum += std::abs(v);
		}
		if (!values.empty() && sum > 0.0) {
			scales[i] = sum / static_cast<double>(values.size());
		}
	}
	return scales;
}

namespace {

SeriesMatrix rescale(const SeriesMatrix& m, std::span<const double> scales) {
	return m.scale_rows(scales);
}

bool row_finite(const SeriesMatrix& m, std::size_t i) {
	const auto r = m.row(i);
	return std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); });
}

} // namespace

LatentRun forecast_latent(const SeriesMatrix& train, const RunConfig& config_in, AccessAudit* audit,
                          std::vector<StageTime>* times) {
	RunConfig config = config_in;
	config.sync();
	StageClock clock(times);
	const std::size_t h = config.split.horizon;
	const auto menu = config.menu();

	LatentRun out;
	out.scales = config.scale_series ? mean_abs_scales(train) : std::vector<double>(train.rows(), 1.0);
	std::vector<double> inverse(out.scales.size());
	std::transform(out.scales.begin(), out.scales.end(), inverse.begin(), [](double s) { return 1.0 / s; });
	const SeriesMatrix scaled = rescale(train, inverse);

	trmf::TrmfConfig cfg = config.trmf;
	if (config.rank_mode == RankMode::Elbow) {
		std::vector<std::size_t> grid;
		const std::size_t bound = std::min(train.rows(), train.cols());
		for (auto k : config.rank_grid) {
			if (k >= 1 && k < bound) {
				grid.push_back(k);
			}
		}
		if (grid.size() < 3) {
			throw ConfigError("fewer than 3 rank candidates lie below min(N, T) = " + std::to_string(bound));
		}
		out.elbow = rank::sweep(scaled, grid, cfg, config.threads);
		out.elbow_pick = rank::pick_elbow(*out.elbow);
		cfg.rank = out.elbow_pick->k;
		clock.lap("rank-sweep");
	}
	out.model = trmf::fit(scaled, cfg, audit);
	clock.lap("factorize");

	out.panel = select::forecast_panel(out.model, menu, config.cv, h, train.period(), train.ids(), audit);
	clock.lap("cv-ensemble");

	const auto ar_latent = trmf::ar_forecast(out.model, h);
	out.ar_forecasts = rescale(reconstruct(out.model.factors, ar_latent, train.ids(), train.period()), out.scales);
	SeriesMatrix forecasts = rescale(out.panel.forecasts, out.scales);

	out.fallback.assign(train.rows(), 0);
	out.fallback_reasons.assign(train.rows(), {});
	std::vector<double> values(forecasts.values());
	for (std::size_t i = 0; i < train.rows(); ++i) {
		std::string reason;
		if (train.observed_count(i) == 0) {
			reason = "no observed training values";
		} else if (!row_finite(forecasts, i)) {
			reason = "non-finite latent reconstruction";
		}
		if (reason.empty()) {
			continue;
		}
		const auto nf = metrics::naive2(train.view(i).trailing_segment(), train.period(), h);
		std::copy(nf.begin(), nf.end(), values.begin() + static_cast<std::ptrdiff_t>(i * h));
		out.fallback[i] = 1;
		out.fallback_reasons[i] = reason;
	}
	out.forecasts = SeriesMatrix(train.rows(), h, std::move(values), std::vector<std::uint8_t>(train.rows() * h, 1),
	                             train.ids(), train.period());
	clock.lap("reconstruct");
	return out;
}

DirectRun forecast_direct(const SeriesMatrix& train, const forecast::MethodMenu& menu, std::size_t method,
                          std::size_t horizon, std::size_t threads, AccessAudit* audit) {
	DirectRun out;
	out.method = menu.name(method);
	out.fallback.assign(train.rows(), 0);
	std::vector<double> values(train.rows() * horizon);
	const auto proto = menu.make(method);
	parallel_for(train.rows(), threads, [&](std::size_t i) {
		const auto segment = train.view(i).trailing_segment();
		const AuditedSeries series(segment, audit, train.id(i));
		const auto history = series.fit_prefix(segment.size(), segment.size());
		auto result = forecast::fit_predict(*proto, history, train.period(), horizon);
		if (!result.ok()) {
			result.values = metrics::naive2(history, train.period(), horizon);
			out.fallback[i] = 1;
		}
		std::copy(result.values.begin(), result.values.end(), values.begin() + static_cast<std::ptrdiff_t>(i * horizon));
	});
	out.forecasts = SeriesMatrix(train.rows(), horizon, std::move(values),
	                             std::vector<std::uint8_t>(train.rows() * horizon, 1), train.ids(), train.period());
	return out;
}

const BenchmarkRow* BenchmarkReport::best(const std::string& approach) const {
	const BenchmarkRow* best = nullptr;
	for (const auto& row : rows) {
		if (row.approach != approach || !row.report.owa) {
			continue;
		}
		if (best == nullptr || row.report.owa->owa < best->report.owa->owa) {
			best = &row;
		}
	}
	return best;
}

nlohmann::json to_json(const BenchmarkReport& report) {
	nlohmann::json rows = nlohmann::json::array();
	for (const auto& r : report.rows) {
		rows.push_back({{"approach", r.approach},
		                {"method", r.method},
		                {"aggregate", metrics::to_json(r.report.aggregate)},
		                {"owa", r.report.owa ? metrics::to_json(*r.report.owa) : nlohmann::json(nullptr)},
		                {"fallbacks", r.report.fallbacks},
		                {"seconds", r.seconds}});
	}
	nlohmann::json stages = nlohmann::json::array();
	double total = 0.0;
	for (const auto& s : report.stages) {
		stages.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
		total += s.seconds;
	}
	nlohmann::json out{{"naive2", metrics::to_json(report.naive2)},
	                   {"rows", rows},
	                   {"stages", stages},
	                   {"stage_seconds_total", total},
	                   {"wall_seconds", report.wall_seconds},
	                   {"deviations", report.deviations}};
	if (const auto* d = report.best("direct")) {
		out["best_direct"] = d->method;
	}
	if (const auto* l = report.best("latent")) {
		out["best_latent"] = l->method;
	}
	return out;
}

namespace {

std::vector<metrics::SeriesScore> flagged(std::vector<metrics::SeriesScore> rows, const std::vector<std::uint8_t>& fb) {
	for (std::size_t i = 0; i < rows.size(); ++i) {
		rows[i].fallback = fb[i] != 0;
	}
	return rows;
}

} // namespace

RunResult run_panel(const SeriesMatrix& panel, const RunConfig& config_in,
                    const std::map<std::string, std::string>& categories, AccessAudit* audit_in) {
	RunConfig config = config_in;
	config.sync();
	AccessAudit local;
	AccessAudit* audit = audit_in != nullptr ? audit_in : &local;
	const auto wall_start = std::chrono::steady_clock::now();
	RunResult res;
	auto& stages = res.benchmark.stages;
	StageClock clock(&stages);

	res.data = prepare(panel, config.split, categories);
	const HeldOutPanel holdout(res.data.test, audit);
	const auto& train = res.data.train;
	const std::size_t h = config.split.horizon;
	clock.lap("split");

	const auto latent_start = std::chrono::steady_clock::now();
	res.latent = forecast_latent(train, config, audit, &stages);
	const double latent_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - latent_start).count();
	clock = StageClock(&stages);

	const auto naive2 = metrics::naive2_panel(train, h);
	clock.lap("naive2");

	std::vector<DirectRun> direct;
	std::vector<double> direct_seconds;
	if (config.benchmark_direct) {
		const auto menu = config.menu();
		for (std::size_t m = 0; m < menu.size(); ++m) {
			const auto t0 = std::chrono::steady_clock::now();
			direct.push_back(forecast_direct(train, menu, m, h, config.threads, audit));
			direct_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
		}
		clock.lap("direct");
	}

	audit->begin_evaluation();
	const auto& test = holdout.reveal("evaluation");
	const auto naive2_rows = metrics::score(train, test, naive2, res.data.categories);
	res.eval = metrics::evaluate(
	    "latent_cv_median",
	    flagged(metrics::score(train, test, res.latent.forecasts, res.data.categories), res.latent.fallback),
	    naive2_rows);

	auto& bench = res.benchmark;
	bench.naive2 = res.eval.naive2;
	bench.rows.push_back({"latent", "cv_median", res.eval, latent_seconds});
	bench.rows.push_back(
	    {"latent", "trmf_ar",
	     metrics::evaluate("latent_trmf_ar", metrics::score(train, test, res.latent.ar_forecasts, res.data.categories),
	                       naive2_rows),
	     0.0});
	for (std::size_t m = 0; m < direct.size(); ++m) {
		bench.rows.push_back(
		    {"direct", direct[m].method,
		     metrics::evaluate(direct[m].method,
		                       flagged(metrics::score(train, test, direct[m].forecasts, res.data.categories),
		                               direct[m].fallback),
		                       naive2_rows),
		     direct_seconds[m]});
	}
	bench.deviations = {
	    "method menu is the built-in zoo (mean, naive, drift, snaive, ses, holt, holt_damped, hw_additive, "
	    "hw_multiplicative, ar, theta and Box-Cox variants), not an external package menu",
	    "series are divided by their mean absolute training value before factorization and rescaled afterwards",
	};
	clock.lap("evaluate");
	bench.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

	res.audit_fit_reads = audit->fit_reads();
	res.audit_violations = audit->violations();
	res.audit_log = audit->violation_log();
	return res;
}

void write_forecasts(const std::filesystem::path& path, const SeriesMatrix& forecasts) {
	io::write_panel(path, forecasts, "F");
}

void write_latent_series(const std::filesystem::path& path, const trmf::TrmfModel& model,
                         const Eigen::MatrixXd& latent_forecast) {
	std::ofstream out(path);
	if (!out) {
		throw std::runtime_error("cannot write " + path.string());
	}
	const auto T = model.temporal.cols();
	const auto H = latent_forecast.cols();
	out << "id";
	for (Eigen::Index t = 0; t < T; ++t) {
		out << ",T" << t + 1;
	}
	for (Eigen::Index j = 0; j < H; ++j) {
		out << ",H" << j + 1;
	}
	out << '\n';
	for (Eigen::Index k = 0; k < model.temporal.rows(); ++k) {
		out << "latent_" << k;
		for (Eigen::Index t = 0; t < T; ++t) {
			out << ',' << io::format_double(model.temporal(k, t));
		}
		for (Eigen::Index j = 0; j < H; ++j) {
			out << ',' << io::format_double(k < latent_forecast.rows() ? latent_forecast(k, j) : 0.0);
		}
		out << '\n';
	}
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
	std::ofstream out(path);
	if (!out) {
		throw std::runtime_error("cannot write " + path.string());
	}
	out << value.dump(2) << '\n';
}

RunResult run(const RunConfig& config_in) {
	RunConfig config = config_in;
	config.sync();
	config.validate();
	if (config.data.empty()) {
		throw ConfigError("no data file given");
	}
	const auto start = std::chrono::steady_clock::now();
	std::vector<StageTime> pre;
	StageClock clock(&pre);
	const auto panel = io::read_panel(config.data, config.period);
	std::map<std::string, std::string> categories;
	if (!config.metadata.empty()) {
		categories = io::read_metadata(config.metadata);
	}
	clock.lap("ingest");

	auto res = run_panel(panel, config, categories);
	clock = StageClock(&pre);

	const auto& dir = config.output;
	std::filesystem::create_directories(dir);
	write_forecasts(dir / "forecasts.csv", res.latent.forecasts);
	{
		std::ofstream folds(dir / "cv_folds.csv");
		select::write_folds_csv(res.latent.panel.cv, folds);
	}
	write_json(dir / "cv_summary.json", select::summary_json(res.latent.panel.cv, res.latent.panel.provenance));
	if (res.latent.elbow) {
		std::ofstream elbow(dir / "elbow.csv");
		rank::write_csv(*res.latent.elbow, elbow);
	}
	write_latent_series(dir / "latent_series.csv", res.latent.model, res.latent.panel.latent_forecast);
	trmf::save(res.latent.model, dir / "model.txt");
	{
		// Absolute paths so the copy can be loaded from the output directory.
		RunConfig saved = config;
		saved.data = std::filesystem::absolute(saved.data);
		if (!saved.metadata.empty()) {
			saved.metadata = std::filesystem::absolute(saved.metadata);
		}
		saved.output = std::filesystem::absolute(saved.output);
		std::ofstream cfg(dir / "run_config.ini");
		write_config(saved, cfg);
	}

	auto eval = metrics::to_json(res.eval);
	nlohmann::json rejected = nlohmann::json::array();
	for (const auto& r : res.data.rejected) {
		rejected.push_back({{"id", r.id}, {"reason", r.reason}});
	}
	eval["rejected_series"] = rejected;
	nlohmann::json reasons = nlohmann::json::array();
	for (std::size_t i = 0; i < res.latent.fallback.size(); ++i) {
		if (res.latent.fallback[i]) {
			reasons.push_back({{"id", res.data.train.id(i)}, {"reason", res.latent.fallback_reasons[i]}});
		}
	}
	eval["fallback_series"] = reasons;
	eval["audit"] = {{"fit_reads", res.audit_fit_reads}, {"violations", res.audit_violations}, {"log", res.audit_log}};
	if (res.latent.elbow_pick) {
		eval["elbow"] = {{"k", res.latent.elbow_pick->k}, {"flat", res.latent.elbow_pick->flat}};
	}
	eval["rank"] = res.latent.model.rank();
	write_json(dir / "eval_report.json", eval);
	clock.lap("write");

	res.benchmark.stages.insert(res.benchmark.stages.begin(), pre.front());
	res.benchmark.stages.push_back(pre.back());
	res.benchmark.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
	write_json(dir / "benchmark_report.json", to_json(res.benchmark));
	return res;
}

} // namespace latentcast::pipeline
