// latentcast: batch forecasting of panels of short series through a
// temporally regularized factorization.

#include "latentcast/csv_io.hpp"
#include "latentcast/kernels.hpp"
#include "latentcast/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace lc = latentcast;
namespace pl = latentcast::pipeline;

namespace {

struct Overrides {
	std::string config;
	std::string data;
	std::string metadata;
	std::optional<std::size_t> period, horizon, max_train, rank, max_iterations, fold_length, min_train;
	std::optional<double> lambda_f, lambda_x, lambda_theta, eta, tolerance, latent_offset;
	std::string rank_mode;
	std::vector<std::size_t> rank_grid, lags;
	std::vector<std::string> methods;
	bool nonnegative = false;
	bool no_scale = false;
	bool no_direct = false;
};

struct Globals {
	std::optional<std::uint64_t> seed;
	std::optional<std::size_t> threads;
	std::string output;
	std::string simd;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
	cmd->add_option("-c,--config", o.config, "INI run configuration")->check(CLI::ExistingFile);
	cmd->add_option("-d,--data", o.data, "M4-format CSV panel")->check(CLI::ExistingFile);
	cmd->add_option("--metadata", o.metadata, "id,category CSV for grouped reports")->check(CLI::ExistingFile);
	cmd->add_option("--period", o.period, "seasonal period");
	cmd->add_option("--horizon", o.horizon, "held-out points per series");
	cmd->add_option("--max-train", o.max_train, "maximum training points per series");
	cmd->add_option("--rank", o.rank, "latent dimension K");
	cmd->add_option("--rank-mode", o.rank_mode, "fixed or elbow")->check(CLI::IsMember({"fixed", "elbow"}));
	cmd->add_option("--rank-grid", o.rank_grid, "candidate K for elbow selection")->delimiter(',');
	cmd->add_option("--lags", o.lags, "AR lag set")->delimiter(',');
	cmd->add_option("--lambda-f", o.lambda_f, "factor ridge weight");
	cmd->add_option("--lambda-x", o.lambda_x, "temporal AR weight");
	cmd->add_option("--lambda-theta", o.lambda_theta, "AR coefficient ridge weight");
	cmd->add_option("--eta", o.eta, "temporal ridge weight");
	cmd->add_option("--max-iterations", o.max_iterations, "solver iteration cap");
	cmd->add_option("--tolerance", o.tolerance, "relative objective decrease to stop at");
	cmd->add_flag("--nonnegative", o.nonnegative, "constrain factor loadings to be non-negative");
	cmd->add_option("--fold-length", o.fold_length, "validation block length");
	cmd->add_option("--min-train", o.min_train, "training length of the first fold");
	cmd->add_option("--latent-offset", o.latent_offset, "positive shift of latent series before CV, in ranges (0 = off)");
	cmd->add_option("--methods", o.methods, "comma-separated method menu")->delimiter(',');
	cmd->add_flag("--no-scale", o.no_scale, "factorize raw values instead of per-series scaled ones");
	cmd->add_flag("--no-direct", o.no_direct, "skip per-series benchmark methods");
}

pl::RunConfig resolve(const Overrides& o, const Globals& g) {
	pl::RunConfig c = o.config.empty() ? pl::RunConfig{} : pl::load_config(o.config);
	if (!o.data.empty()) c.data = o.data;
	if (!o.metadata.empty()) c.metadata = o.metadata;
	if (o.period) c.period = *o.period;
	if (o.horizon) c.split.horizon = *o.horizon;
	if (o.max_train) c.split.max_train = *o.max_train;
	if (o.rank) c.trmf.rank = *o.rank;
	if (!o.rank_mode.empty()) c.rank_mode = o.rank_mode == "elbow" ? pl::RankMode::Elbow : pl::RankMode::Fixed;
	if (!o.rank_grid.empty()) c.rank_grid = o.rank_grid;
	if (!o.lags.empty()) c.trmf.lags = o.lags;
	if (o.lambda_f) c.trmf.lambda_f = *o.lambda_f;
	if (o.lambda_x) c.trmf.lambda_x = *o.lambda_x;
	if (o.lambda_theta) c.trmf.lambda_theta = *o.lambda_theta;
	if (o.eta) c.trmf.eta = *o.eta;
	if (o.max_iterations) c.trmf.max_iterations = *o.max_iterations;
	if (o.tolerance) c.trmf.tolerance = *o.tolerance;
	if (o.nonnegative) c.trmf.nonnegative_factors = true;
	if (o.fold_length) c.cv.fold_length = *o.fold_length;
	if (o.min_train) c.cv.min_train = *o.min_train;
	if (o.latent_offset) c.cv.latent_offset = *o.latent_offset;
	if (!o.methods.empty()) c.methods = o.methods;
	if (o.no_scale) c.scale_series = false;
	if (o.no_direct) c.benchmark_direct = false;
	if (g.seed) c.seed = *g.seed;
	if (g.threads) c.threads = *g.threads;
	if (!g.output.empty()) c.output = g.output;
	c.sync();
	c.validate();
	if (c.data.empty()) {
		throw pl::ConfigError("no data file: pass --data or set data.path in the config");
	}
	return c;
}

void print_eval(const lc::metrics::EvalReport& r) {
	std::printf("%-22s sMAPE %8.4f  MASE %8.4f", r.method.c_str(), r.aggregate.smape, r.aggregate.mase);
	if (r.owa) {
		std::printf("  OWA %7.4f", r.owa->owa);
	}
	std::printf("  (%zu series, %zu degenerate, %zu fallbacks)\n", r.aggregate.series, r.aggregate.degenerate,
	            r.fallbacks);
}

lc::SeriesMatrix scaled_train(const pl::Dataset& d, const pl::RunConfig& c) {
	if (!c.scale_series) {
		return d.train;
	}
	auto scales = pl::mean_abs_scales(d.train);
	for (auto& s : scales) {
		s = 1.0 / s;
	}
	return d.train.scale_rows(scales);
}

int cmd_run(const pl::RunConfig& c) {
	const auto res = pl::run(c);
	std::printf("K = %zu, %zu series (%zu rejected)\n", res.latent.model.rank(), res.data.train.rows(),
	            res.data.rejected.size());
	print_eval(res.eval);
	std::printf("audit: %zu fit reads, %zu violations\n", res.audit_fit_reads, res.audit_violations);
	std::printf("artifacts written to %s\n", c.output.string().c_str());
	return res.audit_violations == 0 ? 0 : 3;
}

int cmd_factorize(const pl::RunConfig& c) {
	const auto d = pl::ingest(c);
	const auto train = scaled_train(d, c);
	const auto model = lc::trmf::fit(train, c.trmf);
	std::filesystem::create_directories(c.output);
	lc::trmf::save(model, c.output / "model.txt");
	pl::write_latent_series(c.output / "latent_series.csv", model, lc::trmf::ar_forecast(model, c.split.horizon));
	const auto err = lc::trmf::reconstruction_error(model, train);
	pl::write_json(c.output / "reconstruction.json", {{"rank", model.rank()},
	                                                   {"iterations", model.objective_trace.size()},
	                                                   {"converged", model.converged},
	                                                   {"objective", model.objective_trace.back()},
	                                                   {"mase", err.aggregate},
	                                                   {"degenerate", err.degenerate}});
	std::printf("K = %zu, %zu iterations%s, objective %.6g, reconstruction MASE %.6g\n", model.rank(),
	            model.objective_trace.size(), model.converged ? " (converged)" : "", model.objective_trace.back(),
	            err.aggregate);
	return 0;
}

int cmd_rank_sweep(const pl::RunConfig& c) {
	const auto d = pl::ingest(c);
	const auto train = scaled_train(d, c);
	std::vector<std::size_t> grid;
	for (auto k : c.rank_grid) {
		if (k < std::min(train.rows(), train.cols())) {
			grid.push_back(k);
		}
	}
	const auto curve = lc::rank::sweep(train, grid, c.trmf, c.threads);
	std::filesystem::create_directories(c.output);
	std::ofstream out(c.output / "elbow.csv");
	lc::rank::write_csv(curve, out);
	for (std::size_t i = 0; i < curve.ks.size(); ++i) {
		std::printf("K=%-3zu MASE %.6g\n", curve.ks[i], curve.errors[i]);
	}
	const auto pick = lc::rank::pick_elbow(curve);
	std::printf("elbow: K = %zu%s\n", pick.k, pick.flat ? " (no elbow; smallest K)" : "");
	return 0;
}

int cmd_cv(const pl::RunConfig& c) {
	const auto d = pl::ingest(c);
	lc::AccessAudit audit;
	const auto latent = pl::forecast_latent(d.train, c, &audit);
	std::filesystem::create_directories(c.output);
	pl::write_forecasts(c.output / "forecasts.csv", latent.forecasts);
	std::ofstream folds(c.output / "cv_folds.csv");
	lc::select::write_folds_csv(latent.panel.cv, folds);
	pl::write_json(c.output / "cv_summary.json", lc::select::summary_json(latent.panel.cv, latent.panel.provenance));
	for (const auto& r : latent.panel.cv.latents) {
		std::printf("latent %zu:", r.latent);
		for (const auto& m : latent.panel.provenance[r.latent].methods) {
			std::printf(" %s", m.c_str());
		}
		std::printf("\n");
	}
	return audit.violations() == 0 ? 0 : 3;
}

int cmd_evaluate(const pl::RunConfig& c, const std::string& forecasts_path) {
	const auto d = pl::ingest(c);
	const auto given = lc::io::read_panel(forecasts_path, c.period);
	if (given.cols() != c.split.horizon) {
		throw lc::DataError(forecasts_path + ": expected " + std::to_string(c.split.horizon) + " forecast columns, got " +
		                    std::to_string(given.cols()));
	}
	std::map<std::string, std::size_t> where;
	for (std::size_t i = 0; i < given.rows(); ++i) {
		where[given.id(i)] = i;
	}
	std::vector<std::size_t> order;
	for (const auto& id : d.train.ids()) {
		const auto it = where.find(id);
		if (it == where.end()) {
			throw lc::DataError(forecasts_path + ": no forecast for series " + id);
		}
		if (!given.fully_observed() && given.observed_count(it->second) != c.split.horizon) {
			throw lc::DataError(forecasts_path + ": incomplete forecast for series " + id);
		}
		order.push_back(it->second);
	}
	const auto aligned = given.select_rows(order);
	const auto naive2_rows =
	    lc::metrics::score(d.train, d.test, lc::metrics::naive2_panel(d.train, c.split.horizon), d.categories);
	const auto report = lc::metrics::evaluate(forecasts_path, lc::metrics::score(d.train, d.test, aligned, d.categories),
	                                          naive2_rows);
	std::filesystem::create_directories(c.output);
	pl::write_json(c.output / "eval_report.json", lc::metrics::to_json(report));
	print_eval(report);
	return 0;
}

int cmd_benchmark(pl::RunConfig c) {
	c.benchmark_direct = true;
	const auto d = lc::io::read_panel(c.data, c.period);
	std::map<std::string, std::string> categories;
	if (!c.metadata.empty()) {
		categories = lc::io::read_metadata(c.metadata);
	}
	const auto res = pl::run_panel(d, c, categories);
	std::filesystem::create_directories(c.output);
	pl::write_json(c.output / "benchmark_report.json", pl::to_json(res.benchmark));
	for (const auto& row : res.benchmark.rows) {
		std::printf("%-7s ", row.approach.c_str());
		print_eval(row.report);
	}
	const auto* best_direct = res.benchmark.best("direct");
	const auto* latent = res.benchmark.best("latent");
	if (best_direct != nullptr && latent != nullptr) {
		std::printf("best latent (%s) OWA %.4f vs best direct (%s) OWA %.4f\n", latent->method.c_str(),
		            latent->report.owa->owa, best_direct->method.c_str(), best_direct->report.owa->owa);
	}
	return 0;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"latentcast: forecast panels of short series through temporally regularized latent factors"};
	app.require_subcommand(1);
	Globals g;
	app.add_option("--seed", g.seed, "random seed for the factorization")->capture_default_str();
	app.add_option("--threads", g.threads, "worker threads");
	app.add_option("-o,--output", g.output, "output directory");
	app.add_option("--simd", g.simd, "kernel variant: auto, scalar or avx2")
	    ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

	Overrides o;
	std::string forecasts_path;
	auto* run = app.add_subcommand("run", "full pipeline: split, factorize, cross-validate, forecast, evaluate");
	auto* factorize = app.add_subcommand("factorize", "fit the factorization on the training window");
	auto* sweep = app.add_subcommand("rank-sweep", "reconstruction error across K and the elbow pick");
	auto* cv = app.add_subcommand("cv", "cross-validate the menu on latent series and write forecasts");
	auto* evaluate = app.add_subcommand("evaluate", "score a forecast CSV against the held-out block");
	auto* bench = app.add_subcommand("benchmark", "latent pipeline versus every menu method applied directly");
	for (auto* cmd : {run, factorize, sweep, cv, evaluate, bench}) {
		add_run_options(cmd, o);
		cmd->fallthrough();
	}
	evaluate->add_option("-f,--forecasts", forecasts_path, "forecast CSV (id,F1..Fh)")
	    ->required()
	    ->check(CLI::ExistingFile);

	CLI11_PARSE(app, argc, argv);

	try {
		if (g.simd == "scalar") {
			lc::kernels::force_isa(lc::kernels::Isa::Scalar);
		} else if (g.simd == "avx2") {
			if (!lc::kernels::isa_available(lc::kernels::Isa::Avx2)) {
				throw std::runtime_error("AVX2 kernels are not available on this machine or build");
			}
			lc::kernels::force_isa(lc::kernels::Isa::Avx2);
		}
		const auto config = resolve(o, g);
		if (run->parsed()) return cmd_run(config);
		if (factorize->parsed()) return cmd_factorize(config);
		if (sweep->parsed()) return cmd_rank_sweep(config);
		if (cv->parsed()) return cmd_cv(config);
		if (evaluate->parsed()) return cmd_evaluate(config, forecasts_path);
		if (bench->parsed()) return cmd_benchmark(config);
	} catch (const std::exception& e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 1;
	}
	return 1;
}
