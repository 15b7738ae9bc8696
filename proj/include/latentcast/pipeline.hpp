#pragma once

#include "latentcast/audit.hpp"
#include "latentcast/forecasters.hpp"
#include "latentcast/metrics.hpp"
#include "latentcast/rank_selection.hpp"
#include "latentcast/selection.hpp"
#include "latentcast/series.hpp"
#include "latentcast/trmf.hpp"

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace latentcast::pipeline {

class ConfigError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

enum class RankMode { Fixed, Elbow };

inline constexpr int kConfigFormatVersion = 1;

struct RunConfig {
	std::filesystem::path data;
	std::filesystem::path metadata; // optional
	std::filesystem::path output = "latentcast-out";
	std::size_t period = 12;
	SplitSpec split;
	trmf::TrmfConfig trmf;
	select::CvOptions cv;
	std::vector<std::string> methods = forecast::builtin_method_names();
	std::map<std::string, forecast::MethodParams> method_params;
	RankMode rank_mode = RankMode::Fixed;
	std::vector<std::size_t> rank_grid = rank::default_grid();
	/// Divide each series by its mean absolute training value before factorizing.
	bool scale_series = true;
	/// Also score every menu method applied directly to each series.
	bool benchmark_direct = true;
	std::uint64_t seed = 0;
	std::size_t threads = 1;

	/// Propagates seed and threads into the solver and CV settings.
	void sync();
	/// Throws ConfigError on unusable settings or missing input files.
	void validate() const;
	forecast::MethodMenu menu() const;
};

/// INI-style file; see docs/FORMATS.md.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
void write_config(const RunConfig& config, std::ostream& out);

struct StageTime {
	std::string stage;
	double seconds = 0.0;
};

class StageClock {
public:
	explicit StageClock(std::vector<StageTime>* sink) : sink_(sink) {}
	void lap(std::string stage);

private:
	std::vector<StageTime>* sink_;
	std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

/// Train/test panel after ingestion and the holdout split.
struct Dataset {
	SeriesMatrix train;
	SeriesMatrix test;
	std::vector<RejectedSeries> rejected;
	std::map<std::string, std::string> categories;
};

Dataset ingest(const RunConfig& config);
Dataset prepare(const SeriesMatrix& panel, const SplitSpec& split, std::map<std::string, std::string> categories = {});

/// Mean absolute observed value per row (1 for all-zero rows).
std::vector<double> mean_abs_scales(const SeriesMatrix& train);

struct LatentRun {
	std::vector<double> scales;
	trmf::TrmfModel model;
	std::optional<rank::ElbowCurve> elbow;
	std::optional<rank::ElbowPick> elbow_pick;
	select::PanelForecast panel;
	SeriesMatrix forecasts;       // original scale, fallbacks applied
	SeriesMatrix ar_forecasts;    // TRMF's own AR continuation, original scale
	std::vector<std::uint8_t> fallback;
	std::vector<std::string> fallback_reasons;
};

/// Factorize, pick K if requested, cross-validate the latent series and map
/// forecasts back. Rows whose forecast is unusable fall back to Naive2.
LatentRun forecast_latent(const SeriesMatrix& train, const RunConfig& config, AccessAudit* audit = nullptr,
                          std::vector<StageTime>* times = nullptr);

struct DirectRun {
	std::string method;
	SeriesMatrix forecasts;
	std::vector<std::uint8_t> fallback;
};

/// Applies one menu method to every training row (trailing segment).
DirectRun forecast_direct(const SeriesMatrix& train, const forecast::MethodMenu& menu, std::size_t method,
                          std::size_t horizon, std::size_t threads, AccessAudit* audit = nullptr);

struct BenchmarkRow {
	std::string approach; // "direct" or "latent"
	std::string method;
	metrics::EvalReport report;
	double seconds = 0.0;
};

struct BenchmarkReport {
	std::vector<BenchmarkRow> rows;
	metrics::Aggregate naive2;
	std::vector<StageTime> stages;
	double wall_seconds = 0.0;
	std::vector<std::string> deviations;

	const BenchmarkRow* best(const std::string& approach) const;
};

nlohmann::json to_json(const BenchmarkReport& report);

struct RunResult {
	Dataset data;
	LatentRun latent;
	metrics::EvalReport eval;
	BenchmarkReport benchmark;
	std::size_t audit_fit_reads = 0;
	std::size_t audit_violations = 0;
	std::vector<std::string> audit_log;
};

/// Full pipeline on an in-memory panel. Test values are only revealed once
/// evaluation starts. Writes nothing.
RunResult run_panel(const SeriesMatrix& panel, const RunConfig& config,
                    const std::map<std::string, std::string>& categories = {}, AccessAudit* audit = nullptr);

/// Full pipeline from config.data; writes all artifacts under config.output.
RunResult run(const RunConfig& config);

void write_forecasts(const std::filesystem::path& path, const SeriesMatrix& forecasts);
void write_latent_series(const std::filesystem::path& path, const trmf::TrmfModel& model,
                         const Eigen::MatrixXd& latent_forecast);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

} // namespace latentcast::pipeline
