#pragma once

#include "seismon/ground_motion.hpp"
#include "seismon/observer.hpp"
#include "seismon/performance.hpp"
#include "seismon/placement.hpp"
#include "seismon/record.hpp"
#include "seismon/structure.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// File formats. JSON documents are exchanged as text so the JSON library
// stays an implementation detail of the core.
namespace seismon::io {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

// Record CSV: "# dt=<s> units=<m/s^2|m/s> channel=<label>", then one sample
// per line. Samples are written with 17 significant digits.
Record parse_record(std::string_view text, const std::string& source = "<record>");
std::string format_record(const Record& record);
Record read_record(const std::filesystem::path& path);
void write_record(const Record& record, const std::filesystem::path& path);

BuildingModel parse_model(std::string_view json);
std::string model_to_json(const BuildingModel& model);
BuildingModel load_model(const std::filesystem::path& path);

/// G0 may be omitted (calibration input); it then reads as 0.
GroundMotionSpec parse_gm_spec(std::string_view json);
std::string gm_spec_to_json(const GroundMotionSpec& spec);

struct LayoutConfig {
  SensorLayout layout;
  std::optional<FeedbackGain> gain;
};

/// {"measured_dofs": [...], "gain": {"units": "N*s/m", "E_diag": [...]}}.
/// A gain document with top-level units/E_diag is also accepted.
LayoutConfig parse_layout(std::string_view json);
FeedbackGain parse_gain(std::string_view json);
std::string gain_to_json(const FeedbackGain& gain, const SensorLayout& layout,
                         const std::optional<GainOptimization>& optimization = std::nullopt);

/// Either a named set ("rc-frame") or a JSON document.
PerformanceThresholds parse_thresholds(std::string_view json);
PerformanceThresholds load_thresholds(const std::string& name_or_path);

std::string covariance_to_json(const ErrorCovariance& cov);
ErrorCovariance parse_covariance(std::string_view json);

std::string drift_estimate_to_json(const DriftEstimate& estimate);

/// Input accepted by `classify`: story exceedance values or a drift estimate.
struct ClassifyInput {
  std::optional<std::vector<Exceedance>> exceedance;
  std::optional<DriftEstimate> drifts;
};
ClassifyInput parse_classify_input(std::string_view json);

std::string report_to_json(const PerformanceReport& report);
std::string distribution_to_csv(const DriftDistribution& distribution);
std::string story_probabilities_to_csv(const PerformanceReport& report);

std::string placement_to_json(const PlacementResult& result, const PlacementProblem& problem,
                              std::string_view strategy);

/// Columns: time, q1..qn.
std::string history_to_csv(const ResponseHistory& history, std::string_view channel = "q_hat");
ResponseHistory parse_history_csv(std::string_view text, const std::string& source = "<history>");

/// sigma2_max argument such as "4e-6m2" or "2.5e-5ratio2".
std::pair<double, VarianceUnits> parse_variance_limit(std::string_view text);

}  // namespace seismon::io
