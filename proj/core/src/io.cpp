#include "seismon/io.hpp"

#include "seismon/error.hpp"

#include <json.hpp>

#include <charconv>
#include <limits>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace seismon::io {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what, 0, e.what());
  }
}

template <typename T>
T get(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ParseError(what, 0, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(what, 0, std::string("field '") + key + "': " + e.what());
  }
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd json_matrix(const json& j, const char* what) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw ParseError(what, 0, "matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  return m;
}

void require_si(const json& j, const char* what) {
  if (!j.contains("units")) throw UnitError(std::string(what) + ": missing 'units' tag (expected \"SI\")");
  if (j.at("units") != "SI")
    throw UnitError(std::string(what) + ": units must be \"SI\", got " + j.at("units").dump());
}

json level_json(const Exceedance& e) { return {{"IO", e[0]}, {"LS", e[1]}, {"CP", e[2]}}; }

json class_json(const ClassProbabilities& c) {
  return {{"IO", c[0]}, {"LS", c[1]}, {"CP", c[2]}, {"C", c[3]}};
}

json thresholds_json(const PerformanceThresholds& t) {
  return {{"io", t.io}, {"ls", t.ls}, {"cp", t.cp}, {"units", "drift-ratio"}, {"provenance", t.provenance}};
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

Record parse_record(std::string_view text, const std::string& source) {
  Record record;
  bool header = false;
  bool have_dt = false, have_units = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!header) {
      if (line.front() != '#') throw ParseError(source, line_no, "expected '# dt=... units=... channel=...' header");
      std::istringstream tokens{std::string(line.substr(1))};
      std::string token;
      while (tokens >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw ParseError(source, line_no, "malformed header token '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "dt") {
          const auto dt = to_double(value);
          if (!dt || !(*dt > 0.0)) throw ParseError(source, line_no, "dt must be a positive number");
          record.dt = *dt;
          have_dt = true;
        } else if (key == "units") {
          if (value != "m/s^2" && value != "m/s")
            throw ParseError(source, line_no, "units tag must be m/s^2 or m/s, got '" + value + "'");
          record.units = parse_units(value);
          have_units = true;
        } else if (key == "channel") {
          record.channel = value;
        }
      }
      if (!have_dt) throw ParseError(source, line_no, "header is missing the 'dt' tag");
      if (!have_units) throw ParseError(source, line_no, "header is missing the 'units' tag");
      header = true;
      continue;
    }
    if (line.front() == '#') continue;
    const auto value = to_double(line);
    if (!value) throw ParseError(source, line_no, "not a number: '" + std::string(line) + "'");
    record.samples.push_back(*value);
    if (end == text.size()) break;
  }
  if (!header) throw ParseError(source, line_no, "empty record file");
  record.validate();
  return record;
}

std::string format_record(const Record& record) {
  std::string out = "# dt=" + fmt17(record.dt) + " units=" + std::string(units_tag(record.units)) +
                    " channel=" + (record.channel.empty() ? std::string("unnamed") : record.channel) + "\n";
  for (double s : record.samples) {
    out += fmt17(s);
    out += '\n';
  }
  return out;
}

Record read_record(const std::filesystem::path& path) { return parse_record(read_text(path), path.string()); }

void write_record(const Record& record, const std::filesystem::path& path) {
  write_text(path, format_record(record));
}

BuildingModel parse_model(std::string_view text) {
  constexpr const char* what = "model";
  const json j = parse_json(text, what);
  require_si(j, what);
  BuildingModel model;
  model.story_mass = get<std::vector<double>>(j, "story_mass", what);
  model.story_stiffness = get<std::vector<double>>(j, "story_stiffness", what);
  model.story_height = get<std::vector<double>>(j, "story_height", what);

  if (j.contains("damping")) {
    const json& d = j.at("damping");
    const auto type = get<std::string>(d, "type", what);
    if (type == "rayleigh") {
      RayleighDamping r;
      if (d.contains("modes")) {
        const auto modes = d.at("modes").get<std::vector<int>>();
        if (modes.size() != 2) throw ParseError(what, 0, "rayleigh 'modes' needs two entries");
        r.mode_a = modes[0];
        r.mode_b = modes[1];
      }
      if (d.contains("ratios")) {
        const auto ratios = d.at("ratios").get<std::vector<double>>();
        if (ratios.size() != 2) throw ParseError(what, 0, "rayleigh 'ratios' needs two entries");
        r.ratio_a = ratios[0];
        r.ratio_b = ratios[1];
      }
      model.damping = r;
    } else if (type == "explicit") {
      model.damping = json_matrix(d.at("matrix"), what);
    } else {
      throw ParseError(what, 0, "unknown damping type '" + type + "'");
    }
  }

  auto parse_law = [&](const json& l) {
    const auto kind = get<std::string>(l, "kind", what);
    if (kind == "linear") return HysteresisLaw::linear();
    if (kind == "bilinear")
      return HysteresisLaw::bilinear(get<double>(l, "yield_drift", what), get<double>(l, "post_yield_ratio", what));
    throw ParseError(what, 0, "unknown hysteresis kind '" + kind + "'");
  };
  if (j.contains("hysteresis")) {
    const json& h = j.at("hysteresis");
    if (h.is_array()) {
      for (const auto& l : h) model.hysteresis.push_back(parse_law(l));
    } else {
      model.hysteresis.assign(model.story_mass.size(), parse_law(h));
    }
  }
  if (j.contains("influence")) model.influence = to_vector(j.at("influence").get<std::vector<double>>());
  model.validate();
  return model;
}

std::string model_to_json(const BuildingModel& model) {
  json j;
  j["units"] = "SI";
  j["story_mass"] = model.story_mass;
  j["story_stiffness"] = model.story_stiffness;
  j["story_height"] = model.story_height;
  if (const auto* r = std::get_if<RayleighDamping>(&model.damping)) {
    j["damping"] = {{"type", "rayleigh"}, {"modes", {r->mode_a, r->mode_b}}, {"ratios", {r->ratio_a, r->ratio_b}}};
  } else {
    j["damping"] = {{"type", "explicit"}, {"matrix", matrix_json(std::get<Eigen::MatrixXd>(model.damping))}};
  }
  json laws = json::array();
  for (const auto& law : model.hysteresis) {
    if (law.kind == HysteresisLaw::Kind::linear) laws.push_back({{"kind", "linear"}});
    else
      laws.push_back({{"kind", "bilinear"}, {"yield_drift", law.yield_drift}, {"post_yield_ratio", law.post_yield_ratio}});
  }
  if (!laws.empty()) j["hysteresis"] = laws;
  if (model.influence.size() > 0) j["influence"] = from_vector(model.influence);
  return j.dump(2);
}

BuildingModel load_model(const std::filesystem::path& path) { return parse_model(read_text(path)); }

GroundMotionSpec parse_gm_spec(std::string_view text) {
  constexpr const char* what = "ground-motion spec";
  const json j = parse_json(text, what);
  require_si(j, what);
  GroundMotionSpec spec;
  spec.g0 = j.value("G0", 0.0);
  spec.omega_g = get<double>(j, "omega_g", what);
  spec.xi_g = get<double>(j, "xi_g", what);
  spec.alpha = get<double>(j, "alpha", what);
  spec.duration = get<double>(j, "duration", what);
  spec.dt = get<double>(j, "dt", what);
  return spec;
}

std::string gm_spec_to_json(const GroundMotionSpec& spec) {
  json j = {{"units", "SI"},       {"G0", spec.g0},     {"omega_g", spec.omega_g}, {"xi_g", spec.xi_g},
            {"alpha", spec.alpha}, {"duration", spec.duration}, {"dt", spec.dt}};
  return j.dump(2);
}

namespace {

FeedbackGain gain_from_json(const json& g) {
  constexpr const char* what = "gain";
  if (!g.contains("units")) throw UnitError("gain: missing 'units' tag (N*s/m or kN*s/m)");
  const auto units = g.at("units").get<std::string>();
  double scale = 0.0;
  if (units == "N*s/m") scale = 1.0;
  else if (units == "kN*s/m") scale = 1e3;
  else throw UnitError("gain: unsupported units '" + units + "'");
  FeedbackGain gain{to_vector(get<std::vector<double>>(g, "E_diag", what)) * scale};
  return gain;
}

}  // namespace

LayoutConfig parse_layout(std::string_view text) {
  constexpr const char* what = "layout";
  const json j = parse_json(text, what);
  LayoutConfig config;
  config.layout.measured_dofs = get<std::vector<int>>(j, "measured_dofs", what);
  if (j.contains("gain")) {
    config.gain = gain_from_json(j.at("gain"));
  } else if (j.contains("E_diag")) {
    // A gain document (as written by gain_to_json) doubles as a layout.
    config.gain = gain_from_json(j);
  }
  return config;
}

FeedbackGain parse_gain(std::string_view text) { return gain_from_json(parse_json(text, "gain")); }

std::string gain_to_json(const FeedbackGain& gain, const SensorLayout& layout,
                         const std::optional<GainOptimization>& optimization) {
  json j = {{"units", "N*s/m"}, {"E_diag", from_vector(gain.damper)}, {"measured_dofs", layout.measured_dofs}};
  if (optimization) {
    j["objective_value"] = optimization->objective;
    j["iterations"] = optimization->iterations;
    j["evaluations"] = optimization->evaluations;
    j["converged"] = optimization->converged;
  }
  return j.dump(2);
}

PerformanceThresholds parse_thresholds(std::string_view text) {
  constexpr const char* what = "thresholds";
  const json j = parse_json(text, what);
  if (j.contains("units") && j.at("units") != "drift-ratio")
    throw UnitError("thresholds: units must be \"drift-ratio\"");
  PerformanceThresholds t;
  t.io = get<double>(j, "io", what);
  t.ls = get<double>(j, "ls", what);
  t.cp = get<double>(j, "cp", what);
  t.provenance = j.value("provenance", std::string("user-supplied"));
  t.validate();
  return t;
}

PerformanceThresholds load_thresholds(const std::string& name_or_path) {
  if (name_or_path.empty() || name_or_path == "rc-frame") return PerformanceThresholds::rc_frame();
  return parse_thresholds(read_text(name_or_path));
}

std::string covariance_to_json(const ErrorCovariance& cov) {
  const auto& m = cov.metadata;
  json j = {{"units", "m^2"},
            {"P", matrix_json(cov.p)},
            {"P_ISD", from_vector(cov.isd_variance)},
            {"trace_P", cov.trace_p()},
            {"trace_P_ISD", cov.trace_isd()},
            {"grid",
             {{"points", m.grid_points},
              {"omega_max", m.omega_max},
              {"tail_points", m.tail_points},
              {"tail_max", m.tail_max},
              {"refined", m.refined},
              {"refinement_change", m.refinement_change},
              {"accurate", m.accurate}}},
            {"clipped_eigenvalue", m.clipped_eigenvalue},
            {"provenance", m.provenance}};
  return j.dump(2);
}

ErrorCovariance parse_covariance(std::string_view text) {
  constexpr const char* what = "covariance";
  const json j = parse_json(text, what);
  if (j.value("units", std::string()) != "m^2") throw UnitError("covariance: units must be \"m^2\"");
  ErrorCovariance cov;
  cov.p = json_matrix(j.at("P"), what);
  cov.isd_variance = isd_variances(cov.p);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    cov.metadata.grid_points = g.value("points", 0);
    cov.metadata.omega_max = g.value("omega_max", 0.0);
    cov.metadata.tail_points = g.value("tail_points", 0);
    cov.metadata.tail_max = g.value("tail_max", 0.0);
    cov.metadata.refined = g.value("refined", false);
    cov.metadata.refinement_change = g.value("refinement_change", 0.0);
    cov.metadata.accurate = g.value("accurate", true);
  }
  cov.metadata.provenance = j.value("provenance", cov.metadata.provenance);
  return cov;
}

std::string drift_estimate_to_json(const DriftEstimate& estimate) {
  json j = {{"units", "drift-ratio"},
            {"drift_estimate", {{"mean", from_vector(estimate.mean)}, {"sigma", from_vector(estimate.sigma)}}}};
  return j.dump(2);
}

ClassifyInput parse_classify_input(std::string_view text) {
  constexpr const char* what = "classify input";
  const json j = parse_json(text, what);
  ClassifyInput input;
  if (j.contains("story_exceedance")) {
    const json& e = j.at("story_exceedance");
    const auto io = get<std::vector<double>>(e, "IO", what);
    const auto ls = get<std::vector<double>>(e, "LS", what);
    const auto cp = get<std::vector<double>>(e, "CP", what);
    if (io.size() != ls.size() || ls.size() != cp.size())
      throw ParseError(what, 0, "IO, LS and CP rows must have equal length");
    std::vector<Exceedance> stories;
    for (std::size_t k = 0; k < io.size(); ++k) stories.push_back({io[k], ls[k], cp[k]});
    input.exceedance = std::move(stories);
  } else if (j.contains("drift_estimate")) {
    if (j.contains("units") && j.at("units") != "drift-ratio")
      throw UnitError("drift estimate: units must be \"drift-ratio\"");
    const json& d = j.at("drift_estimate");
    input.drifts = DriftEstimate{to_vector(get<std::vector<double>>(d, "mean", what)),
                                 to_vector(get<std::vector<double>>(d, "sigma", what))};
  } else {
    throw ParseError(what, 0, "expected 'story_exceedance' or 'drift_estimate'");
  }
  return input;
}

std::string report_to_json(const PerformanceReport& report) {
  json stories = json::array();
  for (std::size_t k = 0; k < report.stories.size(); ++k) {
    json s = {{"story", k + 1},
              {"p_exceed", level_json(report.stories[k].exceed)},
              {"p_class", class_json(report.stories[k].classes)}};
    if (report.drifts) {
      s["mean_isd"] = report.drifts->mean(static_cast<Eigen::Index>(k));
      s["sigma_isd"] = report.drifts->sigma(static_cast<Eigen::Index>(k));
    }
    stories.push_back(s);
  }
  json j = {{"thresholds", thresholds_json(report.thresholds)},
            {"stories", stories},
            {"building",
             {{"p_exceed", level_json(report.building.exceed)}, {"p_class", class_json(report.building.classes)}}},
            {"classification", std::string(to_string(report.classification))},
            {"class_rule", "argmax of building class probabilities, ties to the more severe level"},
            {"class_definition", "band: p(IO)=1-p(>=IO), p(LS)=p(>=IO)-p(>=LS), p(CP)=p(>=LS)-p(>=CP), p(C)=p(>=CP)"},
            {"covariance_provenance", report.covariance_provenance}};
  return j.dump(2);
}

std::string distribution_to_csv(const DriftDistribution& d) {
  std::string out = "drift_ratio";
  const auto n = d.pdf.cols();
  for (Eigen::Index k = 0; k < n; ++k) out += ",pdf_story" + std::to_string(k + 1);
  for (Eigen::Index k = 0; k < n; ++k) out += ",cdf_story" + std::to_string(k + 1);
  out += '\n';
  for (Eigen::Index i = 0; i < d.drift.size(); ++i) {
    out += fmt17(d.drift(i));
    for (Eigen::Index k = 0; k < n; ++k) out += "," + fmt17(d.pdf(i, k));
    for (Eigen::Index k = 0; k < n; ++k) out += "," + fmt17(d.cdf(i, k));
    out += '\n';
  }
  return out;
}

std::string story_probabilities_to_csv(const PerformanceReport& report) {
  std::string out = "story,p_ge_IO,p_ge_LS,p_ge_CP,p_IO,p_LS,p_CP,p_C\n";
  auto row = [&](const std::string& label, const LevelProbabilities& p) {
    out += label;
    for (double v : p.exceed) out += "," + fmt17(v);
    for (double v : p.classes) out += "," + fmt17(v);
    out += '\n';
  };
  for (std::size_t k = 0; k < report.stories.size(); ++k) row(std::to_string(k + 1), report.stories[k]);
  row("building", report.building);
  return out;
}

std::string placement_to_json(const PlacementResult& result, const PlacementProblem& problem,
                              std::string_view strategy) {
  auto eval_json = [](const LayoutEvaluation& e) {
    return json{{"layout", e.layout.measured_dofs},
                {"E_diag", from_vector(e.gain.damper)},
                {"trace_P", e.trace_p},
                {"trace_P_ISD", e.trace_isd},
                {"max_isd_var", e.max_isd_var},
                {"gain_converged", e.gain_converged}};
  };
  json audit = json::array();
  for (const auto& e : result.audit) audit.push_back(eval_json(e));
  json j = {{"strategy", strategy},
            {"layout", result.layout.measured_dofs},
            {"gain", {{"units", "N*s/m"}, {"E_diag", from_vector(result.gain.damper)}}},
            {"trace_P", result.trace_p},
            {"trace_P_ISD", result.trace_isd},
            {"max_isd_var", result.max_isd_var},
            {"sigma2_max", problem.sigma2_max},
            {"sigma_units", problem.sigma_units == VarianceUnits::absolute ? "m2" : "ratio2"},
            {"objective", problem.placement_objective == GainObjective::trace_p ? "trace-p" : "trace-p-isd"},
            {"feasible", result.feasible},
            {"evaluated_count", result.evaluated_count},
            {"audit", audit}};
  if (!result.path.empty()) {
    json path = json::array();
    for (const auto& e : result.path) path.push_back(eval_json(e));
    j["greedy_path"] = path;
  }
  return j.dump(2);
}

std::string history_to_csv(const ResponseHistory& h, std::string_view channel) {
  std::string out = "# dt=" + fmt17(h.dt) + " units=m channel=" + std::string(channel) + "\ntime";
  for (Eigen::Index k = 0; k < h.q.cols(); ++k) out += ",q" + std::to_string(k + 1);
  out += '\n';
  for (Eigen::Index i = 0; i < h.q.rows(); ++i) {
    out += fmt17(h.dt * static_cast<double>(i));
    for (Eigen::Index k = 0; k < h.q.cols(); ++k) out += "," + fmt17(h.q(i, k));
    out += '\n';
  }
  return out;
}

ResponseHistory parse_history_csv(std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  ResponseHistory h;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      const auto pos = view.find("dt=");
      if (pos != std::string_view::npos) {
        const auto end = view.find(' ', pos);
        const auto dt = to_double(view.substr(pos + 3, end == std::string_view::npos ? end : end - pos - 3));
        if (!dt || !(*dt > 0.0)) throw ParseError(source, line_no, "dt must be a positive number");
        h.dt = *dt;
      }
      continue;
    }
    if (view.rfind("time", 0) == 0) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= view.size()) {
      const auto comma = std::min(view.find(',', start), view.size());
      const auto v = to_double(view.substr(start, comma - start));
      if (!v) throw ParseError(source, line_no, "not a number");
      row.push_back(*v);
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(source, line_no, "inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (!(h.dt > 0.0)) throw ParseError(source, 1, "missing dt header");
  if (rows.empty() || rows.front().size() < 2) throw ParseError(source, line_no, "no samples");
  const auto n = static_cast<Eigen::Index>(rows.front().size() - 1);
  h.q.resize(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index k = 0; k < n; ++k) h.q(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k + 1)];
  h.qdot = Eigen::MatrixXd::Zero(h.q.rows(), n);
  h.qddot = Eigen::MatrixXd::Zero(h.q.rows(), n);
  return h;
}

std::pair<double, VarianceUnits> parse_variance_limit(std::string_view text) {
  text = trim(text);
  auto split = [&](std::string_view suffix) -> std::optional<double> {
    if (text.size() <= suffix.size() || text.substr(text.size() - suffix.size()) != suffix) return std::nullopt;
    return to_double(text.substr(0, text.size() - suffix.size()));
  };
  if (const auto v = split("ratio2")) return {*v, VarianceUnits::drift_ratio};
  if (const auto v = split("m2")) return {*v, VarianceUnits::absolute};
  if (text == "inf" || text == "infm2") return {std::numeric_limits<double>::infinity(), VarianceUnits::absolute};
  throw UnitError("sigma2-max needs a units suffix: <value>m2 or <value>ratio2, got '" + std::string(text) + "'");
}

}  // namespace seismon::io
