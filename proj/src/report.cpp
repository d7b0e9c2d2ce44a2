#include <cstdio>
#include <fstream>
#include <sstream>

#include "ivos/evaluation.hpp"
#include "json.hpp"

namespace ivos {
namespace {

using nlohmann::ordered_json;

ordered_json optional_int(const std::optional<int>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::optional<int> read_optional_int(const ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<int>();
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["strategy"] = std::string(to_string(c.strategy));
  j["max_clicks"] = c.max_clicks;
  j["max_rounds"] = c.max_rounds;
  j["memory_stride"] = c.memory_stride;
  j["interaction"] = c.backends.interaction;
  j["propagator"] = c.backends.propagator;
  j["fusion"] = c.backends.fusion;
  j["color_tolerance"] = c.backends.color_tolerance;
  j["decay_lambda"] = c.backends.decay_lambda;
  j["min_region_area"] = c.min_region_area;
  j["click_radius"] = optional_int(c.click_radius);
  j["boundary_tolerance"] = optional_int(c.boundary_tolerance);
  j["seed"] = c.seed;
  j["timing"] = c.timing;
  j["time_budget_per_object_seconds"] = c.time_budget_per_object_seconds;
  return j;
}

RunConfig config_from_json(const ordered_json& j) {
  RunConfig c;
  c.strategy = parse_strategy(j.at("strategy").get<std::string>());
  c.max_clicks = j.at("max_clicks").get<int>();
  c.max_rounds = j.at("max_rounds").get<int>();
  c.memory_stride = j.at("memory_stride").get<int>();
  c.backends.interaction = j.at("interaction").get<std::string>();
  c.backends.propagator = j.at("propagator").get<std::string>();
  c.backends.fusion = j.at("fusion").get<std::string>();
  c.backends.color_tolerance = j.at("color_tolerance").get<int>();
  c.backends.decay_lambda = j.at("decay_lambda").get<double>();
  c.min_region_area = j.at("min_region_area").get<double>();
  c.click_radius = read_optional_int(j.at("click_radius"));
  c.boundary_tolerance = read_optional_int(j.at("boundary_tolerance"));
  c.seed = j.at("seed").get<std::uint64_t>();
  c.timing = j.at("timing").get<bool>();
  c.time_budget_per_object_seconds = j.at("time_budget_per_object_seconds").get<double>();
  return c;
}

ordered_json sequence_json(const SequenceResult& s) {
  ordered_json j;
  j["name"] = s.name;
  j["frames"] = s.frames;
  j["objects"] = s.objects;
  j["pairs"] = s.pairs;
  j["initial_jf_sum"] = s.initial_jf_sum;
  j["early_stop"] = s.early_stop;
  j["error"] = s.error ? ordered_json(*s.error) : ordered_json(nullptr);
  ordered_json rounds = ordered_json::array();
  for (const auto& r : s.rounds) {
    ordered_json jr;
    jr["round"] = r.round;
    jr["frame_index"] = r.frame_index;
    jr["clicks"] = r.clicks;
    jr["jf_sum"] = r.jf_sum;
    jr["global_jf"] = r.global_jf;
    rounds.push_back(std::move(jr));
  }
  j["rounds"] = std::move(rounds);
  return j;
}

SequenceResult sequence_from_json(const ordered_json& j) {
  SequenceResult s;
  s.name = j.at("name").get<std::string>();
  s.frames = j.at("frames").get<int>();
  s.objects = j.at("objects").get<std::vector<int>>();
  s.pairs = j.at("pairs").get<std::size_t>();
  s.initial_jf_sum = j.at("initial_jf_sum").get<double>();
  s.early_stop = j.at("early_stop").get<bool>();
  if (!j.at("error").is_null()) s.error = j["error"].get<std::string>();
  for (const auto& jr : j.at("rounds")) {
    s.rounds.push_back({jr.at("round").get<int>(), jr.at("frame_index").get<int>(),
                        jr.at("clicks").get<int>(), jr.at("jf_sum").get<double>(),
                        jr.at("global_jf").get<double>()});
  }
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  ordered_json j;
  j["schema_version"] = report.schema_version;
  j["tool"] = "ivos-bench";
  j["config"] = config_json(report.config);
  j["partial"] = report.partial;
  ordered_json seqs = ordered_json::array();
  for (const auto& s : report.sequences) seqs.push_back(sequence_json(s));
  j["sequences"] = std::move(seqs);

  ordered_json global;
  global["r_max"] = report.config.max_rounds;
  ordered_json curve = ordered_json::array();
  for (const auto& s : report.global_curve.samples()) {
    curve.push_back(ordered_json{{"round", s.round}, {"global_jf", s.global_jf}});
  }
  global["curve"] = std::move(curve);
  global["r_auc"] = report.r_auc;
  j["global"] = std::move(global);

  j["reference_targets"] = ordered_json{{"r_auc", report.reference.r_auc},
                                        {"auc_jf", report.reference.auc_jf},
                                        {"jf_at_60s", report.reference.jf_at_60},
                                        {"reproducible_here", false}};
  if (report.timing) {
    ordered_json t;
    t["hardware_dependent"] = true;
    ordered_json ts = ordered_json::array();
    for (const auto& s : report.timing->sequences) {
      ts.push_back(ordered_json{{"name", s.name},
                                {"seconds", s.seconds},
                                {"auc_time", s.auc_time},
                                {"jf_at_60s", s.jf_at_60}});
    }
    t["sequences"] = std::move(ts);
    t["mean_auc_time"] = report.timing->mean_auc_time;
    t["mean_jf_at_60s"] = report.timing->mean_jf_at_60;
    j["timing"] = std::move(t);
  }
  return j.dump(2) + "\n";
}

EvaluationReport report_from_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    EvaluationReport r;
    r.schema_version = j.at("schema_version").get<std::string>();
    r.config = config_from_json(j.at("config"));
    r.partial = j.at("partial").get<bool>();
    for (const auto& s : j.at("sequences")) r.sequences.push_back(sequence_from_json(s));
    for (const auto& s : j.at("global").at("curve")) {
      r.global_curve.append({s.at("round").get<int>(), s.at("global_jf").get<double>(), std::nullopt});
    }
    r.r_auc = j.at("global").at("r_auc").get<double>();
    const auto& ref = j.at("reference_targets");
    r.reference = {ref.at("r_auc").get<double>(), ref.at("auc_jf").get<double>(),
                   ref.at("jf_at_60s").get<double>()};
    if (j.contains("timing")) {
      TimingReport t;
      for (const auto& s : j["timing"].at("sequences")) {
        t.sequences.push_back({s.at("name").get<std::string>(),
                               s.at("seconds").get<std::vector<double>>(),
                               s.at("auc_time").get<double>(), s.at("jf_at_60s").get<double>()});
      }
      t.mean_auc_time = j["timing"].at("mean_auc_time").get<double>();
      t.mean_jf_at_60 = j["timing"].at("mean_jf_at_60s").get<double>();
      r.timing = std::move(t);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("report: ") + e.what());
  }
}

std::string report_to_csv(const EvaluationReport& report) {
  std::string out = "sequence,round,global_jf\n";
  for (const auto& s : report.sequences) {
    for (const auto& r : s.rounds) {
      out += csv_field(s.name) + "," + std::to_string(r.round) + "," + number(r.global_jf) + "\n";
    }
  }
  out += "summary:r_auc," + std::to_string(report.config.max_rounds) + "," + number(report.r_auc) + "\n";
  return out;
}

void write_report(const EvaluationReport& report, const std::filesystem::path& path,
                  ReportFormat format) {
  const std::string text = format == ReportFormat::json ? report_to_json(report) : report_to_csv(report);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

EvaluationReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string() + ": cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

}  // namespace ivos
