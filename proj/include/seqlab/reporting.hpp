#pragma once
//---------------------------------------------------------------------------
// reporting.hpp
//
// Serialization of experiment results.  All objects are emitted with a fixed
// field order and shortest-round-trip number formatting, so identical runs
// produce byte-identical artifacts; a JSON round trip reproduces the records
// exactly.
//---------------------------------------------------------------------------

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqlab/pipeline.hpp"
#include "seqlab/util.hpp"

namespace seqlab {

using ojson = nlohmann::ordered_json;

//---------------------------------------------------------------------------
// Config.
//---------------------------------------------------------------------------
inline ojson config_json(const ExperimentConfig& c) {
  ojson j;
  j["L"] = c.L;
  j["p"] = c.p;
  j["window_length"] = c.window_length;
  j["depth"] = c.depth;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["oracle_cap"] = c.oracle_cap;
  j["binary_budget"] = c.binary_budget;
  j["format"] = c.format;
  j["in_regime"] = c.in_regime();
  return j;
}

inline ExperimentConfig config_from_json(const ojson& j) {
  ExperimentConfig c;
  c.L = j.at("L").get<std::int64_t>();
  c.p = j.at("p").get<double>();
  c.window_length = j.at("window_length").get<std::int64_t>();
  c.depth = j.at("depth").get<std::int64_t>();
  c.trials = j.at("trials").get<std::int64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.oracle_cap = j.at("oracle_cap").get<std::int64_t>();
  c.binary_budget = j.at("binary_budget").get<std::int64_t>();
  c.format = j.at("format").get<std::string>();
  return c;
}

//---------------------------------------------------------------------------
// Trial records.
//---------------------------------------------------------------------------
inline ojson record_json(const TrialRecord& r) {
  ojson j;
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["chi_status"] = r.chi_status;
  j["chi_value"] = r.chi_value;
  j["m_spaced_ok"] = r.m_spaced_ok;
  j["path_depth_target"] = r.path_depth_target;
  j["path_reached_depth"] = r.path_reached_depth;
  j["witness_ok"] = r.witness_ok;
  j["oracle_ok"] = r.oracle_ok;
  j["success"] = r.success;
  j["weighted_target"] = r.weighted_target;
  j["binary_target"] = r.binary_target;
  j["spot_target"] = r.spot_target;
  j["failure_reason"] = r.failure_reason;
  return j;
}

inline TrialRecord record_from_json(const ojson& j) {
  TrialRecord r;
  r.trial = j.at("trial").get<std::int64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.chi_status = j.at("chi_status").get<std::string>();
  r.chi_value = j.at("chi_value").get<std::int64_t>();
  r.m_spaced_ok = j.at("m_spaced_ok").get<bool>();
  r.path_depth_target = j.at("path_depth_target").get<std::int64_t>();
  r.path_reached_depth = j.at("path_reached_depth").get<std::int64_t>();
  r.witness_ok = j.at("witness_ok").get<bool>();
  r.oracle_ok = j.at("oracle_ok").get<bool>();
  r.success = j.at("success").get<bool>();
  r.weighted_target = j.at("weighted_target").get<std::int64_t>();
  r.binary_target = j.at("binary_target").get<std::int64_t>();
  r.spot_target = j.at("spot_target").get<std::int64_t>();
  r.failure_reason = j.at("failure_reason").get<std::string>();
  return r;
}

inline ojson summary_json(const PipelineSummary& s) {
  ojson j;
  j["trials"] = s.trials;
  j["successes"] = s.successes;
  j["success_fraction"] = s.success_fraction;
  j["wilson_lo"] = s.ci.lo;
  j["wilson_hi"] = s.ci.hi;
  j["chi_zero"] = s.chi_zero;
  j["chi_positive"] = s.chi_positive;
  j["chi_not_determined"] = s.chi_not_determined;
  j["spacing_failures"] = s.spacing_failures;
  j["blocked_windows"] = s.blocked_windows;
  j["replay_failures"] = s.replay_failures;
  j["oracle_failures"] = s.oracle_failures;
  j["exception_failures"] = s.exception_failures;
  return j;
}

inline ojson pipeline_json(const PipelineResult& r) {
  ojson j;
  j["code_version"] = kCodeVersion;
  j["kind"] = "pipeline";
  j["config"] = config_json(r.config);
  j["summary"] = summary_json(summarize(r));
  ojson arr = ojson::array();
  for (const TrialRecord& rec : r.records) arr.push_back(record_json(rec));
  j["trials"] = std::move(arr);
  return j;
}

inline PipelineResult pipeline_from_json(const ojson& j) {
  PipelineResult r;
  r.config = config_from_json(j.at("config"));
  for (const ojson& t : j.at("trials")) r.records.push_back(record_from_json(t));
  return r;
}

//---------------------------------------------------------------------------
// CSV.  One header line plus one summary row; numbers use the same shortest
// round-trip formatting as the JSON emitters.
//---------------------------------------------------------------------------
namespace detail {

inline std::string num(double v) { return ojson(v).dump(); }

}  // namespace detail

inline std::string pipeline_csv(const PipelineResult& r) {
  const PipelineSummary s = summarize(r);
  std::ostringstream out;
  out << "code_version,L,p,window_length,depth,trials,seed,successes,"
         "success_fraction,wilson_lo,wilson_hi,chi_zero,chi_positive,"
         "chi_not_determined,spacing_failures,blocked_windows,replay_failures,"
         "oracle_failures,exception_failures\n";
  out << kCodeVersion << ',' << r.config.L << ',' << detail::num(r.config.p)
      << ',' << r.config.window_length << ',' << r.config.depth << ','
      << r.config.trials << ',' << r.config.seed << ',' << s.successes << ','
      << detail::num(s.success_fraction) << ',' << detail::num(s.ci.lo) << ','
      << detail::num(s.ci.hi) << ',' << s.chi_zero << ',' << s.chi_positive
      << ',' << s.chi_not_determined << ',' << s.spacing_failures << ','
      << s.blocked_windows << ',' << s.replay_failures << ','
      << s.oracle_failures << ',' << s.exception_failures << '\n';
  return out.str();
}

//---------------------------------------------------------------------------
// Witness schedules: steps serialize as [side, op, index, count] rows.
//---------------------------------------------------------------------------
inline ojson schedule_json(const WitnessSchedule& s) {
  ojson j;
  j["target_length"] = s.target_length;
  ojson steps = ojson::array();
  for (const WitnessStep& st : s.steps)
    steps.push_back(ojson::array(
        {to_string(st.side), to_string(st.op), st.index, st.count}));
  j["steps"] = std::move(steps);
  return j;
}

inline WitnessSchedule schedule_from_json(const ojson& j) {
  WitnessSchedule s;
  s.target_length = j.at("target_length").get<std::int64_t>();
  for (const ojson& row : j.at("steps")) {
    if (!row.is_array() || row.size() != 4)
      throw usage_error("schedule_from_json: each step must be [side, op, index, count]");
    WitnessStep st;
    const std::string side = row[0].get<std::string>();
    const std::string op = row[1].get<std::string>();
    if (side == "eta") st.side = Side::eta;
    else if (side == "xi") st.side = Side::xi;
    else throw usage_error("schedule_from_json: unknown side " + side);
    if (op == "delete_zero") st.op = DeleteKind::zero;
    else if (op == "delete_one") st.op = DeleteKind::one;
    else throw usage_error("schedule_from_json: unknown op " + op);
    st.index = row[2].get<std::int64_t>();
    st.count = row[3].get<std::int64_t>();
    s.steps.push_back(st);
  }
  return s;
}

//---------------------------------------------------------------------------
// Chi-zero reports.
//---------------------------------------------------------------------------
inline ojson chi_zero_report_json(const ChiZeroReport& rep) {
  ojson j;
  j["p"] = rep.p;
  j["trials"] = rep.trials;
  j["determined"] = rep.determined;
  j["zero"] = rep.zero;
  j["not_determined"] = rep.not_determined;
  j["zero_fraction"] = rep.zero_fraction;
  j["not_determined_fraction"] = rep.not_determined_fraction;
  j["wilson_lo"] = rep.ci.lo;
  j["wilson_hi"] = rep.ci.hi;
  ojson h = ojson::array();
  for (const auto& [chi_value, count] : rep.histogram)
    h.push_back(ojson::array({chi_value, count}));
  j["histogram"] = std::move(h);
  return j;
}

inline ojson chi_zero_json(const ExperimentConfig& cfg,
                           const std::vector<ChiZeroReport>& reps) {
  ojson j;
  j["code_version"] = kCodeVersion;
  j["kind"] = "chi_zero";
  j["config"] = config_json(cfg);
  ojson arr = ojson::array();
  for (const ChiZeroReport& rep : reps) arr.push_back(chi_zero_report_json(rep));
  j["points"] = std::move(arr);
  return j;
}

inline std::string chi_zero_csv(const ExperimentConfig& cfg,
                                const std::vector<ChiZeroReport>& reps) {
  std::ostringstream out;
  out << "code_version,L,window_length,trials,seed,p,determined,zero,"
         "not_determined,zero_fraction,not_determined_fraction,wilson_lo,"
         "wilson_hi\n";
  for (const ChiZeroReport& rep : reps) {
    out << kCodeVersion << ',' << cfg.L << ',' << cfg.window_length << ','
        << cfg.trials << ',' << cfg.seed << ',' << detail::num(rep.p) << ','
        << rep.determined << ',' << rep.zero << ',' << rep.not_determined
        << ',' << detail::num(rep.zero_fraction) << ','
        << detail::num(rep.not_determined_fraction) << ','
        << detail::num(rep.ci.lo) << ',' << detail::num(rep.ci.hi) << '\n';
  }
  return out.str();
}

}  // namespace seqlab
