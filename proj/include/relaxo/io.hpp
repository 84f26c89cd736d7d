#pragma once

// File formats: CSV (one '#' metadata line, fixed header row, 17-significant
// digit values) and JSON documents tagged by "kind". The JSON shapes are
// described by schemas/relaxo-output.schema.json.

#include <string>
#include <vector>

#include <json.hpp>

#include "relaxo/analytic.hpp"
#include "relaxo/trajectory.hpp"
#include "relaxo/types.hpp"

namespace relaxo::io {

// Round-trip exact decimal rendering (%.17g).
std::string format_double(double v);

// Time/rate unit convention for emitted files: when R was given explicitly
// the values are absolute, otherwise they are in units of 1/R (time) and R
// (rates).
struct OutputMeta {
  bool absolute_time = false;
  double R = 1.0;
};

std::string units_name(const OutputMeta& meta);

PulseTarget parse_target(const std::string& name); // "pi2" | "pi"

// CSV builders. Column layouts are fixed:
//   waveform:   t,omega
//   trajectory: t,theta,a
//   simulation: t,mx,my,mz
//   sweep:      r,E_pi2,E_pi,T_pi2,T_pi,kappa_pi2,kappa_pi
std::string waveform_csv(const ControlWaveform& wave, const OutputMeta& meta);
std::string trajectory_csv(const Trajectory& traj, const OutputMeta& meta);
std::string simulation_csv(const std::vector<CartesianSample>& samples,
                           const OutputMeta& meta);

struct SweepRow {
  double r = 0.0;
  double e_pi2 = 0.0, e_pi = 0.0;
  double t_pi2 = 0.0, t_pi = 0.0;
  double kappa_pi2 = 0.0, kappa_pi = 0.0;
};
std::string sweep_csv(const std::vector<SweepRow>& rows, const OutputMeta& meta);

nlohmann::json waveform_json(const ControlWaveform& wave, const OutputMeta& meta);
nlohmann::json trajectory_json(const Trajectory& traj, const OutputMeta& meta);
nlohmann::json metrics_json(const AnalyticSolution& sol, const OutputMeta& meta);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Readers. Waveforms load from .json or CSV (by extension); trajectories
// from the JSON document (CSV drops the costate column).
ControlWaveform read_waveform(const std::string& path);
Trajectory read_trajectory(const std::string& path);

// Append one run record line to <dir>/runs.jsonl.
void append_run_record(const std::string& dir, const nlohmann::json& record);

std::string timestamp_utc();

} // namespace relaxo::io
