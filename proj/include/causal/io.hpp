#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "causal/discrete.hpp"
#include "causal/estimation.hpp"
#include "causal/gaussian.hpp"
#include "causal/timeseries.hpp"

namespace causal {

// Model files are JSON:
//   graph     {"nodes": ["X", "Y"], "edges": [["X", "Y"]]}
//   discrete  {"dag": graph, "cardinalities": {"X": 2, "Y": 2},
//              "cpts": {"Y": {"parents": ["X"], "table": [[0.9, 0.1], [0.2, 0.8]]}}}
//   linear    {"dag": graph, "coefficients": [["X", "Y", 0.7]], "noise_vars": {"X": 1, "Y": 1}}
//   VAR       {"names": ["X", "Y"], "coefficients": [[0, 0.9], [0.9, 0]] or a list of
//              such matrices (lag 1 first), "noise_vars": [0.19, 0.19] or by name}
// A "graph" may also be given at top level in place of {"dag": ...}.
// `source` names the origin of `text` in error messages.

Dag parse_dag(std::string_view text, std::string_view source = "<input>");
DiscreteModel parse_discrete_model(std::string_view text, std::string_view source = "<input>");
LinearSem parse_linear_sem(std::string_view text, std::string_view source = "<input>");
VarModel parse_var_model(std::string_view text, std::string_view source = "<input>");

/// Reads a whole file; throws ParseError if it cannot be opened.
std::string read_file(const std::string& path);

Dag load_dag(const std::string& path);
DiscreteModel load_discrete_model(const std::string& path);
LinearSem load_linear_sem(const std::string& path);
VarModel load_var_model(const std::string& path);

std::string to_json(const DiscreteModel& model);
std::string to_json(const LinearSem& sem);
std::string to_json(const VarModel& model);

/// CSV with a header row of variable names and one row per observation.
SampleMatrix parse_samples_csv(std::string_view text, std::string_view source = "<input>");
SampleMatrix load_samples_csv(const std::string& path);
void write_samples_csv(std::ostream& out, const SampleMatrix& samples);

/// CSV with columns t, then one column per component.
Trajectory parse_trajectory_csv(std::string_view text, std::string_view source = "<input>");
Trajectory load_trajectory_csv(const std::string& path);
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Shortest decimal text that round-trips; "inf", "-inf" and "nan" for
/// special values.
std::string format_number(double v);

}  // namespace causal
