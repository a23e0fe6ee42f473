#pragma once

#include <jumplab/measure.hpp>
#include <jumplab/operators.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace jumplab {

/// A carrier plus measure, with the metadata reports need.
struct Scene {
  std::string name;
  std::shared_ptr<const RectifiableSet> set;
  std::shared_ptr<const RadonMeasure> measure;
  /// Length (or side) of a truncated stand-in for an unbounded set; 0 otherwise.
  double truncation_length = 0.0;
  /// Canonical JSON of the scene description, echoed into reports.
  std::string source_json;
};

/// Built-in scenes: circle, circle-cos, line, fourier-graph, sphere,
/// sphere-cos, atoms.
std::vector<std::string> builtin_scene_names();
Scene builtin_scene(const std::string& name);

/// Scene from JSON text (schema in the README). Throws SceneError.
Scene parse_scene(const std::string& json_text, const std::string& name = "scene");

/// A builtin name, or else a path to a JSON scene file.
Scene load_scene(const std::string& file_or_builtin);

struct KernelSpec {
  /// "riesz", "cauchy-power" or "double-layer".
  std::string kind = "riesz";
  /// Riesz / double-layer dimension; 0 means the scene's n.
  int n = 0;
  /// Cauchy power.
  int j = 1;
};

/// Throws InvalidKernel / SceneError on an unknown kind or dimension mismatch.
Transform make_transform(const KernelSpec& spec, int scene_n);

struct EvaluationPoint {
  int patch = 0;
  Param param;
};

struct ExperimentConfig {
  Scene scene;
  KernelSpec kernel;
  /// Explicit points by patch parameter; when empty `point_count` default
  /// points are used.
  std::vector<EvaluationPoint> points;
  int point_count = 16;
  double a = 0.5;
  double b = 0.25;
  /// extrapolation.eps0 <= 0 selects 0.1 * scene diameter.
  ExtrapolationConfig extrapolation{0.0};
  QuadConfig quad{};
  /// Residual threshold for the exit status; <= 0 means extrapolation.tol.
  double residual_tol = 0.0;
  std::vector<double> delta_ladder;
  bool reflection_checks = false;
  ConeSampling sampling{};
  /// Worker cap; 0 reads JUMPLAB_THREADS (default: hardware concurrency).
  int threads = 0;
  std::string json_path;
  std::string csv_path;
  std::string plot_path;

  void validate() const;
};

struct DiagnosticRow {
  int point_id = 0;
  double delta = 0.0;
  double sum = 0.0;
  double difference = 0.0;
  int samples = 0;
};

struct DiagnosticTable {
  std::vector<DiagnosticRow> rows;
};

struct ReflectionRow {
  int point_id = 0;
  double distance = 0.0;
  double value = 0.0;
};

struct JumpReport {
  std::string scene_name;
  std::string shape;
  std::string kernel_name;
  KernelSpec kernel;
  bool double_layer = false;
  int n = 0;
  int ambient_dim = 0;
  double diameter = 0.0;
  double truncation_length = 0.0;
  std::string scene_json;
  ExperimentConfig config;
  std::vector<JumpRecord> records;
  std::optional<DiagnosticTable> diagnostics;
  std::vector<ReflectionRow> reflections;
  std::string timestamp;

  double residual_tol() const;
  bool all_converged() const;
  bool residuals_ok() const;
  /// 0 when every point converged with residuals below tolerance, else 1.
  int exit_code() const;
};

/// Exit status for setup errors (bad scene, kernel or config).
inline constexpr int kExitSetupError = 2;

/// Runs the jump verification at every point and writes the configured
/// outputs. Non-convergence is reported, not thrown.
JumpReport run_experiment(const ExperimentConfig& config);

/// run_experiment for the double layer on a closed scene (circle or sphere).
JumpReport run_double_layer(const ExperimentConfig& config);

/// S_delta and S~_delta sampled sups for each point and delta, in point order.
DiagnosticTable diagnostic_sweep(const ExperimentConfig& config,
                                 const std::vector<double>& delta_ladder);

/// Same, reusing principal values already in a report.
DiagnosticTable diagnostic_sweep(const JumpReport& report, const std::vector<double>& delta_ladder);

std::string report_json(const JumpReport& report);
std::string report_csv(const JumpReport& report);
std::string diagnostics_csv(const DiagnosticTable& table);

/// Log-log SVG, one series per evaluation point. Throws NoDataError when
/// there is nothing to draw.
std::string plot_svg(const JumpReport& report);
std::string plot_svg(const DiagnosticTable& table);
void emit_plot(const JumpReport& report, const std::string& path);
void emit_plot(const DiagnosticTable& table, const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

/// Worker count from JUMPLAB_THREADS, else hardware concurrency; at least 1.
int thread_limit();

}  // namespace jumplab
