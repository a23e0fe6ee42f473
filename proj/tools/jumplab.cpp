#include <jumplab/harness.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using namespace jumplab;

struct Common {
  std::string scene;
  std::string kernel = "riesz";
  int n = 0;
  int j = 1;
  int points = 16;
  std::vector<std::string> params;
  double a = 0.5;
  double b = 0.25;
  double tol = 1e-6;
  double eps0 = 0.0;
  double ratio = 0.5;
  int max_steps = 24;
  int min_steps = 3;
  int richardson = 0;
  double quad_tol = 1e-10;
  long max_cells = 1'000'000;
};

void add_common(CLI::App* cmd, Common& c, bool need_points) {
  cmd->add_option("--scene", c.scene, "builtin scene name or JSON scene file")->required();
  cmd->add_option("--kernel", c.kernel, "riesz | cauchy-power | double-layer")
      ->check(CLI::IsMember({"riesz", "cauchy-power", "double-layer"}));
  cmd->add_option("--n", c.n, "dimension of the set for riesz/double-layer (default: scene)");
  cmd->add_option("--j", c.j, "odd power for cauchy-power");
  cmd->add_option("--points", c.points, "number of default evaluation points")->check(CLI::PositiveNumber);
  if (need_points) {
    cmd->add_option("--param", c.params, "explicit point as patch:t0[,t1]; repeatable");
  }
  cmd->add_option("--a", c.a, "cone aperture, 0 < b < a < 1");
  cmd->add_option("--b", c.b, "truncation factor, 0 < b < a");
  cmd->add_option("--tol", c.tol, "limit convergence tolerance");
  cmd->add_option("--eps0", c.eps0, "first scale (default: 0.1 * scene diameter)");
  cmd->add_option("--ratio", c.ratio, "scale ratio in (0, 1)");
  cmd->add_option("--max-steps", c.max_steps, "scales per limit");
  cmd->add_option("--min-steps", c.min_steps, "scales before convergence may be declared");
  cmd->add_option("--richardson", c.richardson, "Richardson order (0 = off)");
  cmd->add_option("--quad-tol", c.quad_tol, "absolute quadrature tolerance");
  cmd->add_option("--max-cells", c.max_cells, "quadrature cell budget");
}

EvaluationPoint parse_point(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw SceneError("--param expects patch:t0[,t1], got \"" + text + "\"");
  EvaluationPoint p;
  std::vector<double> ts;
  try {
    p.patch = std::stoi(text.substr(0, colon));
    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) ts.push_back(std::stod(item));
  } catch (const std::logic_error&) {
    throw SceneError("--param expects patch:t0[,t1], got \"" + text + "\"");
  }
  if (ts.empty() || ts.size() > 2) throw SceneError("--param needs one or two parameters");
  p.param = Param(static_cast<Eigen::Index>(ts.size()));
  for (std::size_t i = 0; i < ts.size(); ++i) p.param[static_cast<Eigen::Index>(i)] = ts[i];
  return p;
}

ExperimentConfig make_config(const Common& c) {
  ExperimentConfig cfg;
  cfg.scene = load_scene(c.scene);
  cfg.kernel.kind = c.kernel;
  cfg.kernel.n = c.n;
  cfg.kernel.j = c.j;
  cfg.point_count = c.points;
  for (const std::string& p : c.params) cfg.points.push_back(parse_point(p));
  cfg.a = c.a;
  cfg.b = c.b;
  cfg.extrapolation.eps0 = c.eps0;
  cfg.extrapolation.ratio = c.ratio;
  cfg.extrapolation.tol = c.tol;
  cfg.extrapolation.max_steps = c.max_steps;
  cfg.extrapolation.min_steps = c.min_steps;
  cfg.extrapolation.richardson_order = c.richardson;
  cfg.quad.abs_tol = c.quad_tol;
  cfg.quad.max_cells = c.max_cells;
  return cfg;
}

void print_summary(const JumpReport& report) {
  double max_avg = 0.0, max_jump = 0.0;
  int converged = 0;
  for (const JumpRecord& r : report.records) {
    max_avg = std::max(max_avg, r.residual_avg);
    max_jump = std::max(max_jump, r.residual_jump);
    converged += r.converged ? 1 : 0;
  }
  std::printf("scene %s, kernel %s, %zu points\n", report.scene_name.c_str(), report.kernel_name.c_str(),
              report.records.size());
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const JumpRecord& r = report.records[i];
    std::printf("  point %2zu  res_avg %.3e  res_jump %.3e  %s\n", i, r.residual_avg, r.residual_jump,
                r.converged ? "converged" : "NOT converged");
  }
  std::printf("converged %d/%zu, max res_avg %.3e, max res_jump %.3e, residual tol %.1e -> %s\n", converged,
              report.records.size(), max_avg, max_jump, report.residual_tol(),
              report.exit_code() == 0 ? "ok" : "FAILED");
}

int run_verify(const Common& c, double residual_tol, const std::string& out, const std::string& csv,
               const std::string& plot, const std::vector<double>& ladder, bool reflection, bool quiet) {
  ExperimentConfig cfg = make_config(c);
  cfg.residual_tol = residual_tol;
  cfg.json_path = out;
  cfg.csv_path = csv;
  cfg.plot_path = plot;
  cfg.delta_ladder = ladder;
  cfg.reflection_checks = reflection;
  const JumpReport report = cfg.kernel.kind == "double-layer" ? run_double_layer(cfg) : run_experiment(cfg);
  if (!quiet) print_summary(report);
  return report.exit_code();
}

int run_constants(const std::string& kind, int n, int j, std::vector<double> direction, bool numeric,
                  double radius, bool no_tail) {
  const int dim = static_cast<int>(direction.size());
  if (dim < 2 || dim > 3) throw DomainError("--direction needs 2 or 3 components");
  Vec normal(dim);
  for (int i = 0; i < dim; ++i) normal[i] = direction[static_cast<std::size_t>(i)];
  if (!(normal.norm() > 0.0)) throw DomainError("--direction must be nonzero");
  normal /= normal.norm();
  KernelSpec spec{kind, n > 0 ? n : dim - 1, j};
  const Transform op = make_transform(spec, dim - 1);

  nlohmann::ordered_json out;
  out["kernel"] = op.name();
  out["direction"] = std::vector<double>(normal.data(), normal.data() + normal.size());
  auto as_list = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  const Kernel& k = op.kernel();
  if (k.has_closed_form_jump()) out["closed_form"] = as_list(k.closed_form_jump(normal));
  if (numeric || !k.has_closed_form_jump()) {
    JumpConstantOptions options;
    options.radius = radius;
    options.include_tail = !no_tail;
    options.tol = 1e-6;
    JumpConstantEstimate est;
    try {
      est = jump_constant_numeric(k, normal, options);
    } catch (const ConvergenceFailure& e) {
      est.value = e.estimate();
      est.error = e.error_bound();
      est.radius = radius;
      out["warning"] = e.what();
    }
    out["numeric"] = as_list(est.value);
    out["error"] = est.error;
    out["tail_bound"] = est.tail_bound;
    out["radius"] = est.radius;
    out["tail_integrated"] = !no_tail;
  }
  if (op.pairing() == Transform::Pairing::DoubleLayer) out["jump_coefficient"] = as_list(op.jump_coefficient(normal));
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_diagnose(const Common& c, const std::vector<double>& ladder, const std::string& csv,
                 const std::string& plot, const ConeSampling& sampling) {
  ExperimentConfig cfg = make_config(c);
  cfg.sampling = sampling;
  const DiagnosticTable table = diagnostic_sweep(cfg, ladder);
  const std::string text = diagnostics_csv(table);
  if (csv.empty()) std::cout << text;
  else write_text_file(csv, text);
  if (!plot.empty()) emit_plot(table, plot);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jumplab: numerical verification of boundary jump identities for odd singular integrals"};
  app.require_subcommand(1);

  Common verify_opts;
  double residual_tol = 0.0;
  std::string out, csv, plot;
  std::vector<double> verify_ladder;
  bool reflection = false, quiet = false;
  CLI::App* verify = app.add_subcommand("verify", "check the jump identities at evaluation points");
  add_common(verify, verify_opts, true);
  verify->add_option("--residual-tol", residual_tol, "residual threshold for the exit status (default: --tol)");
  verify->add_option("--out", out, "JSON report path");
  verify->add_option("--csv", csv, "CSV table path");
  verify->add_option("--plot", plot, "SVG residual plot path");
  verify->add_option("--delta-ladder", verify_ladder, "also run the symmetric diagnostics")->delimiter(',');
  verify->add_flag("--reflection", reflection, "also run flat-plane reflection checks");
  verify->add_flag("--quiet", quiet, "no summary on stdout");

  std::string const_kernel = "riesz";
  int const_n = 0, const_j = 1;
  std::vector<double> direction;
  bool numeric = false, no_tail = false;
  double radius = 1e4;
  CLI::App* constants = app.add_subcommand("constants", "jump constant C_K(N) for a direction");
  constants->add_option("--kernel", const_kernel, "riesz | cauchy-power | double-layer")
      ->check(CLI::IsMember({"riesz", "cauchy-power", "double-layer"}));
  constants->add_option("--n", const_n, "dimension of the hyperplane (default: from --direction)");
  constants->add_option("--j", const_j, "odd power for cauchy-power");
  constants->add_option("--direction", direction, "unit normal, e.g. 0,1 or 0,0,1")
      ->required()
      ->delimiter(',');
  constants->add_flag("--numeric", numeric, "also evaluate the hyperplane integral");
  constants->add_option("--radius", radius, "radial split point R of the numeric integral");
  constants->add_flag("--no-tail", no_tail, "drop |y| > R and report the tail bound instead");

  Common diag_opts;
  diag_opts.points = 8;
  std::vector<double> ladder;
  std::string diag_csv, diag_plot;
  ConeSampling sampling;
  CLI::App* diagnose = app.add_subcommand("diagnose", "symmetric S_delta / S~_delta sweep");
  add_common(diagnose, diag_opts, true);
  diagnose->add_option("--delta-ladder", ladder, "comma separated deltas")->required()->delimiter(',');
  diagnose->add_option("--csv", diag_csv, "CSV output path (default: stdout)");
  diagnose->add_option("--plot", diag_plot, "SVG plot path");
  diagnose->add_option("--angular", sampling.angular, "directions per radius");
  diagnose->add_option("--per-octave", sampling.per_octave, "radii per halving");
  diagnose->add_option("--r-min", sampling.r_min, "smallest sample radius");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitSetupError;
  }

  try {
    if (verify->parsed()) {
      return run_verify(verify_opts, residual_tol, out, csv, plot, verify_ladder, reflection, quiet);
    }
    if (constants->parsed()) return run_constants(const_kernel, const_n, const_j, direction, numeric, radius, no_tail);
    if (diagnose->parsed()) return run_diagnose(diag_opts, ladder, diag_csv, diag_plot, sampling);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "jumplab: %s\n", e.what());
    return kExitSetupError;
  }
  return kExitSetupError;
}
