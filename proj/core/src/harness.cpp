#include <jumplab/harness.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace jumplab {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Scenes ----------------------------------------------------------------------

const char* const kBuiltinScenes[][2] = {
    {"circle", R"({"shape":"circle","center":[0,0],"radius":1,"density":{"type":"constant","value":1}})"},
    {"circle-cos",
     R"({"shape":"circle","center":[0,0],"radius":1,"density":{"type":"trig","axis":0,"offset":0,"cos":[1],"sin":[]}})"},
    {"line",
     R"({"shape":"segment","a":[-5,0],"b":[5,0],"truncation_length":10,"density":{"type":"constant","value":1}})"},
    {"fourier-graph",
     R"({"shape":"fourier-graph","s0":0,"s1":6.283185307179586,"sin":[0.3],"cos":[0,0.15],)"
     R"("density":{"type":"trig","axis":0,"offset":1,"cos":[0.25],"sin":[]}})"},
    {"sphere", R"({"shape":"sphere","center":[0,0,0],"radius":1,"density":{"type":"constant","value":1}})"},
    {"sphere-cos",
     R"({"shape":"sphere","center":[0,0,0],"radius":1,"density":{"type":"trig","axis":0,"offset":0,"cos":[1],"sin":[]}})"},
    {"atoms",
     R"({"shape":"circle","center":[0,0],"radius":1,"density":{"type":"zero"},"atoms":[[[0.3,0.2],1.0],[[-2.0,1.0],-0.5]]})"},
};

Vec json_vec(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || j.size() > 4) {
    throw SceneError(std::string(what) + " must be an array of 1 to 4 numbers");
  }
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Param json_param(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || j.size() > 2) {
    throw SceneError(std::string(what) + " must be an array of 1 or 2 numbers");
  }
  Param p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return p;
}

std::vector<double> json_list(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<double>>();
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw SceneError(std::string("scene is missing \"") + key + "\"");
  return j.at(key);
}

Density parse_density(const json& j) {
  if (j.is_number()) return Density::constant(j.get<double>());
  if (j.is_array()) {
    Density sum;
    for (const json& term : j) sum = sum.plus(parse_density(term));
    return sum;
  }
  if (!j.is_object()) throw SceneError("density must be a number, an object or an array");
  const std::string type = require(j, "type").get<std::string>();
  if (type == "zero") return Density::zero();
  if (type == "constant") return Density::constant(require(j, "value").get<double>());
  const int axis = j.value("axis", 0);
  if (type == "trig") {
    return Density::trig(axis, j.value("offset", 0.0), json_list(j, "cos"), json_list(j, "sin"));
  }
  if (type == "poly") return Density::poly(axis, require(j, "coeffs").get<std::vector<double>>());
  throw SceneError("unknown density type \"" + type + "\"");
}

std::vector<Atom> parse_atoms(const json& j, int ambient) {
  std::vector<Atom> atoms;
  if (!j.is_array()) throw SceneError("atoms must be an array of [[x...], w] pairs");
  for (const json& a : j) {
    if (!a.is_array() || a.size() != 2) throw SceneError("each atom is [[x...], w]");
    Atom atom{json_vec(a[0], "atom location"), a[1].get<double>()};
    if (atom.location.size() != ambient) throw SceneError("atom location has the wrong dimension");
    atoms.push_back(std::move(atom));
  }
  return atoms;
}

RectifiableSet build_set(const json& j) {
  const std::string shape = require(j, "shape").get<std::string>();
  std::optional<Orientation> orientation;
  if (j.contains("orientation")) {
    orientation = orientation_from_string(j.at("orientation").get<std::string>());
  }
  auto check_orientation = [&](const RectifiableSet& set) {
    if (orientation && *orientation != set.orientation()) {
      throw SceneError("shape \"" + shape + "\" only supports orientation \"" +
                       to_string(set.orientation()) + "\"");
    }
  };
  if (shape == "segment") {
    const Vec a = json_vec(require(j, "a"), "a");
    const Vec b = json_vec(require(j, "b"), "b");
    if (a.size() != 2 || b.size() != 2) throw SceneError("segment endpoints must lie in R^2");
    RectifiableSet set = make_segment(a, b);
    check_orientation(set);
    return set;
  }
  if (shape == "circle") {
    const Vec c = json_vec(j.value("center", json::array({0, 0})), "center");
    if (c.size() != 2) throw SceneError("circle center must lie in R^2");
    RectifiableSet set = make_circle(c, j.value("radius", 1.0));
    check_orientation(set);
    return set;
  }
  if (shape == "sphere") {
    const Vec c = json_vec(j.value("center", json::array({0, 0, 0})), "center");
    if (c.size() != 3) throw SceneError("sphere center must lie in R^3");
    RectifiableSet set = make_sphere(c, j.value("radius", 1.0));
    check_orientation(set);
    return set;
  }
  if (shape == "polyline") {
    std::vector<Vec> vertices;
    for (const json& v : require(j, "vertices")) {
      vertices.push_back(json_vec(v, "vertex"));
      if (vertices.back().size() != 2) throw SceneError("polyline vertices must lie in R^2");
    }
    return make_polyline(vertices, j.value("closed", false),
                         orientation.value_or(Orientation::GraphUp));
  }
  if (shape == "fourier-graph") {
    RectifiableSet set = make_fourier_graph(require(j, "s0").get<double>(), require(j, "s1").get<double>(),
                                            json_list(j, "sin"), json_list(j, "cos"));
    check_orientation(set);
    return set;
  }
  if (shape == "poly-graph") {
    RectifiableSet set = make_poly_graph(json_param(require(j, "lo"), "lo"), json_param(require(j, "hi"), "hi"),
                                         require(j, "coeffs").get<std::vector<std::vector<double>>>());
    check_orientation(set);
    return set;
  }
  throw SceneError("unknown shape \"" + shape + "\"");
}

// Parallel map ---------------------------------------------------------------

template <class F>
void ordered_parallel_for(int count, int threads, F&& body) {
  if (count <= 0) return;
  const int workers = std::max(1, std::min(threads, count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Formatting ------------------------------------------------------------------

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ojson vec_json(const Vec& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ojson limit_json(const LimitResult& r) {
  ojson o;
  o["value"] = vec_json(r.value);
  o["converged"] = r.converged;
  o["last_delta"] = r.last_delta;
  o["quadrature_failed"] = r.quadrature_failed;
  ojson steps = ojson::array();
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    ojson s;
    s["scale"] = r.samples[k].first;
    s["value"] = vec_json(r.samples[k].second);
    if (k > 0) s["increment"] = (r.samples[k].second - r.samples[k - 1].second).norm();
    steps.push_back(std::move(s));
  }
  o["steps"] = std::move(steps);
  return o;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ExperimentConfig resolved(const ExperimentConfig& in) {
  ExperimentConfig cfg = in;
  if (!(cfg.extrapolation.eps0 > 0.0)) cfg.extrapolation.eps0 = 0.1 * cfg.scene.set->diameter();
  if (!(cfg.residual_tol > 0.0)) cfg.residual_tol = cfg.extrapolation.tol;
  if (cfg.threads <= 0) cfg.threads = thread_limit();
  return cfg;
}

std::vector<SurfacePoint> evaluation_points(const ExperimentConfig& cfg) {
  const RectifiableSet& set = *cfg.scene.set;
  std::vector<SurfacePoint> pts;
  if (cfg.points.empty()) {
    pts = default_evaluation_points(set, cfg.point_count);
  } else {
    for (const EvaluationPoint& p : cfg.points) {
      if (p.patch < 0 || p.patch >= static_cast<int>(set.patch_count())) {
        throw SceneError("evaluation point refers to a missing patch");
      }
      const Patch& patch = set.patch(p.patch);
      if (p.param.size() != patch.param_dim()) throw SceneError("evaluation point has the wrong parameter dimension");
      for (Eigen::Index i = 0; i < p.param.size(); ++i) {
        if (!(p.param[i] > patch.lower()[i] && p.param[i] < patch.upper()[i])) {
          throw SceneError("evaluation points must lie strictly inside their patch");
        }
      }
      pts.push_back(set.surface_point(p.patch, p.param));
    }
  }
  const double guard = 1e-9 * std::max(1.0, set.diameter());
  for (const SurfacePoint& sp : pts) {
    for (const Atom& a : cfg.scene.measure->atoms()) {
      if ((a.location - sp.x).norm() <= guard) throw SceneError("an evaluation point coincides with an atom");
    }
  }
  return pts;
}

JumpReport run_impl(const ExperimentConfig& input) {
  input.validate();
  const ExperimentConfig cfg = resolved(input);
  const Scene& scene = cfg.scene;
  const Transform op = make_transform(cfg.kernel, scene.set->n());
  if (op.pairing() == Transform::Pairing::DoubleLayer) {
    if (scene.set->orientation() != Orientation::Outward) {
      throw SceneError("the double layer needs a closed, outward-oriented scene");
    }
    if (!scene.measure->atoms().empty()) throw SceneError("the double layer takes no atoms");
  }
  const std::vector<SurfacePoint> pts = evaluation_points(cfg);

  JumpReport report;
  report.timestamp = utc_timestamp();
  report.scene_name = scene.name;
  report.shape = scene.set->shape();
  report.kernel_name = op.name();
  report.kernel = cfg.kernel;
  report.double_layer = op.pairing() == Transform::Pairing::DoubleLayer;
  report.n = scene.set->n();
  report.ambient_dim = scene.set->ambient_dim();
  report.diameter = scene.set->diameter();
  report.truncation_length = scene.truncation_length;
  report.scene_json = scene.source_json;
  report.config = cfg;
  report.records.resize(pts.size());

  ordered_parallel_for(static_cast<int>(pts.size()), cfg.threads, [&](int i) {
    report.records[static_cast<std::size_t>(i)] =
        jump_residuals(op, *scene.measure, pts[static_cast<std::size_t>(i)], cfg.a, cfg.b,
                       cfg.extrapolation, cfg.quad);
  });

  if (!cfg.delta_ladder.empty()) report.diagnostics = diagnostic_sweep(report, cfg.delta_ladder);

  if (cfg.reflection_checks) {
    report.reflections.resize(pts.size());
    ordered_parallel_for(static_cast<int>(pts.size()), cfg.threads, [&](int i) {
      const SurfacePoint& sp = pts[static_cast<std::size_t>(i)];
      const TangentFrame frame = scene.set->tangent_frame(sp.patch, sp.param);
      const double h = cfg.extrapolation.eps0;
      const Vec y = frame.x + h * (frame.normal + 0.3 * Vec(frame.basis.col(0)));
      ReflectionRow row;
      row.point_id = i;
      row.distance = h;
      row.value = flat_plane_reflection_check(op.kernel(), frame, y, report.diameter, cfg.quad);
      report.reflections[static_cast<std::size_t>(i)] = row;
    });
  }

  if (!cfg.json_path.empty()) write_text_file(cfg.json_path, report_json(report));
  if (!cfg.csv_path.empty()) write_text_file(cfg.csv_path, report_csv(report));
  if (!cfg.plot_path.empty()) emit_plot(report, cfg.plot_path);
  return report;
}

// SVG ------------------------------------------------------------------------

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string svg_plot(const std::vector<Series>& series, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel) {
  constexpr double kFloor = 1e-16;
  constexpr double W = 720, H = 480, L = 80, R = 170, T = 40, B = 60;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  std::size_t total = 0;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !std::isfinite(x)) continue;
      const double ly = std::log10(std::max(std::isfinite(y) ? y : kFloor, kFloor));
      xmin = std::min(xmin, std::log10(x));
      xmax = std::max(xmax, std::log10(x));
      ymin = std::min(ymin, ly);
      ymax = std::max(ymax, ly);
      ++total;
    }
  }
  if (total == 0) throw NoDataError("nothing to plot");
  xmin = std::floor(xmin);
  xmax = std::ceil(xmax);
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fixed(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";
  // Axes and decade ticks.
  out << "<g stroke=\"#444\" fill=\"none\">\n"
      << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n"
      << "</g>\n<g fill=\"#222\">\n";
  const int xstep = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / 10)));
  for (int e = static_cast<int>(xmin); e <= static_cast<int>(xmax); e += xstep) {
    const std::string x = fixed(px(e));
    out << "<line x1=\"" << x << "\" y1=\"" << H - B << "\" x2=\"" << x << "\" y2=\"" << H - B + 5
        << "\" stroke=\"#444\"/><text x=\"" << x << "\" y=\"" << H - B + 20
        << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  const int ystep = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / 10)));
  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); e += ystep) {
    const std::string y = fixed(py(e));
    out << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y
        << "\" stroke=\"#444\"/><text x=\"" << L - 8 << "\" y=\"" << y
        << "\" text-anchor=\"end\" dominant-baseline=\"middle\">1e" << e << "</text>\n";
  }
  out << "<text x=\"" << fixed((L + W - R) / 2) << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
      << xlabel << "</text>\n"
      << "<text transform=\"translate(18," << fixed((T + H - B) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel << "</text>\n</g>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
    std::ostringstream poly;
    std::ostringstream marks;
    for (const auto& [x, y] : series[s].points) {
      if (!(x > 0.0) || !std::isfinite(x)) continue;
      const std::string cx = fixed(px(std::log10(x)));
      const std::string cy = fixed(py(std::log10(std::max(std::isfinite(y) ? y : kFloor, kFloor))));
      poly << cx << ',' << cy << ' ';
      marks << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"3\"/>";
    }
    out << "<g class=\"series\" stroke=\"" << color << "\" fill=\"" << color << "\">\n"
        << "<polyline fill=\"none\" stroke-width=\"1.5\" points=\"" << poly.str() << "\"/>\n"
        << marks.str() << "\n</g>\n";
    const double ly = T + 10 + 18.0 * static_cast<double>(s);
    out << "<g fill=\"" << color << "\"><rect x=\"" << W - R + 15 << "\" y=\"" << fixed(ly - 5)
        << "\" width=\"14\" height=\"4\"/><text x=\"" << W - R + 35 << "\" y=\"" << fixed(ly)
        << "\" dominant-baseline=\"middle\" fill=\"#222\">" << series[s].label << "</text></g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace

// Scenes ----------------------------------------------------------------------

std::vector<std::string> builtin_scene_names() {
  std::vector<std::string> names;
  for (const auto& entry : kBuiltinScenes) names.emplace_back(entry[0]);
  return names;
}

Scene builtin_scene(const std::string& name) {
  for (const auto& entry : kBuiltinScenes) {
    if (name == entry[0]) return parse_scene(entry[1], name);
  }
  throw SceneError("unknown builtin scene \"" + name + "\"");
}

Scene parse_scene(const std::string& json_text, const std::string& name) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SceneError(std::string("scene JSON does not parse: ") + e.what());
  }
  if (!j.is_object()) throw SceneError("scene JSON must be an object");
  try {
    auto set = std::make_shared<const RectifiableSet>(build_set(j));
    Density density = j.contains("density") ? parse_density(j.at("density")) : Density::constant(1.0);
    std::vector<Atom> atoms;
    if (j.contains("atoms")) atoms = parse_atoms(j.at("atoms"), set->ambient_dim());
    for (const Density::Term& t : density.terms()) {
      if (t.kind != Density::Kind::Constant && t.axis >= set->n()) {
        throw SceneError("density axis exceeds the parameter dimension");
      }
    }
    Scene scene;
    scene.name = j.value("name", name);
    scene.set = set;
    scene.measure = std::make_shared<const RadonMeasure>(set, std::move(density), std::move(atoms));
    scene.truncation_length = j.value("truncation_length", 0.0);
    scene.source_json = j.dump();
    return scene;
  } catch (const json::exception& e) {
    throw SceneError(std::string("bad scene field: ") + e.what());
  } catch (const SceneError&) {
    throw;
  } catch (const Error& e) {
    throw SceneError(e.what());
  }
}

Scene load_scene(const std::string& file_or_builtin) {
  for (const auto& entry : kBuiltinScenes) {
    if (file_or_builtin == entry[0]) return builtin_scene(file_or_builtin);
  }
  std::ifstream in(file_or_builtin, std::ios::binary);
  if (!in) throw SceneError("no builtin scene or readable file named \"" + file_or_builtin + "\"");
  std::ostringstream text;
  text << in.rdbuf();
  std::string stem = file_or_builtin;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (const auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
  return parse_scene(text.str(), stem);
}

Transform make_transform(const KernelSpec& spec, int scene_n) {
  const int n = spec.n > 0 ? spec.n : scene_n;
  if (spec.kind == "riesz" || spec.kind == "double-layer") {
    if (n != scene_n) {
      throw SceneError("kernel dimension n = " + std::to_string(n) + " does not match the scene (n = " +
                       std::to_string(scene_n) + ")");
    }
    return spec.kind == "riesz" ? Transform(make_riesz(n)) : Transform::double_layer(n);
  }
  if (spec.kind == "cauchy-power") {
    if (scene_n != 1) throw SceneError("cauchy-power kernels act on curves in the plane");
    return Transform(make_cauchy_power(spec.j));
  }
  throw InvalidKernel("unknown kernel \"" + spec.kind + "\"");
}

void ExperimentConfig::validate() const {
  if (!scene.set || !scene.measure) throw SceneError("experiment has no scene");
  if (!(a > 0.0 && a < 1.0)) throw DomainError("aperture a must lie in (0, 1)");
  if (!(b > 0.0 && b < a)) throw DomainError("truncation factor b must lie in (0, a)");
  if (points.empty() && point_count < 1) throw DomainError("need at least one evaluation point");
  for (double d : delta_ladder) {
    if (!(d > 0.0)) throw DomainError("delta ladder entries must be positive");
  }
  ExtrapolationConfig e = extrapolation;
  if (!(e.eps0 > 0.0)) e.eps0 = 1.0;
  e.validate();
}

// Reports ---------------------------------------------------------------------

double JumpReport::residual_tol() const {
  return config.residual_tol > 0.0 ? config.residual_tol : config.extrapolation.tol;
}

bool JumpReport::all_converged() const {
  return std::all_of(records.begin(), records.end(), [](const JumpRecord& r) { return r.converged; });
}

bool JumpReport::residuals_ok() const {
  const double tol = residual_tol();
  return std::all_of(records.begin(), records.end(), [&](const JumpRecord& r) {
    return r.residual_avg < tol && r.residual_jump < tol;
  });
}

int JumpReport::exit_code() const { return all_converged() && residuals_ok() ? 0 : 1; }

JumpReport run_experiment(const ExperimentConfig& config) { return run_impl(config); }

JumpReport run_double_layer(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.kernel.kind = "double-layer";
  return run_impl(cfg);
}

DiagnosticTable diagnostic_sweep(const JumpReport& report, const std::vector<double>& delta_ladder) {
  if (delta_ladder.empty()) throw DomainError("delta ladder is empty");
  for (double d : delta_ladder) {
    if (!(d > 0.0)) throw DomainError("delta ladder entries must be positive");
  }
  const ExperimentConfig& cfg = report.config;
  const Transform op = make_transform(cfg.kernel, cfg.scene.set->n());
  const std::size_t per_point = delta_ladder.size();
  DiagnosticTable table;
  table.rows.resize(report.records.size() * per_point);
  const int threads = cfg.threads > 0 ? cfg.threads : thread_limit();
  ordered_parallel_for(static_cast<int>(table.rows.size()), threads, [&](int idx) {
    const std::size_t i = static_cast<std::size_t>(idx) / per_point;
    const std::size_t k = static_cast<std::size_t>(idx) % per_point;
    const JumpRecord& rec = report.records[i];
    const SymmetricDiagnostics d = symmetric_diagnostics(op, *cfg.scene.measure, rec.point, rec.pv.value,
                                                         delta_ladder[k], cfg.a, cfg.b, cfg.sampling, cfg.quad);
    table.rows[static_cast<std::size_t>(idx)] = {static_cast<int>(i), delta_ladder[k], d.sum, d.difference, d.samples};
  });
  return table;
}

DiagnosticTable diagnostic_sweep(const ExperimentConfig& config, const std::vector<double>& delta_ladder) {
  if (delta_ladder.empty()) throw DomainError("delta ladder is empty");
  config.validate();
  const ExperimentConfig cfg = resolved(config);
  const Transform op = make_transform(cfg.kernel, cfg.scene.set->n());
  const std::vector<SurfacePoint> pts = evaluation_points(cfg);
  JumpReport shell;
  shell.config = cfg;
  shell.records.resize(pts.size());
  ordered_parallel_for(static_cast<int>(pts.size()), cfg.threads, [&](int i) {
    JumpRecord& rec = shell.records[static_cast<std::size_t>(i)];
    rec.point = pts[static_cast<std::size_t>(i)];
    rec.pv = principal_value(op, *cfg.scene.measure, rec.point, cfg.extrapolation, cfg.quad);
  });
  return diagnostic_sweep(shell, delta_ladder);
}

std::string report_json(const JumpReport& report) {
  const ExperimentConfig& cfg = report.config;
  ojson root;
  root["generated_at"] = report.timestamp;
  root["tool"] = "jumplab";
  ojson scene;
  scene["name"] = report.scene_name;
  scene["shape"] = report.shape;
  scene["n"] = report.n;
  scene["ambient_dim"] = report.ambient_dim;
  scene["diameter"] = report.diameter;
  scene["truncation_length"] = report.truncation_length;
  scene["spec"] = report.scene_json.empty() ? ojson(nullptr) : ojson::parse(report.scene_json);
  root["scene"] = std::move(scene);
  ojson kernel;
  kernel["kind"] = report.kernel.kind;
  kernel["name"] = report.kernel_name;
  kernel["n"] = report.n;
  if (report.kernel.kind == "cauchy-power") kernel["j"] = report.kernel.j;
  root["kernel"] = std::move(kernel);

  ojson c;
  c["a"] = cfg.a;
  c["b"] = cfg.b;
  c["points"] = report.records.size();
  c["eps0"] = cfg.extrapolation.eps0;
  c["ratio"] = cfg.extrapolation.ratio;
  c["tol"] = cfg.extrapolation.tol;
  c["max_steps"] = cfg.extrapolation.max_steps;
  c["min_steps"] = cfg.extrapolation.min_steps;
  c["richardson_order"] = cfg.extrapolation.richardson_order;
  c["residual_tol"] = report.residual_tol();
  ojson q;
  q["abs_tol"] = cfg.quad.abs_tol;
  q["rel_floor"] = cfg.quad.rel_floor;
  q["max_cells"] = cfg.quad.max_cells;
  q["initial_cells"] = cfg.quad.initial_cells;
  q["max_depth"] = cfg.quad.max_depth;
  q["straddle_ratio"] = cfg.quad.straddle_ratio;
  q["near_ratio"] = cfg.quad.near_ratio;
  q["noise_factor"] = cfg.quad.noise_factor;
  q["noise_order"] = cfg.quad.noise_order;
  c["quadrature"] = std::move(q);
  c["delta_ladder"] = cfg.delta_ladder;
  c["reflection_checks"] = cfg.reflection_checks;
  root["config"] = std::move(c);

  ojson points = ojson::array();
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const JumpRecord& r = report.records[i];
    ojson p;
    p["id"] = i;
    p["patch"] = r.point.patch;
    p["param"] = vec_json(Vec(r.point.param));
    p["x"] = vec_json(r.point.x);
    p["normal"] = vec_json(r.normal);
    p["f"] = r.density;
    p["pv"] = limit_json(r.pv);
    p["plus"] = limit_json(r.plus);
    p["minus"] = limit_json(r.minus);
    p["jump_constant"] = vec_json(r.jump_constant);
    p["jump_rhs"] = vec_json(r.jump_rhs);
    p["residual_avg"] = r.residual_avg;
    p["residual_jump"] = r.residual_jump;
    p["converged"] = r.converged;
    ojson trace = ojson::array();
    for (const TraceStep& s : r.trace) {
      trace.push_back({{"scale", s.scale}, {"residual_avg", s.residual_avg}, {"residual_jump", s.residual_jump}});
    }
    p["trace"] = std::move(trace);
    points.push_back(std::move(p));
  }
  root["points"] = std::move(points);

  if (report.diagnostics) {
    ojson rows = ojson::array();
    for (const DiagnosticRow& d : report.diagnostics->rows) {
      rows.push_back({{"point_id", d.point_id}, {"delta", d.delta}, {"sum", d.sum},
                      {"difference", d.difference}, {"samples", d.samples}});
    }
    root["diagnostics"] = std::move(rows);
  }
  if (!report.reflections.empty()) {
    ojson rows = ojson::array();
    for (const ReflectionRow& r : report.reflections) {
      rows.push_back({{"point_id", r.point_id}, {"distance", r.distance}, {"value", r.value}});
    }
    root["reflection_checks"] = std::move(rows);
  }

  double max_avg = 0.0, max_jump = 0.0;
  int converged = 0;
  for (const JumpRecord& r : report.records) {
    max_avg = std::max(max_avg, r.residual_avg);
    max_jump = std::max(max_jump, r.residual_jump);
    converged += r.converged ? 1 : 0;
  }
  ojson summary;
  summary["points"] = report.records.size();
  summary["converged"] = converged;
  summary["max_residual_avg"] = max_avg;
  summary["max_residual_jump"] = max_jump;
  summary["residuals_ok"] = report.residuals_ok();
  summary["exit_code"] = report.exit_code();
  root["summary"] = std::move(summary);
  return root.dump(2) + "\n";
}

std::string report_csv(const JumpReport& report) {
  std::ostringstream out;
  const int d = report.ambient_dim;
  const int m = report.records.empty() ? (report.double_layer ? 1 : d)
                                       : static_cast<int>(report.records.front().pv.value.size());
  const int ck = report.records.empty() ? m : static_cast<int>(report.records.front().jump_constant.size());
  auto cols = [&](const char* stem, int count) {
    for (int i = 0; i < count; ++i) out << ',' << stem << i;
  };
  out << "point_id";
  cols("x", d);
  cols("N", d);
  out << ",f";
  cols("pv", m);
  cols("Tplus", m);
  cols("Tminus", m);
  cols("CK", ck);
  out << ",res_avg,res_jump,converged\n";
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const JumpRecord& r = report.records[i];
    out << i;
    for (const Vec* v : {&r.point.x, &r.normal}) {
      for (Eigen::Index k = 0; k < v->size(); ++k) out << ',' << num((*v)[k]);
    }
    out << ',' << num(r.density);
    for (const Vec* v : {&r.pv.value, &r.plus.value, &r.minus.value, &r.jump_constant}) {
      for (Eigen::Index k = 0; k < v->size(); ++k) out << ',' << num((*v)[k]);
    }
    out << ',' << num(r.residual_avg) << ',' << num(r.residual_jump) << ',' << (r.converged ? 1 : 0)
        << '\n';
  }
  return out.str();
}

std::string diagnostics_csv(const DiagnosticTable& table) {
  std::ostringstream out;
  out << "point_id,delta,S_delta,S_tilde_delta,samples\n";
  for (const DiagnosticRow& r : table.rows) {
    out << r.point_id << ',' << num(r.delta) << ',' << num(r.sum) << ',' << num(r.difference) << ','
        << r.samples << '\n';
  }
  return out.str();
}

std::string plot_svg(const JumpReport& report) {
  std::vector<Series> series;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    Series s{"point " + std::to_string(i), {}};
    for (const TraceStep& t : report.records[i].trace) {
      s.points.emplace_back(t.scale, std::max(t.residual_avg, t.residual_jump));
    }
    series.push_back(std::move(s));
  }
  return svg_plot(series, "jump residuals: " + report.scene_name + " / " + report.kernel_name,
                  "approach distance t", "max(residual_avg, residual_jump)");
}

std::string plot_svg(const DiagnosticTable& table) {
  std::vector<Series> series;
  for (const DiagnosticRow& r : table.rows) {
    const std::string label = "point " + std::to_string(r.point_id);
    if (series.empty() || series.back().label != label) series.push_back({label, {}});
    series.back().points.emplace_back(r.delta, std::max(r.sum, r.difference));
  }
  return svg_plot(series, "symmetric diagnostics", "delta", "max(S_delta, S~_delta)");
}

void emit_plot(const JumpReport& report, const std::string& path) { write_text_file(path, plot_svg(report)); }

void emit_plot(const DiagnosticTable& table, const std::string& path) { write_text_file(path, plot_svg(table)); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open \"" + path + "\" for writing");
  out << text;
  if (!out) throw Error("failed writing \"" + path + "\"");
}

int thread_limit() {
  if (const char* env = std::getenv("JUMPLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 1024L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace jumplab
