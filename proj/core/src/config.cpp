#include "iqcrate/config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace iqcrate {

using nlohmann::json;

std::string_view to_string(DeltaKind kind) {
  switch (kind) {
    case DeltaKind::SlopeRestricted: return "slope_restricted";
    case DeltaKind::GainBounded: return "gain_bounded";
    case DeltaKind::TwoSidedFixedPi: return "two_sided_fixed_pi";
  }
  return "unknown";
}

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Walks the parsed document, tracking the dotted field path so errors can
// point at both the field and (by searching for its key) the line.
class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    std::ostringstream os;
    os << source_;
    const std::string leaf = path.substr(path.find_last_of('.') + 1);
    const std::size_t at = text_.find('"' + leaf + '"');
    if (at != std::string::npos) os << ':' << line_of_offset(text_, at);
    os << ": field '" << path << "': " << message;
    throw Error(ErrorCode::ConfigError, os.str());
  }

  void only(const json& obj, const std::string& path, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
      (void)value;
      if (!allowed.count(key)) fail(join(path, key), "unknown field");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  int integer(const json& v, const std::string& path, int lo) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > 100000000) fail(path, "out of range");
    return static_cast<int>(x);
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, path));
    return out;
  }

  Matrix matrix(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array of rows");
    if (v.empty()) return Matrix(0, 0);
    const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
    Matrix M(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_array() || v[i].size() != cols) fail(path, "rows must be arrays of equal length");
      for (std::size_t j = 0; j < cols; ++j)
        M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = number(v[i][j], path);
    }
    return M;
  }

  MatrixSystem system(const json& v, const std::string& path) const {
    only(v, path, {"A", "B", "C", "D"});
    for (const char* k : {"A", "B", "C"})
      if (!v.contains(k)) fail(join(path, k), "missing");
    MatrixSystem s;
    s.A = matrix(v["A"], join(path, "A"));
    s.B = matrix(v["B"], join(path, "B"));
    s.C = matrix(v["C"], join(path, "C"));
    s.D = v.contains("D") ? matrix(v["D"], join(path, "D")) : Matrix::Zero(s.C.rows(), s.B.cols());
    try {
      (void)StateSpace(s.A, s.B, s.C, s.D);
    } catch (const Error& e) {
      fail(path, e.what());
    }
    return s;
  }

 private:
  const std::string& text_;
  std::string source_;
};

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

json system_json(const MatrixSystem& s) {
  return {{"A", matrix_json(s.A)}, {"B", matrix_json(s.B)}, {"C", matrix_json(s.C)}, {"D", matrix_json(s.D)}};
}

MethodKind method_kind(const Reader& r, const std::string& name, const std::string& path) {
  if (name == "gradient_descent") return MethodKind::GradientDescent;
  if (name == "heavy_ball") return MethodKind::HeavyBall;
  if (name == "nesterov") return MethodKind::Nesterov;
  r.fail(path, "unknown method '" + name + "' (gradient_descent, heavy_ball, nesterov)");
}

void parse_delta(const Reader& r, const json& d, ProblemConfig& cfg) {
  const std::string p = "delta";
  r.only(d, p, {"kind", "m", "L", "gain", "g_max", "pi", "validity", "scan_step"});
  if (!d.contains("kind")) r.fail("delta.kind", "missing");
  const std::string kind = r.string(d["kind"], "delta.kind");
  DeltaSpec& s = cfg.delta;
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (d.contains(k)) r.fail(Reader::join(p, k), "not used by delta kind '" + kind + "'");
  };
  if (kind == "slope_restricted") {
    s.kind = DeltaKind::SlopeRestricted;
    forbid({"gain", "g_max", "pi", "validity", "scan_step"});
    if (!d.contains("m") || !d.contains("L")) r.fail("delta.m", "slope_restricted needs m and L");
    const double m = r.number(d["m"], "delta.m");
    const double L = r.number(d["L"], "delta.L");
    if (!(m >= 0.0 && L >= m && L > 0.0)) r.fail("delta.L", "need 0 <= m <= L and L > 0");
    s.sector = SectorBounds(m, L);
  } else if (kind == "gain_bounded") {
    s.kind = DeltaKind::GainBounded;
    forbid({"m", "L", "pi", "validity", "scan_step"});
    if (!d.contains("gain")) r.fail("delta.gain", "missing");
    const json& g = d["gain"];
    r.only(g, "delta.gain", {"type", "value", "a", "b", "c"});
    s.gain.type = g.contains("type") ? r.string(g["type"], "delta.gain.type") : "constant";
    if (s.gain.type == "constant") {
      if (!g.contains("value")) r.fail("delta.gain.value", "missing");
      s.gain.value = r.number(g["value"], "delta.gain.value");
    } else if (s.gain.type == "inverse_sqrt") {
      for (const char* k : {"a", "b", "c"})
        if (!g.contains(k)) r.fail(std::string("delta.gain.") + k, "missing");
      s.gain.a = r.number(g["a"], "delta.gain.a");
      s.gain.b = r.number(g["b"], "delta.gain.b");
      s.gain.c = r.number(g["c"], "delta.gain.c");
    } else {
      r.fail("delta.gain.type", "expected 'constant' or 'inverse_sqrt'");
    }
    if (!d.contains("g_max")) r.fail("delta.g_max", "missing");
    s.g_max = r.number(d["g_max"], "delta.g_max");
    if (!(s.g_max > 0.0)) r.fail("delta.g_max", "must be positive");
  } else if (kind == "two_sided_fixed_pi") {
    s.kind = DeltaKind::TwoSidedFixedPi;
    forbid({"m", "L", "gain", "g_max"});
    if (!d.contains("pi")) r.fail("delta.pi", "missing");
    s.pi = r.matrix(d["pi"], "delta.pi");
    if (s.pi.rows() != 2 || s.pi.cols() != 2 || !s.pi.isApprox(s.pi.transpose()))
      r.fail("delta.pi", "expected a symmetric 2 x 2 matrix");
    if (d.contains("validity")) {
      const json& v = d["validity"];
      r.only(v, "delta.validity", {"type", "system", "floor"});
      if (v.contains("type") && r.string(v["type"], "delta.validity.type") != "min_gain")
        r.fail("delta.validity.type", "only 'min_gain' is supported");
      if (v.contains("system")) s.validity_system = r.system(v["system"], "delta.validity.system");
      if (v.contains("floor")) s.validity_floor = r.number(v["floor"], "delta.validity.floor");
    }
    if (d.contains("scan_step")) {
      s.scan_step = r.number(d["scan_step"], "delta.scan_step");
      if (!(s.scan_step > 0.0 && s.scan_step < 1.0)) r.fail("delta.scan_step", "must lie in (0, 1)");
    }
  } else {
    r.fail("delta.kind", "expected slope_restricted, gain_bounded or two_sided_fixed_pi");
  }
}

void parse_simulation(const Reader& r, const json& s, ProblemConfig& cfg) {
  r.only(s, "simulation", {"horizon", "x0", "nonlinearity", "disturbance", "burn_in"});
  SimulationSpec& out = cfg.simulation;
  if (s.contains("horizon")) out.horizon = r.integer(s["horizon"], "simulation.horizon", 1);
  if (s.contains("burn_in")) out.burn_in = r.integer(s["burn_in"], "simulation.burn_in", 0);
  if (s.contains("x0")) out.x0 = r.numbers(s["x0"], "simulation.x0");
  if (s.contains("disturbance")) {
    const json& d = s["disturbance"];
    r.only(d, "simulation.disturbance", {"scale", "rate"});
    if (d.contains("scale")) out.disturbance_scale = r.number(d["scale"], "simulation.disturbance.scale");
    if (d.contains("rate")) out.disturbance_rate = r.number(d["rate"], "simulation.disturbance.rate");
  }
  if (!s.contains("nonlinearity")) return;
  const json& n = s["nonlinearity"];
  const std::string p = "simulation.nonlinearity";
  r.only(n, p, {"kind", "curvatures", "optimum", "level", "value", "breakpoints", "slopes"});
  NonlinearitySpec& nl = out.nonlinearity;
  if (!n.contains("kind")) r.fail(p + ".kind", "missing");
  nl.kind = r.string(n["kind"], p + ".kind");
  static const std::set<std::string> kinds = {"none", "quadratic", "saturation", "deadzone", "gain",
                                              "piecewise_linear", "random_piecewise_linear", "example8"};
  if (!kinds.count(nl.kind)) r.fail(p + ".kind", "unknown nonlinearity '" + nl.kind + "'");
  if (n.contains("curvatures")) nl.curvatures = r.numbers(n["curvatures"], p + ".curvatures");
  if (n.contains("optimum")) nl.optimum = r.numbers(n["optimum"], p + ".optimum");
  if (n.contains("level")) nl.level = r.number(n["level"], p + ".level");
  if (n.contains("value")) nl.value = r.number(n["value"], p + ".value");
  if (n.contains("breakpoints")) nl.breakpoints = r.numbers(n["breakpoints"], p + ".breakpoints");
  if (n.contains("slopes")) nl.slopes = r.numbers(n["slopes"], p + ".slopes");
  if (nl.kind == "quadratic" && nl.curvatures.empty()) r.fail(p + ".curvatures", "quadratic needs curvatures");
  if (nl.kind == "quadratic") {
    for (double h : nl.curvatures)
      if (!(h >= 0.0)) r.fail(p + ".curvatures", "curvatures must be nonnegative");
    if (!nl.optimum.empty() && nl.optimum.size() != nl.curvatures.size())
      r.fail(p + ".optimum", "must match the length of curvatures");
  }
  if (nl.kind == "piecewise_linear" && nl.slopes.size() != nl.breakpoints.size() + 1)
    r.fail(p + ".slopes", "needs one more slope than breakpoints");
}

}  // namespace

ProblemConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << source << ':' << line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1) << ": syntax error: " << e.what();
    throw Error(ErrorCode::ConfigError, os.str());
  }
  const Reader r(text, source);
  r.only(doc, "", {"schema_version", "name", "system", "method", "delta", "rho_range", "tolerance", "grid", "order",
                   "epsilon", "refine", "center_gains", "seed", "threads", "simulation", "outputs"});
  ProblemConfig cfg;
  if (doc.contains("schema_version")) {
    cfg.schema_version = r.integer(doc["schema_version"], "schema_version", 1);
    if (cfg.schema_version != kConfigSchemaVersion)
      r.fail("schema_version", "unsupported version " + std::to_string(cfg.schema_version));
  }
  if (doc.contains("name")) cfg.name = r.string(doc["name"], "name");
  if (doc.contains("system") == doc.contains("method")) r.fail("system", "give exactly one of 'system' or 'method'");
  if (doc.contains("system")) cfg.system = r.system(doc["system"], "system");
  if (doc.contains("method")) {
    const json& m = doc["method"];
    r.only(m, "method", {"kind", "alpha", "beta", "dimension"});
    if (!m.contains("kind")) r.fail("method.kind", "missing");
    if (!m.contains("alpha")) r.fail("method.alpha", "missing");
    MethodSpec spec;
    spec.kind = method_kind(r, r.string(m["kind"], "method.kind"), "method.kind");
    spec.alpha = r.number(m["alpha"], "method.alpha");
    if (m.contains("beta")) spec.beta = r.number(m["beta"], "method.beta");
    if (m.contains("dimension")) spec.dimension = r.integer(m["dimension"], "method.dimension", 1);
    try {
      spec.validate();
    } catch (const Error& e) {
      r.fail("method", e.what());
    }
    cfg.method = spec;
  }
  if (!doc.contains("delta")) r.fail("delta", "missing");
  parse_delta(r, doc["delta"], cfg);

  if (doc.contains("rho_range")) {
    const std::vector<double> range = r.numbers(doc["rho_range"], "rho_range");
    if (range.size() != 2 || !(range[0] > 0.0 && range[0] <= range[1] && range[1] < 1.0))
      r.fail("rho_range", "expected [rho_min, rho_max] with 0 < rho_min <= rho_max < 1");
    cfg.rho_min = range[0];
    cfg.rho_max = range[1];
  }
  if (doc.contains("tolerance")) {
    cfg.tolerance = r.number(doc["tolerance"], "tolerance");
    if (!(cfg.tolerance > 0.0 && cfg.tolerance < 0.5)) r.fail("tolerance", "must lie in (0, 0.5)");
  }
  if (!doc.contains("rho_range")) cfg.rho_max = 1.0 - cfg.tolerance;
  if (doc.contains("grid")) cfg.grid = r.integer(doc["grid"], "grid", 2);
  if (doc.contains("order")) cfg.order = r.integer(doc["order"], "order", 0);
  if (doc.contains("epsilon")) {
    cfg.epsilon = r.number(doc["epsilon"], "epsilon");
    if (!(cfg.epsilon >= 0.0)) r.fail("epsilon", "must be nonnegative");
  }
  if (doc.contains("refine")) cfg.refine = r.integer(doc["refine"], "refine", 1);
  if (doc.contains("center_gains")) cfg.center_gains = r.numbers(doc["center_gains"], "center_gains");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) r.fail("seed", "expected a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("threads")) cfg.threads = static_cast<unsigned>(r.integer(doc["threads"], "threads", 1));
  if (doc.contains("simulation")) parse_simulation(r, doc["simulation"], cfg);
  if (doc.contains("outputs")) {
    const json& o = doc["outputs"];
    r.only(o, "outputs", {"report", "fdi_csv", "trace_csv", "sdpa"});
    if (o.contains("report")) cfg.outputs.report = r.string(o["report"], "outputs.report");
    if (o.contains("fdi_csv")) cfg.outputs.fdi_csv = r.string(o["fdi_csv"], "outputs.fdi_csv");
    if (o.contains("trace_csv")) cfg.outputs.trace_csv = r.string(o["trace_csv"], "outputs.trace_csv");
    if (o.contains("sdpa")) cfg.outputs.sdpa = r.string(o["sdpa"], "outputs.sdpa");
  }
  if (cfg.delta.kind == DeltaKind::TwoSidedFixedPi && cfg.method)
    r.fail("delta.kind", "two_sided_fixed_pi needs an explicit SISO system");
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

json config_to_json(const ProblemConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["name"] = cfg.name;
  if (cfg.system) j["system"] = system_json(*cfg.system);
  if (cfg.method) {
    j["method"] = {{"kind", std::string(to_string(cfg.method->kind))},
                   {"alpha", cfg.method->alpha},
                   {"beta", cfg.method->beta},
                   {"dimension", cfg.method->dimension}};
  }
  const DeltaSpec& d = cfg.delta;
  json dj = {{"kind", std::string(to_string(d.kind))}};
  switch (d.kind) {
    case DeltaKind::SlopeRestricted:
      dj["m"] = d.sector.m;
      dj["L"] = d.sector.L;
      break;
    case DeltaKind::GainBounded:
      if (d.gain.type == "constant") dj["gain"] = {{"type", "constant"}, {"value", d.gain.value}};
      else dj["gain"] = {{"type", d.gain.type}, {"a", d.gain.a}, {"b", d.gain.b}, {"c", d.gain.c}};
      dj["g_max"] = d.g_max;
      break;
    case DeltaKind::TwoSidedFixedPi: {
      dj["pi"] = matrix_json(d.pi);
      json v = {{"type", "min_gain"}, {"floor", d.validity_floor}};
      if (d.validity_system) v["system"] = system_json(*d.validity_system);
      dj["validity"] = v;
      dj["scan_step"] = d.scan_step;
      break;
    }
  }
  j["delta"] = dj;
  j["rho_range"] = {cfg.rho_min, cfg.rho_max};
  j["tolerance"] = cfg.tolerance;
  j["grid"] = cfg.grid;
  j["order"] = cfg.order;
  j["epsilon"] = cfg.epsilon;
  j["refine"] = cfg.refine;
  j["center_gains"] = cfg.center_gains;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  const SimulationSpec& s = cfg.simulation;
  json nl = {{"kind", s.nonlinearity.kind}};
  const NonlinearitySpec& n = s.nonlinearity;
  if (n.kind == "quadratic") {
    nl["curvatures"] = n.curvatures;
    nl["optimum"] = n.optimum;
  } else if (n.kind == "saturation" || n.kind == "deadzone") {
    nl["level"] = n.level;
  } else if (n.kind == "gain") {
    nl["value"] = n.value;
  } else if (n.kind == "piecewise_linear") {
    nl["breakpoints"] = n.breakpoints;
    nl["slopes"] = n.slopes;
  }
  j["simulation"] = {{"horizon", s.horizon},
                     {"x0", s.x0},
                     {"burn_in", s.burn_in},
                     {"nonlinearity", nl},
                     {"disturbance", {{"scale", s.disturbance_scale}, {"rate", s.disturbance_rate}}}};
  j["outputs"] = {{"report", cfg.outputs.report},
                  {"fdi_csv", cfg.outputs.fdi_csv},
                  {"trace_csv", cfg.outputs.trace_csv},
                  {"sdpa", cfg.outputs.sdpa}};
  return j;
}

std::string config_hash(const ProblemConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("outputs");
  j.erase("threads");
  const std::string canon = j.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

StateSpace build_plant(const ProblemConfig& cfg) {
  if (cfg.method) return method_to_lurye(*cfg.method).G;
  if (!cfg.system) throw Error(ErrorCode::ConfigError, "config has neither system nor method");
  const MatrixSystem& s = *cfg.system;
  return StateSpace(s.A, s.B, s.C, s.D);
}

DeltaClass build_delta_class(const ProblemConfig& cfg) {
  const DeltaSpec& d = cfg.delta;
  switch (d.kind) {
    case DeltaKind::SlopeRestricted: return SlopeRestricted{d.sector};
    case DeltaKind::GainBounded: {
      GainBounded g;
      g.g_max = d.g_max;
      if (d.gain.type == "constant") {
        g.gain = [c = d.gain.value](double) { return c; };
        g.description = "constant gain " + std::to_string(d.gain.value);
      } else {
        g.gain = inverse_sqrt_gain(d.gain.a, d.gain.b, d.gain.c);
        g.description = "a / sqrt(b rho^2 - c)";
      }
      return g;
    }
    case DeltaKind::TwoSidedFixedPi: break;
  }
  throw Error(ErrorCode::InvalidClass, "two_sided_fixed_pi is handled by the two-sided scan, not bisection");
}

CertifyConfig build_certify_config(const ProblemConfig& cfg) {
  CertifyConfig c;
  c.rho_min = cfg.rho_min;
  c.rho_max = cfg.rho_max;
  c.tol = cfg.tolerance;
  c.synthesis.half_order = cfg.order;
  c.synthesis.grid_points = static_cast<std::size_t>(cfg.grid);
  c.synthesis.epsilon = cfg.epsilon;
  c.synthesis.refine_factor = cfg.refine;
  c.synthesis.threads = cfg.threads;
  c.center_gains = cfg.center_gains;
  return c;
}

NonlinearityDescriptor build_nonlinearity(const ProblemConfig& cfg) {
  const NonlinearitySpec& n = cfg.simulation.nonlinearity;
  if (n.kind == "quadratic") {
    const Eigen::Index p = build_plant(cfg).outputs();
    const auto count = static_cast<Eigen::Index>(n.curvatures.size());
    if (count != 1 && count != p)
      throw Error(ErrorCode::ConfigError, "field 'simulation.nonlinearity.curvatures': needs 1 or " +
                                              std::to_string(p) + " entries");
    Vector h(p), xs = Vector::Zero(p);
    for (Eigen::Index i = 0; i < p; ++i) h(i) = n.curvatures[static_cast<std::size_t>(count == 1 ? 0 : i)];
    for (Eigen::Index i = 0; i < p && !n.optimum.empty(); ++i)
      xs(i) = n.optimum[static_cast<std::size_t>(count == 1 ? 0 : i)];
    const FunctionOracle f = quadratic_oracle(h, xs);
    return NonlinearityDescriptor::from_callable(f.gradient, f.sector, "quadratic gradient");
  }
  if (n.kind == "saturation") return NonlinearityDescriptor::saturation(n.level);
  if (n.kind == "deadzone") return NonlinearityDescriptor::deadzone(n.level);
  if (n.kind == "gain") return NonlinearityDescriptor::linear_gain(n.value);
  if (n.kind == "piecewise_linear") return NonlinearityDescriptor::piecewise_linear({n.breakpoints, n.slopes});
  if (n.kind == "example8") return NonlinearityDescriptor::example8_dynamic();
  if (n.kind == "random_piecewise_linear") {
    if (cfg.delta.kind != DeltaKind::SlopeRestricted)
      throw Error(ErrorCode::ConfigError, "random_piecewise_linear draws from a slope_restricted delta");
    std::mt19937_64 rng(cfg.seed);
    return NonlinearityDescriptor::piecewise_linear(random_piecewise_linear(cfg.delta.sector, rng));
  }
  throw Error(ErrorCode::ConfigError, "field 'simulation.nonlinearity': simulate needs a nonlinearity");
}

}  // namespace iqcrate
