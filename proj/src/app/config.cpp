#include "blowup/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace blowup {

namespace {

using io::Json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail(ErrorKind::config, "config field '" + path + "': " + what);
}

/// Typed access to one JSON object; remembers which keys were read so that
/// unknown keys can be reported.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const Json& raw(const std::string& key) {
    if (!has(key)) bad(at(key), "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number()) bad(at(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::size_t count(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) bad(at(key), "expected a non-negative integer");
    return v.get<std::size_t>();
  }
  std::size_t count(const std::string& key, std::size_t fallback) { return has(key) ? count(key) : fallback; }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) bad(at(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_string()) bad(at(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array()) bad(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (const Json& e : v) {
      if (!e.is_number()) bad(at(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Cplx complex(const std::string& key, Cplx fallback) {
    if (!has(key)) return fallback;
    const std::vector<double> v = numbers(key);
    if (v.size() != 2) bad(at(key), "expected [re, im]");
    return {v[0], v[1]};
  }

  Section sub(const std::string& key) { return {raw(key), at(key)}; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) bad(at(it.key()), "unknown field");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& path, const std::string& what) {
  if (!ok) bad(path, what);
}

CylinderSpec parse_cylinder(Section s) {
  CylinderSpec c;
  c.type = s.text("type", c.type);
  check(c.type == "kappa" || c.type == "perturbed_kappa" || c.type == "scaled_kappa0" || c.type == "connecting" ||
            c.type == "zero",
        s.at("type"), "expected kappa, perturbed_kappa, scaled_kappa0, connecting or zero");
  c.d = s.number("d", c.d);
  check(std::abs(c.d) < 1.0, s.at("d"), "must satisfy |d| < 1");
  c.theta = s.number("theta", c.theta);
  c.eps = s.number("eps", c.eps);
  c.scale = s.number("scale", c.scale);
  const std::string branch = s.text("branch", "plus");
  check(branch == "plus" || branch == "minus", s.at("branch"), "expected plus or minus");
  c.branch = branch == "plus" ? Branch::plus : Branch::minus;
  c.s0 = s.number("s0", c.s0);
  c.prepare = s.flag("prepare", c.prepare);
  c.label = s.text("label", c.label);
  s.finish();
  return c;
}

}  // namespace

RunConfig parse_config(const Json& doc) {
  RunConfig cfg;
  cfg.document = doc;
  Section root(doc, "");

  const double p = root.number("p");
  check(p > 1.0 && std::isfinite(p), "p", "must be > 1");
  cfg.p = PowerParam(p);

  if (root.has("grid")) {
    Section g = root.sub("grid");
    const double xmin = g.number("xmin");
    const double xmax = g.number("xmax");
    const std::size_t n = g.count("n");
    check(xmax > xmin, "grid.xmax", "must exceed grid.xmin");
    check(n >= 8, "grid.n", "must be >= 8");
    g.finish();
    cfg.grid = Grid1D(xmin, xmax, n);
  }

  if (root.has("initial")) {
    Section s = root.sub("initial");
    InitialSpec& in = cfg.initial;
    in.type = s.text("type", in.type);
    check(in.type == "zero" || in.type == "constant" || in.type == "gaussian" || in.type == "extended", s.at("type"),
          "expected zero, constant, gaussian or extended");
    in.u0 = s.complex("u0", in.u0);
    in.u1 = s.complex("u1", in.u1);
    in.gaussian.amplitude = s.number("amplitude", in.gaussian.amplitude);
    in.gaussian.center = s.number("center", in.gaussian.center);
    in.gaussian.width = s.number("width", in.gaussian.width);
    check(in.gaussian.width > 0.0, s.at("width"), "must be positive");
    in.gaussian.velocity_amplitude = s.number("velocity_amplitude", in.gaussian.velocity_amplitude);
    in.gaussian.phase = s.number("gaussian_phase", in.gaussian.phase);
    in.extended.d0 = s.number("d0", in.extended.d0);
    check(std::abs(in.extended.d0) < 1.0, s.at("d0"), "must satisfy |d0| < 1");
    in.extended.theta0 = s.number("theta0", in.extended.theta0);
    in.extended.T0 = s.number("T0", in.extended.T0);
    in.extended.x_star = s.number("x_star", in.extended.x_star);
    in.extended.p = cfg.p;
    if (s.has("taper")) {
      Section t = s.sub("taper");
      in.taper.lo = t.number("lo");
      in.taper.hi = t.number("hi");
      in.taper.width = t.number("width", in.taper.width);
      check(in.taper.hi > in.taper.lo, t.at("hi"), "must exceed taper.lo");
      check(in.taper.width > 0.0, t.at("width"), "must be positive");
      t.finish();
    }
    in.phase = s.number("rotate", in.phase);
    s.finish();
  }

  if (root.has("time")) {
    Section s = root.sub("time");
    EvolveOptions& e = cfg.evolve;
    e.cfl = s.number("cfl", e.cfl);
    check(e.cfl > 0.0 && e.cfl < 1.0, s.at("cfl"), "must lie in (0, 1)");
    check(e.cfl <= 0.9, s.at("cfl"), "the leapfrog solver needs cfl <= 0.9");
    e.amp_factor = s.number("amp_factor", e.amp_factor);
    check(e.amp_factor > 0.0, s.at("amp_factor"), "must be positive");
    e.threshold = s.number("threshold", e.threshold);
    check(e.threshold > 0.0, s.at("threshold"), "must be positive");
    e.max_steps = s.count("max_steps", e.max_steps);
    e.t_end = s.number("t_end", e.t_end);
    const std::string mode = s.text("mode", "global");
    check(mode == "global" || mode == "masked", s.at("mode"), "expected global or masked");
    e.mode = mode == "global" ? StopMode::global : StopMode::masked;
    e.snapshot_stride = s.count("snapshot_stride", e.snapshot_stride);
    if (s.has("probes")) e.probes = s.numbers("probes");
    s.finish();
  }

  if (root.has("estimate")) {
    Section s = root.sub("estimate");
    cfg.estimate.floor = s.number("floor", cfg.estimate.floor);
    cfg.estimate.cap = s.number("cap", cfg.estimate.cap);
    cfg.estimate.min_samples = s.count("min_samples", cfg.estimate.min_samples);
    check(cfg.estimate.cap > cfg.estimate.floor, s.at("cap"), "must exceed estimate.floor");
    s.finish();
  }

  if (root.has("scan")) {
    Section s = root.sub("scan");
    if (s.has("x")) {
      cfg.scan = s.numbers("x");
    } else {
      const double a = s.number("from");
      const double b = s.number("to");
      const std::size_t n = s.count("count");
      check(n >= 1, s.at("count"), "must be >= 1");
      for (std::size_t i = 0; i < n; ++i) cfg.scan.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    for (std::size_t i = 1; i < cfg.scan.size(); ++i) check(cfg.scan[i] > cfg.scan[i - 1], s.at("x"), "must be strictly increasing");
    cfg.capture_cap = s.number("capture_cap", cfg.capture_cap);
    check(cfg.capture_cap > 0.0, s.at("capture_cap"), "must be positive");
    cfg.min_cone_cells = s.number("min_cone_cells", cfg.min_cone_cells);
    s.finish();
  }

  if (root.has("selfsim")) {
    Section s = root.sub("selfsim");
    cfg.m = s.count("m", cfg.m);
    check(cfg.m >= 32, s.at("m"), "must be >= 32");
    cfg.ds = s.number("ds", cfg.ds);
    cfg.s_end = s.number("s_end", cfg.s_end);
    cfg.stride = s.count("stride", cfg.stride);
    check(cfg.stride >= 1, s.at("stride"), "must be >= 1");
    if (s.has("initial")) cfg.cylinder = parse_cylinder(s.sub("initial"));
    s.finish();
  }

  if (root.has("fit")) {
    Section s = root.sub("fit");
    cfg.fit.d_lo = s.number("d_lo", cfg.fit.d_lo);
    cfg.fit.d_hi = s.number("d_hi", cfg.fit.d_hi);
    check(cfg.fit.d_lo > -1.0 && cfg.fit.d_hi < 1.0 && cfg.fit.d_lo < cfg.fit.d_hi, s.at("d_lo"),
          "need -1 < d_lo < d_hi < 1");
    cfg.fit.tolerance = s.number("tolerance", cfg.fit.tolerance);
    check(cfg.fit.tolerance > 0.0, s.at("tolerance"), "must be positive");
    cfg.fit.prescan = s.count("prescan", cfg.fit.prescan);
    check(cfg.fit.prescan >= 3, s.at("prescan"), "must be >= 3");
    cfg.fit.converged_ratio = s.number("converged_ratio", cfg.fit.converged_ratio);
    s.finish();
  }

  if (root.has("liouville")) {
    Section s = root.sub("liouville");
    cfg.liouville_s_end = s.number("s_end", cfg.liouville_s_end);
    if (s.has("battery")) {
      const Json& arr = s.raw("battery");
      check(arr.is_array(), s.at("battery"), "expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        cfg.battery.push_back(parse_cylinder(Section(arr[i], s.at("battery") + "[" + std::to_string(i) + "]")));
      }
    }
    if (s.has("vanishing")) {
      Section v = s.sub("vanishing");
      cfg.vanishing_times = v.numbers("times");
      cfg.vanishing.x0 = v.number("x0", cfg.vanishing.x0);
      cfg.vanishing.horizon = v.number("horizon", cfg.vanishing.horizon);
      check(cfg.vanishing.horizon > 0.0, v.at("horizon"), "must be positive");
      cfg.vanishing.dispersion_time = v.number("dispersion_time", cfg.vanishing.dispersion_time);
      v.finish();
    }
    s.finish();
  }

  if (root.has("output")) {
    Section s = root.sub("output");
    cfg.output_directory = s.text("directory", cfg.output_directory);
    cfg.write_svg = s.flag("svg", cfg.write_svg);
    s.finish();
  }

  const std::string policy = root.text("policy", "parallel");
  check(policy == "parallel" || policy == "serial", "policy", "expected parallel or serial");
  cfg.policy = policy == "parallel" ? ExecPolicy::parallel : ExecPolicy::serial;
  cfg.evolve.policy = cfg.policy;
  root.finish();
  return cfg;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot read config file " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::config, "config file " + path + " is not valid JSON: " + e.what());
  }
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) fail(ErrorKind::config, "--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) fail(ErrorKind::config, "--set key '" + key + "' has an empty component");
    path.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    Json& next = (*node)[path[i]];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) fail(ErrorKind::config, "--set key '" + key + "' descends into a non-object");
    node = &next;
  }
  (*node)[path.back()] = value;
}

const Grid1D& require_grid(const RunConfig& cfg) {
  if (!cfg.grid) bad("grid", "missing required field");
  return *cfg.grid;
}

WaveState build_initial(const RunConfig& cfg) {
  const Grid1D& g = require_grid(cfg);
  const InitialSpec& in = cfg.initial;
  WaveState st = constant_data(g, {}, {});
  if (in.type == "constant") {
    st = constant_data(g, in.u0, in.u1);
  } else if (in.type == "gaussian") {
    st = gaussian_data(g, in.gaussian);
  } else if (in.type == "extended") {
    ExtendedSolution sol = in.extended;
    sol.p = cfg.p;
    st = profile_data(g, sol, in.taper);
  }
  if (in.phase == 0.0) return st;
  // multiples of pi/2 go through the exact product with i
  const double quarters = in.phase / (0.5 * std::numbers::pi);
  const double k = std::nearbyint(quarters);
  if (std::abs(quarters - k) <= 1e-15 * std::max(1.0, std::abs(k))) {
    const long turns = ((static_cast<long>(k) % 4) + 4) % 4;
    for (long i = 0; i < turns; ++i) st = st.times_i();
    return st;
  }
  return st.rotated(in.phase);
}

SelfSimState build_cylinder(const CylinderSpec& spec, std::size_t m, const PowerParam& p, ExecPolicy policy) {
  const CylinderGrid g(m, p);
  const auto y = g.y();
  SelfSimState st(spec.s0, g, ComplexField(m), ComplexField(m));
  if (spec.type == "kappa") {
    st.w = kappa_field(g, spec.d, spec.theta);
  } else if (spec.type == "perturbed_kappa") {
    const ComplexField k = kappa_field(g, spec.d, spec.theta);
    st.w = ComplexField::generate(m, [&](std::size_t j) { return (1.0 + spec.eps * (1.0 - y[j] * y[j])) * k[j]; });
  } else if (spec.type == "scaled_kappa0") {
    st.w = kappa_field(g, 0.0, spec.theta).scaled(spec.scale);
  } else if (spec.type == "connecting") {
    const Cplx e = Cplx::polar(1.0, spec.theta);
    st.w = ComplexField::generate(m, [&](std::size_t j) { return connecting_solution(spec.d, spec.branch, y[j], spec.s0, p) * e; });
    st.ws = ComplexField::generate(m, [&](std::size_t j) {
      return connecting_solution_ds(spec.d, spec.branch, y[j], spec.s0, p) * e;
    });
  }
  if (spec.prepare) {
    ShootingOptions opt;
    opt.policy = policy;
    const double s0 = st.s;
    st.s = 0.0;
    st = prepare_trapped(st, spec.d, spec.theta, opt).state;
    st.s = s0;
  }
  return st;
}

std::string describe(const CylinderSpec& spec) {
  if (!spec.label.empty()) return spec.label;
  std::ostringstream os;
  os << spec.type << "(d=" << spec.d << ", theta=" << spec.theta;
  if (spec.type == "perturbed_kappa") os << ", eps=" << spec.eps;
  if (spec.type == "scaled_kappa0") os << ", scale=" << spec.scale;
  if (spec.type == "connecting") os << ", " << (spec.branch == Branch::plus ? "plus" : "minus") << ", s0=" << spec.s0;
  os << ")" << (spec.prepare ? " prepared" : "");
  return os.str();
}

std::vector<CylinderSpec> default_battery() {
  std::vector<CylinderSpec> b;
  auto add = [&](CylinderSpec s) { b.push_back(std::move(s)); };
  add({.type = "perturbed_kappa", .d = 0.3, .eps = 0.05, .prepare = true, .label = "prepared perturbed kappa(0.3)"});
  add({.type = "perturbed_kappa", .d = -0.6, .theta = 2.0, .eps = -0.1, .prepare = true,
       .label = "prepared perturbed e^{2i} kappa(-0.6)"});
  add({.type = "zero", .label = "zero"});
  add({.type = "scaled_kappa0", .scale = 0.5, .label = "0.5 kappa0"});
  add({.type = "kappa", .d = 0.0, .theta = 1.0, .label = "e^{i} kappa0"});
  add({.type = "connecting", .d = 0.3, .branch = Branch::plus, .s0 = 0.0, .label = "w+ (d=0.3) from s=0"});
  add({.type = "connecting", .d = -0.5, .branch = Branch::minus, .s0 = -3.0, .label = "w- (d=-0.5) from s=-3"});
  add({.type = "scaled_kappa0", .scale = 5.0, .label = "5 kappa0"});
  add({.type = "perturbed_kappa", .d = 0.3, .eps = 0.05, .label = "untuned perturbed kappa(0.3)"});
  return b;
}

}  // namespace blowup
