#include "covep/cli/config.hpp"

#include "covep/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace covep::cli {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxNodes = std::size_t{1} << 22;

// Reads the members of one JSON object and rejects the ones nobody asked
// for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  const json& raw(const std::string& key) {
    if (!has(key)) fail(at(key), "is required");
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) { return has(key) ? as_number(j_.at(key), at(key)) : fallback; }

  double positive(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x > 0.0)) fail(at(key), "must be positive");
    return x;
  }

  long long integer(const std::string& key, long long fallback, long long lo, long long hi) {
    if (!has(key)) return fallback;
    return as_integer(j_.at(key), at(key), lo, hi);
  }

  std::string string(const std::string& key, const std::string& fallback, std::initializer_list<const char*> allowed) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(at(key), "must be a string");
    const std::string s = v.get<std::string>();
    if (allowed.size() == 0) return s;
    for (const char* a : allowed)
      if (s == a) return s;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    fail(at(key), "must be one of: " + list);
  }

  std::vector<double> numbers(const std::string& key) { return as_numbers(raw(key), at(key)); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(path_ + "." + it.key(), "unknown key");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
    throw InputError("config " + path + ": " + msg);
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  static long long as_integer(const json& v, const std::string& path, long long lo, long long hi) {
    if (!v.is_number_integer()) fail(path, "must be an integer");
    long long x = 0;
    if (v.is_number_unsigned()) {
      const auto u = v.get<unsigned long long>();
      if (u > static_cast<unsigned long long>(std::numeric_limits<long long>::max())) fail(path, "out of range");
      x = static_cast<long long>(u);
    } else {
      x = v.get<long long>();
    }
    if (x < lo || x > hi) fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  static std::vector<double> as_numbers(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(as_number(v[k], path + "[" + std::to_string(k) + "]"));
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::uint64_t as_seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    Section::fail(path, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

void check_group_name(const std::string& name, const std::string& path) {
  try {
    (void)GroupModel::from_name(name);
  } catch (const std::exception& e) {
    Section::fail(path, e.what());
  }
}

GroupSection parse_group(const json& j) {
  Section s(j, "group");
  GroupSection g;
  const json& name = s.raw("name");
  if (!name.is_string()) Section::fail(s.at("name"), "must be a string");
  g.name = name.get<std::string>();
  check_group_name(g.name, s.at("name"));
  if (s.has("h")) {
    const int m = GroupModel::from_name(g.name).dim();
    const auto flat = s.numbers("h");
    if (flat.size() != static_cast<std::size_t>(m * m))
      Section::fail(s.at("h"), "must hold " + std::to_string(m * m) + " entries (row-major " + std::to_string(m) +
                                   "x" + std::to_string(m) + ")");
    AlgebraMatrix h(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) h(r, c) = flat[static_cast<std::size_t>(r * m + c)];
    g.h = h;
  }
  s.finish();
  return g;
}

MetricSpec parse_metric(const json& j, int dims, std::size_t nodes) {
  Section s(j, "grid.metric");
  MetricSpec m;
  m.family = s.string("family", "flat", {"flat", "diag_periodic", "table"});
  if (s.has("params")) {
    Section p(s.raw("params"), "grid.metric.params");
    if (m.family == "diag_periodic") {
      m.a = p.number("a", 1.0);
      m.b = p.number("b", 0.0);
    } else if (m.family == "table") {
      m.table = p.numbers("table");
      const std::size_t want = nodes * static_cast<std::size_t>(dims * dims);
      if (m.table.size() != want)
        Section::fail(p.at("table"), "must hold " + std::to_string(want) + " entries (one row-major matrix per node)");
    }
    p.finish();
  } else if (m.family == "table") {
    Section::fail(s.at("params"), "is required for the table family");
  }
  s.finish();
  return m;
}

GridConfig parse_grid(const json& j) {
  Section s(j, "grid");
  GridConfig g;
  g.dims = static_cast<int>(s.integer("dims", 0, 1, kMaxBaseDim));
  if (!s.has("dims")) Section::fail(s.at("dims"), "is required");
  const json& shape = s.raw("shape");
  if (!shape.is_array() || shape.size() != static_cast<std::size_t>(g.dims))
    Section::fail(s.at("shape"), "must be an array of " + std::to_string(g.dims) + " integers");
  std::size_t nodes = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    const auto n = Section::as_integer(shape[k], s.at("shape") + "[" + std::to_string(k) + "]", 3, 1 << 16);
    g.shape.push_back(static_cast<int>(n));
    nodes *= static_cast<std::size_t>(n);
    if (nodes > kMaxNodes) Section::fail(s.at("shape"), "more than " + std::to_string(kMaxNodes) + " nodes");
  }
  if (s.has("extent")) {
    g.extent = s.numbers("extent");
    if (g.extent.size() != static_cast<std::size_t>(g.dims))
      Section::fail(s.at("extent"), "must hold " + std::to_string(g.dims) + " numbers");
    for (double e : g.extent)
      if (!(e > 0.0)) Section::fail(s.at("extent"), "entries must be positive");
  } else {
    g.extent.assign(static_cast<std::size_t>(g.dims), 1.0);
  }
  const std::string b = s.string("boundary", "periodic", {"periodic", "dirichlet"});
  g.boundary = b == "periodic" ? Boundary::Periodic : Boundary::Dirichlet;
  if (s.has("metric")) g.metric = parse_metric(s.raw("metric"), g.dims, nodes);
  s.finish();
  return g;
}

FourierSpec parse_fourier(Section& s, const FourierSpec& fallback) {
  FourierSpec f = fallback;
  f.amplitude = s.number("amplitude", f.amplitude);
  f.modes = static_cast<int>(s.integer("modes", f.modes, 1, 8));
  return f;
}

ConnectionSection parse_connection(const json& j) {
  Section s(j, "connection");
  ConnectionSection c;
  c.family = s.string("family", "zero", {"zero", "fourier"});
  if (s.has("params")) {
    Section p(s.raw("params"), "connection.params");
    c.spec = parse_fourier(p, c.spec);
    p.finish();
  }
  if (s.has("seed")) c.seed = as_seed(s.raw("seed"), s.at("seed"));
  s.finish();
  return c;
}

DescentOptions parse_solver(const json& j) {
  Section s(j, "solver");
  DescentOptions o;
  o.max_iter = static_cast<int>(s.integer("max_iter", o.max_iter, 0, 100000000));
  o.grad_tol = s.number("grad_tol", o.grad_tol);
  if (o.grad_tol < 0.0) Section::fail(s.at("grad_tol"), "must be non-negative");
  o.initial_step = s.positive("initial_step", o.initial_step);
  o.backtracking = s.number("backtracking", o.backtracking);
  if (!(o.backtracking > 0.0 && o.backtracking < 1.0)) Section::fail(s.at("backtracking"), "must lie in (0, 1)");
  o.armijo = s.number("armijo", o.armijo);
  if (!(o.armijo > 0.0 && o.armijo < 1.0)) Section::fail(s.at("armijo"), "must lie in (0, 1)");
  const std::string rule = s.string("step_rule", "barzilai_borwein", {"barzilai_borwein", "doubling"});
  o.step_rule = rule == "doubling" ? StepRule::Doubling : StepRule::BarzilaiBorwein;
  s.finish();
  return o;
}

std::filesystem::path parse_path(Section& s, const std::string& key) {
  const json& v = s.raw(key);
  if (!v.is_string() || v.get<std::string>().empty()) Section::fail(s.at(key), "must be a non-empty string");
  return v.get<std::string>();
}

VerifySection parse_verify(const json& j) {
  Section s(j, "verify");
  VerifySection v;
  v.trials = static_cast<int>(s.integer("trials", v.trials, 1, 1000));
  v.field_amplitude = s.positive("field_amplitude", v.field_amplitude);
  v.test_amplitude = s.positive("test_amplitude", v.test_amplitude);
  v.compact_eta = s.string("eta_support", "compact", {"compact", "global"}) == "compact";
  v.support_radius = s.number("support_radius", v.support_radius);
  if (!(v.support_radius > 0.0 && v.support_radius < 0.5)) Section::fail(s.at("support_radius"), "must lie in (0, 0.5)");
  if (s.has("grid_ladder")) {
    const json& l = s.raw("grid_ladder");
    if (!l.is_array() || l.size() < 2) Section::fail(s.at("grid_ladder"), "must list at least two resolutions");
    v.grid_ladder.clear();
    for (std::size_t k = 0; k < l.size(); ++k) {
      const auto n = Section::as_integer(l[k], s.at("grid_ladder") + "[" + std::to_string(k) + "]", 4, 4096);
      if (!v.grid_ladder.empty() && n <= v.grid_ladder.back())
        Section::fail(s.at("grid_ladder"), "must be strictly increasing");
      v.grid_ladder.push_back(static_cast<int>(n));
    }
  }
  v.eps = s.number("eps", v.eps);
  if (!(v.eps >= 1e-7 && v.eps <= 1e-3)) Section::fail(s.at("eps"), "must lie in [1e-7, 1e-3]");
  if (s.has("tolerances")) {
    Section t(s.raw("tolerances"), "verify.tolerances");
    for (const auto& name : verify_check_names()) {
      if (name == "flatness_convergence") {
        if (t.has(name)) {
          const auto band = t.numbers(name);
          if (band.size() != 2 || !(band[0] <= band[1]))
            Section::fail(t.at(name), "must be an order band [low, high]");
          v.flatness_order = std::make_pair(band[0], band[1]);
        }
      } else if (t.has(name)) {
        const double x = Section::as_number(t.raw(name), t.at(name));
        if (x < 0.0) Section::fail(t.at(name), "must be non-negative");
        v.tolerances[name] = x;
      }
    }
    t.finish();
  }
  s.finish();
  return v;
}

RigidBodySection parse_rigid_body(const json& j) {
  Section s(j, "rigid_body");
  RigidBodySection r;
  if (s.has("mu0")) r.mu0 = s.numbers("mu0");
  r.dt = s.positive("dt", r.dt);
  r.t_end = s.positive("t_end", r.t_end);
  if (r.t_end / r.dt > 1e8) Section::fail(s.at("dt"), "more than 1e8 steps requested");
  r.output_every = static_cast<int>(s.integer("output_every", r.output_every, 1, 1000000000));
  r.drift_tol = s.number("drift_tol", r.drift_tol);
  if (r.drift_tol < 0.0) Section::fail(s.at("drift_tol"), "must be non-negative");
  s.finish();
  return r;
}

HarmonicSection parse_harmonic(const json& j) {
  Section s(j, "harmonic");
  HarmonicSection h;
  h.problem = s.string("problem", h.problem, {"dirichlet_quadratic", "su2_geodesic", "relax_random"});
  if (s.has("xi0")) h.xi0 = s.numbers("xi0");
  h.perturbation = s.number("perturbation", h.perturbation);
  h.field_amplitude = s.positive("field_amplitude", h.field_amplitude);
  s.finish();
  return h;
}

ReconstructSection parse_reconstruct(const json& j) {
  Section s(j, "reconstruct");
  ReconstructSection r;
  if (s.has("input")) r.input = parse_path(s, "input");
  if (s.has("base_node")) {
    const json& b = s.raw("base_node");
    if (!b.is_array()) Section::fail(s.at("base_node"), "must be an array of integers");
    for (std::size_t k = 0; k < b.size(); ++k)
      r.base_node.push_back(
          static_cast<int>(Section::as_integer(b[k], s.at("base_node") + "[" + std::to_string(k) + "]", 0, 1 << 16)));
  }
  if (s.has("base_value")) r.base_value = s.numbers("base_value");
  r.flatness_tol = s.number("flatness_tol", r.flatness_tol);
  if (r.flatness_tol < 0.0) Section::fail(s.at("flatness_tol"), "must be non-negative");
  s.finish();
  return r;
}

}  // namespace

const std::vector<std::string>& verify_check_names() {
  static const std::vector<std::string> names = {
      "connection_independence", "variational_identity", "flatness_convergence", "lemma_additivity",
      "lemma_leibniz",           "lemma_stokes",         "coadjoint_vanishing",  "variation_formula"};
  return names;
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  Section s(doc, "$");
  RunConfig cfg;
  cfg.base_dir = base_dir;
  if (s.has("seed")) cfg.seed = as_seed(s.raw("seed"), s.at("seed"));
  cfg.group = parse_group(s.raw("group"));
  if (s.has("grid")) cfg.grid = parse_grid(s.raw("grid"));
  if (s.has("lagrangian")) {
    Section l(s.raw("lagrangian"), "lagrangian");
    cfg.lagrangian.kind = l.string("kind", "harmonic", {"harmonic", "harmonic_fd"});
    l.finish();
  }
  if (s.has("connection")) cfg.connection = parse_connection(s.raw("connection"));
  if (s.has("solver")) cfg.solver = parse_solver(s.raw("solver"));
  if (s.has("reduce")) {
    Section r(s.raw("reduce"), "reduce");
    if (r.has("input")) cfg.reduce.input = parse_path(r, "input");
    r.finish();
  }
  if (s.has("verify")) cfg.verify = parse_verify(s.raw("verify"));
  if (s.has("rigid_body")) cfg.rigid_body = parse_rigid_body(s.raw("rigid_body"));
  if (s.has("harmonic")) cfg.harmonic = parse_harmonic(s.raw("harmonic"));
  if (s.has("reconstruct")) cfg.reconstruct = parse_reconstruct(s.raw("reconstruct"));
  s.finish();

  // Cross-field checks that need more than one section.
  try {
    (void)make_group(cfg);
  } catch (const ConstructionError& e) {
    Section::fail("group.h", e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

GroupModel make_group(const RunConfig& cfg) {
  GroupModel g = GroupModel::from_name(cfg.group.name);
  if (cfg.group.h) g = g.with_metric(*cfg.group.h);
  return g;
}

ReducedLagrangian make_lagrangian(const RunConfig& cfg) {
  if (cfg.lagrangian.kind == "harmonic") return ReducedLagrangian::harmonic();
  const auto harmonic = ReducedLagrangian::harmonic();
  return ReducedLagrangian::custom("harmonic_fd", [harmonic](const TrivialBundle& b, NodeIndex v, const OneFormValue& p) {
    return harmonic.density(b, v, p);
  });
}

}  // namespace covep::cli
