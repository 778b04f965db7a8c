#include "commands.hpp"

#include "covep/errors.hpp"
#include "covep/field_io.hpp"
#include "covep/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace covep::cli {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kSchemaVersion = "1";
constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Shared plumbing

ojson group_json(const GroupModel& g) {
  ojson j;
  j["name"] = g.name();
  j["dim"] = g.dim();
  ojson h = ojson::array();
  for (int r = 0; r < g.dim(); ++r)
    for (int c = 0; c < g.dim(); ++c) h.push_back(g.metric()(r, c));
  j["metric"] = h;
  j["ad_invariant"] = g.is_ad_invariant();
  switch (g.kind()) {
    case GroupKind::AbelianR:
      j["basis"] = "standard basis of R^k; payload is the translation vector";
      break;
    case GroupKind::SO3:
      j["basis"] = "E_a = hat(e_a), [E_a, E_b] = eps_abc E_c; payload is the row-major rotation matrix";
      break;
    case GroupKind::SU2:
      j["basis"] = "E_a = quaternion unit / 2, [E_a, E_b] = eps_abc E_c; payload is (w, x, y, z)";
      break;
  }
  return j;
}

ojson grid_json(const GridConfig& c) {
  ojson j;
  j["dims"] = c.dims;
  j["shape"] = c.shape;
  j["extent"] = c.extent;
  j["boundary"] = c.boundary == Boundary::Periodic ? "periodic" : "dirichlet";
  ojson m;
  m["family"] = c.metric.family;
  if (c.metric.family == "diag_periodic") {
    m["a"] = c.metric.a;
    m["b"] = c.metric.b;
  } else if (c.metric.family == "table") {
    m["entries"] = c.metric.table.size();
  }
  j["metric"] = m;
  return j;
}

ojson envelope(const char* command, const RunConfig& cfg, const GroupModel& g) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["group"] = group_json(g);
  j["grid"] = cfg.grid ? grid_json(*cfg.grid) : ojson(nullptr);
  j["status"] = "ok";
  j["results"] = ojson::object();
  j["outputs"] = ojson::array();
  return j;
}

void add_output(ojson& summary, const std::string& file, const std::string& kind) {
  summary["outputs"].push_back(ojson{{"file", file}, {"kind", kind}});
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ostringstream buf;
  writer(buf);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << buf.str();
  if (!out) throw InputError("failed writing " + path.string());
}

void write_summary(const std::filesystem::path& out_dir, const ojson& summary, std::ostream& log) {
  write_file(out_dir / "summary.json", [&](std::ostream& os) { os << summary.dump(2) << "\n"; });
  log << "wrote " << (out_dir / "summary.json").string() << "\n";
}

const GridConfig& require_grid(const RunConfig& cfg, const char* command) {
  if (!cfg.grid) throw InputError(std::string("config grid: is required for ") + command);
  return *cfg.grid;
}

BundlePtr make_bundle_for(const RunConfig& cfg, const char* command) {
  return make_bundle(build_grid(require_grid(cfg, command)), make_group(cfg));
}

std::filesystem::path resolve(const RunConfig& cfg, const std::filesystem::path& p) {
  return p.is_absolute() || cfg.base_dir.empty() ? p : cfg.base_dir / p;
}

double max_spacing(const MetricGrid& grid) {
  double h = 0.0;
  for (int a = 0; a < grid.dims(); ++a) h = std::max(h, grid.spacing(a));
  return h;
}

double interior_max(const MetricGrid& grid, const NodeField& f) {
  double m = 0.0;
  for (NodeIndex v = 0; v < f.nodes(); ++v) {
    if (grid.on_boundary(v)) continue;
    for (double x : f.at(v)) m = std::max(m, std::abs(x));
  }
  return m;
}

// Sub-streams derived from the run seed, one per consumer.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// s(x) = exp(sin(2 pi x0/L0) E_0) exp(cos(2 pi x1/L1) E_1)
GroupField product_section(const BundlePtr& b) {
  const auto& g = b->group();
  const auto& grid = b->base();
  const int m = g.dim();
  GroupField s(b);
  for (NodeIndex v = 0; v < s.node_count(); ++v) {
    const double x = grid.coordinate(v, 0) / grid.extent(0);
    const double y = grid.dims() > 1 ? grid.coordinate(v, 1) / grid.extent(1) : 0.0;
    s[v] = g.multiply(g.exp(std::sin(2 * kPi * x) * AlgebraVector::unit(m, 0)),
                      g.exp(std::cos(2 * kPi * y) * AlgebraVector::unit(m, std::min(1, m - 1))));
  }
  return s;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  std::string status = "pass";
  ojson measured = nullptr;
  ojson tolerance = nullptr;
  std::string reason;
  ojson details = ojson::object();

  ojson json() const {
    ojson j;
    j["name"] = name;
    j["status"] = status;
    j["measured"] = measured;
    j["tolerance"] = tolerance;
    if (!reason.empty()) j["reason"] = reason;
    j["details"] = details;
    return j;
  }
};

Check bounded(const std::string& name, double measured, double tol) {
  Check c;
  c.name = name;
  c.measured = measured;
  c.tolerance = tol;
  c.status = std::isfinite(measured) && measured <= tol ? "pass" : "fail";
  return c;
}

Check skipped(const std::string& name, std::string reason) {
  Check c;
  c.name = name;
  c.status = "skipped";
  c.reason = std::move(reason);
  return c;
}

class VerifySuite {
 public:
  explicit VerifySuite(const RunConfig& cfg)
      : cfg_(cfg),
        v_(cfg.verify),
        bundle_(make_bundle_for(cfg, "verify")),
        l_(make_lagrangian(cfg)),
        h_(max_spacing(bundle_->base())),
        test_{3, cfg.verify.test_amplitude},
        field_{3, cfg.verify.field_amplitude} {}

  std::vector<Check> run() {
    return {connection_independence(), variational_identity(), flatness_convergence(), lemma_additivity(),
            lemma_leibniz(),           lemma_stokes(),         coadjoint_vanishing(),  variation_formula()};
  }

 private:
  double tol(const std::string& name, double fallback) const {
    const auto it = v_.tolerances.find(name);
    return it == v_.tolerances.end() ? fallback : it->second;
  }

  SeededRng rng(std::uint64_t stream) const { return SeededRng(derive_seed(cfg_.seed, stream)); }

  const MetricGrid& grid() const { return bundle_->base(); }
  bool dirichlet() const { return grid().boundary() == Boundary::Dirichlet; }

  ConnectionForm fourier_connection() const {
    SeededRng r(cfg_.connection.seed ? *cfg_.connection.seed : derive_seed(cfg_.seed, 99));
    return random_connection(bundle_, r, cfg_.connection.spec);
  }

  Check connection_independence() const {
    SeededRng r = rng(1);
    const GroupField s = random_group_field(bundle_, r, field_);
    const AlgebraField eta = random_algebra_field(bundle_, r, test_);
    const ConnectionForm a = fourier_connection();
    const ConnectionForm zero = zero_connection(bundle_);
    const AlgebraOneForm sigma = reduce_jet(s);
    const double dr = (ep_residual(l_, sigma, zero) - ep_residual(l_, sigma, a)).max_abs();
    const double dv = (variation_delta_sigma(sigma, eta, zero) - variation_delta_sigma(sigma, eta, a)).max_abs();
    Check c = bounded("connection_independence", std::max(dr, dv), tol("connection_independence", 1e-12));
    c.details = {{"ep_residual", dr}, {"variation_delta_sigma", dv}, {"connection_max_abs", a.max_abs()}};
    return c;
  }

  Check variational_identity() const {
    if (dirichlet() && !v_.compact_eta)
      return skipped("variational_identity",
                     "variations must vanish on the Dirichlet boundary; eta_support is global");
    SeededRng r = rng(2);
    const GroupField s = random_group_field(bundle_, r, field_);
    EquivalenceOptions opts;
    opts.eps = v_.eps;
    opts.compact_support = v_.compact_eta;
    opts.support_radius = v_.support_radius;
    const auto report = verify_equivalence(l_, s, v_.trials, derive_seed(cfg_.seed, 3), opts);
    Check c = bounded("variational_identity", report.max_rel_error,
                      tol("variational_identity", std::max(1e-3, 20 * h_ * h_)));
    ojson trials = ojson::array();
    for (const auto& t : report.trials)
      trials.push_back({{"oracle", t.oracle}, {"pairing", t.pairing}, {"rel_error", t.rel_error}});
    c.details = {{"trials", trials}, {"eta_support", v_.compact_eta ? "compact" : "global"}};
    return c;
  }

  Check flatness_convergence() const {
    const auto& base = require_grid(cfg_, "verify");
    if (base.dims < 2) return skipped("flatness_convergence", "curvature needs a base of dimension at least 2");
    if (base.metric.family == "table")
      return skipped("flatness_convergence", "a tabulated metric cannot be resampled on the grid ladder");
    std::vector<double> err;
    ojson ladder = ojson::array();
    for (int n : v_.grid_ladder) {
      GridConfig c = base;
      c.shape.assign(static_cast<std::size_t>(c.dims), n);
      const auto b = make_bundle(build_grid(c), bundle_->group());
      err.push_back(curvature(reduce_jet(product_section(b))).max_abs(dirichlet()));
      ladder.push_back({{"n", n}, {"max_curvature", err.back()}});
    }
    Check c;
    c.name = "flatness_convergence";
    if (bundle_->group().kind() == GroupKind::AbelianR) {
      // Central differences commute, so the discrete curvature vanishes.
      const double worst = *std::max_element(err.begin(), err.end());
      c = bounded("flatness_convergence", worst, tol("flatness_convergence", 1e-10));
      c.details = {{"ladder", ladder}, {"mode", "exact"}};
      return c;
    }
    const auto band = v_.flatness_order.value_or(std::make_pair(1.7, 2.3));
    ojson orders = ojson::array();
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = 1; k < err.size(); ++k) {
      const double ratio = static_cast<double>(v_.grid_ladder[k]) / v_.grid_ladder[k - 1];
      const double o = std::log(err[k - 1] / err[k]) / std::log(ratio);
      orders.push_back(o);
      lo = std::min(lo, o);
      hi = std::max(hi, o);
    }
    c.measured = orders;
    c.tolerance = ojson::array({band.first, band.second});
    c.status = std::isfinite(lo) && std::isfinite(hi) && lo >= band.first && hi <= band.second ? "pass" : "fail";
    c.details = {{"ladder", ladder}, {"mode", "order"}};
    return c;
  }

  struct LemmaFields {
    ConnectionForm a;
    CoalgebraVectorField mu, mu2;
    AlgebraField eta;
    ScalarField f;
  };

  LemmaFields lemma_fields() const {
    SeededRng r = rng(4);
    ConnectionForm a = random_connection(bundle_, r, test_);
    CoalgebraVectorField mu = random_coalgebra_vector_field(bundle_, r, test_);
    CoalgebraVectorField mu2 = random_coalgebra_vector_field(bundle_, r, test_);
    AlgebraField eta = random_algebra_field(bundle_, r, test_);
    ScalarField f = random_fourier_field(grid(), 1, r, test_);
    return {std::move(a), std::move(mu), std::move(mu2), std::move(eta), std::move(f)};
  }

  Check lemma_additivity() const {
    const auto lf = lemma_fields();
    const double e = (covariant_divergence(lf.mu + lf.mu2, lf.a) - covariant_divergence(lf.mu, lf.a) -
                      covariant_divergence(lf.mu2, lf.a))
                         .max_abs();
    return bounded("lemma_additivity", e, tol("lemma_additivity", 1e-12));
  }

  Check lemma_leibniz() const {
    const auto lf = lemma_fields();
    const int m = bundle_->algebra_dim();
    CoalgebraVectorField fmu = lf.mu;
    for (NodeIndex v = 0; v < fmu.node_count(); ++v)
      for (double& x : fmu.values().at(v)) x *= lf.f(v, 0);
    CoalgebraField rhs = covariant_divergence(lf.mu, lf.a);
    for (NodeIndex v = 0; v < rhs.node_count(); ++v)
      for (int b = 0; b < m; ++b) rhs(v, b) *= lf.f(v, 0);
    for (int i = 0; i < bundle_->base_dim(); ++i) {
      const ScalarField df = partial_derivative(grid(), lf.f, i);
      for (NodeIndex v = 0; v < rhs.node_count(); ++v)
        for (int b = 0; b < m; ++b) rhs(v, b) += lf.mu(v, i, b) * df(v, 0);
    }
    const double e = (covariant_divergence(fmu, lf.a) - rhs).max_abs();
    return bounded("lemma_leibniz", e, tol("lemma_leibniz", 10 * h_ * h_));
  }

  Check lemma_stokes() const {
    if (dirichlet()) return skipped("lemma_stokes", "the boundary term only vanishes on periodic grids");
    const auto lf = lemma_fields();
    const CoalgebraField div = covariant_divergence(lf.mu, lf.a);
    const AlgebraOneForm grad = covariant_derivative_ad(lf.eta, lf.a);
    ScalarField integrand(bundle_->node_count(), 1);
    for (NodeIndex v = 0; v < integrand.nodes(); ++v) {
      double x = pairing(div.at(v), lf.eta.at(v));
      for (int i = 0; i < bundle_->base_dim(); ++i) x += pairing(lf.mu.component(v, i), grad.component(v, i));
      integrand(v, 0) = x;
    }
    return bounded("lemma_stokes", std::abs(integrate(grid(), integrand)), tol("lemma_stokes", 10 * h_ * h_));
  }

  Check coadjoint_vanishing() const {
    if (!bundle_->group().is_ad_invariant())
      return skipped("coadjoint_vanishing", "the algebra metric is not ad-invariant");
    if (!l_.has_analytic_derivative())
      return skipped("coadjoint_vanishing", "the fiber derivative is approximated by differences");
    SeededRng r = rng(5);
    const GroupField s = random_group_field(bundle_, r, field_);
    const AlgebraOneForm sigma = reduce_jet(s);
    const double e = coadjoint_term(sigma, fiber_derivative(l_, sigma), zero_connection(bundle_)).max_abs();
    return bounded("coadjoint_vanishing", e, tol("coadjoint_vanishing", 1e-12));
  }

  Check variation_formula() const {
    SeededRng r = rng(6);
    const GroupField s = random_group_field(bundle_, r, test_);
    const AlgebraField eta = random_algebra_field(bundle_, r, test_);
    const double eps = v_.eps;
    const AlgebraOneForm fd =
        (1.0 / (2 * eps)) * (reduce_jet(flow_section(s, eta, eps)) - reduce_jet(flow_section(s, eta, -eps)));
    const AlgebraOneForm exact = variation_delta_sigma(reduce_jet(s), eta, zero_connection(bundle_));
    const NodeField diff = fd.values() - exact.values();
    const double e = dirichlet() ? interior_max(grid(), diff) : diff.max_abs();
    Check c = bounded("variation_formula", e, tol("variation_formula", 1e-4 + 10 * h_ * h_));
    c.details = {{"nodes", dirichlet() ? "interior" : "all"}};
    return c;
  }

  const RunConfig& cfg_;
  const VerifySection& v_;
  BundlePtr bundle_;
  ReducedLagrangian l_;
  double h_;
  FourierSpec test_;
  FourierSpec field_;
};

}  // namespace

int cmd_reduce(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto bundle = make_bundle_for(cfg, "reduce");
  if (!cfg.reduce.input) throw InputError("config reduce.input: is required for reduce");
  const auto path = resolve(cfg, *cfg.reduce.input);
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input section " + path.string());
  GroupField s = [&] {
    try {
      return read_group_field_csv(in, bundle);
    } catch (const InputError& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }();

  const AlgebraOneForm sigma = reduce_jet(s);
  const CurvatureField f = curvature(sigma);
  write_file(out_dir / "sigma.csv", [&](std::ostream& os) { write_one_form_csv(os, sigma); });
  write_file(out_dir / "curvature.csv", [&](std::ostream& os) { write_curvature_csv(os, f); });

  ojson summary = envelope("reduce", cfg, bundle->group());
  summary["results"] = {{"nodes", bundle->node_count()},
                        {"max_abs_sigma", sigma.max_abs()},
                        {"max_curvature", f.max_abs()},
                        {"max_curvature_interior", f.max_abs(true)},
                        {"energy", reduced_energy(make_lagrangian(cfg), sigma)}};
  add_output(summary, "sigma.csv", "one_form");
  add_output(summary, "curvature.csv", "curvature");
  write_summary(out_dir, summary, log);
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  VerifySuite suite(cfg);
  const auto checks = suite.run();
  ojson summary = envelope("verify", cfg, make_group(cfg));
  ojson list = ojson::array();
  int passed = 0, failed = 0, skipped_count = 0;
  for (const auto& c : checks) {
    list.push_back(c.json());
    if (c.status == "pass") ++passed;
    if (c.status == "fail") ++failed;
    if (c.status == "skipped") ++skipped_count;
    log << c.status << " " << c.name;
    if (!c.measured.is_null()) log << " measured=" << c.measured.dump() << " tolerance=" << c.tolerance.dump();
    if (!c.reason.empty()) log << " (" << c.reason << ")";
    log << "\n";
  }
  summary["status"] = failed == 0 ? "ok" : "failed";
  summary["results"] = {{"lagrangian", cfg.lagrangian.kind},
                        {"passed", passed},
                        {"failed", failed},
                        {"skipped", skipped_count},
                        {"checks", list}};
  write_summary(out_dir, summary, log);
  return failed == 0 ? 0 : 1;
}

int cmd_rigid_body(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const GroupModel body = make_group(cfg);
  const auto& rb = cfg.rigid_body;
  const int m = body.dim();
  if (static_cast<int>(rb.mu0.size()) != m)
    throw InputError("config rigid_body.mu0: must hold " + std::to_string(m) + " entries");
  RigidBodyState st{0.0, CoalgebraVector(m)};
  for (int k = 0; k < m; ++k) st.mu[k] = rb.mu0[static_cast<std::size_t>(k)];
  const long long steps = static_cast<long long>(std::ceil(rb.t_end / rb.dt - 1e-9));

  const double e0 = rigid_body_energy(body, st.mu);
  const double n0 = st.mu.coords().norm();
  double e_drift = 0.0, n_drift = 0.0;
  std::ostringstream csv;
  csv << "t";
  for (int k = 0; k < m; ++k) csv << ",mu" << k;
  csv << ",energy,norm,energy_drift,norm_drift\n";
  auto row = [&](const RigidBodyState& s) {
    const double e = rigid_body_energy(body, s.mu);
    const double n = s.mu.coords().norm();
    csv << format_double(s.t);
    for (int k = 0; k < m; ++k) csv << "," << format_double(s.mu[k]);
    csv << "," << format_double(e) << "," << format_double(n) << "," << format_double(e - e0) << ","
        << format_double(n - n0) << "\n";
  };
  row(st);
  for (long long k = 1; k <= steps; ++k) {
    st = classical_ep_step(body, st, rb.dt);
    st.t = static_cast<double>(k) * rb.dt;
    if (!st.mu.all_finite()) throw NumericalError("rigid-body: non-finite state at step " + std::to_string(k));
    e_drift = std::max(e_drift, std::abs(rigid_body_energy(body, st.mu) - e0));
    n_drift = std::max(n_drift, std::abs(st.mu.coords().norm() - n0));
    if (k % rb.output_every == 0 || k == steps) row(st);
  }
  write_file(out_dir / "trajectory.csv", [&](std::ostream& os) { os << csv.str(); });

  const bool ok = e_drift <= rb.drift_tol && n_drift <= rb.drift_tol;
  ojson summary = envelope("rigid-body", cfg, body);
  summary["status"] = ok ? "ok" : "failed";
  ojson mu_final = ojson::array();
  for (int k = 0; k < m; ++k) mu_final.push_back(st.mu[k]);
  summary["results"] = {{"steps", steps},
                        {"dt", rb.dt},
                        {"t_final", st.t},
                        {"mu_final", mu_final},
                        {"energy_initial", e0},
                        {"max_energy_drift", e_drift},
                        {"max_norm_drift", n_drift},
                        {"drift_tol", rb.drift_tol},
                        {"within_tolerance", ok}};
  add_output(summary, "trajectory.csv", "trajectory");
  write_summary(out_dir, summary, log);
  log << "max energy drift " << e_drift << ", max norm drift " << n_drift << "\n";
  return ok ? 0 : 1;
}

int cmd_harmonic(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto bundle = make_bundle_for(cfg, "harmonic");
  const auto& g = bundle->group();
  const auto& grid = bundle->base();
  const auto& hc = cfg.harmonic;
  const auto l = make_lagrangian(cfg);
  const double h = max_spacing(grid);

  GroupField s0(bundle, g.identity());
  std::function<void(const DescentState&, ojson&)> report = [](const DescentState&, ojson&) {};
  DescentObserver observer;
  double coad_max = 0.0;
  const ConnectionForm zero = zero_connection(bundle);

  if (hc.problem == "dirichlet_quadratic") {
    if (g.kind() != GroupKind::AbelianR || g.dim() != 1)
      throw InputError("config harmonic.problem: dirichlet_quadratic needs group abelian_r:1");
    if (grid.dims() != 2 || grid.boundary() != Boundary::Dirichlet)
      throw InputError("config harmonic.problem: dirichlet_quadratic needs a 2-D dirichlet grid");
    auto exact = [&grid](NodeIndex v) {
      const double x = grid.coordinate(v, 0), y = grid.coordinate(v, 1);
      return x * x - y * y;
    };
    for (NodeIndex v = 0; v < s0.node_count(); ++v)
      s0[v] = g.exp(AlgebraVector{grid.on_boundary(v) ? exact(v) : 0.0});
    report = [&, exact](const DescentState& st, ojson& r) {
      double err = 0.0;
      for (NodeIndex v = 0; v < st.field.node_count(); ++v)
        if (!grid.on_boundary(v)) err = std::max(err, std::abs(g.log(st.field[v])[0] - exact(v)));
      r["interior_max_error"] = err;
      r["error_tolerance"] = 5 * h * h;
      r["within_tolerance"] = err <= 5 * h * h;
    };
  } else if (hc.problem == "su2_geodesic") {
    if (g.kind() == GroupKind::AbelianR || g.dim() != 3)
      throw InputError("config harmonic.problem: su2_geodesic needs group su2 or so3");
    if (grid.dims() != 1 || grid.boundary() != Boundary::Dirichlet)
      throw InputError("config harmonic.problem: su2_geodesic needs a 1-D dirichlet grid");
    AlgebraVector xi0{kPi / 2, 0.0, 0.0};
    if (!hc.xi0.empty()) {
      if (hc.xi0.size() != 3) throw InputError("config harmonic.xi0: must hold 3 entries");
      xi0 = AlgebraVector{hc.xi0[0], hc.xi0[1], hc.xi0[2]};
    }
    const double len = grid.extent(0);
    const NodeIndex last = s0.node_count() - 1;
    for (NodeIndex v = 0; v < s0.node_count(); ++v) {
      const double t = grid.coordinate(v, 0) / len;
      s0[v] = g.exp(t * xi0 + (hc.perturbation * std::sin(kPi * t)) * AlgebraVector{0.0, 1.0, -0.5});
    }
    s0[0] = g.identity();
    s0[last] = g.exp(xi0);
    observer = [&](const DescentIterate& it) {
      coad_max = std::max(coad_max, coadjoint_term(it.sigma, fiber_derivative(l, it.sigma), zero).max_abs());
    };
    report = [&, xi0, len](const DescentState& st, ojson& r) {
      const AlgebraOneForm p = reduce_jet(st.field);
      const AlgebraVector rate = (1.0 / len) * xi0;
      double p_dev = 0.0, path = 0.0;
      for (NodeIndex v = 0; v < st.field.node_count(); ++v) {
        p_dev = std::max(p_dev, (p.component(v, 0) - rate).max_abs());
        path = std::max(path, payload_distance(st.field[v], g.exp((grid.coordinate(v, 0) / len) * xi0)));
      }
      r["p_deviation"] = p_dev;
      r["path_error"] = path;
      r["endpoint_error"] = std::max(payload_distance(st.field[0], g.identity()),
                                     payload_distance(st.field[st.field.node_count() - 1], g.exp(xi0)));
      r["max_coadjoint_term"] = coad_max;
      r["within_tolerance"] = p_dev <= 1e-4 && path <= 1e-4 && coad_max <= 1e-12;
    };
  } else {
    SeededRng r(derive_seed(cfg.seed, 7));
    s0 = random_group_field(bundle, r, FourierSpec{3, hc.field_amplitude});
    report = [](const DescentState& st, ojson& res) {
      res["max_curvature"] = curvature(reduce_jet(st.field)).max_abs(true);
    };
  }

  std::vector<DescentTraceRow> trace;
  const double e_initial = reduced_energy(l, reduce_jet(s0));
  const DescentState st = harmonic_descent(l, s0, cfg.solver, &trace, observer);

  write_file(out_dir / "solution.csv", [&](std::ostream& os) { write_group_field_csv(os, st.field); });
  write_file(out_dir / "sigma.csv", [&](std::ostream& os) { write_one_form_csv(os, reduce_jet(st.field)); });
  write_file(out_dir / "trace.csv", [&](std::ostream& os) {
    os << "iteration,energy,residual_norm,step\n";
    for (const auto& t : trace)
      os << t.iteration << "," << format_double(t.energy) << "," << format_double(t.residual_norm) << ","
         << format_double(t.step) << "\n";
  });

  ojson summary = envelope("harmonic", cfg, g);
  summary["status"] = st.converged() ? "ok" : "not_converged";
  ojson results;
  results["problem"] = hc.problem;
  results["descent_status"] = to_string(st.status);
  results["converged"] = st.converged();
  results["iterations"] = st.iteration;
  results["energy_initial"] = e_initial;
  results["energy"] = st.energy;
  results["residual_norm"] = st.residual_norm;
  results["grad_tol"] = cfg.solver.grad_tol;
  report(st, results);
  summary["results"] = results;
  add_output(summary, "solution.csv", "group_field");
  add_output(summary, "sigma.csv", "one_form");
  add_output(summary, "trace.csv", "descent_trace");
  write_summary(out_dir, summary, log);
  log << "descent " << to_string(st.status) << " after " << st.iteration << " iterations, residual "
      << st.residual_norm << "\n";
  return 0;
}

int cmd_reconstruct(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto bundle = make_bundle_for(cfg, "reconstruct");
  const auto& g = bundle->group();
  const auto& grid = bundle->base();
  const auto& rc = cfg.reconstruct;
  if (!rc.input) throw InputError("config reconstruct.input: is required for reconstruct");
  const auto path = resolve(cfg, *rc.input);
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input one-form " + path.string());
  const AlgebraOneForm sigma = [&] {
    try {
      return read_one_form_csv(in, bundle);
    } catch (const InputError& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }();

  MultiIndex idx{0, 0, 0};
  if (!rc.base_node.empty()) {
    if (static_cast<int>(rc.base_node.size()) != grid.dims())
      throw InputError("config reconstruct.base_node: must hold " + std::to_string(grid.dims()) + " indices");
    for (int a = 0; a < grid.dims(); ++a) {
      const int k = rc.base_node[static_cast<std::size_t>(a)];
      if (k >= grid.shape(a)) throw InputError("config reconstruct.base_node: index out of range");
      idx[static_cast<std::size_t>(a)] = k;
    }
  }
  GroupElement base_value = g.identity();
  if (!rc.base_value.empty()) {
    try {
      base_value = g.from_payload(rc.base_value);
    } catch (const std::exception& e) {
      throw InputError(std::string("config reconstruct.base_value: ") + e.what());
    }
  }

  ojson summary = envelope("reconstruct", cfg, g);
  summary["results"]["flatness_tol"] = rc.flatness_tol;
  try {
    const GroupField s = reconstruct_section(sigma, base_value, grid.linear_index(idx), rc.flatness_tol);
    write_file(out_dir / "section.csv", [&](std::ostream& os) { write_group_field_csv(os, s); });
    summary["results"]["max_curvature"] = curvature(sigma).max_abs(grid.boundary() == Boundary::Dirichlet);
    summary["results"]["refused"] = false;
    add_output(summary, "section.csv", "group_field");
    write_summary(out_dir, summary, log);
    return 0;
  } catch (const FlatnessError& e) {
    summary["status"] = "refused";
    summary["results"]["max_curvature"] = e.max_curvature();
    summary["results"]["refused"] = true;
    write_summary(out_dir, summary, log);
    throw;
  }
}

}  // namespace covep::cli
