#include "neass/experiments.hpp"

#include "neass/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace neass {

namespace {

Interaction perturbation_interaction(const ExperimentSetup& setup, const std::shared_ptr<const Lattice>& lattice) {
  const auto& p = setup.perturbation;
  if (p.kind == "linear") return LipschitzPotential::linear(lattice, p.strength).to_interaction(setup.family.orbitals);
  if (p.kind == "sine") return LipschitzPotential::sine(lattice, p.strength).to_interaction(setup.family.orbitals);
  return Interaction(lattice, setup.family.orbitals);
}

std::optional<LipschitzPotential> perturbation_potential(const ExperimentSetup& setup,
                                                         const std::shared_ptr<const Lattice>& lattice) {
  const auto& p = setup.perturbation;
  if (p.kind == "linear") return LipschitzPotential::linear(lattice, p.strength);
  if (p.kind == "sine") return LipschitzPotential::sine(lattice, p.strength);
  return std::nullopt;
}

StepControl step_control(const ExperimentParams& p) {
  StepControl c;
  c.tolerance = p.propagation_tolerance;
  c.max_steps = p.max_steps;
  return c;
}

GeneratorOptions generator_options(const ExperimentParams& p, int n, double mu, std::uint64_t seed) {
  GeneratorOptions o;
  o.order = n;
  o.mu = mu;
  o.dt = p.dt;
  o.orientation = pinned_orientation();
  o.panel_seed = seed;
  return o;
}

double max_ratio(const NeassGenerator& g) {
  double worst = 0.0;
  for (std::size_t j = 0; j < g.residuals.size(); ++j)
    if (g.scales[j] > 0.0) worst = std::max(worst, g.residuals[j] / g.scales[j]);
  return worst;
}

}  // namespace

Model build_model(const ExperimentSetup& setup, int k) {
  const auto& f = setup.family;
  auto lattice = std::make_shared<const Lattice>(build_lattice(f.dimension, k, f.boundary, f.orbitals));
  FockSpace space = FockSpace::full(lattice, f.orbitals);
  std::vector<TimeDependentHamiltonian::Component> h0;
  h0.push_back({switching::Constant{1.0}, build_example_hamiltonian(lattice, f.params)});
  for (const auto& [profile, params] : f.drives) h0.push_back({profile, build_example_hamiltonian(lattice, params)});
  std::vector<TimeDependentHamiltonian::Component> v;
  if (setup.perturbation.kind != "none")
    v.push_back({setup.perturbation.profile, perturbation_interaction(setup, lattice)});
  TimeDependentHamiltonian h(space, std::move(h0), std::move(v));
  return Model{lattice, space, std::move(h)};
}

Matrix observable_matrix(const ObservableSpec& obs, const FockSpace& space) {
  const auto& lat = space.lattice();
  std::vector<std::size_t> idx;
  for (const auto& s : obs.sites) idx.push_back(lat.index_of(s));
  if (obs.kind == "density") {
    const Matrix a = annihilation_op(space, idx[0], obs.orbital).matrix();
    return a.adjoint() * a;
  }
  const Matrix ax = annihilation_op(space, idx[0], obs.orbital).matrix();
  const Matrix ay = annihilation_op(space, idx[1], obs.orbital).matrix();
  const Matrix hop = ax.adjoint() * ay;
  if (obs.kind == "hopping") return hop + hop.adjoint();
  if (obs.kind == "current") return I_unit * (hop - hop.adjoint());
  throw Error(ErrorCode::InvalidArgument, "unknown observable kind " + obs.kind);
}

std::size_t observable_support(const ObservableSpec& obs) {
  std::vector<Site> s = obs.sites;
  std::sort(s.begin(), s.end());
  return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

std::vector<DefectRecord> run_defect_sweep(const ExperimentSetup& setup, std::uint64_t seed, unsigned threads) {
  const auto& p = setup.params;
  if (setup.observables.empty()) throw Error(ErrorCode::InvalidArgument, "defect sweep needs observables");
  const Model model = build_model(setup, setup.radius);
  std::vector<Matrix> obs;
  for (const auto& o : setup.observables) obs.push_back(observable_matrix(o, model.space));
  const int orientation = pinned_orientation();

  std::vector<std::tuple<int, double, double>> grid;
  for (int n : p.orders)
    for (double eps : p.eps)
      for (double eta : p.eta) grid.emplace_back(n, eps, eta);

  std::vector<std::vector<DefectRecord>> slots(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t g) {
    const auto [n, eps, eta] = grid[g];
    DefectRecord base;
    base.k = setup.radius;
    base.n = n;
    base.eps = eps;
    base.eta = eta;
    base.t0 = p.t0;
    base.t = p.t;
    base.seed = seed;
    base.orientation = orientation;
    const double ep = std::pow(eps, n + 1), hp = std::pow(eta, n + 1);
    base.eps_dominated = ep >= p.regime_factor * hp;
    base.eta_dominated = hp >= p.regime_factor * ep;
    auto& out = slots[g];
    try {
      const GeneratorOptions opt = generator_options(p, n, eta / eps, seed);
      const NeassGenerator g0 = build_generators(model.h, p.t0, opt);
      const NeassGenerator g1 = build_generators(model.h, p.t, opt);
      const LiouvillianContext c0(model.h.h0(p.t0), opt.gap_tolerance);
      const LiouvillianContext c1(model.h.h0(p.t), opt.gap_tolerance);
      const NeassState s0(c0.ground(), g0.S(eps), eps, orientation);
      const NeassState s1(c1.ground(), g1.S(eps), eps, orientation);
      const Propagator prop = propagate(model.h, eps, p.t0, p.t, eta, step_control(p), s0.dressed());
      const Vector psi = prop.U * s0.dressed();
      base.steps = static_cast<std::int64_t>(prop.stats.steps);
      base.unitarity_defect = prop.stats.unitarity_defect;
      base.max_residual_ratio = std::max(max_ratio(g0), max_ratio(g1));
      base.stencil_drift = std::max(g0.stencil_drift, g1.stencil_drift);
      for (std::size_t i = 0; i < obs.size(); ++i) {
        DefectRecord r = base;
        r.observable = setup.observables[i].name;
        r.support = static_cast<std::int64_t>(observable_support(setup.observables[i]));
        r.defect = std::abs(psi.dot(obs[i] * psi) - s1.expectation(obs[i]));
        out.push_back(std::move(r));
      }
    } catch (const Error& e) {
      for (const auto& o : setup.observables) {
        DefectRecord r = base;
        r.observable = o.name;
        r.support = static_cast<std::int64_t>(observable_support(o));
        r.defect = std::numeric_limits<double>::quiet_NaN();
        r.error = e.what();
        out.push_back(std::move(r));
      }
    }
  });

  std::vector<DefectRecord> records;
  for (auto& s : slots)
    for (auto& r : s) records.push_back(std::move(r));
  return records;
}

Table defect_table(const std::vector<DefectRecord>& records) {
  Table t;
  t.name = "defect";
  t.columns = {"k", "n", "eps", "eta", "t0", "t", "observable", "support", "defect", "eps_dominated",
               "eta_dominated", "seed", "convention", "steps", "unitarity_defect", "max_residual_ratio",
               "stencil_drift", "error"};
  for (const auto& r : records)
    t.add_row({std::int64_t{r.k}, std::int64_t{r.n}, r.eps, r.eta, r.t0, r.t, r.observable, r.support, r.defect,
               std::int64_t{r.eps_dominated}, std::int64_t{r.eta_dominated}, std::to_string(r.seed),
               orientation_label(r.orientation), r.steps, r.unitarity_defect, r.max_residual_ratio, r.stencil_drift,
               r.error});
  return t;
}

SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double floor,
                          double min_decades) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "x and y differ in length");
  std::vector<double> lx, ly;
  SlopeFit fit;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "log-log fit needs positive abscissae");
    if (!(y[i] > floor)) {
      ++fit.excluded;
      continue;
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  fit.used = lx.size();
  if (lx.size() < 4) {
    if (fit.excluded > 0)
      throw Error(ErrorCode::FloorContamination, std::to_string(fit.excluded) + " point(s) at the noise floor, " +
                                                     std::to_string(lx.size()) + " usable");
    throw Error(ErrorCode::DynamicRangeTooSmall, "need at least 4 points");
  }
  const auto [mn, mx] = std::minmax_element(lx.begin(), lx.end());
  if ((*mx - *mn) / std::log(10.0) < min_decades - 1e-12)
    throw Error(ErrorCode::DynamicRangeTooSmall, "abscissae span less than " + std::to_string(min_decades) + " decade(s)");

  const double n = static_cast<double>(lx.size());
  const double mxv = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double myv = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mxv) * (lx[i] - mxv);
    sxy += (lx[i] - mxv) * (ly[i] - myv);
  }
  fit.slope = sxy / sxx;
  fit.intercept = myv - fit.slope * mxv;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

namespace {

std::string resolve_axis(const ExperimentParams& p) {
  if (p.axis != "auto") return p.axis;
  return p.eta.size() > 1 && p.eps.size() == 1 ? "eta" : "eps";
}

}  // namespace

std::vector<ScalingCheck> check_defect_scaling(const ExperimentSetup& setup, const std::vector<DefectRecord>& records) {
  const std::string axis = resolve_axis(setup.params);
  const int d = setup.family.dimension;
  // (n, observable, other-axis value) -> points
  std::map<std::tuple<int, std::string, double>, std::pair<std::vector<double>, std::vector<double>>> groups;
  std::vector<std::tuple<int, std::string, double>> order;
  for (const auto& r : records) {
    const bool in_regime = axis == "eps" ? r.eps_dominated : r.eta_dominated;
    const auto key = std::make_tuple(r.n, r.observable, axis == "eps" ? r.eta : r.eps);
    if (!groups.count(key)) order.push_back(key);
    auto& g = groups[key];
    if (!r.error.empty() || !in_regime) continue;
    g.first.push_back(axis == "eps" ? r.eps : r.eta);
    g.second.push_back(r.defect);
  }
  std::vector<ScalingCheck> out;
  for (const auto& key : order) {
    const auto& [n, name, other] = key;
    ScalingCheck c;
    c.n = n;
    c.observable = name;
    c.axis = axis;
    c.expected = axis == "eps" ? n + 1 : (n + 1) - (d + 1);
    c.tolerance = axis == "eps" ? 0.3 : 0.4;
    const auto& g = groups[key];
    try {
      c.fit = fit_loglog_slope(g.first, g.second);
      c.pass = std::abs(c.fit.slope - c.expected) <= c.tolerance;
    } catch (const Error& e) {
      c.note = e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

Table scaling_table(const std::vector<ScalingCheck>& checks) {
  Table t;
  t.name = "scaling";
  t.columns = {"n", "observable", "axis", "expected", "tolerance", "slope", "intercept", "residual", "used",
               "excluded", "pass", "note"};
  for (const auto& c : checks)
    t.add_row({std::int64_t{c.n}, c.observable, c.axis, c.expected, c.tolerance, c.fit.slope, c.fit.intercept,
               c.fit.residual, static_cast<std::int64_t>(c.fit.used), static_cast<std::int64_t>(c.fit.excluded),
               std::int64_t{c.pass}, c.note});
  return t;
}

std::vector<LifetimeRecord> lifetime_experiment(const ExperimentSetup& setup, std::uint64_t seed, unsigned threads) {
  const auto& p = setup.params;
  if (setup.observables.empty()) throw Error(ErrorCode::InvalidArgument, "lifetime experiment needs observables");
  const Model model = build_model(setup, setup.radius);
  std::vector<Matrix> obs;
  for (const auto& o : setup.observables) obs.push_back(observable_matrix(o, model.space));
  const int orientation = pinned_orientation();
  const LiouvillianContext ctx(model.h.h0(p.t));

  std::vector<std::pair<int, double>> grid;
  for (int n : p.orders)
    for (double eps : p.eps) grid.emplace_back(n, eps);
  std::vector<std::vector<LifetimeRecord>> slots(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t g) {
    const auto [n, eps] = grid[g];
    const NeassGenerator gen = build_generators(model.h, p.t, generator_options(p, n, 0.0, seed));
    const NeassState state(ctx.ground(), gen.S(eps), eps, orientation);
    const Vector& phi = state.dressed();
    Eigen::SelfAdjointEigenSolver<Matrix> es(model.h.h_eps(p.t, eps));
    const Vector coeffs = es.eigenvectors().adjoint() * phi;
    std::vector<cplx> base;
    for (const auto& a : obs) base.push_back(state.expectation(a));
    for (double s : p.s_grid) {
      Vector phase(coeffs.size());
      for (Eigen::Index i = 0; i < coeffs.size(); ++i)
        phase(i) = std::exp(cplx(0.0, -s * es.eigenvalues()(i))) * coeffs(i);
      const Vector evolved = es.eigenvectors() * phase;
      for (std::size_t i = 0; i < obs.size(); ++i) {
        LifetimeRecord r;
        r.n = n;
        r.eps = eps;
        r.s = s;
        r.observable = setup.observables[i].name;
        r.drift = std::abs(evolved.dot(obs[i] * evolved) - base[i]);
        slots[g].push_back(std::move(r));
      }
    }
  });
  std::vector<LifetimeRecord> out;
  for (auto& s : slots)
    for (auto& r : s) out.push_back(std::move(r));
  return out;
}

Table lifetime_table(const std::vector<LifetimeRecord>& records) {
  Table t;
  t.name = "lifetime";
  t.columns = {"n", "eps", "s", "observable", "drift"};
  for (const auto& r : records) t.add_row({std::int64_t{r.n}, r.eps, r.s, r.observable, r.drift});
  return t;
}

std::vector<LifetimeCheck> check_lifetime(const ExperimentSetup& setup, const std::vector<LifetimeRecord>& records) {
  const auto& p = setup.params;
  const int d = setup.family.dimension;
  std::vector<LifetimeCheck> out;
  std::vector<std::pair<int, std::string>> keys;
  for (const auto& r : records)
    if (std::find(keys.begin(), keys.end(), std::make_pair(r.n, r.observable)) == keys.end())
      keys.emplace_back(r.n, r.observable);
  std::vector<double> s_sorted = p.s_grid;
  std::sort(s_sorted.begin(), s_sorted.end());
  const double s_tail = s_sorted.empty() ? 0.0 : s_sorted[s_sorted.size() / 2];
  const double eps_max = p.eps.empty() ? 0.0 : *std::max_element(p.eps.begin(), p.eps.end());

  for (const auto& [n, name] : keys) {
    LifetimeCheck c;
    c.n = n;
    c.observable = name;
    std::vector<double> xe, ye, xs, ys;
    for (const auto& r : records) {
      if (r.n != n || r.observable != name) continue;
      if (r.s == p.s_fit) {
        xe.push_back(r.eps);
        ye.push_back(r.drift);
      }
      if (r.eps == eps_max && r.s >= s_tail && r.s > 0.0) {
        xs.push_back(r.s);
        ys.push_back(r.drift);
      }
    }
    try {
      c.eps_fit = fit_loglog_slope(xe, ye);
      c.eps_pass = c.eps_fit.slope >= n + 1 - 0.3;
    } catch (const Error& e) {
      c.note = e.what();
    }
    try {
      c.s_fit = fit_loglog_slope(xs, ys, 10.0 * std::numeric_limits<double>::epsilon(), 0.0);
      c.s_pass = c.s_fit.slope <= d + 1 + 0.5;
    } catch (const Error& e) {
      c.note += (c.note.empty() ? "" : "; ") + std::string(e.what());
    }
    out.push_back(std::move(c));
  }
  return out;
}

Table lifetime_check_table(const std::vector<LifetimeCheck>& checks) {
  Table t;
  t.name = "lifetime_check";
  t.columns = {"n", "observable", "eps_slope", "eps_pass", "s_exponent", "s_pass", "note"};
  for (const auto& c : checks)
    t.add_row({std::int64_t{c.n}, c.observable, c.eps_fit.slope, std::int64_t{c.eps_pass}, c.s_fit.slope,
               std::int64_t{c.s_pass}, c.note});
  return t;
}

std::vector<TdlRecord> tdl_convergence_experiment(const ExperimentSetup& setup, std::uint64_t seed, unsigned threads) {
  const auto& p = setup.params;
  if (setup.observables.empty()) throw Error(ErrorCode::InvalidArgument, "tdl experiment needs observables");
  std::vector<int> ks = p.k_list;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  const int n = p.orders.front();
  const double eps = p.eps.front(), eta = p.eta.front();
  const int orientation = pinned_orientation();
  static const char* kQuantities[] = {"ground", "neass", "evolved"};

  // values[k][observable][quantity]
  std::vector<std::vector<std::array<double, 3>>> values(ks.size());
  parallel_for(ks.size(), threads, [&](std::size_t i) {
    const Model model = build_model(setup, ks[i]);
    const GeneratorOptions opt = generator_options(p, n, eta / eps, seed);
    const LiouvillianContext c0(model.h.h0(p.t0), opt.gap_tolerance);
    const LiouvillianContext c1(model.h.h0(p.t), opt.gap_tolerance);
    const NeassGenerator g0 = build_generators(model.h, p.t0, opt);
    const NeassGenerator g1 = build_generators(model.h, p.t, opt);
    const NeassState s0(c0.ground(), g0.S(eps), eps, orientation);
    const NeassState s1(c1.ground(), g1.S(eps), eps, orientation);
    const Propagator prop = propagate(model.h, eps, p.t0, p.t, eta, step_control(p), s0.dressed());
    const Vector psi = prop.U * s0.dressed();
    for (const auto& o : setup.observables) {
      const Matrix a = observable_matrix(o, model.space);
      values[i].push_back({c0.ground().dot(a * c0.ground()).real(), s1.expectation(a).real(), psi.dot(a * psi).real()});
    }
  });

  std::vector<TdlRecord> out;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    for (std::size_t o = 0; o < setup.observables.size(); ++o) {
      const auto& spec = setup.observables[o];
      int reach = 0;
      for (const auto& s : spec.sites) reach = std::max({reach, std::abs(s[0]), std::abs(s[1])});
      for (int q = 0; q < 3; ++q) {
        TdlRecord r;
        r.k = ks[i];
        r.observable = spec.name;
        r.quantity = kQuantities[q];
        r.value = values[i][o][static_cast<std::size_t>(q)];
        r.difference = std::abs(r.value - values.back()[o][static_cast<std::size_t>(q)]);
        r.boundary_distance = ks[i] + 1 - reach;
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

Table tdl_table(const std::vector<TdlRecord>& records) {
  Table t;
  t.name = "tdl";
  t.columns = {"k", "observable", "quantity", "value", "difference", "boundary_distance"};
  for (const auto& r : records)
    t.add_row({std::int64_t{r.k}, r.observable, r.quantity, r.value, r.difference, r.boundary_distance});
  return t;
}

bool tdl_monotone(const std::vector<TdlRecord>& records) {
  std::map<std::string, std::vector<std::pair<int, double>>> series;
  int k_max = 0;
  for (const auto& r : records) k_max = std::max(k_max, r.k);
  for (const auto& r : records)
    if (r.quantity == "ground" && r.k < k_max) series[r.observable].emplace_back(r.k, r.difference);
  for (auto& [name, s] : series) {
    std::sort(s.begin(), s.end());
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i].second > s[i - 1].second * (1.0 + 1e-9) + 1e-13) return false;
  }
  return true;
}

Table norms_table(const ExperimentSetup& setup) {
  const auto& p = setup.params;
  Table t;
  t.name = "norms";
  t.columns = {"quantity", "k", "M", "value"};
  std::vector<int> ks = p.k_list;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::vector<Interaction> family;
  for (int k : ks) {
    const auto& f = setup.family;
    auto lattice = std::make_shared<const Lattice>(build_lattice(f.dimension, k, f.boundary, f.orbitals));
    const Interaction h0 = build_example_hamiltonian(lattice, f.params);
    family.push_back(h0);
    t.add_row({std::string("h0_norm"), std::int64_t{k}, std::int64_t{-1}, interaction_norm(h0, p.norm_a, p.norm_n)});
    for (int m : p.m_list)
      if (m <= k)
        t.add_row({std::string("h0_bulk_norm"), std::int64_t{k}, std::int64_t{m},
                   bulk_interaction_norm(h0, p.norm_a, p.norm_n, m)});
    if (const auto v = perturbation_potential(setup, lattice)) {
      const Interaction vi = v->to_interaction(f.orbitals);
      t.add_row({std::string("v_norm"), std::int64_t{k}, std::int64_t{-1}, interaction_norm(vi, p.norm_a, p.norm_n)});
      t.add_row({std::string("lipschitz"), std::int64_t{k}, std::int64_t{-1}, lipschitz_constant(*v)});
      t.add_row({std::string("lipschitz_l1"), std::int64_t{k}, std::int64_t{-1}, lipschitz_constant_l1(*v)});
    }
  }
  if (!family.empty() && !p.m_list.empty()) {
    for (const auto& row : tdl_diagnostic(family, family.back(), p.norm_a, p.norm_n, p.m_list))
      t.add_row({std::string("h0_tdl"), std::int64_t{row.k}, std::int64_t{row.M}, row.value});
  }
  return t;
}

ModelCheck model_check(const ExperimentSetup& setup, unsigned threads) {
  const auto& p = setup.params;
  ModelCheck out;
  const GapScanResult scan = uniform_gap_scan(setup.family, p.k_list, p.t_grid, p.gap_threshold, p.min_k, threads);
  out.gaps.name = "gaps";
  out.gaps.columns = {"k", "t", "gap", "ground_energy", "degenerate"};
  for (const auto& e : scan.entries)
    out.gaps.add_row({std::int64_t{e.k}, e.t, e.gap, e.ground_energy, std::int64_t{e.degenerate}});
  out.uniform_gap = scan.uniform_gap_holds;

  out.summary.name = "model_check";
  out.summary.columns = {"key", "value", "detail"};
  out.summary.add_row({std::string("min_gap"), scan.min_gap, std::string()});
  out.summary.add_row({std::string("uniform_gap"), static_cast<double>(scan.uniform_gap_holds),
                       "threshold " + std::to_string(p.gap_threshold)});

  const int k_max = *std::max_element(p.k_list.begin(), p.k_list.end());
  const Model model = build_model(setup, k_max);
  const auto compat = check_bulk_compatibility(*model.lattice);
  out.summary.add_row({std::string("bulk_compatible"), static_cast<double>(compat.compatible),
                       std::to_string(compat.violations.size()) + " violation(s)"});
  if (const auto v = perturbation_potential(setup, model.lattice)) {
    out.summary.add_row({std::string("lipschitz"), lipschitz_constant(*v), lipschitz_warning(*v, std::abs(setup.perturbation.strength))});
    out.summary.add_row({std::string("lipschitz_l1"), lipschitz_constant_l1(*v), std::string()});
  }
  if (p.interior_l >= 0) {
    const Matrix h0 = model.h.h0(p.t_grid.front());
    const SpectralData sd = diagonalize(h0, {.require_simple = false});
    const double ratio = bulk_gap_ratio(h0, model.space, GroundState(sd), p.interior_l);
    out.bulk_gap = ratio >= p.gap_threshold;
    out.summary.add_row({std::string("bulk_gap_ratio"), ratio, "l = " + std::to_string(p.interior_l)});
    out.summary.add_row({std::string("global_gap"), sd.gap, "k = " + std::to_string(k_max)});
  }
  out.pass = out.uniform_gap || out.bulk_gap;
  out.summary.add_row({std::string("mode"), static_cast<double>(out.pass),
                       out.uniform_gap ? "uniform-gap" : (out.bulk_gap ? "bulk-gap" : "gapless")});
  return out;
}

BuildReport neass_build(const ExperimentSetup& setup, std::uint64_t seed, unsigned threads) {
  const auto& p = setup.params;
  const Model model = build_model(setup, setup.radius);
  const double eps = p.eps.front(), eta = p.eta.front();
  BuildReport out;
  out.generators.resize(p.orders.size());
  parallel_for(p.orders.size(), threads, [&](std::size_t i) {
    out.generators[i] = build_generators(model.h, p.t, generator_options(p, p.orders[i], eta / eps, seed));
  });
  out.residuals.name = "residuals";
  out.residuals.columns = {"n", "j", "residual", "scale", "ratio", "offdiag", "selfadjoint_defect", "stencil_drift",
                           "J", "convention"};
  out.pass = true;
  for (const auto& g : out.generators) {
    const auto delta = p.delta.empty() ? default_delta_schedule(g.order) : p.delta;
    const int J = resum_generator(g, eps, eta, delta).J;
    for (std::size_t j = 0; j < g.A.size(); ++j) {
      const double ratio = g.scales[j] > 0.0 ? g.residuals[j] / g.scales[j] : 0.0;
      const double sa = max_abs(g.A[j] - g.A[j].adjoint());
      out.pass = out.pass && ratio <= 1e-7 && sa <= 1e-10 * std::max(1.0, max_abs(g.A[j]));
      out.residuals.add_row({std::int64_t{g.order}, static_cast<std::int64_t>(j + 1), g.residuals[j], g.scales[j],
                             ratio, g.offdiag[j], sa, g.stencil_drift, std::int64_t{J},
                             orientation_label(g.orientation)});
    }
  }
  return out;
}

}  // namespace neass
