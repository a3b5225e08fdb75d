#include "dgair/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dgair/error.hpp"

namespace dgair {

using Eigen::VectorXd;

double observed_order(double error_coarse, double error_fine) {
  if (!(error_coarse > 0.0) || !(error_fine > 0.0)) throw InvalidArgument("orders need positive errors");
  return std::log2(error_coarse / error_fine);
}

VectorXd random_coefficients(std::size_t size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorXd v(static_cast<Eigen::Index>(size));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return v;
}

ConvergenceReport convergence_study(const ProblemSpec& spec, const ConvergenceOptions& options) {
  if (!spec.exact) throw InvalidArgument("convergence study needs an exact solution");
  if (options.levels.size() < 3) throw InvalidArgument("convergence study needs at least 3 levels");
  for (std::size_t i = 0; i < options.levels.size(); ++i) {
    if (options.levels[i] < 1) throw InvalidArgument("level sizes must be positive");
    if (i > 0 && options.levels[i] != 2 * options.levels[i - 1])
      throw InvalidArgument("convergence levels must double the mesh size each time");
  }

  ConvergenceReport report;
  report.problem = spec.name;
  report.k = options.k;
  report.scheme = options.scheme;
  report.integrator = options.integrator;

  PenaltyConfig penalty = PenaltyConfig::for_scheme(options.scheme, options.k);
  if (options.sigma0) penalty.sigma0 = *options.sigma0;
  penalty.beta0 = options.beta0;

  for (int n : options.levels) {
    auto mesh = std::make_shared<const Mesh>(build_uniform_mesh(n, n, spec.domain));
    auto space = std::make_shared<const DGSpace>(mesh, options.k);
    const SemidiscreteSystem system(space, spec, penalty);

    TimeConfig tc;
    tc.integrator = options.integrator;
    tc.final_time = spec.final_time;
    tc.cfl_safety = options.cfl_safety;
    tc.linear_tolerance = options.linear_tolerance;
    if (!is_explicit(options.integrator)) {
      const double p = integrator_order(options.integrator);
      tc.dt = options.dt_scale * std::pow(mesh->h_max(), (options.k + 1) / p);
      if (options.integrator == Integrator::crank_nicolson) tc.startup_steps = options.startup_steps;
    }

    ObserverConfig oc;
    oc.stride = options.stride;
    const SolveResult run = solve(system, tc, oc);

    ConvergenceLevel level;
    level.n = n;
    level.h = mesh->h_max();
    level.dofs = space->num_dofs();
    level.dt = resolve_dt(system, tc);
    level.steps = run.steps;
    const ObserverSample& last = run.samples.back();
    level.l2_error = last.l2_error.value();
    level.energy_error = last.energy_error.value();
    double integrated = 0.0;
    for (std::size_t i = 0; i < run.samples.size(); ++i) {
      level.linf_l2_error = std::max(level.linf_l2_error, run.samples[i].l2_error.value());
      if (i > 0) {
        const double e = run.samples[i].energy_error.value();
        integrated += (run.samples[i].t - run.samples[i - 1].t) * e * e;
      }
    }
    level.energy_error_integrated = std::sqrt(integrated);
    report.levels.push_back(level);
  }

  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    if (i == 0) {
      report.l2_orders.emplace_back();
      report.linf_l2_orders.emplace_back();
      report.energy_orders.emplace_back();
      continue;
    }
    const auto& a = report.levels[i - 1];
    const auto& b = report.levels[i];
    report.l2_orders.emplace_back(observed_order(a.l2_error, b.l2_error));
    report.linf_l2_orders.emplace_back(observed_order(a.linf_l2_error, b.linf_l2_error));
    report.energy_orders.emplace_back(observed_order(a.energy_error, b.energy_error));
  }
  return report;
}

CoercivityReport coercivity_scan(std::shared_ptr<const DGSpace> space, const ProblemSpec& spec, Scheme scheme,
                                 const std::vector<double>& sigma_grid, std::size_t samples, std::uint64_t seed,
                                 double beta0) {
  if (!space) throw InvalidArgument("coercivity scan needs a space");
  if (samples == 0) throw InvalidArgument("coercivity scan needs at least one sample");
  CoercivityReport report;
  report.scheme = scheme;
  report.k = space->degree();
  report.samples = samples;
  report.seed = seed;

  PenaltyConfig reference = PenaltyConfig::for_scheme(scheme, space->degree());
  reference.beta0 = beta0;
  report.reference_sigma0 = reference.sigma0;
  const SparseMatrix norm_matrix = linear_combination(1.0, assemble_broken_gradient(*space, spec), 1.0,
                                                      assemble_jump_penalty(*space, reference, EdgeSet::all));

  std::mt19937_64 rng(seed);
  std::vector<VectorXd> fields;
  std::vector<double> norms;
  fields.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    VectorXd v = random_coefficients(space->num_dofs(), rng);
    const double nv = quadratic_form(norm_matrix, v);
    v /= std::sqrt(nv);
    fields.push_back(std::move(v));
  }

  auto min_ratio = [&](double sigma0) {
    PenaltyConfig pen = reference;
    pen.sigma0 = sigma0;
    const SparseMatrix a = assemble_diffusion(*space, spec, pen);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& v : fields) worst = std::min(worst, quadratic_form(a, v));
    return worst;
  };

  for (double sigma0 : sigma_grid) {
    if (!(sigma0 >= 0.0)) throw InvalidArgument("penalty grid values must be >= 0");
    report.entries.push_back({sigma0, min_ratio(sigma0)});
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const CoercivityEntry& a, const CoercivityEntry& b) { return a.sigma0 < b.sigma0; });
  for (auto it = report.entries.rbegin(); it != report.entries.rend() && it->min_ratio > 0.0; ++it)
    report.threshold = it->sigma0;
  report.kappa = min_ratio(reference.sigma0);
  return report;
}

double upwind_min_ratio(const DGSpace& space, const ProblemSpec& spec, std::size_t samples, std::uint64_t seed) {
  const SparseMatrix b = assemble_convection(space, spec);
  const SparseMatrix m = assemble_mass(space);
  std::mt19937_64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    const VectorXd v = random_coefficients(space.num_dofs(), rng);
    worst = std::min(worst, quadratic_form(b, v) / quadratic_form(m, v));
  }
  return worst;
}

double nipg_identity_defect(const DGSpace& space, const ProblemSpec& spec, double sigma0, double beta0,
                            std::size_t samples, std::uint64_t seed) {
  PenaltyConfig pen = PenaltyConfig::for_scheme(Scheme::nipg, space.degree());
  pen.sigma0 = sigma0;
  pen.beta0 = beta0;
  const SparseMatrix a = assemble_diffusion(space, spec, pen);
  std::mt19937_64 rng(seed);
  auto shared = std::make_shared<const DGSpace>(space.mesh_ptr(), space.degree());
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const VectorXd v = random_coefficients(space.num_dofs(), rng);
    const DGField field(shared, v, 0.0);
    const double energy = std::pow(energy_seminorm(field, spec, pen, EdgeSet::all), 2);
    worst = std::max(worst, std::abs(quadratic_form(a, v) - energy) / energy);
  }
  return worst;
}

double consistency_residual(const SemidiscreteSystem& system, double t) {
  const auto& spec = system.spec();
  if (!spec.exact) throw InvalidArgument("consistency residual needs an exact solution");
  const auto degree = expr::polynomial_degree(*spec.exact->u);
  if (!degree) throw InvalidArgument("consistency residual needs a polynomial exact solution");
  if (*degree > system.space().degree())
    throw InvalidArgument("exact solution degree " + std::to_string(*degree) + " exceeds the space degree " +
                          std::to_string(system.space().degree()));
  const expr::CompiledExpr u(spec.exact->u), ut(spec.exact->u_t);
  const DGField xi = l2_project([&](double x, double y) { return u(x, y, t, 0.0); }, system.space_ptr());
  const DGField xi_t = l2_project([&](double x, double y) { return ut(x, y, t, 0.0); }, system.space_ptr());
  const VectorXd r = system.mass() * xi_t.coeffs + system.stiffness() * xi.coeffs - system.source(xi.coeffs, t);
  return r.lpNorm<Eigen::Infinity>();
}

namespace {

// Per element E: sum over edges of the outward numerical fluxes
//   s_E int_e (-{K grad U . n} + sigma/|e|^beta0 [U] + c_n U^up)
// minus int_E f(U), with s_E = +1 on element_1 and -1 on element_2.
VectorXd element_net_outflow(const SemidiscreteSystem& system, const VectorXd& coeffs, double t) {
  const DGSpace& space = system.space();
  const Mesh& mesh = space.mesh();
  const CompiledProblem& p = system.problem();
  const PenaltyConfig& pen = system.penalty();
  const DGField field(system.space_ptr(), coeffs, t);
  VectorXd out = VectorXd::Zero(static_cast<Eigen::Index>(space.num_elements()));

  const auto& erule = space.edge_rule();
  for (std::size_t ei = 0; ei < mesh.num_edges(); ++ei) {
    const Edge& edge = mesh.edges()[ei];
    const auto frames = edge_trace_frames(mesh, edge, erule.points);
    const double weight = pen.sigma(ei) / std::pow(edge.length, pen.beta0);
    const auto e1 = static_cast<std::size_t>(edge.element_1);
    double flux = 0.0;
    for (std::size_t q = 0; q < frames.size(); ++q) {
      const Point x = frames[q].physical;
      const double kx = p.kx(x.x, x.y, 0.0, 0.0), ky = p.ky(x.x, x.y, 0.0, 0.0);
      const double cn = p.c(x.x, x.y, 0.0, 0.0) * edge.normal.x + p.e(x.x, x.y, 0.0, 0.0) * edge.normal.y;
      const double u1 = eval_field(field, e1, frames[q].ref_1);
      const Point g1 = eval_field_gradient(field, e1, frames[q].ref_1);
      double kgrad = kx * g1.x * edge.normal.x + ky * g1.y * edge.normal.y;
      double jump = u1;
      double upwind = cn >= 0.0 ? u1 : 0.0;
      if (!edge.is_boundary()) {
        const auto e2 = static_cast<std::size_t>(edge.element_2);
        const double u2 = eval_field(field, e2, frames[q].ref_2);
        const Point g2 = eval_field_gradient(field, e2, frames[q].ref_2);
        kgrad = 0.5 * (kgrad + kx * g2.x * edge.normal.x + ky * g2.y * edge.normal.y);
        jump = u1 - u2;
        if (cn < 0.0) upwind = u2;
      }
      flux += erule.weights[q] * edge.length * (-kgrad + weight * jump + cn * upwind);
    }
    out[static_cast<Eigen::Index>(e1)] += flux;
    if (!edge.is_boundary()) out[edge.element_2] -= flux;
  }

  const auto& vrule = space.volume_rule();
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const double det = mesh.triangles()[el].det;
    double source = 0.0;
    for (std::size_t q = 0; q < vrule.points.size(); ++q) {
      const Point x = map_to_physical(mesh, el, vrule.points[q]);
      source += vrule.weights[q] * det * p.f(eval_field(field, el, vrule.points[q]), x.x, x.y, t);
    }
    out[static_cast<Eigen::Index>(el)] -= source;
  }
  return out;
}

VectorXd element_mass(const SemidiscreteSystem& system, const VectorXd& coeffs) {
  const DGSpace& space = system.space();
  const auto& rule = space.volume_rule();
  VectorXd out(static_cast<Eigen::Index>(space.num_elements()));
  for (std::size_t el = 0; el < space.num_elements(); ++el) {
    const VectorXd uq = space.basis_values() * coeffs.segment(static_cast<Eigen::Index>(space.offset(el)), space.n_loc());
    double m = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) m += rule.weights[q] * uq[static_cast<Eigen::Index>(q)];
    out[static_cast<Eigen::Index>(el)] = m * space.mesh().triangles()[el].det;
  }
  return out;
}

}  // namespace

ConservationReport local_conservation_check(const SemidiscreteSystem& system, const SolveResult& trace,
                                            Integrator integrator) {
  if (trace.states.size() != trace.step_sizes.size() + 1)
    throw InvalidArgument("conservation check needs a recorded trace (states and step sizes)");
  ConservationReport report;
  report.element_violation.assign(system.space().num_elements(), 0.0);
  for (std::size_t n = 0; n < trace.step_sizes.size(); ++n) {
    const VectorXd& u0 = trace.states[n].coeffs;
    const VectorXd& u1 = trace.states[n + 1].coeffs;
    const double t = trace.states[n].t;
    const double dt = trace.step_sizes[n];
    VectorXd flux;
    switch (integrator) {
      case Integrator::forward_euler: flux = element_net_outflow(system, u0, t); break;
      case Integrator::backward_euler: flux = element_net_outflow(system, u1, t + dt); break;
      case Integrator::crank_nicolson:
        flux = 0.5 * (element_net_outflow(system, u0, t) + element_net_outflow(system, u1, t + dt));
        break;
      case Integrator::ssprk3: {
        const VectorXd s1 = u0 + dt * system.rate(u0, t);
        const VectorXd s2 = 0.75 * u0 + 0.25 * (s1 + dt * system.rate(s1, t + dt));
        flux = element_net_outflow(system, u0, t) / 6.0 + element_net_outflow(system, s1, t + dt) / 6.0 +
               (2.0 / 3.0) * element_net_outflow(system, s2, t + 0.5 * dt);
        break;
      }
    }
    const VectorXd balance = element_mass(system, u1) - element_mass(system, u0) + dt * flux;
    for (Eigen::Index e = 0; e < balance.size(); ++e) {
      const double v = std::abs(balance[e]);
      auto& slot = report.element_violation[static_cast<std::size_t>(e)];
      slot = std::max(slot, v);
      if (v > report.max_violation) {
        report.max_violation = v;
        report.worst_element = static_cast<std::size_t>(e);
        report.worst_step = n + 1;
      }
    }
  }
  return report;
}

}  // namespace dgair
