#include "pbessel/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "json.hpp"
#include "pbessel/errors.hpp"
#include "pbessel/format.hpp"
#include "pbessel/parallel.hpp"
#include "pbessel/quadrature.hpp"

namespace pbessel {
namespace {

// Targets rearranged for the optimizer: records grouped by boundary
// parameter, each with a tracked oscillation index and the local spectral
// gap (fixed at the starting model) that scales its misfit.
struct TrackedTargets {
  struct Group {
    double beta = kBetaInfinity;
    std::vector<std::size_t> records;
    int max_index = 0;
  };
  std::vector<Group> groups;
  std::vector<int> index;           // per record
  std::vector<double> gap;          // per record, absolute units
  std::vector<double> lambda_star;  // per record
  std::vector<std::size_t> zeta_records;
  std::vector<double> ln_zeta_star;  // per zeta record
};

// Assign each target the index of the nearest eigenvalue of the starting
// model; the optimizer then follows those indices, never raw proximity.
TrackedTargets track_targets(const ReconstructionProblem& problem,
                             const Potential& q0) {
  const MixedDataset& data = problem.data;
  TrackedTargets t;
  t.index.resize(data.lambda.size(), 0);
  t.gap.resize(data.lambda.size(), 0.0);
  t.lambda_star.resize(data.lambda.size(), 0.0);
  for (std::size_t i = 0; i < data.lambda.size(); ++i) {
    const EigenRecord& rec = data.lambda[i];
    t.lambda_star[i] = rec.value;
    TrackedTargets::Group* group = nullptr;
    for (auto& g : t.groups) {
      if (g.beta == rec.beta) group = &g;
    }
    if (group == nullptr) {
      t.groups.push_back({rec.beta, {}, 0});
      group = &t.groups.back();
    }
    group->records.push_back(i);
    if (rec.has_zeta) {
      t.zeta_records.push_back(i);
      t.ln_zeta_star.push_back(std::log(rec.zeta));
    }
  }

  SpectrumOptions opt = problem.spectrum;
  opt.jobs = 1;
  for (auto& group : t.groups) {
    double lambda_max = 0.0;
    for (std::size_t i : group.records) {
      lambda_max = std::max(lambda_max, t.lambda_star[i]);
    }
    // Enough indices to bracket the largest target with headroom.
    int count = static_cast<int>(std::ceil(
                    std::sqrt(std::max(lambda_max, 1.0)) / M_PI)) +
                3;
    count = std::max(count, static_cast<int>(group.records.size()) + 2);
    const Spectrum spectrum =
        locate_eigenvalues(data.ell, q0, group.beta, count, opt);
    const auto& pts = spectrum.points;
    for (std::size_t i : group.records) {
      std::size_t best = 0;
      double best_gap = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < pts.size(); ++j) {
        const double d = std::abs(pts[j].lambda - t.lambda_star[i]);
        if (d < best_gap) {
          best_gap = d;
          best = j;
        }
      }
      if (best + 1 == pts.size()) {
        throw AccuracyError(
            "reconstruct: target eigenvalue sits at the edge of the located "
            "model spectrum");
      }
      t.index[i] = pts[best].index;
      const double above = pts[best + 1].lambda - pts[best].lambda;
      const double below =
          best > 0 ? pts[best].lambda - pts[best - 1].lambda : above;
      t.gap[i] = 0.5 * (above + below);
      group.max_index = std::max(group.max_index, t.index[i]);
    }
    for (std::size_t u = 0; u < group.records.size(); ++u) {
      for (std::size_t v = u + 1; v < group.records.size(); ++v) {
        if (t.index[group.records[u]] == t.index[group.records[v]]) {
          throw std::invalid_argument(
              "reconstruct: two targets track the same model eigenvalue");
        }
      }
    }
  }
  return t;
}

struct ModelValues {
  std::vector<double> lambda;  // per record
  std::vector<double> zeta;    // per zeta record
};

ModelValues evaluate_model(const ReconstructionProblem& problem,
                           const TrackedTargets& targets, const Potential& q) {
  SpectrumOptions opt = problem.spectrum;
  opt.jobs = 1;
  ModelValues values;
  values.lambda.resize(targets.lambda_star.size(), 0.0);
  std::vector<SpectralPoint> per_record(targets.lambda_star.size());
  for (const auto& group : targets.groups) {
    const Spectrum spectrum =
        locate_eigenvalues(problem.data.ell, q, group.beta, group.max_index, opt);
    for (std::size_t i : group.records) {
      const SpectralPoint& point = spectrum.points[targets.index[i] - 1];
      values.lambda[i] = point.lambda;
      per_record[i] = point;
    }
  }
  for (std::size_t z : targets.zeta_records) {
    values.zeta.push_back(
        norming_constant(per_record[z], problem.data.ell, q, opt.solver));
  }
  return values;
}

// Residual layout: gap-scaled eigenvalue misfits, log norming-constant
// misfits, optional distance hinge, then the ridge entries.
struct ResidualLayout {
  std::size_t n_lambda = 0;
  std::size_t n_zeta = 0;
  bool hinge = false;
  std::size_t dimension = 0;
  std::size_t monitored() const { return n_lambda + n_zeta + (hinge ? 1 : 0); }
  std::size_t total() const { return monitored() + dimension; }
};

using ResidualFn =
    std::function<bool(const std::vector<double>&, Eigen::VectorXd&)>;

struct LMState {
  std::vector<double> theta;
  Eigen::VectorXd residuals;
  double objective = 0.0;
  std::vector<double> trace;
  bool converged = false;
  int iterations = 0;
  std::string status;
};

// Damped Gauss-Newton: trial steps from the ridge-damped normal equations,
// damping increased on rejection.  A trial whose gap-scaled eigenvalue
// entries jump by more than 0.6 is treated as an index swap and rejected the
// same way, which restarts the step with stronger damping.
LMState run_levenberg(const ResidualFn& eval, const ResidualLayout& layout,
                      std::vector<double> theta0, int budget, double data_tol,
                      int jobs) {
  LMState state;
  state.theta = std::move(theta0);
  if (!eval(state.theta, state.residuals)) {
    throw AccuracyError(
        "reconstruct: forward solve failed at the initial iterate");
  }
  state.objective = state.residuals.squaredNorm();
  state.trace.push_back(state.objective);

  const auto monitored_worst = [&](const Eigen::VectorXd& f) {
    double worst = 0.0;
    for (std::size_t i = 0; i < layout.monitored(); ++i) {
      worst = std::max(worst, std::abs(f(static_cast<Eigen::Index>(i))));
    }
    return worst;
  };
  if (monitored_worst(state.residuals) <= data_tol) {
    state.converged = true;
    state.status = "converged";
    return state;
  }

  const int d = static_cast<int>(state.theta.size());
  const int m = static_cast<int>(layout.total());
  double mu = 1e-6;
  for (int iter = 1; iter <= budget; ++iter) {
    state.iterations = iter;
    Eigen::MatrixXd jac(m, d);
    std::vector<int> failed(d, 0);
    parallel_for(static_cast<std::size_t>(d), jobs, [&](std::size_t j) {
      const double h = 1e-6 * std::max(1.0, std::abs(state.theta[j]));
      std::vector<double> shifted = state.theta;
      shifted[j] += h;
      Eigen::VectorXd fj;
      if (!eval(shifted, fj)) {
        failed[j] = 1;
        return;
      }
      jac.col(static_cast<Eigen::Index>(j)) = (fj - state.residuals) / h;
    });
    if (std::count(failed.begin(), failed.end(), 1) > 0) {
      state.status = "stalled: forward solve failed inside the Jacobian";
      return state;
    }

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtf = jac.transpose() * state.residuals;
    Eigen::MatrixXd damped = jtj;
    for (int i = 0; i < d; ++i) {
      damped(i, i) += mu * std::max(jtj(i, i), 1e-12);
    }
    // Backtracking scales the Gauss-Newton step instead of inflating the
    // damping: inflation turns the step toward steepest descent, which makes
    // no progress along weakly determined directions of an ill-conditioned
    // spectral map.
    const Eigen::VectorXd delta = damped.ldlt().solve(-jtf);
    bool accepted = false;
    double scale = 1.0;
    for (int attempt = 0; attempt < 14 && !accepted; ++attempt, scale *= 0.5) {
      std::vector<double> trial = state.theta;
      for (int i = 0; i < d; ++i) trial[i] += scale * delta(i);
      Eigen::VectorXd ft;
      if (!eval(trial, ft)) continue;
      bool swapped = false;
      for (std::size_t i = 0; i < layout.n_lambda; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        if (std::abs(ft(k) - state.residuals(k)) > 0.6) swapped = true;
      }
      if (swapped) continue;
      const double obj = ft.squaredNorm();
      if (obj < state.objective) {
        state.theta = std::move(trial);
        state.residuals = std::move(ft);
        state.objective = obj;
        state.trace.push_back(obj);
        accepted = true;
      }
    }
    if (!accepted) {
      mu *= 100.0;
      if (mu > 1e2) {
        state.status = "stalled: no acceptable step";
        return state;
      }
      continue;
    }
    mu = std::max(mu / 10.0, 1e-10);
    if (monitored_worst(state.residuals) <= data_tol) {
      state.converged = true;
      state.status = "converged";
      return state;
    }
    const double step = scale * delta.lpNorm<Eigen::Infinity>();
    double theta_span = 0.0;
    for (double c : state.theta) theta_span = std::max(theta_span, std::abs(c));
    if (step <= 1e-13 * (1.0 + theta_span)) {
      state.status = "stalled: step at machine precision";
      return state;
    }
  }
  state.status = "iteration budget exhausted";
  return state;
}

// ridge_scale is the initial data misfit (RMS); measuring the ridge against
// it keeps the default weight near-none on well-posed problems without
// giving up conditioning on under-determined ones.
ResidualFn make_residual_fn(const ReconstructionProblem& problem,
                            const TrackedTargets& targets,
                            const ResidualLayout& layout,
                            const std::function<double(const Potential&)>& hinge,
                            double ridge_scale) {
  const double sqrt_reg = std::sqrt(problem.regularization) * ridge_scale;
  return [&problem, &targets, layout, hinge,
          sqrt_reg](const std::vector<double>& theta, Eigen::VectorXd& f) {
    for (double c : theta) {
      if (!std::isfinite(c)) return false;
    }
    Potential q = problem.materialize(theta);
    ModelValues values;
    try {
      values = evaluate_model(problem, targets, q);
    } catch (const std::runtime_error&) {
      return false;
    }
    f.resize(static_cast<Eigen::Index>(layout.total()));
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < layout.n_lambda; ++i) {
      f(at++) = (values.lambda[i] - targets.lambda_star[i]) / targets.gap[i];
    }
    for (std::size_t z = 0; z < layout.n_zeta; ++z) {
      f(at++) = std::log(values.zeta[z]) - targets.ln_zeta_star[z];
    }
    if (layout.hinge) f(at++) = hinge(q);
    for (double c : theta) f(at++) = sqrt_reg * c;
    return f.allFinite();
  };
}

void fill_residual_report(const ReconstructionProblem& problem,
                          const TrackedTargets& targets,
                          const Potential& recovered,
                          ReconstructionResult& result) {
  const ModelValues values = evaluate_model(problem, targets, recovered);
  result.eigenvalue_residuals.assign(targets.lambda_star.size(), 0.0);
  result.zeta_residuals.assign(targets.lambda_star.size(), 0.0);
  result.worst_residual = 0.0;
  for (std::size_t i = 0; i < targets.lambda_star.size(); ++i) {
    result.eigenvalue_residuals[i] =
        (values.lambda[i] - targets.lambda_star[i]) / targets.gap[i];
    result.worst_residual =
        std::max(result.worst_residual, std::abs(result.eigenvalue_residuals[i]));
  }
  for (std::size_t z = 0; z < targets.zeta_records.size(); ++z) {
    const std::size_t i = targets.zeta_records[z];
    const double rel =
        values.zeta[z] / problem.data.lambda[i].zeta - 1.0;
    result.zeta_residuals[i] = rel;
    result.worst_residual = std::max(result.worst_residual, std::abs(rel));
  }
}

// RMS of the data-entry prefix of the residuals at theta0, used as the
// ridge scale; throws if the forward solve fails at the starting point.
double initial_data_rms(const ResidualFn& bare, const std::vector<double>& theta0,
                        std::size_t data_entries) {
  Eigen::VectorXd f0;
  if (!bare(theta0, f0)) {
    throw AccuracyError(
        "reconstruct: forward solve failed at the initial iterate");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < data_entries; ++i) {
    sum += f0(static_cast<Eigen::Index>(i)) * f0(static_cast<Eigen::Index>(i));
  }
  const double rms = std::sqrt(sum / std::max<std::size_t>(data_entries, 1));
  return std::max(rms, 1e-9);
}

nlohmann::json doubles_json(const std::vector<double>& v) {
  auto arr = nlohmann::json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

}  // namespace

std::string basis_name(BasisKind kind) {
  switch (kind) {
    case BasisKind::Piecewise:
      return "piecewise";
    case BasisKind::Cosine:
      return "cosine";
    case BasisKind::Polynomial:
      return "polynomial";
  }
  return "piecewise";
}

BasisKind basis_from_name(const std::string& name) {
  if (name == "piecewise") return BasisKind::Piecewise;
  if (name == "cosine") return BasisKind::Cosine;
  if (name == "polynomial") return BasisKind::Polynomial;
  throw std::invalid_argument("basis: unknown kind '" + name + "'");
}

Potential ReconstructionProblem::materialize(
    const std::vector<double>& theta) const {
  if (static_cast<int>(theta.size()) != dimension) {
    throw std::invalid_argument("reconstruction: coefficient count " +
                                std::to_string(theta.size()) +
                                " does not match dimension " +
                                std::to_string(dimension));
  }
  const double a = data.a;
  switch (basis) {
    case BasisKind::Piecewise: {
      std::vector<double> breaks;
      std::vector<double> values = theta;
      for (int j = 1; j < dimension; ++j) {
        breaks.push_back(a * j / dimension);
      }
      if (a < 1.0) {
        breaks.push_back(a);
        breaks.insert(breaks.end(), tail_breakpoints.begin(),
                      tail_breakpoints.end());
        if (tail_values.empty()) {
          values.push_back(0.0);
        } else {
          values.insert(values.end(), tail_values.begin(), tail_values.end());
        }
      }
      Potential q = Potential::piecewise(std::move(breaks), std::move(values));
      q.set_split_point(a);
      return q;
    }
    case BasisKind::Cosine:
      return Potential::cosine_basis(theta, a, tail_breakpoints, tail_values);
    case BasisKind::Polynomial:
      return Potential::polynomial_basis(theta, a, tail_breakpoints,
                                         tail_values);
  }
  throw std::invalid_argument("reconstruction: unknown basis");
}

void ReconstructionProblem::validate() const {
  data.validate();
  if (data.lambda.empty()) {
    throw std::invalid_argument("reconstruction: dataset has no targets");
  }
  if (dimension < 1) {
    throw std::invalid_argument("reconstruction: dimension must be positive");
  }
  if (!(regularization >= 0.0) || !std::isfinite(regularization)) {
    throw std::invalid_argument(
        "reconstruction: regularization must be finite and non-negative");
  }
  if (max_iterations < 1) {
    throw std::invalid_argument(
        "reconstruction: iteration budget must be positive");
  }
  if (!initial_guess.empty() &&
      static_cast<int>(initial_guess.size()) != dimension) {
    throw std::invalid_argument(
        "reconstruction: initial guess size does not match dimension");
  }
  if (data.a >= 1.0 && (!tail_breakpoints.empty() || !tail_values.empty())) {
    throw std::invalid_argument(
        "reconstruction: a tail is only meaningful when a < 1");
  }
  materialize(std::vector<double>(dimension, 0.0));
}

std::string ReconstructionProblem::to_json() const {
  nlohmann::json j;
  j["data"] = nlohmann::json::parse(data.to_json());
  j["basis"] = basis_name(basis);
  j["dimension"] = dimension;
  if (!tail_breakpoints.empty() || !tail_values.empty()) {
    j["tail"]["breakpoints"] = doubles_json(tail_breakpoints);
    j["tail"]["values"] = doubles_json(tail_values);
  }
  j["regularization"] = regularization;
  j["max_iterations"] = max_iterations;
  j["seed"] = seed;
  if (!initial_guess.empty()) j["initial_guess"] = doubles_json(initial_guess);
  if (ground_truth) j["ground_truth"] = ground_truth->describe();
  return j.dump(2);
}

ReconstructionProblem ReconstructionProblem::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ReconstructionProblem problem;
  problem.data = MixedDataset::from_json(j.at("data").dump());
  if (j.contains("basis")) {
    problem.basis = basis_from_name(j.at("basis").get<std::string>());
  }
  if (j.contains("dimension")) problem.dimension = j.at("dimension").get<int>();
  if (j.contains("tail")) {
    problem.tail_breakpoints =
        j.at("tail").at("breakpoints").get<std::vector<double>>();
    problem.tail_values = j.at("tail").at("values").get<std::vector<double>>();
  }
  if (j.contains("regularization")) {
    problem.regularization = j.at("regularization").get<double>();
  }
  if (j.contains("max_iterations")) {
    problem.max_iterations = j.at("max_iterations").get<int>();
  }
  if (j.contains("seed")) problem.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("initial_guess")) {
    problem.initial_guess = j.at("initial_guess").get<std::vector<double>>();
  }
  if (j.contains("ground_truth")) {
    problem.ground_truth =
        Potential::parse(j.at("ground_truth").get<std::string>());
  }
  problem.validate();
  return problem;
}

std::string ReconstructionResult::to_json() const {
  nlohmann::json j;
  j["coefficients"] = doubles_json(coefficients);
  j["eigenvalue_residuals"] = doubles_json(eigenvalue_residuals);
  j["zeta_residuals"] = doubles_json(zeta_residuals);
  j["worst_residual"] = worst_residual;
  if (l2_distance_to_truth >= 0.0) {
    j["l2_distance_to_truth"] = l2_distance_to_truth;
  }
  j["trace"] = doubles_json(trace);
  j["converged"] = converged;
  j["iterations"] = iterations;
  j["status"] = status;
  if (recovered) j["potential"] = recovered->describe();
  return j.dump(2);
}

std::string ProbeResult::to_json() const {
  nlohmann::json j;
  j["found"] = found;
  j["distance"] = distance;
  j["worst_residual"] = worst_residual;
  j["coefficients"] = doubles_json(coefficients);
  if (candidate) j["potential"] = candidate->describe();
  j["starts_used"] = starts_used;
  j["status"] = status;
  return j.dump(2);
}

double l2_distance(const Potential& p1, const Potential& p2, double lo,
                   double hi) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) {
    throw std::invalid_argument("l2_distance: need 0 <= lo < hi <= 1");
  }
  std::vector<double> cuts = {lo, hi};
  for (const Potential* p : {&p1, &p2}) {
    for (double x : p->mandatory_points()) {
      if (x > lo && x < hi) cuts.push_back(x);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate(
        [&](double x) {
          const double d = p1.value_unchecked(x) - p2.value_unchecked(x);
          return d * d;
        },
        cuts[i], cuts[i + 1]);
  }
  return std::sqrt(std::max(0.0, total));
}

ReconstructionResult reconstruct(const ReconstructionProblem& problem) {
  problem.validate();
  std::vector<double> theta0 = problem.initial_guess.empty()
                                   ? std::vector<double>(problem.dimension, 0.0)
                                   : problem.initial_guess;
  const TrackedTargets targets =
      track_targets(problem, problem.materialize(theta0));

  ResidualLayout layout;
  layout.n_lambda = targets.lambda_star.size();
  layout.n_zeta = targets.zeta_records.size();
  layout.dimension = static_cast<std::size_t>(problem.dimension);
  const double ridge_scale =
      initial_data_rms(make_residual_fn(problem, targets, layout, {}, 0.0),
                       theta0, layout.n_lambda + layout.n_zeta);
  const ResidualFn eval =
      make_residual_fn(problem, targets, layout, {}, ridge_scale);
  LMState state =
      run_levenberg(eval, layout, std::move(theta0), problem.max_iterations,
                    1e-9, problem.spectrum.jobs);

  ReconstructionResult result;
  result.coefficients = state.theta;
  result.trace = std::move(state.trace);
  result.converged = state.converged;
  result.iterations = state.iterations;
  result.status = state.status;
  if (static_cast<std::size_t>(problem.dimension) >
      layout.n_lambda + layout.n_zeta) {
    result.status =
        "warning: dimension exceeds datum count; " + result.status;
  }
  const Potential recovered = problem.materialize(result.coefficients);
  result.recovered = recovered;
  fill_residual_report(problem, targets, recovered, result);
  if (problem.ground_truth) {
    result.l2_distance_to_truth =
        l2_distance(recovered, *problem.ground_truth, 0.0, problem.data.a);
  }
  return result;
}

ProbeResult nonuniqueness_probe(const ReconstructionProblem& problem,
                                double rho) {
  problem.validate();
  if (!problem.ground_truth) {
    throw std::invalid_argument(
        "nonuniqueness_probe: the ground truth potential is required");
  }
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument(
        "nonuniqueness_probe: distance floor must be finite and non-negative");
  }
  const Potential& truth = *problem.ground_truth;

  ProbeResult out;
  if (rho == 0.0) {
    const TrackedTargets targets = track_targets(problem, truth);
    ReconstructionResult report;
    fill_residual_report(problem, targets, truth, report);
    out.found = true;
    out.distance = 0.0;
    out.worst_residual = report.worst_residual;
    out.candidate = truth;
    out.status = "trivially found: the ground truth itself";
    return out;
  }

  std::mt19937_64 rng(problem.seed);
  std::uniform_real_distribution<double> draw(-1.5, 1.5);
  const int starts = 6;
  const double hinge_weight = 10.0;
  const double hinge_target = 1.05 * rho;  // cushion keeps candidates clear of rho
  double best_score = -std::numeric_limits<double>::infinity();
  out.status = "no candidate within budget";

  for (int s = 0; s < starts; ++s) {
    std::vector<double> theta0(problem.dimension);
    for (double& c : theta0) c = draw(rng);
    TrackedTargets targets;
    try {
      targets = track_targets(problem, problem.materialize(theta0));
    } catch (const std::runtime_error&) {
      continue;
    }
    ResidualLayout layout;
    layout.n_lambda = targets.lambda_star.size();
    layout.n_zeta = targets.zeta_records.size();
    layout.hinge = true;
    layout.dimension = static_cast<std::size_t>(problem.dimension);
    const double a = problem.data.a;
    const auto hinge = [&truth, hinge_weight, hinge_target, a](const Potential& q) {
      return hinge_weight *
             std::max(0.0, hinge_target - l2_distance(q, truth, 0.0, a));
    };
    LMState state;
    try {
      const double ridge_scale = initial_data_rms(
          make_residual_fn(problem, targets, layout, hinge, 0.0), theta0,
          layout.n_lambda + layout.n_zeta);
      const ResidualFn eval =
          make_residual_fn(problem, targets, layout, hinge, ridge_scale);
      // The feasibility bar is 1e-7; stopping a decade under it keeps the
      // ill-conditioned tail from burning the whole budget.
      state = run_levenberg(eval, layout, theta0, problem.max_iterations, 1e-8,
                            problem.spectrum.jobs);
    } catch (const std::runtime_error&) {
      continue;
    }
    out.starts_used = s + 1;

    const Potential candidate = problem.materialize(state.theta);
    ReconstructionResult report;
    fill_residual_report(problem, targets, candidate, report);
    const double dist = l2_distance(candidate, truth, 0.0, problem.data.a);
    const bool feasible = report.worst_residual <= 1e-7;
    // Prefer feasible candidates, then larger distance.
    const double score = (feasible ? 1e6 : 0.0) + dist - report.worst_residual;
    if (score > best_score) {
      best_score = score;
      out.distance = dist;
      out.worst_residual = report.worst_residual;
      out.coefficients = state.theta;
      out.candidate = candidate;
    }
    if (feasible && dist >= rho) {
      out.found = true;
      out.status = "found on start " + std::to_string(s + 1);
      return out;
    }
  }
  return out;
}

}  // namespace pbessel
