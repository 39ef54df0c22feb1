#include "pbessel/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pbessel/errors.hpp"
#include "pbessel/format.hpp"
#include "pbessel/parallel.hpp"

namespace pbessel {

namespace {

struct Root {
  double lambda;
  double residual;
};

double characteristic_real(double ell, const Potential& q, double lambda,
                           double beta, const SolverOptions& opt) {
  return characteristic(ell, q, {lambda, 0.0}, beta, opt).real();
}

// Safeguarded secant refinement of a sign-change bracket of the
// characteristic function.  Pushes the bracket to near machine width so the
// residual is limited by solver accuracy, not by the root finder.
Root refine_root(double ell, const Potential& q, double beta, double a,
                 double fa, double b, double fb, const SolverOptions& opt,
                 double residual_tol) {
  const double scale = std::max(std::abs(fa), std::abs(fb));
  double m = a, fm = fa;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(b - a) <= 1e-14 * std::max(1.0, std::abs(a))) break;
    double c;
    if (fb != fa) {
      c = b - fb * (b - a) / (fb - fa);
      const double lo = std::min(a, b), hi = std::max(a, b);
      const double guard = 0.01 * (hi - lo);
      if (!(c > lo + guard && c < hi - guard)) c = 0.5 * (a + b);
    } else {
      c = 0.5 * (a + b);
    }
    const double fc = characteristic_real(ell, q, c, beta, opt);
    m = c;
    fm = fc;
    if (fc == 0.0) break;
    if ((fc > 0.0) == (fa > 0.0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
      fb = fc;
    }
  }
  const double res = (scale > 0.0) ? std::abs(fm) / scale : std::abs(fm);
  if (res > residual_tol) {
    throw AccuracyError("eigenvalue refinement stalled at lambda = " + g17(m) +
                        " (relative residual " + g17(res) + ")");
  }
  return Root{m, res};
}

}  // namespace

Spectrum locate_eigenvalues(double ell, const Potential& q, double beta,
                            int count, const SpectrumOptions& opt) {
  if (count < 1) throw std::invalid_argument("locate_eigenvalues: count >= 1");
  if (!(ell >= -0.5)) throw std::domain_error("locate_eigenvalues: ell >= -1/2");

  const bool dirichlet = std::isinf(beta);
  const double offset = dirichlet ? 0.5 * ell : 0.5 * (ell - 1.0);
  auto delta = [&](double lambda) {
    return characteristic_real(ell, q, lambda, beta, opt.solver);
  };

  // Bracket harvest around the asymptotic centers.
  const double gap_z = M_PI;
  std::vector<std::optional<Root>> harvested(count);
  double z_floor = 0.02;
  double first_bracket_lo = 0.0;
  {
    const double s1 = (1.0 + offset) * M_PI;
    first_bracket_lo = std::max(z_floor, s1 - 0.4 * gap_z);
  }

  parallel_for(static_cast<std::size_t>(count), opt.jobs, [&](std::size_t i) {
    const int n = static_cast<int>(i) + 1;
    const double center = (n + offset) * M_PI;
    double w = 0.4 * gap_z;
    for (int attempt = 0; attempt <= opt.max_bracket_doublings; ++attempt) {
      const double zlo = std::max(z_floor, center - w);
      const double zhi = center + w;
      if (zhi <= zlo) break;
      const double a = zlo * zlo, b = zhi * zhi;
      const double fa = delta(a), fb = delta(b);
      if ((fa > 0.0) != (fb > 0.0)) {
        harvested[i] = refine_root(ell, q, beta, a, fa, b, fb, opt.solver,
                                   opt.residual_tol);
        return;
      }
      w *= 2.0;
    }
  });

  // Low and negative window scan.  Robin conditions with beta < 0 push the
  // lowest eigenvalue near -beta^2, so beta enters the window bound.
  std::vector<Root> roots;
  for (const auto& r : harvested) {
    if (r) roots.push_back(*r);
  }
  const double beta_pull = dirichlet ? 0.0 : std::max(0.0, -beta);
  const double neg_window =
      std::pow(1.0 + weighted_norm(q, 0.0) + beta_pull + opt.window_slack, 2.0);
  {
    const double window = neg_window;
    const double t_lo = -std::sqrt(window);
    const double t_hi = first_bracket_lo;
    const double dt = std::min(0.1, 4.9 / std::max(1.0, std::sqrt(window)));
    double t_prev = t_lo;
    auto lam_of = [](double t) { return (t < 0.0) ? -t * t : t * t; };
    double f_prev = delta(lam_of(t_prev));
    for (double t = t_lo + dt; t_prev < t_hi; t += dt) {
      t = std::min(t, t_hi);
      const double f = delta(lam_of(t));
      if ((f > 0.0) != (f_prev > 0.0)) {
        roots.push_back(refine_root(ell, q, beta, lam_of(t_prev), f_prev,
                                    lam_of(t), f, opt.solver, opt.residual_tol));
      }
      if (t >= t_hi) break;
      t_prev = t;
      f_prev = f;
    }
  }

  std::sort(roots.begin(), roots.end(),
            [](const Root& a, const Root& b) { return a.lambda < b.lambda; });
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](const Root& a, const Root& b) {
                            return std::abs(a.lambda - b.lambda) <=
                                   1e-9 * std::max(1.0, std::abs(a.lambda));
                          }),
              roots.end());

  // Index by oscillation count; patrol any gaps with a finer sign scan.
  auto index_of = [&](const Root& r) {
    return 1 + oscillation_count(ell, q, r.lambda, opt.solver);
  };
  std::vector<std::pair<int, Root>> indexed(roots.size());
  parallel_for(roots.size(), opt.jobs, [&](std::size_t i) {
    indexed[i] = {index_of(roots[i]), roots[i]};
  });

  auto patrol = [&](double lo, double hi, int segments) {
    std::vector<Root> found;
    double prev = lo;
    double f_prev = delta(prev);
    for (int s = 1; s <= segments; ++s) {
      const double cur = lo + (hi - lo) * s / segments;
      const double f = delta(cur);
      if ((f > 0.0) != (f_prev > 0.0)) {
        found.push_back(refine_root(ell, q, beta, prev, f_prev, cur, f,
                                    opt.solver, opt.residual_tol));
      }
      prev = cur;
      f_prev = f;
    }
    return found;
  };

  for (int round = 0; round < 2; ++round) {
    std::sort(indexed.begin(), indexed.end(),
              [](const auto& a, const auto& b) { return a.second.lambda < b.second.lambda; });
    std::vector<std::pair<double, double>> gaps;
    if (!indexed.empty() && indexed.front().first > 1) {
      gaps.emplace_back(-neg_window, indexed.front().second.lambda);
    }
    for (std::size_t i = 0; i + 1 < indexed.size(); ++i) {
      if (indexed[i + 1].first > indexed[i].first + 1) {
        gaps.emplace_back(indexed[i].second.lambda, indexed[i + 1].second.lambda);
      }
    }
    if (gaps.empty()) break;
    if (round == 1) {
      throw CompletenessError(
          "locate_eigenvalues: unresolved index gap near lambda = " +
              g17(gaps.front().first),
          0, 0);
    }
    for (const auto& [lo, hi] : gaps) {
      for (const Root& r : patrol(lo + 1e-7 * std::max(1.0, std::abs(lo)),
                                  hi - 1e-7 * std::max(1.0, std::abs(hi)), 128)) {
        indexed.emplace_back(index_of(r), r);
      }
    }
  }

  std::sort(indexed.begin(), indexed.end(),
            [](const auto& a, const auto& b) { return a.second.lambda < b.second.lambda; });
  indexed.erase(std::unique(indexed.begin(), indexed.end(),
                            [](const auto& a, const auto& b) {
                              return a.first == b.first;
                            }),
                indexed.end());

  if (static_cast<int>(indexed.size()) < count) {
    throw CompletenessError("locate_eigenvalues: found only " +
                                std::to_string(indexed.size()) + " of " +
                                std::to_string(count) + " eigenvalues",
                            static_cast<int>(indexed.size()) + 1, count);
  }

  Spectrum spec;
  spec.ell = ell;
  spec.beta = beta;
  spec.center_offset = offset;
  spec.potential_hash = q.hash_hex();
  for (int i = 0; i < count; ++i) {
    const auto& [idx, root] = indexed[static_cast<std::size_t>(i)];
    if (idx != i + 1) {
      throw CompletenessError(
          "locate_eigenvalues: index sequence not consecutive (" +
              std::to_string(idx) + " at position " + std::to_string(i + 1) + ")",
          i + 1, idx);
    }
    SpectralPoint pt;
    pt.lambda = root.lambda;
    pt.index = idx;
    pt.beta = beta;
    pt.residual = root.residual;
    spec.points.push_back(pt);
  }
  return spec;
}

double norming_constant(const SpectralPoint& point, double ell,
                        const Potential& q, const SolverOptions& opt) {
  const double z = zeta_integral(ell, q, point.lambda, point.beta, opt);
  if (!(z > 0.0)) {
    throw NotAnEigenvalueError("norming_constant: nonpositive integral at lambda = " +
                               g17(point.lambda));
  }
  return z;
}

double multiplier_kappa(const SpectralPoint& point, double ell,
                        const Potential& q, const SolverOptions& opt) {
  const int m = 128;
  std::vector<double> grid(m);
  for (int i = 0; i < m; ++i) grid[i] = (i + 1.0) / m;
  SolutionSample sp = phi(ell, q, {point.lambda, 0.0}, grid, opt);
  SolutionSample st = psi(ell, q, {point.lambda, 0.0}, point.beta, grid, opt);

  double best = 0.0;
  std::size_t best_i = 0;
  std::vector<double> phis(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    phis[i] = sp.value[i].real() * std::exp(sp.log_scale[i]);
    if (std::abs(phis[i]) > best) {
      best = std::abs(phis[i]);
      best_i = i;
    }
  }
  if (best == 0.0) throw NotAnEigenvalueError("multiplier_kappa: phi vanished");
  auto psi_at = [&](std::size_t i) {
    return st.value[i].real() * std::exp(st.log_scale[i]);
  };
  const double kappa = psi_at(best_i) / phis[best_i];
  if (kappa == 0.0) throw NotAnEigenvalueError("multiplier_kappa: zero ratio");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(phis[i]) < 0.2 * best) continue;
    const double r = psi_at(i) / phis[i];
    if (std::abs(r - kappa) > 1e-6 * std::abs(kappa)) {
      throw NotAnEigenvalueError(
          "multiplier_kappa: ratio not constant (lambda = " + g17(point.lambda) +
          ", spread " + g17(std::abs(r - kappa) / std::abs(kappa)) + ")");
    }
  }
  return kappa;
}

void attach_norming_data(Spectrum& spectrum, double ell, const Potential& q,
                         const SpectrumOptions& opt) {
  parallel_for(spectrum.points.size(), opt.jobs, [&](std::size_t i) {
    spectrum.points[i].zeta = norming_constant(spectrum.points[i], ell, q, opt.solver);
    spectrum.points[i].kappa = multiplier_kappa(spectrum.points[i], ell, q, opt.solver);
  });
}

std::string Spectrum::to_csv() const {
  std::ostringstream out;
  out << "# ell = " << g17(ell) << ", beta = " << g17(beta)
      << ", potential = " << potential_hash << "\n";
  out << "n,lambda,zeta,kappa,residual\n";
  for (const auto& p : points) {
    out << p.index << ',' << g17(p.lambda) << ',' << g17(p.zeta) << ','
        << g17(p.kappa) << ',' << g17(p.residual) << "\n";
  }
  return out.str();
}

std::string Spectrum::to_json() const {
  nlohmann::json j;
  j["ell"] = ell;
  if (std::isinf(beta)) {
    j["beta"] = "inf";
  } else {
    j["beta"] = beta;
  }
  j["potential_hash"] = potential_hash;
  j["center_offset"] = center_offset;
  auto points_json = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json pj;
    pj["n"] = p.index;
    pj["lambda"] = p.lambda;
    if (p.zeta != 0.0) pj["zeta"] = p.zeta;
    if (p.kappa != 0.0) pj["kappa"] = p.kappa;
    pj["residual"] = p.residual;
    points_json.push_back(pj);
  }
  j["points"] = points_json;
  return j.dump(2);
}

}  // namespace pbessel
