#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pbessel/format.hpp"
#include "pbessel/hfield.hpp"
#include "pbessel/inverse.hpp"
#include "pbessel/potential.hpp"
#include "pbessel/quadrature.hpp"
#include "pbessel/spectrum.hpp"
#include "pbessel/uniqueness.hpp"

#ifndef PBESSEL_VERSION
#define PBESSEL_VERSION "0.0.0"
#endif

namespace {

using nlohmann::json;
using namespace pbessel;

// ---------------------------------------------------------------------------
// Provenance
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Every artifact carries the command, the canonical key=value config in
// definition order, its FNV-1a hash, and the tool version.  The timestamp is
// the one field excluded from the hash so reruns with the same config produce
// byte-identical output apart from that line.
struct Provenance {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;

  void add(const std::string& key, const std::string& value) {
    config.emplace_back(key, value);
  }
  void add(const std::string& key, double value) { add(key, g17(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }

  std::string canonical() const {
    std::ostringstream out;
    out << "command=" << command << '\n';
    for (const auto& [k, v] : config) out << k << '=' << v << '\n';
    return out.str();
  }

  std::string hash() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
  }

  json to_json() const {
    json cfg = json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    json j;
    j["tool"] = "pbessel";
    j["version"] = PBESSEL_VERSION;
    j["command"] = command;
    j["config"] = cfg;
    j["config_hash"] = hash();
    j["timestamp"] = utc_timestamp();
    return j;
  }

  std::string comment_header() const {
    std::ostringstream out;
    out << "# pbessel " << PBESSEL_VERSION << ' ' << command << ' ' << hash()
        << "\n#";
    for (const auto& [k, v] : config) out << ' ' << k << '=' << v;
    out << "\n# timestamp = " << utc_timestamp() << '\n';
    return out.str();
  }
};

// ---------------------------------------------------------------------------
// Shared parsing helpers
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write: cannot open " + path);
  out << text;
  if (!out.good()) throw std::runtime_error("write: failed writing " + path);
}

std::string resolve_out(const std::string& outdir, const std::string& name) {
  std::filesystem::path p(name);
  if (p.is_absolute() || outdir.empty() || outdir == ".") return name;
  return (std::filesystem::path(outdir) / p).string();
}

// "zero", "const:<v>", or a potential file written by Potential::save.
Potential potential_from_spec(const std::string& spec) {
  if (spec == "zero") return Potential::zero();
  if (spec.rfind("const:", 0) == 0) {
    return Potential::constant(parse_double(spec.substr(6)));
  }
  if (!std::filesystem::exists(spec)) {
    throw std::invalid_argument("potential spec '" + spec +
                                "' is neither zero, const:<v>, nor a file");
  }
  return Potential::load(spec);
}

double beta_from_text(const std::string& text) {
  if (text == "inf" || text == "infinity") return kBetaInfinity;
  return parse_double(text);
}

// "lo:hi:count" with count >= 2; geometric grids require 0 < lo < hi.
std::vector<double> parse_grid(const std::string& text, bool geometric) {
  std::vector<std::string> parts;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, ':')) parts.push_back(field);
  if (parts.size() != 3) {
    throw std::invalid_argument("grid '" + text + "' is not lo:hi:count");
  }
  const double lo = parse_double(parts[0]);
  const double hi = parse_double(parts[1]);
  const int count = static_cast<int>(parse_double(parts[2]));
  if (count < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (!(hi > lo)) throw std::invalid_argument("grid needs hi > lo");
  if (geometric && !(lo > 0.0)) {
    throw std::invalid_argument("geometric grid needs lo > 0");
  }
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    const double s = static_cast<double>(i) / (count - 1);
    grid[i] = geometric ? lo * std::pow(hi / lo, s) : lo + s * (hi - lo);
  }
  return grid;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

struct SpectrumArgs {
  double ell = 0.0;
  std::vector<std::string> beta{"inf"};
  int n = 10;
  std::string q = "zero";
  double rel_tol = 1e-11;
  double residual_tol = 1e-10;
  int jobs = 1;
  bool skip_norming = false;
  std::string out = "spectrum.csv";
  std::string json_out;
};

int run_spectrum(const SpectrumArgs& args, const std::string& outdir) {
  const Potential q = potential_from_spec(args.q);

  Provenance prov;
  prov.command = "spectrum";
  prov.add("ell", args.ell);
  {
    std::string betas;
    for (const auto& b : args.beta) betas += (betas.empty() ? "" : ",") + b;
    prov.add("beta", betas);
  }
  prov.add("n", args.n);
  prov.add("q", q.hash_hex());
  prov.add("rel_tol", args.rel_tol);
  prov.add("residual_tol", args.residual_tol);
  prov.add("norming", args.skip_norming ? "off" : "on");

  SpectrumOptions opt;
  opt.solver.rel_tol = args.rel_tol;
  opt.residual_tol = args.residual_tol;
  opt.jobs = args.jobs;

  std::ostringstream csv;
  csv << prov.comment_header();
  json spectra = json::array();
  for (const auto& beta_text : args.beta) {
    Spectrum sp = locate_eigenvalues(args.ell, q, beta_from_text(beta_text),
                                     args.n, opt);
    if (!args.skip_norming) attach_norming_data(sp, args.ell, q, opt);
    csv << sp.to_csv();
    spectra.push_back(json::parse(sp.to_json()));
    std::cout << "beta=" << beta_text << ": lambda_1=" << g17(sp.points.front().lambda)
              << " lambda_" << sp.points.back().index << '='
              << g17(sp.points.back().lambda) << '\n';
  }

  const std::string out_path = resolve_out(outdir, args.out);
  write_file(out_path, csv.str());
  std::cout << "wrote " << out_path << '\n';
  if (!args.json_out.empty()) {
    json j;
    j["provenance"] = prov.to_json();
    j["spectra"] = spectra;
    const std::string path = resolve_out(outdir, args.json_out);
    write_file(path, j.dump(2) + "\n");
    std::cout << "wrote " << path << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// hscan
// ---------------------------------------------------------------------------

struct HscanArgs {
  double ell = 0.0;
  std::string q = "zero";
  std::string qhat = "zero";
  double a = 1.0;
  std::string grid = "1:400:80";
  bool derivative = false;
  double rel_tol = 1e-9;
  int jobs = 1;
  std::string out = "hscan.csv";
  std::string json_out;
};

int run_hscan(const HscanArgs& args, const std::string& outdir) {
  const Potential q = potential_from_spec(args.q);
  const Potential qhat = potential_from_spec(args.qhat);
  const std::vector<double> grid = parse_grid(args.grid, false);

  Provenance prov;
  prov.command = "hscan";
  prov.add("ell", args.ell);
  prov.add("q", q.hash_hex());
  prov.add("qhat", qhat.hash_hex());
  prov.add("a", args.a);
  prov.add("grid", args.grid);
  prov.add("derivative", args.derivative ? "on" : "off");
  prov.add("rel_tol", args.rel_tol);

  SolverOptions opt;
  opt.rel_tol = args.rel_tol;
  std::vector<std::complex<double>> lambdas(grid.begin(), grid.end());
  const HProfile prof = sample_h_profile(args.ell, q, qhat, args.a, lambdas,
                                         args.derivative, opt, args.jobs);

  std::ostringstream csv;
  csv << prov.comment_header();
  csv << "lambda,h_mantissa,h_log_scale,h,h_dot\n";
  for (const auto& s : prof.samples) {
    csv << g17(s.lambda.real()) << ',' << g17(s.h.mantissa.real()) << ','
        << g17(s.h.log_scale) << ',' << g17(s.h.real()) << ','
        << g17(s.h_dot) << '\n';
  }
  const std::string out_path = resolve_out(outdir, args.out);
  write_file(out_path, csv.str());
  std::cout << "sampled H at " << prof.samples.size() << " points\n";
  std::cout << "wrote " << out_path << '\n';
  if (!args.json_out.empty()) {
    json j;
    j["provenance"] = prov.to_json();
    j["profile"] = json::parse(prof.to_json());
    const std::string path = resolve_out(outdir, args.json_out);
    write_file(path, j.dump(2) + "\n");
    std::cout << "wrote " << path << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// uniqueness
// ---------------------------------------------------------------------------

struct UniquenessArgs {
  std::string data;
  double a = -1.0;  // < 0 means keep the dataset's value
  int k = -1;       // < 0 means keep the dataset's smoothness tag
  std::string p;
  std::string r_grid;
  int closedness_probes = 0;  // 0 disables the diagnostic
  std::string out = "uniqueness.json";
  std::string csv_out;
};

std::vector<double> default_radii(const MixedDataset& data) {
  double lambda_max = 0.0;
  for (const auto& rec : data.lambda) {
    lambda_max = std::max(lambda_max, std::abs(rec.value));
  }
  const double cap = std::sqrt(lambda_max);
  if (!(cap > 0.0)) {
    throw std::invalid_argument("uniqueness: dataset has no usable radii");
  }
  std::ostringstream spec;
  spec << g17(cap / 12.0) << ':' << g17(0.95 * cap) << ":24";
  return parse_grid(spec.str(), true);
}

int run_uniqueness(const UniquenessArgs& args, const std::string& outdir) {
  MixedDataset data = MixedDataset::from_json(read_file(args.data));
  if (args.a > 0.0) data.a = args.a;
  if (args.k >= 0) data.smoothness.k = args.k;
  if (!args.p.empty()) data.smoothness.p = parse_double(args.p);
  data.validate();

  const std::vector<double> radii =
      args.r_grid.empty() ? default_radii(data) : parse_grid(args.r_grid, true);

  Provenance prov;
  prov.command = "uniqueness";
  prov.add("data", args.data);
  prov.add("a", data.a);
  prov.add("k", data.smoothness.k);
  prov.add("p", g17(data.smoothness.p));
  prov.add("r_lo", radii.front());
  prov.add("r_hi", radii.back());
  prov.add("r_count", static_cast<int>(radii.size()));
  prov.add("closedness_probes", args.closedness_probes);

  const CountingReport report = criterion_margin(data, radii);

  json j;
  j["provenance"] = prov.to_json();
  j["counting"] = json::parse(report.to_json());
  if (args.closedness_probes > 0) {
    const auto system = build_system(data);
    const auto diag =
        closedness_diagnostic(system, data.a, args.closedness_probes);
    json cj;
    cj["sigma_min"] = diag.sigma_min;
    cj["worst_residual"] = diag.worst_residual;
    cj["worst_probe"] = diag.worst_probe;
    cj["system_size"] = diag.system_size;
    cj["label"] = diag.label;
    j["closedness"] = cj;
    std::cout << "closedness: sigma_min=" << g17(diag.sigma_min)
              << " worst_residual=" << g17(diag.worst_residual) << " ("
              << diag.system_size << " functions)\n";
  }
  const std::string out_path = resolve_out(outdir, args.out);
  write_file(out_path, j.dump(2) + "\n");
  if (!args.csv_out.empty()) {
    const std::string path = resolve_out(outdir, args.csv_out);
    write_file(path, prov.comment_header() + report.to_csv());
    std::cout << "wrote " << path << '\n';
  }
  std::cout << "wrote " << out_path << '\n';
  std::cout << "verdict: " << report.verdict << " (margin slope "
            << g17(report.tail_slope) << " per ln r, coefficient "
            << g17(report.coefficient) << ")\n";
  return report.verdict == "SATISFIED" ? 0 : 2;
}

// ---------------------------------------------------------------------------
// reconstruct / probe
// ---------------------------------------------------------------------------

struct InverseArgs {
  std::string problem;
  std::string data;
  std::string basis = "piecewise";
  int dim = 8;
  double reg = 1e-8;
  int iters = 60;
  std::uint64_t seed = 1;
  std::string truth;
  double rel_tol = 0.0;       // 0 keeps the library default
  double residual_tol = 0.0;  // 0 keeps the library default
  int jobs = 1;
  std::string out;
  std::string save_q;
  double rho = 0.1;  // probe only
};

ReconstructionProblem problem_from_args(const InverseArgs& args,
                                        Provenance& prov) {
  ReconstructionProblem problem;
  if (!args.problem.empty()) {
    problem = ReconstructionProblem::from_json(read_file(args.problem));
    prov.add("problem", args.problem);
  } else {
    if (args.data.empty()) {
      throw std::invalid_argument("either --problem or --data is required");
    }
    problem.data = MixedDataset::from_json(read_file(args.data));
    problem.basis = basis_from_name(args.basis);
    problem.dimension = args.dim;
    problem.regularization = args.reg;
    problem.max_iterations = args.iters;
    problem.seed = args.seed;
    prov.add("data", args.data);
    prov.add("basis", args.basis);
    prov.add("dimension", args.dim);
    prov.add("regularization", args.reg);
    prov.add("max_iterations", args.iters);
    prov.add("seed", std::to_string(args.seed));
  }
  if (!args.truth.empty()) {
    problem.ground_truth = potential_from_spec(args.truth);
    prov.add("truth", problem.ground_truth->hash_hex());
  }
  if (args.rel_tol > 0.0) problem.spectrum.solver.rel_tol = args.rel_tol;
  if (args.residual_tol > 0.0) problem.spectrum.residual_tol = args.residual_tol;
  problem.spectrum.jobs = args.jobs;
  prov.add("rel_tol", problem.spectrum.solver.rel_tol);
  prov.add("residual_tol", problem.spectrum.residual_tol);
  problem.validate();
  return problem;
}

int run_reconstruct(const InverseArgs& args, const std::string& outdir) {
  Provenance prov;
  prov.command = "reconstruct";
  const ReconstructionProblem problem = problem_from_args(args, prov);

  const ReconstructionResult result = reconstruct(problem);

  json j;
  j["provenance"] = prov.to_json();
  j["problem"] = json::parse(problem.to_json());
  j["result"] = json::parse(result.to_json());
  const std::string out_path =
      resolve_out(outdir, args.out.empty() ? "reconstruct.json" : args.out);
  write_file(out_path, j.dump(2) + "\n");

  std::cout << "status: " << result.status << '\n';
  std::cout << "iterations: " << result.iterations
            << ", worst residual: " << g17(result.worst_residual) << '\n';
  if (result.l2_distance_to_truth >= 0.0) {
    std::cout << "L2 distance to truth: " << g17(result.l2_distance_to_truth)
              << '\n';
  }
  if (result.recovered && !args.save_q.empty()) {
    const std::string path = resolve_out(outdir, args.save_q);
    result.recovered->save(path);
    std::cout << "wrote " << path << '\n';
  }
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

int run_probe(const InverseArgs& args, const std::string& outdir) {
  Provenance prov;
  prov.command = "probe";
  prov.add("rho", args.rho);
  const ReconstructionProblem problem = problem_from_args(args, prov);
  if (!problem.ground_truth) {
    throw std::invalid_argument("probe: --truth (or a problem file with a "
                                "ground truth) is required");
  }

  const ProbeResult result = nonuniqueness_probe(problem, args.rho);

  json j;
  j["provenance"] = prov.to_json();
  j["result"] = json::parse(result.to_json());
  const std::string out_path =
      resolve_out(outdir, args.out.empty() ? "probe.json" : args.out);
  write_file(out_path, j.dump(2) + "\n");

  if (result.found) {
    std::cout << "FOUND: candidate at L2 distance " << g17(result.distance)
              << " with worst residual " << g17(result.worst_residual) << '\n';
  } else {
    std::cout << "NOT FOUND: best candidate at L2 distance "
              << g17(result.distance) << " with worst residual "
              << g17(result.worst_residual) << '\n';
  }
  std::cout << "status: " << result.status << '\n';
  if (result.candidate && !args.save_q.empty()) {
    const std::string path = resolve_out(outdir, args.save_q);
    result.candidate->save(path);
    std::cout << "wrote " << path << '\n';
  }
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string identity;
  double ell = 0.0;
  std::string q = "zero";
  std::string qhat = "zero";
  std::string beta = "inf";
  int n = 6;
  double a = 0.5;
  double tol = -1.0;  // < 0 selects the per-identity default
  int jobs = 1;
  std::string out;
};

struct VerifyRow {
  std::string label;
  double residual = 0.0;
};

// d/dlambda of the characteristic function against -tau*kappa at each of the
// first n eigenvalues.
double verify_eigenvalue_derivative(const VerifyArgs& args,
                                    std::vector<VerifyRow>& rows) {
  const Potential q = potential_from_spec(args.q);
  const double beta = beta_from_text(args.beta);
  SpectrumOptions opt;
  opt.jobs = args.jobs;
  const Spectrum sp = locate_eigenvalues(args.ell, q, beta, args.n, opt);
  double worst = 0.0;
  for (const auto& pt : sp.points) {
    const double kappa = multiplier_kappa(pt, args.ell, q, opt.solver);
    const double tau = tau_integral(args.ell, q, pt.lambda, opt.solver);
    const double dot =
        characteristic_derivative(args.ell, q, pt.lambda, beta, opt.solver);
    const double denom = std::max(std::abs(dot), std::abs(tau * kappa));
    const double rel = denom == 0.0 ? 0.0 : std::abs(dot + tau * kappa) / denom;
    rows.push_back({"n=" + std::to_string(pt.index) +
                        " lambda=" + g17(pt.lambda),
                    rel});
    worst = std::max(worst, rel);
  }
  return worst;
}

// Complex-step derivative of H against the central-difference route on a
// fixed off-eigenvalue grid.
double verify_h_derivative(const VerifyArgs& args, std::vector<VerifyRow>& rows) {
  const Potential q = potential_from_spec(args.q);
  const Potential qhat = potential_from_spec(args.qhat);
  const std::vector<double> grid = {7.3, 19.1, 42.7, 88.9, 151.3};
  double worst = 0.0;
  for (double lambda : grid) {
    const double cs = h_derivative(args.ell, q, qhat, lambda);
    const double fd = h_derivative_fd(args.ell, q, qhat, lambda);
    const double denom = std::max(std::abs(cs), std::abs(fd));
    const double rel = denom == 0.0 ? 0.0 : std::abs(cs - fd) / denom;
    rows.push_back({"lambda=" + g17(lambda), rel});
    worst = std::max(worst, rel);
  }
  return worst;
}

// Extrapolated limit of lambda^(ell+1) H against half the integral of q-qhat
// over (0, a); the residual is scaled by max(1, |target|).
double verify_mean_perturbation(const VerifyArgs& args,
                                std::vector<VerifyRow>& rows) {
  const Potential q = potential_from_spec(args.q);
  const Potential qhat = potential_from_spec(args.qhat);
  const int ell = static_cast<int>(args.ell);
  if (ell != args.ell || ell < 0) {
    throw std::invalid_argument("meanshift: ell must be a nonnegative integer");
  }
  const std::vector<double> grid = parse_grid("1e6:1.6e7:48", true);
  const MeanPerturbationResult limit =
      mean_perturbation_limit(ell, q, qhat, grid, {}, args.jobs);
  const double target =
      0.5 * integrate([&](double x) { return q(x) - qhat(x); }, 0.0, args.a);
  const double rel =
      std::abs(limit.value - target) / std::max(1.0, std::abs(target));
  rows.push_back({"limit=" + g17(limit.value) + " target=" + g17(target) +
                      (limit.converged ? "" : " (extrapolation not settled)"),
                  rel});
  return rel;
}

int run_verify(const VerifyArgs& args, const std::string& outdir) {
  Provenance prov;
  prov.command = "verify";
  prov.add("identity", args.identity);
  prov.add("ell", args.ell);
  prov.add("q", args.q);
  prov.add("qhat", args.qhat);
  prov.add("beta", args.beta);
  prov.add("n", args.n);
  prov.add("a", args.a);

  std::vector<VerifyRow> rows;
  double worst = 0.0;
  double tol = args.tol;
  if (args.identity == "lemma2.2") {
    if (tol < 0.0) tol = 1e-6;
    worst = verify_eigenvalue_derivative(args, rows);
  } else if (args.identity == "hderivative") {
    if (tol < 0.0) tol = 1e-6;
    worst = verify_h_derivative(args, rows);
  } else if (args.identity == "meanshift") {
    if (tol < 0.0) tol = 1e-4;
    worst = verify_mean_perturbation(args, rows);
  } else {
    throw std::invalid_argument(
        "verify: unknown identity '" + args.identity +
        "' (known: lemma2.2, hderivative, meanshift)");
  }
  prov.add("tol", tol);

  for (const auto& row : rows) {
    std::cout << row.label << "  residual " << g17(row.residual) << '\n';
  }
  const bool pass = worst <= tol;
  std::cout << "max relative residual: " << g17(worst) << " (tolerance "
            << g17(tol) << ") -> " << (pass ? "PASS" : "FAIL") << '\n';

  if (!args.out.empty()) {
    json rows_json = json::array();
    for (const auto& row : rows) {
      rows_json.push_back({{"label", row.label}, {"residual", row.residual}});
    }
    json j;
    j["provenance"] = prov.to_json();
    j["rows"] = rows_json;
    j["max_residual"] = worst;
    j["tolerance"] = tol;
    j["pass"] = pass;
    const std::string path = resolve_out(outdir, args.out);
    write_file(path, j.dump(2) + "\n");
    std::cout << "wrote " << path << '\n';
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward and inverse spectral toolkit for the perturbed Bessel "
               "operator -f'' + l(l+1)/x^2 f + q f on (0,1)"};
  app.set_version_flag("--version", PBESSEL_VERSION);
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);

  std::string outdir = ".";
  app.add_option("--outdir", outdir, "Directory for output artifacts")
      ->envname("PBESSEL_OUTDIR");

  SpectrumArgs spectrum_args;
  CLI::App* spectrum_cmd = app.add_subcommand(
      "spectrum", "Locate eigenvalues and norming constants");
  spectrum_cmd->add_option("--ell", spectrum_args.ell, "Angular parameter (>= -1/2)")
      ->required();
  spectrum_cmd->add_option("--beta", spectrum_args.beta,
                           "Boundary parameter(s): inf or a number");
  spectrum_cmd->add_option("--n", spectrum_args.n, "Number of eigenvalues")
      ->check(CLI::PositiveNumber);
  spectrum_cmd->add_option("--q", spectrum_args.q,
                           "Potential: zero, const:<v>, or a file");
  spectrum_cmd->add_option("--rel-tol", spectrum_args.rel_tol,
                           "Solver relative tolerance");
  spectrum_cmd->add_option("--residual-tol", spectrum_args.residual_tol,
                           "Root residual tolerance");
  spectrum_cmd->add_option("--jobs", spectrum_args.jobs, "Worker thread cap")
      ->check(CLI::PositiveNumber);
  spectrum_cmd->add_flag("--skip-norming", spectrum_args.skip_norming,
                         "Skip zeta and kappa computation");
  spectrum_cmd->add_option("--out", spectrum_args.out, "CSV output path");
  spectrum_cmd->add_option("--json", spectrum_args.json_out,
                           "Optional JSON output path");

  HscanArgs hscan_args;
  CLI::App* hscan_cmd = app.add_subcommand(
      "hscan", "Sample the two-potential function H along a real grid");
  hscan_cmd->add_option("--ell", hscan_args.ell, "Angular parameter")->required();
  hscan_cmd->add_option("--q", hscan_args.q, "First potential");
  hscan_cmd->add_option("--qhat", hscan_args.qhat, "Second potential");
  hscan_cmd->add_option("--a", hscan_args.a, "Split point recorded in the profile")
      ->check(CLI::Range(0.0, 1.0));
  hscan_cmd->add_option("--grid", hscan_args.grid, "Real lambda grid lo:hi:count");
  hscan_cmd->add_flag("--derivative", hscan_args.derivative,
                      "Also compute dH/dlambda");
  hscan_cmd->add_option("--rel-tol", hscan_args.rel_tol,
                        "Solver relative tolerance");
  hscan_cmd->add_option("--jobs", hscan_args.jobs, "Worker thread cap")
      ->check(CLI::PositiveNumber);
  hscan_cmd->add_option("--out", hscan_args.out, "CSV output path");
  hscan_cmd->add_option("--json", hscan_args.json_out,
                        "Optional JSON output path");

  UniquenessArgs uniq_args;
  CLI::App* uniq_cmd = app.add_subcommand(
      "uniqueness", "Counting-integral uniqueness criterion for mixed data");
  uniq_cmd->add_option("--data", uniq_args.data, "Mixed dataset JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  uniq_cmd->add_option("--a", uniq_args.a,
                       "Override the dataset's split point");
  uniq_cmd->add_option("--k", uniq_args.k,
                       "Override the smoothness index k");
  uniq_cmd->add_option("--p", uniq_args.p,
                       "Override the integrability exponent p (number or inf)");
  uniq_cmd->add_option("--r-grid", uniq_args.r_grid,
                       "Geometric radius grid lo:hi:count");
  uniq_cmd->add_option("--closedness-probes", uniq_args.closedness_probes,
                       "Run the closedness diagnostic with this many probes");
  uniq_cmd->add_option("--out", uniq_args.out, "JSON output path");
  uniq_cmd->add_option("--csv", uniq_args.csv_out,
                       "Optional margin-table CSV path");

  InverseArgs rec_args;
  CLI::App* rec_cmd = app.add_subcommand(
      "reconstruct", "Least-squares potential recovery from mixed data");
  rec_cmd->add_option("--problem", rec_args.problem,
                      "Full reconstruction problem JSON file")
      ->check(CLI::ExistingFile);
  rec_cmd->add_option("--data", rec_args.data, "Mixed dataset JSON file")
      ->check(CLI::ExistingFile);
  rec_cmd->add_option("--basis", rec_args.basis,
                      "Coefficient basis: piecewise, cosine, or polynomial");
  rec_cmd->add_option("--dim", rec_args.dim, "Number of coefficients")
      ->check(CLI::PositiveNumber);
  rec_cmd->add_option("--reg", rec_args.reg, "Ridge regularization weight");
  rec_cmd->add_option("--iters", rec_args.iters, "Iteration budget")
      ->check(CLI::PositiveNumber);
  rec_cmd->add_option("--seed", rec_args.seed, "Seed for randomized starts");
  rec_cmd->add_option("--truth", rec_args.truth,
                      "Ground-truth potential for error reporting");
  rec_cmd->add_option("--rel-tol", rec_args.rel_tol,
                      "Solver relative tolerance override");
  rec_cmd->add_option("--residual-tol", rec_args.residual_tol,
                      "Root residual tolerance override");
  rec_cmd->add_option("--jobs", rec_args.jobs, "Worker thread cap")
      ->check(CLI::PositiveNumber);
  rec_cmd->add_option("--out", rec_args.out, "JSON output path");
  rec_cmd->add_option("--save-q", rec_args.save_q,
                      "Write the recovered potential to this file");

  InverseArgs probe_args;
  CLI::App* probe_cmd = app.add_subcommand(
      "probe", "Search for a distinct potential fitting the same data");
  probe_cmd->add_option("--problem", probe_args.problem,
                        "Full reconstruction problem JSON file")
      ->check(CLI::ExistingFile);
  probe_cmd->add_option("--data", probe_args.data, "Mixed dataset JSON file")
      ->check(CLI::ExistingFile);
  probe_cmd->add_option("--basis", probe_args.basis,
                        "Coefficient basis: piecewise, cosine, or polynomial");
  probe_cmd->add_option("--dim", probe_args.dim, "Number of coefficients")
      ->check(CLI::PositiveNumber);
  probe_cmd->add_option("--reg", probe_args.reg, "Ridge regularization weight");
  probe_cmd->add_option("--iters", probe_args.iters,
                        "Iteration budget per start")
      ->check(CLI::PositiveNumber);
  probe_cmd->add_option("--seed", probe_args.seed, "Seed for randomized starts");
  probe_cmd->add_option("--truth", probe_args.truth,
                        "Potential the candidate must stay away from")
      ->required();
  probe_cmd->add_option("--rho", probe_args.rho,
                        "Required L2 distance from the truth")
      ->required()
      ->check(CLI::NonNegativeNumber);
  probe_cmd->add_option("--rel-tol", probe_args.rel_tol,
                        "Solver relative tolerance override");
  probe_cmd->add_option("--residual-tol", probe_args.residual_tol,
                        "Root residual tolerance override");
  probe_cmd->add_option("--jobs", probe_args.jobs, "Worker thread cap")
      ->check(CLI::PositiveNumber);
  probe_cmd->add_option("--out", probe_args.out, "JSON output path");
  probe_cmd->add_option("--save-q", probe_args.save_q,
                        "Write the found candidate to this file");

  VerifyArgs verify_args;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "Numerical identity checks (lemma2.2, hderivative, meanshift)");
  verify_cmd->add_option("identity", verify_args.identity, "Identity name")
      ->required();
  verify_cmd->add_option("--ell", verify_args.ell, "Angular parameter");
  verify_cmd->add_option("--q", verify_args.q, "Potential");
  verify_cmd->add_option("--qhat", verify_args.qhat, "Second potential");
  verify_cmd->add_option("--beta", verify_args.beta,
                         "Boundary parameter: inf or a number");
  verify_cmd->add_option("--n", verify_args.n, "Number of eigenvalues")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--a", verify_args.a, "Split point for meanshift")
      ->check(CLI::Range(0.0, 1.0));
  verify_cmd->add_option("--tol", verify_args.tol, "Pass tolerance override");
  verify_cmd->add_option("--jobs", verify_args.jobs, "Worker thread cap")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--out", verify_args.out, "Optional JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (spectrum_cmd->parsed()) return run_spectrum(spectrum_args, outdir);
    if (hscan_cmd->parsed()) return run_hscan(hscan_args, outdir);
    if (uniq_cmd->parsed()) return run_uniqueness(uniq_args, outdir);
    if (rec_cmd->parsed()) return run_reconstruct(rec_args, outdir);
    if (probe_cmd->parsed()) return run_probe(probe_args, outdir);
    if (verify_cmd->parsed()) return run_verify(verify_args, outdir);
  } catch (const std::exception& e) {
    std::cerr << "pbessel: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
