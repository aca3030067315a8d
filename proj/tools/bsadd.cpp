// Copyright 2026 The bsadd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bsadd/bsadd.hpp"

namespace {

using bsadd::Json;

constexpr int kExitIdentityFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

void emit_error(const std::string &code, const std::string &message,
                std::optional<double> last_eta = std::nullopt) {
  Json err;
  err["error"] = code;
  err["message"] = message;
  if (last_eta) err["last_eta"] = *last_eta;
  std::cerr << bsadd::dump_json_17(err) << "\n";
}

int classify_error(const bsadd::Error &e) {
  const std::string &code = e.code();
  if (code == "negative_mass" || code == "mass_deficit" || code == "domain_error" ||
      code == "zero_mean") {
    return kExitValidation;
  }
  return kExitNumerical;
}

int default_precision_bits() {
  if (const char *env = std::getenv("BSADD_PRECISION_BITS")) {
    const int bits = std::atoi(env);
    if (bits >= 53) return bits;
  }
  return bsadd::kDefaultPrecisionBits;
}

void write_output(const std::string &path, const std::string &content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bsadd::DomainError("cannot write output file: " + path);
  out << content;
}

struct LoadedPmf {
  bsadd::Pmf pmf;
  std::string path;
  std::string digest;
};

LoadedPmf load_input(const std::string &path) {
  return LoadedPmf{bsadd::load_pmf(path), path, bsadd::file_digest(path)};
}

std::vector<double> parse_eta_grid(const std::string &text) {
  double start = 0.0, step = 0.0;
  long count = 0;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%ld%c", &start, &step, &count, &extra) != 3 ||
      count < 1) {
    throw bsadd::DomainError("eta grid must be start:step:count, e.g. 1.0:-0.05:11");
  }
  std::vector<double> grid(count);
  for (long i = 0; i < count; ++i) grid[i] = start + step * static_cast<double>(i);
  return grid;
}

// ---------------------------------------------------------------------------
// convolve

int cmd_convolve(const std::string &x_path, const std::string &y_path, double eta,
                 const std::string &backend, int m_max, int precision_bits,
                 const std::string &out_path) {
  const LoadedPmf x = load_input(x_path);
  const LoadedPmf y = load_input(y_path);
  bsadd::BeamsplitConfig cfg;
  cfg.backend = backend == "exact" ? bsadd::BeamsplitBackend::kExactMoments
                                   : bsadd::BeamsplitBackend::kQuadrature;
  cfg.m_max = m_max;
  cfg.precision_bits = precision_bits;
  const bsadd::Pmf z = bsadd::beamsplit_add(x.pmf, y.pmf, bsadd::Eta(eta), cfg);
  write_output(out_path, bsadd::dump_json_17(bsadd::pmf_to_json(z)) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// evolve

int cmd_evolve(const std::string &x_path, double lambda_y, const std::string &grid_text,
               double tau_step, const std::string &out_path) {
  const LoadedPmf x = load_input(x_path);
  bsadd::EvolveConfig cfg;
  cfg.eta_grid = parse_eta_grid(grid_text);
  cfg.tau_step = tau_step;
  const auto trajectory = bsadd::evolve_heat(x.pmf, lambda_y, cfg);
  std::ostringstream out;
  bsadd::write_trajectory_csv(out, trajectory);
  write_output(out_path, out.str());
  return 0;
}

// ---------------------------------------------------------------------------
// density

int cmd_density(const std::string &x_path, double u_max, int points,
                const std::string &out_path) {
  const LoadedPmf x = load_input(x_path);
  const bsadd::RadialDensity f = bsadd::radial_density(x.pmf);
  if (u_max <= 0.0) {
    u_max = bsadd::detail::integration_upper_limit(x.pmf, x.pmf, 1e-13);
  }
  if (points < 2) throw bsadd::DomainError("density needs at least 2 points");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = u_max * static_cast<double>(i) / (points - 1);
  }
  std::ostringstream out;
  bsadd::write_density_csv(out, f, grid);
  write_output(out_path, out.str());
  return 0;
}

// ---------------------------------------------------------------------------
// check

struct CheckContext {
  Json checks = Json::array();
  bool all_identities_pass = true;

  Json &add(const std::string &name, const std::string &kind) {
    checks.push_back(Json{{"name", name}, {"kind", kind}});
    return checks.back();
  }

  void finish(Json &entry, bool pass) {
    entry["pass"] = pass;
    if (entry["kind"] == "identity" && !pass) all_identities_pass = false;
  }
};

// Largest coefficient ratio of the stored moment sequence; the ordinary
// series samples are scaled inside its convergence region.
double max_moment_ratio(const bsadd::BinomialMomentSeq &b) {
  double worst = 0.0;
  for (std::size_t m = 0; m + 1 < b.size(); ++m) {
    if (b[m] > 1e-30) worst = std::max(worst, b[m + 1] / b[m]);
  }
  return worst;
}

int cmd_check(const std::string &command_echo, const std::string &x_path,
              const std::string &y_path, double eta_value, double lambda_y, double h,
              int precision_bits, const std::string &report_path, bool timings) {
  const auto start_time = std::chrono::steady_clock::now();
  const LoadedPmf x = load_input(x_path);
  std::optional<LoadedPmf> y_loaded;
  if (!y_path.empty()) y_loaded = load_input(y_path);
  const bsadd::Pmf y = y_loaded ? y_loaded->pmf
                                : bsadd::geometric_pmf({lambda_y, 1e-14});
  const bsadd::Eta eta(eta_value);

  Json report;
  report["command"] = command_echo;
  Json inputs;
  inputs["x"] = Json{{"path", x.path}, {"digest", x.digest}};
  if (y_loaded) {
    inputs["y"] = Json{{"path", y_loaded->path}, {"digest", y_loaded->digest}};
  } else {
    inputs["y"] = Json{{"family", "geometric"}, {"mean", lambda_y}};
  }
  report["inputs"] = inputs;
  report["config"] = Json{{"eta", eta_value},
                          {"lambda_y", lambda_y},
                          {"h", h},
                          {"precision_bits", precision_bits}};

  CheckContext ctx;
  const std::vector<std::pair<std::string, const bsadd::Pmf *>> sides = {
      {"x", &x.pmf}, {"y", &y}};

  // Exponential-side relation H~(t) = e^{-t} phi~(t).
  {
    Json &entry = ctx.add("htilde_phitilde_relation", "identity");
    double worst = 0.0;
    for (const auto &[label, p] : sides) {
      for (double t : {-0.1, -1.0, -5.0}) {
        const double lhs = bsadd::eval_H_tilde(*p, t);
        const double rhs =
            std::exp(-t) * bsadd::eval_phi_tilde_exact(*p, t, precision_bits);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    entry["residual"] = worst;
    entry["tolerance"] = 1e-10;
    ctx.finish(entry, worst <= 1e-10);
  }

  // Ordinary-side relation H(t) = phi(t/(1+t)) / (1+t), sampled inside the
  // series' convergence region.
  {
    Json &entry = ctx.add("ordinary_relation", "identity");
    double worst = 0.0;
    Json samples = Json::array();
    for (const auto &[label, p] : sides) {
      const auto b = bsadd::binomial_moments(*p);
      const double ratio = max_moment_ratio(b);
      const double scale = std::min(1.0, 0.9 / std::max(0.4 * ratio, 1e-30));
      for (double base : {-0.4, -0.25, -0.1}) {
        const double t = base * scale;
        const double lhs = bsadd::eval_H(b, t);
        const double rhs =
            bsadd::eval_phi_exact(*p, t / (1.0 + t), precision_bits) / (1.0 + t);
        worst = std::max(worst, std::abs(lhs - rhs));
        if (label == "x") samples.push_back(t);
      }
    }
    entry["t_samples_x"] = samples;
    entry["residual"] = worst;
    entry["tolerance"] = 1e-9;
    ctx.finish(entry, worst <= 1e-9);
  }

  // Second moment of the continuous counterpart: d[1] = 1 + mean.
  {
    Json &entry = ctx.add("second_moment", "identity");
    double worst = 0.0;
    for (const auto &[label, p] : sides) {
      const auto d = bsadd::continuous_moments(bsadd::binomial_moments(*p, 1));
      worst = std::max(worst, std::abs(d[1] - 1.0 - bsadd::mean(*p)));
    }
    entry["residual"] = worst;
    entry["tolerance"] = 1e-10;
    ctx.finish(entry, worst <= 1e-10);
  }

  // Transform round trip through the quadrature inversion.
  {
    Json &entry = ctx.add("lemma1_roundtrip", "identity");
    double worst = 0.0;
    for (const auto &[label, p] : sides) {
      const bsadd::Pmf &pmf = *p;
      const int support = static_cast<int>(pmf.support_bound());
      const auto &rule =
          bsadd::cached_gauss_laguerre_rule(support + support / 2 + 2);
      const bsadd::Pmf back = bsadd::laguerre_invert(
          [&pmf](double t) { return bsadd::eval_H_tilde(pmf, t); }, support, rule);
      worst = std::max(worst, bsadd::total_variation(pmf, back));
    }
    entry["residual"] = worst;
    entry["tolerance"] = 1e-10;
    ctx.finish(entry, worst <= 1e-10);
  }

  const bsadd::Pmf z = bsadd::beamsplit_add(x.pmf, y, eta);

  // Mean linearity of the combination.
  {
    Json &entry = ctx.add("mean_linearity", "identity");
    const double residual = std::abs(
        bsadd::mean(z) - eta_value * bsadd::mean(x.pmf) -
        (1.0 - eta_value) * bsadd::mean(y));
    entry["residual"] = residual;
    entry["tolerance"] = 1e-10;
    ctx.finish(entry, residual <= 1e-10);
  }

  // Quadrature vs extended-precision moment inversion.
  {
    Json &entry = ctx.add("backend_agreement", "identity");
    bsadd::BeamsplitConfig exact;
    exact.backend = bsadd::BeamsplitBackend::kExactMoments;
    exact.precision_bits = precision_bits;
    const bsadd::Pmf z_exact = bsadd::beamsplit_add(x.pmf, y, eta, exact);
    const double residual = bsadd::total_variation(z, z_exact);
    entry["residual"] = residual;
    entry["tolerance"] = 1e-9;
    ctx.finish(entry, residual <= 1e-9);
  }

  // Heat equation: operator vs central difference of the channel in eta.
  {
    Json &entry = ctx.add("heat_equation", "identity");
    if (eta_value - h > 0.0 && eta_value + h <= 1.0) {
      const bsadd::Pmf y_geom = bsadd::geometric_pmf({lambda_y, 1e-14});
      const bsadd::Pmf z_geom = bsadd::beamsplit_add(x.pmf, y_geom, eta);
      const bsadd::SignedSeq rhs = bsadd::heat_rhs(z_geom, eta, lambda_y);
      const bsadd::Pmf hi = bsadd::beamsplit_add(x.pmf, y_geom, bsadd::Eta(eta_value + h));
      const bsadd::Pmf lo = bsadd::beamsplit_add(x.pmf, y_geom, bsadd::Eta(eta_value - h));
      double worst = 0.0;
      const std::size_t len = std::max(hi.size(), lo.size()) + 1;
      for (std::size_t n = 0; n < len; ++n) {
        const double diff = (hi[n] - lo[n]) / (2.0 * h);
        const double r = n < rhs.values.size() ? rhs.values[n] : 0.0;
        worst = std::max(worst, std::abs(diff - r));
      }
      entry["residual"] = worst;
      entry["tolerance"] = 1e-6;
      entry["applicable"] = true;
      ctx.finish(entry, worst <= 1e-6);
    } else {
      entry["applicable"] = false;
      entry["note"] = "needs [eta-h, eta+h] within (0, 1]";
      ctx.finish(entry, true);
    }
  }

  // De Bruijn identity along the geometric flow from X.
  {
    Json &entry = ctx.add("debruijn", "identity");
    double rhs_at_input = std::numeric_limits<double>::quiet_NaN();
    try {
      rhs_at_input = bsadd::debruijn_rhs(x.pmf, eta, lambda_y);
    } catch (const bsadd::ZeroMeanError &) {
      // point mass at zero has no tilted pair; leave as NaN
    }
    entry["rhs_at_input"] = rhs_at_input;

    bool pass = true;
    if (eta_value - h > 0.0 && eta_value + h <= 1.0) {
      const bsadd::Pmf y_geom = bsadd::geometric_pmf({lambda_y, 1e-14});
      const bsadd::Pmf z_geom = bsadd::beamsplit_add(x.pmf, y_geom, eta);
      double rhs = std::numeric_limits<double>::infinity();
      try {
        rhs = bsadd::debruijn_rhs(z_geom, eta, lambda_y);
      } catch (const bsadd::ZeroMeanError &) {
        rhs = 0.0;
      }
      const double lhs = bsadd::debruijn_lhs_numeric(x.pmf, lambda_y, eta, h);
      entry["lhs_numeric"] = lhs;
      entry["rhs_at_state"] = rhs;
      entry["tolerance_relative"] = 1e-5;
      if (std::isinf(rhs)) {
        entry["note"] = "infinite rhs holds trivially";
      } else {
        const double residual = std::abs(lhs - rhs);
        entry["residual"] = residual;
        pass = residual <= std::max(1e-5 * std::abs(rhs), 1e-6);
      }
    } else {
      entry["applicable"] = false;
    }
    ctx.finish(entry, pass);
  }

  // Both log-Sobolev bounds at X.
  {
    Json &entropic = ctx.add("log_sobolev_entropic", "identity");
    Json &quadratic = ctx.add("log_sobolev_quadratic", "identity");
    try {
      const bsadd::LogSobolevReport ls = bsadd::check_log_sobolev(x.pmf);
      entropic["lhs"] = ls.lhs;
      entropic["rhs"] = ls.rhs_entropic;
      entropic["tolerance"] = ls.tolerance;
      ctx.finish(entropic, ls.entropic_holds);
      quadratic["lhs"] = ls.lhs;
      quadratic["rhs"] = ls.rhs_quadratic;
      quadratic["tolerance"] = ls.tolerance;
      ctx.finish(quadratic, ls.quadratic_holds);
    } catch (const bsadd::ZeroMeanError &) {
      entropic["applicable"] = false;
      quadratic["applicable"] = false;
      ctx.finish(entropic, true);
      ctx.finish(quadratic, true);
    }
  }

  // Relative entropy contracts under the continuous embedding.
  {
    Json &entry = ctx.add("log_sum", "identity");
    const bsadd::LogSumReport ls = bsadd::check_log_sum(x.pmf, y);
    entry["continuous_divergence"] = ls.continuous_divergence;
    entry["discrete_divergence"] = ls.discrete_divergence;
    entry["tolerance"] = ls.tolerance;
    ctx.finish(entry, ls.holds);
  }

  // Geometric closure, when both inputs are analytic geometrics.
  if (x.pmf.geometric_origin() && y.geometric_origin()) {
    Json &entry = ctx.add("geometric_closure", "identity");
    const double lz = eta_value * x.pmf.geometric_origin()->mean +
                      (1.0 - eta_value) * y.geometric_origin()->mean;
    const double eps = std::min(x.pmf.geometric_origin()->truncation_epsilon,
                                y.geometric_origin()->truncation_epsilon);
    const double residual =
        bsadd::total_variation(z, bsadd::geometric_pmf({lz, eps}));
    const double tol =
        std::max(1e-10, 50.0 * (x.pmf.tail_tolerance() + y.tail_tolerance()));
    entry["residual"] = residual;
    entry["tolerance"] = tol;
    ctx.finish(entry, residual <= tol);
  }

  // Entropy concavity: reported, never fails the exit code.
  {
    Json &entry = ctx.add("entropy_concavity", "empirical");
    const double gap = bsadd::entropy(z) - eta_value * bsadd::entropy(x.pmf) -
                       (1.0 - eta_value) * bsadd::entropy(y);
    entry["gap"] = gap;
    entry["tolerance"] = 1e-9;
    ctx.finish(entry, gap >= -1e-9);
  }

  report["checks"] = ctx.checks;
  report["all_identities_pass"] = ctx.all_identities_pass;
  if (timings) {
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start_time;
    report["wall_time_seconds"] = elapsed.count();
  }
  write_output(report_path, bsadd::dump_json_17(report) + "\n");
  return ctx.all_identities_pass ? 0 : kExitIdentityFailure;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"beamsplitter addition of distributions on the non-negative integers"};
  app.require_subcommand(1);
  int precision_bits = default_precision_bits();

  std::string x_path, y_path, out_path, backend = "quadrature";
  double eta = 0.5;
  int m_max = -1;

  CLI::App *convolve = app.add_subcommand("convolve", "compute Z = X (+)_eta Y");
  convolve->add_option("--x", x_path, "input pmf JSON for X")->required();
  convolve->add_option("--y", y_path, "input pmf JSON for Y")->required();
  convolve->add_option("--eta", eta, "transmissivity in [0, 1]")->required();
  convolve->add_option("--backend", backend, "quadrature | exact")
      ->check(CLI::IsMember({"quadrature", "exact"}))
      ->capture_default_str();
  convolve->add_option("--mmax", m_max, "highest output state (default N_X + N_Y)");
  convolve->add_option("--precision-bits", precision_bits,
                       "working precision of the exact backend (>= 53)")
      ->capture_default_str();
  convolve->add_option("--out", out_path, "output path (default stdout)");

  std::string grid_text;
  double lambda_y = 1.0, tau_step = 1e-3;
  CLI::App *evolve = app.add_subcommand(
      "evolve", "integrate the heat flow Z_eta = X (+)_eta Geom(lambda_y)");
  evolve->add_option("--x", x_path, "input pmf JSON for X")->required();
  evolve->add_option("--lambda-y", lambda_y, "geometric mean of the environment")
      ->capture_default_str();
  evolve->add_option("--eta-grid", grid_text, "output grid start:step:count")
      ->required();
  evolve->add_option("--tau-step", tau_step, "integrator step in tau = -log eta")
      ->capture_default_str();
  evolve->add_option("--out", out_path, "output CSV path (default stdout)");

  std::string report_path;
  double fd_step = 1e-4;
  bool timings = false;
  CLI::App *check = app.add_subcommand("check", "run the identity suite");
  check->add_option("--x", x_path, "input pmf JSON for X")->required();
  check->add_option("--y", y_path, "input pmf JSON for Y (default Geom(lambda-y))");
  check->add_option("--eta", eta, "transmissivity")->capture_default_str();
  check->add_option("--lambda-y", lambda_y, "geometric environment mean")
      ->capture_default_str();
  check->add_option("--fd-step", fd_step, "finite-difference step")
      ->capture_default_str();
  check->add_option("--precision-bits", precision_bits,
                    "working precision for the moment pipelines (>= 53)")
      ->capture_default_str();
  check->add_option("--report", report_path, "report JSON path (default stdout)");
  check->add_flag("--timings", timings, "include wall time in the report");

  double u_max = 0.0;
  int points = 201;
  CLI::App *density = app.add_subcommand(
      "density", "sample the radial density of the continuous counterpart");
  density->add_option("--x", x_path, "input pmf JSON")->required();
  density->add_option("--u-max", u_max, "window end (default: tail-mass bound)");
  density->add_option("--points", points, "sample count")->capture_default_str();
  density->add_option("--out", out_path, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    emit_error("validation", e.what());
    return kExitValidation;
  }

  try {
    if (*convolve) {
      return cmd_convolve(x_path, y_path, eta, backend, m_max, precision_bits,
                          out_path);
    }
    if (*evolve) {
      return cmd_evolve(x_path, lambda_y, grid_text, tau_step, out_path);
    }
    if (*check) {
      std::string echo;
      for (int i = 0; i < argc; ++i) {
        if (i > 0) echo += ' ';
        echo += argv[i];
      }
      return cmd_check(echo, x_path, y_path, eta, lambda_y, fd_step, precision_bits,
                       report_path, timings);
    }
    if (*density) {
      return cmd_density(x_path, u_max, points, out_path);
    }
  } catch (const bsadd::StepFailureError &e) {
    emit_error(e.code(), e.what(), e.last_good_eta);
    return kExitNumerical;
  } catch (const bsadd::Error &e) {
    emit_error(e.code(), e.what());
    return classify_error(e);
  } catch (const std::exception &e) {
    emit_error("internal", e.what());
    return kExitNumerical;
  }
  return 0;
}
