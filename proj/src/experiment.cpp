#include "ampeq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ampeq/rng.hpp"

namespace ampeq {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double l2_diff(const Field& a, const Field& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

// True when G'(0) maps kernel directions back into the kernel for every noise
// mode; together with psi(0) = 0 this forces K to vanish identically.
bool g_prime0_kernel_preserving(const ModelSpec& model, double tol = 1e-12) {
  for (int j = 0; j < model.noise_modes; ++j) {
    for (int i = 1; i <= model.basis.kernel_dim; ++i) {
      const Field g = model.g_prime0(unit_mode(model.basis, i), j);
      for (int k = model.basis.kernel_dim; k < model.basis.n_modes; ++k) {
        if (std::abs(g[k]) > tol) return false;
      }
    }
  }
  return true;
}

struct SampleOutcome {
  bool used = false;
  bool blowup = false;
  bool exceeded = false;
  std::int64_t clamp_count = 0;
  std::int64_t steps = 0;
  // Per snapshot, with the K correction and without it.
  std::vector<double> e1_k, e2_k, e1_nok, e2_nok;
};

struct GridPlan {
  double dt = 0.0;
  std::int64_t n_steps = 0;
  std::int64_t stride = 1;
};

GridPlan plan_grid(const ExperimentConfig& cfg, double eps) {
  GridPlan g;
  g.dt = cfg.dt;
  const double horizon = cfg.t0 / (eps * eps);
  g.n_steps = std::llround(std::ceil(horizon / g.dt));
  if (g.n_steps > cfg.max_steps) {
    g.n_steps = cfg.max_steps;
    g.dt = horizon / static_cast<double>(g.n_steps);
  }
  g.stride = std::max<std::int64_t>(1, (g.n_steps + cfg.max_snapshots - 1) /
                                           cfg.max_snapshots);
  return g;
}

}  // namespace

const char* driver_name(Case2Driver driver) {
  switch (driver) {
    case Case2Driver::SharedSigned: return "shared";
    case Case2Driver::SharedRaw: return "shared-raw";
    case Case2Driver::Martingale: return "martingale";
  }
  return "?";
}

Case2Driver driver_from_name(const std::string& name) {
  if (name == "shared") return Case2Driver::SharedSigned;
  if (name == "shared-raw") return Case2Driver::SharedRaw;
  if (name == "martingale") return Case2Driver::Martingale;
  throw std::invalid_argument("unknown case-2 driver '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (!(kappa > 0.0 && kappa < 0.05)) {
    throw std::invalid_argument("config: kappa must lie in (0, 1/20)");
  }
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] < 1.0)) {
      throw std::invalid_argument("config: epsilon values must lie in (0,1)");
    }
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw std::invalid_argument("config: epsilon list must be strictly decreasing");
    }
  }
  if (n_samples < 1) throw std::invalid_argument("config: n_samples must be >= 1");
  if (n_modes < 2) throw std::invalid_argument("config: n_modes must be >= 2");
  if (n_quad < 4 * n_modes) {
    throw std::invalid_argument("config: n_quad must be >= 4 * n_modes");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
  if (!(t0 > 0.0)) throw std::invalid_argument("config: t0 must be positive");
  if (max_snapshots < 2) throw std::invalid_argument("config: max_snapshots must be >= 2");
  if (max_steps < 1) throw std::invalid_argument("config: max_steps must be >= 1");
}

ErrorReport run_comparison(const ExperimentConfig& config,
                           const ModelSpec* custom_model) {
  config.validate();

  ModelSpec built;
  if (!custom_model) {
    AllenCahnParams params;
    params.h = config.h;
    params.epsilon = config.epsilons.empty() ? 0.5 : config.epsilons.front();
    built = allen_cahn_model(params, config.n_modes, config.n_quad,
                             config.case_tag == CaseTag::CaseI
                                 ? NoiseCase::SpatiallyUniform
                                 : NoiseCase::FirstSineMode);
  }
  const ModelSpec& model = custom_model ? *custom_model : built;
  const SpectralBasis& basis = model.basis;

  ErrorReport report;
  report.case_tag = config.case_tag;
  report.include_K = config.include_K;
  report.driver_name = driver_name(config.driver);
  report.h = config.h;
  report.seed = config.seed;

  SigmaCoefficients sigmas;
  if (config.case_tag == CaseTag::CaseII) {
    sigmas = sigma_coefficients(model, config.sigma_tol);
  }
  const bool k_vanishes = g_prime0_kernel_preserving(model);
  const Field psi0(basis.n_modes);

  int n_threads = config.threads > 0
                      ? config.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, config.n_samples));

  for (std::size_t eps_idx = 0; eps_idx < config.epsilons.size(); ++eps_idx) {
    const double eps = config.epsilons[eps_idx];
    const GridPlan grid = plan_grid(config, eps);

    EpsilonErrors agg;
    agg.epsilon = eps;
    agg.dt = grid.dt;
    agg.n_steps = grid.n_steps;
    agg.stride = grid.stride;

    std::vector<SampleOutcome> outcomes(config.n_samples);

    auto run_sample = [&](int s) {
      SampleOutcome& out = outcomes[s];
      const std::uint64_t stream =
          static_cast<std::uint64_t>(eps_idx) * config.n_samples +
          static_cast<std::uint64_t>(s);
      const NoisePath path =
          sample_path(grid.dt, grid.n_steps, model.noise_modes, config.seed, stream);

      Field u0(basis.n_modes);
      u0[0] = eps;
      const SpdeTrajectory traj = solve_spde(model, u0, path, eps, grid.stride);
      if (traj.blowup_flag) {
        out.blowup = true;
        return;
      }

      const NoisePath slow = rescale_to_slow(path, eps);
      const AmplitudePath a1 = solve_first_order(model, 1.0, slow, eps);
      if (a1.truncated) {
        out.blowup = true;
        return;
      }

      AmplitudePath a2;
      if (config.case_tag == CaseTag::CaseI) {
        a2 = solve_second_order_case1(model, 0.0, a1, slow, eps);
      } else {
        Case2Result r = solve_second_order_case2(model, 0.0, a1, slow, sigmas,
                                                 eps, config.driver);
        out.clamp_count = r.clamp_count;
        a2 = std::move(r.path);
      }
      out.steps = grid.n_steps;
      if (a2.truncated) {
        out.blowup = true;
        return;
      }

      const std::size_t n_snap = traj.states.size();
      std::vector<FastModeState> fast;
      if (!k_vanishes) {
        std::vector<Field> kfields =
            fast_mode_K(model, a1, psi0, slow, eps, grid.stride);
        fast.resize(n_snap);
        for (std::size_t i = 0; i < n_snap; ++i) {
          fast[i].Q = Field(basis.n_modes);
          fast[i].K = std::move(kfields[i]);
        }
      }

      std::vector<double> a1_snap(n_snap), a2_snap(n_snap);
      for (std::size_t i = 0; i < n_snap; ++i) {
        a1_snap[i] = a1.a1[traj.steps[i]];
        a2_snap[i] = a2.a2[traj.steps[i]];
      }

      const auto approx1_nok = assemble_approximation(
          1, a1_snap, {}, {}, eps, basis);
      const auto approx2_nok = assemble_approximation(
          2, a1_snap, a2_snap, {}, eps, basis);

      out.e1_nok.resize(n_snap);
      out.e2_nok.resize(n_snap);
      out.e1_k.resize(n_snap);
      out.e2_k.resize(n_snap);
      if (fast.empty()) {
        for (std::size_t i = 0; i < n_snap; ++i) {
          out.e1_nok[i] = l2_diff(traj.states[i], approx1_nok[i]);
          out.e2_nok[i] = l2_diff(traj.states[i], approx2_nok[i]);
        }
        out.e1_k = out.e1_nok;
        out.e2_k = out.e2_nok;
      } else {
        const auto approx1_k = assemble_approximation(
            1, a1_snap, {}, fast, eps, basis);
        const auto approx2_k = assemble_approximation(
            2, a1_snap, a2_snap, fast, eps, basis);
        for (std::size_t i = 0; i < n_snap; ++i) {
          out.e1_nok[i] = l2_diff(traj.states[i], approx1_nok[i]);
          out.e2_nok[i] = l2_diff(traj.states[i], approx2_nok[i]);
          out.e1_k[i] = l2_diff(traj.states[i], approx1_k[i]);
          out.e2_k[i] = l2_diff(traj.states[i], approx2_k[i]);
        }
      }

      out.exceeded =
          stopping_monitor(traj, a2, config.kappa, basis).has_value();
      out.used = true;

      if (eps_idx == 0 && s == 0) {
        report.sample0_trajectory = traj;
        AmplitudePath strided;
        strided.case_tag = a2.case_tag;
        strided.slow_times.resize(n_snap);
        strided.a1 = a1_snap;
        strided.a2 = a2_snap;
        for (std::size_t i = 0; i < n_snap; ++i) {
          strided.slow_times[i] = eps * eps * traj.times[i];
        }
        report.sample0_amplitude = std::move(strided);
      }
    };

    if (n_threads == 1) {
      for (int s = 0; s < config.n_samples; ++s) run_sample(s);
    } else {
      std::atomic<int> next{0};
      std::vector<std::thread> pool;
      pool.reserve(n_threads);
      for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
          for (int s = next.fetch_add(1); s < config.n_samples;
               s = next.fetch_add(1)) {
            run_sample(s);
          }
        });
      }
      for (auto& th : pool) th.join();
    }

    std::int64_t total_steps = 0, total_clamps = 0;
    std::size_t n_snap = 0;
    for (const auto& o : outcomes) {
      if (o.blowup) {
        ++agg.blowup_count;
        continue;
      }
      if (!o.used) continue;
      ++agg.samples_used;
      if (o.exceeded) ++agg.exceedance_count;
      total_steps += o.steps;
      total_clamps += o.clamp_count;
      n_snap = o.e1_k.size();
    }
    if (2 * agg.blowup_count > config.n_samples) {
      report.aborted = true;
      report.abort_reason =
          "blow-up in more than half of the samples at epsilon " + fmt(eps);
      report.per_epsilon.push_back(std::move(agg));
      return report;
    }
    agg.clamp_fraction =
        total_steps > 0 ? static_cast<double>(total_clamps) / total_steps : 0.0;

    agg.times.resize(n_snap);
    for (std::size_t i = 0; i < n_snap; ++i) {
      const std::int64_t step = std::min<std::int64_t>(
          static_cast<std::int64_t>(i) * grid.stride, grid.n_steps);
      agg.times[i] = step * grid.dt;
    }

    auto aggregate = [&](auto member_sel, std::vector<double>& mean,
                         std::vector<double>& se) {
      mean.assign(n_snap, 0.0);
      se.assign(n_snap, 0.0);
      if (agg.samples_used == 0) return;
      for (const auto& o : outcomes) {
        if (!o.used) continue;
        const auto& v = member_sel(o);
        for (std::size_t i = 0; i < n_snap; ++i) mean[i] += v[i];
      }
      for (std::size_t i = 0; i < n_snap; ++i) mean[i] /= agg.samples_used;
      if (agg.samples_used < 2) return;
      for (const auto& o : outcomes) {
        if (!o.used) continue;
        const auto& v = member_sel(o);
        for (std::size_t i = 0; i < n_snap; ++i) {
          const double d = v[i] - mean[i];
          se[i] += d * d;
        }
      }
      for (std::size_t i = 0; i < n_snap; ++i) {
        se[i] = std::sqrt(se[i] / (agg.samples_used - 1.0) / agg.samples_used);
      }
    };

    const bool sel_k = config.include_K;
    aggregate([&](const SampleOutcome& o) -> const std::vector<double>& {
      return sel_k ? o.e1_k : o.e1_nok;
    }, agg.mean_first, agg.se_first);
    aggregate([&](const SampleOutcome& o) -> const std::vector<double>& {
      return sel_k ? o.e2_k : o.e2_nok;
    }, agg.mean_second, agg.se_second);
    aggregate([&](const SampleOutcome& o) -> const std::vector<double>& {
      return sel_k ? o.e1_nok : o.e1_k;
    }, agg.alt_mean_first, agg.alt_se_first);
    aggregate([&](const SampleOutcome& o) -> const std::vector<double>& {
      return sel_k ? o.e2_nok : o.e2_k;
    }, agg.alt_mean_second, agg.alt_se_second);

    for (const auto& o : outcomes) {
      if (!o.used) continue;
      const auto& v1 = sel_k ? o.e1_k : o.e1_nok;
      const auto& v2 = sel_k ? o.e2_k : o.e2_nok;
      agg.sup_first.push_back(*std::max_element(v1.begin(), v1.end()));
      agg.sup_second.push_back(*std::max_element(v2.begin(), v2.end()));
    }
    if (!agg.sup_first.empty()) {
      for (double v : agg.sup_first) agg.mean_sup_first += v;
      for (double v : agg.sup_second) agg.mean_sup_second += v;
      agg.mean_sup_first /= agg.sup_first.size();
      agg.mean_sup_second /= agg.sup_second.size();
    }

    report.per_epsilon.push_back(std::move(agg));
  }

  if (report.per_epsilon.size() >= 3) {
    std::vector<double> eps_list;
    std::vector<std::vector<double>> sups1, sups2;
    for (const auto& pe : report.per_epsilon) {
      eps_list.push_back(pe.epsilon);
      sups1.push_back(pe.sup_first);
      sups2.push_back(pe.sup_second);
    }
    report.slope_first =
        fit_convergence_order_bootstrap(eps_list, sups1, config.seed);
    report.slope_second =
        fit_convergence_order_bootstrap(eps_list, sups2, config.seed + 1);
  }
  return report;
}

SlopeFit fit_convergence_order(
    const std::vector<std::pair<double, double>>& sup_errors) {
  SlopeFit fit;
  std::vector<double> lx, ly;
  for (const auto& [eps, err] : sup_errors) {
    if (!(err > 0.0) || !std::isfinite(err)) {
      fit.warnings.push_back("excluded non-positive error at epsilon " + fmt(eps));
      continue;
    }
    lx.push_back(std::log(eps));
    ly.push_back(std::log(err));
  }
  const int n = static_cast<int>(lx.size());
  if (n < 3) {
    throw std::runtime_error(
        "fit_convergence_order: fewer than 3 usable points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.ci_lo = fit.ci_hi = fit.slope;
  fit.n_points = n;
  fit.ok = true;
  return fit;
}

SlopeFit fit_convergence_order_bootstrap(
    const std::vector<double>& epsilons,
    const std::vector<std::vector<double>>& per_sample_sups, std::uint64_t seed,
    int replicates) {
  SlopeFit fit;
  std::vector<std::pair<double, double>> base;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    double mean = 0.0;
    for (double v : per_sample_sups[e]) mean += v;
    if (!per_sample_sups[e].empty()) mean /= per_sample_sups[e].size();
    base.emplace_back(epsilons[e], mean);
  }
  try {
    fit = fit_convergence_order(base);
  } catch (const std::exception& ex) {
    fit.ok = false;
    fit.warnings.push_back(ex.what());
    return fit;
  }

  std::vector<double> slopes;
  slopes.reserve(replicates);
  for (int r = 0; r < replicates; ++r) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
      const auto& sups = per_sample_sups[e];
      const std::size_t n = sups.size();
      if (n == 0) continue;
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform_at(seed, static_cast<std::uint64_t>(r),
                                    static_cast<std::uint32_t>(e),
                                    static_cast<std::uint64_t>(i));
        mean += sups[std::min(n - 1, static_cast<std::size_t>(u * n))];
      }
      pts.emplace_back(epsilons[e], mean / n);
    }
    try {
      slopes.push_back(fit_convergence_order(pts).slope);
    } catch (const std::exception&) {
      // replicate lost to non-positive resampled means; skip
    }
  }
  if (slopes.size() >= 20) {
    std::sort(slopes.begin(), slopes.end());
    const auto pick = [&](double q) {
      const double pos = q * (slopes.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, slopes.size() - 1);
      const double w = pos - lo;
      return (1.0 - w) * slopes[lo] + w * slopes[hi];
    };
    fit.ci_lo = pick(0.025);
    fit.ci_hi = pick(0.975);
  }
  return fit;
}

namespace {

void write_time_csv(const ErrorReport& report, const std::string& path,
                    bool alt) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("emit_report: cannot write " + path);
  os << "case,epsilon,t,T,mean_R_first,se_R_first,mean_R_second,se_R_second\n";
  for (const auto& pe : report.per_epsilon) {
    const auto& m1 = alt ? pe.alt_mean_first : pe.mean_first;
    const auto& s1 = alt ? pe.alt_se_first : pe.se_first;
    const auto& m2 = alt ? pe.alt_mean_second : pe.mean_second;
    const auto& s2 = alt ? pe.alt_se_second : pe.se_second;
    for (std::size_t i = 0; i < pe.times.size(); ++i) {
      os << static_cast<int>(report.case_tag) << ',' << fmt(pe.epsilon) << ','
         << fmt(pe.times[i]) << ',' << fmt(pe.epsilon * pe.epsilon * pe.times[i])
         << ',' << fmt(m1[i]) << ',' << fmt(s1[i]) << ',' << fmt(m2[i]) << ','
         << fmt(s2[i]) << "\n";
    }
  }
}

}  // namespace

void emit_report(const ErrorReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("emit_report: cannot create " + dir);

  write_time_csv(report, dir + "/errors.csv", false);
  if (report.case_tag == CaseTag::CaseII) {
    write_time_csv(report, dir + "/errors_alt.csv", true);
  }

  {
    std::ofstream os(dir + "/summary.csv");
    if (!os) throw std::runtime_error("emit_report: cannot write summary.csv");
    os << "epsilon,sup_R_first,sup_R_second,slope_first,slope_second,"
          "clamp_fraction,exceedance_count\n";
    const double sl1 = report.slope_first.ok ? report.slope_first.slope
                                             : std::nan("");
    const double sl2 = report.slope_second.ok ? report.slope_second.slope
                                              : std::nan("");
    for (const auto& pe : report.per_epsilon) {
      os << fmt(pe.epsilon) << ',' << fmt(pe.mean_sup_first) << ','
         << fmt(pe.mean_sup_second) << ',' << fmt(sl1) << ',' << fmt(sl2) << ','
         << fmt(pe.clamp_fraction) << ',' << pe.exceedance_count << "\n";
    }
  }

  {
    std::ofstream os(dir + "/plot.gp");
    os << "# error evolution, two curves per epsilon (first- and second-order)\n"
          "set datafile separator ','\n"
          "set key left top\n"
          "set logscale y\n"
          "set xlabel 'fast time t'\n"
          "set ylabel 'mean L2 error'\n"
          "plot \\\n";
    bool first = true;
    for (const auto& pe : report.per_epsilon) {
      if (!first) os << ", \\\n";
      first = false;
      os << "  'errors.csv' using (abs($2-" << fmt(pe.epsilon)
         << ")<1e-14?$3:1/0):5 with lines title 'first order, eps="
         << fmt(pe.epsilon) << "', \\\n"
         << "  'errors.csv' using (abs($2-" << fmt(pe.epsilon)
         << ")<1e-14?$3:1/0):7 with lines title 'second order, eps="
         << fmt(pe.epsilon) << "'";
    }
    os << "\npause -1\n";
  }

  {
    std::ofstream os(dir + "/run_meta.txt");
    os << "case=" << static_cast<int>(report.case_tag) << "\n"
       << "h=" << fmt(report.h) << "\n"
       << "seed=" << report.seed << "\n"
       << "include_K=" << (report.include_K ? "on" : "off") << "\n"
       << "driver=" << report.driver_name << "\n"
       << "aborted=" << (report.aborted ? 1 : 0) << "\n";
    if (report.aborted) os << "abort_reason=" << report.abort_reason << "\n";
    for (const auto& pe : report.per_epsilon) {
      os << "epsilon=" << fmt(pe.epsilon) << " dt=" << fmt(pe.dt)
         << " n_steps=" << pe.n_steps << " stride=" << pe.stride
         << " samples_used=" << pe.samples_used << " blowups=" << pe.blowup_count
         << " exceedances=" << pe.exceedance_count
         << " clamp_fraction=" << fmt(pe.clamp_fraction) << "\n";
    }
    if (report.slope_first.ok) {
      os << "slope_first=" << fmt(report.slope_first.slope) << " ci=["
         << fmt(report.slope_first.ci_lo) << "," << fmt(report.slope_first.ci_hi)
         << "]\n";
    }
    if (report.slope_second.ok) {
      os << "slope_second=" << fmt(report.slope_second.slope) << " ci=["
         << fmt(report.slope_second.ci_lo) << ","
         << fmt(report.slope_second.ci_hi) << "]\n";
    }
    for (const auto& w : report.slope_first.warnings) os << "warning=" << w << "\n";
    for (const auto& w : report.slope_second.warnings) os << "warning=" << w << "\n";
  }

  if (!report.sample0_trajectory.states.empty()) {
    std::ofstream os(dir + "/trajectory_sample0.csv");
    export_trajectory_csv(report.sample0_trajectory, os);
  }
  if (!report.sample0_amplitude.slow_times.empty()) {
    std::ofstream os(dir + "/amplitude_sample0.csv");
    os << "T,a1,a2\n";
    const auto& amp = report.sample0_amplitude;
    for (std::size_t i = 0; i < amp.slow_times.size(); ++i) {
      os << fmt(amp.slow_times[i]) << ',' << fmt(amp.a1[i]) << ','
         << fmt(amp.a2.empty() ? 0.0 : amp.a2[i]) << "\n";
    }
  }
}

namespace {

std::vector<std::vector<double>> parse_csv_numeric(const std::string& path,
                                                   std::size_t n_cols) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != n_cols) {
      throw std::runtime_error("malformed row in " + path);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<TimeRow> parse_time_csv(const std::string& path) {
  std::vector<TimeRow> out;
  for (const auto& r : parse_csv_numeric(path, 8)) {
    TimeRow row;
    row.case_tag = static_cast<int>(r[0]);
    row.epsilon = r[1];
    row.t = r[2];
    row.slow_t = r[3];
    row.mean_first = r[4];
    row.se_first = r[5];
    row.mean_second = r[6];
    row.se_second = r[7];
    out.push_back(row);
  }
  return out;
}

std::vector<SummaryRow> parse_summary_csv(const std::string& path) {
  std::vector<SummaryRow> out;
  for (const auto& r : parse_csv_numeric(path, 7)) {
    SummaryRow row;
    row.epsilon = r[0];
    row.sup_first = r[1];
    row.sup_second = r[2];
    row.slope_first = r[3];
    row.slope_second = r[4];
    row.clamp_fraction = r[5];
    row.exceedance_count = static_cast<long>(r[6]);
    out.push_back(row);
  }
  return out;
}

}  // namespace ampeq
