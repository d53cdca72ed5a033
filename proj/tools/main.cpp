#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ampeq/amplitude.hpp"
#include "ampeq/experiment.hpp"
#include "ampeq/model.hpp"

namespace {

using namespace ampeq;

void print_coefficients(double h, double tol) {
  AllenCahnParams params{h, 0.5};
  const int n_modes = 64, n_quad = 512;
  const ModelSpec uniform =
      allen_cahn_model(params, n_modes, n_quad, NoiseCase::SpatiallyUniform);
  const ModelSpec sine1 =
      allen_cahn_model(params, n_modes, n_quad, NoiseCase::FirstSineMode);

  std::printf("# quadrature-projected coefficients, h = %.17g\n", h);
  std::printf("%-22s %24s %24s\n", "tag", "uniform-noise", "sine-mode-1-noise");
  for (const auto& [name, tag] : coefficient_catalog()) {
    std::printf("%-22s %24.16e %24.16e\n", name.c_str(),
                projected_coefficient(uniform, tag),
                projected_coefficient(sine1, tag));
  }
  const SigmaCoefficients sig = sigma_coefficients(sine1, tol);
  std::printf("\n# square-root diffusion constant, two routes (tol = %.3g)\n", tol);
  std::printf("sigma1_series          %24.16e  (%d terms per index)\n",
              sig.sigma1_series, sig.series_terms);
  std::printf("sigma1_tensor_route    %24.16e\n", sig.sigma1_generic);
  std::printf("difference             %24.16e\n",
              sig.sigma1_series - sig.sigma1_generic);
  std::printf("sigma2(a1=1)           %24.16e\n", sig.sigma2(1.0));
  std::printf("sigma3(a1=1)           %24.16e\n", sig.sigma3(1.0));
  std::printf("sigma4(a1=1)           %24.16e\n", sig.sigma4(1.0));

  const double half_gcc =
      projected_coefficient(uniform, Coefficient::Case1SecondNoise);
  std::printf("\n# second-order noise factor of the uniform-noise case\n");
  std::printf("half_Gcc_quadrature    %24.16e\n", half_gcc);
}

int run_validate(double h, std::uint64_t seed) {
  AllenCahnParams params{h, 0.5};
  const ModelSpec model =
      allen_cahn_model(params, 32, 128, NoiseCase::SpatiallyUniform);
  const ValidationReport report = validate_assumptions(model, 50, seed);
  for (const auto& c : report.checks) {
    std::printf("%-24s %-4s residual=%.3e %s\n", c.name.c_str(),
                c.passed ? "ok" : "FAIL", c.residual, c.note.c_str());
  }
  return report.all_passed() ? 0 : 2;
}

int run_experiment(const ExperimentConfig& config) {
  const ErrorReport report = run_comparison(config);
  emit_report(report, config.output_path);
  for (const auto& pe : report.per_epsilon) {
    std::printf(
        "epsilon=%-8g sup_first=%.6e sup_second=%.6e samples=%d blowups=%d "
        "exceedances=%d clamp=%.3g\n",
        pe.epsilon, pe.mean_sup_first, pe.mean_sup_second, pe.samples_used,
        pe.blowup_count, pe.exceedance_count, pe.clamp_fraction);
  }
  if (report.slope_first.ok) {
    std::printf("slope_first=%.4f  ci=[%.4f, %.4f]\n", report.slope_first.slope,
                report.slope_first.ci_lo, report.slope_first.ci_hi);
  }
  if (report.slope_second.ok) {
    std::printf("slope_second=%.4f ci=[%.4f, %.4f]\n", report.slope_second.slope,
                report.slope_second.ci_lo, report.slope_second.ci_hi);
  }
  std::printf("driver=%s include_K=%s out=%s\n", report.driver_name.c_str(),
              report.include_K ? "on" : "off", config.output_path.c_str());
  if (report.aborted) {
    std::fprintf(stderr, "experiment aborted: %s\n", report.abort_reason.c_str());
    return 2;
  }
  return 0;
}

// Shared mutable state for the experiment subcommands.
struct ExperimentCli {
  ExperimentConfig cfg;
  int case_num = 1;
  double epsilon = 0.1;
  std::string epsilons = "0.1,0.05,0.025";
  std::string include_k = "on";
  std::string driver = "shared";
  std::string config_path;
  CLI::App* cmd = nullptr;
};

void add_common_options(CLI::App* cmd, ExperimentCli& cli) {
  cli.cmd = cmd;
  cmd->set_help_flag("--help", "print help");
  cmd->add_option("--case", cli.case_num, "noise case")->check(CLI::IsMember({1, 2}));
  cmd->add_option("--h", cli.cfg.h, "constant h of the diffusion nonlinearity");
  cmd->add_option("--modes", cli.cfg.n_modes, "number of sine modes");
  cmd->add_option("--quad", cli.cfg.n_quad, "collocation points (default 4*modes)");
  cmd->add_option("--dt", cli.cfg.dt, "fast time step");
  cmd->add_option("--samples", cli.cfg.n_samples, "Monte Carlo samples");
  cmd->add_option("--t0", cli.cfg.t0, "slow horizon");
  cmd->add_option("--kappa", cli.cfg.kappa, "envelope exponent, in (0, 1/20)");
  cmd->add_option("--seed", cli.cfg.seed, "base seed");
  cmd->add_option("--include-k", cli.include_k,
                  "subtract the stable stochastic-convolution correction")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--driver", cli.driver, "case-2 driver coupling")
      ->check(CLI::IsMember({"shared", "shared-raw", "martingale"}));
  cmd->add_option("--threads", cli.cfg.threads, "worker threads (0 = auto)");
  cmd->add_option("--out", cli.cfg.output_path, "output directory");
  cmd->add_option("--config", cli.config_path,
                  "key=value config file; command-line flags override");
}

std::vector<double> parse_epsilon_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

// key=value lines; '#' starts a comment; a flag given on the command line
// keeps its value.
void apply_config_file(ExperimentCli& cli) {
  if (cli.config_path.empty()) return;
  std::ifstream is(cli.config_path);
  if (!is) throw std::invalid_argument("cannot open config file " + cli.config_path);
  const auto overridden = [&](const char* flag) {
    return cli.cmd->count(flag) > 0;
  };
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "case") {
      if (!overridden("--case")) cli.case_num = std::stoi(value);
    } else if (key == "epsilon") {
      if (!cli.cmd->count("--epsilon")) cli.epsilon = std::stod(value);
    } else if (key == "epsilons") {
      if (!cli.cmd->count("--epsilons")) cli.epsilons = value;
    } else if (key == "h") {
      if (!overridden("--h")) cli.cfg.h = std::stod(value);
    } else if (key == "modes") {
      if (!overridden("--modes")) cli.cfg.n_modes = std::stoi(value);
    } else if (key == "quad") {
      if (!overridden("--quad")) cli.cfg.n_quad = std::stoi(value);
    } else if (key == "dt") {
      if (!overridden("--dt")) cli.cfg.dt = std::stod(value);
    } else if (key == "samples") {
      if (!overridden("--samples")) cli.cfg.n_samples = std::stoi(value);
    } else if (key == "t0") {
      if (!overridden("--t0")) cli.cfg.t0 = std::stod(value);
    } else if (key == "kappa") {
      if (!overridden("--kappa")) cli.cfg.kappa = std::stod(value);
    } else if (key == "seed") {
      if (!overridden("--seed")) cli.cfg.seed = std::stoull(value);
    } else if (key == "include_k") {
      if (!overridden("--include-k")) cli.include_k = value;
    } else if (key == "driver") {
      if (!overridden("--driver")) cli.driver = value;
    } else if (key == "threads") {
      if (!overridden("--threads")) cli.cfg.threads = std::stoi(value);
    } else if (key == "out") {
      if (!overridden("--out")) cli.cfg.output_path = value;
    } else if (key == "max_steps") {
      cli.cfg.max_steps = std::stoll(value);
    } else if (key == "max_snapshots") {
      cli.cfg.max_snapshots = std::stoll(value);
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
}

void finalize(ExperimentCli& cli) {
  apply_config_file(cli);
  cli.cfg.case_tag = cli.case_num == 1 ? CaseTag::CaseI : CaseTag::CaseII;
  cli.cfg.include_K = cli.include_k == "on";
  cli.cfg.driver = driver_from_name(cli.driver);
  if (cli.cfg.n_quad <= 0) cli.cfg.n_quad = 4 * cli.cfg.n_modes;
  if (cli.cfg.output_path.empty()) {
    throw std::invalid_argument("an output directory is required (--out)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cubic-SPDE amplitude reduction: solver, reduced equations, "
               "and pathwise error experiments"};
  app.require_subcommand(1);
  // --h is a model parameter here, so help is long-form only
  app.set_help_flag("--help", "print help");

  auto* coeffs = app.add_subcommand("coeffs", "print projected coefficients");
  coeffs->set_help_flag("--help", "print help");
  double coeffs_h = 20.0, coeffs_tol = 1e-12;
  coeffs->add_option("--h", coeffs_h, "constant h")->required();
  coeffs->add_option("--tol", coeffs_tol, "series tail tolerance");

  auto* validate = app.add_subcommand("validate", "run model contract checks");
  validate->set_help_flag("--help", "print help");
  std::string model_name = "allen-cahn";
  double validate_h = 20.0;
  std::uint64_t validate_seed = 1;
  validate->add_option("--model", model_name)->check(CLI::IsMember({"allen-cahn"}));
  validate->add_option("--h", validate_h, "constant h")->required();
  validate->add_option("--seed", validate_seed, "seed for randomized checks");

  ExperimentCli sim;
  sim.cfg.n_quad = 0;  // resolved to 4*modes unless set
  auto* simulate = app.add_subcommand("simulate", "single-epsilon comparison");
  simulate->add_option("--epsilon", sim.epsilon, "scale parameter");
  add_common_options(simulate, sim);

  ExperimentCli conv;
  conv.cfg.n_quad = 0;
  auto* convergence =
      app.add_subcommand("convergence", "multi-epsilon comparison with slope fit");
  convergence->add_option("--epsilons", conv.epsilons,
                          "comma-separated, strictly decreasing");
  add_common_options(convergence, conv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (coeffs->parsed()) {
      print_coefficients(coeffs_h, coeffs_tol);
      return 0;
    }
    if (validate->parsed()) {
      return run_validate(validate_h, validate_seed);
    }
    if (simulate->parsed()) {
      finalize(sim);
      sim.cfg.epsilons = {sim.epsilon};
      return run_experiment(sim.cfg);
    }
    if (convergence->parsed()) {
      finalize(conv);
      conv.cfg.epsilons = parse_epsilon_list(conv.epsilons);
      return run_experiment(conv.cfg);
    }
  } catch (const std::invalid_argument& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  return 1;
}
