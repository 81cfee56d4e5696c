#include "kltest/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kltest/divergence.hpp"
#include "kltest/exponent.hpp"
#include "kltest/experiment.hpp"
#include "kltest/io.hpp"
#include "kltest/oracle.hpp"
#include "kltest/simplex.hpp"
#include "kltest/testing.hpp"

namespace kltest {

namespace {

using ordered_json = nlohmann::ordered_json;

// +inf serializes as the literal string "inf" in both JSON and CSV.
ordered_json json_number(double value) {
  if (std::isinf(value)) return ordered_json(value > 0 ? "inf" : "-inf");
  return ordered_json(value);
}

ordered_json json_number(ExtendedReal value) { return json_number(value.bits()); }

ordered_json json_probs(const Distribution& dist) {
  ordered_json arr = ordered_json::array();
  for (int i = 0; i < dist.size(); ++i) arr.push_back(dist[i]);
  return arr;
}

void write_text_artifact(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write output file: " + path);
  file << content;
}

void emit_json(const std::string& out_path, const ordered_json& doc) {
  if (!out_path.empty()) write_text_artifact(out_path, doc.dump(2) + "\n");
}

TestVariant parse_variant(const std::string& name) {
  if (name == "forward") return TestVariant::forward;
  if (name == "reverse") return TestVariant::reverse;
  if (name == "min") return TestVariant::min_of_both;
  throw CLI::ValidationError("--variant", "must be forward, reverse, or min");
}

std::vector<std::int64_t> parse_n_grid(const std::string& list) {
  std::vector<std::int64_t> grid;
  std::stringstream ss(list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    grid.push_back(std::stoll(token));
  }
  if (grid.empty()) throw CLI::ValidationError("--n-grid", "needs at least one sample count");
  return grid;
}

std::string statistic_text(ExtendedReal value) { return format_float(value.bits()); }

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns after writing the stdout summary and, when
// requested, the --out artifact.

void cmd_divergence(const std::string& kind, std::optional<double> alpha,
                    const std::string& p_path, const std::string& q_path,
                    const std::string& out_path, std::ostream& out) {
  const Distribution p = read_distribution_file(p_path);
  const Distribution q = read_distribution_file(q_path);
  double value = 0.0;
  if (kind == "kl") {
    value = kl(p, q).bits();
  } else if (kind == "tv") {
    value = total_variation(p, q);
  } else {
    if (!alpha) throw CLI::ValidationError("--alpha", "required for --kind renyi");
    value = renyi(*alpha, p, q).bits();
  }
  out << kind << (kind == "tv" ? " = " : " (bits) = ") << format_float(value) << "\n";

  ordered_json doc;
  doc["command"] = "divergence";
  doc["kind"] = kind;
  if (alpha) doc["alpha"] = *alpha;
  doc["p"] = p_path;
  doc["q"] = q_path;
  doc["value"] = json_number(value);
  emit_json(out_path, doc);
}

void cmd_test_one(const std::string& p_path, const std::string& samples_path,
                  double eps, const std::string& out_path, std::ostream& out) {
  const Distribution p = read_distribution_file(p_path);
  const std::vector<int> samples = read_samples_file(samples_path);
  const auto empirical = empirical_from_samples(samples, p.size());
  const std::int64_t n = empirical.n();
  const double c = hoeffding_threshold(n, p.size(), eps);
  const Decision decision = one_sample_decide(p, empirical, c);

  out << "verdict " << to_string(decision.verdict) << " (statistic "
      << statistic_text(decision.statistic) << " bits, threshold "
      << format_float(c) << " bits, n=" << n << ", eps=" << format_float(eps)
      << ")\n";

  ordered_json doc;
  doc["command"] = "test-one";
  doc["p"] = p_path;
  doc["samples"] = samples_path;
  doc["n"] = n;
  doc["d"] = p.size();
  doc["eps"] = eps;
  doc["threshold_bits"] = json_number(c);
  doc["statistic_bits"] = json_number(decision.statistic);
  doc["verdict"] = to_string(decision.verdict);
  emit_json(out_path, doc);
}

void cmd_test_two(const std::string& x_path, const std::string& y_path, double eps,
                  const std::string& variant_name, const std::string& out_path,
                  std::ostream& out) {
  const std::vector<int> x = read_samples_file(x_path);
  const std::vector<int> y = read_samples_file(y_path);
  int d = 1;
  for (int s : x) d = std::max(d, s + 1);
  for (int s : y) d = std::max(d, s + 1);
  const TestVariant variant = parse_variant(variant_name);
  const auto ex = empirical_from_samples(x, d);
  const auto ey = empirical_from_samples(y, d);
  if (ex.n() != ey.n()) {
    throw std::invalid_argument("test-two: sample files have different lengths (" +
                                std::to_string(ex.n()) + " vs " + std::to_string(ey.n()) +
                                ")");
  }
  const auto schedule = two_sample_threshold(ex.n(), d, eps);
  const Decision decision = two_sample_decide(ex, ey, schedule.c, variant);

  out << "verdict " << to_string(decision.verdict) << " (statistic "
      << statistic_text(decision.statistic) << " bits, threshold "
      << format_float(schedule.c) << " bits, variant " << variant_name
      << ", n=" << ex.n() << ", d=" << d << ", eps=" << format_float(eps) << ")\n";

  ordered_json doc;
  doc["command"] = "test-two";
  doc["x"] = x_path;
  doc["y"] = y_path;
  doc["n"] = ex.n();
  doc["d"] = d;
  doc["eps"] = eps;
  doc["variant"] = variant_name;
  doc["delta_bits"] = json_number(schedule.delta);
  doc["threshold_bits"] = json_number(schedule.c);
  doc["statistic_bits"] = json_number(decision.statistic);
  doc["verdict"] = to_string(decision.verdict);
  emit_json(out_path, doc);
}

void cmd_exponent(const std::string& p_path, const std::string& q_path,
                  double resolution, const std::string& out_path, std::ostream& out) {
  const Distribution p = read_distribution_file(p_path);
  const Distribution q = read_distribution_file(q_path);
  const ExponentReport report = two_sample_exponent(p, q, resolution);

  out << "closed form (bits)  = " << statistic_text(report.closed_form) << "\n";
  out << "renyi(1/2) (bits)   = " << statistic_text(report.renyi_half) << "\n";
  if (report.grid) {
    out << "grid minimum (bits) = " << format_float(report.grid->value_bits) << " at (";
    for (int i = 0; i < report.grid->argmin.size(); ++i) {
      out << (i ? ", " : "") << format_float(report.grid->argmin[i]);
    }
    out << ")\n";
  }
  if (report.mixture) {
    out << "geometric mixture   = (";
    for (int i = 0; i < report.mixture->size(); ++i) {
      out << (i ? ", " : "") << format_float((*report.mixture)[i]);
    }
    out << ")\n";
  }

  ordered_json doc;
  doc["command"] = "exponent";
  doc["p"] = p_path;
  doc["q"] = q_path;
  doc["resolution"] = resolution;
  doc["closed_form_bits"] = json_number(report.closed_form);
  doc["renyi_half_bits"] = json_number(report.renyi_half);
  doc["mixture"] = report.mixture ? json_probs(*report.mixture) : ordered_json(nullptr);
  if (report.grid) {
    doc["grid_value_bits"] = json_number(report.grid->value_bits);
    doc["grid_argmin"] = json_probs(report.grid->argmin);
  } else {
    doc["grid_value_bits"] = nullptr;
    doc["grid_argmin"] = nullptr;
  }
  emit_json(out_path, doc);
}

void cmd_exact(const std::string& p_path, const std::string& q_path,
               std::int64_t n, double eps, const std::string& variant_name,
               const std::string& mode, const std::string& out_path,
               std::ostream& out) {
  const Distribution p = read_distribution_file(p_path);
  const Distribution q = q_path.empty() ? p : read_distribution_file(q_path);

  ExactErrorReport report{};
  if (mode == "one") {
    report = exact_one_sample_errors(p, q, n, eps);
  } else {
    report = exact_two_sample_errors(p, q, n, eps, parse_variant(variant_name));
  }

  out << "type I  = " << format_float(report.type_1) << "\n";
  out << "type II = " << format_float(report.type_2) << "\n";
  out << "c_n (bits) = " << format_float(report.c_n);
  if (report.delta_n) out << ", delta_n (bits) = " << format_float(*report.delta_n);
  out << ", n = " << n << "\n";

  std::ostringstream csv;
  csv << "n,mode,variant,eps,delta_n,c_n,type_1,type_2\n";
  csv << n << ',' << mode << ','
      << (report.variant ? to_string(*report.variant) : "one-sample") << ','
      << format_float(eps) << ','
      << (report.delta_n ? format_float(*report.delta_n) : std::string()) << ','
      << format_float(report.c_n) << ',' << format_float(report.type_1) << ','
      << format_float(report.type_2) << "\n";
  if (!out_path.empty()) write_text_artifact(out_path, csv.str());
}

std::string simulate_csv(const ExperimentSpec& spec,
                         const std::vector<ErrorEstimate>& estimates) {
  std::ostringstream csv;
  csv << "n,variant,method,alpha_hat,alpha_lo,alpha_hi,beta_hat,beta_lo,beta_hi,"
         "trials,seed\n";
  const std::string variant = spec.test == TestKind::one_sample
                                  ? "one-sample"
                                  : to_string(spec.variant);
  for (const ErrorEstimate& e : estimates) {
    csv << e.n << ',' << variant << ','
        << (e.method == EstimateMethod::exact ? "exact" : "monte-carlo") << ','
        << format_float(e.alpha_hat) << ',' << format_float(e.alpha_lo) << ','
        << format_float(e.alpha_hi) << ',' << format_float(e.beta_hat) << ','
        << format_float(e.beta_lo) << ',' << format_float(e.beta_hi) << ','
        << e.trials << ',' << spec.master_seed << "\n";
  }
  return csv.str();
}

void cmd_simulate(const std::string& config_path, const std::string& out_path,
                  std::optional<int> workers_override, std::ostream& out) {
  ExperimentSpec spec = read_experiment_config(config_path);
  if (workers_override) spec.workers = *workers_override;
  spec.validate();
  const std::vector<ErrorEstimate> estimates = mc_error_rates(spec);
  for (const ErrorEstimate& e : estimates) {
    out << "n=" << e.n << " alpha=" << format_float(e.alpha_hat) << " ["
        << format_float(e.alpha_lo) << ", " << format_float(e.alpha_hi) << "]"
        << " beta=" << format_float(e.beta_hat) << " [" << format_float(e.beta_lo)
        << ", " << format_float(e.beta_hi) << "] ("
        << (e.method == EstimateMethod::exact ? "exact" : "monte-carlo") << ")\n";
  }
  write_text_artifact(out_path, simulate_csv(spec, estimates));
  out << "wrote " << estimates.size() << " rows to " << out_path << "\n";
}

void cmd_converse(const std::string& p_path, const std::string& q_path, double c,
                  const std::string& n_grid_text, const std::string& mode_name,
                  std::uint64_t seed, std::int64_t trials, int workers, double eps,
                  const std::string& out_path, std::ostream& out) {
  const Distribution p = read_distribution_file(p_path);
  const Distribution q = read_distribution_file(q_path);
  const std::vector<std::int64_t> n_grid = parse_n_grid(n_grid_text);
  const ConverseMode mode =
      mode_name == "mc" ? ConverseMode::monte_carlo : ConverseMode::exact;
  const ConverseReport report =
      converse_demo(p, q, c, n_grid, eps, mode, seed, trials, workers);

  out << "geometric mixture = (";
  for (int i = 0; i < report.mixture.size(); ++i) {
    out << (i ? ", " : "") << format_float(report.mixture[i]);
  }
  out << "), ball radius = " << format_float(c) << " bits\n";
  for (const ConversePoint& pt : report.points) {
    out << "n=" << pt.n << " type_ii=" << format_float(pt.type_ii)
        << " ball_mass_mixture=" << format_float(pt.ball_mass_mixture) << " ("
        << (pt.method == EstimateMethod::exact ? "exact" : "monte-carlo") << ")\n";
  }

  std::ostringstream csv;
  csv << "n,method,type_ii,ball_mass_mixture\n";
  for (const ConversePoint& pt : report.points) {
    csv << pt.n << ','
        << (pt.method == EstimateMethod::exact ? "exact" : "monte-carlo") << ','
        << format_float(pt.type_ii) << ',' << format_float(pt.ball_mass_mixture)
        << "\n";
  }
  if (!out_path.empty()) write_text_artifact(out_path, csv.str());
}

void cmd_exponent_fit(const std::string& in_path, std::optional<double> target,
                      const std::string& out_path, std::ostream& out) {
  const auto rows = read_beta_csv(in_path);
  const ExponentFit fit = exponent_fit(
      rows, target ? std::optional<double>(*target) : std::nullopt);

  out << "slope = " << format_float(fit.slope_bits) << " bits/sample, intercept = "
      << format_float(fit.intercept_bits) << " bits, " << fit.points.size()
      << " points fitted, " << fit.zero_beta_points << " zero-beta rows excluded\n";
  if (fit.gap_bits) {
    out << "target = " << format_float(*fit.target_bits)
        << " bits, gap = " << format_float(*fit.gap_bits) << " bits\n";
  }

  ordered_json doc;
  doc["command"] = "exponent-fit";
  doc["in"] = in_path;
  doc["slope_bits_per_sample"] = json_number(fit.slope_bits);
  doc["intercept_bits"] = json_number(fit.intercept_bits);
  doc["points_used"] = fit.points.size();
  doc["zero_beta_points"] = fit.zero_beta_points;
  ordered_json points = ordered_json::array();
  for (const FitPoint& pt : fit.points) {
    points.push_back(ordered_json{{"n", pt.n}, {"rate_bits", json_number(pt.rate_bits)}});
  }
  doc["points"] = points;
  if (fit.target_bits) {
    doc["target_bits"] = json_number(*fit.target_bits);
    doc["gap_bits"] = json_number(*fit.gap_bits);
  }
  emit_json(out_path, doc);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Finite-alphabet relative-entropy hypothesis testing toolkit"};
  app.name("kltest");
  app.require_subcommand(1);

  // divergence
  std::string div_kind, div_p, div_q, div_out;
  double div_alpha = 0.0;
  auto* divergence_cmd = app.add_subcommand("divergence", "Divergence between two laws");
  divergence_cmd->add_option("--kind", div_kind, "kl | tv | renyi")
      ->required()
      ->check(CLI::IsMember({"kl", "tv", "renyi"}));
  auto* alpha_opt = divergence_cmd->add_option("--alpha", div_alpha,
                                               "Renyi order in (0,1)");
  divergence_cmd->add_option("--p", div_p, "distribution file")->required();
  divergence_cmd->add_option("--q", div_q, "distribution file")->required();
  divergence_cmd->add_option("--out", div_out, "JSON output path");

  // test-one
  std::string t1_p, t1_samples, t1_out;
  double t1_eps = 0.0;
  auto* test_one_cmd = app.add_subcommand("test-one", "One-sample relative-entropy test");
  test_one_cmd->add_option("--p", t1_p, "nominal distribution file")->required();
  test_one_cmd->add_option("--samples", t1_samples, "sample file")->required();
  test_one_cmd->add_option("--eps", t1_eps, "level in (0,1)")
      ->required()
      ->check(CLI::Range(0.0, 1.0).description("(0,1)"));
  test_one_cmd->add_option("--out", t1_out, "JSON output path");

  // test-two
  std::string t2_x, t2_y, t2_variant = "forward", t2_out;
  double t2_eps = 0.0;
  auto* test_two_cmd = app.add_subcommand("test-two", "Two-sample empirical-divergence test");
  test_two_cmd->add_option("--x", t2_x, "sample file")->required();
  test_two_cmd->add_option("--y", t2_y, "sample file")->required();
  test_two_cmd->add_option("--eps", t2_eps, "level in (0,1)")
      ->required()
      ->check(CLI::Range(0.0, 1.0).description("(0,1)"));
  test_two_cmd->add_option("--variant", t2_variant, "forward | reverse | min")
      ->required()
      ->check(CLI::IsMember({"forward", "reverse", "min"}));
  test_two_cmd->add_option("--out", t2_out, "JSON output path");

  // exponent
  std::string exp_p, exp_q, exp_out;
  double exp_resolution = 1e-3;
  auto* exponent_cmd = app.add_subcommand("exponent", "Optimal two-sample exponent report");
  exponent_cmd->add_option("--p", exp_p, "distribution file")->required();
  exponent_cmd->add_option("--q", exp_q, "distribution file")->required();
  exponent_cmd->add_option("--resolution", exp_resolution, "grid step in (0, 0.5]")
      ->check(CLI::Range(1e-9, 0.5));
  exponent_cmd->add_option("--out", exp_out, "JSON output path");

  // exact
  std::string ex_p, ex_q, ex_variant = "forward", ex_mode, ex_out;
  std::int64_t ex_n = 0;
  double ex_eps = 0.0;
  auto* exact_cmd = app.add_subcommand("exact", "Exact error probabilities by enumeration");
  exact_cmd->add_option("--p", ex_p, "distribution file")->required();
  exact_cmd->add_option("--q", ex_q, "alternative distribution file (defaults to --p)");
  exact_cmd->add_option("--n", ex_n, "sample count")->required()->check(CLI::PositiveNumber);
  exact_cmd->add_option("--eps", ex_eps, "level in (0,1)")
      ->required()
      ->check(CLI::Range(0.0, 1.0).description("(0,1)"));
  exact_cmd->add_option("--variant", ex_variant, "forward | reverse | min")
      ->check(CLI::IsMember({"forward", "reverse", "min"}));
  exact_cmd->add_option("--mode", ex_mode, "one | two")
      ->required()
      ->check(CLI::IsMember({"one", "two"}));
  exact_cmd->add_option("--out", ex_out, "CSV output path");

  // simulate
  std::string sim_config, sim_out;
  int sim_workers = 0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Seeded error-rate experiment");
  simulate_cmd->add_option("--config", sim_config, "experiment config file")->required();
  simulate_cmd->add_option("--out", sim_out, "CSV output path")->required();
  auto* workers_opt =
      simulate_cmd->add_option("--workers", sim_workers, "worker threads (overrides config)")
          ->check(CLI::PositiveNumber);

  // converse
  std::string cv_p, cv_q, cv_grid, cv_mode = "exact", cv_out;
  double cv_c = 0.0, cv_eps = 0.05;
  std::uint64_t cv_seed = 0;
  std::int64_t cv_trials = 10000;
  int cv_workers = 1;
  auto* converse_cmd = app.add_subcommand("converse", "Strong-converse demonstration");
  converse_cmd->add_option("--p", cv_p, "distribution file")->required();
  converse_cmd->add_option("--q", cv_q, "distribution file")->required();
  converse_cmd->add_option("--c", cv_c, "ball radius in bits, > 0")->required();
  converse_cmd->add_option("--n-grid", cv_grid, "comma-separated sample counts")->required();
  converse_cmd->add_option("--mode", cv_mode, "exact | mc")
      ->check(CLI::IsMember({"exact", "mc"}));
  converse_cmd->add_option("--seed", cv_seed, "master seed");
  converse_cmd->add_option("--trials", cv_trials, "Monte Carlo trials per grid point")
      ->check(CLI::PositiveNumber);
  converse_cmd->add_option("--workers", cv_workers, "worker threads")
      ->check(CLI::PositiveNumber);
  converse_cmd->add_option("--eps", cv_eps, "level, carried into the report");
  converse_cmd->add_option("--out", cv_out, "CSV output path");

  // exponent-fit
  std::string fit_in, fit_out;
  double fit_target = 0.0;
  auto* fit_cmd = app.add_subcommand("exponent-fit", "Fit a decay exponent from a results CSV");
  fit_cmd->add_option("--in", fit_in, "CSV with n and beta_hat/beta/type_2 columns")
      ->required();
  auto* target_opt = fit_cmd->add_option("--target", fit_target, "target exponent in bits");
  fit_cmd->add_option("--out", fit_out, "JSON output path");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("kltest");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (divergence_cmd->parsed()) {
      std::optional<double> alpha;
      if (alpha_opt->count() > 0) alpha = div_alpha;
      if (div_kind == "renyi" && !alpha) {
        err << "usage error: --alpha is required for --kind renyi\n";
        return 2;
      }
      cmd_divergence(div_kind, alpha, div_p, div_q, div_out, out);
    } else if (test_one_cmd->parsed()) {
      cmd_test_one(t1_p, t1_samples, t1_eps, t1_out, out);
    } else if (test_two_cmd->parsed()) {
      cmd_test_two(t2_x, t2_y, t2_eps, t2_variant, t2_out, out);
    } else if (exponent_cmd->parsed()) {
      cmd_exponent(exp_p, exp_q, exp_resolution, exp_out, out);
    } else if (exact_cmd->parsed()) {
      cmd_exact(ex_p, ex_q, ex_n, ex_eps, ex_variant, ex_mode, ex_out, out);
    } else if (simulate_cmd->parsed()) {
      std::optional<int> workers;
      if (workers_opt->count() > 0) workers = sim_workers;
      cmd_simulate(sim_config, sim_out, workers, out);
    } else if (converse_cmd->parsed()) {
      cmd_converse(cv_p, cv_q, cv_c, cv_grid, cv_mode, cv_seed, cv_trials, cv_workers,
                   cv_eps, cv_out, out);
    } else if (fit_cmd->parsed()) {
      std::optional<double> target;
      if (target_opt->count() > 0) target = fit_target;
      cmd_exponent_fit(fit_in, target, fit_out, out);
    }
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace kltest
