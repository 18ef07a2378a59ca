#include "cli/commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cli/config_file.hpp"
#include "cli/svg_plot.hpp"
#include "ispmarket/errors.hpp"
#include "ispmarket/validation.hpp"

namespace ispmarket::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  if (!CLI::detail::lexical_conversion<T, T>({text}, value)) {
    throw UsageError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

// Registers flags on a subcommand and remembers how to assign each one from a
// config file, so that explicit flags win over file values, which win over
// built-in defaults.
class FlagSet {
 public:
  explicit FlagSet(CLI::App* command) : command_(command) {
    command_->add_option("--config", config_path_, "flat key=value file with flag defaults");
  }

  template <class T>
  CLI::Option* add(const std::string& name, T& target, const std::string& description) {
    CLI::Option* option = command_->add_option("--" + name, target, description);
    bindings_[name] = {option, [&target, name](const std::string& text) {
                         target = parse_value<T>(name, text);
                       }};
    return option;
  }

  CLI::Option* add_list(const std::string& name, std::vector<std::string>& target,
                        const std::string& description) {
    CLI::Option* option = command_->add_option("--" + name, target, description)->delimiter(',');
    bindings_[name] = {option, [&target](const std::string& text) {
                         target.clear();
                         std::istringstream in(text);
                         for (std::string item; std::getline(in, item, ',');) {
                           if (!item.empty()) target.push_back(item);
                         }
                       }};
    return option;
  }

  bool parsed() const { return command_->parsed(); }

  void apply_config() const {
    if (config_path_.empty()) return;
    std::map<std::string, std::string> values;
    try {
      values = read_key_value_file(config_path_);
    } catch (const ConfigIoError& error) {
      throw IoError(error.what());
    } catch (const std::invalid_argument& error) {
      throw UsageError(error.what());
    }
    for (const auto& [key, text] : values) {
      const auto binding = bindings_.find(key);
      if (binding == bindings_.end()) {
        throw UsageError("config key '" + key + "' is not a flag of '" + command_->get_name() + "'");
      }
      if (binding->second.option->count() == 0) binding->second.assign(text);
    }
  }

 private:
  struct Binding {
    CLI::Option* option = nullptr;
    std::function<void(const std::string&)> assign;
  };

  CLI::App* command_;
  std::string config_path_;
  std::map<std::string, Binding> bindings_;
};

void add_model_flags(FlagSet& flags, ModelParams& params) {
  flags.add("v", params.v, "consumer valuation of content");
  flags.add("r", params.r, "advertising revenue per consumer");
  flags.add("t", params.t, "CP differentiation parameter, in (0, 1)");
  flags.add("f", params.f, "CP fixed entry cost");
  flags.add("lambda", params.lambda, "request rate per unit consumer length");
  flags.add("mu", params.mu, "ISP service rate");
}

void add_solver_flags(FlagSet& flags, SolverConfig& solver) {
  flags.add("grid", solver.grid, "coarse-scan points per axis")->check(CLI::PositiveNumber);
  flags.add("tol", solver.tolerance, "simplex termination tolerance (relative to the box)");
}

std::string optional_number(const std::optional<double>& value) {
  return value ? format_csv_number(*value) : std::string{};
}

std::string join_numbers(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += ';';
    out += format_csv_number(values[i]);
  }
  return out;
}

std::vector<Regime> parse_regimes(const std::vector<std::string>& names) {
  std::vector<Regime> out;
  for (const std::string& name : names) {
    const auto regime = parse_regime(name);
    if (!regime) throw UsageError("unknown regime '" + name + "'");
    out.push_back(*regime);
  }
  return out;
}

int run_solve(const ModelParams& params, const SolverConfig& solver, const std::string& regime_name,
              std::ostream& out) {
  const auto regime = parse_regime(regime_name);
  if (!regime) throw UsageError("unknown regime '" + regime_name + "'");
  validate(params);
  validate(solver);
  out << format_result(solve(*regime, params, solver));
  return kExitSuccess;
}

int run_sweep_command(SweepSpec spec, const std::vector<std::string>& regimes,
                      const std::string& out_path, const std::string& plot_path,
                      std::ostream& out) {
  if (out_path.empty()) throw UsageError("sweep requires --out <path>");
  spec.regimes = parse_regimes(regimes);
  validate(spec);
  const std::vector<SweepRow> rows = run_sweep(spec);

  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw IoError("cannot open " + out_path + " for writing");
  write_sweep_csv(file, rows);
  file.close();
  if (!file) throw IoError("failed writing " + out_path);

  if (!plot_path.empty()) {
    try {
      write_sweep_plots(plot_path, rows);
    } catch (const std::runtime_error& error) {
      throw IoError(error.what());
    }
  }
  std::size_t failed = 0;
  for (const SweepRow& row : rows) failed += row.converged ? 0 : 1;
  out << "rows=" << rows.size() << "\nunconverged=" << failed << "\nout=" << out_path << '\n';
  if (!plot_path.empty()) {
    for (const auto& path : plot_paths(plot_path)) out << "plot=" << path.string() << '\n';
  }
  return kExitSuccess;
}

int run_validate(const ValidationOptions& options, std::ostream& out) {
  validate(options.params);
  validate(options.solver);
  for (const auto& name : options.skip) {
    const auto names = validation_check_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw UsageError("unknown check '" + name + "'");
    }
  }
  const std::vector<CheckResult> results = run_validation(options);
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;
  for (const CheckResult& result : results) {
    out << to_string(result.status) << ' ' << result.name << ": " << result.detail << '\n';
    switch (result.status) {
      case CheckStatus::Pass: ++passed; break;
      case CheckStatus::Fail: ++failed; break;
      case CheckStatus::Skipped: ++skipped; break;
    }
  }
  out << fmt::format("validation: {} passed, {} failed, {} skipped\n", passed, failed, skipped);
  return all_passed(results) ? kExitSuccess : kExitValidationFailure;
}

}  // namespace

std::string format_result(const EquilibriumResult& result) {
  std::string binding;
  for (std::size_t i = 0; i < result.diagnostics.binding_constraints.size(); ++i) {
    if (i != 0) binding += '|';
    binding += to_string(result.diagnostics.binding_constraints[i]);
  }
  const auto& prices = result.prices;
  std::string text;
  text += fmt::format("regime={}\n", to_string(result.regime));
  text += fmt::format("d={}\n", optional_number(prices ? std::optional(prices->d) : std::nullopt));
  text += fmt::format("a={}\n", optional_number(prices ? std::optional(prices->a) : std::nullopt));
  text += fmt::format("x_hat={}\n", format_csv_number(result.state.x_hat));
  text += fmt::format("n={}\n", format_csv_number(result.state.n));
  text += fmt::format("isp_profit={}\n", format_csv_number(result.welfare.isp_profit));
  text += fmt::format("cp_profit_total={}\n", format_csv_number(result.welfare.cp_total_profit));
  text += fmt::format("consumer_surplus={}\n", format_csv_number(result.welfare.consumer_surplus));
  text += fmt::format("welfare={}\n", format_csv_number(result.welfare.total));
  text += fmt::format("converged={}\n", result.diagnostics.converged ? "true" : "false");
  text += fmt::format("binding_constraints={}\n", binding);
  text += fmt::format("foc_residuals={}\n", join_numbers(result.diagnostics.foc_residuals));
  text += fmt::format("reduced_foc_residuals={}\n",
                      join_numbers(result.diagnostics.reduced_foc_residuals));
  text += fmt::format("grid_best_gap={}\n", format_csv_number(result.diagnostics.grid_best_gap));
  text += fmt::format("evaluations={}\n", result.diagnostics.evaluations);
  text += fmt::format("tied_starts={}\n", result.diagnostics.tied_starts);
  return text;
}

std::string format_queue_report(const QueueRunReport& report) {
  std::string text;
  text += fmt::format("arrival_rate={}\n", format_csv_number(report.arrival_rate));
  text += fmt::format("service_rate={}\n", format_csv_number(report.service_rate));
  text += fmt::format("requests_served={}\n", report.requests_served);
  text += fmt::format("requests_measured={}\n", report.requests_measured);
  text += fmt::format("mean_sojourn={}\n", format_csv_number(report.mean_sojourn));
  text += fmt::format("std_error={}\n", format_csv_number(report.std_error));
  text += fmt::format("analytic_sojourn={}\n",
                      format_csv_number(1.0 / (report.service_rate - report.arrival_rate)));
  text += fmt::format("seed={}\n", report.seed);
  return text;
}

std::vector<std::filesystem::path> plot_paths(const std::filesystem::path& base) {
  std::filesystem::path stem = base;
  if (stem.extension() == ".svg") stem.replace_extension();
  const std::string prefix = stem.string();
  return {prefix + "_welfare.svg", prefix + "_x_hat.svg", prefix + "_n.svg"};
}

void write_sweep_plots(const std::filesystem::path& base, std::span<const SweepRow> rows) {
  const auto paths = plot_paths(base);
  struct Panel {
    const char* title;
    const char* y_label;
    std::optional<double> SweepRow::*field;
  };
  const std::array<Panel, 3> panels{{
      {"Welfare", "W", &SweepRow::welfare},
      {"Consumer market size", "x_hat", &SweepRow::x_hat},
      {"Provider market size", "n", &SweepRow::n},
  }};

  std::vector<Regime> regimes;
  for (const SweepRow& row : rows) {
    if (std::find(regimes.begin(), regimes.end(), row.regime) == regimes.end()) {
      regimes.push_back(row.regime);
    }
  }

  for (std::size_t p = 0; p < panels.size(); ++p) {
    LineChart chart;
    chart.title = panels[p].title;
    chart.x_label = "lambda";
    chart.y_label = panels[p].y_label;
    for (Regime regime : regimes) {
      Series series;
      series.label = std::string(to_string(regime));
      for (const SweepRow& row : rows) {
        if (row.regime != regime) continue;
        const auto& value = row.*(panels[p].field);
        series.x.push_back(row.lambda);
        series.y.push_back(value ? *value : std::nan(""));
      }
      chart.series.push_back(std::move(series));
    }
    write_svg(paths[p], chart);
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibrium solver for an ISP / content-provider market", "ispmarket"};
  app.require_subcommand(1);

  // solve
  ModelParams solve_params;
  SolverConfig solve_solver;
  std::string regime_name = "nonneutral";
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one regime at one parameter point");
  FlagSet solve_flags(solve_cmd);
  add_model_flags(solve_flags, solve_params);
  add_solver_flags(solve_flags, solve_solver);
  solve_flags.add("regime", regime_name, "nonneutral, neutral or optimum");

  // sweep
  SweepSpec spec;
  std::vector<std::string> sweep_regimes{"nonneutral", "neutral", "optimum"};
  std::string out_path;
  std::string plot_path;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep lambda across regimes, write CSV");
  FlagSet sweep_flags(sweep_cmd);
  add_model_flags(sweep_flags, spec.base);
  add_solver_flags(sweep_flags, spec.solver);
  sweep_flags.add("from", spec.from, "first lambda");
  sweep_flags.add("to", spec.to, "last lambda");
  sweep_flags.add("steps", spec.steps, "number of lambda values");
  sweep_flags.add("param", spec.varied_parameter, "parameter to sweep (lambda)");
  sweep_flags.add_list("regimes", sweep_regimes, "comma-separated regimes");
  sweep_flags.add("threads", spec.threads, "worker threads, 0 for all cores");
  sweep_flags.add("out", out_path, "CSV output path");
  sweep_flags.add("plot", plot_path, "base path for SVG panels");

  // validate
  ValidationOptions validation;
  CLI::App* validate_cmd = app.add_subcommand("validate", "run the oracle suite");
  FlagSet validate_flags(validate_cmd);
  add_model_flags(validate_flags, validation.params);
  add_solver_flags(validate_flags, validation.solver);
  validate_flags.add("seed", validation.seed, "seed for sampled checks and the queue");
  validate_flags.add("requests", validation.queue_requests, "requests per queue run");
  validate_flags.add_list("skip", validation.skip, "comma-separated checks to skip");
  validate_flags.add("perturb-demand", validation.demand_perturbation, "")->group("");

  // simulate-queue
  double arrival_rate = 1.0;
  double service_rate = 3.0;
  std::uint64_t requests = 1'000'000;
  std::uint64_t seed = 1;
  CLI::App* queue_cmd = app.add_subcommand("simulate-queue", "simulate the M/M/1 ISP queue");
  FlagSet queue_flags(queue_cmd);
  queue_flags.add("lambda", arrival_rate, "arrival rate");
  queue_flags.add("mu", service_rate, "service rate");
  queue_flags.add("requests", requests, "requests to simulate");
  queue_flags.add("seed", seed, "random seed");

  std::vector<const char*> argv;
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error, out, err);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (solve_flags.parsed()) {
      solve_flags.apply_config();
      return run_solve(solve_params, solve_solver, regime_name, out);
    }
    if (sweep_flags.parsed()) {
      sweep_flags.apply_config();
      return run_sweep_command(spec, sweep_regimes, out_path, plot_path, out);
    }
    if (validate_flags.parsed()) {
      validate_flags.apply_config();
      return run_validate(validation, out);
    }
    if (queue_flags.parsed()) {
      queue_flags.apply_config();
      out << format_queue_report(simulate_mm1(arrival_rate, service_rate, requests, seed));
      return kExitSuccess;
    }
  } catch (const UsageError& error) {
    err << "error: " << error.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& error) {
    err << "error: " << error.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& error) {
    err << "error: " << error.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleModel& error) {
    err << "infeasible: " << error.what() << '\n';
    return kExitInfeasible;
  } catch (const IoError& error) {
    err << "io error: " << error.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace ispmarket::cli
