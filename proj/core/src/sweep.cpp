#include "ispmarket/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ispmarket/errors.hpp"

namespace ispmarket {
namespace {

constexpr std::string_view kHeader =
    "lambda,regime,d,a,x_hat,n,isp_profit,cp_profit_total,consumer_surplus,welfare,converged,"
    "binding_constraints";

std::string optional_field(const std::optional<double>& value) {
  return value ? format_csv_number(*value) : std::string{};
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> parse_optional(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size()) throw std::runtime_error("malformed number '" + text + "'");
  return value;
}

std::optional<BindingConstraint> parse_binding(std::string_view text) {
  for (auto c : {BindingConstraint::XHatUpper, BindingConstraint::XHatLower,
                 BindingConstraint::NLower, BindingConstraint::DLower,
                 BindingConstraint::ALower}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

}  // namespace

void validate(const SweepSpec& spec) {
  if (spec.varied_parameter != "lambda") {
    throw std::invalid_argument("only lambda can be swept, got '" + spec.varied_parameter + "'");
  }
  if (!(spec.from < spec.to)) throw std::invalid_argument("sweep requires from < to");
  if (spec.steps < 2) throw std::invalid_argument("sweep requires at least 2 steps");
  if (spec.regimes.empty()) throw std::invalid_argument("sweep requires at least one regime");
  validate(spec.solver);
  for (double lambda : sweep_values(spec)) {
    ModelParams params = spec.base;
    params.lambda = lambda;
    validate(params);
  }
}

std::vector<double> sweep_values(const SweepSpec& spec) {
  std::vector<double> values(static_cast<std::size_t>(std::max(spec.steps, 0)));
  for (int i = 0; i < spec.steps; ++i) {
    values[i] = i + 1 == spec.steps ? spec.to
                                    : spec.from + (spec.to - spec.from) * i / (spec.steps - 1);
  }
  return values;
}

SweepRow make_sweep_row(double lambda, const EquilibriumResult& result) {
  SweepRow row;
  row.lambda = lambda;
  row.regime = result.regime;
  if (result.prices) {
    row.d = result.prices->d;
    row.a = result.prices->a;
  }
  row.x_hat = result.state.x_hat;
  row.n = result.state.n;
  row.isp_profit = result.welfare.isp_profit;
  row.cp_profit_total = result.welfare.cp_total_profit;
  row.consumer_surplus = result.welfare.consumer_surplus;
  row.welfare = result.welfare.total;
  row.converged = result.diagnostics.converged;
  row.binding_constraints = result.diagnostics.binding_constraints;
  return row;
}

SweepRow infeasible_sweep_row(double lambda, Regime regime) {
  SweepRow row;
  row.lambda = lambda;
  row.regime = regime;
  return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  validate(spec);
  const std::vector<double> values = sweep_values(spec);
  const std::size_t regimes = spec.regimes.size();
  const std::size_t total = values.size() * regimes;
  std::vector<SweepRow> rows(total);

  auto solve_task = [&](std::size_t task) {
    const double lambda = values[task / regimes];
    const Regime regime = spec.regimes[task % regimes];
    ModelParams params = spec.base;
    params.lambda = lambda;
    try {
      rows[task] = make_sweep_row(lambda, solve(regime, params, spec.solver));
    } catch (const InfeasibleModel&) {
      rows[task] = infeasible_sweep_row(lambda, regime);
    }
  };

  unsigned threads = spec.threads != 0 ? spec.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(total));
  if (threads == 1) {
    for (std::size_t task = 0; task < total; ++task) solve_task(task);
    return rows;
  }

  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t task = next++; task < total; task = next++) solve_task(task);
      });
    }
  }
  return rows;
}

std::string_view sweep_csv_header() { return kHeader; }

std::string format_csv_number(double value) { return fmt::format("{:.12g}", value); }

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kHeader << '\n';
  for (const SweepRow& row : rows) {
    std::string binding;
    for (std::size_t i = 0; i < row.binding_constraints.size(); ++i) {
      if (i != 0) binding += '|';
      binding += to_string(row.binding_constraints[i]);
    }
    out << format_csv_number(row.lambda) << ',' << to_string(row.regime) << ','
        << optional_field(row.d) << ',' << optional_field(row.a) << ','
        << optional_field(row.x_hat) << ',' << optional_field(row.n) << ','
        << optional_field(row.isp_profit) << ',' << optional_field(row.cp_profit_total) << ','
        << optional_field(row.consumer_surplus) << ',' << optional_field(row.welfare) << ','
        << (row.converged ? "true" : "false") << ',' << binding << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error("sweep CSV header mismatch");
  }
  std::vector<SweepRow> rows;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 12) {
      throw std::runtime_error(fmt::format("line {}: expected 12 fields, got {}", line_number,
                                           fields.size()));
    }
    SweepRow row;
    row.lambda = std::stod(fields[0]);
    const auto regime = parse_regime(fields[1]);
    if (!regime) throw std::runtime_error(fmt::format("line {}: unknown regime", line_number));
    row.regime = *regime;
    row.d = parse_optional(fields[2]);
    row.a = parse_optional(fields[3]);
    row.x_hat = parse_optional(fields[4]);
    row.n = parse_optional(fields[5]);
    row.isp_profit = parse_optional(fields[6]);
    row.cp_profit_total = parse_optional(fields[7]);
    row.consumer_surplus = parse_optional(fields[8]);
    row.welfare = parse_optional(fields[9]);
    if (fields[10] != "true" && fields[10] != "false") {
      throw std::runtime_error(fmt::format("line {}: converged must be true or false", line_number));
    }
    row.converged = fields[10] == "true";
    if (!fields[11].empty()) {
      for (const auto& name : split(fields[11], '|')) {
        const auto binding = parse_binding(name);
        if (!binding) {
          throw std::runtime_error(fmt::format("line {}: unknown constraint '{}'", line_number, name));
        }
        row.binding_constraints.push_back(*binding);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ispmarket
