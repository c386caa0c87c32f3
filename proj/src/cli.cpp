#include "videnergy/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "videnergy/error.hpp"
#include "videnergy/optimizer.hpp"
#include "videnergy/report.hpp"
#include "videnergy/scenario.hpp"

namespace videnergy::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct Common {
  std::vector<std::string> scenarios;
  std::string format = "json";
  std::string out_path;
  std::vector<std::string> overrides;
  std::string carbon_intensity;
};

std::string read_source(const std::string& source) {
  constexpr std::string_view scheme = "builtin:";
  if (source.rfind(scheme, 0) == 0) {
    const std::string name = source.substr(scheme.size());
    auto doc = scenario::builtin_document(name);
    if (!doc) throw Error(ErrorCode::unresolved_file, source, "no builtin scenario named \"" + name + "\"");
    return *doc;
  }
  std::ifstream in(source, std::ios::binary);
  if (!in) throw Error(ErrorCode::unresolved_file, source, "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// "350", "350 g/kWh" and "0.35 kg/kWh" are all accepted.
std::string carbon_override(const std::string& text) {
  auto q = parse_quantity(text);
  if (q.dim == dims::none) q = {q.si * units::g_per_kWh.si(), dims::carbon_intensity};
  check_dim(q, dims::carbon_intensity, "--carbon-intensity");
  return "carbon_intensity=" + format_in(q, "g/kWh");
}

std::vector<std::string> all_overrides(const Common& c) {
  std::vector<std::string> ov = c.overrides;
  if (!c.carbon_intensity.empty()) ov.push_back(carbon_override(c.carbon_intensity));
  return ov;
}

scenario::Scenario load(const std::string& source, const std::vector<std::string>& overrides) {
  try {
    return scenario::load_scenario(scenario::apply_overrides(read_source(source), overrides));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::unresolved_file) throw;
    throw Error(e.code(), source + (e.path().empty() ? "" : ":" + e.path()), e.message());
  }
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    auto q = parse_quantity(item);
    check_dim(q, dims::none, "--grid");
    out.push_back(q.si);
  }
  if (out.empty()) throw Error(ErrorCode::invalid_value, "--grid", "grid is empty");
  return out;
}

void write(const Common& c, const std::string& artifact, std::ostream& out) {
  if (c.out_path.empty()) {
    out << artifact;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw Error(ErrorCode::unresolved_file, c.out_path, "cannot open output file");
  f << artifact;
}

std::string csv_row(const std::string& a, const std::string& b, const std::string& c, Energy e) {
  return a + "," + b + "," + c + "," + report::kwh_text(e) + "\n";
}

ojson energy_json(Energy e) { return {{"value", e.in(units::kWh)}, {"unit", "kWh"}}; }

// ----------------------------------------------------------------- commands

std::string cmd_eval(const Common& c) {
  std::vector<scenario::Scenario> list;
  const auto ov = all_overrides(c);
  for (const auto& s : c.scenarios) list.push_back(load(s, ov));
  return report::emit(report::evaluate(list), report::format_from_string(c.format));
}

struct SweepArgs {
  std::string param = "forecast";
  std::string grid = "1,1e3,1e6";
  std::string unit;
};

std::string cmd_sweep(const Common& c, const SweepArgs& a) {
  const auto fmt = report::format_from_string(c.format);
  const auto grid = parse_grid(a.grid);
  const auto ov = all_overrides(c);
  const std::string& source = c.scenarios.front();
  std::vector<std::string> row_service, row_component, row_sub;
  std::vector<Energy> row_value;

  if (a.param == "forecast" || a.param == "requests") {
    const auto s = load(source, ov);
    const auto m = optimizer::VideoCostModel::from_scenario(s);
    const auto& asset = s.assets[s.optimization ? s.optimization->asset : 0];
    std::vector<optimizer::EncoderOption> options;
    if (s.optimization && !s.optimization->encoder_options.empty()) {
      options = optimizer::options_from_specs(s.optimization->encoder_options, asset.duration);
    } else {
      for (const auto& v : asset.variants)
        options.push_back(optimizer::EncoderOption::make(v.label, v.p_enc, v.output_size, asset.duration));
    }
    for (const auto& r : optimizer::sweep_requests(m, options, grid)) {
      row_service.push_back(s.name);
      row_component.push_back(r.option);
      row_sub.push_back("forecast=" + format_number(r.requests));
      row_value.push_back(r.total);
    }
  } else {
    for (double g : grid) {
      std::vector<std::string> point_ov = ov;
      const std::string value = a.unit.empty() ? format_number(g) : "\"" + format_number(g) + " " + a.unit + "\"";
      point_ov.push_back(a.param + "=" + value);
      const auto s = load(source, point_ov);
      const auto r = report::evaluate_service(s);
      const std::string sub = a.param + "=" + format_number(g) + (a.unit.empty() ? "" : " " + a.unit);
      const std::pair<const char*, Energy> parts[] = {{"total", r.total}, {"UT", r.ut}, {"VP", r.vp}, {"NW", r.nw()}};
      for (const auto& [name, e] : parts) {
        row_service.push_back(s.name);
        row_component.push_back(name);
        row_sub.push_back(sub);
        row_value.push_back(e);
      }
    }
  }

  if (fmt == report::Format::csv) {
    std::string out = "service,component,subcategory,value_kwh\n";
    for (std::size_t i = 0; i < row_value.size(); ++i)
      out += csv_row(row_service[i], row_component[i], row_sub[i], row_value[i]);
    return out;
  }
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < row_value.size(); ++i)
    rows.push_back({{"service", row_service[i]},
                    {"component", row_component[i]},
                    {"subcategory", row_sub[i]},
                    {"energy", energy_json(row_value[i])}});
  return ojson{{"parameter", a.param}, {"rows", std::move(rows)}}.dump(2) + "\n";
}

struct OptimizeArgs {
  double requests = -1.0;  ///< negative: use the scenario forecast
};

std::string crossover_kind(const optimizer::Crossover& x) {
  switch (x.kind) {
    case optimizer::Crossover::Kind::at: return "at";
    case optimizer::Crossover::Kind::none: return "none";
    case optimizer::Crossover::Kind::always_equal: return "always-equal";
  }
  return "none";
}

std::string cmd_optimize(const Common& c, const OptimizeArgs& a) {
  const auto fmt = report::format_from_string(c.format);
  const auto s = load(c.scenarios.front(), all_overrides(c));
  if (!s.optimization)
    throw Error(ErrorCode::schema, "optimization", "scenario has no optimization block");
  const auto& opt = *s.optimization;
  const auto& asset = s.assets[opt.asset];
  const auto m = optimizer::VideoCostModel::from_scenario(s);
  const auto options = optimizer::options_from_specs(opt.encoder_options, asset.duration);
  const double forecast = a.requests >= 0.0 ? a.requests : opt.forecast;

  ojson root;
  std::string csv = "service,component,subcategory,value_kwh\n";
  root["scenario"] = s.name;
  root["forecast"] = forecast;

  ojson oj = ojson::array();
  for (const auto& o : options) {
    const auto line = m.cost(o);
    oj.push_back({{"label", o.label},
                  {"p_enc_w", o.p_enc.si()},
                  {"output_size_gbyte", o.output_size.in(units::GByte)},
                  {"implied_bitrate_mbps", o.implied_bitrate().in(units::Mbps)},
                  {"fixed", energy_json(line.fixed)},
                  {"per_request", energy_json(line.per_request)},
                  {"total_at_forecast", energy_json(line.total(forecast))}});
    csv += csv_row(s.name, "fixed", o.label, line.fixed);
    csv += csv_row(s.name, "per_request", o.label, line.per_request);
    csv += csv_row(s.name, "total", o.label + "@" + format_number(forecast), line.total(forecast));
  }
  root["options"] = std::move(oj);

  ojson xs = ojson::array();
  ojson be = ojson::array();
  for (std::size_t i = 0; i < options.size(); ++i) {
    for (std::size_t k = i + 1; k < options.size(); ++k) {
      const auto x = optimizer::crossover(m, options[i], options[k]);
      ojson xj{{"a", options[i].label}, {"b", options[k].label}, {"kind", crossover_kind(x)}};
      if (x.kind == optimizer::Crossover::Kind::at) {
        xj["requests"] = x.requests;
        xj["ceiling"] = x.ceiling;
      }
      xs.push_back(std::move(xj));
    }
    for (std::size_t k = 0; k < options.size(); ++k) {
      if (k == i) continue;
      auto n = optimizer::reencode_break_even(m, options[i], options[k]);
      ojson bj{{"from", options[i].label}, {"to", options[k].label}};
      bj["requests"] = n ? ojson(*n) : ojson(nullptr);
      be.push_back(std::move(bj));
    }
  }
  root["crossovers"] = std::move(xs);
  root["reencode_break_even"] = std::move(be);

  if (!opt.portfolio.empty() && !options.empty()) {
    std::vector<optimizer::VideoDemand> demand;
    for (const auto& p : opt.portfolio) demand.push_back({m, p.forecast, p.videos});
    const auto as = optimizer::assign_optimal_encoders(demand, options);
    ojson aj;
    ojson choices = ojson::array();
    for (std::size_t i = 0; i < demand.size(); ++i)
      choices.push_back({{"videos", demand[i].videos},
                         {"forecast", demand[i].forecast},
                         {"option", options[as.choice[i]].label}});
    aj["assignment"] = std::move(choices);
    ojson totals;
    for (std::size_t k = 0; k < options.size(); ++k) {
      totals["all-" + options[k].label] = {
          {"energy", energy_json(as.single_policy[k])},
          {"ghg_t", model::ghg_emissions(as.single_policy[k], s.carbon_intensity).in(units::tonne)}};
      csv += csv_row(s.name, "portfolio", "all-" + options[k].label, as.single_policy[k]);
    }
    totals["optimal"] = {{"energy", energy_json(as.optimal)},
                         {"ghg_t", model::ghg_emissions(as.optimal, s.carbon_intensity).in(units::tonne)}};
    csv += csv_row(s.name, "portfolio", "optimal", as.optimal);
    aj["totals"] = std::move(totals);
    root["portfolio"] = std::move(aj);
  }

  if (opt.ladder) {
    const auto ladder = optimizer::options_from_specs(opt.ladder->variants, asset.duration);
    std::vector<double> forecasts = opt.ladder->forecasts;
    if (forecasts.empty()) forecasts.push_back(forecast);
    ojson lj = ojson::array();
    for (double n : forecasts) {
      const auto li = optimizer::ladder_impact(m, ladder, n, opt.ladder->surrogates);
      lj.push_back({{"requests", n},
                    {"variants", ladder.size()},
                    {"surrogates", opt.ladder->surrogates},
                    {"single", energy_json(li.single)},
                    {"ladder", energy_json(li.ladder)},
                    {"delta", li.delta()},
                    {"ratio", li.ratio()}});
      csv += csv_row(s.name, "ladder", "single@" + format_number(n), li.single);
      csv += csv_row(s.name, "ladder", "ladder@" + format_number(n), li.ladder);
    }
    root["ladder"] = std::move(lj);
  }

  if (!opt.surrogate_counts.empty()) {
    const auto rows = optimizer::surrogate_scaling(s, opt.surrogate_counts, forecast);
    ojson sj = ojson::array();
    for (const auto& r : rows) {
      sj.push_back({{"servers", r.servers},
                    {"total", energy_json(r.total)},
                    {"offset", energy_json(r.fixed.offset)},
                    {"storage", energy_json(r.fixed.storage)},
                    {"copies", energy_json(r.fixed.copies)},
                    {"nw_copies", energy_json(r.fixed.nw_copies)},
                    {"increase_vs_first", ((r.total - rows.front().total) / rows.front().total).si()}});
      csv += csv_row(s.name, "surrogates", "servers=" + format_number(r.servers), r.total);
    }
    root["surrogates"] = std::move(sj);
  }

  return fmt == report::Format::csv ? csv : root.dump(2) + "\n";
}

std::string cmd_compare(const Common& c) {
  const auto fmt = report::format_from_string(c.format);
  std::vector<scenario::Scenario> list;
  const auto ov = c.overrides;
  for (const auto& s : c.scenarios) list.push_back(load(s, ov));
  const auto rep = report::evaluate(list);
  std::optional<model::CarbonIntensity> ci;
  if (!c.carbon_intensity.empty()) {
    auto q = parse_quantity(c.carbon_intensity);
    if (q.dim == dims::none) q = {q.si * units::g_per_kWh.si(), dims::carbon_intensity};
    ci = model::CarbonIntensity{as_quantity<dims::carbon_intensity>(q, "--carbon-intensity")};
  }

  const Energy base = rep.services.empty() ? Energy{} : rep.services.front().total;
  std::string csv = "service,total_kwh,delta_kwh,delta_pct,ghg_t\n";
  ojson rows = ojson::array();
  for (const auto& s : rep.services) {
    const Energy delta = s.total - base;
    const double pct = base.si() > 0.0 ? 100.0 * (delta / base).si() : 0.0;
    const Mass ghg = model::ghg_emissions(s.total, ci ? *ci : s.carbon_intensity);
    csv += s.service + "," + report::kwh_text(s.total) + "," + format_number(delta.in(units::kWh)) + "," +
           format_number(pct) + "," + format_number(ghg.in(units::tonne)) + "\n";
    rows.push_back({{"service", s.service},
                    {"total", energy_json(s.total)},
                    {"UT", energy_json(s.ut)},
                    {"VP", energy_json(s.vp)},
                    {"NW", energy_json(s.nw())},
                    {"delta", energy_json(delta)},
                    {"delta_pct", pct},
                    {"carbon_intensity_g_per_kwh", (ci ? *ci : s.carbon_intensity).in_grams_per_kwh()},
                    {"ghg_t", ghg.in(units::tonne)}});
  }
  if (fmt == report::Format::csv) return csv;
  return ojson{{"baseline", rep.services.empty() ? "" : rep.services.front().service}, {"services", rows}}.dump(2) +
         "\n";
}

std::string cmd_catalog(const Common& c) {
  if (c.scenarios.empty()) return scenario::dump_catalog(scenario::builtin_catalog());
  return scenario::dump_catalog(load(c.scenarios.front(), c.overrides).effective_catalog());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy and emissions of online video services", "videnergy"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "videnergy 1.0.0");

  Common common;
  SweepArgs sweep_args;
  OptimizeArgs optimize_args;

  auto add_common = [&common](CLI::App* sub, bool scenario_required) {
    auto* opt = sub->add_option("--scenario,-s", common.scenarios, "builtin:<name> or path to a scenario JSON");
    if (scenario_required) opt->required();
    sub->add_option("--format,-f", common.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out,-o", common.out_path, "write the artifact here instead of stdout");
    sub->add_option("--override", common.overrides, "dotted.path=value applied before validation");
  };

  auto* eval = app.add_subcommand("eval", "evaluate scenarios into an energy report");
  add_common(eval, true);
  eval->add_option("--carbon-intensity", common.carbon_intensity, "grid intensity in g/kWh");

  auto* sweep = app.add_subcommand("sweep", "sweep requests or any numeric parameter");
  add_common(sweep, true);
  sweep->add_option("--param", sweep_args.param, "\"forecast\" or a dotted scenario path");
  sweep->add_option("--grid", sweep_args.grid, "comma-separated values, e.g. 1,1e3,1e6");
  sweep->add_option("--unit", sweep_args.unit, "unit appended to grid values for quantity parameters");
  sweep->add_option("--carbon-intensity", common.carbon_intensity, "grid intensity in g/kWh");

  auto* optimize = app.add_subcommand("optimize", "encoder crossover, assignment, ladder and CDN what-ifs");
  add_common(optimize, true);
  optimize->add_option("--requests", optimize_args.requests, "request forecast for the single video");
  optimize->add_option("--carbon-intensity", common.carbon_intensity, "grid intensity in g/kWh");

  auto* compare = app.add_subcommand("compare", "side-by-side totals with deltas and GHG");
  add_common(compare, true);
  compare->add_option("--carbon-intensity", common.carbon_intensity, "grid intensity in g/kWh");

  auto* catalog = app.add_subcommand("catalog", "dump catalog profiles with provenance");
  add_common(catalog, false);
  catalog->add_subcommand("dump", "same as plain `catalog`");

  std::vector<const char*> argv{"videnergy"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage_error;
  }

  try {
    std::string artifact;
    if (*eval) artifact = cmd_eval(common);
    else if (*sweep) artifact = cmd_sweep(common, sweep_args);
    else if (*optimize) artifact = cmd_optimize(common, optimize_args);
    else if (*compare) artifact = cmd_compare(common);
    else artifact = cmd_catalog(common);
    write(common, artifact, out);
  } catch (const Error& e) {
    err << "videnergy: " << e.what() << "\n";
    return validation_error;
  } catch (const std::exception& e) {
    err << "videnergy: " << e.what() << "\n";
    return validation_error;
  }
  return ok;
}

}  // namespace videnergy::cli
