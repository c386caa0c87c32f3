#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "videnergy/model.hpp"
#include "videnergy/scenario.hpp"

namespace videnergy::report {

/// Provider energy by server task, PUE already applied to every entry.
struct ProviderBreakdown {
  Energy offset;
  Energy tx;
  Energy rx;
  Energy copies;
  Energy decoding;
  Energy encoding;
  Energy storage;

  Energy total() const { return offset + tx + rx + copies + decoding + encoding + storage; }
  friend bool operator==(const ProviderBreakdown&, const ProviderBreakdown&) = default;
};

/// One resolved input with where it came from.
struct ParameterEcho {
  std::string path;
  std::string value;
  std::string provenance;
  friend bool operator==(const ParameterEcho&, const ParameterEcho&) = default;
};

struct ServiceReport {
  std::string service;
  Energy total;

  Energy ut;
  std::vector<std::pair<std::string, Energy>> ut_by_device;  ///< keyed by fleet name

  Energy vp;
  double pue = 1.0;
  ProviderBreakdown vp_tasks;
  model::ServerTaskEnergies vp_raw;  ///< per-task sums before PUE

  Energy nw_ut;
  Energy nw_cdn;
  Energy nw() const { return nw_ut + nw_cdn; }

  model::CarbonIntensity carbon_intensity;
  Mass ghg;

  std::vector<ParameterEcho> parameters;
};

struct EnergyReport {
  std::vector<ServiceReport> services;
  Energy global_total;
  Mass ghg;
};

ServiceReport evaluate_service(const scenario::Scenario& s);

/// Scenarios are evaluated concurrently; the result keeps input order.
EnergyReport evaluate(std::span<const scenario::Scenario> scenarios);
EnergyReport evaluate(const scenario::Scenario& s);

enum class Format { json, csv };
Format format_from_string(std::string_view name);

std::string emit(const EnergyReport& report, Format format);
std::string to_json(const EnergyReport& report);
/// Columns: service,component,subcategory,value_kwh.
std::string to_csv(const EnergyReport& report);

/// Energy in kWh as shortest scientific notation, e.g. "6.0225e7".
std::string kwh_text(Energy e);

struct ServiceEmissions {
  std::string service;
  Energy energy;
  Mass mass;
};

/// Emissions of every service total at one carbon intensity.
std::vector<ServiceEmissions> ghg_report(const EnergyReport& report, const model::CarbonIntensity& ci);

}  // namespace videnergy::report
