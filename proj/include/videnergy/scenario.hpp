#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "videnergy/catalog.hpp"
#include "videnergy/model.hpp"

namespace videnergy::scenario {

struct RequestSpec {
  model::StreamRequest request;
  double per_device = 1.0;  ///< requests per device over the horizon
  /// False for peer-to-peer traffic that never touches the provider's servers.
  bool provider_served = true;
  friend bool operator==(const RequestSpec&, const RequestSpec&) = default;
};

/// `count` identical devices sharing one profile, network and workload.
struct DeviceFleet {
  std::string name;
  std::string profile_ref;
  Selection select;
  double count = 0.0;
  std::string network_ref;
  std::vector<RequestSpec> workload;

  model::DevicePowerProfile profile;  ///< resolved
  model::NetworkProfile network;      ///< resolved
  friend bool operator==(const DeviceFleet&, const DeviceFleet&) = default;
};

struct ServerFleet {
  std::string profile_ref;
  Selection select;
  double count = 0.0;  ///< |Sigma_s|, origin plus surrogates
  model::ServerProfile profile;
  friend bool operator==(const ServerFleet&, const ServerFleet&) = default;
};

/// `count` identical source videos handled by the provider.
struct VideoAssetSpec {
  std::string name;
  double count = 1.0;
  Time duration;
  std::vector<model::EncodeVariant> variants;
  double request_forecast = 0.0;  ///< requests per video over the horizon
  /// Servers holding every variant; one origin plus stored_on - 1 surrogate
  /// copies. Zero means the video is not stored.
  double stored_on = 1.0;
  double stored_fraction_of_year = 1.0;
  bool uploaded = true;  ///< whether Rx and transcoding happen for this asset
  std::optional<DataSize> source_size;
  std::optional<Power> p_dec;  ///< overrides the server's decoding power

  DataSize received_size() const;
  Power decode_power(const model::ServerProfile& server) const;
  friend bool operator==(const VideoAssetSpec&, const VideoAssetSpec&) = default;
};

struct EncoderOptionSpec {
  std::string label;
  Power p_enc;
  DataSize output_size;
  friend bool operator==(const EncoderOptionSpec&, const EncoderOptionSpec&) = default;
};

struct PortfolioEntry {
  double videos = 0.0;
  double forecast = 0.0;
  friend bool operator==(const PortfolioEntry&, const PortfolioEntry&) = default;
};

struct LadderSpec {
  std::vector<EncoderOptionSpec> variants;
  double surrogates = 0.0;
  std::vector<double> forecasts;
  friend bool operator==(const LadderSpec&, const LadderSpec&) = default;
};

/// Inputs for the encoder and CDN what-if tools, attached to one asset.
struct OptimizationSpec {
  std::size_t asset = 0;
  std::vector<EncoderOptionSpec> encoder_options;
  double forecast = 1.0;
  std::vector<PortfolioEntry> portfolio;
  std::optional<LadderSpec> ladder;
  std::vector<double> surrogate_counts;
  friend bool operator==(const OptimizationSpec&, const OptimizationSpec&) = default;
};

struct Scenario {
  std::string name;
  std::string description;
  Time horizon = units::year;
  model::CarbonIntensity carbon_intensity;
  ParameterCatalog profiles;  ///< document-local entries shadowing the builtin catalog
  std::vector<DeviceFleet> device_fleets;
  ServerFleet servers;
  std::string cdn_network_ref;
  model::NetworkProfile cdn_network;
  std::vector<VideoAssetSpec> assets;
  std::optional<OptimizationSpec> optimization;

  /// Builtin catalog shadowed by this scenario's own profiles.
  ParameterCatalog effective_catalog() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses and validates a UTF-8 JSON scenario document.
Scenario load_scenario(std::string_view document);

/// Reads a scenario from "builtin:<name>" or a file path.
Scenario load_scenario_source(std::string_view source);

/// Scenario document in canonical SI units; reparses to an equal Scenario.
std::string serialize(const Scenario& s);

/// Raw JSON text of a shipped scenario, or nullopt.
std::optional<std::string> builtin_document(std::string_view name);
std::vector<std::string> builtin_scenario_names();
std::vector<Scenario> builtin_scenarios();

/// Catalog in the scenario "profiles" format with provenance, as JSON text.
std::string dump_catalog(const ParameterCatalog& catalog);

/// Applies "a.b.0.c=value" to a JSON document before loading. Paths that
/// start with "catalog.<section>.<name>." shadow a builtin catalog entry.
std::string apply_overrides(std::string_view document, const std::vector<std::string>& overrides);

/// Re-checks every invariant of an already-built scenario (counts, stored_on
/// against the server fleet, ...). load_scenario calls this.
void validate(const Scenario& s);

}  // namespace videnergy::scenario
