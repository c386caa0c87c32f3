#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "videnergy/model.hpp"
#include "videnergy/quantity.hpp"

namespace videnergy::scenario {

/// A literature value that is either a point or a (low, high) range.
/// `qualifier` keeps wording such as "min." or "up to" from the source.
template <class Q>
struct Ranged {
  Q low;
  Q high;
  std::string qualifier;

  static Ranged point(Q v, std::string qualifier = {}) { return {v, v, std::move(qualifier)}; }
  bool is_point() const { return low == high; }
  friend bool operator==(const Ranged&, const Ranged&) = default;
};

struct DeviceEntry {
  std::string name;
  Ranged<Power> offset;
  Ranged<Power> rx;
  Ranged<Power> tx;
  std::string provenance;
  std::string note;
  friend bool operator==(const DeviceEntry&, const DeviceEntry&) = default;
};

struct ServerEntry {
  std::string name;
  double pue = 1.0;
  Ranged<Energy> offset_per_year;
  Ranged<EnergyPerBit> send_per_bit;
  Ranged<EnergyPerBit> rx_per_bit;
  Ranged<StorageRate> store_per_bit;
  Ranged<Power> p_dec;
  Ranged<Power> p_enc;
  std::string provenance;
  std::string note;
  friend bool operator==(const ServerEntry&, const ServerEntry&) = default;
};

struct NetworkEntry {
  std::string name;
  Power offset;
  PowerPerRate per_rate;
  std::string provenance;
  std::string note;
  friend bool operator==(const NetworkEntry&, const NetworkEntry&) = default;
};

/// Named encoding or decoding energy per video second.
struct CodecPreset {
  std::string name;
  Power power;
  std::string provenance;
  friend bool operator==(const CodecPreset&, const CodecPreset&) = default;
};

/// Per-field choice for ranged catalog values: "low", "high" or an explicit
/// quantity such as "0 kWh". The key "*" applies to every unlisted field.
struct Selection {
  std::map<std::string, std::string> choices;
  friend bool operator==(const Selection&, const Selection&) = default;
};

class ParameterCatalog {
 public:
  std::vector<DeviceEntry> devices;
  std::vector<ServerEntry> servers;
  std::vector<NetworkEntry> networks;
  std::vector<CodecPreset> encoders;
  std::vector<CodecPreset> decoders;

  const DeviceEntry* find_device(std::string_view name) const;
  const ServerEntry* find_server(std::string_view name) const;
  const NetworkEntry* find_network(std::string_view name) const;
  const CodecPreset* find_encoder(std::string_view name) const;
  const CodecPreset* find_decoder(std::string_view name) const;

  /// Returns a copy where every entry of `overlay` replaces the same-named
  /// entry (or is appended). The receiver is left untouched.
  ParameterCatalog shadowed_by(const ParameterCatalog& overlay) const;

  bool empty() const;

  /// Throws Error(invalid_value) on duplicate names within a section.
  void validate() const;

  friend bool operator==(const ParameterCatalog&, const ParameterCatalog&) = default;
};

/// Built-in literature parameters. Immutable; scenarios may only shadow.
const ParameterCatalog& builtin_catalog();

model::DevicePowerProfile resolve_device(const DeviceEntry& entry, const Selection& select,
                                         const std::string& path);
model::ServerProfile resolve_server(const ServerEntry& entry, const Selection& select,
                                    const std::string& path);
model::NetworkProfile resolve_network(const NetworkEntry& entry);

}  // namespace videnergy::scenario
