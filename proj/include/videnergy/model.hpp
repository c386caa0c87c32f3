#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "videnergy/quantity.hpp"

// Closed-form energy accounting for an online video service: end-user
// terminals (UT), video-provider servers (VP) and transmission networks (NW).
// Every function here is pure; all inputs are validated on construction.
namespace videnergy::model {

enum class Direction { rx, tx, bidirectional };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);

/// Offset, receive/playback and capture/upload power of one device class.
struct DevicePowerProfile {
  std::string name;
  Power offset;
  Power rx;
  Power tx;

  static DevicePowerProfile make(std::string name, Power offset, Power rx, Power tx);
  friend bool operator==(const DevicePowerProfile&, const DevicePowerProfile&) = default;
};

/// One streaming event: duration t_r, bitrate b_r, and the video size B_r.
class StreamRequest {
 public:
  /// Size defaults to bitrate * duration unless `size_override` is given.
  static StreamRequest make(Time duration, DataRate bitrate, Direction direction,
                            std::optional<DataSize> size_override = std::nullopt);

  Time duration() const { return duration_; }
  DataRate bitrate() const { return bitrate_; }
  Direction direction() const { return direction_; }
  DataSize video_size() const { return video_size_; }
  bool size_overridden() const { return size_overridden_; }

  friend bool operator==(const StreamRequest&, const StreamRequest&) = default;

 private:
  StreamRequest() = default;
  Time duration_;
  DataRate bitrate_;
  Direction direction_ = Direction::rx;
  DataSize video_size_;
  bool size_overridden_ = false;
};

/// Per-server energy parameters. `offset_per_year` is the idle energy of one
/// server over a full year; send energy is also used for surrogate copies.
struct ServerProfile {
  std::string name;
  double pue = 1.0;
  Energy offset_per_year;
  EnergyPerBit send_per_bit;
  EnergyPerBit rx_per_bit;
  StorageRate store_per_bit;
  Power p_dec;  ///< decoding energy per video second
  Power p_enc;  ///< default encoding energy per video second

  static ServerProfile make(std::string name, double pue, Energy offset_per_year, EnergyPerBit send,
                            EnergyPerBit rx, StorageRate store, Power p_dec, Power p_enc);
  friend bool operator==(const ServerProfile&, const ServerProfile&) = default;
};

/// One output of a transcoding job.
struct EncodeVariant {
  std::string label;
  Power p_enc;
  DataSize output_size;

  static EncodeVariant make(std::string label, Power p_enc, DataSize output_size);
  friend bool operator==(const EncodeVariant&, const EncodeVariant&) = default;
};

struct TranscodeJob {
  Time source_duration;
  std::vector<EncodeVariant> variants;

  static TranscodeJob make(Time source_duration, std::vector<EncodeVariant> variants);
};

/// Request-based network path: constant offset plus a bitrate-proportional term.
struct NetworkProfile {
  std::string name;
  Power offset;
  PowerPerRate per_rate;

  static NetworkProfile make(std::string name, Power offset, PowerPerRate per_rate);
  friend bool operator==(const NetworkProfile&, const NetworkProfile&) = default;
};

struct CarbonIntensity {
  CarbonIntensityValue value;

  static CarbonIntensity grams_per_kwh(double g);
  double in_grams_per_kwh() const { return value.in(units::g_per_kWh); }
  friend bool operator==(const CarbonIntensity&, const CarbonIntensity&) = default;
};

// ---------------------------------------------------------------- end users

Energy ut_request_energy(const DevicePowerProfile& profile, const StreamRequest& request);

struct WeightedRequest {
  StreamRequest request;
  double multiplicity = 1.0;
};

/// `multiplicity` identical devices, each running the whole workload.
struct FleetEntry {
  DevicePowerProfile profile;
  std::vector<WeightedRequest> workload;
  double multiplicity = 1.0;
};

Energy ut_device_energy(const DevicePowerProfile& profile, std::span<const WeightedRequest> workload);
Energy ut_fleet_energy(std::span<const FleetEntry> fleet);

// ---------------------------------------------------------------- providers

/// bits * per-bit energy. Serves Tx to end users, surrogate copies and Rx.
Energy vp_transfer_energy(DataSize bits, EnergyPerBit per_bit);

/// Decoding counted once per job, encoding once per output variant.
Energy vp_transcode_energy(const TranscodeJob& job, Power p_dec);
Energy vp_decode_energy(const TranscodeJob& job, Power p_dec);
Energy vp_encode_energy(const TranscodeJob& job);

Energy vp_storage_energy(std::span<const DataSize> stored, StorageRate per_bit_year,
                         double stored_fraction_of_year = 1.0);

struct ServerTaskEnergies {
  Energy offset;
  Energy rx;
  Energy transcode;
  Energy copy;
  Energy store;
  Energy tx;
};

Energy vp_server_energy(const ServerTaskEnergies& parts);

struct ServerLoad {
  ServerProfile profile;
  ServerTaskEnergies tasks;
};

/// Sum over servers of PUE times the per-server sum.
Energy vp_provider_energy(std::span<const ServerLoad> servers);

// ---------------------------------------------------------------- networks

Energy nw_request_energy(const NetworkProfile& profile, const StreamRequest& request);

struct NetworkPath {
  NetworkProfile profile;
  StreamRequest request;
  double multiplicity = 1.0;
};

struct NetworkEnergy {
  Energy end_users;  ///< E_NW,UT
  Energy cdn;        ///< E_NW,CDN
  Energy total() const { return end_users + cdn; }
};

NetworkEnergy nw_energy(std::span<const NetworkPath> ut_paths, std::span<const NetworkPath> cdn_paths);

// ---------------------------------------------------------------- aggregates

Energy service_energy(Energy ut, Energy vp, Energy nw);
Energy global_energy(std::span<const Energy> services);
Mass ghg_emissions(Energy e, const CarbonIntensity& ci);

/// Throws Error(invalid_value) unless `v` is finite and >= 0.
void require_nonnegative(double v, std::string_view what);

}  // namespace videnergy::model
