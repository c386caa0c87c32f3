#include "videnergy/model.hpp"

#include <string>

#include "videnergy/error.hpp"

namespace videnergy::model {

void require_nonnegative(double v, std::string_view what) {
  if (!is_finite_nonnegative(v))
    throw Error(ErrorCode::invalid_value, std::string(what),
                "must be finite and >= 0, got " + format_number(v));
}

namespace {
void require_positive(double v, std::string_view what) {
  require_nonnegative(v, what);
  if (v == 0.0) throw Error(ErrorCode::invalid_value, std::string(what), "must be > 0");
}
}  // namespace

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::rx: return "rx";
    case Direction::tx: return "tx";
    case Direction::bidirectional: return "bidirectional";
  }
  return "rx";
}

Direction direction_from_string(std::string_view s) {
  if (s == "rx") return Direction::rx;
  if (s == "tx") return Direction::tx;
  if (s == "bidirectional") return Direction::bidirectional;
  throw Error(ErrorCode::invalid_value, "", "unknown direction \"" + std::string(s) + "\"");
}

DevicePowerProfile DevicePowerProfile::make(std::string name, Power offset, Power rx, Power tx) {
  require_nonnegative(offset.si(), name + ".p_offset");
  require_nonnegative(rx.si(), name + ".p_rx");
  require_nonnegative(tx.si(), name + ".p_tx");
  return {std::move(name), offset, rx, tx};
}

StreamRequest StreamRequest::make(Time duration, DataRate bitrate, Direction direction,
                                  std::optional<DataSize> size_override) {
  require_positive(duration.si(), "request.duration");
  require_positive(bitrate.si(), "request.bitrate");
  StreamRequest r;
  r.duration_ = duration;
  r.bitrate_ = bitrate;
  r.direction_ = direction;
  if (size_override) {
    require_nonnegative(size_override->si(), "request.video_size");
    r.video_size_ = *size_override;
    r.size_overridden_ = true;
  } else {
    r.video_size_ = bitrate * duration;
  }
  return r;
}

ServerProfile ServerProfile::make(std::string name, double pue, Energy offset_per_year, EnergyPerBit send,
                                  EnergyPerBit rx, StorageRate store, Power p_dec, Power p_enc) {
  if (!std::isfinite(pue) || pue < 1.0)
    throw Error(ErrorCode::invalid_value, name + ".pue", "PUE must be >= 1, got " + format_number(pue));
  require_nonnegative(offset_per_year.si(), name + ".offset_per_year");
  require_nonnegative(send.si(), name + ".e_send");
  require_nonnegative(rx.si(), name + ".e_rx");
  require_nonnegative(store.si(), name + ".e_store");
  require_nonnegative(p_dec.si(), name + ".p_dec");
  require_nonnegative(p_enc.si(), name + ".p_enc");
  return {std::move(name), pue, offset_per_year, send, rx, store, p_dec, p_enc};
}

EncodeVariant EncodeVariant::make(std::string label, Power p_enc, DataSize output_size) {
  require_nonnegative(p_enc.si(), label + ".p_enc");
  require_positive(output_size.si(), label + ".output_size");
  return {std::move(label), p_enc, output_size};
}

TranscodeJob TranscodeJob::make(Time source_duration, std::vector<EncodeVariant> variants) {
  require_positive(source_duration.si(), "transcode.source_duration");
  return {source_duration, std::move(variants)};
}

NetworkProfile NetworkProfile::make(std::string name, Power offset, PowerPerRate per_rate) {
  require_nonnegative(offset.si(), name + ".p_offset");
  require_nonnegative(per_rate.si(), name + ".p_rate");
  return {std::move(name), offset, per_rate};
}

CarbonIntensity CarbonIntensity::grams_per_kwh(double g) {
  require_nonnegative(g, "carbon_intensity");
  return {g * units::g_per_kWh};
}

Energy ut_request_energy(const DevicePowerProfile& profile, const StreamRequest& request) {
  const Direction d = request.direction();
  Power p = profile.offset;
  if (d == Direction::rx || d == Direction::bidirectional) p += profile.rx;
  if (d == Direction::tx || d == Direction::bidirectional) p += profile.tx;
  return p * request.duration();
}

Energy ut_device_energy(const DevicePowerProfile& profile, std::span<const WeightedRequest> workload) {
  Energy e;
  for (const auto& w : workload) {
    require_nonnegative(w.multiplicity, "workload.multiplicity");
    e += w.multiplicity * ut_request_energy(profile, w.request);
  }
  return e;
}

Energy ut_fleet_energy(std::span<const FleetEntry> fleet) {
  Energy e;
  for (const auto& entry : fleet) {
    require_nonnegative(entry.multiplicity, "fleet.multiplicity");
    e += entry.multiplicity * ut_device_energy(entry.profile, entry.workload);
  }
  return e;
}

Energy vp_transfer_energy(DataSize bits, EnergyPerBit per_bit) {
  require_nonnegative(bits.si(), "transfer.bits");
  return bits * per_bit;
}

Energy vp_decode_energy(const TranscodeJob& job, Power p_dec) { return p_dec * job.source_duration; }

Energy vp_encode_energy(const TranscodeJob& job) {
  Energy e;
  for (const auto& v : job.variants) e += v.p_enc * job.source_duration;
  return e;
}

Energy vp_transcode_energy(const TranscodeJob& job, Power p_dec) {
  return vp_decode_energy(job, p_dec) + vp_encode_energy(job);
}

Energy vp_storage_energy(std::span<const DataSize> stored, StorageRate per_bit_year,
                         double stored_fraction_of_year) {
  if (!(stored_fraction_of_year >= 0.0 && stored_fraction_of_year <= 1.0))
    throw Error(ErrorCode::invalid_value, "stored_fraction_of_year",
                "must lie in [0, 1], got " + format_number(stored_fraction_of_year));
  DataSize total;
  for (auto b : stored) total += b;
  return per_bit_year * (stored_fraction_of_year * units::year) * total;
}

Energy vp_server_energy(const ServerTaskEnergies& p) {
  return p.offset + p.rx + p.transcode + p.copy + p.store + p.tx;
}

Energy vp_provider_energy(std::span<const ServerLoad> servers) {
  Energy e;
  for (const auto& s : servers) e += s.profile.pue * vp_server_energy(s.tasks);
  return e;
}

Energy nw_request_energy(const NetworkProfile& profile, const StreamRequest& request) {
  return (profile.offset + profile.per_rate * request.bitrate()) * request.duration();
}

NetworkEnergy nw_energy(std::span<const NetworkPath> ut_paths, std::span<const NetworkPath> cdn_paths) {
  NetworkEnergy out;
  for (const auto& p : ut_paths) {
    require_nonnegative(p.multiplicity, "nw.multiplicity");
    out.end_users += p.multiplicity * nw_request_energy(p.profile, p.request);
  }
  for (const auto& p : cdn_paths) {
    require_nonnegative(p.multiplicity, "nw.multiplicity");
    out.cdn += p.multiplicity * nw_request_energy(p.profile, p.request);
  }
  return out;
}

Energy service_energy(Energy ut, Energy vp, Energy nw) { return ut + vp + nw; }

Energy global_energy(std::span<const Energy> services) {
  Energy e;
  for (auto s : services) e += s;
  return e;
}

Mass ghg_emissions(Energy e, const CarbonIntensity& ci) {
  require_nonnegative(e.si(), "ghg.energy");
  return e * ci.value;
}

}  // namespace videnergy::model
