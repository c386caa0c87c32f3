#include "videnergy/catalog.hpp"

#include <algorithm>
#include <set>

#include "videnergy/error.hpp"

namespace videnergy::scenario {

namespace {

template <class Q>
Q q(std::string_view text) {
  return as_quantity<Q::dim>(parse_quantity(text));
}

template <class Q>
Ranged<Q> range(std::string_view low, std::string_view high) {
  return {q<Q>(low), q<Q>(high), {}};
}

template <class Q>
Ranged<Q> point(std::string_view v, std::string qualifier = {}) {
  return Ranged<Q>::point(q<Q>(v), std::move(qualifier));
}

ParameterCatalog make_builtin() {
  ParameterCatalog c;
  const std::string malmodin = "Malmodin et al. 2020, rough per-device estimates (offset power only)";
  c.devices = {
      {"samsung-galaxy-s3", point<Power>("805 mW"), range<Power>("279 mW", "1524 mW"),
       point<Power>("1.809 W", "min."),
       "Carroll & Heiser 2013; offset is airplane-mode idle, Rx is playback power minus idle, "
       "local playback and capture",
       "Tx is a reported lower bound; whether it already includes the offset is not stated"},
      {"fairphone-2", point<Power>("900 mW"), point<Power>("2.21 W", "up to"),
       point<Power>("0 W", "not reported"), "Herglotz et al. 2020, Wi-Fi streaming",
       "Rx is an upper bound over the measured video parameter space"},
      {"htc-g1", point<Power>("319 mW"), point<Power>("0 W", "not reported"),
       point<Power>("1.05 W", "min."), "Hao et al. 2011, Wi-Fi connection", "Tx is a reported lower bound"},
      {"tablet", point<Power>("10 W"), point<Power>("0 W", "not reported"),
       point<Power>("0 W", "not reported"), malmodin, ""},
      {"laptop", point<Power>("20 W"), point<Power>("0 W", "not reported"),
       point<Power>("0 W", "not reported"), malmodin, ""},
      {"tv", point<Power>("100 W"), point<Power>("0 W", "not reported"),
       point<Power>("0 W", "not reported"), malmodin, ""},
      {"pc", point<Power>("100 W"), point<Power>("0 W", "not reported"),
       point<Power>("0 W", "not reported"), malmodin, ""},
  };

  c.servers = {
      {"server-default", 1.08, range<Energy>("127 kWh", "5.57 MWh"), point<EnergyPerBit>("0.624 mWh/MByte"),
       point<EnergyPerBit>("0.624 mWh/MByte"), point<StorageRate>("0.59 Wh/MByte-yr"),
       range<Power>("719 mJ/s_video", "24.45 J/s_video"), range<Power>("200 mJ/s_video", "90 kJ/s_video"),
       "PUE: Uzaman et al. 2019 (social network DC); idle energy per server-year: Dayarathna et al. 2016; "
       "send/receive/store per bit: Bianco et al. 2016 CDN model; encoding: Zhang et al. 2018 (hardware) "
       "to Penny et al. 2016 (software); decoding: Herglotz et al. 2018 (hardware) to 2015 (HEVC software)",
       "codec energies refer to HD video at 30 fps and 2 Mbit/s; idle energy has no default and must be "
       "selected"},
  };

  const std::string malmodin_nw = "Malmodin et al. 2020, request-based transmission model";
  c.networks = {
      {"fixed-bb", q<Power>("1.5 W"), q<PowerPerRate>("0.03 W/Mbps"), malmodin_nw,
       "fixed broadband access; also used for CDN copy traffic"},
      {"mobile-4g", q<Power>("0.2 W"), q<PowerPerRate>("0.03 W/Mbps"), malmodin_nw, "mobile broadband access"},
      {"optical-link", q<Power>("0 W"), q<PowerPerRate>("0.1 W/Mbps"), malmodin_nw,
       "high-capacity core link; rate term only"},
      {"atlantic-cable", q<Power>("0 W"), q<PowerPerRate>("0.05 W/Mbps"), malmodin_nw,
       "submarine cable; rate term only"},
  };

  c.encoders = {
      {"hw-low", q<Power>("200 mJ/s_video"), "Zhang et al. 2018, low-power hardware encoder chip"},
      {"sw-high", q<Power>("90 kJ/s_video"), "Penny et al. 2016, maximum-compression software encoder"},
      {"social-sw", q<Power>("1 kJ/s_video"),
       "software encoding with a lighter preset, assumed for user-generated uploads"},
  };
  c.decoders = {
      {"hw-dec", q<Power>("719 mJ/s_video"), "Herglotz et al. 2018, hardware decoding"},
      {"sw-dec", q<Power>("24.45 J/s_video"), "Herglotz et al. 2015, HEVC software decoding"},
  };
  c.validate();
  return c;
}

template <class T>
const T* find_by_name(const std::vector<T>& v, std::string_view name) {
  auto it = std::find_if(v.begin(), v.end(), [&](const T& e) { return e.name == name; });
  return it == v.end() ? nullptr : &*it;
}

template <class T>
void overlay_into(std::vector<T>& base, const std::vector<T>& overlay) {
  for (const auto& e : overlay) {
    auto it = std::find_if(base.begin(), base.end(), [&](const T& b) { return b.name == e.name; });
    if (it == base.end())
      base.push_back(e);
    else
      *it = e;
  }
}

template <class T>
void check_unique(const std::vector<T>& v, std::string_view section) {
  std::set<std::string> seen;
  for (const auto& e : v) {
    if (e.name.empty())
      throw Error(ErrorCode::invalid_value, std::string(section), "entry without a name");
    if (!seen.insert(e.name).second)
      throw Error(ErrorCode::invalid_value, std::string(section) + "." + e.name, "duplicate name");
  }
}

template <class Q>
Q pick(const Ranged<Q>& r, const std::string& field, const Selection& select, const std::string& path) {
  auto it = select.choices.find(field);
  if (it == select.choices.end()) it = select.choices.find("*");
  const std::string where = path + "." + field;
  if (it == select.choices.end()) {
    if (r.is_point()) return r.low;
    throw Error(ErrorCode::invalid_value, where,
                "catalog value is a range; select \"low\", \"high\" or an explicit value");
  }
  const std::string& choice = it->second;
  if (choice == "low") return r.low;
  if (choice == "high") return r.high;
  DynamicQuantity v;
  try {
    v = parse_quantity(choice);
  } catch (const Error& e) {
    throw Error(e.code(), where, e.message());
  }
  // "5.57 MWh/yr" is accepted wherever a per-year energy is expected.
  if constexpr (Q::dim == dims::energy) {
    if (v.dim == dims::power) v = {v.si * units::year.si(), dims::energy};
  }
  return as_quantity<Q::dim>(v, where);
}

}  // namespace

const DeviceEntry* ParameterCatalog::find_device(std::string_view name) const { return find_by_name(devices, name); }
const ServerEntry* ParameterCatalog::find_server(std::string_view name) const { return find_by_name(servers, name); }
const NetworkEntry* ParameterCatalog::find_network(std::string_view name) const {
  return find_by_name(networks, name);
}
const CodecPreset* ParameterCatalog::find_encoder(std::string_view name) const { return find_by_name(encoders, name); }
const CodecPreset* ParameterCatalog::find_decoder(std::string_view name) const { return find_by_name(decoders, name); }

ParameterCatalog ParameterCatalog::shadowed_by(const ParameterCatalog& overlay) const {
  ParameterCatalog out = *this;
  overlay_into(out.devices, overlay.devices);
  overlay_into(out.servers, overlay.servers);
  overlay_into(out.networks, overlay.networks);
  overlay_into(out.encoders, overlay.encoders);
  overlay_into(out.decoders, overlay.decoders);
  return out;
}

bool ParameterCatalog::empty() const {
  return devices.empty() && servers.empty() && networks.empty() && encoders.empty() && decoders.empty();
}

void ParameterCatalog::validate() const {
  check_unique(devices, "devices");
  check_unique(servers, "servers");
  check_unique(networks, "networks");
  check_unique(encoders, "encoders");
  check_unique(decoders, "decoders");
}

const ParameterCatalog& builtin_catalog() {
  static const ParameterCatalog catalog = make_builtin();
  return catalog;
}

model::DevicePowerProfile resolve_device(const DeviceEntry& entry, const Selection& select,
                                         const std::string& path) {
  return model::DevicePowerProfile::make(entry.name, pick(entry.offset, "p_offset", select, path),
                                         pick(entry.rx, "p_rx", select, path), pick(entry.tx, "p_tx", select, path));
}

model::ServerProfile resolve_server(const ServerEntry& entry, const Selection& select, const std::string& path) {
  double pue = entry.pue;
  if (auto it = select.choices.find("pue"); it != select.choices.end()) {
    auto v = parse_quantity(it->second);
    check_dim(v, dims::none, path + ".pue");
    pue = v.si;
  }
  return model::ServerProfile::make(entry.name, pue, pick(entry.offset_per_year, "offset_per_year", select, path),
                                    pick(entry.send_per_bit, "e_send", select, path),
                                    pick(entry.rx_per_bit, "e_rx", select, path),
                                    pick(entry.store_per_bit, "e_store", select, path),
                                    pick(entry.p_dec, "p_dec", select, path), pick(entry.p_enc, "p_enc", select, path));
}

model::NetworkProfile resolve_network(const NetworkEntry& entry) {
  return model::NetworkProfile::make(entry.name, entry.offset, entry.per_rate);
}

}  // namespace videnergy::scenario
