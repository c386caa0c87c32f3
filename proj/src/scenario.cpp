#include "videnergy/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "videnergy/error.hpp"

namespace videnergy::detail {
const std::vector<std::pair<std::string_view, std::string_view>>& builtin_documents();
}

namespace videnergy::scenario {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string join(const std::string& a, std::string_view b) {
  return a.empty() ? std::string(b) : a + "." + std::string(b);
}
std::string join(const std::string& a, std::size_t i) { return a + "." + std::to_string(i); }

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::schema, path, msg);
}

// Runs `f`, relocating any library error under `path`.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw e.at(path);
  }
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      schema_error(join(path, it.key()), "unknown key");
  }
}

const json& require_key(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) schema_error(join(path, key), "missing required key");
  return *it;
}

const json* optional_key(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

bool read_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) schema_error(path, "expected true or false");
  return j.get<bool>();
}

double read_count(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double v = j.get<double>();
  if (!is_finite_nonnegative(v))
    throw Error(ErrorCode::invalid_value, path, "must be finite and >= 0, got " + format_number(v));
  return v;
}

std::vector<double> read_counts(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_count(j[i], join(path, i)));
  return out;
}

DynamicQuantity read_dynamic(const json& j, const std::string& path) {
  if (j.is_string()) return at_path(path, [&] { return parse_quantity(j.get<std::string>()); });
  if (j.is_object()) {
    check_keys(j, path, {"value", "unit"});
    const json& v = require_key(j, path, "value");
    if (!v.is_number()) schema_error(join(path, "value"), "expected a number");
    const std::string unit = read_string(require_key(j, path, "unit"), join(path, "unit"));
    auto u = at_path(join(path, "unit"), [&] { return parse_unit(unit); });
    return {v.get<double>() * u.si, u.dim};
  }
  if (j.is_number()) return {j.get<double>(), dims::none};
  schema_error(path, "expected a quantity string such as \"100 W\" or {value, unit}");
}

template <class Q>
Q read_q(const json& j, const std::string& path) {
  auto v = read_dynamic(j, path);
  check_dim(v, Q::dim, path);
  model::require_nonnegative(v.si, path);
  return Q{v.si};
}

template <class Q>
Q read_positive(const json& j, const std::string& path) {
  Q q = read_q<Q>(j, path);
  if (q.si() == 0.0) throw Error(ErrorCode::invalid_value, path, "must be > 0");
  return q;
}

template <class Q>
Ranged<Q> read_ranged(const json& j, const std::string& path) {
  if (j.is_object() && j.contains("low")) {
    check_keys(j, path, {"low", "high", "qualifier"});
    Ranged<Q> r{read_q<Q>(require_key(j, path, "low"), join(path, "low")),
                read_q<Q>(require_key(j, path, "high"), join(path, "high")), {}};
    if (auto* q = optional_key(j, "qualifier")) r.qualifier = read_string(*q, join(path, "qualifier"));
    if (r.high < r.low) throw Error(ErrorCode::invalid_value, path, "low exceeds high");
    return r;
  }
  if (j.is_object() && j.contains("qualifier")) {
    check_keys(j, path, {"value", "unit", "qualifier"});
    std::string qualifier = read_string(j["qualifier"], join(path, "qualifier"));
    json bare = j;
    bare.erase("qualifier");
    const json& v = bare.contains("unit") ? bare : require_key(j, path, "value");
    return Ranged<Q>::point(read_q<Q>(v, path), std::move(qualifier));
  }
  return Ranged<Q>::point(read_q<Q>(j, path));
}

Selection read_selection(const json& j, const std::string& path) {
  require_object(j, path);
  Selection s;
  for (auto it = j.begin(); it != j.end(); ++it)
    s.choices[it.key()] = read_string(it.value(), join(path, it.key()));
  return s;
}

std::string read_provenance(const json& j, const std::string& path, const char* key) {
  auto* p = optional_key(j, key);
  return p ? read_string(*p, join(path, key)) : std::string{};
}

// ------------------------------------------------------------------ catalog

ParameterCatalog read_catalog(const json& j, const std::string& path) {
  check_keys(j, path, {"devices", "servers", "networks", "encoders", "decoders"});
  ParameterCatalog c;
  auto each = [&](const char* section, auto&& f) {
    auto* arr = optional_key(j, section);
    if (!arr) return;
    const std::string sp = join(path, section);
    if (!arr->is_array()) schema_error(sp, "expected an array");
    for (std::size_t i = 0; i < arr->size(); ++i) f((*arr)[i], join(sp, i));
  };
  each("devices", [&](const json& e, const std::string& p) {
    check_keys(e, p, {"name", "p_offset", "p_rx", "p_tx", "provenance", "note"});
    c.devices.push_back({read_string(require_key(e, p, "name"), join(p, "name")),
                         read_ranged<Power>(require_key(e, p, "p_offset"), join(p, "p_offset")),
                         read_ranged<Power>(require_key(e, p, "p_rx"), join(p, "p_rx")),
                         read_ranged<Power>(require_key(e, p, "p_tx"), join(p, "p_tx")),
                         read_provenance(e, p, "provenance"), read_provenance(e, p, "note")});
  });
  each("servers", [&](const json& e, const std::string& p) {
    check_keys(e, p,
               {"name", "pue", "offset_per_year", "e_send", "e_rx", "e_store", "p_dec", "p_enc", "provenance",
                "note"});
    ServerEntry s;
    s.name = read_string(require_key(e, p, "name"), join(p, "name"));
    auto pue = read_dynamic(require_key(e, p, "pue"), join(p, "pue"));
    check_dim(pue, dims::none, join(p, "pue"));
    if (!std::isfinite(pue.si) || pue.si < 1.0)
      throw Error(ErrorCode::invalid_value, join(p, "pue"), "PUE must be >= 1");
    s.pue = pue.si;
    s.offset_per_year = read_ranged<Energy>(require_key(e, p, "offset_per_year"), join(p, "offset_per_year"));
    s.send_per_bit = read_ranged<EnergyPerBit>(require_key(e, p, "e_send"), join(p, "e_send"));
    s.rx_per_bit = read_ranged<EnergyPerBit>(require_key(e, p, "e_rx"), join(p, "e_rx"));
    s.store_per_bit = read_ranged<StorageRate>(require_key(e, p, "e_store"), join(p, "e_store"));
    s.p_dec = read_ranged<Power>(require_key(e, p, "p_dec"), join(p, "p_dec"));
    s.p_enc = read_ranged<Power>(require_key(e, p, "p_enc"), join(p, "p_enc"));
    s.provenance = read_provenance(e, p, "provenance");
    s.note = read_provenance(e, p, "note");
    c.servers.push_back(std::move(s));
  });
  each("networks", [&](const json& e, const std::string& p) {
    check_keys(e, p, {"name", "p_offset", "p_rate", "provenance", "note"});
    c.networks.push_back({read_string(require_key(e, p, "name"), join(p, "name")),
                          read_q<Power>(require_key(e, p, "p_offset"), join(p, "p_offset")),
                          read_q<PowerPerRate>(require_key(e, p, "p_rate"), join(p, "p_rate")),
                          read_provenance(e, p, "provenance"), read_provenance(e, p, "note")});
  });
  auto codec = [](std::vector<CodecPreset>& out) {
    return [&out](const json& e, const std::string& p) {
      check_keys(e, p, {"name", "power", "provenance"});
      out.push_back({read_string(require_key(e, p, "name"), join(p, "name")),
                     read_q<Power>(require_key(e, p, "power"), join(p, "power")),
                     read_provenance(e, p, "provenance")});
    };
  };
  each("encoders", codec(c.encoders));
  each("decoders", codec(c.decoders));
  at_path(path, [&] { c.validate(); });
  return c;
}

// Canonical SI text: reparses to the identical double.
std::string si_text(DynamicQuantity q) {
  const std::string n = format_number(q.si);
  if (q.dim == dims::none) return n;
  if (q.dim == dims::energy) return n + " J";
  if (q.dim == dims::power) return n + " W";
  if (q.dim == dims::time) return n + " s";
  if (q.dim == dims::data_size) return n + " bit";
  if (q.dim == dims::data_rate) return n + " bit/s";
  if (q.dim == dims::energy_per_bit) return n + " J/bit";
  if (q.dim == dims::storage_rate) return n + " J/(bit*s)";
  if (q.dim == dims::mass) return n + " g";
  if (q.dim == dims::carbon_intensity) return n + " g/J";
  return n + " " + dim_name(q.dim);
}

template <Dim D>
std::string si_text(Quantity<D> q) {
  return si_text(dynamic(q));
}

// Formats a quantity for humans; `unit` empty means SI.
template <Dim D>
std::string text(Quantity<D> q, std::string_view unit) {
  return unit.empty() ? si_text(q) : format_in(dynamic(q), unit);
}

template <class Q>
ojson ranged_json(const Ranged<Q>& r, std::string_view unit) {
  if (r.is_point() && r.qualifier.empty()) return text(r.low, unit);
  ojson o;
  if (r.is_point()) {
    o["value"] = text(r.low, unit);
  } else {
    o["low"] = text(r.low, unit);
    o["high"] = text(r.high, unit);
  }
  if (!r.qualifier.empty()) o["qualifier"] = r.qualifier;
  return o;
}

void put_provenance(ojson& o, const std::string& provenance, const std::string& note) {
  if (!provenance.empty()) o["provenance"] = provenance;
  if (!note.empty()) o["note"] = note;
}

struct UnitStyle {
  bool friendly;
  std::string_view power() const { return friendly ? "W" : ""; }
  std::string_view energy() const { return friendly ? "kWh" : ""; }
  std::string_view per_bit() const { return friendly ? "mWh/MByte" : ""; }
  std::string_view store() const { return friendly ? "Wh/(MByte*yr)" : ""; }
  std::string_view per_rate() const { return friendly ? "W/Mbps" : ""; }
};

ojson device_json(const DeviceEntry& d, UnitStyle u) {
  ojson o;
  o["name"] = d.name;
  o["p_offset"] = ranged_json(d.offset, u.power());
  o["p_rx"] = ranged_json(d.rx, u.power());
  o["p_tx"] = ranged_json(d.tx, u.power());
  put_provenance(o, d.provenance, d.note);
  return o;
}

ojson server_json(const ServerEntry& s, UnitStyle u) {
  ojson o;
  o["name"] = s.name;
  o["pue"] = s.pue;
  o["offset_per_year"] = ranged_json(s.offset_per_year, u.energy());
  o["e_send"] = ranged_json(s.send_per_bit, u.per_bit());
  o["e_rx"] = ranged_json(s.rx_per_bit, u.per_bit());
  o["e_store"] = ranged_json(s.store_per_bit, u.store());
  o["p_dec"] = ranged_json(s.p_dec, u.power());
  o["p_enc"] = ranged_json(s.p_enc, u.power());
  put_provenance(o, s.provenance, s.note);
  return o;
}

ojson network_json(const NetworkEntry& n, UnitStyle u) {
  ojson o;
  o["name"] = n.name;
  o["p_offset"] = text(n.offset, u.power());
  o["p_rate"] = text(n.per_rate, u.per_rate());
  put_provenance(o, n.provenance, n.note);
  return o;
}

ojson codec_json(const CodecPreset& c, UnitStyle u) {
  ojson o;
  o["name"] = c.name;
  o["power"] = text(c.power, u.power());
  if (!c.provenance.empty()) o["provenance"] = c.provenance;
  return o;
}

ojson catalog_json(const ParameterCatalog& c, UnitStyle u) {
  ojson o = ojson::object();
  auto section = [&](const char* key, const auto& entries, auto&& f) {
    if (entries.empty()) return;
    ojson arr = ojson::array();
    for (const auto& e : entries) arr.push_back(f(e, u));
    o[key] = std::move(arr);
  };
  section("devices", c.devices, device_json);
  section("servers", c.servers, server_json);
  section("networks", c.networks, network_json);
  section("encoders", c.encoders, codec_json);
  section("decoders", c.decoders, codec_json);
  return o;
}

// ------------------------------------------------------------------ scenario

model::StreamRequest read_request_core(const json& j, const std::string& path, RequestSpec& spec) {
  check_keys(j, path, {"direction", "duration", "bitrate", "video_size", "per_device", "provider_served"});
  const std::string dir = read_string(require_key(j, path, "direction"), join(path, "direction"));
  const auto direction = at_path(join(path, "direction"), [&] { return model::direction_from_string(dir); });
  const Time duration = read_positive<Time>(require_key(j, path, "duration"), join(path, "duration"));
  const DataRate bitrate = read_positive<DataRate>(require_key(j, path, "bitrate"), join(path, "bitrate"));
  std::optional<DataSize> size;
  if (auto* v = optional_key(j, "video_size")) size = read_q<DataSize>(*v, join(path, "video_size"));
  if (auto* v = optional_key(j, "per_device")) spec.per_device = read_count(*v, join(path, "per_device"));
  if (auto* v = optional_key(j, "provider_served"))
    spec.provider_served = read_bool(*v, join(path, "provider_served"));
  return at_path(path, [&] { return model::StreamRequest::make(duration, bitrate, direction, size); });
}

RequestSpec read_request(const json& j, const std::string& path) {
  RequestSpec spec{model::StreamRequest::make(units::s, units::bps, model::Direction::rx), 1.0, true};
  spec.request = read_request_core(j, path, spec);
  return spec;
}

model::NetworkProfile resolve_network_ref(const ParameterCatalog& catalog, const std::string& name,
                                          const std::string& path) {
  const NetworkEntry* e = catalog.find_network(name);
  if (!e) throw Error(ErrorCode::unresolved_ref, path, "unknown network profile \"" + name + "\"");
  return at_path(path, [&] { return resolve_network(*e); });
}

DeviceFleet read_fleet(const json& j, const std::string& path, const ParameterCatalog& catalog) {
  check_keys(j, path, {"name", "profile", "select", "count", "network", "workload"});
  DeviceFleet f;
  f.profile_ref = read_string(require_key(j, path, "profile"), join(path, "profile"));
  f.name = f.profile_ref;
  if (auto* v = optional_key(j, "name")) f.name = read_string(*v, join(path, "name"));
  if (auto* v = optional_key(j, "select")) f.select = read_selection(*v, join(path, "select"));
  f.count = read_count(require_key(j, path, "count"), join(path, "count"));
  f.network_ref = read_string(require_key(j, path, "network"), join(path, "network"));
  const json& wl = require_key(j, path, "workload");
  if (!wl.is_array()) schema_error(join(path, "workload"), "expected an array");
  for (std::size_t i = 0; i < wl.size(); ++i) f.workload.push_back(read_request(wl[i], join(join(path, "workload"), i)));

  const DeviceEntry* e = catalog.find_device(f.profile_ref);
  if (!e)
    throw Error(ErrorCode::unresolved_ref, join(path, "profile"),
                "unknown device profile \"" + f.profile_ref + "\"");
  f.profile = at_path(path, [&] { return resolve_device(*e, f.select, path); });
  f.network = resolve_network_ref(catalog, f.network_ref, join(path, "network"));
  return f;
}

ServerFleet read_servers(const json& j, const std::string& path, const ParameterCatalog& catalog) {
  check_keys(j, path, {"profile", "select", "count"});
  ServerFleet s;
  s.count = read_count(require_key(j, path, "count"), join(path, "count"));
  if (auto* v = optional_key(j, "select")) s.select = read_selection(*v, join(path, "select"));
  s.profile_ref = read_string(require_key(j, path, "profile"), join(path, "profile"));
  const ServerEntry* e = catalog.find_server(s.profile_ref);
  if (!e)
    throw Error(ErrorCode::unresolved_ref, join(path, "profile"),
                "unknown server profile \"" + s.profile_ref + "\"");
  s.profile = at_path(path, [&] { return resolve_server(*e, s.select, path); });
  return s;
}

Power read_codec_power(const json& j, const std::string& path, const char* preset_key, const char* power_key,
                       const ParameterCatalog& catalog, std::optional<Power> fallback) {
  const json* preset = optional_key(j, preset_key);
  const json* power = optional_key(j, power_key);
  if (preset && power) schema_error(path, std::string("give either \"") + preset_key + "\" or \"" + power_key + "\"");
  if (power) return read_q<Power>(*power, join(path, power_key));
  if (preset) {
    const std::string name = read_string(*preset, join(path, preset_key));
    const CodecPreset* c = std::string_view(preset_key) == "encoder" ? catalog.find_encoder(name)
                                                                     : catalog.find_decoder(name);
    if (!c)
      throw Error(ErrorCode::unresolved_ref, join(path, preset_key),
                  std::string("unknown ") + preset_key + " preset \"" + name + "\"");
    return c->power;
  }
  if (fallback) return *fallback;
  schema_error(join(path, power_key), std::string("missing \"") + power_key + "\" or \"" + preset_key + "\"");
}

// Expands {"replicas": n} into n labelled copies.
std::vector<EncoderOptionSpec> read_options(const json& j, const std::string& path, const ParameterCatalog& catalog,
                                            std::optional<Power> fallback) {
  if (!j.is_array()) schema_error(path, "expected an array");
  std::vector<EncoderOptionSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = join(path, i);
    check_keys(j[i], p, {"label", "encoder", "p_enc", "output_size", "replicas"});
    EncoderOptionSpec o;
    o.label = read_string(require_key(j[i], p, "label"), join(p, "label"));
    o.p_enc = read_codec_power(j[i], p, "encoder", "p_enc", catalog, fallback);
    o.output_size = read_positive<DataSize>(require_key(j[i], p, "output_size"), join(p, "output_size"));
    double replicas = 1.0;
    if (auto* r = optional_key(j[i], "replicas")) {
      replicas = read_count(*r, join(p, "replicas"));
      if (replicas < 1.0 || replicas != std::floor(replicas) || replicas > 4096.0)
        throw Error(ErrorCode::invalid_value, join(p, "replicas"), "must be an integer in [1, 4096]");
    }
    if (replicas == 1.0) {
      out.push_back(std::move(o));
    } else {
      for (int k = 1; k <= static_cast<int>(replicas); ++k) {
        EncoderOptionSpec copy = o;
        copy.label = o.label + "-" + std::to_string(k);
        out.push_back(std::move(copy));
      }
    }
  }
  return out;
}

VideoAssetSpec read_asset(const json& j, const std::string& path, const ParameterCatalog& catalog,
                          const ServerFleet& servers) {
  check_keys(j, path,
             {"name", "count", "duration", "variants", "request_forecast", "stored_on", "stored_fraction_of_year",
              "uploaded", "source_size", "decoder", "p_dec"});
  VideoAssetSpec a;
  a.name = read_string(require_key(j, path, "name"), join(path, "name"));
  if (auto* v = optional_key(j, "count")) a.count = read_count(*v, join(path, "count"));
  a.duration = read_positive<Time>(require_key(j, path, "duration"), join(path, "duration"));
  if (auto* v = optional_key(j, "request_forecast")) a.request_forecast = read_count(*v, join(path, "request_forecast"));
  if (auto* v = optional_key(j, "stored_on")) a.stored_on = read_count(*v, join(path, "stored_on"));
  if (auto* v = optional_key(j, "stored_fraction_of_year")) {
    a.stored_fraction_of_year = read_count(*v, join(path, "stored_fraction_of_year"));
  }
  if (auto* v = optional_key(j, "uploaded")) a.uploaded = read_bool(*v, join(path, "uploaded"));
  if (auto* v = optional_key(j, "source_size")) a.source_size = read_q<DataSize>(*v, join(path, "source_size"));
  if (optional_key(j, "decoder") || optional_key(j, "p_dec"))
    a.p_dec = read_codec_power(j, path, "decoder", "p_dec", catalog, std::nullopt);

  const std::string vp = join(path, "variants");
  const json& vs = require_key(j, path, "variants");
  for (auto& o : read_options(vs, vp, catalog, servers.profile.p_enc))
    a.variants.push_back(model::EncodeVariant{o.label, o.p_enc, o.output_size});
  return a;
}

OptimizationSpec read_optimization(const json& j, const std::string& path, const ParameterCatalog& catalog,
                                   const Scenario& s) {
  check_keys(j, path, {"asset", "encoder_options", "forecast", "portfolio", "ladder", "surrogate_counts"});
  OptimizationSpec o;
  if (auto* v = optional_key(j, "asset")) {
    const double idx = read_count(*v, join(path, "asset"));
    if (idx != std::floor(idx)) throw Error(ErrorCode::invalid_value, join(path, "asset"), "must be an index");
    o.asset = static_cast<std::size_t>(idx);
  }
  if (o.asset >= s.assets.size())
    throw Error(ErrorCode::unresolved_ref, join(path, "asset"), "no asset with index " + std::to_string(o.asset));
  const std::optional<Power> fallback = s.servers.profile.p_enc;
  if (auto* v = optional_key(j, "encoder_options"))
    o.encoder_options = read_options(*v, join(path, "encoder_options"), catalog, fallback);
  o.forecast = s.assets[o.asset].request_forecast;
  if (auto* v = optional_key(j, "forecast")) o.forecast = read_count(*v, join(path, "forecast"));
  if (auto* v = optional_key(j, "portfolio")) {
    const std::string pp = join(path, "portfolio");
    if (!v->is_array()) schema_error(pp, "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string ep = join(pp, i);
      check_keys((*v)[i], ep, {"videos", "forecast"});
      o.portfolio.push_back({read_count(require_key((*v)[i], ep, "videos"), join(ep, "videos")),
                             read_count(require_key((*v)[i], ep, "forecast"), join(ep, "forecast"))});
    }
  }
  if (auto* v = optional_key(j, "ladder")) {
    const std::string lp = join(path, "ladder");
    check_keys(*v, lp, {"variants", "surrogates", "forecasts"});
    LadderSpec l;
    l.variants = read_options(require_key(*v, lp, "variants"), join(lp, "variants"), catalog, fallback);
    if (auto* sv = optional_key(*v, "surrogates")) l.surrogates = read_count(*sv, join(lp, "surrogates"));
    if (auto* fv = optional_key(*v, "forecasts")) l.forecasts = read_counts(*fv, join(lp, "forecasts"));
    o.ladder = std::move(l);
  }
  if (auto* v = optional_key(j, "surrogate_counts"))
    o.surrogate_counts = read_counts(*v, join(path, "surrogate_counts"));
  return o;
}

json parse_json(std::string_view document) {
  try {
    return json::parse(document);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, document.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (document[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::parse, "line " + std::to_string(line) + ", column " + std::to_string(col),
                "malformed JSON (" + std::string(e.what()) + ")");
  }
}

ojson option_json(const EncoderOptionSpec& o) {
  ojson v;
  v["label"] = o.label;
  v["p_enc"] = si_text(o.p_enc);
  v["output_size"] = si_text(o.output_size);
  return v;
}

ojson options_json(const std::vector<EncoderOptionSpec>& opts) {
  ojson arr = ojson::array();
  for (const auto& o : opts) arr.push_back(option_json(o));
  return arr;
}

ojson selection_json(const Selection& s) {
  ojson o = ojson::object();
  for (const auto& [k, v] : s.choices) o[k] = v;
  return o;
}

}  // namespace

DataSize VideoAssetSpec::received_size() const {
  if (source_size) return *source_size;
  return variants.empty() ? DataSize{} : variants.front().output_size;
}

Power VideoAssetSpec::decode_power(const model::ServerProfile& server) const { return p_dec ? *p_dec : server.p_dec; }

ParameterCatalog Scenario::effective_catalog() const { return builtin_catalog().shadowed_by(profiles); }

void validate(const Scenario& s) {
  model::require_nonnegative(s.horizon.si(), "horizon");
  if (s.horizon.si() == 0.0) throw Error(ErrorCode::invalid_value, "horizon", "must be > 0");
  model::require_nonnegative(s.carbon_intensity.value.si(), "carbon_intensity");
  s.profiles.validate();

  std::set<std::string> names;
  for (std::size_t i = 0; i < s.device_fleets.size(); ++i) {
    const auto& f = s.device_fleets[i];
    const std::string p = join("device_fleets", i);
    model::require_nonnegative(f.count, join(p, "count"));
    if (!names.insert(f.name).second) throw Error(ErrorCode::invalid_value, join(p, "name"), "duplicate fleet name");
    for (std::size_t k = 0; k < f.workload.size(); ++k)
      model::require_nonnegative(f.workload[k].per_device, join(join(join(p, "workload"), k), "per_device"));
  }
  model::require_nonnegative(s.servers.count, "servers.count");

  for (std::size_t i = 0; i < s.assets.size(); ++i) {
    const auto& a = s.assets[i];
    const std::string p = join("assets", i);
    model::require_nonnegative(a.count, join(p, "count"));
    model::require_nonnegative(a.request_forecast, join(p, "request_forecast"));
    model::require_nonnegative(a.stored_on, join(p, "stored_on"));
    if (a.duration.si() <= 0.0) throw Error(ErrorCode::invalid_value, join(p, "duration"), "must be > 0");
    if (a.stored_on > s.servers.count)
      throw Error(ErrorCode::invalid_value, join(p, "stored_on"),
                  "stored on " + format_number(a.stored_on) + " servers but the fleet has " +
                      format_number(s.servers.count));
    if (!(a.stored_fraction_of_year >= 0.0 && a.stored_fraction_of_year <= 1.0))
      throw Error(ErrorCode::invalid_value, join(p, "stored_fraction_of_year"), "must lie in [0, 1]");
    if (a.uploaded && a.count > 0.0 && s.servers.count < 1.0)
      throw Error(ErrorCode::invalid_value, join(p, "uploaded"), "an uploaded asset needs at least one server");
  }

  if (s.optimization) {
    const auto& o = *s.optimization;
    if (o.asset >= s.assets.size())
      throw Error(ErrorCode::unresolved_ref, "optimization.asset", "no asset with index " + std::to_string(o.asset));
    for (std::size_t i = 0; i < o.surrogate_counts.size(); ++i)
      if (!(o.surrogate_counts[i] >= 1.0))
        throw Error(ErrorCode::invalid_value, join("optimization.surrogate_counts", i), "server count must be >= 1");
    if (o.ladder && o.ladder->variants.empty())
      throw Error(ErrorCode::invalid_value, "optimization.ladder.variants", "ladder must not be empty");
  }
}

Scenario load_scenario(std::string_view document) {
  const json root = parse_json(document);
  check_keys(root, "",
             {"$schema", "name", "description", "horizon", "carbon_intensity", "profiles", "device_fleets", "servers",
              "cdn_network", "assets", "optimization"});
  Scenario s;
  s.name = read_string(require_key(root, "", "name"), "name");
  if (s.name.empty()) throw Error(ErrorCode::invalid_value, "name", "must not be empty");
  if (auto* v = optional_key(root, "description")) s.description = read_string(*v, "description");
  if (auto* v = optional_key(root, "horizon")) s.horizon = read_positive<Time>(*v, "horizon");
  s.carbon_intensity = {read_q<CarbonIntensityValue>(require_key(root, "", "carbon_intensity"), "carbon_intensity")};
  if (auto* v = optional_key(root, "profiles")) s.profiles = read_catalog(*v, "profiles");
  const ParameterCatalog catalog = s.effective_catalog();

  if (auto* v = optional_key(root, "servers")) s.servers = read_servers(*v, "servers", catalog);
  if (auto* v = optional_key(root, "device_fleets")) {
    if (!v->is_array()) schema_error("device_fleets", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i)
      s.device_fleets.push_back(read_fleet((*v)[i], join("device_fleets", i), catalog));
  }
  if (auto* v = optional_key(root, "cdn_network")) {
    s.cdn_network_ref = read_string(*v, "cdn_network");
    s.cdn_network = resolve_network_ref(catalog, s.cdn_network_ref, "cdn_network");
  }
  if (auto* v = optional_key(root, "assets")) {
    if (!v->is_array()) schema_error("assets", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i)
      s.assets.push_back(read_asset((*v)[i], join("assets", i), catalog, s.servers));
  }
  if (auto* v = optional_key(root, "optimization")) s.optimization = read_optimization(*v, "optimization", catalog, s);
  validate(s);
  return s;
}

Scenario load_scenario_source(std::string_view source) {
  constexpr std::string_view scheme = "builtin:";
  if (source.substr(0, scheme.size()) == scheme) {
    const std::string name(source.substr(scheme.size()));
    auto doc = builtin_document(name);
    if (!doc) throw Error(ErrorCode::unresolved_file, std::string(source), "no builtin scenario named \"" + name + "\"");
    return load_scenario(*doc);
  }
  std::ifstream in{std::string(source), std::ios::binary};
  if (!in) throw Error(ErrorCode::unresolved_file, std::string(source), "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string serialize(const Scenario& s) {
  ojson o;
  o["name"] = s.name;
  if (!s.description.empty()) o["description"] = s.description;
  o["horizon"] = si_text(s.horizon);
  o["carbon_intensity"] = si_text(s.carbon_intensity.value);
  if (!s.profiles.empty()) o["profiles"] = catalog_json(s.profiles, UnitStyle{false});

  ojson fleets = ojson::array();
  for (const auto& f : s.device_fleets) {
    ojson fj;
    fj["name"] = f.name;
    fj["profile"] = f.profile_ref;
    if (!f.select.choices.empty()) fj["select"] = selection_json(f.select);
    fj["count"] = f.count;
    fj["network"] = f.network_ref;
    ojson wl = ojson::array();
    for (const auto& r : f.workload) {
      ojson rj;
      rj["direction"] = std::string(model::to_string(r.request.direction()));
      rj["duration"] = si_text(r.request.duration());
      rj["bitrate"] = si_text(r.request.bitrate());
      if (r.request.size_overridden()) rj["video_size"] = si_text(r.request.video_size());
      rj["per_device"] = r.per_device;
      rj["provider_served"] = r.provider_served;
      wl.push_back(std::move(rj));
    }
    fj["workload"] = std::move(wl);
    fleets.push_back(std::move(fj));
  }
  o["device_fleets"] = std::move(fleets);

  if (!s.servers.profile_ref.empty()) {
    ojson sj;
    sj["profile"] = s.servers.profile_ref;
    if (!s.servers.select.choices.empty()) sj["select"] = selection_json(s.servers.select);
    sj["count"] = s.servers.count;
    o["servers"] = std::move(sj);
  }
  if (!s.cdn_network_ref.empty()) o["cdn_network"] = s.cdn_network_ref;

  ojson assets = ojson::array();
  for (const auto& a : s.assets) {
    ojson aj;
    aj["name"] = a.name;
    aj["count"] = a.count;
    aj["duration"] = si_text(a.duration);
    ojson vs = ojson::array();
    for (const auto& v : a.variants) vs.push_back(option_json({v.label, v.p_enc, v.output_size}));
    aj["variants"] = std::move(vs);
    aj["request_forecast"] = a.request_forecast;
    aj["stored_on"] = a.stored_on;
    aj["stored_fraction_of_year"] = a.stored_fraction_of_year;
    aj["uploaded"] = a.uploaded;
    if (a.source_size) aj["source_size"] = si_text(*a.source_size);
    if (a.p_dec) aj["p_dec"] = si_text(*a.p_dec);
    assets.push_back(std::move(aj));
  }
  o["assets"] = std::move(assets);

  if (s.optimization) {
    const auto& opt = *s.optimization;
    ojson oj;
    oj["asset"] = opt.asset;
    oj["encoder_options"] = options_json(opt.encoder_options);
    oj["forecast"] = opt.forecast;
    ojson pf = ojson::array();
    for (const auto& p : opt.portfolio) pf.push_back({{"videos", p.videos}, {"forecast", p.forecast}});
    oj["portfolio"] = std::move(pf);
    if (opt.ladder) {
      ojson lj;
      lj["variants"] = options_json(opt.ladder->variants);
      lj["surrogates"] = opt.ladder->surrogates;
      lj["forecasts"] = opt.ladder->forecasts;
      oj["ladder"] = std::move(lj);
    }
    oj["surrogate_counts"] = opt.surrogate_counts;
    o["optimization"] = std::move(oj);
  }
  return o.dump(2) + "\n";
}

std::optional<std::string> builtin_document(std::string_view name) {
  for (const auto& [n, doc] : detail::builtin_documents())
    if (n == name) return std::string(doc);
  return std::nullopt;
}

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> out;
  for (const auto& [n, doc] : detail::builtin_documents()) out.emplace_back(n);
  return out;
}

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  for (const auto& [n, doc] : detail::builtin_documents()) {
    try {
      out.push_back(load_scenario(doc));
    } catch (const Error& e) {
      throw e.at("builtin:" + std::string(n));
    }
  }
  return out;
}

std::string dump_catalog(const ParameterCatalog& catalog) {
  return catalog_json(catalog, UnitStyle{true}).dump(2) + "\n";
}

std::string apply_overrides(std::string_view document, const std::vector<std::string>& overrides) {
  if (overrides.empty()) return std::string(document);
  ojson root;
  try {
    root = ojson::parse(document);
  } catch (const ojson::parse_error&) {
    parse_json(document);  // rethrows with a line and column
    throw;
  }
  if (!root.is_object()) schema_error("", "expected an object");

  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::schema, ov, "override must look like path.to.key=value");
    const std::string key = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);
    ojson value;
    try {
      value = ojson::parse(raw);
    } catch (const ojson::parse_error&) {
      value = raw;
    }

    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) {
      if (part.empty()) throw Error(ErrorCode::schema, key, "empty path segment");
      parts.push_back(part);
    }

    ojson* node = &root;
    std::size_t first = 0;
    if (parts[0] == "catalog") {
      if (parts.size() < 4) throw Error(ErrorCode::schema, key, "expected catalog.<section>.<name>.<field>");
      const std::string& section = parts[1];
      const std::string& name = parts[2];
      const ParameterCatalog& builtin = builtin_catalog();
      ojson entry;
      if (section == "devices") {
        if (auto* e = builtin.find_device(name)) entry = device_json(*e, UnitStyle{true});
      } else if (section == "servers") {
        if (auto* e = builtin.find_server(name)) entry = server_json(*e, UnitStyle{true});
      } else if (section == "networks") {
        if (auto* e = builtin.find_network(name)) entry = network_json(*e, UnitStyle{true});
      } else if (section == "encoders") {
        if (auto* e = builtin.find_encoder(name)) entry = codec_json(*e, UnitStyle{true});
      } else if (section == "decoders") {
        if (auto* e = builtin.find_decoder(name)) entry = codec_json(*e, UnitStyle{true});
      } else {
        throw Error(ErrorCode::schema, key, "unknown catalog section \"" + section + "\"");
      }
      ojson& arr = root["profiles"][section];
      if (arr.is_null()) arr = ojson::array();
      auto it = std::find_if(arr.begin(), arr.end(), [&](const ojson& e) {
        return e.is_object() && e.contains("name") && e["name"] == name;
      });
      if (it == arr.end()) {
        if (entry.is_null()) throw Error(ErrorCode::unresolved_ref, key, "no catalog entry named \"" + name + "\"");
        arr.push_back(entry);
        node = &arr.back();
      } else {
        node = &*it;
      }
      std::string field = parts[3];
      for (std::size_t i = 4; i < parts.size(); ++i) field += "." + parts[i];
      const std::string shown = value.is_string() ? value.get<std::string>() : raw;
      const std::string tag = "overridden " + field + "=" + shown;
      const std::string prior = node->contains("provenance") ? (*node)["provenance"].get<std::string>() : "";
      (*node)["provenance"] = prior.empty() ? tag : prior + "; " + tag;
      first = 3;
    }

    for (std::size_t i = first; i < parts.size(); ++i) {
      const std::string& part = parts[i];
      const bool last = i + 1 == parts.size();
      if (node->is_array()) {
        std::size_t idx = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), idx);
        if (ec != std::errc{} || ptr != part.data() + part.size() || idx >= node->size())
          throw Error(ErrorCode::schema, key, "no array element \"" + part + "\"");
        node = &(*node)[idx];
      } else {
        if (node->is_null()) *node = ojson::object();
        if (!node->is_object()) throw Error(ErrorCode::schema, key, "\"" + part + "\" is not inside an object");
        node = &(*node)[part];
      }
      if (last) *node = value;
    }
  }
  return root.dump(2) + "\n";
}

}  // namespace videnergy::scenario
