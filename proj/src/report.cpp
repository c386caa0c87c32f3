#include "videnergy/report.hpp"

#include <array>
#include <charconv>
#include <future>

#include <json.hpp>

#include "videnergy/error.hpp"

namespace videnergy::report {

namespace {

using scenario::Scenario;
using ojson = nlohmann::ordered_json;

std::string provenance_of_device(const scenario::ParameterCatalog& c, const std::string& name) {
  const auto* e = c.find_device(name);
  return e ? e->provenance : std::string{};
}

void echo_fleet(ServiceReport& r, const scenario::DeviceFleet& f, const scenario::ParameterCatalog& c,
                std::size_t i) {
  const std::string p = "device_fleets." + std::to_string(i);
  const std::string prov = provenance_of_device(c, f.profile_ref);
  r.parameters.push_back({p + ".profile", f.profile_ref, prov});
  r.parameters.push_back({p + ".p_offset", format_in(dynamic(f.profile.offset), "W"), prov});
  r.parameters.push_back({p + ".p_rx", format_in(dynamic(f.profile.rx), "W"), prov});
  r.parameters.push_back({p + ".p_tx", format_in(dynamic(f.profile.tx), "W"), prov});
  for (const auto& [k, v] : f.select.choices) r.parameters.push_back({p + ".select." + k, v, "scenario"});
  r.parameters.push_back({p + ".count", format_number(f.count), "scenario"});
  const auto* n = c.find_network(f.network_ref);
  const std::string nprov = n ? n->provenance : std::string{};
  r.parameters.push_back({p + ".network", f.network_ref, nprov});
  r.parameters.push_back({p + ".network.p_offset", format_in(dynamic(f.network.offset), "W"), nprov});
  r.parameters.push_back({p + ".network.p_rate", format_in(dynamic(f.network.per_rate), "W/Mbps"), nprov});
}

void echo_servers(ServiceReport& r, const Scenario& s, const scenario::ParameterCatalog& c) {
  const auto& sv = s.servers;
  if (sv.profile_ref.empty()) return;
  const auto* e = c.find_server(sv.profile_ref);
  const std::string prov = e ? e->provenance : std::string{};
  const auto& p = sv.profile;
  r.parameters.push_back({"servers.profile", sv.profile_ref, prov});
  r.parameters.push_back({"servers.count", format_number(sv.count), "scenario"});
  r.parameters.push_back({"servers.pue", format_number(p.pue), prov});
  r.parameters.push_back({"servers.offset_per_year", format_display(dynamic(p.offset_per_year)), prov});
  r.parameters.push_back({"servers.e_send", format_in(dynamic(p.send_per_bit), "mWh/MByte"), prov});
  r.parameters.push_back({"servers.e_rx", format_in(dynamic(p.rx_per_bit), "mWh/MByte"), prov});
  r.parameters.push_back({"servers.e_store", format_in(dynamic(p.store_per_bit), "Wh/(MByte*yr)"), prov});
  r.parameters.push_back({"servers.p_dec", format_in(dynamic(p.p_dec), "J/s_video"), prov});
  r.parameters.push_back({"servers.p_enc", format_in(dynamic(p.p_enc), "J/s_video"), prov});
  for (const auto& [k, v] : sv.select.choices) r.parameters.push_back({"servers.select." + k, v, "scenario"});
}

}  // namespace

ServiceReport evaluate_service(const Scenario& s) {
  ServiceReport r;
  r.service = s.name;
  r.carbon_intensity = s.carbon_intensity;
  const auto catalog = s.effective_catalog();

  // End users and their access networks.
  std::vector<model::NetworkPath> ut_paths;
  for (std::size_t i = 0; i < s.device_fleets.size(); ++i) {
    const auto& f = s.device_fleets[i];
    model::FleetEntry entry{f.profile, {}, f.count};
    for (const auto& w : f.workload) {
      entry.workload.push_back({w.request, w.per_device});
      ut_paths.push_back({f.network, w.request, f.count * w.per_device});
    }
    const Energy e = model::ut_fleet_energy(std::span(&entry, 1));
    r.ut_by_device.emplace_back(f.name, e);
    r.ut += e;
    echo_fleet(r, f, catalog, i);
  }

  // Provider tasks, summed over the identical servers of the fleet.
  const auto& sp = s.servers.profile;
  model::ServerTaskEnergies raw;
  Energy decoding, encoding;
  std::vector<model::NetworkPath> cdn_paths;
  if (s.servers.count > 0.0) {
    raw.offset = s.servers.count * sp.offset_per_year * (s.horizon.si() / units::year.si());

    for (const auto& f : s.device_fleets) {
      for (const auto& w : f.workload) {
        if (!w.provider_served || w.request.direction() == model::Direction::tx) continue;
        raw.tx += model::vp_transfer_energy(f.count * w.per_device * w.request.video_size(), sp.send_per_bit);
      }
    }

    std::vector<DataSize> stored;
    for (const auto& a : s.assets) {
      if (a.uploaded) {
        raw.rx += model::vp_transfer_energy(a.count * a.received_size(), sp.rx_per_bit);
        const auto job = model::TranscodeJob::make(a.duration, a.variants);
        decoding += a.count * model::vp_decode_energy(job, a.decode_power(sp));
        encoding += a.count * model::vp_encode_energy(job);
      }
      DataSize per_video;
      for (const auto& v : a.variants) per_video += v.output_size;
      const double copies = std::max(a.stored_on - 1.0, 0.0);
      raw.copy += model::vp_transfer_energy(a.count * copies * per_video, sp.send_per_bit);
      if (a.stored_on > 0.0) stored.push_back(a.count * a.stored_on * per_video);
      if (!s.cdn_network_ref.empty() && copies > 0.0) {
        for (const auto& v : a.variants) {
          auto copy = model::StreamRequest::make(a.duration, v.output_size / a.duration, model::Direction::tx,
                                                 v.output_size);
          cdn_paths.push_back({s.cdn_network, copy, a.count * copies});
        }
      }
      raw.store += model::vp_storage_energy(stored, sp.store_per_bit, a.stored_fraction_of_year);
      stored.clear();
    }
    raw.transcode = decoding + encoding;
    r.pue = sp.pue;
  }
  r.vp_raw = raw;
  const model::ServerLoad load{sp, raw};
  r.vp = s.servers.count > 0.0 ? model::vp_provider_energy(std::span(&load, 1)) : Energy{};
  const double pue = r.pue;
  r.vp_tasks = {pue * raw.offset, pue * raw.tx,     pue * raw.rx,     pue * raw.copy,
                pue * decoding,   pue * encoding,   pue * raw.store};

  const auto nw = model::nw_energy(ut_paths, cdn_paths);
  r.nw_ut = nw.end_users;
  r.nw_cdn = nw.cdn;

  r.total = model::service_energy(r.ut, r.vp, nw.total());
  r.ghg = model::ghg_emissions(r.total, s.carbon_intensity);

  echo_servers(r, s, catalog);
  if (!s.cdn_network_ref.empty()) {
    const auto* n = catalog.find_network(s.cdn_network_ref);
    r.parameters.push_back({"cdn_network", s.cdn_network_ref, n ? n->provenance : std::string{}});
  }
  r.parameters.push_back({"horizon", format_in(dynamic(s.horizon), "h"), "scenario"});
  r.parameters.push_back(
      {"carbon_intensity", format_in(dynamic(s.carbon_intensity.value), "g/kWh"), "scenario"});
  return r;
}

EnergyReport evaluate(std::span<const Scenario> scenarios) {
  std::vector<std::future<ServiceReport>> jobs;
  jobs.reserve(scenarios.size());
  for (const auto& s : scenarios)
    jobs.push_back(std::async(std::launch::async, [&s] { return evaluate_service(s); }));
  EnergyReport out;
  for (auto& j : jobs) out.services.push_back(j.get());

  std::vector<Energy> totals;
  for (const auto& s : out.services) {
    totals.push_back(s.total);
    out.ghg += s.ghg;
  }
  out.global_total = model::global_energy(totals);
  return out;
}

EnergyReport evaluate(const Scenario& s) { return evaluate(std::span(&s, 1)); }

Format format_from_string(std::string_view name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  throw Error(ErrorCode::invalid_value, "format", "unknown format \"" + std::string(name) + "\"");
}

std::string emit(const EnergyReport& report, Format format) {
  return format == Format::json ? to_json(report) : to_csv(report);
}

std::string kwh_text(Energy e) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), e.in(units::kWh), std::chars_format::scientific);
  (void)ec;
  std::string s(buf.data(), ptr);
  // "6.0225e+07" -> "6.0225e7"
  const auto epos = s.find('e');
  std::string mant = s.substr(0, epos);
  std::string exp = s.substr(epos + 1);
  bool neg = false;
  if (!exp.empty() && (exp[0] == '+' || exp[0] == '-')) {
    neg = exp[0] == '-';
    exp.erase(0, 1);
  }
  while (exp.size() > 1 && exp[0] == '0') exp.erase(0, 1);
  return mant + "e" + (neg ? "-" : "") + exp;
}

namespace {

ojson energy_json(Energy e) {
  ojson o;
  o["value"] = e.in(units::kWh);
  o["unit"] = "kWh";
  o["display"] = format_display(dynamic(e));
  return o;
}

ojson mass_json(Mass m) {
  ojson o;
  o["value"] = m.in(units::tonne);
  o["unit"] = "t CO2E";
  return o;
}

}  // namespace

std::string to_json(const EnergyReport& report) {
  ojson root;
  root["global"] = {{"total", energy_json(report.global_total)}, {"ghg", mass_json(report.ghg)}};
  ojson services = ojson::array();
  for (const auto& s : report.services) {
    ojson sj;
    sj["service"] = s.service;
    sj["total"] = energy_json(s.total);

    ojson ut;
    ut["total"] = energy_json(s.ut);
    ojson by_device = ojson::object();
    for (const auto& [name, e] : s.ut_by_device) by_device[name] = energy_json(e);
    ut["by_device"] = std::move(by_device);

    ojson vp;
    vp["total"] = energy_json(s.vp);
    vp["pue"] = s.pue;
    ojson tasks;
    tasks["offset"] = energy_json(s.vp_tasks.offset);
    tasks["tx"] = energy_json(s.vp_tasks.tx);
    tasks["rx"] = energy_json(s.vp_tasks.rx);
    tasks["copies"] = energy_json(s.vp_tasks.copies);
    tasks["decoding"] = energy_json(s.vp_tasks.decoding);
    tasks["encoding"] = energy_json(s.vp_tasks.encoding);
    tasks["storage"] = energy_json(s.vp_tasks.storage);
    vp["by_task"] = std::move(tasks);

    ojson nw;
    nw["total"] = energy_json(s.nw());
    nw["UT"] = energy_json(s.nw_ut);
    nw["CDN"] = energy_json(s.nw_cdn);

    sj["components"] = {{"UT", std::move(ut)}, {"VP", std::move(vp)}, {"NW", std::move(nw)}};
    sj["ghg"] = {{"carbon_intensity_g_per_kwh", s.carbon_intensity.in_grams_per_kwh()}, {"mass", mass_json(s.ghg)}};

    ojson params = ojson::array();
    for (const auto& p : s.parameters)
      params.push_back({{"path", p.path}, {"value", p.value}, {"provenance", p.provenance}});
    sj["parameters"] = std::move(params);
    services.push_back(std::move(sj));
  }
  root["services"] = std::move(services);
  return root.dump(2) + "\n";
}

std::string to_csv(const EnergyReport& report) {
  std::string out = "service,component,subcategory,value_kwh\n";
  auto row = [&out](const std::string& service, std::string_view component, std::string_view sub, Energy e) {
    out += service;
    out += ',';
    out += component;
    out += ',';
    out += sub;
    out += ',';
    out += kwh_text(e);
    out += '\n';
  };
  for (const auto& s : report.services) {
    row(s.service, "total", "", s.total);
    row(s.service, "UT", "total", s.ut);
    for (const auto& [name, e] : s.ut_by_device) row(s.service, "UT", name, e);
    row(s.service, "VP", "total", s.vp);
    row(s.service, "VP", "offset", s.vp_tasks.offset);
    row(s.service, "VP", "tx", s.vp_tasks.tx);
    row(s.service, "VP", "rx", s.vp_tasks.rx);
    row(s.service, "VP", "copies", s.vp_tasks.copies);
    row(s.service, "VP", "decoding", s.vp_tasks.decoding);
    row(s.service, "VP", "encoding", s.vp_tasks.encoding);
    row(s.service, "VP", "storage", s.vp_tasks.storage);
    row(s.service, "NW", "total", s.nw());
    row(s.service, "NW", "UT", s.nw_ut);
    row(s.service, "NW", "CDN", s.nw_cdn);
  }
  return out;
}

std::vector<ServiceEmissions> ghg_report(const EnergyReport& report, const model::CarbonIntensity& ci) {
  std::vector<ServiceEmissions> out;
  for (const auto& s : report.services) out.push_back({s.service, s.total, model::ghg_emissions(s.total, ci)});
  return out;
}

}  // namespace videnergy::report
