#include <doctest.h>

#include <string>

#include "videnergy/error.hpp"
#include "videnergy/scenario.hpp"

using namespace videnergy;
using namespace videnergy::scenario;
using doctest::Approx;

namespace {

ErrorCode load_error(const std::string& doc) {
  try {
    load_scenario(doc);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("document loaded without error");
  return ErrorCode::schema;
}

std::string minimal(const std::string& request = R"({"direction": "rx", "duration": "2 h", "bitrate": "5 Mbps"})",
                    const std::string& profile = "tv") {
  return R"({"name": "t", "carbon_intensity": "350 g/kWh",
    "device_fleets": [{"profile": ")" +
         profile + R"(", "count": 2, "network": "fixed-bb", "workload": [)" + request + R"(]}]})";
}

}  // namespace

TEST_CASE("builtin catalog contents") {
  const auto& c = builtin_catalog();
  REQUIRE(c.find_device("tv"));
  CHECK(c.find_device("tv")->offset.low == 100 * units::W);
  for (const char* name : {"samsung-galaxy-s3", "fairphone-2", "htc-g1", "tablet", "laptop", "pc"})
    CHECK(c.find_device(name));
  CHECK(c.find_device("laptop")->offset.low == 20 * units::W);
  CHECK(c.find_device("tablet")->offset.low == 10 * units::W);

  const auto* bb = c.find_network("fixed-bb");
  REQUIRE(bb);
  CHECK(bb->offset == 1.5 * units::W);
  CHECK(bb->per_rate.si() == Approx(0.03 / 1e6));
  CHECK(c.find_network("mobile-4g")->offset == 0.2 * units::W);
  CHECK(c.find_network("optical-link")->per_rate.si() == Approx(0.1 / 1e6));
  CHECK(c.find_network("atlantic-cable")->per_rate.si() == Approx(0.05 / 1e6));

  const auto* srv = c.find_server("server-default");
  REQUIRE(srv);
  CHECK(srv->pue == 1.08);
  CHECK(srv->store_per_bit.low.si() == Approx(0.59 * 3600 / 8e6 / (365 * 86400.0)));
  CHECK(srv->offset_per_year.low.in(units::kWh) == Approx(127));
  CHECK(srv->offset_per_year.high.in(units::MWh) == Approx(5.57));
  CHECK(srv->p_enc.low.si() == Approx(0.2));
  CHECK(srv->p_enc.high.si() == Approx(9e4));
  CHECK(srv->p_dec.low.si() == Approx(0.719));
  CHECK(srv->p_dec.high.si() == Approx(24.45));
  CHECK(c.find_encoder("social-sw")->power.si() == Approx(1000));

  for (const auto& d : c.devices) CHECK_FALSE(d.provenance.empty());
  for (const auto& n : c.networks) CHECK_FALSE(n.provenance.empty());
  for (const auto& s : c.servers) CHECK_FALSE(s.provenance.empty());

  const auto* s3 = c.find_device("samsung-galaxy-s3");
  CHECK(s3->tx.qualifier == "min.");
  CHECK(s3->tx.low.si() == Approx(1.809));
}

TEST_CASE("shadowing leaves the builtin catalog untouched") {
  ParameterCatalog overlay;
  overlay.devices.push_back({"tv", Ranged<Power>::point(50 * units::W), Ranged<Power>::point(Power{}),
                             Ranged<Power>::point(Power{}), "test", ""});
  const auto merged = builtin_catalog().shadowed_by(overlay);
  CHECK(merged.find_device("tv")->offset.low == 50 * units::W);
  CHECK(builtin_catalog().find_device("tv")->offset.low == 100 * units::W);
  CHECK(merged.devices.size() == builtin_catalog().devices.size());
}

TEST_CASE("builtin scenarios load and match their parametrization") {
  const auto all = builtin_scenarios();
  REQUIRE(all.size() == 5);
  CHECK(builtin_scenario_names() ==
        std::vector<std::string>{"on-demand", "iptv", "social-network", "teleconference", "single-video"});

  const auto od = load_scenario_source("builtin:on-demand");
  CHECK(od.device_fleets.at(0).count == 1e8);
  CHECK(od.device_fleets[0].workload.at(0).per_device == 182.5);
  CHECK(od.servers.count == 1000);
  CHECK(od.servers.profile.offset_per_year.in(units::MWh) == Approx(5.57));
  CHECK(od.assets.size() == 2);
  CHECK(od.assets[0].stored_on == 1000);
  CHECK(od.assets[0].count + od.assets[1].count == 1000);
  CHECK(od.horizon == units::year);

  const auto iptv = load_scenario_source("builtin:iptv");
  CHECK(iptv.device_fleets[0].workload[0].request.bitrate() == 10 * units::Mbps);
  CHECK(iptv.assets.at(0).stored_on == 0);

  const auto social = load_scenario_source("builtin:social-network");
  CHECK(social.device_fleets[0].workload.at(0).per_device == 4380);
  CHECK(social.device_fleets[0].workload.at(1).per_device == 438);
  CHECK(social.device_fleets[0].workload[1].request.direction() == model::Direction::tx);
  CHECK(social.assets.at(0).count == 4.38e10);

  const auto tele = load_scenario_source("builtin:teleconference");
  CHECK(tele.device_fleets.size() == 4);
  for (const auto& f : tele.device_fleets) {
    CHECK(f.count == 2.5e7);
    CHECK_FALSE(f.workload.at(0).provider_served);
    CHECK(f.workload[0].request.direction() == model::Direction::bidirectional);
  }

  const auto sv = load_scenario_source("builtin:single-video");
  REQUIRE(sv.optimization);
  CHECK(sv.optimization->encoder_options.size() == 2);
  REQUIRE(sv.optimization->ladder);
  CHECK(sv.optimization->ladder->variants.size() == 16);
  CHECK(sv.optimization->ladder->variants[15].label == "H-16");
}

TEST_CASE("load errors carry their category") {
  CHECK_NOTHROW(load_scenario(minimal()));
  CHECK(load_error("{ not json") == ErrorCode::parse);
  CHECK(load_error(minimal(R"({"direction": "rx", "duration": "2 h", "bitrate": "5 W"})")) ==
        ErrorCode::unit_mismatch);
  CHECK(load_error(minimal(R"({"direction": "rx", "duration": "2 h", "bitrate": "5 Mbps"})", "tv-oled-2030")) ==
        ErrorCode::unresolved_ref);
  CHECK(load_error(minimal(R"({"direction": "rx", "duration": "0 h", "bitrate": "5 Mbps"})")) ==
        ErrorCode::invalid_value);
  CHECK(load_error(minimal(R"({"direction": "rx", "duration": "2 h", "bitrate": "5 Mbps", "colour": 1})")) ==
        ErrorCode::schema);
  CHECK(load_error(minimal(R"({"direction": "sideways", "duration": "2 h", "bitrate": "5 Mbps"})")) ==
        ErrorCode::invalid_value);
  CHECK(load_error(R"({"name": "t"})") == ErrorCode::schema);
  CHECK(load_error(R"({"name": "t", "carbon_intensity": "-1 g/kWh"})") == ErrorCode::invalid_value);
  CHECK_THROWS_AS(load_scenario_source("missing.json"), Error);
  try {
    load_scenario_source("missing.json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unresolved_file);
  }
}

TEST_CASE("error paths point into the document") {
  try {
    load_scenario(minimal(R"({"direction": "rx", "duration": "2 h", "bitrate": "5 W"})"));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.path() == "device_fleets.0.workload.0.bitrate");
    CHECK(std::string(e.what()).find("E_UNIT_MISMATCH") == 0);
  }
  try {
    load_scenario("{\n  \"name\": \"x\",\n  oops\n}");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
    CHECK(e.path().find("line 3") == 0);
  }
}

TEST_CASE("ranged catalog values need a selection") {
  const std::string doc = R"({"name": "t", "carbon_intensity": "0 g/kWh",
    "servers": {"profile": "server-default", "count": 1}})";
  try {
    load_scenario(doc);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_value);
    CHECK(e.path().rfind("servers.", 0) == 0);
  }
  const auto s = load_scenario(R"({"name": "t", "carbon_intensity": "0 g/kWh",
    "servers": {"profile": "server-default", "count": 1,
                "select": {"*": "low", "offset_per_year": "1 MWh", "p_enc": "high"}}})");
  CHECK(s.servers.profile.offset_per_year == units::MWh);
  CHECK(s.servers.profile.p_enc.si() == Approx(9e4));
  CHECK(s.servers.profile.p_dec.si() == Approx(0.719));

  const auto per_year = load_scenario(R"({"name": "t", "carbon_intensity": "0 g/kWh",
    "servers": {"profile": "server-default", "count": 1, "select": {"*": "low", "offset_per_year": "2 kWh/yr"}}})");
  CHECK(per_year.servers.profile.offset_per_year.in(units::kWh) == Approx(2.0));
}

TEST_CASE("stored_on cannot exceed the server fleet") {
  const std::string doc = R"({"name": "t", "carbon_intensity": "0 g/kWh",
    "servers": {"profile": "server-default", "count": 2, "select": {"*": "high"}},
    "assets": [{"name": "a", "duration": "1 h", "stored_on": 3,
                "variants": [{"label": "v", "output_size": "1 GByte"}]}]})";
  CHECK(load_error(doc) == ErrorCode::invalid_value);
}

TEST_CASE("serialize round-trips every builtin exactly") {
  for (const auto& s : builtin_scenarios()) {
    CAPTURE(s.name);
    const auto text = serialize(s);
    const auto back = load_scenario(text);
    CHECK(back == s);
    CHECK(serialize(back) == text);
  }
}

TEST_CASE("scenario-local profiles shadow the catalog and round-trip") {
  const std::string doc = R"({"name": "t", "carbon_intensity": "100 g/kWh",
    "profiles": {"devices": [{"name": "tv", "p_offset": "80 W", "p_rx": {"low": "1 W", "high": "2 W"},
                              "p_tx": {"value": "3 W", "qualifier": "min."}}],
                 "networks": [{"name": "lan", "p_offset": {"value": 1, "unit": "W"}, "p_rate": "0 W/Mbps"}]},
    "device_fleets": [{"profile": "tv", "select": {"p_rx": "high"}, "count": 1, "network": "lan",
                       "workload": [{"direction": "bidirectional", "duration": "1 h", "bitrate": "1 Mbps"}]}]})";
  const auto s = load_scenario(doc);
  CHECK(s.device_fleets[0].profile.offset == 80 * units::W);
  CHECK(s.device_fleets[0].profile.rx == 2 * units::W);
  CHECK(s.device_fleets[0].profile.tx == 3 * units::W);
  CHECK(s.device_fleets[0].network.offset == units::W);
  CHECK(load_scenario(serialize(s)) == s);
}

TEST_CASE("overrides edit the document before validation") {
  const auto doc = *builtin_document("on-demand");
  const auto s = load_scenario(apply_overrides(doc, {"device_fleets.0.count=2e8"}));
  CHECK(s.device_fleets[0].count == 2e8);

  const auto q = load_scenario(apply_overrides(doc, {"device_fleets.0.workload.0.bitrate=8 Mbps"}));
  CHECK(q.device_fleets[0].workload[0].request.bitrate() == 8 * units::Mbps);

  const auto c = load_scenario(apply_overrides(doc, {"catalog.devices.tv.p_offset=120 W"}));
  CHECK(c.device_fleets[0].profile.offset == 120 * units::W);
  REQUIRE(c.profiles.find_device("tv"));
  CHECK(c.profiles.find_device("tv")->provenance.find("overridden p_offset=120 W") != std::string::npos);
  CHECK(builtin_catalog().find_device("tv")->offset.low == 100 * units::W);

  const auto sel = load_scenario(apply_overrides(doc, {"servers.select.offset_per_year=low"}));
  CHECK(sel.servers.profile.offset_per_year.in(units::kWh) == Approx(127));

  auto code = [&](const std::string& ov) {
    try {
      load_scenario(apply_overrides(doc, {ov}));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::schema;
  };
  CHECK(code("device_fleets.0.workload.0.bitrate=5 W") == ErrorCode::unit_mismatch);
  CHECK(code("device_fleets.7.count=1") == ErrorCode::schema);
  CHECK(code("catalog.devices.nope.p_offset=1 W") == ErrorCode::unresolved_ref);
  CHECK(code("novalue") == ErrorCode::schema);
}

TEST_CASE("catalog dump reloads as scenario profiles") {
  const auto text = dump_catalog(builtin_catalog());
  CHECK(text.find("Carroll") != std::string::npos);
  const auto s = load_scenario(R"({"name": "t", "carbon_intensity": "0 g/kWh", "profiles": )" + text + "}");
  REQUIRE(s.profiles.devices.size() == builtin_catalog().devices.size());
  for (std::size_t i = 0; i < s.profiles.devices.size(); ++i) {
    const auto& a = s.profiles.devices[i];
    const auto& b = builtin_catalog().devices[i];
    CHECK(a.name == b.name);
    CHECK(a.rx.low.si() == Approx(b.rx.low.si()).epsilon(1e-12));
    CHECK(a.rx.high.si() == Approx(b.rx.high.si()).epsilon(1e-12));
    CHECK(a.tx.qualifier == b.tx.qualifier);
    CHECK(a.provenance == b.provenance);
  }
  const auto& srv = s.profiles.servers.at(0);
  CHECK(srv.store_per_bit.low.si() == Approx(builtin_catalog().servers[0].store_per_bit.low.si()).epsilon(1e-12));
}
