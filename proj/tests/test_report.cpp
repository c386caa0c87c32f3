#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "videnergy/report.hpp"

using namespace videnergy;
using namespace videnergy::report;
using doctest::Approx;

namespace {

const ServiceReport& service(const EnergyReport& r, const std::string& name) {
  for (const auto& s : r.services)
    if (s.service == name) return s;
  FAIL("missing service " << name);
  return r.services.front();
}

std::string find_param(const ServiceReport& s, const std::string& path) {
  for (const auto& p : s.parameters)
    if (p.path == path) return p.value;
  return "";
}

}  // namespace

TEST_CASE("on-demand and teleconference totals") {
  const auto all = scenario::builtin_scenarios();
  const auto r = evaluate(all);
  const auto& od = service(r, "on-demand");
  // 1e8 * 182.5 * 7200 s * 100 W
  CHECK(od.ut.si() == Approx(1e8 * 182.5 * 7200 * 100));
  CHECK(od.nw_ut.si() == Approx(1.825e10 * 1.65 * 7200));
  CHECK(od.ut.in(units::TWh) == Approx(3.65).epsilon(0.005));
  CHECK(od.nw().in(units::GWh) == Approx(60.2).epsilon(0.01));
  // Tx: 1.825e10 requests * 4.5 GByte * 0.624 mWh/MByte * PUE 1.08
  CHECK(od.vp_tasks.tx.si() == Approx(1.825e10 * 4500 * 0.624 * 3.6 * 1.08));
  CHECK(od.vp_tasks.offset.si() == Approx(1000 * 5.57 * 3.6e9 * 1.08));
  // Copies: 500 videos to 999 surrogates.
  CHECK(od.vp_tasks.copies.si() == Approx(500.0 * 999 * 4500 * 0.624 * 3.6 * 1.08));
  CHECK(od.nw_cdn.si() == Approx(500.0 * 999 * 1.65 * 7200));
  CHECK(find_param(od, "servers.offset_per_year") == "5.57 MWh");

  const auto& tc = service(r, "teleconference");
  CHECK(tc.ut.in(units::TWh) == Approx(1.22).epsilon(0.005));
  CHECK(tc.vp.si() == Approx(1000 * 5.57 * 3.6e9 * 1.08));
  CHECK(tc.vp_tasks.tx.si() == 0.0);
  CHECK(tc.ut_by_device.size() == 4);

  CHECK(r.global_total.si() == Approx((od.total + tc.total + service(r, "iptv").total +
                                       service(r, "social-network").total + service(r, "single-video").total)
                                          .si()));
}

TEST_CASE("empty scenario evaluates to zero") {
  const auto s = scenario::load_scenario(R"({"name": "empty", "carbon_intensity": "350 g/kWh"})");
  const auto r = evaluate(s);
  REQUIRE(r.services.size() == 1);
  const auto& e = r.services[0];
  CHECK(e.total.si() == 0.0);
  CHECK(e.ut.si() == 0.0);
  CHECK(e.vp.si() == 0.0);
  CHECK(e.nw().si() == 0.0);
  CHECK(e.ghg.si() == 0.0);
}

TEST_CASE("breakdowns close on every builtin") {
  for (const auto& s : scenario::builtin_scenarios()) {
    CAPTURE(s.name);
    const auto r = evaluate_service(s);
    Energy ut;
    for (const auto& [n, e] : r.ut_by_device) ut += e;
    CHECK(ut.si() == Approx(r.ut.si()).epsilon(1e-9));
    CHECK(r.vp_tasks.total().si() == Approx(r.vp.si()).epsilon(1e-9));
    CHECK((r.ut + r.vp + r.nw()).si() == Approx(r.total.si()).epsilon(1e-9));
    CHECK(r.ghg.si() == Approx(r.total.in(units::kWh) * 350.0).epsilon(1e-12));
  }
}

TEST_CASE("csv contract") {
  const auto od = scenario::load_scenario_source("builtin:on-demand");
  const auto csv = to_csv(evaluate(od));
  CHECK(csv.rfind("service,component,subcategory,value_kwh\n", 0) == 0);
  CHECK(csv.find("on-demand,NW,UT,6.0225e7\n") != std::string::npos);
  CHECK(csv.find("on-demand,UT,total,3.65e9\n") != std::string::npos);
  CHECK(to_csv(EnergyReport{}) == "service,component,subcategory,value_kwh\n");
  CHECK(kwh_text(Energy{}) == "0e0");
  CHECK(kwh_text(units::Wh) == "1e-3");
}

TEST_CASE("json keeps the hierarchy and round-trips values") {
  const auto od = scenario::load_scenario_source("builtin:on-demand");
  const auto r = evaluate(od);
  const auto text = to_json(r);
  const auto j = nlohmann::json::parse(text);
  const auto& s = j["services"][0];
  CHECK(s["service"] == "on-demand");
  CHECK(s["components"]["UT"]["total"]["unit"] == "kWh");
  const double ut_kwh = s["components"]["UT"]["total"]["value"].get<double>();
  CHECK(ut_kwh == r.services[0].ut.in(units::kWh));
  CHECK(s["components"]["NW"]["UT"]["value"].get<double>() == r.services[0].nw_ut.in(units::kWh));
  CHECK(s["components"]["VP"]["by_task"].size() == 7);
  CHECK(s["parameters"].size() > 5);
  CHECK(to_json(evaluate(od)) == text);
}

TEST_CASE("ghg_report") {
  const auto od = scenario::load_scenario_source("builtin:on-demand");
  const auto r = evaluate(od);
  // Intensity implied by 2.5 Mt for 3.77 TWh.
  const double implied = 2.5e12 / 3.77e9;
  const auto g = ghg_report(r, model::CarbonIntensity::grams_per_kwh(implied));
  CHECK(g.at(0).mass.in(units::tonne) / 1e6 == Approx(2.5).epsilon(0.01));
  CHECK(ghg_report(EnergyReport{}, model::CarbonIntensity::grams_per_kwh(350)).empty());

  EnergyReport zero;
  zero.services.push_back(ServiceReport{});
  CHECK(ghg_report(zero, model::CarbonIntensity::grams_per_kwh(350)).at(0).mass.si() == 0.0);
  CHECK(model::ghg_emissions(43.2 * units::GWh, model::CarbonIntensity::grams_per_kwh(350)).in(units::tonne) ==
        Approx(15120));
}

TEST_CASE("format names") {
  CHECK(format_from_string("json") == Format::json);
  CHECK(format_from_string("csv") == Format::csv);
  CHECK_THROWS(format_from_string("xml"));
}
