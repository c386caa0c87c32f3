#pragma once

// Randomized invariants shared by the unit-test binary and the acceptance
// report. Each check runs `cases` generated inputs from a fixed seed and
// records the first counterexample.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "videnergy/error.hpp"
#include "videnergy/optimizer.hpp"
#include "videnergy/report.hpp"
#include "videnergy/scenario.hpp"

namespace props {

using namespace videnergy;

struct Result {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string first_failure;
  bool ok() const { return failures == 0 && cases > 0; }
};

inline bool close(double a, double b, double rel) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

template <class F>
Result run(std::string name, std::uint64_t seed, int cases, F&& body) {
  Result r{std::move(name), cases, 0, {}};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cases; ++i) {
    std::string why;
    bool ok = false;
    try {
      ok = body(rng, why);
    } catch (const std::exception& e) {
      why = std::string("threw: ") + e.what();
    }
    if (!ok) {
      if (r.failures++ == 0) r.first_failure = "case " + std::to_string(i) + ": " + why;
    }
  }
  return r;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline scenario::Scenario load(const oracle::World& w) { return scenario::load_scenario(oracle::to_json(w)); }

// Evaluated breakdowns close: devices sum to UT, tasks to VP, parts to total.
inline Result closure(int cases) {
  return run("additivity/closure of breakdowns", 11, cases, [](auto& rng, std::string& why) {
    const auto r = report::evaluate_service(load(oracle::random_world(rng)));
    Energy ut;
    for (const auto& [n, e] : r.ut_by_device) ut += e;
    const bool ok = close(ut.si(), r.ut.si(), 1e-12) && close(r.vp_tasks.total().si(), r.vp.si(), 1e-12) &&
                    close((r.ut + r.vp + r.nw()).si(), r.total.si(), 1e-12) &&
                    close(r.ghg.si(), r.total.si() * r.carbon_intensity.value.si(), 1e-12);
    if (!ok) why = "breakdown does not sum to its total";
    return ok;
  });
}

// Scaling every fleet by k scales UT, NW_UT and the Tx term by k.
inline Result request_linearity(int cases) {
  return run("request-count linearity", 12, cases, [](auto& rng, std::string& why) {
    auto w = oracle::random_world(rng);
    const int k = std::uniform_int_distribution<int>(2, 5)(rng);
    const auto a = report::evaluate_service(load(w));
    for (auto& f : w.fleets) f.count *= k;
    const auto b = report::evaluate_service(load(w));
    const bool ok = close(b.ut.si(), k * a.ut.si(), 1e-12) && close(b.nw_ut.si(), k * a.nw_ut.si(), 1e-12) &&
                    close(b.vp_tasks.tx.si(), k * a.vp_tasks.tx.si(), 1e-12) &&
                    close(b.vp_tasks.storage.si(), a.vp_tasks.storage.si(), 1e-12);
    if (!ok) why = "fleet scale factor " + std::to_string(k) + " not reflected linearly";
    return ok;
  });
}

// VP at PUE p equals p times VP at PUE 1; UT and NW do not move.
inline Result pue_scaling(int cases) {
  return run("PUE scaling", 13, cases, [](auto& rng, std::string& why) {
    auto w = oracle::random_world(rng);
    w.server.pue = 1.0;
    const auto base = report::evaluate_service(load(w));
    w.server.pue = uniform(rng, 1.0, 3.0);
    const auto scaled = report::evaluate_service(load(w));
    const bool ok = close(scaled.vp.si(), w.server.pue * base.vp.si(), 1e-12) && scaled.ut == base.ut &&
                    scaled.nw() == base.nw();
    if (!ok) why = "PUE " + oracle::num(w.server.pue) + " does not scale VP alone";
    return ok;
  });
}

// Raising any power, energy rate or count never lowers the total.
inline Result monotonicity(int cases) {
  return run("monotonicity", 14, cases, [](auto& rng, std::string& why) {
    auto w = oracle::random_world(rng);
    const auto before = report::evaluate_service(load(w));
    const int which = std::uniform_int_distribution<int>(0, 7)(rng);
    const double f = uniform(rng, 1.0, 3.0);
    switch (which) {
      case 0:
        for (auto& fl : w.fleets) fl.device.offset *= f;
        break;
      case 1:
        for (auto& fl : w.fleets) fl.device.rx *= f, fl.device.tx *= f;
        break;
      case 2:
        for (auto& n : w.networks) n.offset *= f, n.per_rate *= f;
        break;
      case 3:
        w.server.e_send *= f, w.server.e_rx *= f, w.server.e_store *= f;
        break;
      case 4:
        w.server.offset_per_year *= f;
        break;
      case 5:
        w.server.p_dec *= f;
        for (auto& a : w.assets)
          for (auto& v : a.variants) v.p_enc *= f;
        break;
      case 6:
        for (auto& a : w.assets) a.count += 1;
        break;
      default:
        for (auto& fl : w.fleets)
          for (auto& r : fl.workload) r.duration *= f;
        break;
    }
    const auto after = report::evaluate_service(load(w));
    const bool ok = after.total >= before.total && after.ut >= before.ut && after.vp >= before.vp &&
                    after.nw() >= before.nw();
    if (!ok) why = "increasing parameter group " + std::to_string(which) + " lowered the energy";
    return ok;
  });
}

// Multiplies every power and energy rate, so every cost line scales by k.
inline void scale_energy(oracle::World& w, double k) {
  for (auto& f : w.fleets) f.device.offset *= k, f.device.rx *= k, f.device.tx *= k;
  for (auto& n : w.networks) n.offset *= k, n.per_rate *= k;
  auto& s = w.server;
  s.offset_per_year *= k, s.e_send *= k, s.e_rx *= k, s.e_store *= k, s.p_dec *= k, s.p_enc *= k;
  for (auto& a : w.assets)
    for (auto& v : a.variants) v.p_enc *= k;
}

inline optimizer::CostLine random_line(std::mt19937_64& rng) {
  return {uniform(rng, 0, 1e9) * units::J, uniform(rng, 0, 1e6) * units::J};
}

// Multiplying all costs by c > 0 leaves crossover and per-video argmin unchanged.
inline Result scale_invariance(int cases) {
  return run("argmin/crossover scale-invariance", 15, cases, [](auto& rng, std::string& why) {
    const auto a = random_line(rng), b = random_line(rng);
    const double c = std::pow(10.0, uniform(rng, -6, 6));
    const auto x = optimizer::crossover(a, b);
    const auto y = optimizer::crossover({c * a.fixed, c * a.per_request}, {c * b.fixed, c * b.per_request});
    bool ok = x.kind == y.kind && close(x.requests, y.requests, 1e-9);
    const double n = std::pow(10.0, uniform(rng, 0, 7));
    ok = ok && ((a.total(n) < b.total(n)) == (c * a.total(n) < c * b.total(n)));

    // Same check through the assignment solver on a random single-video model.
    auto w = oracle::random_world(rng);
    oracle::Fleet viewer{{uniform(rng, 0, 150), 1, 0}, 0, 1, {{0, uniform(rng, 1, 7200), 5e6, 1, true}}};
    w.fleets.assign(1, viewer);
    w.assets.assign(1, {1, 3600, 8e9, {{1, 8e9}}, 1, 0.5, true});
    const auto m = optimizer::VideoCostModel::from_scenario(load(w));
    std::vector<optimizer::EncoderOption> opts;
    for (int k = 0; k < 3; ++k)
      opts.push_back(optimizer::EncoderOption::make("o" + std::to_string(k), uniform(rng, 0.1, 1e5) * units::W,
                                                    uniform(rng, 1e8, 1e11) * units::bit, 3600 * units::s));
    const auto choose = [&](const optimizer::VideoCostModel& model, double k) {
      std::vector<optimizer::EncoderOption> scaled = opts;
      for (auto& o : scaled) o.p_enc = k * o.p_enc;
      const std::vector<optimizer::VideoDemand> one{{model, n, 1}};
      return optimizer::assign_optimal_encoders(one, scaled).choice[0];
    };
    const auto before = choose(m, 1.0);
    scale_energy(w, c);
    const auto after = choose(optimizer::VideoCostModel::from_scenario(load(w)), c);
    ok = ok && before == after;
    if (!ok) why = "decision changed under scaling by " + oracle::num(c);
    return ok;
  });
}

// total_a(N*) == total_b(N*) and the winner flips across N*.
inline Result crossover_correct(int cases) {
  return run("crossover correctness", 16, cases, [](auto& rng, std::string& why) {
    const auto a = random_line(rng), b = random_line(rng);
    const auto x = optimizer::crossover(a, b);
    if (x.kind != optimizer::Crossover::Kind::at) return true;
    const double scale = std::max(a.total(x.requests).si(), 1.0);
    bool ok = std::abs((a.total(x.requests) - b.total(x.requests)).si()) <= 1e-9 * scale;
    ok = ok && x.ceiling == std::ceil(x.requests);
    const double lo = x.requests * 0.5, hi = x.requests * 2 + 1;
    ok = ok && ((a.total(lo) < b.total(lo)) != (a.total(hi) < b.total(hi)));
    if (!ok) why = "N*=" + oracle::num(x.requests) + " does not balance the lines";
    return ok;
  });
}

// format_display then parse_quantity recovers the value.
inline Result unit_round_trip(int cases) {
  return run("unit round-trip", 17, cases, [](auto& rng, std::string& why) {
    static const char* spellings[] = {"W",        "kWh",      "mWh/MByte", "Wh/(MByte*yr)", "Mbps",
                                      "GByte",    "h",        "min",       "g/kWh",         "W/Mbps",
                                      "J/s_video", "MWh",     "TWh",       "kJ/s",          "t"};
    const char* unit = spellings[std::uniform_int_distribution<int>(0, 14)(rng)];
    const double v = std::pow(10.0, uniform(rng, -6, 9)) * uniform(rng, 1, 10);
    const auto q = parse_quantity(oracle::num(v) + " " + unit);
    const auto back = parse_quantity(format_display(q));
    const bool ok = back.dim == q.dim && close(back.si, q.si, 1e-12);
    if (!ok) why = oracle::num(v) + " " + unit + " -> " + format_display(q);
    return ok;
  });
}

// The naive per-event walk and the library agree on every component.
inline Result enumeration_oracle(int cases) {
  return run("enumeration-oracle equivalence", 18, cases, [](auto& rng, std::string& why) {
    const auto w = oracle::random_world(rng);
    const auto expected = oracle::evaluate(w);
    const auto r = report::evaluate_service(load(w));
    const bool ok = close(r.ut.si(), expected.ut, 1e-9) && close(r.vp.si(), expected.vp, 1e-9) &&
                    close(r.nw_ut.si(), expected.nw_ut, 1e-9) && close(r.nw_cdn.si(), expected.nw_cdn, 1e-9) &&
                    close(r.total.si(), expected.total(), 1e-9);
    if (!ok)
      why = "library " + oracle::num(r.total.si()) + " J vs oracle " + oracle::num(expected.total()) + " J";
    return ok;
  });
}

// The per-video argmin equals the best of all option combinations.
inline Result assignment_exhaustive(int cases) {
  return run("assignment equals exhaustive search", 19, cases, [](auto& rng, std::string& why) {
    auto w = oracle::random_world(rng);
    w.fleets.assign(1, {{uniform(rng, 0, 150), 1, 0}, 0, 1, {{0, 3600, 5e6, 1, true}}});
    w.assets.assign(1, {1, 3600, 8e9, {{1, 8e9}}, 1, uniform(rng, 0, 1), true});
    const auto m = optimizer::VideoCostModel::from_scenario(load(w));
    const int n_opts = std::uniform_int_distribution<int>(1, 3)(rng);
    const int n_videos = std::uniform_int_distribution<int>(1, 5)(rng);
    std::vector<optimizer::EncoderOption> opts;
    for (int k = 0; k < n_opts; ++k)
      opts.push_back(optimizer::EncoderOption::make("o" + std::to_string(k), uniform(rng, 0.1, 1e5) * units::W,
                                                    uniform(rng, 1e8, 1e11) * units::bit, 3600 * units::s));
    std::vector<optimizer::VideoDemand> videos;
    for (int v = 0; v < n_videos; ++v)
      videos.push_back({m, std::floor(std::pow(10.0, uniform(rng, 0, 6))), double(1 + (rng() % 3))});
    const auto got = optimizer::assign_optimal_encoders(videos, opts);

    double best = INFINITY;
    std::vector<int> pick(n_videos, 0);
    for (;;) {
      double sum = 0;
      for (int v = 0; v < n_videos; ++v)
        sum += videos[v].videos * m.cost(opts[pick[v]]).total(videos[v].forecast).si();
      best = std::min(best, sum);
      int v = 0;
      while (v < n_videos && ++pick[v] == n_opts) pick[v++] = 0;
      if (v == n_videos) break;
    }
    bool ok = close(got.optimal.si(), best, 1e-12);
    for (const auto& e : got.single_policy) ok = ok && got.optimal <= e;
    if (!ok) why = "solver " + oracle::num(got.optimal.si()) + " J vs exhaustive " + oracle::num(best) + " J";
    return ok;
  });
}

// A rx request never depends on the tx power and vice versa.
inline Result direction_masking(int cases) {
  return run("direction masking", 20, cases, [](auto& rng, std::string& why) {
    const auto p = [&] { return uniform(rng, 0, 100) * units::W; };
    const auto d1 = model::DevicePowerProfile::make("a", p(), p(), p());
    auto d2 = d1;
    const auto req = model::StreamRequest::make(uniform(rng, 1, 1e4) * units::s, uniform(rng, 1, 1e8) * units::bps,
                                                model::Direction::rx);
    d2.tx = p();
    bool ok = model::ut_request_energy(d1, req) == model::ut_request_energy(d2, req);
    const auto up = model::StreamRequest::make(req.duration(), req.bitrate(), model::Direction::tx);
    auto d3 = d1;
    d3.rx = p();
    ok = ok && model::ut_request_energy(d1, up) == model::ut_request_energy(d3, up);
    ok = ok && close(req.video_size().si(), (req.bitrate() * req.duration()).si(), 1e-15);
    if (!ok) why = "direction leaks the opposite power";
    return ok;
  });
}

// Serializing a loaded scenario and loading it back is lossless.
inline Result serialize_round_trip(int cases) {
  return run("serialize round-trip", 21, cases, [](auto& rng, std::string& why) {
    const auto s = load(oracle::random_world(rng));
    const auto back = scenario::load_scenario(scenario::serialize(s));
    const bool ok = back == s;
    if (!ok) why = "scenario changed after a round-trip";
    return ok;
  });
}

inline std::vector<std::function<Result(int)>> all() {
  return {closure,         request_linearity,  pue_scaling,           monotonicity,
          scale_invariance, crossover_correct, unit_round_trip,       enumeration_oracle,
          assignment_exhaustive, direction_masking, serialize_round_trip};
}

}  // namespace props
