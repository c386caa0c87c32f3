#include "videnergy/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "videnergy/error.hpp"

namespace videnergy::optimizer {

EncoderOption EncoderOption::make(std::string label, Power p_enc, DataSize output_size, Time duration) {
  auto v = model::EncodeVariant::make(label, p_enc, output_size);
  if (!(duration.si() > 0.0) || !std::isfinite(duration.si()))
    throw Error(ErrorCode::invalid_value, label + ".duration", "must be > 0");
  return {std::move(v.label), v.p_enc, v.output_size, duration};
}

VideoCostModel::VideoCostModel(Params p) : p_(std::move(p)) {
  model::require_nonnegative(p_.server_count, "servers.count");
  model::require_nonnegative(p_.stored_on, "stored_on");
  if (p_.stored_on > p_.server_count)
    throw Error(ErrorCode::invalid_value, "stored_on", "exceeds the number of servers");
}

VideoCostModel VideoCostModel::from_scenario(const scenario::Scenario& s) {
  return from_scenario(s, s.optimization ? s.optimization->asset : 0);
}

VideoCostModel VideoCostModel::from_scenario(const scenario::Scenario& s, std::size_t asset) {
  if (asset >= s.assets.size())
    throw Error(ErrorCode::unresolved_ref, "optimization.asset", "scenario has no asset " + std::to_string(asset));
  const scenario::DeviceFleet* fleet = nullptr;
  const scenario::RequestSpec* req = nullptr;
  for (const auto& f : s.device_fleets) {
    for (const auto& w : f.workload) {
      if (w.provider_served && w.request.direction() != model::Direction::tx) {
        fleet = &f;
        req = &w;
        break;
      }
    }
    if (fleet) break;
  }
  if (!fleet)
    throw Error(ErrorCode::invalid_value, "device_fleets", "no provider-served download to use as reference request");
  const auto& a = s.assets[asset];
  Params p{s.servers.profile,
           s.servers.count,
           s.horizon.si() / units::year.si(),
           a.duration,
           a.received_size(),
           a.decode_power(s.servers.profile),
           a.uploaded,
           a.stored_on,
           a.stored_fraction_of_year,
           fleet->profile,
           fleet->network,
           req->request,
           std::nullopt};
  if (!s.cdn_network_ref.empty()) p.cdn = s.cdn_network;
  return VideoCostModel(std::move(p));
}

CostBreakdown VideoCostModel::breakdown(std::span<const EncoderOption> variants) const {
  if (variants.empty()) throw Error(ErrorCode::invalid_value, "variants", "need at least one encoder option");
  const auto& sv = p_.server;
  const double pue = sv.pue;
  CostBreakdown b;

  DataSize all;
  for (const auto& v : variants) all += v.output_size;
  const double copies = std::max(p_.stored_on - 1.0, 0.0);

  b.fixed.offset = pue * (p_.server_count * p_.horizon_years * sv.offset_per_year);
  if (p_.uploaded) {
    std::vector<model::EncodeVariant> ev;
    for (const auto& v : variants) ev.push_back({v.label, v.p_enc, v.output_size});
    const auto job = model::TranscodeJob::make(p_.duration, std::move(ev));
    b.fixed.rx = pue * model::vp_transfer_energy(p_.received_size, sv.rx_per_bit);
    b.fixed.decoding = pue * model::vp_decode_energy(job, p_.p_dec);
    b.fixed.encoding = pue * model::vp_encode_energy(job);
  }
  const DataSize stored = p_.stored_on * all;
  b.fixed.storage = pue * model::vp_storage_energy(std::span(&stored, 1), sv.store_per_bit,
                                                   p_.stored_fraction_of_year);
  b.fixed.copies = pue * model::vp_transfer_energy(copies * all, sv.send_per_bit);
  if (p_.cdn && copies > 0.0) {
    for (const auto& v : variants) {
      const auto copy = model::StreamRequest::make(v.duration, v.implied_bitrate(), model::Direction::tx, v.output_size);
      b.fixed.nw_copies += copies * model::nw_request_energy(*p_.cdn, copy);
    }
  }

  b.per_request.ut = model::ut_request_energy(p_.device, p_.request);
  b.per_request.nw = model::nw_request_energy(p_.access, p_.request);
  b.per_request.tx = pue * model::vp_transfer_energy(variants.front().output_size, sv.send_per_bit);
  return b;
}

VideoCostModel VideoCostModel::with_servers(double count) const {
  if (!(count >= 1.0)) throw Error(ErrorCode::invalid_value, "servers.count", "must be >= 1");
  Params p = p_;
  p.server_count = count;
  p.stored_on = count;
  return VideoCostModel(std::move(p));
}

std::vector<EncoderOption> options_from_specs(std::span<const scenario::EncoderOptionSpec> specs, Time duration) {
  std::vector<EncoderOption> out;
  for (const auto& s : specs) out.push_back(EncoderOption::make(s.label, s.p_enc, s.output_size, duration));
  return out;
}

std::vector<SweepRow> sweep_requests(const VideoCostModel& m, std::span<const EncoderOption> options,
                                     std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    model::require_nonnegative(grid[i], "grid." + std::to_string(i));
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw Error(ErrorCode::invalid_value, "grid." + std::to_string(i), "grid must be strictly increasing");
  }
  std::vector<CostLine> lines;
  for (const auto& o : options) lines.push_back(m.cost(o));
  std::vector<SweepRow> rows;
  for (double n : grid)
    for (std::size_t k = 0; k < options.size(); ++k) rows.push_back({n, options[k].label, lines[k].total(n)});
  return rows;
}

Crossover crossover(const CostLine& a, const CostLine& b) {
  const double slope = (a.per_request - b.per_request).si();
  const double gap = (b.fixed - a.fixed).si();
  if (slope == 0.0) return {gap == 0.0 ? Crossover::Kind::always_equal : Crossover::Kind::none, 0.0, 0.0};
  const double n = gap / slope;
  if (!(n >= 0.0) || !std::isfinite(n)) return {Crossover::Kind::none, 0.0, 0.0};
  return {Crossover::Kind::at, n, std::ceil(n)};
}

Crossover crossover(const VideoCostModel& m, const EncoderOption& a, const EncoderOption& b) {
  return crossover(m.cost(a), m.cost(b));
}

Assignment assign_optimal_encoders(std::span<const VideoDemand> videos, std::span<const EncoderOption> options) {
  if (options.empty()) throw Error(ErrorCode::invalid_value, "options", "need at least one encoder option");
  // Candidate order for tie-breaking: lower p_enc first, then listing order.
  std::vector<std::size_t> order(options.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return options[x].p_enc < options[y].p_enc; });

  Assignment out;
  out.single_policy.assign(options.size(), Energy{});
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const auto& v = videos[i];
    model::require_nonnegative(v.forecast, "videos." + std::to_string(i) + ".forecast");
    model::require_nonnegative(v.videos, "videos." + std::to_string(i) + ".videos");
    std::vector<Energy> totals;
    for (const auto& o : options) totals.push_back(v.model.cost(o).total(v.forecast));
    std::size_t best = order.front();
    for (std::size_t k : order)
      if (totals[k] < totals[best]) best = k;
    out.choice.push_back(best);
    out.optimal += v.videos * totals[best];
    for (std::size_t k = 0; k < options.size(); ++k) out.single_policy[k] += v.videos * totals[k];
  }
  return out;
}

LadderImpact ladder_impact(const VideoCostModel& base, std::span<const EncoderOption> ladder, double requests,
                           double surrogates) {
  if (ladder.empty()) throw Error(ErrorCode::invalid_value, "ladder", "ladder must not be empty");
  model::require_nonnegative(requests, "requests");
  model::require_nonnegative(surrogates, "surrogates");
  const auto m = base.with_surrogates(surrogates);
  return {requests, m.cost(ladder.front()).total(requests), m.cost(ladder).total(requests)};
}

std::vector<SurrogateRow> surrogate_scaling(const VideoCostModel& m, std::span<const EncoderOption> variants,
                                            std::span<const double> server_counts, double requests) {
  model::require_nonnegative(requests, "requests");
  std::vector<SurrogateRow> out;
  for (double c : server_counts) {
    const auto b = m.with_servers(c).breakdown(variants);
    out.push_back({c, b.line().total(requests), b.fixed});
  }
  return out;
}

std::vector<SurrogateRow> surrogate_scaling(const scenario::Scenario& s, std::span<const double> server_counts,
                                            double requests) {
  const auto m = VideoCostModel::from_scenario(s);
  const auto& a = s.assets[s.optimization ? s.optimization->asset : 0];
  std::vector<EncoderOption> variants;
  for (const auto& v : a.variants) variants.push_back(EncoderOption::make(v.label, v.p_enc, v.output_size, a.duration));
  return surrogate_scaling(m, variants, server_counts, requests);
}

std::optional<double> reencode_break_even(const VideoCostModel& m, const EncoderOption& from,
                                          const EncoderOption& to) {
  const auto b = m.breakdown(std::span(&to, 1));
  const Energy investment = b.fixed.total() - b.fixed.rx - b.fixed.offset;
  const Energy saving = m.cost(from).per_request - b.per_request.total();
  if (!(saving.si() > 0.0)) return std::nullopt;
  return (investment / saving).si();
}

}  // namespace videnergy::optimizer
