#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "videnergy/model.hpp"
#include "videnergy/scenario.hpp"

// What-if tools for one video: which encoder to use for a given demand, how
// much a bitrate ladder costs, and how the CDN size feeds into the total.
namespace videnergy::optimizer {

struct EncoderOption {
  std::string label;
  Power p_enc;
  DataSize output_size;
  Time duration;

  static EncoderOption make(std::string label, Power p_enc, DataSize output_size, Time duration);
  DataRate implied_bitrate() const { return output_size / duration; }
  friend bool operator==(const EncoderOption&, const EncoderOption&) = default;
};

/// total(N) = fixed + N * per_request.
struct CostLine {
  Energy fixed;
  Energy per_request;
  Energy total(double requests) const { return fixed + requests * per_request; }
};

/// Fixed terms are PUE-scaled except the network copy traffic.
struct FixedCost {
  Energy offset;
  Energy rx;
  Energy decoding;
  Energy encoding;
  Energy storage;
  Energy copies;
  Energy nw_copies;
  Energy total() const { return offset + rx + decoding + encoding + storage + copies + nw_copies; }
};

struct RequestCost {
  Energy ut;
  Energy nw;
  Energy tx;  ///< PUE-scaled
  Energy total() const { return ut + nw + tx; }
};

struct CostBreakdown {
  FixedCost fixed;
  RequestCost per_request;
  CostLine line() const { return {fixed.total(), per_request.total()}; }
};

class VideoCostModel {
 public:
  struct Params {
    model::ServerProfile server;
    double server_count = 1.0;
    double horizon_years = 1.0;
    Time duration;
    DataSize received_size;
    Power p_dec;
    bool uploaded = true;
    double stored_on = 1.0;
    double stored_fraction_of_year = 1.0;
    model::DevicePowerProfile device;
    model::NetworkProfile access;
    model::StreamRequest request;
    std::optional<model::NetworkProfile> cdn;
  };

  explicit VideoCostModel(Params p);

  /// Uses the scenario's server fleet, the given asset, and the first
  /// provider-served download of the first device fleet as the reference request.
  static VideoCostModel from_scenario(const scenario::Scenario& s, std::size_t asset);
  static VideoCostModel from_scenario(const scenario::Scenario& s);

  /// All variants are encoded, stored and copied; each request streams variants[0].
  CostBreakdown breakdown(std::span<const EncoderOption> variants) const;
  CostLine cost(std::span<const EncoderOption> variants) const { return breakdown(variants).line(); }
  CostLine cost(const EncoderOption& option) const { return cost(std::span(&option, 1)); }

  /// Same video on `count` servers, stored on each of them.
  VideoCostModel with_servers(double count) const;
  /// Origin plus `surrogates` copies.
  VideoCostModel with_surrogates(double surrogates) const { return with_servers(surrogates + 1.0); }

  const Params& params() const { return p_; }

 private:
  Params p_;
};

std::vector<EncoderOption> options_from_specs(std::span<const scenario::EncoderOptionSpec> specs, Time duration);

struct SweepRow {
  double requests;
  std::string option;
  Energy total;
};

/// Grid must be >= 0 and strictly increasing. Rows are ordered by count, then option.
std::vector<SweepRow> sweep_requests(const VideoCostModel& m, std::span<const EncoderOption> options,
                                     std::span<const double> grid);

struct Crossover {
  enum class Kind { at, none, always_equal };
  Kind kind = Kind::none;
  double requests = 0.0;  ///< real solution N*
  double ceiling = 0.0;   ///< smallest integer >= N*
};

Crossover crossover(const CostLine& a, const CostLine& b);
Crossover crossover(const VideoCostModel& m, const EncoderOption& a, const EncoderOption& b);

struct VideoDemand {
  VideoCostModel model;
  double forecast = 0.0;
  double videos = 1.0;  ///< identical videos sharing this forecast
};

struct Assignment {
  std::vector<std::size_t> choice;  ///< option index per demand entry
  Energy optimal;
  std::vector<Energy> single_policy;  ///< every video on option k
};

/// Per-video argmin; ties go to the lower p_enc, then the earlier option.
Assignment assign_optimal_encoders(std::span<const VideoDemand> videos, std::span<const EncoderOption> options);

struct LadderImpact {
  double requests = 0.0;
  Energy single;
  Energy ladder;
  double delta() const { return ((ladder - single) / single).si(); }
  double ratio() const { return (ladder / single).si(); }
};

/// Compares ladder[0] alone with the full ladder, both stored on the origin
/// plus `surrogates` servers.
LadderImpact ladder_impact(const VideoCostModel& base, std::span<const EncoderOption> ladder, double requests,
                           double surrogates);

struct SurrogateRow {
  double servers = 0.0;
  Energy total;
  FixedCost fixed;
};

/// The asset's own variants evaluated at each server count; request-driven
/// terms are unchanged.
std::vector<SurrogateRow> surrogate_scaling(const VideoCostModel& m, std::span<const EncoderOption> variants,
                                            std::span<const double> server_counts, double requests);
std::vector<SurrogateRow> surrogate_scaling(const scenario::Scenario& s, std::span<const double> server_counts,
                                            double requests);

/// Additional requests after which re-encoding an already published `from`
/// video into `to` pays for itself. Re-encoding repeats decoding, encoding
/// and placement of `to` but not the upload.
std::optional<double> reencode_break_even(const VideoCostModel& m, const EncoderOption& from,
                                          const EncoderOption& to);

}  // namespace videnergy::optimizer
