#pragma once

#include <cmath>
#include <compare>
#include <string>
#include <string_view>

namespace videnergy {

/// Exponents over the four base dimensions the model needs:
/// energy [J], time [s], information [bit] and mass [g].
struct Dim {
  int energy = 0;
  int time = 0;
  int info = 0;
  int mass = 0;

  friend constexpr bool operator==(Dim, Dim) = default;
  friend constexpr Dim operator+(Dim a, Dim b) {
    return {a.energy + b.energy, a.time + b.time, a.info + b.info, a.mass + b.mass};
  }
  friend constexpr Dim operator-(Dim a, Dim b) {
    return {a.energy - b.energy, a.time - b.time, a.info - b.info, a.mass - b.mass};
  }
};

namespace dims {
inline constexpr Dim none{};
inline constexpr Dim energy{1, 0, 0, 0};
inline constexpr Dim power{1, -1, 0, 0};
inline constexpr Dim time{0, 1, 0, 0};
inline constexpr Dim data_size{0, 0, 1, 0};
inline constexpr Dim data_rate{0, -1, 1, 0};
// J/bit; W/(bit/s) reduces to the same exponents.
inline constexpr Dim energy_per_bit{1, 0, -1, 0};
// J/(bit*s), i.e. energy per stored bit and unit of storage time.
inline constexpr Dim storage_rate{1, -1, -1, 0};
inline constexpr Dim mass{0, 0, 0, 1};
inline constexpr Dim carbon_intensity{-1, 0, 0, 1};
}  // namespace dims

/// A magnitude held in SI base units (J, s, bit, g) with a compile-time
/// dimension. Mixing dimensions in + or - does not compile.
template <Dim D>
class Quantity {
 public:
  static constexpr Dim dim = D;

  constexpr Quantity() = default;
  constexpr explicit Quantity(double si) : si_(si) {}

  /// Magnitude in SI base units.
  constexpr double si() const { return si_; }
  /// Magnitude expressed as a multiple of `unit`.
  constexpr double in(Quantity unit) const { return si_ / unit.si_; }

  constexpr Quantity& operator+=(Quantity o) { si_ += o.si_; return *this; }
  constexpr Quantity& operator-=(Quantity o) { si_ -= o.si_; return *this; }
  constexpr Quantity& operator*=(double k) { si_ *= k; return *this; }

  friend constexpr Quantity operator+(Quantity a, Quantity b) { return Quantity{a.si_ + b.si_}; }
  friend constexpr Quantity operator-(Quantity a, Quantity b) { return Quantity{a.si_ - b.si_}; }
  friend constexpr Quantity operator-(Quantity a) { return Quantity{-a.si_}; }
  friend constexpr Quantity operator*(Quantity a, double k) { return Quantity{a.si_ * k}; }
  friend constexpr Quantity operator*(double k, Quantity a) { return Quantity{a.si_ * k}; }
  friend constexpr Quantity operator/(Quantity a, double k) { return Quantity{a.si_ / k}; }

  friend constexpr bool operator==(Quantity, Quantity) = default;
  friend constexpr auto operator<=>(Quantity a, Quantity b) { return a.si_ <=> b.si_; }

 private:
  double si_ = 0.0;
};

template <Dim A, Dim B>
constexpr Quantity<A + B> operator*(Quantity<A> a, Quantity<B> b) {
  return Quantity<A + B>{a.si() * b.si()};
}

template <Dim A, Dim B>
constexpr Quantity<A - B> operator/(Quantity<A> a, Quantity<B> b) {
  return Quantity<A - B>{a.si() / b.si()};
}

using Dimensionless = Quantity<dims::none>;
using Energy = Quantity<dims::energy>;
using Power = Quantity<dims::power>;
using Time = Quantity<dims::time>;
using DataSize = Quantity<dims::data_size>;
using DataRate = Quantity<dims::data_rate>;
using EnergyPerBit = Quantity<dims::energy_per_bit>;
using PowerPerRate = Quantity<dims::energy_per_bit>;
using StorageRate = Quantity<dims::storage_rate>;
using Mass = Quantity<dims::mass>;
using CarbonIntensityValue = Quantity<dims::carbon_intensity>;

/// Unit constants. Decimal SI prefixes throughout (MByte = 10^6 byte).
namespace units {
inline constexpr Energy J{1.0};
inline constexpr Energy kJ{1e3};
inline constexpr Energy mWh{3.6};
inline constexpr Energy Wh{3600.0};
inline constexpr Energy kWh{3.6e6};
inline constexpr Energy MWh{3.6e9};
inline constexpr Energy GWh{3.6e12};
inline constexpr Energy TWh{3.6e15};

inline constexpr Power W{1.0};
inline constexpr Power mW{1e-3};
inline constexpr Power kW{1e3};

inline constexpr Time s{1.0};
inline constexpr Time minute{60.0};
inline constexpr Time h{3600.0};
inline constexpr Time day{86400.0};
/// 365 days; every yearly figure in the model uses this length.
inline constexpr Time year{365.0 * 86400.0};

inline constexpr DataSize bit{1.0};
inline constexpr DataSize byte{8.0};
inline constexpr DataSize MByte{8e6};
inline constexpr DataSize GByte{8e9};

inline constexpr DataRate bps{1.0};
inline constexpr DataRate Mbps{1e6};

inline constexpr Mass g{1.0};
inline constexpr Mass kg{1e3};
inline constexpr Mass tonne{1e6};

inline constexpr CarbonIntensityValue g_per_kWh{1.0 / 3.6e6};
}  // namespace units

/// Quantity whose dimension is only known at run time (parsed text).
struct DynamicQuantity {
  double si = 0.0;
  Dim dim{};
};

/// Parses a unit expression such as "mWh/MByte", "W/Mbps", "J/(bit*year)",
/// "Wh/MByte-yr" or "g/kWh". The returned magnitude is the SI value of one
/// unit. Throws Error(parse) for unknown symbols.
DynamicQuantity parse_unit(std::string_view unit);

/// Parses "<number> <unit>" (unit may be empty for dimensionless values).
DynamicQuantity parse_quantity(std::string_view text);

/// Human-readable name of a dimension, e.g. "energy" or "J/bit".
std::string dim_name(Dim d);

/// Formats `q` in the given unit using the shortest decimal that round-trips.
std::string format_in(DynamicQuantity q, std::string_view unit);

/// Formats `q` in its preferred display unit. Energies pick the Wh prefix
/// that keeps the mantissa in [1, 1000).
std::string format_display(DynamicQuantity q);

/// Shortest round-trip decimal for a double.
std::string format_number(double v);

template <Dim D>
DynamicQuantity dynamic(Quantity<D> q) {
  return {q.si(), D};
}

/// Throws Error(unit_mismatch) when `q` does not have dimension `expected`.
void check_dim(DynamicQuantity q, Dim expected, std::string_view path);

template <Dim D>
Quantity<D> as_quantity(DynamicQuantity q, std::string_view path = {}) {
  check_dim(q, D, path);
  return Quantity<D>{q.si};
}

inline bool is_finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace videnergy
