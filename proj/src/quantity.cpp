#include "videnergy/quantity.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "videnergy/error.hpp"

namespace videnergy {

namespace {

struct Atom {
  std::string_view symbol;
  double scale;
  Dim dim;
  bool prefixable;
};

constexpr std::array<Atom, 19> kAtoms{{
    {"J", 1.0, dims::energy, true},
    {"Wh", 3600.0, dims::energy, true},
    {"W", 1.0, dims::power, true},
    {"s", 1.0, dims::time, true},
    {"s_video", 1.0, dims::time, false},
    {"min", 60.0, dims::time, false},
    {"h", 3600.0, dims::time, false},
    {"d", 86400.0, dims::time, false},
    {"day", 86400.0, dims::time, false},
    {"yr", 365.0 * 86400.0, dims::time, false},
    {"year", 365.0 * 86400.0, dims::time, false},
    {"bit", 1.0, dims::data_size, true},
    {"b", 1.0, dims::data_size, true},
    {"Byte", 8.0, dims::data_size, true},
    {"B", 8.0, dims::data_size, true},
    {"bps", 1.0, dims::data_rate, true},
    {"g", 1.0, dims::mass, true},
    {"t", 1e6, dims::mass, true},
    {"CO2E", 1.0, dims::none, false},
}};

struct Prefix {
  std::string_view symbol;
  double scale;
};

constexpr std::array<Prefix, 10> kPrefixes{{
    {"\xC2\xB5", 1e-6},  // micro sign
    {"p", 1e-12},
    {"n", 1e-9},
    {"u", 1e-6},
    {"m", 1e-3},
    {"k", 1e3},
    {"M", 1e6},
    {"G", 1e9},
    {"T", 1e12},
    {"P", 1e15},
}};

const Atom* find_atom(std::string_view s) {
  for (const auto& a : kAtoms)
    if (a.symbol == s) return &a;
  return nullptr;
}

Dim scale_dim(Dim d, int k) { return {d.energy * k, d.time * k, d.info * k, d.mass * k}; }

class UnitParser {
 public:
  explicit UnitParser(std::string_view text) : text_(text) {}

  DynamicQuantity parse() {
    skip_ws();
    if (pos_ == text_.size()) return {1.0, dims::none};
    DynamicQuantity q = unit();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(text_.substr(pos_)) + "'");
    return q;
  }

 private:
  DynamicQuantity unit() {
    DynamicQuantity q = term();
    while (true) {
      skip_ws();
      if (!consume("/")) break;
      DynamicQuantity d = term();
      q.si /= d.si;
      q.dim = q.dim - d.dim;
    }
    return q;
  }

  DynamicQuantity term() {
    DynamicQuantity q = factor();
    while (true) {
      skip_ws();
      if (consume("*") || consume("\xC2\xB7") || consume("-")) {
        DynamicQuantity f = factor();
        q.si *= f.si;
        q.dim = q.dim + f.dim;
      } else {
        break;
      }
    }
    return q;
  }

  DynamicQuantity factor() {
    skip_ws();
    DynamicQuantity q;
    if (consume("(")) {
      q = unit();
      skip_ws();
      if (!consume(")")) fail("missing ')'");
    } else {
      q = atom();
    }
    if (consume("^")) {
      int exponent = 0;
      const char* first = text_.data() + pos_;
      auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), exponent);
      if (ec != std::errc{}) fail("bad exponent");
      pos_ += static_cast<std::size_t>(ptr - first);
      q.si = std::pow(q.si, exponent);
      q.dim = scale_dim(q.dim, exponent);
    }
    return q;
  }

  DynamicQuantity atom() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      unsigned char c = static_cast<unsigned char>(text_[pos_]);
      if (std::isalpha(c) || c == '_' || c >= 0x80) {
        // Stop before a UTF-8 middle dot, it is a separator.
        if (text_.substr(pos_, 2) == "\xC2\xB7") break;
        ++pos_;
      } else if (std::isdigit(c) && pos_ > start) {
        ++pos_;  // CO2E
      } else {
        break;
      }
    }
    std::string_view word = text_.substr(start, pos_ - start);
    if (word.empty()) fail("expected a unit symbol");
    if (const Atom* a = find_atom(word)) return {a->scale, a->dim};
    for (const auto& p : kPrefixes) {
      if (word.size() > p.symbol.size() && word.substr(0, p.symbol.size()) == p.symbol) {
        const Atom* a = find_atom(word.substr(p.symbol.size()));
        if (a != nullptr && a->prefixable) return {p.scale * a->scale, a->dim};
      }
    }
    fail("unknown unit symbol '" + std::string(word) + "'");
  }

  bool consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::parse, "", "unit \"" + std::string(text_) + "\": " + why);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

DynamicQuantity parse_unit(std::string_view unit) { return UnitParser(trim(unit)).parse(); }

DynamicQuantity parse_quantity(std::string_view text) {
  std::string_view s = trim(text);
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr == first)
    throw Error(ErrorCode::parse, "", "cannot read a number from \"" + std::string(text) + "\"");
  if (!std::isfinite(value))
    throw Error(ErrorCode::invalid_value, "", "non-finite magnitude in \"" + std::string(text) + "\"");
  DynamicQuantity unit = parse_unit(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
  return {value * unit.si, unit.dim};
}

std::string dim_name(Dim d) {
  if (d == dims::none) return "dimensionless";
  if (d == dims::energy) return "energy [J]";
  if (d == dims::power) return "power [W]";
  if (d == dims::time) return "time [s]";
  if (d == dims::data_size) return "data-size [bit]";
  if (d == dims::data_rate) return "data-rate [bit/s]";
  if (d == dims::energy_per_bit) return "energy-per-bit [J/bit]";
  if (d == dims::storage_rate) return "energy-per-bit-year [J/(bit*s)]";
  if (d == dims::mass) return "mass [g]";
  if (d == dims::carbon_intensity) return "carbon-intensity [g/J]";
  std::string out;
  auto add = [&out](std::string_view sym, int e) {
    if (e == 0) return;
    if (!out.empty()) out += "*";
    out += sym;
    if (e != 1) out += "^" + std::to_string(e);
  };
  add("J", d.energy);
  add("s", d.time);
  add("bit", d.info);
  add("g", d.mass);
  return out;
}

void check_dim(DynamicQuantity q, Dim expected, std::string_view path) {
  if (q.dim != expected)
    throw Error(ErrorCode::unit_mismatch, std::string(path),
                "expected " + dim_name(expected) + ", got " + dim_name(q.dim));
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::string format_in(DynamicQuantity q, std::string_view unit) {
  DynamicQuantity u = parse_unit(unit);
  check_dim(q, u.dim, "");
  std::string out = format_number(q.si / u.si);
  if (!trim(unit).empty()) {
    out += " ";
    out += trim(unit);
  }
  return out;
}

std::string format_display(DynamicQuantity q) {
  if (q.dim == dims::energy) {
    static constexpr std::array<std::string_view, 7> kEnergy{"mWh", "Wh", "kWh", "MWh", "GWh", "TWh", "PWh"};
    double wh = std::fabs(q.si) / 3600.0;
    std::size_t idx = 1;
    if (wh > 0.0) {
      int decade = static_cast<int>(std::floor(std::log10(wh) / 3.0)) + 1;
      idx = static_cast<std::size_t>(std::clamp(decade, 0, static_cast<int>(kEnergy.size()) - 1));
    }
    return format_in(q, kEnergy[idx]);
  }
  if (q.dim == dims::none) return format_number(q.si);
  if (q.dim == dims::power) return format_in(q, "W");
  if (q.dim == dims::time) return format_in(q, "s");
  if (q.dim == dims::data_size) return format_in(q, "MByte");
  if (q.dim == dims::data_rate) return format_in(q, "Mbps");
  if (q.dim == dims::energy_per_bit) return format_in(q, "J/bit");
  if (q.dim == dims::storage_rate) return format_in(q, "J/(bit*s)");
  if (q.dim == dims::mass) return format_in(q, "g");
  if (q.dim == dims::carbon_intensity) return format_in(q, "g/kWh");
  return format_number(q.si) + " " + dim_name(q.dim);
}

}  // namespace videnergy
