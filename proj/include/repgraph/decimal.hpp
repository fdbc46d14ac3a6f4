#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace repgraph {

/// Fixed-point decimal with 8 fractional digits, stored as a scaled 64-bit
/// integer. Sums are exact; the textual form is canonical (no trailing
/// zeros, no leading '+'), so format(parse(s)) is stable.
class Decimal {
 public:
  static constexpr int kFractionDigits = 8;
  static constexpr std::int64_t kScale = 100'000'000;

  constexpr Decimal() = default;

  static constexpr Decimal from_units(std::int64_t scaled) {
    Decimal d;
    d.units_ = scaled;
    return d;
  }

  static constexpr Decimal from_integer(std::int64_t whole) {
    return from_units(whole * kScale);
  }

  /// Accepts `[-]digits[.digits]` with at most kFractionDigits after the
  /// point. Returns nullopt for anything else, including overflow.
  static std::optional<Decimal> parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '-') {
      negative = true;
      pos = 1;
    }
    if (pos >= text.size()) return std::nullopt;

    constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
    std::int64_t whole = 0;
    std::size_t int_digits = 0;
    while (pos < text.size() && text[pos] != '.') {
      char c = text[pos];
      if (c < '0' || c > '9') return std::nullopt;
      int digit = c - '0';
      if (whole > (kMax / kScale - digit) / 10) return std::nullopt;
      whole = whole * 10 + digit;
      ++int_digits;
      ++pos;
    }
    if (int_digits == 0) return std::nullopt;

    std::int64_t frac = 0;
    int frac_digits = 0;
    if (pos < text.size()) {
      ++pos;  // '.'
      if (pos >= text.size()) return std::nullopt;
      while (pos < text.size()) {
        char c = text[pos];
        if (c < '0' || c > '9') return std::nullopt;
        if (frac_digits == kFractionDigits) return std::nullopt;
        frac = frac * 10 + (c - '0');
        ++frac_digits;
        ++pos;
      }
    }
    for (int i = frac_digits; i < kFractionDigits; ++i) frac *= 10;
    if (whole == kMax / kScale && frac > kMax % kScale) return std::nullopt;

    std::int64_t units = whole * kScale + frac;
    return from_units(negative ? -units : units);
  }

  std::string to_string() const {
    std::uint64_t magnitude = units_ < 0 ? 0 - static_cast<std::uint64_t>(units_)
                                         : static_cast<std::uint64_t>(units_);
    std::string out = units_ < 0 ? "-" : "";
    out += std::to_string(magnitude / kScale);
    std::uint64_t frac = magnitude % kScale;
    if (frac != 0) {
      std::string digits = std::to_string(frac);
      digits.insert(0, kFractionDigits - digits.size(), '0');
      while (digits.back() == '0') digits.pop_back();
      out += '.';
      out += digits;
    }
    return out;
  }

  constexpr std::int64_t units() const { return units_; }
  constexpr bool negative() const { return units_ < 0; }
  double to_double() const { return static_cast<double>(units_) / kScale; }

  /// Exact sum; nullopt on overflow.
  static std::optional<Decimal> checked_add(Decimal a, Decimal b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a.units_, b.units_, &out)) return std::nullopt;
    return from_units(out);
  }

  /// Product rounded half away from zero to kFractionDigits; nullopt on
  /// overflow.
  static std::optional<Decimal> checked_mul(Decimal a, Decimal b) {
    __int128 wide = static_cast<__int128>(a.units_) * b.units_;
    __int128 half = kScale / 2;
    __int128 q = wide >= 0 ? (wide + half) / kScale : (wide - half) / kScale;
    if (q > std::numeric_limits<std::int64_t>::max() ||
        q < std::numeric_limits<std::int64_t>::min()) {
      return std::nullopt;
    }
    return from_units(static_cast<std::int64_t>(q));
  }

  friend constexpr auto operator<=>(Decimal, Decimal) = default;

 private:
  std::int64_t units_ = 0;
};

}  // namespace repgraph
