/* time.hpp -- fixed-point time values
 *
 * Timestamps, guard constants and zone bounds are all held as signed 64-bit
 * counts of nanoseconds.  Decimal literals with at most nine fractional
 * digits (the native resolution of every input this library consumes) are
 * represented exactly, so zone endpoints computed from them compare exactly;
 * longer fractions are rounded to the nearest nanosecond on input.
 */

#pragma once

#include <cctype>
#include <cstdint>
#include <string>

#include "tpm/errors.hpp"

namespace tpm {

/* Nanosecond count.  One second == kTick. */
using Time = std::int64_t;

inline constexpr Time kTick = 1'000'000'000;

/* Largest representable time; used as the "no upper bound" sentinel where a
 * plain Time must stand in for +infinity (the DBM layer has its own). */
inline constexpr Time kTimeMax = INT64_MAX;

constexpr Time time_from_seconds(std::int64_t s) { return s * kTick; }

/* Parse a decimal literal ("42", "3.9", "-0.25", ".5") into nanoseconds.
 * Fractions beyond nine digits round half away from zero.  Throws
 * ParseError on anything else. */
inline Time parse_time(const std::string& text) {
    const char* p = text.c_str();
    const char* end = p + text.size();
    bool negative = false;
    if (p != end && (*p == '+' || *p == '-')) {
        negative = (*p == '-');
        ++p;
    }
    bool any_digit = false;
    std::int64_t whole = 0;
    while (p != end && std::isdigit(static_cast<unsigned char>(*p))) {
        any_digit = true;
        int d = *p - '0';
        if (whole > (kTimeMax / kTick - 1) / 10)
            throw ParseError("time literal out of range: " + text);
        whole = whole * 10 + d;
        ++p;
    }
    std::int64_t frac = 0;
    if (p != end && *p == '.') {
        ++p;
        int digits = 0;
        while (p != end && std::isdigit(static_cast<unsigned char>(*p))) {
            any_digit = true;
            int d = *p - '0';
            if (digits < 9) {
                frac = frac * 10 + d;
            } else if (digits == 9 && d >= 5) {
                frac += 1; // round half away from zero
            }
            ++digits;
            ++p;
        }
        while (digits < 9) {
            frac *= 10;
            ++digits;
        }
    }
    if (!any_digit || p != end)
        throw ParseError("malformed time literal: '" + text + "'");
    Time value = whole * kTick + frac;
    return negative ? -value : value;
}

/* Render nanoseconds as a decimal literal with trailing zeros trimmed
 * ("3.9", "6", "-0.25"). */
inline std::string format_time(Time t) {
    std::string out;
    std::uint64_t a = t < 0 ? static_cast<std::uint64_t>(-(t + 1)) + 1
                            : static_cast<std::uint64_t>(t);
    std::uint64_t whole = a / kTick;
    std::uint64_t frac = a % kTick;
    if (t < 0) out += '-';
    out += std::to_string(whole);
    if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(digits.begin(), 9 - digits.size(), '0');
        while (digits.back() == '0') digits.pop_back();
        out += '.';
        out += digits;
    }
    return out;
}

} // namespace tpm
