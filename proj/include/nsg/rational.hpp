#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>

#include "nsg/errors.hpp"

namespace nsg {

// Exact scalar for the rational backend. Conversion from double is exact
// (doubles are dyadic rationals), so parsed decimal input loses nothing.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

[[nodiscard]] inline double to_double(const Rat& q) {
    return q.convert_to<double>();
}

[[nodiscard]] inline Rat rat_of(double v) {
    if (!std::isfinite(v))
        throw InvalidSpec("non-finite scalar");
    return Rat(v);
}

[[nodiscard]] inline int sign(const Rat& q) {
    if (q > 0) return 1;
    if (q < 0) return -1;
    return 0;
}

[[nodiscard]] inline Rat rat_abs(const Rat& q) {
    return q < 0 ? Rat(-q) : q;
}

namespace detail {

inline BigInt pow10(unsigned k) {
    BigInt r = 1;
    for (unsigned i = 0; i < k; ++i) r *= 10;
    return r;
}

} // namespace detail

// Parses "3/4", "-2", "1.25", "2.5e-3". Throws InvalidSpec on anything else.
[[nodiscard]] inline Rat parse_rat(const std::string& text) {
    auto fail = [&]() -> Rat {
        throw InvalidSpec("cannot parse scalar '" + text + "'");
    };
    std::string s = text;
    // trim
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    if (a == std::string::npos) return fail();
    s = s.substr(a, b - a + 1);

    if (const auto slash = s.find('/'); slash != std::string::npos) {
        try {
            BigInt num(s.substr(0, slash));
            BigInt den(s.substr(slash + 1));
            if (den == 0) return fail();
            return Rat(num, den);
        } catch (const std::exception&) {
            return fail();
        }
    }

    int exp10 = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string::npos) {
        try {
            exp10 = std::stoi(s.substr(e + 1));
        } catch (const std::exception&) {
            return fail();
        }
        s = s.substr(0, e);
    }

    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = (s[0] == '-');
        s = s.substr(1);
    }
    std::string digits;
    unsigned frac_digits = 0;
    bool seen_dot = false;
    for (char c : s) {
        if (c == '.') {
            if (seen_dot) return fail();
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seen_dot) ++frac_digits;
        } else {
            return fail();
        }
    }
    if (digits.empty()) return fail();

    Rat r(BigInt(digits), detail::pow10(frac_digits));
    if (exp10 > 0)
        r *= Rat(detail::pow10(static_cast<unsigned>(exp10)));
    else if (exp10 < 0)
        r /= Rat(detail::pow10(static_cast<unsigned>(-exp10)));
    return neg ? Rat(-r) : r;
}

[[nodiscard]] inline std::string rat_str(const Rat& q) {
    return q.str();
}

} // namespace nsg
