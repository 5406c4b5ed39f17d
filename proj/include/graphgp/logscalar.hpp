#pragma once

#include <cmath>
#include <limits>

// Signed log-magnitude scalar. The SBM closed forms contain factors like
// G^(2^l) that overflow double precision near depth 10, so the theory module
// carries (sign, log|value|) pairs and only exponentiates for ratios.

namespace graphgp {

struct LogScalar {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0; // -1, 0, +1

    static LogScalar zero() { return {}; }

    static LogScalar from_double(double v) {
        if (v == 0.0) return {};
        return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
    }

    /// May overflow to +/-inf for large magnitudes; that is the point of the
    /// representation.
    double to_double() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_abs);
    }

    bool is_zero() const { return sign == 0; }

    friend LogScalar operator*(const LogScalar& a, const LogScalar& b) {
        if (a.sign == 0 || b.sign == 0) return {};
        return {a.log_abs + b.log_abs, a.sign * b.sign};
    }

    friend LogScalar operator+(const LogScalar& a, const LogScalar& b) {
        if (a.sign == 0) return b;
        if (b.sign == 0) return a;
        double m = a.log_abs > b.log_abs ? a.log_abs : b.log_abs;
        double r = a.sign * std::exp(a.log_abs - m) + b.sign * std::exp(b.log_abs - m);
        if (r == 0.0) return {};
        return {m + std::log(std::abs(r)), r > 0.0 ? 1 : -1};
    }

    friend LogScalar operator-(const LogScalar& a, const LogScalar& b) {
        return a + LogScalar{b.log_abs, -b.sign};
    }

    LogScalar scaled(double c) const { return *this * from_double(c); }

    /// Integer power, exact in log space.
    LogScalar pow(long long e) const {
        if (e == 0) return from_double(1.0);
        if (sign == 0) return {};
        int s = (sign < 0 && (e % 2 != 0)) ? -1 : 1;
        return {log_abs * static_cast<double>(e), s};
    }

    /// this / other as a plain double: exp of the log difference, sign-aware.
    double ratio_to(const LogScalar& denom) const {
        if (sign == 0) return 0.0;
        return sign * denom.sign * std::exp(log_abs - denom.log_abs);
    }
};

} // namespace graphgp
