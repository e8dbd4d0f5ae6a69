#pragma once

// Exact rational value type. All envy/payment arithmetic in this library
// is sign-sensitive, so there is no floating point anywhere on the core path.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace subsidy {

class Value {
public:
    using rep = boost::multiprecision::cpp_rational;

    Value() = default;
    Value(long long v) : r_(v) {}  // NOLINT: implicit by design
    Value(long long num, long long den) : r_(num, den) {
        if (den == 0) throw std::invalid_argument("Value: zero denominator");
    }
    explicit Value(rep r) : r_(std::move(r)) {}

    const rep& raw() const { return r_; }

    Value operator+(const Value& o) const { return Value(r_ + o.r_); }
    Value operator-(const Value& o) const { return Value(r_ - o.r_); }
    Value operator-() const { return Value(-r_); }
    Value operator*(const Value& o) const { return Value(r_ * o.r_); }
    Value& operator+=(const Value& o) { r_ += o.r_; return *this; }
    Value& operator-=(const Value& o) { r_ -= o.r_; return *this; }

    auto operator<=>(const Value& o) const {
        return r_ < o.r_ ? std::strong_ordering::less
             : r_ > o.r_ ? std::strong_ordering::greater
                         : std::strong_ordering::equal;
    }
    bool operator==(const Value& o) const { return r_ == o.r_; }

    bool is_zero() const { return r_.is_zero(); }
    int sign() const { return r_ < 0 ? -1 : r_ > 0 ? 1 : 0; }

    /// Canonical text form: plain integer when the denominator is 1,
    /// otherwise "p/q" in lowest terms. parse(render(x)) == x.
    std::string render() const {
        using boost::multiprecision::cpp_int;
        cpp_int num = numerator(r_), den = denominator(r_);
        if (den == 1) return num.str();
        return num.str() + "/" + den.str();
    }

    /// Accepts integers ("3", "-2"), fractions ("7/10"), and decimal
    /// strings ("0.45"); decimals convert exactly.
    static std::optional<Value> parse(std::string_view s) {
        using boost::multiprecision::cpp_int;
        if (s.empty()) return std::nullopt;
        auto slash = s.find('/');
        try {
            if (slash != std::string_view::npos) {
                auto num = parse_int(s.substr(0, slash));
                auto den = parse_int(s.substr(slash + 1));
                if (!num || !den || *den <= 0) return std::nullopt;
                return Value(rep(*num, *den));
            }
            auto dot = s.find('.');
            if (dot == std::string_view::npos) {
                auto n = parse_int(s);
                if (!n) return std::nullopt;
                return Value(rep(*n));
            }
            std::string_view frac = s.substr(dot + 1);
            if (frac.empty() || frac.find_first_not_of("0123456789") != std::string_view::npos)
                return std::nullopt;
            auto whole = parse_int(s.substr(0, dot));
            if (!whole) return std::nullopt;
            bool neg = s[0] == '-';
            cpp_int den = 1;
            cpp_int fnum = 0;
            for (char c : frac) {
                den *= 10;
                fnum = fnum * 10 + (c - '0');
            }
            cpp_int num = *whole * den + (neg ? -fnum : fnum);
            return Value(rep(num, den));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    static Value parse_or_throw(std::string_view s) {
        auto v = parse(s);
        if (!v) throw std::invalid_argument("Value: cannot parse '" + std::string(s) + "'");
        return *v;
    }

private:
    static std::optional<boost::multiprecision::cpp_int> parse_int(std::string_view s) {
        using boost::multiprecision::cpp_int;
        bool neg = false;
        if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
            neg = s[0] == '-';
            s.remove_prefix(1);
        }
        if (s.empty() || s.find_first_not_of("0123456789") != std::string_view::npos)
            return std::nullopt;
        cpp_int n = 0;
        for (char c : s) n = n * 10 + (c - '0');
        return neg ? -n : n;
    }

    rep r_;
};

inline std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.render(); }

inline Value max(const Value& a, const Value& b) { return a < b ? b : a; }
inline Value min(const Value& a, const Value& b) { return a < b ? a : b; }

}  // namespace subsidy
