// rational.hpp — exact rational arithmetic for rate exponents and degree comparisons
#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace csma {

// Exact rational p/q, normalized with q > 0. Order-of-magnitude comparisons
// in the landscape module must never go through floating point, so the beta
// exponents are carried as rationals end to end.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t value) : num_(value), den_(1) {}

    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
        normalize();
    }

    // Accepts "p/q", integers, and plain decimals ("0.75" -> 3/4).
    static Rational parse(std::string_view text) {
        std::string s(text);
        if (s.empty()) throw std::invalid_argument("Rational: empty string");
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            std::int64_t p = parse_int(s.substr(0, slash));
            std::int64_t q = parse_int(s.substr(slash + 1));
            return Rational(p, q);
        }
        auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(parse_int(s));
        std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
        if (tail.size() > 15) throw std::invalid_argument("Rational: too many decimal digits: " + s);
        bool neg = !head.empty() && head[0] == '-';
        std::int64_t whole = head.empty() || head == "-" ? 0 : std::llabs(parse_int(head));
        std::int64_t den = 1;
        for (std::size_t i = 0; i < tail.size(); ++i) den *= 10;
        std::int64_t frac = tail.empty() ? 0 : parse_int(tail);
        std::int64_t num = whole * den + frac;
        return Rational(neg ? -num : num, den);
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        // denominators are positive after normalization
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

private:
    static std::int64_t parse_int(const std::string& s) {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("Rational: bad integer: " + s);
        return v;
    }

    void normalize() {
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
        if (num_ == 0) den_ = 1;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace csma
