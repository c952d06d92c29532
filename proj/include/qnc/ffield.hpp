// Copyright 2026 The qnc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file
 * Exact arithmetic in the prime field F_p = Z/pZ for odd primes p.
 */

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnc {

/// Raised for invalid configuration: composite or even moduli, mixed moduli.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised for operations outside their mathematical domain (e.g. inverting 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline bool is_prime(std::uint64_t n) {
    if (n < 2) {
        return false;
    }
    if (n % 2 == 0) {
        return n == 2;
    }
    for (std::uint64_t d = 3; d * d <= n; d += 2) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

/// Element of F_p. The modulus travels with the value so that mixing
/// elements of two different fields is caught at runtime.
class Fp {
public:
    Fp() = default;

    std::uint32_t value() const { return value_; }
    std::uint32_t modulus() const { return p_; }

    friend bool operator==(const Fp&, const Fp&) = default;

    friend Fp operator+(Fp x, Fp y) {
        check_same(x, y);
        return Fp(static_cast<std::uint32_t>((std::uint64_t{x.value_} + y.value_) % x.p_), x.p_);
    }
    friend Fp operator-(Fp x) { return Fp(x.value_ == 0 ? 0 : x.p_ - x.value_, x.p_); }
    friend Fp operator-(Fp x, Fp y) { return x + (-y); }
    friend Fp operator*(Fp x, Fp y) {
        check_same(x, y);
        return Fp(static_cast<std::uint32_t>((std::uint64_t{x.value_} * y.value_) % x.p_), x.p_);
    }
    Fp& operator+=(Fp y) { return *this = *this + y; }
    Fp& operator*=(Fp y) { return *this = *this * y; }

    Fp pow(std::uint64_t e) const {
        Fp base = *this;
        Fp acc(1 % p_, p_);
        while (e > 0) {
            if (e & 1) {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    /// Multiplicative inverse via Fermat: x^(p-2).
    Fp inv() const {
        if (value_ == 0) {
            throw DomainError("inverse of zero in F_" + std::to_string(p_));
        }
        return pow(p_ - 2);
    }

private:
    friend class PrimeField;
    Fp(std::uint32_t v, std::uint32_t p) : value_(v), p_(p) {}

    static void check_same(const Fp& x, const Fp& y) {
        if (x.p_ != y.p_) {
            throw ConfigError("field mismatch: F_" + std::to_string(x.p_) + " vs F_" +
                              std::to_string(y.p_));
        }
    }

    std::uint32_t value_ = 0;
    std::uint32_t p_ = 0;
};

inline Fp add(Fp x, Fp y) { return x + y; }
inline Fp mul(Fp x, Fp y) { return x * y; }
inline Fp neg(Fp x) { return -x; }
inline Fp inv(Fp x) { return x.inv(); }

/// The field F_p itself; constructs and validates elements.
class PrimeField {
public:
    explicit PrimeField(std::uint32_t p) : p_(p) {
        if (p < 3 || !is_prime(p)) {
            throw ConfigError("modulus must be an odd prime >= 3, got " + std::to_string(p));
        }
    }

    std::uint32_t modulus() const { return p_; }

    /// Reduces any integer (including negatives) into [0, p).
    Fp operator()(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(p_);
        if (r < 0) {
            r += p_;
        }
        return Fp(static_cast<std::uint32_t>(r), p_);
    }

    Fp zero() const { return Fp(0, p_); }
    Fp one() const { return Fp(1, p_); }

    std::vector<Fp> elements() const {
        std::vector<Fp> out;
        out.reserve(p_);
        for (std::uint32_t v = 0; v < p_; ++v) {
            out.push_back(Fp(v, p_));
        }
        return out;
    }

    friend bool operator==(const PrimeField&, const PrimeField&) = default;

private:
    std::uint32_t p_;
};

} // namespace qnc
