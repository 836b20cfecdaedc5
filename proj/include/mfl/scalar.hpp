#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "mfl/errors.hpp"

namespace mfl {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Exact rational scalars with arbitrary-precision integer parts.  The backing
// type keeps every value in lowest terms with a positive denominator, so
// equality of values is plain equality.  The field object itself is stateless;
// any two instances describe the same field.
class RationalField {
public:
    using Value = BigRational;

    Value zero() const { return Value(0); }
    Value one() const { return Value(1); }

    Value add(const Value& a, const Value& b) const { return Value(a + b); }
    Value sub(const Value& a, const Value& b) const { return Value(a - b); }
    Value mul(const Value& a, const Value& b) const { return Value(a * b); }
    Value neg(const Value& a) const { return Value(-a); }

    Value inv(const Value& a) const {
        if (is_zero(a)) throw Error("division by zero over " + name());
        return Value(Value(1) / a);
    }
    Value div(const Value& a, const Value& b) const {
        if (is_zero(b)) throw Error("division by zero over " + name());
        return Value(a / b);
    }

    bool is_zero(const Value& a) const { return a == 0; }
    bool equal(const Value& a, const Value& b) const { return a == b; }

    Value from_integer(long long n) const { return Value(n); }
    Value from_fraction(const BigInt& num, const BigInt& den) const {
        if (den == 0) throw Error("zero denominator in rational literal");
        if (den < 0) return Value(BigRational(-num, -den));  // backend wants den > 0
        return Value(BigRational(num, den));
    }

    static BigInt num(const Value& a) { return boost::multiprecision::numerator(a); }
    static BigInt den(const Value& a) { return boost::multiprecision::denominator(a); }

    std::string to_string(const Value& a) const {
        std::string out = num(a).str();
        if (den(a) != 1) out += "/" + den(a).str();
        return out;
    }

    std::string name() const { return "rational"; }

    friend bool operator==(const RationalField&, const RationalField&) { return true; }
    friend bool operator!=(const RationalField&, const RationalField&) { return false; }
};

// Prime field GF(p) with a runtime modulus.  Values are canonical residues in
// [0, p); the modulus is validated at construction, so arithmetic can trust
// it.  Two instances describe the same field exactly when their moduli agree;
// mixing moduli is a field mismatch, which callers holding two field objects
// must check (element containers do so on every binary operation).
class PrimeField {
public:
    using Value = std::uint32_t;

    explicit PrimeField(std::uint32_t p) : p_(p) {
        if (p < 2 || !is_prime(p))
            throw Error("prime field modulus must be prime, got " + std::to_string(p));
        if (p >= (1u << 31))
            throw Error("prime field modulus must fit in 31 bits, got " + std::to_string(p));
    }

    std::uint32_t modulus() const { return p_; }

    Value zero() const { return 0; }
    Value one() const { return 1 % p_; }

    Value add(Value a, Value b) const { return reduce(std::uint64_t(a) + b); }
    Value sub(Value a, Value b) const { return reduce(std::uint64_t(a) + p_ - b); }
    Value mul(Value a, Value b) const { return reduce(std::uint64_t(a) * b); }
    Value neg(Value a) const { return a == 0 ? 0 : p_ - a; }

    Value inv(Value a) const {
        if (a == 0) throw Error("division by zero over " + name());
        return pow_mod(a, p_ - 2);  // Fermat: a^(p-2) = a^-1 for prime p
    }
    Value div(Value a, Value b) const { return mul(a, inv(b)); }

    bool is_zero(Value a) const { return a == 0; }
    bool equal(Value a, Value b) const { return a == b; }

    Value from_integer(long long n) const {
        long long r = n % static_cast<long long>(p_);
        if (r < 0) r += p_;
        return static_cast<Value>(r);
    }
    Value from_fraction(const BigInt& num, const BigInt& den) const {
        if (den == 0) throw Error("zero denominator in scalar literal");
        Value d = residue(den);
        if (d == 0)
            throw Error("denominator divisible by the field modulus " + std::to_string(p_));
        return div(residue(num), d);
    }

    std::string to_string(Value a) const { return std::to_string(a); }

    std::string name() const { return "gf(" + std::to_string(p_) + ")"; }

    friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }
    friend bool operator!=(const PrimeField& a, const PrimeField& b) { return a.p_ != b.p_; }

private:
    Value reduce(std::uint64_t x) const { return static_cast<Value>(x % p_); }

    Value residue(const BigInt& n) const {
        BigInt r = n % p_;
        if (r < 0) r += p_;
        return static_cast<Value>(r);
    }

    Value pow_mod(Value base, std::uint32_t exp) const {
        std::uint64_t acc = 1, b = base;
        while (exp) {
            if (exp & 1) acc = acc * b % p_;
            b = b * b % p_;
            exp >>= 1;
        }
        return static_cast<Value>(acc);
    }

    static bool is_prime(std::uint32_t p) {
        if (p % 2 == 0) return p == 2;
        for (std::uint32_t d = 3; std::uint64_t(d) * d <= p; d += 2)
            if (p % d == 0) return false;
        return true;
    }

    std::uint32_t p_;
};

// Guard for binary operations between values owned by two field objects.
template <class F>
inline void require_same_field(const F& a, const F& b) {
    if (!(a == b))
        throw FieldMismatchError("operands belong to different fields: " + a.name() +
                                 " versus " + b.name());
}

}  // namespace mfl
