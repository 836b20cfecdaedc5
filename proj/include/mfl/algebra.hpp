#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mfl/errors.hpp"
#include "mfl/loop.hpp"
#include "mfl/scalar.hpp"

namespace mfl {

// Basis words are ordered by (length, canonical text), matching the order
// used for universes and basis layouts everywhere else.
using TermKey = std::pair<std::uint32_t, std::string>;

inline TermKey term_key(LoopElement u) { return {u.length(), to_string(u)}; }

// An element of the loop algebra F[M]: a finite formal sum of loop elements
// with scalar coefficients.  Terms are stored in key order with zero
// coefficients pruned eagerly, so equal elements have identical term lists
// and serialization is deterministic.  The field object travels with the
// element; binary operations confirm both operands agree on the field.
template <class F>
class AlgebraElement {
public:
    using Value = typename F::Value;

    struct Term {
        LoopElement element;
        Value coeff;
    };

    explicit AlgebraElement(F field) : field_(std::move(field)) {}

    static AlgebraElement zero(F field) { return AlgebraElement(std::move(field)); }

    // The basis element 1*u.
    static AlgebraElement basis(F field, LoopElement u) {
        AlgebraElement out(std::move(field));
        out.accumulate(u, out.field_.one());
        return out;
    }

    // The multiplicative unit 1*e.
    static AlgebraElement unit(F field) { return basis(std::move(field), identity()); }

    const F& field() const { return field_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    // Ordered storage: key -> term, ascending by (length, text).
    const std::map<TermKey, Term>& entries() const { return terms_; }

    std::vector<Term> terms() const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const auto& [k, t] : terms_) out.push_back(t);
        return out;
    }

    std::vector<LoopElement> support() const {
        std::vector<LoopElement> out;
        out.reserve(terms_.size());
        for (const auto& [k, t] : terms_) out.push_back(t.element);
        return out;
    }

    Value coeff(LoopElement u) const {
        auto it = terms_.find(term_key(u));
        return it == terms_.end() ? field_.zero() : it->second.coeff;
    }

    // += c*u, pruning the term if the total vanishes.
    AlgebraElement& accumulate(LoopElement u, const Value& c) {
        if (field_.is_zero(c)) return *this;
        auto [it, fresh] = terms_.try_emplace(term_key(u), Term{u, c});
        if (!fresh) {
            it->second.coeff = field_.add(it->second.coeff, c);
            if (field_.is_zero(it->second.coeff)) terms_.erase(it);
        }
        return *this;
    }

    friend bool operator==(const AlgebraElement& x, const AlgebraElement& y) {
        require_same_field(x.field_, y.field_);
        if (x.terms_.size() != y.terms_.size()) return false;
        auto a = x.terms_.begin();
        auto b = y.terms_.begin();
        for (; a != x.terms_.end(); ++a, ++b) {
            if (a->first != b->first) return false;
            if (!x.field_.equal(a->second.coeff, b->second.coeff)) return false;
        }
        return true;
    }
    friend bool operator!=(const AlgebraElement& x, const AlgebraElement& y) { return !(x == y); }

private:
    F field_;
    std::map<TermKey, Term> terms_;
};

template <class F>
AlgebraElement<F> add(const AlgebraElement<F>& x, const AlgebraElement<F>& y) {
    require_same_field(x.field(), y.field());
    AlgebraElement<F> out = x;
    for (const auto& [k, t] : y.entries()) out.accumulate(t.element, t.coeff);
    return out;
}

template <class F>
AlgebraElement<F> neg(const AlgebraElement<F>& x) {
    AlgebraElement<F> out(x.field());
    for (const auto& [k, t] : x.entries()) out.accumulate(t.element, x.field().neg(t.coeff));
    return out;
}

template <class F>
AlgebraElement<F> sub(const AlgebraElement<F>& x, const AlgebraElement<F>& y) {
    require_same_field(x.field(), y.field());
    AlgebraElement<F> out = x;
    for (const auto& [k, t] : y.entries()) out.accumulate(t.element, x.field().neg(t.coeff));
    return out;
}

template <class F>
AlgebraElement<F> scalar_mul(const typename F::Value& c, const AlgebraElement<F>& x) {
    AlgebraElement<F> out(x.field());
    for (const auto& [k, t] : x.entries()) out.accumulate(t.element, x.field().mul(c, t.coeff));
    return out;
}

// Bilinear extension of the loop product.  Every pairwise word product runs
// through the reduction engine under `lim`, so the word-layer caps apply.
template <class F>
AlgebraElement<F> mul(const AlgebraElement<F>& x, const AlgebraElement<F>& y,
                      const RewriteLimits& lim = {}) {
    require_same_field(x.field(), y.field());
    AlgebraElement<F> out(x.field());
    for (const auto& [kx, tx] : x.entries())
        for (const auto& [ky, ty] : y.entries())
            out.accumulate(mul(tx.element, ty.element, lim), x.field().mul(tx.coeff, ty.coeff));
    return out;
}

// (x, y, z) = (xy)z - x(yz), the trilinear measure of non-associativity.
template <class F>
AlgebraElement<F> associator(const AlgebraElement<F>& x, const AlgebraElement<F>& y,
                             const AlgebraElement<F>& z, const RewriteLimits& lim = {}) {
    return sub(mul(mul(x, y, lim), z, lim), mul(x, mul(y, z, lim), lim));
}

// The augmentation homomorphism: sum of coefficients (every basis word maps
// to 1).
template <class F>
typename F::Value augmentation(const AlgebraElement<F>& x) {
    typename F::Value acc = x.field().zero();
    for (const auto& [k, t] : x.entries()) acc = x.field().add(acc, t.coeff);
    return acc;
}

template <class F>
bool is_in_augmentation_ideal(const AlgebraElement<F>& x) {
    return x.field().is_zero(augmentation(x));
}

// Deterministic text form: terms in key order, coefficients rendered by the
// field, "1" coefficients elided on non-identity words, identity word
// rendered as the bare coefficient, rational signs folded into " - ".
template <class F>
std::string to_string(const AlgebraElement<F>& x) {
    if (x.is_zero()) return "0";
    std::string out;
    for (const auto& [k, t] : x.entries()) {
        std::string c = x.field().to_string(t.coeff);
        bool negative = !c.empty() && c[0] == '-';
        std::string mag = negative ? c.substr(1) : c;
        bool ident = t.element.length() == 0;
        std::string piece;
        if (ident)
            piece = mag;
        else if (mag == "1")
            piece = to_string(t.element);
        else
            piece = mag + "*" + to_string(t.element);
        if (out.empty())
            out = negative ? "-" + piece : piece;
        else
            out += (negative ? " - " : " + ") + piece;
    }
    return out;
}

namespace detail {

// Recursive-descent parser for algebra elements:
//   poly        := [sign] term (sign term)*
//   sign        := '+' | '-'
//   term        := coefficient ['*' factor] | factor
//   factor      := word | '(' poly ')'
//   coefficient := digits ['/' digits]
// Words follow the word grammar (including its own parentheses); an opening
// parenthesis starts a poly group exactly when a '+' or '-' that is not part
// of a '^-1' exponent appears before the matching close.  Poly groups can be
// scaled by a coefficient but not multiplied together; general products are
// a library operation, not a text form.
template <class F>
class PolyParser {
public:
    using Value = typename F::Value;

    PolyParser(F field, std::string_view text, const RewriteLimits& lim)
        : field_(std::move(field)), text_(text), lim_(lim) {}

    AlgebraElement<F> parse() {
        AlgebraElement<F> out = parse_poly();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return out;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    AlgebraElement<F> parse_poly() {
        AlgebraElement<F> out(field_);
        bool negate = false;
        if (peek('+'))
            ++pos_;
        else if (peek('-')) {
            ++pos_;
            negate = true;
        }
        parse_term(out, negate);
        for (;;) {
            if (peek('+')) {
                ++pos_;
                parse_term(out, false);
            } else if (peek('-')) {
                ++pos_;
                parse_term(out, true);
            } else {
                break;
            }
        }
        return out;
    }

    void parse_term(AlgebraElement<F>& out, bool negate) {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("expected term", pos_);
        Value c = field_.one();
        bool have_coeff = false;
        if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            c = parse_coefficient();
            have_coeff = true;
        }
        if (negate) c = field_.neg(c);
        if (have_coeff && !peek('*')) {
            out.accumulate(LoopElement(), c);
            return;
        }
        if (have_coeff) ++pos_;  // consume '*'
        AlgebraElement<F> factor = parse_factor();
        for (const auto& [k, t] : factor.entries())
            out.accumulate(t.element, field_.mul(c, t.coeff));
    }

    AlgebraElement<F> parse_factor() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("expected word or group", pos_);
        if (text_[pos_] == '(' && group_is_poly()) {
            std::size_t at = pos_++;
            AlgebraElement<F> inner = parse_poly();
            if (!peek(')')) throw ParseError("unbalanced '('", at);
            ++pos_;
            return inner;
        }
        Word w = parse_word_at(text_, pos_);
        return AlgebraElement<F>::basis(field_, LoopElement::from_word(w, lim_));
    }

    // Decide whether the group opening at pos_ is a poly group: scan to the
    // matching ')' looking for a sign that is not the '-' of a '^-1'.
    bool group_is_poly() const {
        int depth = 0;
        char prev = '\0';
        for (std::size_t i = pos_; i < text_.size(); ++i) {
            char ch = text_[i];
            if (std::isspace(static_cast<unsigned char>(ch))) continue;
            if (ch == '(') {
                ++depth;
            } else if (ch == ')') {
                if (--depth == 0) return false;
            } else if ((ch == '+' || ch == '-') && prev != '^') {
                return true;
            }
            prev = ch;
        }
        return false;  // unbalanced: let the word parser report the offset
    }

    Value parse_coefficient() {
        BigInt num = parse_digits();
        if (pos_ < text_.size() && text_[pos_] == '/' && pos_ + 1 < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
            ++pos_;
            BigInt den = parse_digits();
            return field_.from_fraction(num, den);
        }
        return field_.from_fraction(num, 1);
    }

    BigInt parse_digits() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return BigInt(std::string(text_.substr(start, pos_ - start)));
    }

    F field_;
    std::string_view text_;
    std::size_t pos_ = 0;
    RewriteLimits lim_;
};

}  // namespace detail

template <class F>
AlgebraElement<F> parse_poly(F field, std::string_view text, const RewriteLimits& lim = {}) {
    return detail::PolyParser<F>(std::move(field), text, lim).parse();
}

}  // namespace mfl
