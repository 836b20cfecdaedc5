#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mfl/errors.hpp"
#include "mfl/rewrite.hpp"
#include "mfl/word.hpp"

namespace mfl {

// An element of the free Moufang loop: a class of words identified by its
// canonical representative (the order-minimum member of the unique reduced
// class).  Default-constructed elements are the identity e.  Equality is a
// single id compare; the literal length is cached at construction.
class LoopElement {
public:
    LoopElement() = default;

    static LoopElement from_word(Word w, const RewriteLimits& lim = {}) {
        Word c = canonical_word(w, lim);
        if (c != w) {
            // The search just proved w and c are words of one element; keep
            // the wider form so later equality searches can re-widen a
            // stuck occurrence of c and rebuild cancellations that this
            // reduction consumed.
            auto& arena = detail::WordArena::instance();
            std::scoped_lock lock(arena.mutex());
            arena.record_expansion(c.id(), w.id());
        }
        return LoopElement(c);
    }

    // Wrap a word that is already a canonical representative (e.g. read back
    // from a cache or basis layout) without re-running the reduction search.
    static LoopElement from_canonical(Word w) { return LoopElement(w); }

    Word canonical() const { return canon_; }
    std::uint32_t length() const { return len_; }
    bool is_identity() const { return canon_.is_empty(); }

    friend bool operator==(LoopElement a, LoopElement b) { return a.canon_ == b.canon_; }
    friend bool operator!=(LoopElement a, LoopElement b) { return a.canon_ != b.canon_; }

private:
    explicit LoopElement(Word w) : canon_(w), len_(w.length()) {}

    Word canon_;
    std::uint32_t len_ = 0;
};

inline LoopElement identity() { return LoopElement(); }

inline LoopElement parse_element(std::string_view text, const RewriteLimits& lim = {}) {
    return LoopElement::from_word(parse_word(text), lim);
}

inline std::string to_string(LoopElement a) { return to_string(a.canonical()); }

// Order by (length, text of the canonical word); the order used for
// universes and basis layouts.  Text order is pinned (rather than the
// internal structural order) so serialized bases and reports are stable
// across implementations of the word store.
inline bool element_less(LoopElement a, LoopElement b) {
    if (a.length() != b.length()) return a.length() < b.length();
    return to_string(a.canonical()) < to_string(b.canonical());
}

// Loop product {u}*{v} = {uv}: canonicalize the product tree of the two
// canonical representatives.  Results are memoized globally by the pair of
// canonical ids (the value is limit-independent; limits only bound the
// search).
inline LoopElement mul(LoopElement a, LoopElement b, const RewriteLimits& lim = {}) {
    auto& arena = detail::WordArena::instance();
    std::uint64_t key = (std::uint64_t(a.canonical().id()) << 32) | b.canonical().id();
    bool hit = false;
    std::uint32_t cached = 0;
    {
        std::scoped_lock lock(arena.mutex());
        auto it = arena.mul_cache.find(key);
        if (it != arena.mul_cache.end()) {
            hit = true;
            cached = it->second;
        }
    }
    if (hit) return LoopElement::from_canonical(detail::ArenaOps::wrap(cached));
    Word prod = Word::product(a.canonical(), b.canonical());
    LoopElement out = LoopElement::from_word(prod, lim);
    {
        std::scoped_lock lock(arena.mutex());
        arena.mul_cache.emplace(key, out.canonical().id());
    }
    return out;
}

// Loop inverse {u}^-1 = {u^-1}.  The syntactic inverse of a reduced word is
// reduced (the move and contraction patterns are mirror-symmetric), so this
// never triggers a reduction search; only the class minimum is recomputed.
inline LoopElement inv(LoopElement a, const RewriteLimits& lim = {}) {
    return LoopElement::from_word(invert(a.canonical()), lim);
}

// Element equality.  Identical canonical representatives decide almost
// every case; different representatives still denote one element when both
// one-sided reduction searches were truncated short of a common word, so
// the slow path re-decides by joint reachability (same_element).
inline bool eq(LoopElement a, LoopElement b, const RewriteLimits& lim = {}) {
    if (a == b) return true;
    return same_element(a.canonical(), b.canonical(), lim);
}

// The Moufang law x(y*zy) = (xy*z)y evaluated through mul on canonical
// elements.
inline bool check_moufang(LoopElement a, LoopElement b, LoopElement c,
                          const RewriteLimits& lim = {}) {
    LoopElement lhs = mul(a, mul(b, mul(c, b, lim), lim), lim);
    LoopElement rhs = mul(mul(mul(a, b, lim), c, lim), b, lim);
    return eq(lhs, rhs, lim);
}

// The inverse-property laws a^-1(ab) = b and (ba)a^-1 = b.
inline bool check_ip(LoopElement a, LoopElement b, const RewriteLimits& lim = {}) {
    LoopElement ai = inv(a, lim);
    return eq(mul(ai, mul(a, b, lim), lim), b, lim) && eq(mul(mul(b, a, lim), ai, lim), b, lim);
}

// All distinct elements of length <= max_len over x1..x_{n_gens}, sorted by
// (length, canonical text), identity included.  Built stratum by stratum:
// every canonical word of length l >= 2 splits at the root into reduced
// subwords whose classes are canonical elements of lengths summing to l, so
// products of earlier strata reach every element; products that collapse to
// a shorter length are duplicates of earlier strata and are dropped.
inline std::vector<LoopElement> enumerate_universe(std::uint32_t n_gens, std::uint32_t max_len,
                                                   const RewriteLimits& lim = {},
                                                   std::size_t element_cap = 1'000'000) {
    if (n_gens < 1) throw Error("enumerate_universe requires at least one generator");
    std::vector<std::vector<LoopElement>> strata(max_len + 1);
    strata[0].push_back(identity());
    std::size_t total = 1;
    auto grow = [&](std::size_t by) {
        total += by;
        if (total > element_cap) throw CapExceededError(total, element_cap);
    };
    if (max_len >= 1) {
        for (std::uint32_t i = 1; i <= n_gens; ++i)
            for (int sign : {+1, -1})
                strata[1].push_back(LoopElement::from_word(Word::leaf(i, sign), lim));
        grow(strata[1].size());
    }
    for (std::uint32_t l = 2; l <= max_len; ++l) {
        std::unordered_set<std::uint32_t> seen;
        // Distinct canonical ids can still denote one element when both
        // reduction searches stalled at different words, so id dedup alone
        // is not enough.  Candidates are partitioned by homomorphic image
        // signature (equal elements always share one) and only
        // signature-collisions pay for an exact equality check.  Words on
        // at most two generators have exact canonical forms and skip this.
        std::unordered_map<std::string, std::vector<LoopElement>> buckets;
        auto is_new = [&](LoopElement c) {
            if (!seen.insert(c.canonical().id()).second) return false;
            std::unordered_set<std::uint32_t> gens;
            for (const Literal& lit : literals(c.canonical())) gens.insert(lit.index);
            if (gens.size() <= 2) return true;
            auto sig = word_signature(c.canonical());
            std::string key(reinterpret_cast<const char*>(sig.data()), sizeof(sig));
            auto& bucket = buckets[key];
            for (LoopElement e : bucket)
                if (eq(c, e, lim)) return false;  // one element, differently stuck
            bucket.push_back(c);
            return true;
        };
        for (std::uint32_t i = 1; i < l; ++i) {
            for (LoopElement u : strata[i]) {
                for (LoopElement v : strata[l - i]) {
                    LoopElement c = mul(u, v, lim);
                    if (c.length() == l && is_new(c)) {
                        strata[l].push_back(c);
                        grow(1);
                    }
                }
            }
        }
        std::sort(strata[l].begin(), strata[l].end(), element_less);
    }
    std::vector<LoopElement> out;
    out.reserve(total);
    for (auto& s : strata) {
        std::sort(s.begin(), s.end(), element_less);
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

// Deterministic pseudo-random element: a uniformly bracketed product of
// uniformly signed generators, then canonicalized (so the result length can
// shrink below the drawn length but never exceed max_len).
inline LoopElement random_element(std::uint32_t n_gens, std::uint32_t max_len, std::uint64_t seed,
                                  const RewriteLimits& lim = {}) {
    if (n_gens < 1) throw Error("random_element requires at least one generator");
    if (max_len < 1) throw Error("random_element requires max_len >= 1");
    std::mt19937_64 rng(seed);
    auto next = [&](std::uint64_t n) { return rng() % n; };
    std::uint32_t length = 1 + static_cast<std::uint32_t>(next(max_len));
    auto build = [&](auto&& self, std::uint32_t len) -> Word {
        if (len == 1) {
            std::uint32_t idx = 1 + static_cast<std::uint32_t>(next(n_gens));
            int sign = next(2) ? -1 : +1;
            return Word::leaf(idx, sign);
        }
        std::uint32_t split = 1 + static_cast<std::uint32_t>(next(len - 1));
        Word l = self(self, split);
        Word r = self(self, len - split);
        return Word::product(l, r);
    };
    return LoopElement::from_word(build(build, length), lim);
}

}  // namespace mfl

template <>
struct std::hash<mfl::LoopElement> {
    std::size_t operator()(mfl::LoopElement a) const noexcept {
        return std::hash<std::uint32_t>()(a.canonical().id());
    }
};
