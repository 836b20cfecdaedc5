#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <queue>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "mfl/word.hpp"

namespace mfl {

// Resource limits for equivalence-closure and normal-form searches.
struct RewriteLimits {
    std::size_t closure_cap = 20'000;   // max members of one equivalence closure
    std::size_t path_budget = 100'000;  // max explored classes per normal form
};

// A Moufang-equivalence class: all members (sorted by the structural order)
// plus the distinguished minimal member.
struct EquivalenceClass {
    std::vector<Word> members;
    Word canonical;
};

// One cancellation opportunity inside a word: `position` is the path from
// the root to the contractible subterm ("" = root, then 'L'/'R' steps), and
// `result` is the whole word after contracting there.
struct MuRedex {
    std::string position;
    Word result;
};

namespace detail {

// Exact inequality witness for words: their images under loop homomorphisms
// into the unit loop of Zorn vector matrices over GF(10007).  A vector
// matrix ((a,u),(v,b)) has scalars a, b and 3-vectors u, v, with
//
//   x*y = ( a1*a2 + u1.v2,            a1*u2 + b2*u1 - v1 x v2 ;
//           a2*v1 + b1*v2 + u1 x u2,  b1*b2 + v1.u2 )
//
// (dot and cross products over the field).  This algebra is alternative,
// so its invertible elements -- det = a*b - u.v != 0, with inverse the
// adjugate ((b,-u),(-v,a)) over det -- form a Moufang loop, and any
// assignment of generators to invertible matrices extends to a loop
// homomorphism from the free Moufang loop.  Equal elements therefore have
// equal images under every assignment: a differing image is a proof of
// inequality, while agreement proves nothing and callers must fall back to
// the exact search.  Assignments are drawn from a fixed deterministic
// stream so signatures are stable across runs.
class OctonionProbe {
public:
    static constexpr std::uint64_t P = 10007;  // prime; 8 coords per matrix
    static constexpr std::size_t kRounds = 2;  // independent assignments

    struct Elt {
        std::uint64_t a = 1, b = 1;
        std::array<std::uint64_t, 3> u{0, 0, 0}, v{0, 0, 0};
    };

    static Elt one() { return Elt{}; }

    static Elt mul(const Elt& x, const Elt& y) {
        Elt r;
        r.a = (x.a * y.a + dot(x.u, y.v)) % P;
        r.b = (x.b * y.b + dot(x.v, y.u)) % P;
        auto cuv = cross(x.v, y.v);
        auto cvu = cross(x.u, y.u);
        for (int i = 0; i < 3; ++i) {
            r.u[i] = (x.a * y.u[i] + y.b * x.u[i] + P * P - cuv[i]) % P;
            r.v[i] = (y.a * x.v[i] + x.b * y.v[i] + cvu[i]) % P;
        }
        return r;
    }

    static std::uint64_t det(const Elt& x) { return (x.a * x.b + P * P - dot(x.u, x.v)) % P; }

    static Elt inv(const Elt& x) {
        std::uint64_t di = pow_mod(det(x), P - 2);
        Elt r;
        r.a = x.b * di % P;
        r.b = x.a * di % P;
        for (int i = 0; i < 3; ++i) {
            r.u[i] = (P - x.u[i]) * di % P;
            r.v[i] = (P - x.v[i]) * di % P;
        }
        return r;
    }

    // Deterministic invertible image of generator `index` in assignment
    // `round`.
    static Elt generator(std::size_t round, std::uint32_t index) {
        std::uint64_t s = (std::uint64_t(round) << 32 | index) * 0x9E3779B97F4A7C15ull;
        for (;;) {
            std::uint64_t t = s;
            auto draw = [&] {
                t += 0x9E3779B97F4A7C15ull;
                std::uint64_t z = t;
                z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
                z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
                return (z ^ (z >> 31)) % P;
            };
            Elt g;
            g.a = draw();
            g.b = draw();
            for (int i = 0; i < 3; ++i) g.u[i] = draw();
            for (int i = 0; i < 3; ++i) g.v[i] = draw();
            if (det(g) != 0) return g;
            s = t + 1;  // rare: redraw until invertible
        }
    }

private:
    static std::uint64_t dot(const std::array<std::uint64_t, 3>& x,
                             const std::array<std::uint64_t, 3>& y) {
        return (x[0] * y[0] + x[1] * y[1] + x[2] * y[2]) % P;
    }

    static std::array<std::uint64_t, 3> cross(const std::array<std::uint64_t, 3>& x,
                                              const std::array<std::uint64_t, 3>& y) {
        return {(x[1] * y[2] + P * P - x[2] * y[1]) % P, (x[2] * y[0] + P * P - x[0] * y[2]) % P,
                (x[0] * y[1] + P * P - x[1] * y[0]) % P};
    }

    static std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e) {
        std::uint64_t r = 1;
        while (e) {
            if (e & 1) r = r * base % P;
            base = base * base % P;
            e >>= 1;
        }
        return r;
    }
};

// Signature of a word: its 8 matrix coordinates under each probe
// assignment, flattened.  Caller holds the arena mutex.
using ProbeSignature = std::array<std::uint32_t, 8 * OctonionProbe::kRounds>;

inline ProbeSignature probe_signature(const WordArena& arena, std::uint32_t w) {
    ProbeSignature sig{};
    std::size_t at = 0;
    for (std::size_t round = 0; round < OctonionProbe::kRounds; ++round) {
        auto eval = [&](auto&& self, std::uint32_t id) -> OctonionProbe::Elt {
            const WordArena::Node n = arena.node(id);
            switch (n.kind) {
                case WordArena::kLeaf: {
                    OctonionProbe::Elt g = OctonionProbe::generator(round, n.a);
                    return n.b ? OctonionProbe::inv(g) : g;
                }
                case WordArena::kNode:
                    return OctonionProbe::mul(self(self, n.a), self(self, n.b));
                default:
                    return OctonionProbe::one();
            }
        };
        OctonionProbe::Elt e = eval(eval, w);
        sig[at++] = std::uint32_t(e.a);
        sig[at++] = std::uint32_t(e.b);
        for (int i = 0; i < 3; ++i) sig[at++] = std::uint32_t(e.u[i]);
        for (int i = 0; i < 3; ++i) sig[at++] = std::uint32_t(e.v[i]);
    }
    return sig;
}

// The bracketing moves generating Moufang equivalence.  Each move is an
// instance of an identity valid in every Moufang loop, applied as a tree
// rewrite on any subterm, in both directions:
//
//   left Moufang       ((r*s)*r)*t    <->  r*(s*(r*t))
//   right Moufang      ((x*y)*z)*y    <->  x*(y*(z*y))
//   middle Moufang     (x*y)*(z*x)    <->  x*((y*z)*x)
//   square             (u*v)*(u*v)    <->  u*(v*(u*v))
//   inverse mate, L    (u'*w)*(u*z)   <->  u'*((w*u)*z)     where u' = invert(u)
//   inverse mate, R    (p*u')*(q*u)   <->  (p*(u'*q))*u     where u' = invert(u)
//   conjugation mate   ((p*q)*r)*u'   <->  p*(q*(r*u'))     where p = invert(u')
//   2-generated assoc  (p*q)*t       <->  p*(q*t)   when p, q, t all lie in
//                                         one two-generated subloop
//
// The inverse-mate moves are the Moufang laws with the repeated variable
// split across an inverse pair.  The left form follows from the left
// Moufang identity plus the inverse property: x((x'w)(xz)) = ((x(x'w))x)z
// = (wx)z, and cancelling x on the left gives (x'w)(xz) = x'((wx)z); the
// right form is its image under inversion.  The conjugation mate is the
// identity ((a*q)*r)*a' = a*(q*(r*a')): writing r = s*a (always possible
// by the inverse property), both sides collapse to a*(q*s) via the middle
// Moufang law, flexibility and the inverse property.  All sign
// arrangements fire because invert() is checked syntactically in both
// directions.
//
// The re-association move fires under either of two syntactic certificates
// of two-generatedness: the leaves of p, q and t together use at most two
// distinct generators (under any assignment the images land in a subloop
// generated by those two images), or two of the three factors are equal up
// to inversion (all three then lie in the subloop generated by the two
// distinct factors).  Two-generated subloops of Moufang loops are groups
// by di-associativity, so the re-association is a valid identity; it
// covers the alternative and flexible laws and their inverse-mate forms.
// The square move supplies the balanced/combed identification for doubled
// products.  All moves preserve the leaf sequence, so every closure is a
// subset of the finitely many bracketings of a fixed literal string.
//
// Two-generated subtrees get special treatment throughout.  Inside such a
// subtree every bracketing is reachable from every other (the first
// certificate applies at each internal node), all bracketings are
// interchangeable, and cancellation behaves exactly as in a free group on
// two generators.  Enumerating those bracketings is pure waste: a block of
// k literals alone contributes the (k-1)-st Catalan number of closure
// members.  The normal-form and representative searches therefore work
// modulo block bracketing: every maximal two-generated subtree is pinned
// to its right-comb form (the structural minimum, so class minima are
// unchanged), moves are applied only at nodes whose factors span at least
// three generators, and cancellations that full rebracketing would expose
// inside a block are recovered directly on the block's literal string
// (prefix and suffix matching below).  The public closure remains the
// full, unquotiented enumeration.
class Rewriter {
public:
    explicit Rewriter(const RewriteLimits& lim)
        : arena_(WordArena::instance()), lock_(arena_.mutex()), lim_(lim) {}

    using Id = std::uint32_t;

    // --- closure -----------------------------------------------------------

    // All words reachable from `w` by bracketing moves (unsorted).
    std::vector<Id> closure(Id w) {
        std::unordered_set<Id> seen{w};
        std::vector<Id> queue{w};
        std::vector<Id> alts;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            Id m = queue[qi];
            each_subterm(m, [&](const std::vector<bool>& path, Id sub) {
                if (arena_.node(sub).kind != WordArena::kNode) return;
                alts.clear();
                subterm_rewrites(sub, alts);
                for (Id alt : alts) {
                    Id full = replace_at(m, path, 0, alt);
                    if (seen.insert(full).second) {
                        if (seen.size() > lim_.closure_cap)
                            throw CapExceededError(seen.size(), lim_.closure_cap);
                        queue.push_back(full);
                    }
                }
            });
        }
        return queue;
    }

    // Minimal member of the closure of `w`, memoized for the whole class.
    Id rep(Id w) {
        auto it = arena_.rep_cache.find(w);
        if (it != arena_.rep_cache.end()) return it->second;
        Id best;
        if (arena_.node(w).gcount <= 2) {
            // Two-generated: the right comb is the minimal bracketing.
            std::vector<Id> seq;
            flatten(w, seq);
            best = comb(seq);
            arena_.rep_cache.emplace(best, best);
        } else {
            Id start = normalize_brackets(w);
            auto hit = arena_.rep_cache.find(start);
            if (hit != arena_.rep_cache.end()) {
                arena_.rep_cache.emplace(w, hit->second);
                return hit->second;
            }
            std::vector<Id> cls = closure_q(start);
            best = cls.front();
            for (Id m : cls)
                if (arena_.compare(m, best) < 0) best = m;
            for (Id m : cls) arena_.rep_cache.emplace(m, best);
        }
        arena_.rep_cache.emplace(w, best);
        return best;
    }

    bool equivalent(Id a, Id b) {
        if (a == b) return true;
        if (!same_literal_sequence(a, b)) return false;
        return rep(a) == rep(b);
    }

    // --- cancellation ------------------------------------------------------

    // Collects every redex of `w`: subterm occurrences matching
    // u^-1*(v*w') -> w'  or  (w'*v)*u^-1 -> w'  (and the w' = e forms)
    // with u Moufang-equivalent to v.  Deterministic pre-order enumeration.
    std::vector<std::pair<std::string, Id>> redexes(Id w) {
        std::vector<std::pair<std::string, Id>> out;
        std::set<std::pair<std::string, Id>> seen;
        each_subterm(w, [&](const std::vector<bool>& path, Id sub) {
            // Node data copied by value: rewriting interns new nodes, which
            // can reallocate the arena's node table.
            const auto n = arena_.node(sub);
            if (n.kind != WordArena::kNode) return;
            const Id a = n.a, b = n.b;
            const auto na = arena_.node(a), nb = arena_.node(b);
            auto emit = [&](Id replacement) {
                Id full = replace_at(w, path, 0, replacement);
                std::string pos;
                for (bool right : path) pos += right ? 'R' : 'L';
                if (seen.emplace(pos, full).second) out.emplace_back(pos, full);
            };
            // a = u^-1, b = v*w': contract to w'
            if (nb.kind == WordArena::kNode && equivalent(arena_.invert(a), nb.a)) emit(nb.b);
            // a = w'*v, b = u^-1: contract to w'
            if (na.kind == WordArena::kNode && equivalent(arena_.invert(b), na.b)) emit(na.a);
            // a = u^-1, b = v (whole subterm cancels to e)
            if (equivalent(arena_.invert(a), b)) emit(arena_.empty());
        });
        return out;
    }

    // --- normal form -------------------------------------------------------

    // Least reduced word of `w`: explores every contraction from every
    // member of the (block-quotiented, migration-widened) closure,
    // recursively reduces each branch, and returns the least terminal by
    // (length, then structural order).  Reduction order genuinely matters
    // here -- two orders can strand an inverse pair against differently
    // shaped neighborhoods and stall at different words of the same
    // element, occasionally even at different lengths -- so the
    // representative is defined as the least terminal found, never an
    // assumed-unique one.
    Id canonical(Id w) {
        budget_ = lim_.path_budget;
        checked_ = false;
        return canonical_impl(w);
    }

    // As canonical(), but additionally monitors the classical confluence
    // claim: every maximal reduction path must land in one terminal class.
    // Throws ConfluenceError carrying two witness terminals when reduction
    // orders disagree, and refuses (CapExceededError) rather than drawing
    // any conclusion from a truncated closure.
    Id canonical_checked(Id w) {
        budget_ = lim_.path_budget;
        checked_ = true;
        diverged_ = false;
        Id c = canonical_impl(w);
        checked_ = false;
        if (diverged_) throw ConfluenceError(text(div_a_), text(div_b_));
        return c;
    }

    // Decides whether two words denote one element.  Canonical forms decide
    // almost every case; when they differ on words with equal net exponents
    // the lateral bridging may simply have been truncated asymmetrically,
    // so the robust criterion is whether the two reduction searches meet
    // anywhere, not whether their one-sided minima coincide.
    bool equal_elements(Id u, Id v) {
        checked_ = false;
        budget_ = lim_.path_budget;
        Id cu = canonical_impl(u);
        budget_ = lim_.path_budget;
        Id cv = canonical_impl(v);
        if (cu == cv) return true;
        if (exponents(cu) != exponents(cv)) return false;
        if (arena_.node(cu).gcount <= 2 && arena_.node(cv).gcount <= 2)
            return false;  // two-generated forms are exact free-group normal forms
        if (probe_signature(arena_, cu) != probe_signature(arena_, cv))
            return false;  // homomorphic images differ: a proof of inequality
        std::unordered_set<Id> ru, rv;
        budget_ = lim_.path_budget;
        reach_all(cu, ru);
        budget_ = lim_.path_budget;
        reach_all(cv, rv);
        if (ru.size() > rv.size()) ru.swap(rv);
        for (Id x : ru)
            if (rv.count(x)) {
                // A proven equality of differently reduced words: remember
                // each as a wider form of the other for later searches.
                arena_.record_expansion(cu, cv);
                arena_.record_expansion(cv, cu);
                return true;
            }
        return false;
    }

    std::vector<Id> sorted(std::vector<Id> ids) {
        std::sort(ids.begin(), ids.end(), [&](Id x, Id y) { return arena_.compare(x, y) < 0; });
        return ids;
    }

    std::string text(Id w) {
        std::string s;
        arena_.append_text(w, s);
        return s;
    }

    WordArena& arena() { return arena_; }

private:
    // One reduction-search pass: the block-quotiented closure of `w`
    // (optionally widened by the pair migrations), enumerated breadth-first
    // while collecting every contraction reachable from any member.
    struct Search {
        std::vector<Id> members;
        std::vector<Id> branches;  // deduplicated one-step contraction results
        bool complete = true;      // false when the cap cut enumeration short
    };

    // If the member cap cuts enumeration short, the pass still returns the
    // contractions already found: reducing via a partial closure is sound
    // (every branch is a genuine contraction), it can only miss a
    // still-shorter alternative.  With no contraction in hand -- or in
    // checked mode, where the all-paths guarantee must not be weakened
    // silently -- a truncated pass refuses instead.
    Search explore(Id w, bool with_migrations) {
        Search sr;
        std::unordered_set<Id> seen{w};
        std::unordered_set<Id> branch_seen;
        sr.members.push_back(w);
        std::vector<Id> alts;
        for (std::size_t qi = 0; qi < sr.members.size(); ++qi) {
            Id m = sr.members[qi];
            for (Id z : redexes_q(m))
                if (branch_seen.insert(z).second) sr.branches.push_back(z);
            if (!sr.complete) continue;  // past the cap: only harvest redexes
            each_subterm(m, [&](const std::vector<bool>& path, Id sub) {
                if (!sr.complete) return;
                const auto n = arena_.node(sub);
                if (n.kind != WordArena::kNode || n.gcount <= 2) return;
                alts.clear();
                subterm_rewrites_q(sub, alts);
                if (with_migrations) migration_rewrites(sub, alts);
                for (Id alt : alts) {
                    Id full = normalize_brackets(replace_at(m, path, 0, alt));
                    if (seen.insert(full).second) {
                        if (seen.size() > lim_.closure_cap) {
                            sr.complete = false;
                            return;
                        }
                        sr.members.push_back(full);
                    }
                }
            });
        }
        if (!sr.complete && (checked_ || sr.branches.empty()))
            throw CapExceededError(seen.size(), lim_.closure_cap);
        return sr;
    }

    // Order on reduced candidates: by length first (the normal form is the
    // least reduced word), then by the structural order.
    bool reduced_less(Id a, Id b) {
        const auto na = arena_.node(a);
        const auto nb = arena_.node(b);
        if (na.length != nb.length) return na.length < nb.length;
        return arena_.compare(a, b) < 0;
    }

    // The two modes keep separate memo tables: the least-mode search ranges
    // over strictly more moves (the translation-stack family below), so its
    // results may be shorter than the checked mode's single-terminal answer,
    // and neither may silently stand in for the other.
    bool cached(Id w, Id& val) {
        auto& table = checked_ ? arena_.canon_strict : arena_.canon_cache;
        auto it = table.find(w);
        if (it == table.end()) return false;
        val = it->second;
        return true;
    }

    // Record a computed reduced form.  After a divergence the strict table
    // is left untouched, so a later checked call re-derives (and re-reports)
    // the divergence instead of returning a value that skipped the monitor.
    void remember(Id w, Id result) {
        if (checked_) {
            if (!diverged_) arena_.canon_strict.emplace(w, result);
        } else {
            arena_.canon_cache.emplace(w, result);
        }
    }

    // Breadth-first search over whole equivalence classes, in two passes.
    //
    // Pass 1 follows contractions only.  Each frontier word is explored
    // with its full (block-quotiented) closure: first the plain bracketing
    // class, then -- only when that is contraction-free -- the closure
    // widened by the pair migrations, which relocate a stranded inverse
    // pair u^-1...u within the literal string and can expose contractions
    // the plain class hides.  Contractions found anywhere in a class become
    // new frontier words; words inside an already-explored class are
    // skipped, so reduction orders converging on one intermediate are paid
    // for once.  A class with no contraction is terminal, and the primary
    // result is the least terminal by (length, structural order).
    //
    // Pass 2 (least mode only) bridges laterally: each terminal class
    // spawns its translation-stack variants -- same-element words the
    // length-preserving closure cannot reach -- which re-enter the search
    // and may contract further.  A lateral find is adopted only when it is
    // strictly shorter than the primary result.  Lateral classes of the
    // same length never displace the primary minimum: which of them the
    // truncated variant search uncovers depends on the starting word, so
    // letting them win would make the result depend on the reduction path
    // taken into the terminal, exactly the instability the primary pass
    // avoids.  Equality of same-length minima is instead decided by the
    // joint reachability search below.
    Id canonical_impl(Id w) {
        Id hit;
        if (cached(w, hit)) return hit;
        // Freely reduce and comb all two-generated blocks first.  Block
        // cancellations are free-group cancellations, hence confluent among
        // themselves and safe to commit to eagerly.
        Id start = reduce_blocks(w);
        if (arena_.node(start).gcount <= 2) {
            // The whole word is one block; its comb is the canonical form.
            remember(start, start);
            remember(w, start);
            return start;
        }
        std::vector<Id> frontier{start};
        std::unordered_set<Id> queued{start};
        std::unordered_set<Id> in_explored;
        std::vector<Id> visited;       // every word shown equal to w
        std::vector<Id> terminals;     // contraction-free minima and cached results
        std::vector<Id> stuck_minima;  // variant seeds for the lateral pass
        // Lateral sweeps absorb refusals (a primary result is already in
        // hand, and a lateral bridge can only improve on it).
        auto sweep = [&](std::size_t from, bool lateral) {
            for (std::size_t qi = from; qi < frontier.size(); ++qi) {
                Id m = frontier[qi];
                if (in_explored.count(m)) continue;
                Id c;
                if (cached(m, c)) {
                    terminals.push_back(c);
                    continue;
                }
                if (budget_ == 0) {
                    if (lateral) return;
                    throw PathBudgetError(lim_.path_budget);
                }
                --budget_;
                Search sr;
                try {
                    sr = explore(m, /*with_migrations=*/false);
                    if (sr.branches.empty()) sr = explore(m, /*with_migrations=*/true);
                } catch (const CapExceededError&) {
                    if (lateral) continue;
                    throw;
                }
                in_explored.insert(sr.members.begin(), sr.members.end());
                visited.insert(visited.end(), sr.members.begin(), sr.members.end());
                if (!sr.branches.empty()) {
                    // Block-reduce each branch before queueing: a contraction
                    // can merge or grow a two-generated block, whose comb
                    // form (with free cancellation) is the exact
                    // representative the rest of the search assumes.
                    std::vector<Id> next;
                    next.reserve(sr.branches.size());
                    for (Id z : sr.branches) next.push_back(reduce_blocks(z));
                    for (Id z : sorted(next))
                        if (queued.insert(z).second) frontier.push_back(z);
                    continue;
                }
                Id t = sr.members.front();
                for (Id x : sr.members)
                    if (arena_.compare(x, t) < 0) t = x;
                terminals.push_back(t);
                stuck_minima.push_back(t);
            }
        };
        sweep(0, /*lateral=*/false);
        Id result = terminals.front();
        for (Id t : terminals)
            if (reduced_less(t, result)) result = t;
        if (checked_) {
            std::set<Id> distinct(terminals.begin(), terminals.end());
            if (distinct.size() > 1 && !diverged_) {
                diverged_ = true;
                auto i = distinct.begin();
                div_a_ = *i++;
                div_b_ = *i;
            }
        } else {
            const Id primary = result;
            std::size_t seeded = 0;
            std::size_t from = frontier.size();
            while (seeded < stuck_minima.size()) {
                for (; seeded < stuck_minima.size(); ++seeded)
                    for (Id v : sorted(stack_variants(stuck_minima[seeded]))) {
                        Id z = reduce_blocks(v);
                        if (queued.insert(z).second) frontier.push_back(z);
                    }
                sweep(from, /*lateral=*/true);
                from = frontier.size();
            }
            for (Id t : terminals)
                if (arena_.node(t).length < arena_.node(primary).length &&
                    reduced_less(t, result))
                    result = t;
        }
        for (Id m : visited) remember(m, result);
        remember(w, result);
        return result;
    }

    // All words reachable from `w` by contractions, migrations and
    // translation-stack bridges, best-effort (refusals stop expansion, they
    // do not propagate).  Every collected word is provably a word of `w`'s
    // element.
    void reach_all(Id w, std::unordered_set<Id>& out) {
        out.insert(w);
        Id start = reduce_blocks(w);
        out.insert(start);
        if (arena_.node(start).gcount <= 2) return;
        std::vector<Id> frontier{start};
        std::unordered_set<Id> queued{start};
        std::unordered_set<Id> in_explored;
        std::vector<Id> stuck_minima;
        auto sweep = [&](std::size_t from) {
            for (std::size_t qi = from; qi < frontier.size(); ++qi) {
                Id m = frontier[qi];
                if (in_explored.count(m)) continue;
                Id c;
                if (cached(m, c)) out.insert(c);  // known same-element value
                if (budget_ == 0) return;
                --budget_;
                Search sr;
                try {
                    sr = explore(m, /*with_migrations=*/false);
                    if (sr.branches.empty()) sr = explore(m, /*with_migrations=*/true);
                } catch (const CapExceededError&) {
                    continue;
                }
                in_explored.insert(sr.members.begin(), sr.members.end());
                out.insert(sr.members.begin(), sr.members.end());
                if (!sr.branches.empty()) {
                    // Block-reduce each branch before queueing: a contraction
                    // can merge or grow a two-generated block, whose comb
                    // form (with free cancellation) is the exact
                    // representative the rest of the search assumes.
                    std::vector<Id> next;
                    next.reserve(sr.branches.size());
                    for (Id z : sr.branches) next.push_back(reduce_blocks(z));
                    for (Id z : sorted(next))
                        if (queued.insert(z).second) frontier.push_back(z);
                    continue;
                }
                Id t = sr.members.front();
                for (Id x : sr.members)
                    if (arena_.compare(x, t) < 0) t = x;
                stuck_minima.push_back(t);
            }
        };
        sweep(0);
        std::size_t seeded = 0;
        std::size_t from = frontier.size();
        const std::uint32_t grow_cap = arena_.node(start).length + 4;
        while (seeded < stuck_minima.size() && budget_ > 0) {
            for (; seeded < stuck_minima.size(); ++seeded) {
                for (Id v : sorted(stack_variants(stuck_minima[seeded]))) {
                    Id z = reduce_blocks(v);
                    if (queued.insert(z).second) frontier.push_back(z);
                }
                for (Id v : sorted(expansion_rewrites(stuck_minima[seeded], grow_cap))) {
                    Id z = reduce_blocks(v);
                    if (queued.insert(z).second) frontier.push_back(z);
                }
            }
            sweep(from);
            from = frontier.size();
        }
    }

    // Replace any subterm by a recorded wider form of its element (see
    // WordArena::expansions), bounded in total length.  Sound -- every
    // recorded form was proven equal by a completed reduction search -- but
    // dependent on which equalities were proven earlier, so only the
    // equality search may use these, never the deterministic normal form.
    std::vector<Id> expansion_rewrites(Id w, std::uint32_t max_len) {
        std::vector<Id> out;
        std::unordered_set<Id> dedup;
        each_subterm(w, [&](const std::vector<bool>& path, Id sub) {
            auto it = arena_.expansions.find(sub);
            if (it == arena_.expansions.end()) return;
            const std::vector<Id> forms = it->second;
            for (Id f : forms) {
                Id full = normalize_brackets(replace_at(w, path, 0, f));
                if (arena_.node(full).length <= max_len && dedup.insert(full).second)
                    out.push_back(full);
            }
        });
        return out;
    }

    // Net exponent vector of the literal string (a class invariant).
    std::vector<std::pair<Id, int>> exponents(Id w) {
        std::vector<Id> seq;
        flatten(w, seq);
        std::vector<std::pair<Id, int>> acc;
        for (Id l : seq) {
            const auto n = arena_.node(l);
            int s = n.b ? -1 : +1;
            bool hit = false;
            for (auto& [idx, e] : acc)
                if (idx == n.a) {
                    e += s;
                    hit = true;
                }
            if (!hit) acc.emplace_back(n.a, s);
        }
        std::erase_if(acc, [](auto& p) { return p.second == 0; });
        std::sort(acc.begin(), acc.end());
        return acc;
    }

    // --- two-generated block machinery ------------------------------------

    // Right comb of a literal sequence: the structurally minimal bracketing
    // (a leaf sorts before any product, so the minimal word puts a lone
    // literal in every left slot).
    Id comb(const std::vector<Id>& leaves) {
        Id acc = arena_.empty();
        for (std::size_t i = leaves.size(); i-- > 0;) acc = arena_.product(leaves[i], acc);
        return acc;
    }

    // Free-group reduction of a literal sequence: cancel adjacent inverse
    // pairs until none remain (stack pass; the result is independent of
    // cancellation order).
    std::vector<Id> free_reduce(const std::vector<Id>& seq) {
        std::vector<Id> stack;
        for (Id l : seq) {
            if (!stack.empty() && arena_.invert(stack.back()) == l)
                stack.pop_back();
            else
                stack.push_back(l);
        }
        return stack;
    }

    // Pin every maximal two-generated subtree to its right-comb bracketing.
    // Preserves the literal sequence; the result is the quotient
    // representative of `w`'s bracketing configuration.
    Id normalize_brackets(Id w) {
        const auto n = arena_.node(w);
        if (n.kind != WordArena::kNode) return w;
        if (n.gcount <= 2) {
            std::vector<Id> seq;
            flatten(w, seq);
            return comb(seq);
        }
        return arena_.product(normalize_brackets(n.a), normalize_brackets(n.b));
    }

    // Additionally freely reduce each block's literal string.  Each
    // cancellation is a contraction of the whole word, so this is a
    // reduction step, not an equivalence move.  Children are processed
    // first; a pair of reduced children can merge into a fresh
    // two-generated block, so the test repeats after rebuilding.
    Id reduce_blocks(Id w) {
        const auto n = arena_.node(w);
        if (n.kind != WordArena::kNode) return w;
        if (n.gcount <= 2) {
            std::vector<Id> seq;
            flatten(w, seq);
            return comb(free_reduce(seq));
        }
        Id out = arena_.product(reduce_blocks(n.a), reduce_blocks(n.b));
        const auto m = arena_.node(out);
        if (m.kind == WordArena::kNode && m.gcount <= 2) {
            std::vector<Id> seq;
            flatten(out, seq);
            return comb(free_reduce(seq));
        }
        return out;
    }

    // Closure modulo block bracketing.  `w` must be bracket-normalized.
    // Moves are applied only where they can change the quotient
    // representative: at nodes whose factors span at least three
    // generators.  Every product is re-normalized, so rebracketings inside
    // blocks never multiply the member count.  With `with_migrations` the
    // closure additionally applies the pair-migration identities, which
    // relocate an adjacent inverse pair inside the literal string; the
    // literal multiset and the length are still preserved, so the search
    // stays finite.
    std::vector<Id> closure_q(Id w, bool with_migrations = false) {
        std::unordered_set<Id> seen{w};
        std::vector<Id> queue{w};
        std::vector<Id> alts;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            Id m = queue[qi];
            each_subterm(m, [&](const std::vector<bool>& path, Id sub) {
                const auto n = arena_.node(sub);
                if (n.kind != WordArena::kNode || n.gcount <= 2) return;
                alts.clear();
                subterm_rewrites_q(sub, alts);
                if (with_migrations) migration_rewrites(sub, alts);
                for (Id alt : alts) {
                    Id full = normalize_brackets(replace_at(m, path, 0, alt));
                    if (seen.insert(full).second) {
                        if (seen.size() > lim_.closure_cap)
                            throw CapExceededError(seen.size(), lim_.closure_cap);
                        queue.push_back(full);
                    }
                }
            });
        }
        return queue;
    }

    // Pair-migration identities.  An adjacent inverse pair u', u can be
    // stranded in the middle of a word with no way to bring it into a
    // contractible position; the same element then also has a
    // representation with the pair relocated.  Writing a = A*u',
    // c = y*(z*u'), the right Moufang law a*(b*(c*b)) = ((a*b)*c)*b with
    // b = u collapses (via the middle Moufang law and the inverse
    // property) to
    //
    //   migration      (A*u')*((u*y)*z)   <->  (A*(y*(z*u')))*u
    //   mirrored       (p*(q*u'))*(u*B)   <->  u'*(((u*p)*q)*B)
    //
    // where the mirrored form is the image under the inversion
    // anti-automorphism.  These preserve the literal multiset but not the
    // literal order, so they take part only in the normal-form search,
    // never in the public bracketing closure.
    void migration_rewrites(Id s, std::vector<Id>& out) {
        const auto n = arena_.node(s);
        const Id L = n.a, R = n.b;
        auto prod = [&](Id x, Id y) { return arena_.product(x, y); };

        for (auto [Xa, Xb] : vsplits(L)) {
            // (A*u')*((u*y)*z) -> (A*(y*(z*u')))*u
            for (auto [Ba, Bb] : vsplits(R)) {
                for (auto [Ua, Uy] : vsplits(Ba)) {
                    if (eq_mod(Ua, arena_.invert(Xb)))
                        out.push_back(prod(prod(Xa, prod(Uy, prod(Bb, Xb))), Ua));
                }
            }
            // (A*(y*(z*u')))*u -> (A*u')*((u*y)*z)
            for (auto [Ya, Yb] : vsplits(Xb)) {
                for (auto [Za, Zb] : vsplits(Yb)) {
                    if (eq_mod(Zb, arena_.invert(R)))
                        out.push_back(prod(prod(Xa, Zb), prod(prod(R, Ya), Za)));
                }
            }
            // (p*(q*u'))*(u*B) -> u'*(((u*p)*q)*B)
            for (auto [Qa, Qb] : vsplits(Xb)) {
                for (auto [Ba, Bb] : vsplits(R)) {
                    if (eq_mod(Qb, arena_.invert(Ba)))
                        out.push_back(prod(Qb, prod(prod(prod(Ba, Xa), Qa), Bb)));
                }
            }
        }
        // u'*(((u*p)*q)*B) -> (p*(q*u'))*(u*B)
        for (auto [Ba, Bb] : vsplits(R)) {
            for (auto [Ca, Cb] : vsplits(Ba)) {
                for (auto [Ua, Ub] : vsplits(Ca)) {
                    if (eq_mod(Ua, arena_.invert(L)))
                        out.push_back(prod(prod(Ub, prod(Cb, L)), prod(Ua, Bb)));
                }
            }
        }
    }

    // --- translation-stack moves ------------------------------------------
    //
    // A word in which some generator occurs exactly once, with all other
    // letters drawn from two generators, is a stack of left/right
    // translations by two-generated-subloop elements applied to that single
    // letter: for example (B*x)*C = R_C L_B x with B, C in the subloop S
    // spanned by the other two generators.  Rewriting the translation word
    // with relations of the multiplication group reaches same-element words
    // that the bracketing closure cannot: those relations genuinely change
    // argument lengths, i.e. they pass through longer words, while the
    // closure preserves the literal sequence and contractions only shorten
    // it.  The relations used, each an identity of Moufang loops with the
    // inverse property (arguments compose inside S, a free group by
    // di-associativity, so they reduce as strings):
    //
    //   L_a L_{a^-1} = 1,  R_a R_{a^-1} = 1      (inverse property)
    //   L_a L_b L_a = L_{aba}                    (left Bol)
    //   R_a R_b R_a = R_{aba}                    (right Bol)
    //   R_a L_b     = L_{a^-1} L_{ab} R_a        (middle Moufang + IP)
    //   R_{za} L_a  = L_a R_a R_z                (middle Moufang)
    //   L_a R_a     = R_a L_a                    (flexible law)
    //
    // The middle-Moufang exchange is the law (a*y)*(z*a) = a*((y*z)*a) read
    // as a map identity in z (then cancelled by a^-1 on the left), the
    // mirror form is the same law read in y.  On the Bol relations the
    // argument bracketings a(ba) and (ab)a coincide as strings.  Every
    // translation word materializes back into a tree (arguments as comb
    // blocks around the core letter); states no longer than the input are
    // returned as lateral alternatives for the reduction search.

    using Str = std::vector<Id>;  // reduced literal string of a block

    Str str_invert(const Str& s) {
        Str r;
        r.reserve(s.size());
        for (auto it = s.rbegin(); it != s.rend(); ++it) r.push_back(arena_.invert(*it));
        return r;
    }

    Str str_cat(std::initializer_list<const Str*> parts) {
        Str all;
        for (const Str* p : parts) all.insert(all.end(), p->begin(), p->end());
        return free_reduce(all);
    }

    // Does the capped generator set of `n` contain index g?  Only meaningful
    // when the set is exact (gcount <= 2).
    static bool genset_has(const WordArena::Node& n, std::uint32_t g) {
        return (n.gcount >= 1 && n.g0 == g) || (n.gcount == 2 && n.g1 == g);
    }

    // One entry of a translation word: left or right translation by a block
    // with the given literal string.  Entries are kept outermost first.
    struct StackOp {
        bool left;
        Str arg;
    };

    struct Stack {
        std::vector<StackOp> ops;
        Id core = 0;
        bool ok = false;
    };

    // Peel `w` into translations around its unique occurrence of generator
    // g.  Fails (ok = false) when a peeled-off factor is not a pure block of
    // at most two generators.
    Stack stack_decompose(Id w, std::uint32_t g) {
        Stack st;
        Id cur = w;
        for (;;) {
            const auto n = arena_.node(cur);
            if (n.kind == WordArena::kLeaf) {
                st.core = cur;
                st.ok = n.a == g;
                return st;
            }
            if (n.kind != WordArena::kNode) return st;
            const auto na = arena_.node(n.a);
            const auto nb = arena_.node(n.b);
            const bool a_has = na.gcount <= 2 ? genset_has(na, g) : false;
            const bool b_has = nb.gcount <= 2 ? genset_has(nb, g) : false;
            int side;  // 0: g lives in the left factor, 1: in the right
            if (a_has != b_has) {
                side = a_has ? 0 : 1;
            } else if (!a_has && na.gcount > 2 && nb.gcount <= 2) {
                side = 0;
            } else if (!a_has && nb.gcount > 2 && na.gcount <= 2) {
                side = 1;
            } else {
                return st;
            }
            Id blk = side == 0 ? n.b : n.a;
            const auto bn = arena_.node(blk);
            if (bn.gcount > 2 || genset_has(bn, g)) return st;
            Str s;
            flatten(blk, s);
            st.ops.push_back(StackOp{side == 1, free_reduce(s)});
            cur = side == 0 ? n.a : n.b;
        }
    }

    // Same-element variants of the reduced word `w` via translation-stack
    // rewriting, deduplicated and no longer than `w` itself.
    std::vector<Id> stack_variants(Id w) {
        std::vector<Id> out;
        const auto n = arena_.node(w);
        if (n.kind != WordArena::kNode || n.gcount <= 2) return out;
        Str seq;
        flatten(w, seq);
        // Occurrence counts per generator index.
        std::vector<std::pair<std::uint32_t, int>> counts;
        for (Id l : seq) {
            std::uint32_t idx = arena_.node(l).a;
            bool found = false;
            for (auto& [i, c] : counts)
                if (i == idx) {
                    ++c;
                    found = true;
                }
            if (!found) counts.emplace_back(idx, 1);
        }
        if (counts.size() > 3) return out;  // the others would span > 2 generators
        std::unordered_set<Id> dedup{w};
        for (auto [g, c] : counts) {
            if (c != 1) continue;
            Stack st = stack_decompose(w, g);
            if (!st.ok || st.ops.size() < 2) continue;
            stack_search(st, n.length, out, dedup);
        }
        return out;
    }

    void stack_search(const Stack& st0, std::uint32_t maxlen, std::vector<Id>& out,
                      std::unordered_set<Id>& dedup) {
        using State = std::vector<StackOp>;
        auto key = [](const State& s) {
            std::vector<Id> k;
            for (const auto& op : s) {
                k.push_back(op.left ? 1 : 2);
                k.insert(k.end(), op.arg.begin(), op.arg.end());
                k.push_back(0);
            }
            return k;
        };
        auto total = [](const State& s) {
            std::size_t t = 0;
            for (const auto& op : s) t += op.arg.size();
            return t;
        };
        // Drop identity entries and cancel adjacent same-side inverse pairs
        // (the inverse-property relations), to a fixed point.
        auto simplify = [&](State& s) {
            for (bool again = true; again;) {
                again = false;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    if (s[i].arg.empty()) {
                        s.erase(s.begin() + i);
                        again = true;
                        break;
                    }
                    if (i + 1 < s.size() && s[i].left == s[i + 1].left &&
                        s[i + 1].arg == str_invert(s[i].arg)) {
                        s.erase(s.begin() + i, s.begin() + i + 2);
                        again = true;
                        break;
                    }
                }
            }
        };
        // Intermediate states may exceed the input length: the useful chains
        // pass through longer translation words before cancelling.  A small
        // slack keeps the space finite.
        const std::size_t transit = maxlen - 1 + 4;
        const std::size_t state_cap = 4000;
        std::set<std::vector<Id>> seen;
        std::vector<State> queue{st0.ops};
        seen.insert(key(st0.ops));
        auto push = [&](State s) {
            simplify(s);
            if (total(s) > transit) return;
            if (seen.size() >= state_cap) return;
            if (seen.insert(key(s)).second) queue.push_back(std::move(s));
        };
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const State s = queue[qi];  // copy: queue may reallocate
            if (total(s) + 1 <= maxlen) {
                Id t = st0.core;
                for (auto it = s.rbegin(); it != s.rend(); ++it) {
                    Id blk = comb(it->arg);
                    t = it->left ? arena_.product(blk, t) : arena_.product(t, blk);
                }
                t = normalize_brackets(t);
                if (dedup.insert(t).second) out.push_back(t);
            }
            for (std::size_t i = 0; i < s.size(); ++i) {
                const StackOp& a = s[i];
                // Bol split: T_w -> T_a T_b T_a with w = a*b*a, over prefix
                // and single-letter candidates for a.
                auto split = [&](const Str& head) {
                    Str hin = str_invert(head);
                    Str mid = str_cat({&hin, &a.arg, &hin});
                    State t = s;
                    t[i] = StackOp{a.left, mid};
                    t.insert(t.begin() + i, StackOp{a.left, head});
                    t.insert(t.begin() + i + 2, StackOp{a.left, head});
                    push(std::move(t));
                };
                for (std::size_t j = 1; j <= a.arg.size(); ++j)
                    split(Str(a.arg.begin(), a.arg.begin() + j));
                for (Id l : a.arg) {
                    split(Str{arena_.invert(l)});
                }
                if (i + 1 < s.size()) {
                    const StackOp& b = s[i + 1];
                    if (a.left == b.left && a.arg == b.arg) {
                        // Bol with the middle factor empty: T_a T_a = T_{a^2}.
                        State t = s;
                        t[i] = StackOp{a.left, str_cat({&a.arg, &a.arg})};
                        t.erase(t.begin() + i + 1);
                        push(std::move(t));
                    }
                    if (!a.left && b.left) {
                        // R_a L_b -> L_{a^-1} L_{ab} R_a
                        Str ainv = str_invert(a.arg);
                        State t = s;
                        t[i] = StackOp{true, ainv};
                        t[i + 1] = StackOp{true, str_cat({&a.arg, &b.arg})};
                        t.insert(t.begin() + i + 2, StackOp{false, a.arg});
                        push(std::move(t));
                        // R_{za} L_a -> L_a R_a R_z  with z = (arg)*a^-1
                        Str binv = str_invert(b.arg);
                        State u = s;
                        u[i] = StackOp{true, b.arg};
                        u[i + 1] = StackOp{false, b.arg};
                        u.insert(u.begin() + i + 2, StackOp{false, str_cat({&a.arg, &binv})});
                        push(std::move(u));
                    }
                    if (a.left != b.left && a.arg == b.arg) {
                        // Flexible law: L_a R_a = R_a L_a.
                        State t = s;
                        std::swap(t[i], t[i + 1]);
                        push(std::move(t));
                    }
                }
                if (i + 2 < s.size()) {
                    const StackOp& b = s[i + 1];
                    const StackOp& c = s[i + 2];
                    if (a.left == b.left && b.left == c.left && a.arg == c.arg) {
                        // Bol merge: T_a T_b T_a = T_{aba}.
                        State t = s;
                        t[i] = StackOp{a.left, str_cat({&a.arg, &b.arg, &a.arg})};
                        t.erase(t.begin() + i + 1, t.begin() + i + 3);
                        push(std::move(t));
                    }
                    if (a.left && b.left && !c.left && a.arg == str_invert(c.arg)) {
                        // L_{a^-1} L_{ab} R_a -> R_a L_b  with b = a^-1*(arg)
                        State t = s;
                        t[i] = StackOp{false, c.arg};
                        t[i + 1] = StackOp{true, str_cat({&a.arg, &b.arg})};
                        t.erase(t.begin() + i + 2);
                        push(std::move(t));
                    }
                    if (a.left && !b.left && !c.left && a.arg == b.arg) {
                        // L_a R_a R_z -> R_{za} L_a
                        State t = s;
                        t[i] = StackOp{false, str_cat({&c.arg, &a.arg})};
                        t[i + 1] = StackOp{true, a.arg};
                        t.erase(t.begin() + i + 2);
                        push(std::move(t));
                    }
                }
            }
        }
    }

    // The splits of `w` visible to pattern matching in the quotient.  A
    // mixed (three-generator) node contributes its one real split; its
    // distinct bracketings are separate closure members.  A two-generated
    // block contributes every split of its literal string with both parts
    // combed, since all its bracketings collapse to one representative.
    std::vector<std::pair<Id, Id>> vsplits(Id w) {
        std::vector<std::pair<Id, Id>> out;
        const auto n = arena_.node(w);
        if (n.kind != WordArena::kNode) return out;
        if (n.gcount <= 2) {
            std::vector<Id> seq;
            flatten(w, seq);
            for (std::size_t i = 1; i < seq.size(); ++i)
                out.emplace_back(comb(std::vector<Id>(seq.begin(), seq.begin() + i)),
                                 comb(std::vector<Id>(seq.begin() + i, seq.end())));
        } else {
            out.emplace_back(n.a, n.b);
        }
        return out;
    }

    // Equality modulo block bracketing: identical words, or two-generated
    // words with the same literal string (within two generators the string
    // determines the equivalence class).  Mixed words are compared
    // syntactically; their bracketing variants are separate closure
    // members, so the enumeration restores completeness for them.
    bool eq_mod(Id a, Id b) {
        if (a == b) return true;
        const auto& na = arena_.node(a);
        const auto& nb = arena_.node(b);
        if (na.gcount > 2 || nb.gcount > 2) return false;
        return same_literal_sequence(a, b);
    }

    // The move set of subterm_rewrites, instantiated over virtual splits
    // and with repeated-variable checks modulo block bracketing.  Only
    // used by the quotient closure; the public closure keeps the exact
    // syntactic version.
    void subterm_rewrites_q(Id s, std::vector<Id>& out) {
        const auto n = arena_.node(s);
        const Id L = n.a, R = n.b;
        auto prod = [&](Id x, Id y) { return arena_.product(x, y); };
        const Id Rinv = arena_.invert(R);
        const Id Linv = arena_.invert(L);

        for (auto [Xa, Xb] : vsplits(L)) {
            // (p*q)*t -> p*(q*t) in a two-generated configuration
            if (two_gen_assoc(Xa, Xb, R)) out.push_back(prod(Xa, prod(Xb, R)));
            for (auto [Ya, Yb] : vsplits(Xa)) {
                // ((r*s)*r)*t -> r*(s*(r*t))
                if (eq_mod(Ya, Xb)) out.push_back(prod(Ya, prod(Yb, prod(Ya, R))));
                // ((x*y)*z)*y -> x*(y*(z*y))
                if (eq_mod(Yb, R)) out.push_back(prod(Ya, prod(Yb, prod(Xb, Yb))));
                // ((p*q)*r)*u' -> p*(q*(r*u'))   with p = invert(u')
                if (eq_mod(Ya, Rinv)) out.push_back(prod(Ya, prod(Yb, prod(Xb, R))));
            }
            for (auto [Ba, Bb] : vsplits(R)) {
                // (x*y)*(z*x) -> x*((y*z)*x)
                if (eq_mod(Xa, Bb)) out.push_back(prod(Xa, prod(prod(Xb, Ba), Xa)));
                // (u'*w)*(u*z) -> u'*((w*u)*z)   with u' = invert(u)
                if (eq_mod(Xa, arena_.invert(Ba)))
                    out.push_back(prod(Xa, prod(prod(Xb, Ba), Bb)));
                // (p*u')*(q*u) -> (p*(u'*q))*u   with u' = invert(u)
                if (eq_mod(Xb, arena_.invert(Bb)))
                    out.push_back(prod(prod(Xa, prod(Xb, Ba)), Bb));
            }
            // (u*v)*(u*v) -> u*(v*(u*v))
            if (eq_mod(L, R)) out.push_back(prod(Xa, prod(Xb, L)));
            // (p*(u'*q))*u -> (p*u')*(q*u)   with u' = invert(u)
            for (auto [Pa, Pb] : vsplits(Xb)) {
                if (eq_mod(Pa, Rinv)) out.push_back(prod(prod(Xa, Pa), prod(Pb, R)));
            }
        }
        for (auto [Ba, Bb] : vsplits(R)) {
            // p*(q*t) -> (p*q)*t in a two-generated configuration
            if (two_gen_assoc(L, Ba, Bb)) out.push_back(prod(prod(L, Ba), Bb));
            for (auto [Ca, Cb] : vsplits(Bb)) {
                // r*(s*(r*t)) -> ((r*s)*r)*t
                if (eq_mod(Ca, L)) out.push_back(prod(prod(prod(L, Ba), L), Cb));
                // x*(y*(z*y)) -> ((x*y)*z)*y
                if (eq_mod(Cb, Ba)) out.push_back(prod(prod(prod(L, Ba), Ca), Ba));
                // u*(v*(u*v)) -> (u*v)*(u*v)
                if (eq_mod(Ca, L) && eq_mod(Cb, Ba)) {
                    Id uv = prod(L, Ba);
                    out.push_back(prod(uv, uv));
                }
                // p*(q*(r*u')) -> ((p*q)*r)*u'   with p = invert(u')
                if (eq_mod(Cb, Linv)) out.push_back(prod(prod(prod(L, Ba), Ca), Cb));
            }
            for (auto [Ya, Yb] : vsplits(Ba)) {
                // x*((y*z)*x) -> (x*y)*(z*x)
                if (eq_mod(Bb, L)) out.push_back(prod(prod(L, Ya), prod(Yb, L)));
                // u'*((w*u)*z) -> (u'*w)*(u*z)   with u' = invert(u)
                if (eq_mod(Yb, Linv)) out.push_back(prod(prod(L, Ya), prod(Yb, Bb)));
            }
        }
    }

    // Contraction results of `w` (whole words, deduplicated), for the
    // quotiented normal-form search.  On top of the three redex shapes,
    // recovers cancellations that full closure would expose by
    // rebracketing a two-generated block: a factor whose inverse's literal
    // string is a prefix (resp. suffix) of an adjacent block's string
    // cancels into that block, because some bracketing of the block splits
    // exactly there and within two generators equal strings are equivalent
    // subwords.
    std::vector<Id> redexes_q(Id w) {
        std::vector<Id> out;
        std::unordered_set<Id> dedup;
        each_subterm(w, [&](const std::vector<bool>& path, Id sub) {
            const auto n = arena_.node(sub);
            if (n.kind != WordArena::kNode) return;
            const Id a = n.a, b = n.b;
            const auto na = arena_.node(a), nb = arena_.node(b);
            auto emit = [&](Id replacement) {
                Id full = replace_at(w, path, 0, replacement);
                if (dedup.insert(full).second) out.push_back(full);
            };
            if (nb.kind == WordArena::kNode && equivalent(arena_.invert(a), nb.a)) emit(nb.b);
            if (na.kind == WordArena::kNode && equivalent(arena_.invert(b), na.b)) emit(na.a);
            if (equivalent(arena_.invert(a), b)) emit(arena_.empty());
            // a^-1's string is a proper prefix of the block b's string.
            if (nb.kind == WordArena::kNode && nb.gcount <= 2 && na.length < nb.length) {
                std::vector<Id> sa, sb;
                flatten(arena_.invert(a), sa);
                flatten(b, sb);
                if (std::equal(sa.begin(), sa.end(), sb.begin()))
                    emit(comb(std::vector<Id>(sb.begin() + sa.size(), sb.end())));
            }
            // b^-1's string is a proper suffix of the block a's string.
            if (na.kind == WordArena::kNode && na.gcount <= 2 && nb.length < na.length) {
                std::vector<Id> sa, sbi;
                flatten(a, sa);
                flatten(arena_.invert(b), sbi);
                if (std::equal(sbi.begin(), sbi.end(), sa.end() - sbi.size()))
                    emit(comb(std::vector<Id>(sa.begin(), sa.end() - sbi.size())));
            }
        });
        return out;
    }

    bool same_literal_sequence(Id a, Id b) {
        if (arena_.node(a).length != arena_.node(b).length) return false;
        thread_local std::vector<Id> sa, sb;
        sa.clear();
        sb.clear();
        flatten(a, sa);
        flatten(b, sb);
        return sa == sb;
    }

    void flatten(Id w, std::vector<Id>& out) {
        const auto& n = arena_.node(w);
        if (n.kind == WordArena::kLeaf) {
            out.push_back(w);
        } else if (n.kind == WordArena::kNode) {
            flatten(n.a, out);
            flatten(n.b, out);
        }
    }

    template <typename F>
    void each_subterm(Id w, F&& fn) {
        std::vector<bool> path;
        walk(w, path, fn);
    }

    template <typename F>
    void walk(Id w, std::vector<bool>& path, F&& fn) {
        fn(path, w);
        // Copy: fn may intern nodes and invalidate references.
        const auto n = arena_.node(w);
        if (n.kind != WordArena::kNode) return;
        path.push_back(false);
        walk(n.a, path, fn);
        path.back() = true;
        walk(n.b, path, fn);
        path.pop_back();
    }

    Id replace_at(Id w, const std::vector<bool>& path, std::size_t depth, Id sub) {
        if (depth == path.size()) return sub;
        const auto n = arena_.node(w);
        if (path[depth])
            return arena_.product(n.a, replace_at(n.b, path, depth + 1, sub));
        return arena_.product(replace_at(n.a, path, depth + 1, sub), n.b);
    }

    // True iff re-associating (p*q)*t <-> p*(q*t) is justified by
    // di-associativity, i.e. all three factors provably lie in a
    // two-generated (hence associative) subloop.  Two sufficient
    // conditions: the leaves of p, q, t together use at most two distinct
    // generators, or two of the factors coincide up to inversion.
    bool two_gen_assoc(Id p, Id q, Id t) {
        WordArena::Node merged{};
        for (Id w : {p, q, t}) WordArena::genset_merge(merged, arena_.node(w));
        if (merged.gcount <= 2) return true;
        if (q == p || t == q || t == p) return true;
        if (q == arena_.invert(p)) return true;
        if (t == arena_.invert(q)) return true;
        if (t == arena_.invert(p)) return true;
        return false;
    }

    // All single-move rewrites of the product subterm `s` (both directions).
    // Node data is copied by value throughout: interning the rewritten
    // products can reallocate the node table.
    void subterm_rewrites(Id s, std::vector<Id>& out) {
        const auto n = arena_.node(s);
        const Id L = n.a, R = n.b;
        auto prod = [&](Id x, Id y) { return arena_.product(x, y); };
        const bool Lnode = arena_.node(L).kind == WordArena::kNode;
        const bool Rnode = arena_.node(R).kind == WordArena::kNode;

        if (Lnode) {
            const auto X = arena_.node(L);  // s = (X.a * X.b) * R
            // (p*q)*t -> p*(q*t) in a two-generated configuration
            if (two_gen_assoc(X.a, X.b, R)) out.push_back(prod(X.a, prod(X.b, R)));
            if (arena_.node(X.a).kind == WordArena::kNode) {
                const auto Y = arena_.node(X.a);
                // ((r*s)*r)*t -> r*(s*(r*t))
                if (Y.a == X.b) out.push_back(prod(Y.a, prod(Y.b, prod(Y.a, R))));
                // ((x*y)*z)*y -> x*(y*(z*y))
                if (Y.b == R) out.push_back(prod(Y.a, prod(Y.b, prod(X.b, Y.b))));
                // ((p*q)*r)*u' -> p*(q*(r*u'))   with p = invert(u')
                if (Y.a == arena_.invert(R))
                    out.push_back(prod(Y.a, prod(Y.b, prod(X.b, R))));
            }
            if (Rnode) {
                const auto B = arena_.node(R);
                // (x*y)*(z*x) -> x*((y*z)*x)
                if (X.a == B.b) out.push_back(prod(X.a, prod(prod(X.b, B.a), X.a)));
                // (u*v)*(u*v) -> u*(v*(u*v))
                if (L == R) out.push_back(prod(X.a, prod(X.b, L)));
                // (u'*w)*(u*z) -> u'*((w*u)*z)   with u' = invert(u)
                if (X.a == arena_.invert(B.a))
                    out.push_back(prod(X.a, prod(prod(X.b, B.a), B.b)));
                // (p*u')*(q*u) -> (p*(u'*q))*u   with u' = invert(u)
                if (X.b == arena_.invert(B.b))
                    out.push_back(prod(prod(X.a, prod(X.b, B.a)), B.b));
            }
            // (p*(u'*q))*u -> (p*u')*(q*u)   with u' = invert(u)
            if (arena_.node(X.b).kind == WordArena::kNode) {
                const auto P = arena_.node(X.b);
                if (P.a == arena_.invert(R))
                    out.push_back(prod(prod(X.a, P.a), prod(P.b, R)));
            }
        }
        if (Rnode) {
            const auto B = arena_.node(R);  // s = L * (B.a * B.b)
            // p*(q*t) -> (p*q)*t in a two-generated configuration
            if (two_gen_assoc(L, B.a, B.b)) out.push_back(prod(prod(L, B.a), B.b));
            if (arena_.node(B.b).kind == WordArena::kNode) {
                const auto C = arena_.node(B.b);
                // r*(s*(r*t)) -> ((r*s)*r)*t
                if (C.a == L) out.push_back(prod(prod(prod(L, B.a), L), C.b));
                // x*(y*(z*y)) -> ((x*y)*z)*y
                if (C.b == B.a) out.push_back(prod(prod(prod(L, B.a), C.a), B.a));
                // u*(v*(u*v)) -> (u*v)*(u*v)
                if (C.a == L && C.b == B.a) out.push_back(prod(B.b, B.b));
                // p*(q*(r*u')) -> ((p*q)*r)*u'   with p = invert(u')
                if (C.b == arena_.invert(L))
                    out.push_back(prod(prod(prod(L, B.a), C.a), C.b));
            }
            if (arena_.node(B.a).kind == WordArena::kNode) {
                const auto Y = arena_.node(B.a);
                // x*((y*z)*x) -> (x*y)*(z*x)
                if (B.b == L) out.push_back(prod(prod(L, Y.a), prod(Y.b, L)));
                // u'*((w*u)*z) -> (u'*w)*(u*z)   with u' = invert(u)
                if (Y.b == arena_.invert(L))
                    out.push_back(prod(prod(L, Y.a), prod(Y.b, B.b)));
            }
        }
    }

    WordArena& arena_;
    std::scoped_lock<std::mutex> lock_;
    RewriteLimits lim_;
    std::size_t budget_ = 0;
    bool checked_ = false;   // all-paths monitor active
    bool diverged_ = false;  // two reduction orders reached distinct terminals
    Id div_a_ = 0, div_b_ = 0;  // witnesses for the divergence report
};

}  // namespace detail

// The Moufang-equivalence closure of `w` as a full class.
inline EquivalenceClass moufang_closure(Word w, const RewriteLimits& lim = {}) {
    detail::Rewriter rw(lim);
    EquivalenceClass out;
    for (auto id : rw.sorted(rw.closure(detail::ArenaOps::id(w))))
        out.members.push_back(detail::ArenaOps::wrap(id));
    out.canonical = out.members.front();
    return out;
}

// True iff `a` and `b` are related by bracketing moves alone.
inline bool moufang_equivalent(Word a, Word b, const RewriteLimits& lim = {}) {
    detail::Rewriter rw(lim);
    return rw.equivalent(detail::ArenaOps::id(a), detail::ArenaOps::id(b));
}

// Every cancellation opportunity in `w`, in deterministic order.
inline std::vector<MuRedex> find_mu_redexes(Word w, const RewriteLimits& lim = {}) {
    detail::Rewriter rw(lim);
    std::vector<MuRedex> out;
    for (auto& [pos, res] : rw.redexes(detail::ArenaOps::id(w)))
        out.push_back(MuRedex{pos, detail::ArenaOps::wrap(res)});
    return out;
}

// Canonical (minimal reduced) word of `w`'s congruence class.
inline Word canonical_word(Word w, const RewriteLimits& lim = {}) {
    detail::Rewriter rw(lim);
    return detail::ArenaOps::wrap(rw.canonical(detail::ArenaOps::id(w)));
}

// True iff `a` and `b` are words of one element.  Canonical forms decide
// almost every case; when they differ despite equal net exponents, the
// reduction searches of both sides are expanded and the words are equal iff
// the searches meet (robust against asymmetrically truncated bridging).
inline bool same_element(Word a, Word b, const RewriteLimits& lim = {}) {
    detail::Rewriter rw(lim);
    return rw.equal_elements(detail::ArenaOps::id(a), detail::ArenaOps::id(b));
}

// Homomorphic image signature of a word (its coordinates under the fixed
// octonion probe assignments).  Words of one element always share a
// signature; differing signatures prove two words denote distinct
// elements.  Useful as an exact pre-partition before pairwise equality.
inline detail::ProbeSignature word_signature(Word w) {
    auto& arena = detail::WordArena::instance();
    std::scoped_lock lock(arena.mutex());
    return detail::probe_signature(arena, detail::ArenaOps::id(w));
}

// The reduced equivalence class of `w`: reduces under the all-paths
// confluence monitor (ConfluenceError reports any order-dependence, and a
// truncated search refuses outright), then returns the full Moufang closure
// of the canonical reduced word.
inline EquivalenceClass normal_form(Word w, const RewriteLimits& lim = {}) {
    detail::Rewriter rw(lim);
    auto c = rw.canonical_checked(detail::ArenaOps::id(w));
    EquivalenceClass out;
    for (auto id : rw.sorted(rw.closure(c))) out.members.push_back(detail::ArenaOps::wrap(id));
    out.canonical = detail::ArenaOps::wrap(c);
    return out;
}

}  // namespace mfl
