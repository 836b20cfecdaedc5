#pragma once

// Brute-force reference model for the word calculus, written independently of
// the engine: plain shared-pointer trees, no interning, no caches, and a
// global-partition view of equivalence (enumerate every bracketing of the
// literal string, draw move edges, take connected components).  Deliberately
// slow and simple; used to cross-check the engine on small words.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Tree;
using TreeP = std::shared_ptr<const Tree>;  // nullptr denotes the empty word e

struct Tree {
    bool leaf = false;
    int index = 0;
    int sign = +1;
    TreeP l, r;
};

inline TreeP mk_leaf(int index, int sign) {
    auto t = std::make_shared<Tree>();
    t->leaf = true;
    t->index = index;
    t->sign = sign;
    return t;
}

inline TreeP mk_node(TreeP l, TreeP r) {
    if (!l) return r;
    if (!r) return l;
    auto t = std::make_shared<Tree>();
    t->leaf = false;
    t->l = std::move(l);
    t->r = std::move(r);
    return t;
}

inline std::string str(const TreeP& t) {
    if (!t) return "e";
    if (t->leaf) {
        std::string s = "x" + std::to_string(t->index);
        if (t->sign < 0) s += "^-1";
        return s;
    }
    return "(" + str(t->l) + "*" + str(t->r) + ")";
}

inline bool tree_eq(const TreeP& a, const TreeP& b) {
    if (!a || !b) return !a && !b;
    if (a->leaf != b->leaf) return false;
    if (a->leaf) return a->index == b->index && a->sign == b->sign;
    return tree_eq(a->l, b->l) && tree_eq(a->r, b->r);
}

// Independent total order: e < leaf < node; leaves by (index, sign) with +1
// first; nodes lexicographic.
inline int cmp(const TreeP& a, const TreeP& b) {
    auto rank = [](const TreeP& t) { return !t ? 0 : (t->leaf ? 1 : 2); };
    if (rank(a) != rank(b)) return rank(a) < rank(b) ? -1 : 1;
    if (!a) return 0;
    if (a->leaf) {
        if (a->index != b->index) return a->index < b->index ? -1 : 1;
        if (a->sign != b->sign) return a->sign > b->sign ? -1 : 1;  // +1 first
        return 0;
    }
    if (int c = cmp(a->l, b->l)) return c;
    return cmp(a->r, b->r);
}

inline bool tree_less(const TreeP& a, const TreeP& b) { return cmp(a, b) < 0; }

inline int len(const TreeP& t) {
    if (!t) return 0;
    if (t->leaf) return 1;
    return len(t->l) + len(t->r);
}

// Order on reduced candidates: shorter first, then the structural order.
inline bool reduced_less(const TreeP& a, const TreeP& b) {
    int la = len(a), lb = len(b);
    if (la != lb) return la < lb;
    return cmp(a, b) < 0;
}

using Lit = std::pair<int, int>;  // (index, sign)
using Lits = std::vector<Lit>;

inline void collect_lits(const TreeP& t, Lits& out) {
    if (!t) return;
    if (t->leaf) {
        out.emplace_back(t->index, t->sign);
        return;
    }
    collect_lits(t->l, out);
    collect_lits(t->r, out);
}

inline Lits lits(const TreeP& t) {
    Lits out;
    collect_lits(t, out);
    return out;
}

inline TreeP invert(const TreeP& t) {
    if (!t) return nullptr;
    if (t->leaf) return mk_leaf(t->index, -t->sign);
    return mk_node(invert(t->r), invert(t->l));
}

// All bracketings of the literal substring s[lo, hi).
inline std::vector<TreeP> all_trees(const Lits& s, int lo, int hi) {
    std::vector<TreeP> out;
    if (hi - lo == 0) {
        out.push_back(nullptr);
        return out;
    }
    if (hi - lo == 1) {
        out.push_back(mk_leaf(s[lo].first, s[lo].second));
        return out;
    }
    for (int mid = lo + 1; mid < hi; ++mid)
        for (const TreeP& a : all_trees(s, lo, mid))
            for (const TreeP& b : all_trees(s, mid, hi))
                out.push_back(mk_node(a, b));
    return out;
}

// One-step bracketing moves applicable at the root of t.  The patterns are
// the identities listed in the engine's rewrite layer; matching here is by
// recursive structural equality on plain trees.
inline void collect_indices(const TreeP& t, std::set<int>& s) {
    if (!t) return;
    if (t->leaf) {
        s.insert(t->index);
        return;
    }
    collect_indices(t->l, s);
    collect_indices(t->r, s);
}

// True iff p, q, t provably lie in one two-generated (hence associative)
// subloop, so (p*q)*t = p*(q*t) is a valid identity: either their leaves
// use at most two distinct generators, or two of the three factors are
// equal up to inversion.
inline bool two_gen_assoc(const TreeP& p, const TreeP& q, const TreeP& t) {
    std::set<int> s;
    collect_indices(p, s);
    collect_indices(q, s);
    collect_indices(t, s);
    if (s.size() <= 2) return true;
    auto same_or_inverse = [](const TreeP& a, const TreeP& b) {
        return tree_eq(a, b) || tree_eq(a, invert(b));
    };
    return same_or_inverse(q, p) || same_or_inverse(t, q) || same_or_inverse(t, p);
}

inline std::vector<TreeP> root_moves(const TreeP& t) {
    std::vector<TreeP> out;
    if (!t || t->leaf) return out;
    const TreeP& L = t->l;
    const TreeP& R = t->r;
    bool Ln = L && !L->leaf;
    bool Rn = R && !R->leaf;
    if (Ln) {
        // (p*q)*t -> p*(q*t) in a two-generated configuration
        if (two_gen_assoc(L->l, L->r, R)) out.push_back(mk_node(L->l, mk_node(L->r, R)));
        if (L->l && !L->l->leaf) {
            const TreeP& r0 = L->l->l;
            const TreeP& s0 = L->l->r;
            // ((r*s)*r)*t -> r*(s*(r*t))
            if (tree_eq(r0, L->r)) out.push_back(mk_node(r0, mk_node(s0, mk_node(r0, R))));
            // ((x*y)*z)*y -> x*(y*(z*y))
            if (tree_eq(s0, R)) out.push_back(mk_node(r0, mk_node(s0, mk_node(L->r, s0))));
            // ((p*q)*r)*u' -> p*(q*(r*u'))   with p = invert(u')
            if (tree_eq(r0, invert(R)))
                out.push_back(mk_node(r0, mk_node(s0, mk_node(L->r, R))));
        }
        if (Rn) {
            // (x*y)*(z*x) -> x*((y*z)*x)
            if (tree_eq(L->l, R->r))
                out.push_back(mk_node(L->l, mk_node(mk_node(L->r, R->l), L->l)));
            // (u*v)*(u*v) -> u*(v*(u*v))
            if (tree_eq(L, R)) out.push_back(mk_node(L->l, mk_node(L->r, L)));
            // (u'*w)*(u*z) -> u'*((w*u)*z)   with u' = invert(u)
            if (tree_eq(L->l, invert(R->l)))
                out.push_back(mk_node(L->l, mk_node(mk_node(L->r, R->l), R->r)));
            // (p*u')*(q*u) -> (p*(u'*q))*u   with u' = invert(u)
            if (tree_eq(L->r, invert(R->r)))
                out.push_back(mk_node(mk_node(L->l, mk_node(L->r, R->l)), R->r));
        }
        // (p*(u'*q))*u -> (p*u')*(q*u)   with u' = invert(u)
        if (L->r && !L->r->leaf && tree_eq(L->r->l, invert(R)))
            out.push_back(mk_node(mk_node(L->l, L->r->l), mk_node(L->r->r, R)));
    }
    if (Rn) {
        // p*(q*t) -> (p*q)*t in a two-generated configuration
        if (two_gen_assoc(L, R->l, R->r)) out.push_back(mk_node(mk_node(L, R->l), R->r));
        // u'*((w*u)*z) -> (u'*w)*(u*z)   with u' = invert(u)
        if (R->l && !R->l->leaf && tree_eq(R->l->r, invert(L)))
            out.push_back(mk_node(mk_node(L, R->l->l), mk_node(R->l->r, R->r)));
        if (R->r && !R->r->leaf) {
            const TreeP& z0 = R->r->l;
            const TreeP& t0 = R->r->r;
            // r*(s*(r*t)) -> ((r*s)*r)*t
            if (tree_eq(z0, L)) out.push_back(mk_node(mk_node(mk_node(L, R->l), L), t0));
            // x*(y*(z*y)) -> ((x*y)*z)*y
            if (tree_eq(t0, R->l)) out.push_back(mk_node(mk_node(mk_node(L, R->l), z0), R->l));
            // u*(v*(u*v)) -> (u*v)*(u*v)
            if (tree_eq(z0, L) && tree_eq(t0, R->l)) {
                TreeP uv = mk_node(L, R->l);
                out.push_back(mk_node(uv, uv));
            }
            // p*(q*(r*u')) -> ((p*q)*r)*u'   with p = invert(u')
            if (tree_eq(t0, invert(L)))
                out.push_back(mk_node(mk_node(mk_node(L, R->l), z0), t0));
        }
        // x*((y*z)*x) -> (x*y)*(z*x)
        if (R->l && !R->l->leaf && tree_eq(R->r, L))
            out.push_back(mk_node(mk_node(L, R->l->l), mk_node(R->l->r, L)));
    }
    return out;
}

// All one-step moves anywhere in t.
inline std::vector<TreeP> moves(const TreeP& t) {
    std::vector<TreeP> out = root_moves(t);
    if (t && !t->leaf) {
        for (const TreeP& c : moves(t->l)) out.push_back(mk_node(c, t->r));
        for (const TreeP& c : moves(t->r)) out.push_back(mk_node(t->l, c));
    }
    return out;
}

// Connected component of t in the move graph, keyed by serialization.
inline std::map<std::string, TreeP> component(const TreeP& t) {
    std::map<std::string, TreeP> seen;
    std::vector<TreeP> queue{t};
    seen.emplace(str(t), t);
    while (!queue.empty()) {
        TreeP cur = queue.back();
        queue.pop_back();
        for (const TreeP& m : moves(cur)) {
            auto [it, fresh] = seen.emplace(str(m), m);
            if (fresh) queue.push_back(m);
        }
    }
    return seen;
}

inline std::set<std::string> component_keys(const TreeP& t) {
    std::set<std::string> out;
    for (auto& [k, v] : component(t)) out.insert(k);
    return out;
}

inline bool equivalent(const TreeP& a, const TreeP& b) {
    if (lits(a) != lits(b)) return false;
    return component_keys(a).count(str(b)) > 0;
}

// All single cancellations anywhere in t (whole-word results).
inline std::vector<TreeP> contractions(const TreeP& t) {
    std::vector<TreeP> out;
    if (!t || t->leaf) return out;
    const TreeP& A = t->l;
    const TreeP& B = t->r;
    // A = u^-1, B = v*w: -> w  when u ~ v
    if (B && !B->leaf && equivalent(invert(A), B->l)) out.push_back(B->r);
    // A = w*v, B = u^-1: -> w
    if (A && !A->leaf && equivalent(invert(B), A->r)) out.push_back(A->l);
    // whole product cancels to e
    if (equivalent(invert(A), B)) out.push_back(nullptr);
    for (const TreeP& c : contractions(A)) out.push_back(mk_node(c, B));
    for (const TreeP& c : contractions(B)) out.push_back(mk_node(A, c));
    return out;
}

// Pair-migration identities at the root of t: an adjacent inverse pair
// relocates within the literal string.  Derived from the right Moufang
// law with the middle Moufang law and the inverse property; used by the
// reduction search only, matching the engine's split of responsibilities.
inline std::vector<TreeP> migration_moves(const TreeP& t) {
    std::vector<TreeP> out;
    if (!t || t->leaf) return out;
    const TreeP& L = t->l;
    const TreeP& R = t->r;
    bool Ln = L && !L->leaf;
    bool Rn = R && !R->leaf;
    // (A*u')*((u*y)*z) -> (A*(y*(z*u')))*u
    if (Ln && Rn && R->l && !R->l->leaf && tree_eq(R->l->l, invert(L->r)))
        out.push_back(mk_node(mk_node(L->l, mk_node(R->l->r, mk_node(R->r, L->r))), R->l->l));
    // (A*(y*(z*u')))*u -> (A*u')*((u*y)*z)
    if (Ln && L->r && !L->r->leaf && L->r->r && !L->r->r->leaf &&
        tree_eq(L->r->r->r, invert(R)))
        out.push_back(mk_node(mk_node(L->l, L->r->r->r),
                              mk_node(mk_node(R, L->r->l), L->r->r->l)));
    // (p*(q*u'))*(u*B) -> u'*(((u*p)*q)*B)
    if (Ln && Rn && L->r && !L->r->leaf && tree_eq(L->r->r, invert(R->l)))
        out.push_back(mk_node(L->r->r, mk_node(mk_node(mk_node(R->l, L->l), L->r->l), R->r)));
    // u'*(((u*p)*q)*B) -> (p*(q*u'))*(u*B)
    if (Rn && R->l && !R->l->leaf && R->l->l && !R->l->l->leaf &&
        tree_eq(R->l->l->l, invert(L)))
        out.push_back(mk_node(mk_node(R->l->l->r, mk_node(R->l->r, L)),
                              mk_node(R->l->l->l, R->r)));
    return out;
}

// All one-step moves including migrations, anywhere in t.
inline std::vector<TreeP> ext_moves(const TreeP& t) {
    std::vector<TreeP> out = root_moves(t);
    for (const TreeP& m : migration_moves(t)) out.push_back(m);
    if (t && !t->leaf) {
        for (const TreeP& c : ext_moves(t->l)) out.push_back(mk_node(c, t->r));
        for (const TreeP& c : ext_moves(t->r)) out.push_back(mk_node(t->l, c));
    }
    return out;
}

// Connected component of t under moves plus migrations.
inline std::map<std::string, TreeP> ext_component(const TreeP& t) {
    std::map<std::string, TreeP> seen;
    std::vector<TreeP> queue{t};
    seen.emplace(str(t), t);
    while (!queue.empty()) {
        TreeP cur = queue.back();
        queue.pop_back();
        for (const TreeP& m : ext_moves(cur)) {
            auto [it, fresh] = seen.emplace(str(m), m);
            if (fresh) queue.push_back(m);
        }
    }
    return seen;
}

// --- translation-stack variants ---------------------------------------
//
// A word whose literal string uses some generator exactly once, all other
// letters spanning at most two generators, is a stack of left/right
// translations by elements of the two-generated subloop S applied to that
// single letter.  Rewriting the translation word with identities of the
// multiplication group reaches same-element words the bracketing moves
// cannot (the chains pass through longer words).  Relations, each valid in
// every Moufang loop with the inverse property, arguments composing as
// free-group strings inside S:
//
//   T_a T_{a^-1} = 1 (same side)         L_a L_b L_a = L_{aba}
//   R_a R_b R_a = R_{aba}                R_a L_b = L_{a^-1} L_{ab} R_a
//   R_{za} L_a = L_a R_a R_z             L_a R_a = R_a L_a

inline Lits lits_invert(const Lits& s) {
    Lits r;
    for (auto it = s.rbegin(); it != s.rend(); ++it) r.emplace_back(it->first, -it->second);
    return r;
}

inline Lits lits_reduce(const Lits& s) {
    Lits out;
    for (const Lit& l : s) {
        if (!out.empty() && out.back().first == l.first && out.back().second == -l.second)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

inline Lits lits_cat(std::initializer_list<const Lits*> parts) {
    Lits all;
    for (const Lits* p : parts) all.insert(all.end(), p->begin(), p->end());
    return lits_reduce(all);
}

inline bool subtree_has(const TreeP& t, int g) {
    if (!t) return false;
    if (t->leaf) return t->index == g;
    return subtree_has(t->l, g) || subtree_has(t->r, g);
}

inline TreeP comb_of(const Lits& s) {
    TreeP acc = nullptr;
    for (auto it = s.rbegin(); it != s.rend(); ++it)
        acc = mk_node(mk_leaf(it->first, it->second), acc);
    return acc;
}

using StackOp = std::pair<bool, Lits>;    // (is left translation, argument string)
using StackWord = std::vector<StackOp>;   // outermost first

// Peel t into translations around its unique occurrence of generator g.
inline bool stack_decompose(const TreeP& t, int g, StackWord& ops, TreeP& core) {
    TreeP cur = t;
    for (;;) {
        if (!cur) return false;
        if (cur->leaf) {
            core = cur;
            return cur->index == g;
        }
        bool lh = subtree_has(cur->l, g);
        bool rh = subtree_has(cur->r, g);
        if (lh == rh) return false;
        const TreeP& blk = lh ? cur->r : cur->l;
        std::set<int> bi;
        collect_indices(blk, bi);
        if (bi.size() > 2 || bi.count(g)) return false;
        ops.emplace_back(rh, lits_reduce(lits(blk)));
        cur = lh ? cur->l : cur->r;
    }
}

inline void stack_search(const StackWord& w0, const TreeP& core, int maxlen,
                         std::map<std::string, TreeP>& found) {
    auto sig = [](const StackWord& w) {
        std::string s;
        for (const auto& [left, arg] : w) {
            s += left ? 'L' : 'R';
            for (const Lit& l : arg) {
                s += std::to_string(l.first * l.second);
                s += ',';
            }
            s += ';';
        }
        return s;
    };
    auto total = [](const StackWord& w) {
        std::size_t n = 0;
        for (const auto& [left, arg] : w) n += arg.size();
        return n;
    };
    auto simplify = [](StackWord& w) {
        for (bool again = true; again;) {
            again = false;
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (w[i].second.empty()) {
                    w.erase(w.begin() + i);
                    again = true;
                    break;
                }
                if (i + 1 < w.size() && w[i].first == w[i + 1].first &&
                    w[i + 1].second == lits_invert(w[i].second)) {
                    w.erase(w.begin() + i, w.begin() + i + 2);
                    again = true;
                    break;
                }
            }
        }
    };
    const std::size_t transit = static_cast<std::size_t>(maxlen) - 1 + 4;
    std::set<std::string> seen{sig(w0)};
    std::vector<StackWord> queue{w0};
    auto push = [&](StackWord w) {
        simplify(w);
        if (total(w) > transit) return;
        if (seen.size() >= 4000) return;
        if (seen.insert(sig(w)).second) queue.push_back(std::move(w));
    };
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const StackWord s = queue[qi];
        if (total(s) + 1 <= static_cast<std::size_t>(maxlen)) {
            TreeP t = core;
            for (auto it = s.rbegin(); it != s.rend(); ++it)
                t = it->first ? mk_node(comb_of(it->second), t)
                              : mk_node(t, comb_of(it->second));
            found.emplace(str(t), t);
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto& [aleft, aarg] = s[i];
            auto split = [&, al = aleft, aa = aarg](const Lits& head) {
                Lits hin = lits_invert(head);
                StackWord t = s;
                t[i] = StackOp{al, lits_cat({&hin, &aa, &hin})};
                t.insert(t.begin() + i, StackOp{al, head});
                t.insert(t.begin() + i + 2, StackOp{al, head});
                push(std::move(t));
            };
            for (std::size_t j = 1; j <= aarg.size(); ++j)
                split(Lits(aarg.begin(), aarg.begin() + j));
            for (const Lit& l : aarg) split(Lits{Lit{l.first, -l.second}});
            if (i + 1 < s.size()) {
                const auto& [bleft, barg] = s[i + 1];
                if (aleft == bleft && aarg == barg) {
                    StackWord t = s;
                    t[i] = StackOp{aleft, lits_cat({&aarg, &aarg})};
                    t.erase(t.begin() + i + 1);
                    push(std::move(t));
                }
                if (!aleft && bleft) {
                    // R_a L_b -> L_{a^-1} L_{ab} R_a
                    Lits ainv = lits_invert(aarg);
                    StackWord t = s;
                    t[i] = StackOp{true, ainv};
                    t[i + 1] = StackOp{true, lits_cat({&aarg, &barg})};
                    t.insert(t.begin() + i + 2, StackOp{false, aarg});
                    push(std::move(t));
                    // R_{za} L_a -> L_a R_a R_z  with z = arg * a^-1
                    Lits binv = lits_invert(barg);
                    StackWord u = s;
                    u[i] = StackOp{true, barg};
                    u[i + 1] = StackOp{false, barg};
                    u.insert(u.begin() + i + 2, StackOp{false, lits_cat({&aarg, &binv})});
                    push(std::move(u));
                }
                if (aleft != bleft && aarg == barg) {
                    StackWord t = s;  // flexible law
                    std::swap(t[i], t[i + 1]);
                    push(std::move(t));
                }
            }
            if (i + 2 < s.size()) {
                const auto& [bleft, barg] = s[i + 1];
                const auto& [cleft, carg] = s[i + 2];
                if (aleft == bleft && bleft == cleft && aarg == carg) {
                    StackWord t = s;  // Bol merge
                    t[i] = StackOp{aleft, lits_cat({&aarg, &barg, &aarg})};
                    t.erase(t.begin() + i + 1, t.begin() + i + 3);
                    push(std::move(t));
                }
                if (aleft && bleft && !cleft && aarg == lits_invert(carg)) {
                    // L_{a^-1} L_{ab} R_a -> R_a L_b  with b = a^-1 * arg
                    StackWord t = s;
                    t[i] = StackOp{false, carg};
                    t[i + 1] = StackOp{true, lits_cat({&aarg, &barg})};
                    t.erase(t.begin() + i + 2);
                    push(std::move(t));
                }
                if (aleft && !bleft && !cleft && aarg == barg) {
                    // L_a R_a R_z -> R_{za} L_a
                    StackWord t = s;
                    t[i] = StackOp{false, lits_cat({&carg, &aarg})};
                    t[i + 1] = StackOp{true, aarg};
                    t.erase(t.begin() + i + 2);
                    push(std::move(t));
                }
            }
        }
    }
}

// Same-element variants of t (none longer than t) via the stack relations.
inline std::vector<TreeP> stack_variants(const TreeP& t) {
    std::vector<TreeP> out;
    if (!t || t->leaf) return out;
    std::map<int, int> occurrences;
    for (const Lit& l : lits(t)) occurrences[l.first] += 1;
    if (occurrences.size() > 3) return out;
    std::map<std::string, TreeP> found;
    for (auto [g, c] : occurrences) {
        if (c != 1) continue;
        StackWord ops;
        TreeP core;
        if (!stack_decompose(t, g, ops, core) || ops.size() < 2) continue;
        stack_search(ops, core, len(t), found);
    }
    std::string self = str(t);
    for (auto& [k, v] : found)
        if (k != self) out.push_back(v);
    return out;
}

// Exhaustive reduction in two passes.  Pass one follows contractions only,
// breadth-first over whole components; a component with no contraction is
// terminal, and the primary result is the least terminal by (length,
// structural order) -- reduction order genuinely matters, so the normal
// form is the least terminal found, never an assumed-unique one.  Pass two
// feeds translation-stack variants of every stuck minimum back into the
// same sweep (cascading, since their reductions can stall again), but a
// laterally found terminal is adopted only when strictly shorter than the
// primary: same-length lateral minima depend on which classes the bounded
// variant search happens to uncover, and letting them displace the primary
// would make the result depend on the starting word within one element.
inline TreeP reduced_canonical(const TreeP& t, std::map<std::string, TreeP>& memo) {
    auto found = memo.find(str(t));
    if (found != memo.end()) return found->second;
    std::map<std::string, TreeP> pool;  // members of explored components
    std::vector<TreeP> terminals;
    std::vector<TreeP> stuck;  // stuck-component minima, variant seeds
    std::vector<TreeP> queue{t};
    std::set<std::string> queued{str(t)};
    std::size_t qi = 0;
    auto sweep = [&]() {
        for (; qi < queue.size(); ++qi) {
            TreeP m = queue[qi];
            if (pool.count(str(m))) continue;
            auto hit = memo.find(str(m));
            if (hit != memo.end()) {
                terminals.push_back(hit->second);
                continue;
            }
            auto comp = ext_component(m);
            std::vector<TreeP> branches;
            std::set<std::string> branch_keys;
            for (auto& [k, x] : comp)
                for (const TreeP& z : contractions(x))
                    if (branch_keys.insert(str(z)).second) branches.push_back(z);
            pool.insert(comp.begin(), comp.end());
            if (!branches.empty()) {
                for (const TreeP& z : branches)
                    if (queued.insert(str(z)).second) queue.push_back(z);
                continue;
            }
            TreeP best;
            bool first = true;
            for (auto& [k, x] : comp) {
                if (first || tree_less(x, best)) best = x;
                first = false;
            }
            terminals.push_back(best);
            stuck.push_back(best);
        }
    };
    sweep();
    TreeP result = terminals.front();
    for (const TreeP& c : terminals)
        if (reduced_less(c, result)) result = c;
    const TreeP primary = result;
    std::size_t seeded = 0;
    while (seeded < stuck.size()) {
        for (const TreeP& v : stack_variants(stuck[seeded++]))
            if (queued.insert(str(v)).second) queue.push_back(v);
        sweep();
    }
    for (const TreeP& c : terminals)
        if (len(c) < len(primary) && reduced_less(c, result)) result = c;
    for (auto& [k, x] : pool) memo.emplace(k, result);
    return result;
}

inline TreeP normal_form(const TreeP& t) {
    std::map<std::string, TreeP> memo;
    return reduced_canonical(t, memo);
}

// All raw literal strings of exactly length n over generators 1..n_gens.
inline std::vector<Lits> all_strings(int n_gens, int n) {
    std::vector<Lits> out{{}};
    for (int k = 0; k < n; ++k) {
        std::vector<Lits> next;
        for (const Lits& s : out)
            for (int i = 1; i <= n_gens; ++i)
                for (int sign : {+1, -1}) {
                    Lits t = s;
                    t.emplace_back(i, sign);
                    next.push_back(std::move(t));
                }
        out = std::move(next);
    }
    return out;
}

// Universe oracle: canonical forms of every word of length <= max_len,
// deduplicated, sorted by (length, text form).
inline std::vector<TreeP> universe(int n_gens, int max_len) {
    std::map<std::string, TreeP> canon;
    std::map<std::string, TreeP> memo;
    canon.emplace("e", nullptr);
    for (int n = 1; n <= max_len; ++n)
        for (const Lits& s : all_strings(n_gens, n))
            for (const TreeP& t : all_trees(s, 0, static_cast<int>(s.size()))) {
                TreeP c = reduced_canonical(t, memo);
                canon.emplace(str(c), c);
            }
    std::vector<TreeP> out;
    for (auto& [k, v] : canon) out.push_back(v);
    std::sort(out.begin(), out.end(), [](const TreeP& a, const TreeP& b) {
        if (len(a) != len(b)) return len(a) < len(b);
        return str(a) < str(b);
    });
    return out;
}

}  // namespace oracle
