#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mfl/errors.hpp"

namespace mfl {

// A signed generator occurrence: x_index or x_index^-1.
struct Literal {
    std::uint32_t index = 0;  // 1-based
    int sign = +1;            // +1 or -1

    friend bool operator==(const Literal&, const Literal&) = default;
};

namespace detail {

// Words are immutable binary trees interned in a global arena: structurally
// equal words always share one id, so equality is an integer compare and
// per-word caches can be keyed by id.  All public entry points lock the
// arena mutex, making the word layer safe for concurrent use.
class WordArena {
public:
    enum Kind : std::uint8_t { kEmpty = 0, kLeaf = 1, kNode = 2 };

    struct Node {
        std::uint32_t a = 0;       // leaf: generator index; node: left id
        std::uint32_t b = 0;       // leaf: 0 = positive, 1 = inverse; node: right id
        std::uint32_t length = 0;  // number of literals
        // Distinct generator indices among the leaves, tracked exactly up
        // to two; gcount == 3 means "three or more".  Words confined to at
        // most two generators live in a two-generated subloop, which the
        // rewrite layer can treat as associative; this makes that test O(1).
        std::uint32_t g0 = 0;
        std::uint32_t g1 = 0;
        std::uint8_t gcount = 0;
        Kind kind = kEmpty;
    };

    // Add one generator index to the capped index set of n.
    static void genset_add(Node& n, std::uint32_t idx) {
        if (n.gcount >= 3) return;
        if (n.gcount >= 1 && n.g0 == idx) return;
        if (n.gcount == 2 && n.g1 == idx) return;
        if (n.gcount == 0) {
            n.g0 = idx;
            n.gcount = 1;
        } else if (n.gcount == 1) {
            n.g1 = idx;
            n.gcount = 2;
        } else {
            n.gcount = 3;
        }
    }

    // Merge the capped index set of src into n.
    static void genset_merge(Node& n, const Node& src) {
        if (src.gcount >= 3) {
            n.gcount = 3;
            return;
        }
        if (src.gcount >= 1) genset_add(n, src.g0);
        if (src.gcount == 2) genset_add(n, src.g1);
    }

    static WordArena& instance() {
        static WordArena arena;
        return arena;
    }

    std::mutex& mutex() { return mutex_; }

    // All functions below assume the caller holds the mutex.
    const Node& node(std::uint32_t id) const { return nodes_[id]; }

    std::uint32_t empty() const { return 0; }

    std::uint32_t leaf(std::uint32_t index, int sign) {
        std::uint64_t key = (std::uint64_t(index) << 1) | (sign < 0 ? 1u : 0u);
        auto it = leaf_ids_.find(key);
        if (it != leaf_ids_.end()) return it->second;
        Node n;
        n.a = index;
        n.b = sign < 0 ? 1u : 0u;
        n.length = 1;
        n.g0 = index;
        n.gcount = 1;
        n.kind = kLeaf;
        std::uint32_t id = add(n);
        leaf_ids_.emplace(key, id);
        return id;
    }

    // Product with empty-word absorption: no interned node ever has an
    // empty child, so the tree shape is a faithful bracketing of the
    // literal sequence.
    std::uint32_t product(std::uint32_t l, std::uint32_t r) {
        if (l == 0) return r;
        if (r == 0) return l;
        std::uint64_t key = (std::uint64_t(l) << 32) | r;
        auto it = node_ids_.find(key);
        if (it != node_ids_.end()) return it->second;
        Node n;
        n.a = l;
        n.b = r;
        n.length = nodes_[l].length + nodes_[r].length;
        genset_merge(n, nodes_[l]);
        genset_merge(n, nodes_[r]);
        n.kind = kNode;
        std::uint32_t id = add(n);
        node_ids_.emplace(key, id);
        return id;
    }

    std::uint32_t invert(std::uint32_t id) {
        if (id == 0) return 0;
        auto it = invert_cache_.find(id);
        if (it != invert_cache_.end()) return it->second;
        const Node n = nodes_[id];
        std::uint32_t out;
        if (n.kind == kLeaf) {
            out = leaf(n.a, n.b ? +1 : -1);
        } else {
            out = product(invert(n.b), invert(n.a));
        }
        invert_cache_.emplace(id, out);
        return out;
    }

    // Total structural order: empty < leaf < product; leaves by
    // (index, sign) with the positive literal first; products
    // lexicographically by (left, right).
    int compare(std::uint32_t x, std::uint32_t y) const {
        if (x == y) return 0;
        const Node& nx = nodes_[x];
        const Node& ny = nodes_[y];
        if (nx.kind != ny.kind) return nx.kind < ny.kind ? -1 : 1;
        if (nx.kind == kLeaf) {
            if (nx.a != ny.a) return nx.a < ny.a ? -1 : 1;
            return nx.b < ny.b ? -1 : 1;  // 0 (positive) sorts first
        }
        if (int c = compare(nx.a, ny.a)) return c;
        return compare(nx.b, ny.b);
    }

    void append_text(std::uint32_t id, std::string& out) const {
        const Node& n = nodes_[id];
        switch (n.kind) {
            case kEmpty: out += 'e'; break;
            case kLeaf:
                out += 'x';
                out += std::to_string(n.a);
                if (n.b) out += "^-1";
                break;
            case kNode:
                out += '(';
                append_text(n.a, out);
                out += '*';
                append_text(n.b, out);
                out += ')';
                break;
        }
    }

    // Shared memo tables for the layers above (keyed by word id; values are
    // word ids).  Kept here so they live next to the interner and under the
    // same lock.
    std::unordered_map<std::uint32_t, std::uint32_t> rep_cache;     // ≈-class minimum
    std::unordered_map<std::uint32_t, std::uint32_t> canon_cache;   // least reduced word
    std::unordered_map<std::uint32_t, std::uint32_t> canon_strict;  // all-paths-checked reduced word
    std::unordered_map<std::uint64_t, std::uint32_t> mul_cache;     // loop product
    // Wider same-element forms of a reduced word, recorded whenever a
    // reduction search proves raw ≈ reduced (e.g. the raw product tree
    // behind a loop multiplication).  Equality searches use them to re-widen
    // a stuck subterm: a cancellation pattern destroyed by an earlier
    // reduction can only be rebuilt from such a wider form.
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> expansions;

    // Record raw as a proven wider form of reduced (bounded, deduplicated).
    void record_expansion(std::uint32_t reduced, std::uint32_t raw) {
        if (raw == reduced) return;
        if (nodes_[raw].length > nodes_[reduced].length + 8) return;
        auto& forms = expansions[reduced];
        if (forms.size() >= 32) return;
        for (std::uint32_t f : forms)
            if (f == raw) return;
        forms.push_back(raw);
    }

private:
    WordArena() { nodes_.push_back(Node{}); }

    std::uint32_t add(Node n) {
        nodes_.push_back(n);
        return static_cast<std::uint32_t>(nodes_.size() - 1);
    }

    std::vector<Node> nodes_;
    std::unordered_map<std::uint64_t, std::uint32_t> leaf_ids_;
    std::unordered_map<std::uint64_t, std::uint32_t> node_ids_;
    std::unordered_map<std::uint32_t, std::uint32_t> invert_cache_;
    std::mutex mutex_;
};

class ArenaOps;

}  // namespace detail

// An immutable word over the free generating set: the empty word, a signed
// generator, or a binary product of two non-empty words.  Copying is a
// 4-byte id copy; equality is structural (ids are interned).
class Word {
public:
    Word() : id_(0) {}  // the empty word e

    static Word empty() { return Word(0); }

    static Word leaf(std::uint32_t index, int sign = +1) {
        if (index == 0) throw Error("generator index must be >= 1");
        auto& a = detail::WordArena::instance();
        std::scoped_lock lock(a.mutex());
        return Word(a.leaf(index, sign));
    }

    static Word leaf(const Literal& l) { return leaf(l.index, l.sign); }

    static Word product(Word l, Word r) {
        auto& a = detail::WordArena::instance();
        std::scoped_lock lock(a.mutex());
        return Word(a.product(l.id_, r.id_));
    }

    bool is_empty() const { return id_ == 0; }

    bool is_leaf() const {
        auto& a = detail::WordArena::instance();
        std::scoped_lock lock(a.mutex());
        return a.node(id_).kind == detail::WordArena::kLeaf;
    }

    bool is_product() const {
        auto& a = detail::WordArena::instance();
        std::scoped_lock lock(a.mutex());
        return a.node(id_).kind == detail::WordArena::kNode;
    }

    // Number of literals (0 for e).
    std::uint32_t length() const {
        auto& a = detail::WordArena::instance();
        std::scoped_lock lock(a.mutex());
        return a.node(id_).length;
    }

    Literal literal() const {
        auto& a = detail::WordArena::instance();
        std::scoped_lock lock(a.mutex());
        const auto& n = a.node(id_);
        if (n.kind != detail::WordArena::kLeaf)
            throw Error("literal() called on a non-leaf word");
        return Literal{n.a, n.b ? -1 : +1};
    }

    Word left() const {
        auto& a = detail::WordArena::instance();
        std::scoped_lock lock(a.mutex());
        const auto& n = a.node(id_);
        if (n.kind != detail::WordArena::kNode)
            throw Error("left() called on a non-product word");
        return Word(n.a);
    }

    Word right() const {
        auto& a = detail::WordArena::instance();
        std::scoped_lock lock(a.mutex());
        const auto& n = a.node(id_);
        if (n.kind != detail::WordArena::kNode)
            throw Error("right() called on a non-product word");
        return Word(n.b);
    }

    std::uint32_t id() const { return id_; }

    friend bool operator==(Word a, Word b) { return a.id_ == b.id_; }
    friend bool operator!=(Word a, Word b) { return a.id_ != b.id_; }

private:
    explicit Word(std::uint32_t id) : id_(id) {}
    std::uint32_t id_;

    friend class detail::ArenaOps;
};

namespace detail {

// Internal accessor used by the rewrite layer to work with raw ids while
// holding the arena lock once per high-level operation.
class ArenaOps {
public:
    static Word wrap(std::uint32_t id) { return Word(id); }
    static std::uint32_t id(Word w) { return w.id_; }
};

}  // namespace detail

// Structural total order on words; used for canonical representatives and
// all deterministic orderings.
inline int compare(Word a, Word b) {
    auto& arena = detail::WordArena::instance();
    std::scoped_lock lock(arena.mutex());
    return arena.compare(a.id(), b.id());
}

inline bool word_less(Word a, Word b) { return compare(a, b) < 0; }

// Syntactic inverse: e^-1 = e, literals flip sign, (u*v)^-1 = v^-1 * u^-1.
inline Word invert(Word w) {
    auto& arena = detail::WordArena::instance();
    std::scoped_lock lock(arena.mutex());
    return detail::ArenaOps::wrap(arena.invert(w.id()));
}

// Fully parenthesized text form, e.g. ((x1*x2)*x1^-1).
inline std::string to_string(Word w) {
    auto& arena = detail::WordArena::instance();
    std::scoped_lock lock(arena.mutex());
    std::string out;
    arena.append_text(w.id(), out);
    return out;
}

namespace detail {

// Recursive-descent parser for the word grammar:
//   word    := postfix ('*' postfix)*          (left-associative)
//   postfix := primary ('^-1')*
//   primary := 'e' | 'x' digits | '(' word ')'
// Whitespace is allowed between tokens.  '^-1' binds tighter than '*' and
// is applied eagerly via invert().
class WordParser {
public:
    explicit WordParser(std::string_view text) : text_(text) {}

    Word parse() {
        Word w = parse_word();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        return w;
    }

    // Longest well-formed word starting at `pos`, for grammars that embed
    // words in larger expressions; advances `pos` past the consumed text.
    Word parse_from(std::size_t& pos) {
        pos_ = pos;
        Word w = parse_word();
        pos = pos_;
        return w;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Word parse_word() {
        Word w = parse_postfix();
        while (eat('*')) w = Word::product(w, parse_postfix());
        return w;
    }

    Word parse_postfix() {
        Word w = parse_primary();
        for (;;) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '^') {
                std::size_t at = pos_;
                ++pos_;
                if (!(eat('-') && eat('1')))
                    throw ParseError("expected ^-1", at);
                w = invert(w);
            } else {
                break;
            }
        }
        return w;
    }

    Word parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == 'e') {
            ++pos_;
            return Word::empty();
        }
        if (c == 'x') {
            std::size_t at = ++pos_;
            std::uint64_t idx = 0;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                throw ParseError("expected generator index after 'x'", pos_);
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                idx = idx * 10 + (text_[pos_] - '0');
                if (idx > 0xFFFFFFFFull) throw ParseError("generator index too large", at);
                ++pos_;
            }
            if (idx == 0) throw ParseError("generator index must be >= 1", at);
            return Word::leaf(static_cast<std::uint32_t>(idx), +1);
        }
        if (c == '(') {
            std::size_t at = pos_;
            ++pos_;
            Word w = parse_word();
            if (!eat(')')) throw ParseError("unbalanced '('", at);
            return w;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Word parse_word(std::string_view text) { return detail::WordParser(text).parse(); }

// Parse the longest well-formed word starting at `pos` and advance `pos`.
inline Word parse_word_at(std::string_view text, std::size_t& pos) {
    detail::WordParser parser(text);
    return parser.parse_from(pos);
}

// Leaf sequence of a word, left to right.
inline std::vector<Literal> literals(Word w) {
    std::vector<Literal> out;
    auto& arena = detail::WordArena::instance();
    std::scoped_lock lock(arena.mutex());
    std::vector<std::uint32_t> stack{w.id()};
    out.reserve(arena.node(w.id()).length);
    while (!stack.empty()) {
        std::uint32_t id = stack.back();
        stack.pop_back();
        const auto& n = arena.node(id);
        if (n.kind == detail::WordArena::kLeaf) {
            out.push_back(Literal{n.a, n.b ? -1 : +1});
        } else if (n.kind == detail::WordArena::kNode) {
            stack.push_back(n.b);  // right pushed first so left pops first
            stack.push_back(n.a);
        }
    }
    return out;
}

// Exponent vector of the abelianization: map generator index -> net exponent.
// Invariant under all bracketing moves and under the cancellation rules'
// effect pattern tracking; used as a fast grading.
inline std::vector<std::pair<std::uint32_t, int>> abelianization(Word w) {
    std::vector<std::pair<std::uint32_t, int>> acc;
    for (const Literal& l : literals(w)) {
        bool found = false;
        for (auto& [idx, exp] : acc) {
            if (idx == l.index) {
                exp += l.sign;
                found = true;
                break;
            }
        }
        if (!found) acc.emplace_back(l.index, l.sign);
    }
    std::vector<std::pair<std::uint32_t, int>> out;
    for (auto& [idx, exp] : acc)
        if (exp != 0) out.emplace_back(idx, exp);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace mfl

template <>
struct std::hash<mfl::Word> {
    std::size_t operator()(mfl::Word w) const noexcept { return std::hash<std::uint32_t>()(w.id()); }
};
