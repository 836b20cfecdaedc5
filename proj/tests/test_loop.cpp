#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "mfl/loop.hpp"
#include "oracle.hpp"

using mfl::LoopElement;

namespace {

LoopElement el(const char* text) { return mfl::parse_element(text); }

// All fully bracketed products of the element sequence s[lo..hi).
std::vector<LoopElement> all_products(const std::vector<LoopElement>& s, std::size_t lo,
                                      std::size_t hi) {
    std::vector<LoopElement> out;
    if (hi - lo == 1) {
        out.push_back(s[lo]);
        return out;
    }
    for (std::size_t mid = lo + 1; mid < hi; ++mid)
        for (LoopElement l : all_products(s, lo, mid))
            for (LoopElement r : all_products(s, mid, hi)) out.push_back(mfl::mul(l, r));
    return out;
}

}  // namespace

TEST_CASE("identity element") {
    REQUIRE(mfl::identity().is_identity());
    REQUIRE(mfl::identity().length() == 0);
    REQUIRE(mfl::to_string(mfl::identity()) == "e");
    for (const char* text : {"x1", "x2^-1", "(x1*x2)*x3"}) {
        LoopElement a = el(text);
        REQUIRE(mfl::mul(mfl::identity(), a) == a);
        REQUIRE(mfl::mul(a, mfl::identity()) == a);
    }
    REQUIRE(mfl::inv(mfl::identity()) == mfl::identity());
}

TEST_CASE("multiplication") {
    SECTION("examples") {
        REQUIRE(mfl::mul(el("x1"), el("x1^-1")) == mfl::identity());
        REQUIRE(mfl::mul(mfl::mul(el("x1"), el("x2")), el("x2^-1")) == el("x1"));
        LoopElement p = mfl::mul(el("x1"), el("x2"));
        REQUIRE(p.length() == 2);
        REQUIRE(mfl::to_string(p) == "(x1*x2)");
    }
    SECTION("repeated cache hits are stable") {
        LoopElement a = el("x1*(x2*x1)");
        LoopElement b = el("x2^-1*x1");
        LoopElement first = mfl::mul(a, b);
        REQUIRE(mfl::mul(a, b) == first);
        REQUIRE(mfl::mul(a, b).length() == first.length());
    }
    SECTION("product of element with its inverse cancels") {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            LoopElement a = mfl::random_element(3, 4, seed);
            REQUIRE(mfl::mul(a, mfl::inv(a)) == mfl::identity());
            REQUIRE(mfl::mul(mfl::inv(a), a) == mfl::identity());
        }
    }
}

TEST_CASE("inversion of elements") {
    REQUIRE(mfl::inv(el("x1")) == el("x1^-1"));
    REQUIRE(mfl::inv(mfl::identity()) == mfl::identity());
    SECTION("anti-homomorphism and involution") {
        for (std::uint64_t seed = 100; seed < 160; ++seed) {
            LoopElement a = mfl::random_element(3, 3, 2 * seed);
            LoopElement b = mfl::random_element(3, 3, 2 * seed + 1);
            REQUIRE(mfl::inv(mfl::mul(a, b)) == mfl::mul(mfl::inv(b), mfl::inv(a)));
            REQUIRE(mfl::inv(mfl::inv(a)) == a);
        }
    }
}

TEST_CASE("element equality") {
    REQUIRE(mfl::eq(el("x1"), el("x1")));
    REQUIRE(!mfl::eq(el("x1"), el("x2")));
    REQUIRE(mfl::eq(el("((x1*x2)*x1)*x3"), el("x1*(x2*(x1*x3))")));
    REQUIRE(mfl::eq(el("x1^-1*(x1*x2)"), el("x2")));
}

TEST_CASE("moufang law checker") {
    REQUIRE(mfl::check_moufang(el("x1"), el("x2"), el("x3")));
    SECTION("identity degenerations") {
        LoopElement a = el("x1*x2");
        LoopElement b = el("x3^-1");
        REQUIRE(mfl::check_moufang(mfl::identity(), a, b));
        REQUIRE(mfl::check_moufang(a, mfl::identity(), b));
        REQUIRE(mfl::check_moufang(a, b, mfl::identity()));
    }
    SECTION("500 random triples") {
        for (std::uint64_t i = 0; i < 500; ++i) {
            LoopElement a = mfl::random_element(3, 4, 9000 + 3 * i);
            LoopElement b = mfl::random_element(3, 4, 9001 + 3 * i);
            LoopElement c = mfl::random_element(3, 4, 9002 + 3 * i);
            REQUIRE(mfl::check_moufang(a, b, c));
        }
    }
}

TEST_CASE("inverse property checker") {
    REQUIRE(mfl::check_ip(el("x1"), el("x2")));
    REQUIRE(mfl::check_ip(mfl::identity(), el("x1*x3")));
    SECTION("500 random pairs") {
        for (std::uint64_t i = 0; i < 500; ++i) {
            LoopElement a = mfl::random_element(3, 5, 20000 + 2 * i);
            LoopElement b = mfl::random_element(3, 5, 20001 + 2 * i);
            REQUIRE(mfl::check_ip(a, b));
        }
    }
}

TEST_CASE("di-associativity") {
    // Every bracketing of a word in two fixed elements agrees: the
    // subloop generated by two elements behaves associatively.
    for (std::uint64_t seed = 40; seed < 50; ++seed) {
        LoopElement a = mfl::random_element(2, 2, 3 * seed);
        LoopElement b = mfl::random_element(2, 2, 3 * seed + 1);
        for (int n = 2; n <= 4; ++n) {
            for (int mask = 0; mask < (1 << n); ++mask) {
                std::vector<LoopElement> s;
                for (int k = 0; k < n; ++k) s.push_back((mask >> k) & 1 ? b : a);
                auto prods = all_products(s, 0, s.size());
                for (const LoopElement& p : prods) REQUIRE(p == prods.front());
            }
        }
    }
}

TEST_CASE("universe enumeration") {
    SECTION("one generator, length one") {
        auto u = mfl::enumerate_universe(1, 1);
        REQUIRE(u.size() == 3);
        REQUIRE(u[0] == mfl::identity());
        REQUIRE(u[1] == el("x1"));
        REQUIRE(u[2] == el("x1^-1"));
    }
    SECTION("zero length keeps only the identity") {
        auto u = mfl::enumerate_universe(2, 0);
        REQUIRE(u.size() == 1);
        REQUIRE(u[0] == mfl::identity());
    }
    SECTION("ordering, uniqueness, identity membership") {
        auto u = mfl::enumerate_universe(2, 3);
        std::set<std::string> keys;
        for (std::size_t i = 0; i < u.size(); ++i) {
            keys.insert(mfl::to_string(u[i]));
            if (i) REQUIRE(mfl::element_less(u[i - 1], u[i]));
        }
        REQUIRE(keys.size() == u.size());
        REQUIRE(keys.count("e") == 1);
    }
    SECTION("length-2 stratum drops collapsing products") {
        auto u = mfl::enumerate_universe(2, 2);
        std::set<std::string> keys;
        for (const LoopElement& a : u) keys.insert(mfl::to_string(a));
        REQUIRE(keys.count("(x1*x1^-1)") == 0);
        REQUIRE(keys.count("(x1*x2)") == 1);
        REQUIRE(keys.count("(x1*x1)") == 1);
    }
    SECTION("matches the exhaustive oracle universe") {
        struct Case {
            int n_gens;
            int max_len;
        };
        for (Case c : {Case{1, 2}, Case{2, 2}, Case{2, 3}, Case{3, 2}}) {
            auto engine = mfl::enumerate_universe(c.n_gens, c.max_len);
            auto expect = oracle::universe(c.n_gens, c.max_len);
            REQUIRE(engine.size() == expect.size());
            for (std::size_t i = 0; i < engine.size(); ++i)
                REQUIRE(mfl::to_string(engine[i]) == oracle::str(expect[i]));
        }
    }
    SECTION("element cap enforced") {
        try {
            mfl::enumerate_universe(2, 3, {}, 5);
            FAIL("expected CapExceededError");
        } catch (const mfl::CapExceededError& e) {
            REQUIRE(e.cap() == 5);
            REQUIRE(e.partial_size() > 5);
        }
    }
    SECTION("requires a generator") {
        REQUIRE_THROWS_AS(mfl::enumerate_universe(0, 1), mfl::Error);
    }
}

TEST_CASE("random elements") {
    SECTION("deterministic in the seed") {
        LoopElement a = mfl::random_element(2, 3, 42);
        LoopElement b = mfl::random_element(2, 3, 42);
        REQUIRE(a == b);
        REQUIRE(a.length() <= 3);
    }
    SECTION("single generator, length one") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            LoopElement a = mfl::random_element(1, 1, seed);
            REQUIRE((a == el("x1") || a == el("x1^-1")));
        }
    }
    SECTION("distribution smoke") {
        std::set<std::string> distinct;
        for (std::uint64_t seed = 0; seed < 1000; ++seed)
            distinct.insert(mfl::to_string(mfl::random_element(2, 4, seed)));
        REQUIRE(distinct.size() >= 10);
    }
    SECTION("canonical stability") {
        for (std::uint64_t seed = 500; seed < 520; ++seed) {
            LoopElement a = mfl::random_element(3, 4, seed);
            REQUIRE(LoopElement::from_word(a.canonical()) == a);
        }
    }
}
