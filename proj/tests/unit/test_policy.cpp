#include "abestore/policy.hpp"

#include <functional>

#include "abestore/rng.hpp"
#include "doctest.h"

using namespace abestore;
using namespace abestore::policy;

namespace {

// ---- independent oracle: shunting-yard to RPN, stack evaluation ----------
// Deliberately a different algorithm from the library's recursive-descent
// parser.

struct RpnTok {
    enum class K { Name, And, Or } k;
    std::string name;
};

std::vector<RpnTok> to_rpn(std::string_view text) {
    std::vector<RpnTok> out;
    std::vector<std::string> ops;  // "and", "or", "("
    auto prec = [](const std::string& op) { return op == "and" ? 2 : 1; };
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '(') {
            ops.push_back("(");
            ++i;
            continue;
        }
        if (c == ')') {
            while (!ops.empty() && ops.back() != "(") {
                out.push_back({ops.back() == "and" ? RpnTok::K::And : RpnTok::K::Or, ""});
                ops.pop_back();
            }
            REQUIRE(!ops.empty());
            ops.pop_back();
            ++i;
            continue;
        }
        size_t start = i;
        while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                                   std::string("_:.-").find(text[i]) != std::string::npos))
            ++i;
        std::string word(text.substr(start, i - start));
        std::string low = word;
        for (auto& ch : low) ch = char(std::tolower(static_cast<unsigned char>(ch)));
        if (low == "and" || low == "or") {
            while (!ops.empty() && ops.back() != "(" && prec(ops.back()) >= prec(low)) {
                out.push_back({ops.back() == "and" ? RpnTok::K::And : RpnTok::K::Or, ""});
                ops.pop_back();
            }
            ops.push_back(low);
        } else {
            out.push_back({RpnTok::K::Name, word});
        }
    }
    while (!ops.empty()) {
        REQUIRE(ops.back() != "(");
        out.push_back({ops.back() == "and" ? RpnTok::K::And : RpnTok::K::Or, ""});
        ops.pop_back();
    }
    return out;
}

bool rpn_eval(const std::vector<RpnTok>& rpn, const AttributeSet& attrs) {
    std::vector<bool> st;
    for (const auto& t : rpn) {
        if (t.k == RpnTok::K::Name) {
            st.push_back(attrs.count(t.name) != 0);
        } else {
            bool b = st.back();
            st.pop_back();
            bool a = st.back();
            st.pop_back();
            st.push_back(t.k == RpnTok::K::And ? (a && b) : (a || b));
        }
    }
    REQUIRE(st.size() == 1);
    return st.back();
}

PolicyPtr rpn_to_ast(const std::vector<RpnTok>& rpn) {
    std::vector<PolicyPtr> st;
    for (const auto& t : rpn) {
        if (t.k == RpnTok::K::Name) {
            st.push_back(leaf(t.name));
        } else {
            PolicyPtr r = st.back();
            st.pop_back();
            PolicyPtr l = st.back();
            st.pop_back();
            st.push_back(t.k == RpnTok::K::And ? p_and(l, r) : p_or(l, r));
        }
    }
    REQUIRE(st.size() == 1);
    return st.back();
}

// ---- random generators ----------------------------------------------------

std::string attr_name(size_t i) { return "a" + std::to_string(i); }

PolicyPtr random_policy(RandomSource& rng, size_t universe, int depth) {
    if (depth == 0 || rng.below(3) == 0) return leaf(attr_name(rng.below(universe)));
    PolicyPtr l = random_policy(rng, universe, depth - 1);
    PolicyPtr r = random_policy(rng, universe, depth - 1);
    return rng.below(2) == 0 ? p_and(l, r) : p_or(l, r);
}

// Serialize with random spacing and keyword casing to exercise the lexer.
std::string noisy_text(const PolicyExpr& p, RandomSource& rng) {
    auto sp = [&] { return std::string(1 + rng.below(2), ' '); };
    auto kw = [&](const char* lower, const char* upper) {
        return rng.below(2) == 0 ? std::string(lower) : std::string(upper);
    };
    switch (p.kind) {
        case PolicyExpr::Kind::Leaf:
            return p.name;
        case PolicyExpr::Kind::And:
            return "(" + sp() + noisy_text(*p.left, rng) + sp() + kw("and", "AND") + sp() +
                   noisy_text(*p.right, rng) + sp() + ")";
        case PolicyExpr::Kind::Or:
            return "(" + sp() + noisy_text(*p.left, rng) + sp() + kw("or", "Or") + sp() +
                   noisy_text(*p.right, rng) + sp() + ")";
    }
    return "";
}

AttributeSet subset_from_mask(size_t universe, uint64_t mask) {
    AttributeSet s;
    for (size_t i = 0; i < universe; ++i)
        if (mask & (uint64_t(1) << i)) s.insert(attr_name(i));
    return s;
}

}  // namespace

TEST_CASE("worked example policy parses with expected shape") {
    PolicyPtr p = parse("CEO or (Manager and New_York)");
    REQUIRE(p->kind == PolicyExpr::Kind::Or);
    CHECK(p->left->kind == PolicyExpr::Kind::Leaf);
    CHECK(p->left->name == "CEO");
    REQUIRE(p->right->kind == PolicyExpr::Kind::And);
    CHECK(p->right->left->name == "Manager");
    CHECK(p->right->right->name == "New_York");

    CHECK(satisfies({"CEO"}, p));
    CHECK(satisfies({"Manager", "New_York"}, p));
    CHECK_FALSE(satisfies({"Manager"}, p));
}

TEST_CASE("single leaf") {
    PolicyPtr p = parse("A");
    CHECK(p->kind == PolicyExpr::Kind::Leaf);
    CHECK(p->name == "A");
    CHECK_FALSE(satisfies({}, p));
}

TEST_CASE("precedence corpus: and binds tighter than or") {
    PolicyPtr p = parse("A and B or C");
    REQUIRE(p->kind == PolicyExpr::Kind::Or);
    CHECK(p->left->kind == PolicyExpr::Kind::And);
    CHECK(p->right->name == "C");

    PolicyPtr q = parse("A or B and C");
    REQUIRE(q->kind == PolicyExpr::Kind::Or);
    CHECK(q->left->name == "A");
    CHECK(q->right->kind == PolicyExpr::Kind::And);
}

TEST_CASE("parse errors carry offsets") {
    CHECK_THROWS_AS(parse(""), PolicyParseError);
    CHECK_THROWS_AS(parse("   "), PolicyParseError);
    CHECK_THROWS_AS(parse("A and"), PolicyParseError);
    CHECK_THROWS_AS(parse("(A or B"), PolicyParseError);
    CHECK_THROWS_AS(parse("A B"), PolicyParseError);
    CHECK_THROWS_AS(parse("and A"), PolicyParseError);
    try {
        parse("A and !B");
    } catch (const PolicyParseError& e) {
        CHECK(e.offset() == 6);
    }
}

TEST_CASE("parser agrees with shunting-yard oracle on 200 random policies") {
    Drbg rng(2024);
    for (int i = 0; i < 200; ++i) {
        PolicyPtr p = random_policy(rng, 6, 3);
        std::string text = noisy_text(*p, rng);
        PolicyPtr parsed = parse(text);
        PolicyPtr oracle = rpn_to_ast(to_rpn(text));
        CHECK(structurally_equal(*parsed, *oracle));
    }
}

TEST_CASE("satisfies agrees with truth-table oracle") {
    Drbg rng(7);
    const size_t universe = 10;
    for (int i = 0; i < 100; ++i) {
        PolicyPtr p = random_policy(rng, universe, 3);
        std::string text = serialize(p);
        auto rpn = to_rpn(text);
        // Sample of the subset lattice plus full sweep on a smaller prefix.
        for (uint64_t mask = 0; mask < 64; ++mask) {
            AttributeSet s = subset_from_mask(universe, mask);
            CHECK(satisfies(s, p) == rpn_eval(rpn, s));
        }
        for (int j = 0; j < 16; ++j) {
            AttributeSet s = subset_from_mask(universe, rng.u64() & 0x3ff);
            CHECK(satisfies(s, p) == rpn_eval(rpn, s));
        }
    }
}

TEST_CASE("monotonicity: adding attributes never unsatisfies") {
    Drbg rng(11);
    for (int i = 0; i < 100; ++i) {
        PolicyPtr p = random_policy(rng, 8, 3);
        uint64_t small = rng.u64() & 0xff;
        uint64_t big = small | (rng.u64() & 0xff);
        if (satisfies(subset_from_mask(8, small), p))
            CHECK(satisfies(subset_from_mask(8, big), p));
    }
}

TEST_CASE("serialize round-trips structurally") {
    Drbg rng(13);
    for (int i = 0; i < 100; ++i) {
        PolicyPtr p = random_policy(rng, 6, 4);
        CHECK(structurally_equal(*parse(serialize(p)), *p));
    }
}

TEST_CASE("conjunction folds right and matches subset semantics") {
    PolicyPtr single = conjunction({"A"});
    CHECK(single->kind == PolicyExpr::Kind::Leaf);

    PolicyPtr three = conjunction({"A", "B", "C"});
    REQUIRE(three->kind == PolicyExpr::Kind::And);
    CHECK(three->left->name == "A");
    REQUIRE(three->right->kind == PolicyExpr::Kind::And);
    CHECK(three->right->left->name == "B");
    CHECK(three->right->right->name == "C");

    CHECK_THROWS_AS(conjunction({}), ProtocolError);

    // satisfies(S, conjunction(L)) == L subset of S
    Drbg rng(17);
    for (int i = 0; i < 200; ++i) {
        uint64_t lmask = 1 + rng.below(255);
        uint64_t smask = rng.u64() & 0xff;
        std::vector<std::string> l;
        for (size_t b = 0; b < 8; ++b)
            if (lmask & (uint64_t(1) << b)) l.push_back(attr_name(b));
        AttributeSet s = subset_from_mask(8, smask);
        bool subset = (lmask & ~smask) == 0;
        CHECK(satisfies(s, conjunction(l)) == subset);
    }
}

TEST_CASE("access structure compilation") {
    AccessStructure one = compile_access_structure(parse("A"));
    REQUIRE(one.root);
    CHECK(one.root->is_leaf);
    CHECK(one.leaf_count == 1);

    AccessStructure both = compile_access_structure(parse("A and B"));
    REQUIRE_FALSE(both.root->is_leaf);
    CHECK(both.root->threshold == 2);
    CHECK(both.root->children.size() == 2);

    AccessStructure either = compile_access_structure(parse("A or B"));
    CHECK(either.root->threshold == 1);
}

TEST_CASE("access structure satisfaction matches satisfies on subsets <= 8") {
    Drbg rng(23);
    const size_t universe = 8;
    for (int i = 0; i < 60; ++i) {
        PolicyPtr p = random_policy(rng, universe, 3);
        AccessStructure s = compile_access_structure(p);
        for (uint64_t mask = 0; mask < (uint64_t(1) << universe); ++mask) {
            AttributeSet attrs = subset_from_mask(universe, mask);
            CHECK(s.satisfied_by(attrs) == satisfies(attrs, p));
        }
    }
}

TEST_CASE("access structure serialization round-trips") {
    Drbg rng(29);
    for (int i = 0; i < 50; ++i) {
        PolicyPtr p = random_policy(rng, 6, 3);
        AccessStructure s = compile_access_structure(p);
        AccessStructure back = AccessStructure::deserialize(s.serialize());
        CHECK(back.leaf_count == s.leaf_count);
        CHECK(back.serialize() == s.serialize());
        for (uint64_t mask = 0; mask < 64; ++mask) {
            AttributeSet attrs = subset_from_mask(6, mask);
            CHECK(back.satisfied_by(attrs) == s.satisfied_by(attrs));
        }
    }
}
