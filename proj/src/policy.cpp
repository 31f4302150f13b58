#include "abestore/policy.hpp"

#include <algorithm>
#include <cctype>

namespace abestore::policy {

PolicyPtr leaf(std::string name) {
    auto n = std::make_shared<PolicyExpr>();
    n->kind = PolicyExpr::Kind::Leaf;
    n->name = std::move(name);
    return n;
}

PolicyPtr p_and(PolicyPtr l, PolicyPtr r) {
    auto n = std::make_shared<PolicyExpr>();
    n->kind = PolicyExpr::Kind::And;
    n->left = std::move(l);
    n->right = std::move(r);
    return n;
}

PolicyPtr p_or(PolicyPtr l, PolicyPtr r) {
    auto n = std::make_shared<PolicyExpr>();
    n->kind = PolicyExpr::Kind::Or;
    n->left = std::move(l);
    n->right = std::move(r);
    return n;
}

namespace {

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '.' ||
           c == '-';
}

std::string lowered(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return out;
}

struct Token {
    enum class Kind { Name, And, Or, LParen, RParen, End };
    Kind kind;
    std::string text;
    size_t offset;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return cur_; }
    Token take() {
        Token t = cur_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        size_t start = pos_;
        if (pos_ >= text_.size()) {
            cur_ = {Token::Kind::End, "", start};
            return;
        }
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            cur_ = {Token::Kind::LParen, "(", start};
            return;
        }
        if (c == ')') {
            ++pos_;
            cur_ = {Token::Kind::RParen, ")", start};
            return;
        }
        if (!is_name_char(c)) throw PolicyParseError("unexpected character", start);
        while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
        std::string word(text_.substr(start, pos_ - start));
        std::string low = lowered(word);
        if (low == "and")
            cur_ = {Token::Kind::And, word, start};
        else if (low == "or")
            cur_ = {Token::Kind::Or, word, start};
        else
            cur_ = {Token::Kind::Name, word, start};
    }

    std::string_view text_;
    size_t pos_ = 0;
    Token cur_{Token::Kind::End, "", 0};
};

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) {}

    PolicyPtr run() {
        PolicyPtr e = expr();
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::End) throw PolicyParseError("unexpected token", t.offset);
        return e;
    }

private:
    PolicyPtr expr() {
        PolicyPtr l = term();
        while (lex_.peek().kind == Token::Kind::Or) {
            lex_.take();
            l = p_or(std::move(l), term());
        }
        return l;
    }

    PolicyPtr term() {
        PolicyPtr l = factor();
        while (lex_.peek().kind == Token::Kind::And) {
            lex_.take();
            l = p_and(std::move(l), factor());
        }
        return l;
    }

    PolicyPtr factor() {
        Token t = lex_.take();
        switch (t.kind) {
            case Token::Kind::Name:
                return leaf(t.text);
            case Token::Kind::LParen: {
                PolicyPtr e = expr();
                Token close = lex_.take();
                if (close.kind != Token::Kind::RParen)
                    throw PolicyParseError("expected ')'", close.offset);
                return e;
            }
            case Token::Kind::End:
                throw PolicyParseError("unexpected end of input", t.offset);
            default:
                throw PolicyParseError("expected attribute or '('", t.offset);
        }
    }

    Lexer lex_;
};

}  // namespace

PolicyPtr parse(std::string_view text) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw PolicyParseError("empty policy", 0);
    return Parser(text).run();
}

std::string serialize(const PolicyExpr& p) {
    switch (p.kind) {
        case PolicyExpr::Kind::Leaf:
            return p.name;
        case PolicyExpr::Kind::And:
            return "(" + serialize(*p.left) + " and " + serialize(*p.right) + ")";
        case PolicyExpr::Kind::Or:
            return "(" + serialize(*p.left) + " or " + serialize(*p.right) + ")";
    }
    throw std::logic_error("bad policy kind");
}

bool structurally_equal(const PolicyExpr& a, const PolicyExpr& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == PolicyExpr::Kind::Leaf) return a.name == b.name;
    return structurally_equal(*a.left, *b.left) && structurally_equal(*a.right, *b.right);
}

bool satisfies(const AttributeSet& attrs, const PolicyExpr& p) {
    switch (p.kind) {
        case PolicyExpr::Kind::Leaf:
            return attrs.count(p.name) != 0;
        case PolicyExpr::Kind::And:
            return satisfies(attrs, *p.left) && satisfies(attrs, *p.right);
        case PolicyExpr::Kind::Or:
            return satisfies(attrs, *p.left) || satisfies(attrs, *p.right);
    }
    throw std::logic_error("bad policy kind");
}

PolicyPtr conjunction(const std::vector<std::string>& names) {
    if (names.empty())
        throw ProtocolError(ErrorCode::Malformed, "conjunction over empty attribute list");
    PolicyPtr e = leaf(names.back());
    for (auto it = names.rbegin() + 1; it != names.rend(); ++it) e = p_and(leaf(*it), e);
    return e;
}

void collect_leaves(const PolicyExpr& p, std::vector<std::string>& out) {
    if (p.kind == PolicyExpr::Kind::Leaf) {
        out.push_back(p.name);
        return;
    }
    collect_leaves(*p.left, out);
    collect_leaves(*p.right, out);
}

std::vector<std::string> leaves(const PolicyExpr& p) {
    std::vector<std::string> out;
    collect_leaves(p, out);
    return out;
}

namespace {

std::shared_ptr<const AccessNode> compile_node(const PolicyExpr& p, size_t& next_leaf) {
    auto n = std::make_shared<AccessNode>();
    if (p.kind == PolicyExpr::Kind::Leaf) {
        n->is_leaf = true;
        n->attribute = p.name;
        n->leaf_index = next_leaf++;
        return n;
    }
    n->threshold = p.kind == PolicyExpr::Kind::And ? 2 : 1;
    n->children.push_back(compile_node(*p.left, next_leaf));
    n->children.push_back(compile_node(*p.right, next_leaf));
    return n;
}

void serialize_node(const AccessNode& n, ByteWriter& w) {
    if (n.is_leaf) {
        w.u8(0);
        w.str(n.attribute);
        return;
    }
    w.u8(1);
    w.u8(uint8_t(n.threshold));
    w.u8(uint8_t(n.children.size()));
    for (const auto& c : n.children) serialize_node(*c, w);
}

std::shared_ptr<const AccessNode> deserialize_node(ByteReader& r, size_t& next_leaf) {
    auto n = std::make_shared<AccessNode>();
    uint8_t tag = r.u8();
    if (tag == 0) {
        n->is_leaf = true;
        n->attribute = r.str();
        if (n->attribute.empty()) throw DecodeError("empty attribute name");
        n->leaf_index = next_leaf++;
        return n;
    }
    if (tag != 1) throw DecodeError("bad access-structure node tag");
    n->threshold = r.u8();
    uint8_t count = r.u8();
    if (count == 0 || n->threshold == 0 || n->threshold > count)
        throw DecodeError("bad threshold gate");
    for (uint8_t i = 0; i < count; ++i) n->children.push_back(deserialize_node(r, next_leaf));
    return n;
}

bool node_satisfied(const AccessNode& n, const AttributeSet& attrs) {
    if (n.is_leaf) return attrs.count(n.attribute) != 0;
    uint32_t hits = 0;
    for (const auto& c : n.children)
        if (node_satisfied(*c, attrs)) ++hits;
    return hits >= n.threshold;
}

}  // namespace

Bytes AccessStructure::serialize() const {
    ByteWriter w;
    w.u8(1);  // version
    serialize_node(*root, w);
    return w.take();
}

AccessStructure AccessStructure::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad access-structure version");
    AccessStructure s;
    size_t next_leaf = 0;
    s.root = deserialize_node(r, next_leaf);
    s.leaf_count = next_leaf;
    r.expect_done();
    return s;
}

bool AccessStructure::satisfied_by(const AttributeSet& attrs) const {
    return node_satisfied(*root, attrs);
}

AccessStructure compile_access_structure(const PolicyExpr& p) {
    AccessStructure s;
    size_t next_leaf = 0;
    s.root = compile_node(p, next_leaf);
    s.leaf_count = next_leaf;
    return s;
}

}  // namespace abestore::policy
