#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "abestore/bytes.hpp"
#include "abestore/errors.hpp"

namespace abestore::policy {

// Monotone access formula over named attributes.  Nodes are immutable and
// shared; a PolicyPtr is safe to hand across threads.
struct PolicyExpr;
using PolicyPtr = std::shared_ptr<const PolicyExpr>;

struct PolicyExpr {
    enum class Kind { Leaf, And, Or };

    Kind kind;
    std::string name;  // Leaf only
    PolicyPtr left, right;
};

PolicyPtr leaf(std::string name);
PolicyPtr p_and(PolicyPtr l, PolicyPtr r);
PolicyPtr p_or(PolicyPtr l, PolicyPtr r);

using AttributeSet = std::set<std::string>;

class PolicyParseError : public ProtocolError {
public:
    PolicyParseError(const std::string& what, size_t offset)
        : ProtocolError(ErrorCode::Malformed, what + " at offset " + std::to_string(offset)),
          offset_(offset) {}

    size_t offset() const { return offset_; }

private:
    size_t offset_;
};

// Grammar:  expr := term ('or' term)* ; term := factor ('and' factor)* ;
//           factor := NAME | '(' expr ')'
// Keywords are case-insensitive; NAME matches [A-Za-z0-9_:.-]+ and may not
// be a keyword.  'and' binds tighter than 'or'; both are left-associative.
PolicyPtr parse(std::string_view text);

// Canonical form: fully parenthesized, lowercase keywords.
// parse(serialize(p)) is structurally equal to p.
std::string serialize(const PolicyExpr& p);
inline std::string serialize(const PolicyPtr& p) { return serialize(*p); }

bool structurally_equal(const PolicyExpr& a, const PolicyExpr& b);

// True iff assigning true to exactly the names in attrs satisfies p.
bool satisfies(const AttributeSet& attrs, const PolicyExpr& p);
inline bool satisfies(const AttributeSet& attrs, const PolicyPtr& p) {
    return satisfies(attrs, *p);
}

// Right-folded AND over the names; rejects an empty list.
PolicyPtr conjunction(const std::vector<std::string>& names);

// Leaf names in left-to-right order (with duplicates).
std::vector<std::string> leaves(const PolicyExpr& p);

// Threshold-tree form used by the ABE engines: AND becomes a 2-of-2 gate,
// OR a 1-of-2 gate.  Leaves keep the formula's left-to-right order and are
// numbered from 0.
struct AccessNode {
    bool is_leaf = false;
    std::string attribute;  // leaf
    size_t leaf_index = 0;  // leaf
    uint32_t threshold = 0;  // gate
    std::vector<std::shared_ptr<const AccessNode>> children;  // gate
};

struct AccessStructure {
    std::shared_ptr<const AccessNode> root;
    size_t leaf_count = 0;

    Bytes serialize() const;
    static AccessStructure deserialize(std::span<const uint8_t> data);

    bool satisfied_by(const AttributeSet& attrs) const;
};

AccessStructure compile_access_structure(const PolicyExpr& p);
inline AccessStructure compile_access_structure(const PolicyPtr& p) {
    return compile_access_structure(*p);
}

}  // namespace abestore::policy
