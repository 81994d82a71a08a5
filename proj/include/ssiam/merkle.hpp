#pragma once

#include <vector>

#include "ssiam/canonical.hpp"
#include "ssiam/crypto.hpp"

namespace ssiam {

// Balanced binary hash tree over claim commitments. Leaves are
// digest(salt || name || value); inner nodes digest(left || right); an odd
// level duplicates its last node. A single leaf is its own root; the empty
// tree commits to digest("").
struct PathNode {
    bool sibling_is_left = false;
    Digest hash;

    Json to_json() const;
    static PathNode from_json(const Json& j);
};

Digest claim_leaf(std::span<const uint8_t> salt, std::string_view name, std::string_view value);

Digest merkle_root(const std::vector<Digest>& leaves);
std::vector<PathNode> merkle_path(const std::vector<Digest>& leaves, size_t index);
Digest fold_path(const Digest& leaf, const std::vector<PathNode>& path);

}  // namespace ssiam
