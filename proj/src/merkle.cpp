#include "ssiam/merkle.hpp"

#include "ssiam/errors.hpp"

namespace ssiam {

namespace {

Digest hash_pair(const Digest& left, const Digest& right) {
    Bytes material(left.bytes.begin(), left.bytes.end());
    material.insert(material.end(), right.bytes.begin(), right.bytes.end());
    return digest(material);
}

std::vector<Digest> next_level(const std::vector<Digest>& level) {
    std::vector<Digest> up;
    up.reserve((level.size() + 1) / 2);
    for (size_t i = 0; i < level.size(); i += 2) {
        const Digest& left = level[i];
        const Digest& right = i + 1 < level.size() ? level[i + 1] : level[i];
        up.push_back(hash_pair(left, right));
    }
    return up;
}

}  // namespace

Json PathNode::to_json() const {
    return Json{{"side", sibling_is_left ? "L" : "R"}, {"hash", hash.hex()}};
}

PathNode PathNode::from_json(const Json& j) {
    std::string side = j.at("side").get<std::string>();
    if (side != "L" && side != "R") fail(Errc::parse_error, "path side must be L or R");
    return PathNode{side == "L", Digest::from_hex(j.at("hash").get<std::string>())};
}

Digest claim_leaf(std::span<const uint8_t> salt, std::string_view name, std::string_view value) {
    Bytes material(salt.begin(), salt.end());
    append(material, name);
    append(material, value);
    return digest(material);
}

Digest merkle_root(const std::vector<Digest>& leaves) {
    if (leaves.empty()) return digest(std::string_view{});
    std::vector<Digest> level = leaves;
    while (level.size() > 1) level = next_level(level);
    return level.front();
}

std::vector<PathNode> merkle_path(const std::vector<Digest>& leaves, size_t index) {
    if (index >= leaves.size()) fail(Errc::out_of_range, "leaf index beyond tree");
    std::vector<PathNode> path;
    std::vector<Digest> level = leaves;
    size_t pos = index;
    while (level.size() > 1) {
        size_t sibling = pos ^ 1;
        if (sibling >= level.size()) sibling = pos;  // duplicated last node
        path.push_back(PathNode{sibling < pos, level[sibling]});
        level = next_level(level);
        pos /= 2;
    }
    return path;
}

Digest fold_path(const Digest& leaf, const std::vector<PathNode>& path) {
    Digest current = leaf;
    for (const PathNode& node : path)
        current = node.sibling_is_left ? hash_pair(node.hash, current)
                                       : hash_pair(current, node.hash);
    return current;
}

}  // namespace ssiam
