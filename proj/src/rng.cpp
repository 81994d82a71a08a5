#include "ssiam/rng.hpp"

namespace ssiam {

DeterministicRng DeterministicRng::from_label(uint64_t seed, std::string_view label) {
    Bytes material;
    for (int i = 0; i < 8; ++i) material.push_back(static_cast<uint8_t>(seed >> (8 * i)));
    append(material, label);
    return DeterministicRng(digest(material));
}

Digest DeterministicRng::block(uint64_t counter) const {
    Bytes material(key_.bytes.begin(), key_.bytes.end());
    for (int i = 0; i < 8; ++i) material.push_back(static_cast<uint8_t>(counter >> (8 * i)));
    return digest(material);
}

Bytes DeterministicRng::bytes(size_t n) {
    Bytes out;
    out.reserve(n);
    while (out.size() < n) {
        Digest d = block(counter_++);
        size_t take = std::min(d.bytes.size(), n - out.size());
        out.insert(out.end(), d.bytes.begin(), d.bytes.begin() + take);
    }
    return out;
}

std::array<uint8_t, 16> DeterministicRng::nonce16() {
    Bytes b = bytes(16);
    std::array<uint8_t, 16> out{};
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

std::array<uint8_t, 32> DeterministicRng::seed32() {
    Bytes b = bytes(32);
    std::array<uint8_t, 32> out{};
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

uint64_t DeterministicRng::next_u64() {
    Bytes b = bytes(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace ssiam
