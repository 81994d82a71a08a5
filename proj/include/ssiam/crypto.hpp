#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "ssiam/bytes.hpp"

namespace ssiam {

constexpr size_t kSeedSize = 32;
constexpr size_t kDigestSize = 32;
constexpr size_t kPublicKeySize = 32;
constexpr size_t kSecretKeySize = 64;  // ed25519 native: seed || public key
constexpr size_t kSignatureSize = 64;

struct Digest {
    std::array<uint8_t, kDigestSize> bytes{};

    auto operator<=>(const Digest&) const = default;

    std::string hex() const { return to_hex(bytes); }
    static Digest from_hex(std::string_view hex);  // throws Errc::bad_hex on bad length/digits
    static Digest zero() { return Digest{}; }
};

struct PublicKey {
    std::array<uint8_t, kPublicKeySize> bytes{};

    auto operator<=>(const PublicKey&) const = default;

    std::string hex() const { return to_hex(bytes); }
    static PublicKey from_hex(std::string_view hex);
};

struct SecretKey {
    std::array<uint8_t, kSecretKeySize> bytes{};

    auto operator<=>(const SecretKey&) const = default;

    std::string hex() const { return to_hex(bytes); }
    static SecretKey from_hex(std::string_view hex);
};

struct KeyPair {
    PublicKey public_key;
    SecretKey secret_key;
};

struct Signature {
    std::array<uint8_t, kSignatureSize> bytes{};

    auto operator<=>(const Signature&) const = default;

    std::string hex() const { return to_hex(bytes); }
    static Signature from_hex(std::string_view hex);
};

// Deterministic: one seed, one keypair. Throws Errc::malformed_seed unless
// the seed is exactly 32 bytes.
KeyPair generate_keypair(std::span<const uint8_t> seed);

// The public half is derivable from the secret half.
PublicKey public_key_of(const SecretKey& sk);

Signature sign(const SecretKey& sk, std::span<const uint8_t> message);
bool verify(const PublicKey& pk, std::span<const uint8_t> message, const Signature& sig);

Digest digest(std::span<const uint8_t> payload);
inline Digest digest(std::string_view payload) {
    return digest(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(payload.data()),
                                           payload.size()));
}

}  // namespace ssiam
