#include "ssiam/crypto.hpp"

#include <sodium.h>

#include <mutex>

#include "ssiam/errors.hpp"

namespace ssiam {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) fail(Errc::io_error, "libsodium initialization failed");
    });
}

template <size_t N>
std::array<uint8_t, N> array_from_hex(std::string_view hex, const char* what) {
    Bytes raw = from_hex(hex);
    if (raw.size() != N) fail(Errc::bad_hex, std::string(what) + ": wrong length");
    std::array<uint8_t, N> out{};
    std::copy(raw.begin(), raw.end(), out.begin());
    return out;
}

}  // namespace

Digest Digest::from_hex(std::string_view hex) {
    return Digest{array_from_hex<kDigestSize>(hex, "digest")};
}

PublicKey PublicKey::from_hex(std::string_view hex) {
    return PublicKey{array_from_hex<kPublicKeySize>(hex, "public key")};
}

SecretKey SecretKey::from_hex(std::string_view hex) {
    return SecretKey{array_from_hex<kSecretKeySize>(hex, "secret key")};
}

Signature Signature::from_hex(std::string_view hex) {
    return Signature{array_from_hex<kSignatureSize>(hex, "signature")};
}

KeyPair generate_keypair(std::span<const uint8_t> seed) {
    ensure_sodium();
    if (seed.size() != kSeedSize) fail(Errc::malformed_seed, "seed must be exactly 32 bytes");
    KeyPair kp;
    crypto_sign_seed_keypair(kp.public_key.bytes.data(), kp.secret_key.bytes.data(), seed.data());
    return kp;
}

PublicKey public_key_of(const SecretKey& sk) {
    ensure_sodium();
    PublicKey pk;
    crypto_sign_ed25519_sk_to_pk(pk.bytes.data(), sk.bytes.data());
    return pk;
}

Signature sign(const SecretKey& sk, std::span<const uint8_t> message) {
    ensure_sodium();
    Signature sig;
    crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                         sk.bytes.data());
    return sig;
}

bool verify(const PublicKey& pk, std::span<const uint8_t> message, const Signature& sig) {
    ensure_sodium();
    return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                       pk.bytes.data()) == 0;
}

Digest digest(std::span<const uint8_t> payload) {
    ensure_sodium();
    Digest d;
    crypto_hash_sha256(d.bytes.data(), payload.data(), payload.size());
    return d;
}

}  // namespace ssiam
