#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace uascan {

// ---------------------------------------------------------------------------
// Security policies
//
// The six policies of the current specification, ordered by strength. The
// two *Deprecated* entries were deprecated in 2017 because they pair RSA
// key exchange with SHA-1 signatures; they remain widespread in the field.
// ---------------------------------------------------------------------------

enum class PolicyId : uint8_t {
    None = 0,
    Unknown = 1,            // URI not in the registry; ranked above None only
    Basic128Rsa15 = 2,      // deprecated
    Basic256 = 3,           // deprecated
    Aes128Sha256RsaOaep = 4,
    Basic256Sha256 = 5,
    Aes256Sha256RsaPss = 6,
};

enum class HashAlgorithm : uint8_t { MD5, SHA1, SHA256, SHA384, SHA512, Other };

/// Total order used for "weaker/stronger than required" comparisons.
/// Anything unrecognized ranks below every named algorithm.
inline int hash_rank(HashAlgorithm h) {
    switch (h) {
    case HashAlgorithm::MD5: return 1;
    case HashAlgorithm::SHA1: return 2;
    case HashAlgorithm::SHA256: return 3;
    case HashAlgorithm::SHA384: return 4;
    case HashAlgorithm::SHA512: return 5;
    case HashAlgorithm::Other: return 0;
    }
    return 0;
}

inline const char* to_string(HashAlgorithm h) {
    switch (h) {
    case HashAlgorithm::MD5: return "MD5";
    case HashAlgorithm::SHA1: return "SHA1";
    case HashAlgorithm::SHA256: return "SHA256";
    case HashAlgorithm::SHA384: return "SHA384";
    case HashAlgorithm::SHA512: return "SHA512";
    case HashAlgorithm::Other: return "Other";
    }
    return "Other";
}

struct PolicyProfile {
    PolicyId id;
    std::string_view name;            // short name as it appears in the URI
    std::string_view uri;
    bool deprecated;
    HashAlgorithm signature_hash;     // hash used by the policy's signatures
    // Certificate requirements. `cert_hashes` lists the instance-certificate
    // signature hashes the policy allows; `min/max_key_bits` bound the RSA
    // modulus. All zero / empty for None (no certificate involved).
    std::array<HashAlgorithm, 2> cert_hashes;
    int cert_hash_count;
    int min_key_bits;
    int max_key_bits;
};

namespace detail {
inline constexpr std::string_view kPolicyUriPrefix =
    "http://opcfoundation.org/UA/SecurityPolicy#";

inline const std::array<PolicyProfile, 6>& policy_table() {
    static const std::array<PolicyProfile, 6> table{{
        {PolicyId::None, "None", "http://opcfoundation.org/UA/SecurityPolicy#None",
         false, HashAlgorithm::Other, {}, 0, 0, 0},
        {PolicyId::Basic128Rsa15, "Basic128Rsa15",
         "http://opcfoundation.org/UA/SecurityPolicy#Basic128Rsa15", true,
         HashAlgorithm::SHA1, {HashAlgorithm::SHA1, HashAlgorithm::SHA1}, 1, 1024, 2048},
        {PolicyId::Basic256, "Basic256",
         "http://opcfoundation.org/UA/SecurityPolicy#Basic256", true,
         HashAlgorithm::SHA1, {HashAlgorithm::SHA1, HashAlgorithm::SHA256}, 2, 1024, 2048},
        {PolicyId::Aes128Sha256RsaOaep, "Aes128_Sha256_RsaOaep",
         "http://opcfoundation.org/UA/SecurityPolicy#Aes128_Sha256_RsaOaep", false,
         HashAlgorithm::SHA256, {HashAlgorithm::SHA256, HashAlgorithm::SHA256}, 1, 2048,
         4096},
        {PolicyId::Basic256Sha256, "Basic256Sha256",
         "http://opcfoundation.org/UA/SecurityPolicy#Basic256Sha256", false,
         HashAlgorithm::SHA256, {HashAlgorithm::SHA256, HashAlgorithm::SHA256}, 1, 2048,
         4096},
        {PolicyId::Aes256Sha256RsaPss, "Aes256_Sha256_RsaPss",
         "http://opcfoundation.org/UA/SecurityPolicy#Aes256_Sha256_RsaPss", false,
         HashAlgorithm::SHA256, {HashAlgorithm::SHA256, HashAlgorithm::SHA256}, 1, 2048,
         4096},
    }};
    return table;
}
}  // namespace detail

/// Maps a policy URI to its registry entry; unrecognized URIs (including
/// vendor extensions and typos) come back as Unknown rather than failing.
inline PolicyId policy_from_uri(std::string_view uri) {
    for (const auto& p : detail::policy_table())
        if (p.uri == uri) return p.id;
    return PolicyId::Unknown;
}

/// Registry lookup. Unknown has no profile; callers must branch on it first.
inline const PolicyProfile* policy_profile(PolicyId id) {
    if (id == PolicyId::Unknown) return nullptr;
    for (const auto& p : detail::policy_table())
        if (p.id == id) return &p;
    return nullptr;
}

inline std::string policy_uri(PolicyId id) {
    const PolicyProfile* p = policy_profile(id);
    return p ? std::string(p->uri) : std::string();
}

inline std::string policy_name(PolicyId id) {
    if (id == PolicyId::Unknown) return "Unknown";
    const PolicyProfile* p = policy_profile(id);
    return p ? std::string(p->name) : std::string("Unknown");
}

/// Inverse of policy_name for registry entries; "Unknown" and unrecognized
/// names return nullopt (there is no URI to synthesize for them).
inline std::optional<PolicyId> policy_from_name(std::string_view name) {
    for (const auto& p : detail::policy_table())
        if (p.name == name) return p.id;
    return std::nullopt;
}

/// Strength ordering: None < Unknown < Basic128Rsa15 < Basic256 <
/// Aes128_Sha256_RsaOaep < Basic256Sha256 < Aes256_Sha256_RsaPss.
/// Unknown sits just above None: it at least attempts security, but we
/// cannot credit it with more than that.
inline int policy_strength(PolicyId id) { return static_cast<int>(id); }

inline bool policy_deprecated(PolicyId id) {
    const PolicyProfile* p = policy_profile(id);
    return p != nullptr && p->deprecated;
}

inline bool cert_hash_allowed(const PolicyProfile& p, HashAlgorithm h) {
    for (int i = 0; i < p.cert_hash_count; ++i)
        if (p.cert_hashes[static_cast<size_t>(i)] == h) return true;
    return false;
}

/// Weakest hash a policy accepts for its instance certificate.
inline HashAlgorithm weakest_allowed_cert_hash(const PolicyProfile& p) {
    HashAlgorithm weakest = HashAlgorithm::SHA512;
    for (int i = 0; i < p.cert_hash_count; ++i) {
        HashAlgorithm h = p.cert_hashes[static_cast<size_t>(i)];
        if (hash_rank(h) < hash_rank(weakest)) weakest = h;
    }
    return weakest;
}

}  // namespace uascan
