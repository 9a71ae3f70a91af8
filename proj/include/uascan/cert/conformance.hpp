#pragma once

#include <string>
#include <vector>

#include "uascan/cert/certificate.hpp"
#include "uascan/policy.hpp"

namespace uascan::cert {

enum class Verdict : uint8_t {
    Conformant,
    WeakerThanPolicy,
    StrongerThanPolicy,
    NotApplicable,
};

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Conformant: return "Conformant";
    case Verdict::WeakerThanPolicy: return "WeakerThanPolicy";
    case Verdict::StrongerThanPolicy: return "StrongerThanPolicy";
    case Verdict::NotApplicable: return "NotApplicable";
    }
    return "NotApplicable";
}

enum class ConformanceReason : uint8_t {
    HashBelowPolicy,
    HashAbovePolicy,
    KeyBelowRange,
    KeyAboveRange,
    NonRsaKey,
};

inline const char* to_string(ConformanceReason r) {
    switch (r) {
    case ConformanceReason::HashBelowPolicy: return "HashBelowPolicy";
    case ConformanceReason::HashAbovePolicy: return "HashAbovePolicy";
    case ConformanceReason::KeyBelowRange: return "KeyBelowRange";
    case ConformanceReason::KeyAboveRange: return "KeyAboveRange";
    case ConformanceReason::NonRsaKey: return "NonRsaKey";
    }
    return "NonRsaKey";
}

struct ConformanceVerdict {
    Verdict verdict = Verdict::NotApplicable;
    std::vector<ConformanceReason> reasons;

    bool operator==(const ConformanceVerdict&) const = default;
};

/// Evaluates a certificate against a policy's requirements. Total function:
/// None and Unknown policies have no certificate requirements and yield
/// NotApplicable. Any primitive below the requirement makes the whole
/// verdict Weaker; Stronger only when nothing is below and something
/// exceeds the allowed set or range.
inline ConformanceVerdict check_conformance(PolicyId policy, const CertificateRecord& rec) {
    ConformanceVerdict out;
    const PolicyProfile* profile = policy_profile(policy);
    if (!profile || profile->cert_hash_count == 0) {
        out.verdict = Verdict::NotApplicable;
        return out;
    }

    bool below = false, above = false;

    int min_rank = hash_rank(HashAlgorithm::SHA512), max_rank = 0;
    for (int i = 0; i < profile->cert_hash_count; ++i) {
        int r = hash_rank(profile->cert_hashes[static_cast<size_t>(i)]);
        if (r < min_rank) min_rank = r;
        if (r > max_rank) max_rank = r;
    }
    int r = hash_rank(rec.signature_hash);
    if (r < min_rank) {
        out.reasons.push_back(ConformanceReason::HashBelowPolicy);
        below = true;
    } else if (r > max_rank) {
        out.reasons.push_back(ConformanceReason::HashAbovePolicy);
        above = true;
    }

    if (rec.key_algorithm != KeyAlgorithm::RSA) {
        out.reasons.push_back(ConformanceReason::NonRsaKey);
        below = true;
    } else if (rec.key_length_bits < profile->min_key_bits) {
        out.reasons.push_back(ConformanceReason::KeyBelowRange);
        below = true;
    } else if (rec.key_length_bits > profile->max_key_bits) {
        out.reasons.push_back(ConformanceReason::KeyAboveRange);
        above = true;
    }

    out.verdict = below    ? Verdict::WeakerThanPolicy
                  : above  ? Verdict::StrongerThanPolicy
                           : Verdict::Conformant;
    return out;
}

/// Convenience overload for constructed inputs (tests, aggregates).
inline ConformanceVerdict check_conformance(PolicyId policy, HashAlgorithm hash,
                                            int key_bits,
                                            KeyAlgorithm key = KeyAlgorithm::RSA) {
    CertificateRecord rec;
    rec.signature_hash = hash;
    rec.key_algorithm = key;
    rec.key_length_bits = key_bits;
    return check_conformance(policy, rec);
}

}  // namespace uascan::cert
