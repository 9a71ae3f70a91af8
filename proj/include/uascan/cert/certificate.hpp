#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <openssl/asn1.h>
#include <openssl/bio.h>
#include <openssl/bn.h>
#include <openssl/evp.h>
#include <openssl/objects.h>
#include <openssl/rsa.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include "uascan/bytes.hpp"
#include "uascan/errors.hpp"
#include "uascan/policy.hpp"

namespace uascan::cert {

enum class KeyAlgorithm : uint8_t { RSA, Other };

inline const char* to_string(KeyAlgorithm k) {
    return k == KeyAlgorithm::RSA ? "RSA" : "Other";
}

struct CertificateRecord {
    std::string fingerprint;        // lowercase hex SHA-256 of the DER bytes
    HashAlgorithm signature_hash = HashAlgorithm::Other;
    KeyAlgorithm key_algorithm = KeyAlgorithm::Other;
    int key_length_bits = 0;        // modulus bit length for RSA
    std::string modulus_hex;        // lowercase hex, RSA only
    std::string subject;            // RFC 2253 one-line form
    std::string issuer;
    std::string common_name;        // subject CN, empty when absent
    std::vector<std::string> subject_alt_names;  // DNS/IP/URI entries as text
    bool self_signed = false;
    int64_t not_before = 0;         // unix seconds
    int64_t not_after = 0;
    Bytes der;

    bool operator==(const CertificateRecord&) const = default;
};

namespace detail {

struct X509Deleter {
    void operator()(X509* x) const { X509_free(x); }
};
struct PKeyDeleter {
    void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }
};
using X509Ptr = std::unique_ptr<X509, X509Deleter>;
using PKeyPtr = std::unique_ptr<EVP_PKEY, PKeyDeleter>;

inline std::string name_oneline(X509_NAME* name) {
    BIO* bio = BIO_new(BIO_s_mem());
    X509_NAME_print_ex(bio, name, 0, XN_FLAG_RFC2253);
    char* data = nullptr;
    long len = BIO_get_mem_data(bio, &data);
    std::string out(data, data + len);
    BIO_free(bio);
    return out;
}

inline std::string name_cn(X509_NAME* name) {
    char buf[256];
    int n = X509_NAME_get_text_by_NID(name, NID_commonName, buf, sizeof buf);
    return n > 0 ? std::string(buf, static_cast<size_t>(n)) : std::string();
}

inline HashAlgorithm hash_from_md_nid(int nid) {
    switch (nid) {
    case NID_md5: return HashAlgorithm::MD5;
    case NID_sha1: return HashAlgorithm::SHA1;
    case NID_sha256: return HashAlgorithm::SHA256;
    case NID_sha384: return HashAlgorithm::SHA384;
    case NID_sha512: return HashAlgorithm::SHA512;
    default: return HashAlgorithm::Other;
    }
}

inline int64_t asn1_time_to_unix(const ASN1_TIME* t) {
    struct tm tmv{};
    if (ASN1_TIME_to_tm(t, &tmv) != 1)
        throw CertError(errc::malformed_certificate, "unparseable validity time");
    return static_cast<int64_t>(timegm(&tmv));
}

inline std::string to_lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

inline std::string ip_to_text(const unsigned char* p, int len) {
    std::string s;
    if (len == 4) {
        for (int i = 0; i < 4; ++i) {
            if (i) s.push_back('.');
            s += std::to_string(p[i]);
        }
    } else if (len == 16) {
        static const char d[] = "0123456789abcdef";
        for (int i = 0; i < 16; i += 2) {
            if (i) s.push_back(':');
            s.push_back(d[p[i] >> 4]);
            s.push_back(d[p[i] & 0xf]);
            s.push_back(d[p[i + 1] >> 4]);
            s.push_back(d[p[i + 1] & 0xf]);
        }
    }
    return s;
}

}  // namespace detail

inline std::string sha256_fingerprint(BytesView der) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(der.data(), der.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw CertError(errc::malformed_certificate, "digest failure");
    return to_hex(BytesView(md, len));
}

/// Raw 20-byte SHA-1 digest of the DER encoding, as carried in the
/// receiver-certificate-thumbprint field of an asymmetric security header.
inline Bytes sha1_thumbprint(BytesView der) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(der.data(), der.size(), md, &len, EVP_sha1(), nullptr) != 1)
        throw CertError(errc::malformed_certificate, "digest failure");
    return Bytes(md, md + len);
}

/// Parses DER into a CertificateRecord. Unknown algorithms map to Other;
/// truncated or trailing bytes are malformed.
inline CertificateRecord parse_certificate(BytesView der) {
    if (der.empty()) throw CertError(errc::malformed_certificate, "empty certificate");
    const unsigned char* p = der.data();
    detail::X509Ptr x(d2i_X509(nullptr, &p, static_cast<long>(der.size())));
    if (!x || p != der.data() + der.size())
        throw CertError(errc::malformed_certificate, "DER parse failure");

    CertificateRecord rec;
    rec.der.assign(der.begin(), der.end());
    rec.fingerprint = sha256_fingerprint(der);

    int md_nid = NID_undef, pk_nid = NID_undef;
    OBJ_find_sigid_algs(X509_get_signature_nid(x.get()), &md_nid, &pk_nid);
    rec.signature_hash = detail::hash_from_md_nid(md_nid);

    X509_NAME* subject = X509_get_subject_name(x.get());
    X509_NAME* issuer = X509_get_issuer_name(x.get());
    rec.subject = detail::name_oneline(subject);
    rec.issuer = detail::name_oneline(issuer);
    rec.common_name = detail::name_cn(subject);

    rec.not_before = detail::asn1_time_to_unix(X509_get0_notBefore(x.get()));
    rec.not_after = detail::asn1_time_to_unix(X509_get0_notAfter(x.get()));

    detail::PKeyPtr pkey(X509_get_pubkey(x.get()));
    if (pkey && EVP_PKEY_base_id(pkey.get()) == EVP_PKEY_RSA) {
        rec.key_algorithm = KeyAlgorithm::RSA;
        rec.key_length_bits = EVP_PKEY_bits(pkey.get());
        BIGNUM* n = nullptr;
        if (EVP_PKEY_get_bn_param(pkey.get(), "n", &n) == 1 && n) {
            char* hex = BN_bn2hex(n);
            rec.modulus_hex = detail::to_lower(hex);
            OPENSSL_free(hex);
            BN_free(n);
        }
    } else {
        rec.key_algorithm = KeyAlgorithm::Other;
        rec.key_length_bits = pkey ? EVP_PKEY_bits(pkey.get()) : 0;
    }

    if (auto* sans = static_cast<GENERAL_NAMES*>(
            X509_get_ext_d2i(x.get(), NID_subject_alt_name, nullptr, nullptr))) {
        for (int i = 0; i < sk_GENERAL_NAME_num(sans); ++i) {
            GENERAL_NAME* gn = sk_GENERAL_NAME_value(sans, i);
            if (gn->type == GEN_DNS || gn->type == GEN_URI) {
                ASN1_IA5STRING* s = gn->type == GEN_DNS ? gn->d.dNSName
                                                        : gn->d.uniformResourceIdentifier;
                rec.subject_alt_names.emplace_back(
                    reinterpret_cast<const char*>(ASN1_STRING_get0_data(s)),
                    static_cast<size_t>(ASN1_STRING_length(s)));
            } else if (gn->type == GEN_IPADD) {
                std::string ip = detail::ip_to_text(ASN1_STRING_get0_data(gn->d.iPAddress),
                                                    ASN1_STRING_length(gn->d.iPAddress));
                if (!ip.empty()) rec.subject_alt_names.push_back(std::move(ip));
            }
        }
        GENERAL_NAMES_free(sans);
    }

    bool names_equal = X509_NAME_cmp(subject, issuer) == 0;
    rec.self_signed = names_equal && pkey && X509_verify(x.get(), pkey.get()) == 1;
    return rec;
}

/// Validity in the renewal-tracking sense: the observation instant falls in
/// the certificate's window and the self-signature verifies. (Chain building
/// is out of scope; nearly every certificate in the field is self-signed.)
inline bool certificate_valid_at(const CertificateRecord& rec, int64_t observation) {
    return rec.self_signed && rec.not_before <= observation && observation <= rec.not_after;
}

struct TimelineFacts {
    bool generated_after_deprecation = false;
    bool expired_at_observation = false;

    bool operator==(const TimelineFacts&) const = default;
};

/// 2017-01-01T00:00:00Z — the deprecation date of the SHA-1-based policies.
constexpr int64_t kDefaultDeprecationDate = 1483228800;

inline TimelineFacts timeline_facts(const CertificateRecord& rec, int64_t observation,
                                    int64_t deprecation_date = kDefaultDeprecationDate) {
    TimelineFacts f;
    bool deprecated_hash = rec.signature_hash == HashAlgorithm::SHA1 ||
                           rec.signature_hash == HashAlgorithm::MD5;
    f.generated_after_deprecation = deprecated_hash && rec.not_before > deprecation_date;
    f.expired_at_observation = observation > rec.not_after;
    return f;
}

// ---------------------------------------------------------------------------
// Self-signed certificate generation (mock fixtures and the scanner's own
// client certificate)
// ---------------------------------------------------------------------------

struct SelfSignedSpec {
    int key_bits = 2048;
    HashAlgorithm hash = HashAlgorithm::SHA256;
    std::string common_name = "uascan";
    std::string organization;
    std::vector<std::string> dns_names;
    std::vector<std::string> ip_addresses;
    std::string application_uri;    // becomes a URI subject-alt-name
    int64_t not_before = 1577836800;  // 2020-01-01
    int64_t not_after = 1893456000;   // 2030-01-01
    /// Reuse one process-wide key per bit length. Key generation dominates
    /// fixture startup; certificates stay distinct via serial and names.
    bool reuse_cached_key = true;
};

namespace detail {

inline EVP_PKEY* cached_rsa_key(int bits) {
    static std::mutex mu;
    static std::map<int, EVP_PKEY*> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(bits);
    if (it != cache.end()) return it->second;
    EVP_PKEY* key = EVP_RSA_gen(static_cast<unsigned int>(bits));
    if (!key) throw CertError(errc::malformed_certificate, "RSA key generation failed");
    cache.emplace(bits, key);
    return key;
}

inline const EVP_MD* md_for(HashAlgorithm h) {
    switch (h) {
    case HashAlgorithm::MD5: return EVP_md5();
    case HashAlgorithm::SHA1: return EVP_sha1();
    case HashAlgorithm::SHA256: return EVP_sha256();
    case HashAlgorithm::SHA384: return EVP_sha384();
    case HashAlgorithm::SHA512: return EVP_sha512();
    case HashAlgorithm::Other: break;
    }
    throw CertError(errc::malformed_certificate, "no signing digest for Other");
}

}  // namespace detail

/// Generates a self-signed certificate and returns its DER encoding.
inline Bytes generate_self_signed(const SelfSignedSpec& spec) {
    detail::PKeyPtr owned;
    EVP_PKEY* key = nullptr;
    if (spec.reuse_cached_key) {
        key = detail::cached_rsa_key(spec.key_bits);
    } else {
        owned.reset(EVP_RSA_gen(static_cast<unsigned int>(spec.key_bits)));
        if (!owned) throw CertError(errc::malformed_certificate, "RSA key generation failed");
        key = owned.get();
    }

    detail::X509Ptr x(X509_new());
    if (!x) throw CertError(errc::malformed_certificate, "X509_new failed");
    X509_set_version(x.get(), 2);

    static std::atomic<long> serial_counter{1};
    ASN1_INTEGER_set(X509_get_serialNumber(x.get()),
                     serial_counter.fetch_add(1, std::memory_order_relaxed));

    X509_NAME* name = X509_get_subject_name(x.get());
    X509_NAME_add_entry_by_txt(name, "CN", MBSTRING_ASC,
                               reinterpret_cast<const unsigned char*>(spec.common_name.c_str()),
                               -1, -1, 0);
    if (!spec.organization.empty())
        X509_NAME_add_entry_by_txt(
            name, "O", MBSTRING_ASC,
            reinterpret_cast<const unsigned char*>(spec.organization.c_str()), -1, -1, 0);
    X509_set_issuer_name(x.get(), name);

    ASN1_TIME* t = ASN1_TIME_new();
    ASN1_TIME_set(t, static_cast<time_t>(spec.not_before));
    X509_set1_notBefore(x.get(), t);
    ASN1_TIME_set(t, static_cast<time_t>(spec.not_after));
    X509_set1_notAfter(x.get(), t);
    ASN1_TIME_free(t);

    X509_set_pubkey(x.get(), key);

    std::string san;
    for (const auto& d : spec.dns_names) san += (san.empty() ? "" : ",") + ("DNS:" + d);
    for (const auto& ip : spec.ip_addresses) san += (san.empty() ? "" : ",") + ("IP:" + ip);
    if (!spec.application_uri.empty())
        san += (san.empty() ? "" : ",") + ("URI:" + spec.application_uri);
    if (!san.empty()) {
        X509V3_CTX ctx;
        X509V3_set_ctx(&ctx, x.get(), x.get(), nullptr, nullptr, 0);
        X509_EXTENSION* ext =
            X509V3_EXT_conf_nid(nullptr, &ctx, NID_subject_alt_name, san.c_str());
        if (!ext) throw CertError(errc::malformed_certificate, "bad subject alt name");
        X509_add_ext(x.get(), ext, -1);
        X509_EXTENSION_free(ext);
    }

    if (X509_sign(x.get(), key, detail::md_for(spec.hash)) == 0)
        throw CertError(errc::malformed_certificate, "certificate signing failed");

    int len = i2d_X509(x.get(), nullptr);
    if (len <= 0) throw CertError(errc::malformed_certificate, "DER encode failed");
    Bytes der(static_cast<size_t>(len));
    unsigned char* out = der.data();
    i2d_X509(x.get(), &out);
    return der;
}

}  // namespace uascan::cert
