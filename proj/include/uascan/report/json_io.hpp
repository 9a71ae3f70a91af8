#pragma once

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "uascan/assess/assessment.hpp"
#include "uascan/cert/certificate.hpp"
#include "uascan/client/result.hpp"
#include "uascan/errors.hpp"
#include "uascan/net/url.hpp"
#include "uascan/policy.hpp"
#include "uascan/wire/types.hpp"

namespace uascan::report {

using json = nlohmann::ordered_json;

/// Bumped whenever a serialized field changes meaning; readers refuse
/// versions they do not know.
constexpr int kSchemaVersion = 1;

struct SnapshotRecord {
    client::ProbeResult probe;
    assess::HostAssessment assessment;
    /// Parsed server-certificate facts; DER stays in probe.server_certificate
    /// (certificate.der is always empty here). Anonymization blackens these
    /// fields and drops the DER.
    std::optional<cert::CertificateRecord> certificate;

    bool operator==(const SnapshotRecord&) const = default;
};

/// Builds a record, deriving certificate facts from the probe's DER.
/// Unparseable certificates leave the facts empty; the raw bytes remain.
inline SnapshotRecord make_record(client::ProbeResult probe, assess::HostAssessment assessment) {
    SnapshotRecord r{std::move(probe), std::move(assessment), std::nullopt};
    if (r.probe.server_certificate && !r.probe.server_certificate->empty()) {
        try {
            auto rec = cert::parse_certificate(*r.probe.server_certificate);
            rec.der.clear();
            r.certificate = std::move(rec);
        } catch (const CertError&) {
            // facts stay empty; the assessment already carries a note
        }
    }
    return r;
}

/// One campaign's output: a labelled, append-friendly list of per-target
/// records (one record per target).
struct Snapshot {
    std::string snapshot_id;
    bool anonymized = false;
    std::vector<SnapshotRecord> records;

    bool operator==(const Snapshot&) const = default;
};

// ---------------------------------------------------------------------------
// Primitive helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::string b64_encode(BytesView data) {
    if (data.empty()) return {};
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(),
                            static_cast<int>(data.size()));
    out.resize(static_cast<size_t>(n));
    return out;
}

inline Bytes b64_decode(std::string_view text) {
    if (text.empty()) return {};
    if (text.size() % 4 != 0)
        throw Error(errc::malformed_snapshot, "base64 field has invalid length");
    Bytes out(3 * text.size() / 4);
    int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                            static_cast<int>(text.size()));
    if (n < 0) throw Error(errc::malformed_snapshot, "base64 field does not decode");
    size_t pad = 0;
    while (pad < 2 && pad < text.size() && text[text.size() - 1 - pad] == '=') ++pad;
    out.resize(static_cast<size_t>(n) - pad);
    return out;
}

inline json from_ua(const wire::UaString& s) {
    return s.null ? json(nullptr) : json(s.value);
}
inline wire::UaString to_ua(const json& j) {
    return j.is_null() ? wire::UaString::null_string() : wire::UaString(j.get<std::string>());
}

inline json from_ua(const wire::UaBytes& b) {
    return b.null ? json(nullptr) : json(b64_encode(b.value));
}
inline wire::UaBytes to_ua_bytes(const json& j) {
    if (j.is_null()) return {};
    wire::UaBytes b;
    b.value = b64_decode(j.get<std::string>());
    b.null = false;
    return b;
}

template <typename Enum>
Enum enum_from_name(const json& j, std::initializer_list<std::pair<const char*, Enum>> table,
                    const char* what) {
    const auto name = j.get<std::string>();
    for (const auto& [text, value] : table)
        if (name == text) return value;
    throw Error(errc::malformed_snapshot, std::string("unknown ") + what + ": " + name);
}

inline wire::SecurityMode mode_from_name(const json& j) {
    return enum_from_name<wire::SecurityMode>(j,
                                              {{"Invalid", wire::SecurityMode::Invalid},
                                               {"None", wire::SecurityMode::None},
                                               {"Sign", wire::SecurityMode::Sign},
                                               {"SignAndEncrypt", wire::SecurityMode::SignAndEncrypt}},
                                              "security mode");
}

inline wire::UserTokenType token_from_name(const json& j) {
    return enum_from_name<wire::UserTokenType>(j,
                                               {{"anonymous", wire::UserTokenType::Anonymous},
                                                {"username", wire::UserTokenType::Username},
                                                {"certificate", wire::UserTokenType::Certificate},
                                                {"issued_token", wire::UserTokenType::IssuedToken}},
                                               "user token type");
}

inline wire::NodeClass class_from_name(const json& j) {
    return enum_from_name<wire::NodeClass>(j,
                                           {{"Object", wire::NodeClass::Object},
                                            {"Variable", wire::NodeClass::Variable},
                                            {"Method", wire::NodeClass::Method},
                                            {"Other", wire::NodeClass::Other}},
                                           "node class");
}

inline client::ChannelProbe channel_probe_from_name(const json& j) {
    using P = client::ChannelProbe;
    return enum_from_name<P>(j,
                             {{"NotAttempted", P::NotAttempted},
                              {"Accepted", P::Accepted},
                              {"CertificateRejected", P::CertificateRejected},
                              {"Error", P::Error}},
                             "channel probe");
}

inline client::SessionProbe session_probe_from_name(const json& j) {
    using P = client::SessionProbe;
    return enum_from_name<P>(j,
                             {{"NotAttempted", P::NotAttempted},
                              {"AnonymousAccepted", P::AnonymousAccepted},
                              {"AuthenticationRejected", P::AuthenticationRejected},
                              {"SecureChannelRejected", P::SecureChannelRejected},
                              {"InvalidConfiguration", P::InvalidConfiguration}},
                             "session probe");
}

inline HashAlgorithm hash_from_name(const json& j) {
    return enum_from_name<HashAlgorithm>(j,
                                         {{"MD5", HashAlgorithm::MD5},
                                          {"SHA1", HashAlgorithm::SHA1},
                                          {"SHA256", HashAlgorithm::SHA256},
                                          {"SHA384", HashAlgorithm::SHA384},
                                          {"SHA512", HashAlgorithm::SHA512},
                                          {"Other", HashAlgorithm::Other}},
                                         "hash algorithm");
}

inline cert::KeyAlgorithm key_algorithm_from_name(const json& j) {
    return enum_from_name<cert::KeyAlgorithm>(
        j, {{"RSA", cert::KeyAlgorithm::RSA}, {"Other", cert::KeyAlgorithm::Other}},
        "key algorithm");
}

inline PolicyId policy_id_from_name(const json& j) {
    const auto name = j.get<std::string>();
    if (auto id = policy_from_name(name)) return *id;
    if (name == "Unknown") return PolicyId::Unknown;
    throw Error(errc::malformed_snapshot, "unknown security policy: " + name);
}

inline assess::Role role_from_name(const json& j) {
    return enum_from_name<assess::Role>(j,
                                        {{"FullServer", assess::Role::FullServer},
                                         {"DiscoveryServer", assess::Role::DiscoveryServer}},
                                        "role");
}

inline assess::SystemClass system_class_from_name(const json& j) {
    using C = assess::SystemClass;
    return enum_from_name<C>(
        j, {{"Production", C::Production}, {"Test", C::Test}, {"Unclassified", C::Unclassified}},
        "system class");
}

inline net::Target target_from_json(const json& j) {
    auto target = net::parse_target(j.get<std::string>());
    if (!target) throw Error(errc::malformed_snapshot, "bad target: " + j.get<std::string>());
    return *target;
}

inline wire::NodeId node_id_from_json(const json& j) {
    auto id = wire::NodeId::parse(j.get<std::string>());
    if (!id) throw Error(errc::malformed_snapshot, "bad node id: " + j.get<std::string>());
    return *id;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Endpoint and address-space conversion
// ---------------------------------------------------------------------------

inline json endpoint_to_json(const wire::EndpointDescription& ep) {
    json server{{"application_uri", detail::from_ua(ep.server.application_uri)},
                {"product_uri", detail::from_ua(ep.server.product_uri)},
                {"application_name",
                 json{{"locale", detail::from_ua(ep.server.application_name.locale)},
                      {"text", detail::from_ua(ep.server.application_name.text)}}},
                {"application_type", ep.server.application_type},
                {"gateway_server_uri", detail::from_ua(ep.server.gateway_server_uri)},
                {"discovery_profile_uri", detail::from_ua(ep.server.discovery_profile_uri)}};
    json urls = json::array();
    for (const auto& u : ep.server.discovery_urls) urls.push_back(detail::from_ua(u));
    server["discovery_urls"] = std::move(urls);

    json tokens = json::array();
    for (const auto& tp : ep.user_token_policies)
        tokens.push_back(json{{"policy_id", detail::from_ua(tp.policy_id)},
                              {"token_type", wire::to_string(tp.token_type)},
                              {"issued_token_type", detail::from_ua(tp.issued_token_type)},
                              {"issuer_endpoint_url", detail::from_ua(tp.issuer_endpoint_url)},
                              {"security_policy_uri", detail::from_ua(tp.security_policy_uri)}});

    return json{{"endpoint_url", detail::from_ua(ep.endpoint_url)},
                {"server", std::move(server)},
                {"server_certificate", detail::from_ua(ep.server_certificate)},
                {"security_mode", wire::to_string(ep.security_mode)},
                {"security_policy_uri", detail::from_ua(ep.security_policy_uri)},
                {"user_token_policies", std::move(tokens)},
                {"transport_profile_uri", detail::from_ua(ep.transport_profile_uri)},
                {"security_level", ep.security_level}};
}

inline wire::EndpointDescription endpoint_from_json(const json& j) {
    wire::EndpointDescription ep;
    ep.endpoint_url = detail::to_ua(j.at("endpoint_url"));
    const json& server = j.at("server");
    ep.server.application_uri = detail::to_ua(server.at("application_uri"));
    ep.server.product_uri = detail::to_ua(server.at("product_uri"));
    ep.server.application_name.locale = detail::to_ua(server.at("application_name").at("locale"));
    ep.server.application_name.text = detail::to_ua(server.at("application_name").at("text"));
    ep.server.application_type = server.at("application_type").get<uint32_t>();
    ep.server.gateway_server_uri = detail::to_ua(server.at("gateway_server_uri"));
    ep.server.discovery_profile_uri = detail::to_ua(server.at("discovery_profile_uri"));
    for (const auto& u : server.at("discovery_urls")) ep.server.discovery_urls.push_back(detail::to_ua(u));
    ep.server_certificate = detail::to_ua_bytes(j.at("server_certificate"));
    ep.security_mode = detail::mode_from_name(j.at("security_mode"));
    ep.security_policy_uri = detail::to_ua(j.at("security_policy_uri"));
    for (const auto& t : j.at("user_token_policies")) {
        wire::UserTokenPolicy tp;
        tp.policy_id = detail::to_ua(t.at("policy_id"));
        tp.token_type = detail::token_from_name(t.at("token_type"));
        tp.issued_token_type = detail::to_ua(t.at("issued_token_type"));
        tp.issuer_endpoint_url = detail::to_ua(t.at("issuer_endpoint_url"));
        tp.security_policy_uri = detail::to_ua(t.at("security_policy_uri"));
        ep.user_token_policies.push_back(std::move(tp));
    }
    ep.transport_profile_uri = detail::to_ua(j.at("transport_profile_uri"));
    ep.security_level = j.at("security_level").get<uint8_t>();
    return ep;
}

inline json address_space_to_json(const client::AddressSpaceSnapshot& snap) {
    json nodes = json::array();
    for (const auto& [id, rec] : snap.nodes) {
        json n{{"id", id.to_string()},
               {"browse_name", rec.browse_name},
               {"node_class", wire::to_string(rec.node_class)},
               {"namespace_index", rec.namespace_index}};
        if (rec.access_level) n["access_level"] = *rec.access_level;
        if (rec.executable) n["executable"] = *rec.executable;
        nodes.push_back(std::move(n));
    }
    return json{{"truncated", snap.truncated},
                {"namespace_array", snap.namespace_array},
                {"nodes", std::move(nodes)}};
}

inline client::AddressSpaceSnapshot address_space_from_json(const json& j) {
    client::AddressSpaceSnapshot snap;
    snap.truncated = j.at("truncated").get<bool>();
    snap.namespace_array = j.at("namespace_array").get<std::vector<std::string>>();
    for (const auto& n : j.at("nodes")) {
        wire::NodeRecord rec;
        rec.node_id = detail::node_id_from_json(n.at("id"));
        rec.browse_name = n.at("browse_name").get<std::string>();
        rec.node_class = detail::class_from_name(n.at("node_class"));
        rec.namespace_index = n.at("namespace_index").get<uint16_t>();
        if (n.contains("access_level")) rec.access_level = n.at("access_level").get<uint8_t>();
        if (n.contains("executable")) rec.executable = n.at("executable").get<bool>();
        snap.nodes.emplace(rec.node_id, std::move(rec));
    }
    return snap;
}

// ---------------------------------------------------------------------------
// Probe and assessment conversion
// ---------------------------------------------------------------------------

inline json probe_to_json(const client::ProbeResult& p) {
    json j{{"target", p.target.to_string()},
           {"reached", p.reached},
           {"error", p.error},
           {"channel_probe", client::to_string(p.channel_probe)},
           {"channel_status", p.channel_status},
           {"session_probe", client::to_string(p.session_probe)},
           {"session_status", p.session_status},
           {"bytes_sent", p.bytes_sent},
           {"bytes_received", p.bytes_received},
           {"duration_ms", p.duration.count()},
           {"observed_at", p.observed_at}};
    json eps = json::array();
    for (const auto& ep : p.endpoints) eps.push_back(endpoint_to_json(ep));
    j["endpoints"] = std::move(eps);
    if (p.server_certificate) j["server_certificate"] = detail::b64_encode(*p.server_certificate);
    if (p.application_uri) j["application_uri"] = *p.application_uri;
    if (p.product_uri) j["product_uri"] = *p.product_uri;
    if (p.software_version) j["software_version"] = *p.software_version;
    if (p.address_space) j["address_space"] = address_space_to_json(*p.address_space);
    return j;
}

inline client::ProbeResult probe_from_json(const json& j) {
    client::ProbeResult p;
    p.target = detail::target_from_json(j.at("target"));
    p.reached = j.at("reached").get<bool>();
    p.error = j.at("error").get<std::string>();
    for (const auto& e : j.at("endpoints")) p.endpoints.push_back(endpoint_from_json(e));
    if (j.contains("server_certificate"))
        p.server_certificate = detail::b64_decode(j.at("server_certificate").get<std::string>());
    p.channel_probe = detail::channel_probe_from_name(j.at("channel_probe"));
    p.channel_status = j.at("channel_status").get<uint32_t>();
    p.session_probe = detail::session_probe_from_name(j.at("session_probe"));
    p.session_status = j.at("session_status").get<uint32_t>();
    if (j.contains("application_uri")) p.application_uri = j.at("application_uri").get<std::string>();
    if (j.contains("product_uri")) p.product_uri = j.at("product_uri").get<std::string>();
    if (j.contains("software_version"))
        p.software_version = j.at("software_version").get<std::string>();
    if (j.contains("address_space")) p.address_space = address_space_from_json(j.at("address_space"));
    p.bytes_sent = j.at("bytes_sent").get<uint64_t>();
    p.bytes_received = j.at("bytes_received").get<uint64_t>();
    p.duration = std::chrono::milliseconds(j.at("duration_ms").get<int64_t>());
    p.observed_at = j.at("observed_at").get<int64_t>();
    return p;
}

inline json assessment_to_json(const assess::HostAssessment& a) {
    json j{{"target", a.target.to_string()},
           {"reached", a.reached},
           {"role", assess::to_string(a.role)},
           {"has_endpoints", a.has_endpoints},
           {"security",
            json{{"least_mode", wire::to_string(a.security.least_mode)},
                 {"most_mode", wire::to_string(a.security.most_mode)},
                 {"least_policy", policy_name(a.security.least_policy)},
                 {"most_policy", policy_name(a.security.most_policy)}}},
           {"auth_tokens", a.auth_tokens},
           {"auth_tokens_label", assess::auth_to_string(a.auth_tokens)},
           {"system_class", assess::to_string(a.system_class)},
           {"session_outcome", client::to_string(a.session_outcome)},
           {"notes", a.notes}};
    json modes = json::array();
    for (auto m : a.offered_modes) modes.push_back(wire::to_string(m));
    j["offered_modes"] = std::move(modes);
    json policies = json::array();
    for (auto p : a.offered_policies) policies.push_back(policy_name(p));
    j["offered_policies"] = std::move(policies);
    json findings = json::array();
    for (const auto& f : a.findings)
        findings.push_back(json{{"kind", assess::to_string(f.kind)}, {"evidence", f.evidence}});
    j["findings"] = std::move(findings);
    if (a.access) {
        json access{{"node_count", a.access->node_count},
                    {"variable_count", a.access->variable_count},
                    {"method_count", a.access->method_count},
                    {"lower_bound", a.access->lower_bound}};
        if (a.access->readable_fraction) access["readable_fraction"] = *a.access->readable_fraction;
        if (a.access->writable_fraction) access["writable_fraction"] = *a.access->writable_fraction;
        if (a.access->executable_fraction)
            access["executable_fraction"] = *a.access->executable_fraction;
        j["access"] = std::move(access);
    }
    if (a.manufacturer) j["manufacturer"] = *a.manufacturer;
    if (a.as_label) j["as_label"] = *a.as_label;
    return j;
}

inline assess::HostAssessment assessment_from_json(const json& j) {
    assess::HostAssessment a;
    a.target = detail::target_from_json(j.at("target"));
    a.reached = j.at("reached").get<bool>();
    a.role = detail::role_from_name(j.at("role"));
    a.has_endpoints = j.at("has_endpoints").get<bool>();
    const json& sec = j.at("security");
    a.security.least_mode = detail::mode_from_name(sec.at("least_mode"));
    a.security.most_mode = detail::mode_from_name(sec.at("most_mode"));
    a.security.least_policy = detail::policy_id_from_name(sec.at("least_policy"));
    a.security.most_policy = detail::policy_id_from_name(sec.at("most_policy"));
    for (const auto& m : j.at("offered_modes")) a.offered_modes.push_back(detail::mode_from_name(m));
    for (const auto& p : j.at("offered_policies"))
        a.offered_policies.push_back(detail::policy_id_from_name(p));
    a.auth_tokens = j.at("auth_tokens").get<uint8_t>();
    for (const auto& f : j.at("findings")) {
        auto kind = assess::deficit_from_string(f.at("kind").get<std::string>());
        if (!kind)
            throw Error(errc::malformed_snapshot,
                        "unknown finding kind: " + f.at("kind").get<std::string>());
        a.findings.push_back({*kind, f.at("evidence").get<std::string>()});
    }
    a.system_class = detail::system_class_from_name(j.at("system_class"));
    if (j.contains("access")) {
        assess::AccessSummary s;
        const json& access = j.at("access");
        s.node_count = access.at("node_count").get<uint32_t>();
        s.variable_count = access.at("variable_count").get<uint32_t>();
        s.method_count = access.at("method_count").get<uint32_t>();
        s.lower_bound = access.at("lower_bound").get<bool>();
        if (access.contains("readable_fraction"))
            s.readable_fraction = access.at("readable_fraction").get<double>();
        if (access.contains("writable_fraction"))
            s.writable_fraction = access.at("writable_fraction").get<double>();
        if (access.contains("executable_fraction"))
            s.executable_fraction = access.at("executable_fraction").get<double>();
        a.access = s;
    }
    if (j.contains("manufacturer")) a.manufacturer = j.at("manufacturer").get<std::string>();
    if (j.contains("as_label")) a.as_label = j.at("as_label").get<std::string>();
    a.session_outcome = detail::session_probe_from_name(j.at("session_outcome"));
    a.notes = j.at("notes").get<std::vector<std::string>>();
    return a;
}

inline json certificate_to_json(const cert::CertificateRecord& c) {
    return json{{"fingerprint", c.fingerprint},
                {"signature_hash", to_string(c.signature_hash)},
                {"key_algorithm", cert::to_string(c.key_algorithm)},
                {"key_length_bits", c.key_length_bits},
                {"modulus_hex", c.modulus_hex},
                {"subject", c.subject},
                {"issuer", c.issuer},
                {"common_name", c.common_name},
                {"subject_alt_names", c.subject_alt_names},
                {"self_signed", c.self_signed},
                {"not_before", c.not_before},
                {"not_after", c.not_after}};
}

inline cert::CertificateRecord certificate_from_json(const json& j) {
    cert::CertificateRecord c;
    c.fingerprint = j.at("fingerprint").get<std::string>();
    c.signature_hash = detail::hash_from_name(j.at("signature_hash"));
    c.key_algorithm = detail::key_algorithm_from_name(j.at("key_algorithm"));
    c.key_length_bits = j.at("key_length_bits").get<int>();
    c.modulus_hex = j.at("modulus_hex").get<std::string>();
    c.subject = j.at("subject").get<std::string>();
    c.issuer = j.at("issuer").get<std::string>();
    c.common_name = j.at("common_name").get<std::string>();
    c.subject_alt_names = j.at("subject_alt_names").get<std::vector<std::string>>();
    c.self_signed = j.at("self_signed").get<bool>();
    c.not_before = j.at("not_before").get<int64_t>();
    c.not_after = j.at("not_after").get<int64_t>();
    return c;
}

inline json record_to_json(const SnapshotRecord& r) {
    json j{{"probe", probe_to_json(r.probe)}, {"assessment", assessment_to_json(r.assessment)}};
    if (r.certificate) j["certificate"] = certificate_to_json(*r.certificate);
    return j;
}

inline SnapshotRecord record_from_json(const json& j) {
    SnapshotRecord r{probe_from_json(j.at("probe")), assessment_from_json(j.at("assessment")),
                     std::nullopt};
    if (j.contains("certificate")) r.certificate = certificate_from_json(j.at("certificate"));
    return r;
}

// ---------------------------------------------------------------------------
// JSON Lines persistence
//
// Line 1 is a meta object carrying the schema version; every further line is
// one record. Appending a record never rewrites earlier lines, so a killed
// campaign leaves a readable prefix.
// ---------------------------------------------------------------------------

inline void write_snapshot(const Snapshot& snap, std::ostream& out) {
    out << json{{"schema_version", kSchemaVersion},
                {"snapshot_id", snap.snapshot_id},
                {"anonymized", snap.anonymized}}
               .dump()
        << '\n';
    for (const auto& r : snap.records) out << record_to_json(r).dump() << '\n';
}

inline void write_snapshot(const Snapshot& snap, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(errc::io_error, "cannot write " + path);
    write_snapshot(snap, out);
}

inline Snapshot read_snapshot(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw Error(errc::malformed_snapshot, "snapshot file is empty");
    Snapshot snap;
    try {
        json meta = json::parse(line);
        const int version = meta.at("schema_version").get<int>();
        if (version != kSchemaVersion)
            throw Error(errc::malformed_snapshot,
                        "unsupported schema version " + std::to_string(version));
        snap.snapshot_id = meta.at("snapshot_id").get<std::string>();
        snap.anonymized = meta.value("anonymized", false);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            snap.records.push_back(record_from_json(json::parse(line)));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::malformed_snapshot, std::string("snapshot parse: ") + e.what());
    }
    return snap;
}

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, "cannot read " + path);
    return read_snapshot(in);
}

/// Streaming writer used by campaigns: the meta line goes out at open, each
/// record is flushed as it completes.
class SnapshotWriter {
public:
    SnapshotWriter(const std::string& path, std::string snapshot_id, bool anonymized = false)
        : out_(path, std::ios::trunc) {
        if (!out_) throw Error(errc::io_error, "cannot write " + path);
        out_ << json{{"schema_version", kSchemaVersion},
                     {"snapshot_id", std::move(snapshot_id)},
                     {"anonymized", anonymized}}
                    .dump()
             << '\n';
        out_.flush();
    }

    void append(const SnapshotRecord& r) {
        out_ << record_to_json(r).dump() << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

}  // namespace uascan::report
