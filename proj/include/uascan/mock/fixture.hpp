#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "uascan/cert/certificate.hpp"
#include "uascan/errors.hpp"
#include "uascan/net/url.hpp"
#include "uascan/policy.hpp"
#include "uascan/wire/types.hpp"

namespace uascan::mock {

// ---------------------------------------------------------------------------
// Fixture configuration
//
// A fixture is a deterministic server: given the same config and the same
// request sequence it produces byte-identical responses (timestamps are
// frozen, nonces are zero). Everything observable by a scanner — endpoint
// list, certificate, identity-token behavior, address space — comes from
// this struct.
// ---------------------------------------------------------------------------

struct MockEndpoint {
    wire::SecurityMode mode = wire::SecurityMode::None;
    PolicyId policy = PolicyId::None;
    /// Advertised verbatim when non-empty; lets a fixture expose a policy
    /// URI outside the registry.
    std::string policy_uri_override;
    std::vector<wire::UserTokenType> tokens{wire::UserTokenType::Anonymous};

    std::string advertised_policy_uri() const {
        return policy_uri_override.empty() ? policy_uri(policy) : policy_uri_override;
    }
};

struct MockNodeSpec {
    wire::NodeId id;
    std::string browse_name;
    wire::NodeClass node_class = wire::NodeClass::Object;
    uint8_t access_level = wire::access_level::CurrentRead;  // variables only
    bool executable = false;                                 // methods only
    std::optional<wire::NodeId> parent;  // default: the Objects folder (i=85)
};

/// What happens to an anonymous session. FaultOnActivate and FaultOnCreate
/// model servers that advertise anonymous access but abort with an internal
/// fault — a misconfigured endpoint rather than a deliberate rejection.
enum class AnonBehavior { Accept, FaultOnActivate, FaultOnCreate };

struct FixtureConfig {
    std::string application_uri = "urn:uascan:mock";
    std::string product_uri = "urn:uascan:mock:product";
    std::string application_name = "uascan mock server";
    std::string software_version = "1.0.0";
    std::vector<std::string> namespaces;  // appended after the standard entry

    std::vector<MockEndpoint> endpoints;

    /// Instance certificate: explicit DER wins, then the generation spec;
    /// with neither, a default is generated iff any endpoint is secured.
    std::optional<Bytes> certificate_der;
    std::optional<cert::SelfSignedSpec> certificate_spec;
    /// When false, any OPN carrying a client certificate is answered with an
    /// ERR (certificate rejected) instead of a channel.
    bool accept_client_cert = true;

    AnonBehavior anonymous_session = AnonBehavior::Accept;

    /// Per-chunk cap on response bodies; 0 means the client's announced
    /// receive buffer. Small values force multi-chunk responses.
    uint32_t response_chunk_limit = 0;

    /// Foreign endpoint URLs. When non-empty the fixture advertises one
    /// endpoint per URL (cycling through `endpoints` for the security
    /// settings) — the shape of a discovery server that only refers
    /// elsewhere.
    std::vector<std::string> referral_endpoints;

    std::vector<MockNodeSpec> nodes;
    /// Extra parent→child reference pairs; may form cycles.
    std::vector<std::pair<wire::NodeId, wire::NodeId>> extra_references;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Standard skeleton
//
// Every fixture exposes the minimal namespace-0 hierarchy a client expects:
//
//   Root (i=84) ── Objects (i=85) ── Server (i=2253) ── NamespaceArray (i=2255)
//               ├─ Types (i=86)                      └─ SoftwareVersion (i=2264)
//               └─ Views (i=87)
//
// Seven nodes; the two leaves are readable variables. Configured nodes hang
// under Objects unless they name another parent.
// ---------------------------------------------------------------------------

namespace skeleton {
constexpr uint32_t Root = 84;
constexpr uint32_t Objects = 85;
constexpr uint32_t Types = 86;
constexpr uint32_t Views = 87;
constexpr uint32_t Server = 2253;
constexpr uint32_t NamespaceArray = 2255;
constexpr uint32_t SoftwareVersion = 2264;
constexpr size_t kNodeCount = 7;
}  // namespace skeleton

inline bool is_skeleton_id(const wire::NodeId& id) {
    if (!id.is_numeric() || id.namespace_index != 0) return false;
    switch (id.numeric_value()) {
    case skeleton::Root:
    case skeleton::Objects:
    case skeleton::Types:
    case skeleton::Views:
    case skeleton::Server:
    case skeleton::NamespaceArray:
    case skeleton::SoftwareVersion: return true;
    default: return false;
    }
}

inline void FixtureConfig::validate() const {
    auto fail = [](const std::string& why) { throw Error(errc::invalid_config, why); };
    if (endpoints.empty()) fail("fixture needs at least one endpoint");
    if (response_chunk_limit != 0 && response_chunk_limit < 1024)
        fail("response_chunk_limit below 1024 cannot fit chunk headers");
    for (const auto& url : referral_endpoints) {
        try {
            net::parse_opc_url(url);
        } catch (const Error&) {
            fail("referral endpoint is not an opc.tcp URL: " + url);
        }
    }

    std::set<wire::NodeId> ids;
    for (const auto& n : nodes) {
        if (is_skeleton_id(n.id)) fail("node collides with the standard skeleton");
        if (!ids.insert(n.id).second) fail("duplicate node id in fixture");
        if (n.browse_name.empty()) fail("node needs a browse name");
    }
    auto resolvable = [&](const wire::NodeId& id) {
        return is_skeleton_id(id) || ids.count(id) != 0;
    };
    for (const auto& n : nodes)
        if (n.parent && !resolvable(*n.parent)) fail("node parent does not exist");
    for (const auto& [from, to] : extra_references)
        if (!resolvable(from) || !resolvable(to))
            fail("extra reference names a node that does not exist");
}

// ---------------------------------------------------------------------------
// JSON form
//
// {
//   "application_uri": "urn:demo:plc",
//   "software_version": "3.1.0",
//   "namespaces": ["urn:demo:app"],
//   "endpoints": [{"mode": "None", "policy": "None", "tokens": ["anonymous"]}],
//   "certificate": {"key_bits": 2048, "hash": "SHA256", "common_name": "plc"},
//   "accept_client_cert": true,
//   "anonymous_session": "accept",
//   "nodes": [{"id": "ns=2;i=100", "name": "Pump", "class": "object"},
//             {"id": "ns=2;i=101", "name": "Rate", "class": "variable",
//              "access": 3, "parent": "ns=2;i=100"}],
//   "extra_references": [["ns=2;i=101", "ns=2;i=100"]]
// }
// ---------------------------------------------------------------------------

namespace detail {

inline wire::SecurityMode mode_from_text(const std::string& s) {
    if (s == "None") return wire::SecurityMode::None;
    if (s == "Sign") return wire::SecurityMode::Sign;
    if (s == "SignAndEncrypt") return wire::SecurityMode::SignAndEncrypt;
    throw Error(errc::invalid_config, "unknown security mode: " + s);
}

inline wire::UserTokenType token_from_text(const std::string& s) {
    if (s == "anonymous") return wire::UserTokenType::Anonymous;
    if (s == "username") return wire::UserTokenType::Username;
    if (s == "certificate") return wire::UserTokenType::Certificate;
    if (s == "issued_token") return wire::UserTokenType::IssuedToken;
    throw Error(errc::invalid_config, "unknown user token type: " + s);
}

inline wire::NodeClass class_from_text(const std::string& s) {
    if (s == "object") return wire::NodeClass::Object;
    if (s == "variable") return wire::NodeClass::Variable;
    if (s == "method") return wire::NodeClass::Method;
    if (s == "other") return wire::NodeClass::Other;
    throw Error(errc::invalid_config, "unknown node class: " + s);
}

inline HashAlgorithm hash_from_text(const std::string& s) {
    if (s == "MD5") return HashAlgorithm::MD5;
    if (s == "SHA1") return HashAlgorithm::SHA1;
    if (s == "SHA256") return HashAlgorithm::SHA256;
    if (s == "SHA384") return HashAlgorithm::SHA384;
    if (s == "SHA512") return HashAlgorithm::SHA512;
    throw Error(errc::invalid_config, "unknown hash algorithm: " + s);
}

inline AnonBehavior anon_from_text(const std::string& s) {
    if (s == "accept") return AnonBehavior::Accept;
    if (s == "fault_on_activate") return AnonBehavior::FaultOnActivate;
    if (s == "fault_on_create") return AnonBehavior::FaultOnCreate;
    throw Error(errc::invalid_config, "unknown anonymous_session behavior: " + s);
}

}  // namespace detail

/// Parses "i=84", "ns=2;i=100", or "ns=1;s=Pump"; throws on anything else.
inline wire::NodeId parse_node_ref(const std::string& text) {
    auto id = wire::NodeId::parse(text);
    if (!id) throw Error(errc::invalid_config, "bad node reference: " + text);
    return *id;
}

inline FixtureConfig config_from_json(const nlohmann::json& j) {
    try {
        FixtureConfig cfg;
        cfg.application_uri = j.value("application_uri", cfg.application_uri);
        cfg.product_uri = j.value("product_uri", cfg.product_uri);
        cfg.application_name = j.value("application_name", cfg.application_name);
        cfg.software_version = j.value("software_version", cfg.software_version);
        cfg.namespaces = j.value("namespaces", std::vector<std::string>{});

        for (const auto& je : j.at("endpoints")) {
            MockEndpoint e;
            e.mode = detail::mode_from_text(je.value("mode", "None"));
            std::string policy = je.value("policy", "None");
            auto id = policy_from_name(policy);
            if (!id) throw Error(errc::invalid_config, "unknown security policy: " + policy);
            e.policy = *id;
            e.policy_uri_override = je.value("policy_uri", "");
            if (je.contains("tokens")) {
                e.tokens.clear();
                for (const auto& t : je.at("tokens"))
                    e.tokens.push_back(detail::token_from_text(t.get<std::string>()));
            }
            cfg.endpoints.push_back(std::move(e));
        }

        if (j.contains("certificate")) {
            const auto& jc = j.at("certificate");
            cert::SelfSignedSpec spec;
            spec.key_bits = jc.value("key_bits", spec.key_bits);
            if (jc.contains("hash")) spec.hash = detail::hash_from_text(jc.at("hash"));
            spec.common_name = jc.value("common_name", spec.common_name);
            spec.organization = jc.value("organization", spec.organization);
            spec.dns_names = jc.value("dns_names", spec.dns_names);
            spec.ip_addresses = jc.value("ip_addresses", spec.ip_addresses);
            spec.application_uri = jc.value("application_uri", cfg.application_uri);
            spec.not_before = jc.value("not_before", spec.not_before);
            spec.not_after = jc.value("not_after", spec.not_after);
            cfg.certificate_spec = std::move(spec);
        }
        cfg.accept_client_cert = j.value("accept_client_cert", true);
        if (j.contains("anonymous_session"))
            cfg.anonymous_session = detail::anon_from_text(j.at("anonymous_session"));
        cfg.response_chunk_limit = j.value("response_chunk_limit", 0u);
        cfg.referral_endpoints = j.value("referral_endpoints", std::vector<std::string>{});

        for (const auto& jn : j.value("nodes", nlohmann::json::array())) {
            MockNodeSpec n;
            n.id = parse_node_ref(jn.at("id").get<std::string>());
            n.browse_name = jn.at("name").get<std::string>();
            n.node_class = detail::class_from_text(jn.value("class", "object"));
            n.access_level = static_cast<uint8_t>(jn.value("access", 1));
            n.executable = jn.value("executable", false);
            if (jn.contains("parent"))
                n.parent = parse_node_ref(jn.at("parent").get<std::string>());
            cfg.nodes.push_back(std::move(n));
        }
        for (const auto& jr : j.value("extra_references", nlohmann::json::array())) {
            if (!jr.is_array() || jr.size() != 2)
                throw Error(errc::invalid_config, "extra reference must be a [from, to] pair");
            cfg.extra_references.emplace_back(parse_node_ref(jr.at(0).get<std::string>()),
                                              parse_node_ref(jr.at(1).get<std::string>()));
        }

        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::invalid_config, e.what());
    }
}

inline FixtureConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::invalid_config, "cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::invalid_config, std::string(e.what()) + " in " + path);
    }
    return config_from_json(j);
}

}  // namespace uascan::mock
