#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uascan/assess/rules.hpp"
#include "uascan/cert/certificate.hpp"
#include "uascan/cert/conformance.hpp"
#include "uascan/cert/reuse.hpp"
#include "uascan/client/result.hpp"
#include "uascan/errors.hpp"
#include "uascan/policy.hpp"
#include "uascan/wire/types.hpp"

namespace uascan::assess {

// ---------------------------------------------------------------------------
// Verdict vocabulary
// ---------------------------------------------------------------------------

enum class Role : uint8_t {
    FullServer,       // serves (at least some of) its own endpoints
    DiscoveryServer,  // every advertised endpoint lives on another host/port
};

enum class SystemClass : uint8_t { Production, Test, Unclassified };

enum class DeficitKind : uint8_t {
    NoSecurityOnly,           // every endpoint is mode None
    DeprecatedMostSecure,     // strongest offered policy is deprecated
    DeprecatedOffered,        // some endpoint still carries a deprecated policy
    CertWeakerThanPolicy,     // certificate primitives below an offered policy
    CertStrongerThanPolicy,   // certificate primitives above an offered policy
    CertificateReuse,         // certificate shared by a confirmed host cluster
    AnonymousAccess,          // anonymous token advertised anywhere
    AnonymousDespiteSecurity, // anonymous advertised although every endpoint is secured
};

inline const char* to_string(Role r) {
    return r == Role::DiscoveryServer ? "DiscoveryServer" : "FullServer";
}

inline const char* to_string(SystemClass c) {
    switch (c) {
    case SystemClass::Production: return "Production";
    case SystemClass::Test: return "Test";
    case SystemClass::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

inline const char* to_string(DeficitKind k) {
    switch (k) {
    case DeficitKind::NoSecurityOnly: return "NoSecurityOnly";
    case DeficitKind::DeprecatedMostSecure: return "DeprecatedMostSecure";
    case DeficitKind::DeprecatedOffered: return "DeprecatedOffered";
    case DeficitKind::CertWeakerThanPolicy: return "CertWeakerThanPolicy";
    case DeficitKind::CertStrongerThanPolicy: return "CertStrongerThanPolicy";
    case DeficitKind::CertificateReuse: return "CertificateReuse";
    case DeficitKind::AnonymousAccess: return "AnonymousAccess";
    case DeficitKind::AnonymousDespiteSecurity: return "AnonymousDespiteSecurity";
    }
    return "?";
}

inline std::optional<DeficitKind> deficit_from_string(std::string_view s) {
    for (int i = 0; i <= static_cast<int>(DeficitKind::AnonymousDespiteSecurity); ++i) {
        auto k = static_cast<DeficitKind>(i);
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

/// A finding plus the evidence it was derived from, so the verdict can be
/// audited without re-probing.
struct DeficitFinding {
    DeficitKind kind{};
    std::string evidence;

    bool operator==(const DeficitFinding&) const = default;
    auto operator<=>(const DeficitFinding&) const = default;
};

// ---------------------------------------------------------------------------
// Auth-token combinations
// ---------------------------------------------------------------------------

namespace auth {
constexpr uint8_t Anonymous = 0x01;
constexpr uint8_t Username = 0x02;
constexpr uint8_t Certificate = 0x04;
constexpr uint8_t IssuedToken = 0x08;
constexpr uint8_t kMaskLimit = 16;  // masks range over [0, 16)
}  // namespace auth

/// Union of token types advertised across all endpoints.
inline uint8_t auth_combination(const std::vector<wire::EndpointDescription>& endpoints) {
    uint8_t mask = 0;
    for (const auto& ep : endpoints)
        for (const auto& tp : ep.user_token_policies)
            mask |= static_cast<uint8_t>(1u << static_cast<unsigned>(tp.token_type));
    return mask;
}

inline std::string auth_to_string(uint8_t mask) {
    static constexpr const char* names[4] = {"Anonymous", "Username", "Certificate", "IssuedToken"};
    std::string out;
    for (int i = 0; i < 4; ++i) {
        if (!(mask & (1u << i))) continue;
        if (!out.empty()) out += "+";
        out += names[i];
    }
    return out.empty() ? "(none)" : out;
}

// ---------------------------------------------------------------------------
// Security summary
// ---------------------------------------------------------------------------

struct SecuritySummary {
    wire::SecurityMode least_mode = wire::SecurityMode::None;
    wire::SecurityMode most_mode = wire::SecurityMode::None;
    PolicyId least_policy = PolicyId::None;
    PolicyId most_policy = PolicyId::None;

    bool operator==(const SecuritySummary&) const = default;
};

/// Least/most secure option across endpoints; order-invariant.
inline SecuritySummary summarize_security(const std::vector<wire::EndpointDescription>& endpoints) {
    if (endpoints.empty()) throw Error(errc::empty_endpoint_list, "no endpoints to summarize");
    SecuritySummary s;
    bool first = true;
    for (const auto& ep : endpoints) {
        PolicyId policy = policy_from_uri(ep.security_policy_uri.str());
        if (first) {
            s.least_mode = s.most_mode = ep.security_mode;
            s.least_policy = s.most_policy = policy;
            first = false;
            continue;
        }
        if (wire::mode_rank(ep.security_mode) < wire::mode_rank(s.least_mode)) s.least_mode = ep.security_mode;
        if (wire::mode_rank(ep.security_mode) > wire::mode_rank(s.most_mode)) s.most_mode = ep.security_mode;
        if (policy_strength(policy) < policy_strength(s.least_policy)) s.least_policy = policy;
        if (policy_strength(policy) > policy_strength(s.most_policy)) s.most_policy = policy;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Role classification
// ---------------------------------------------------------------------------

/// A host is a discovery server only if every endpoint it announces lives
/// somewhere else. Unparseable endpoint URLs count as "here": when in doubt,
/// treat the host as a real server so it stays inside the deficit statistics.
inline Role classify_role(const client::ProbeResult& probe) {
    if (probe.endpoints.empty()) return Role::FullServer;
    const std::string here_host = detail::lower(probe.target.host);
    for (const auto& ep : probe.endpoints) {
        auto parsed = net::parse_opc_url(ep.endpoint_url.str());
        if (!parsed) return Role::FullServer;
        if (detail::lower(parsed->host) == here_host && parsed->port == probe.target.port)
            return Role::FullServer;
    }
    return Role::DiscoveryServer;
}

// ---------------------------------------------------------------------------
// Deficit derivation
// ---------------------------------------------------------------------------

/// Conformance verdict for one offered policy, as fed into derive_findings.
struct PolicyConformance {
    PolicyId policy{};
    cert::ConformanceVerdict verdict;
};

namespace detail {
inline void add_finding(std::vector<DeficitFinding>& out, DeficitKind kind, std::string evidence) {
    for (const auto& f : out)
        if (f.kind == kind) return;  // one finding per kind, first evidence wins
    out.push_back(DeficitFinding{kind, std::move(evidence)});
}
}  // namespace detail

/// Applies the deficit taxonomy to one host's observations. Pure: the same
/// inputs always yield the same findings, and each finding carries enough
/// evidence to re-derive it.
inline std::vector<DeficitFinding> derive_findings(const client::ProbeResult& probe,
                                                   const SecuritySummary& summary,
                                                   const std::vector<PolicyConformance>& conformance,
                                                   const std::vector<cert::ReuseCluster>& reuse_clusters) {
    std::vector<DeficitFinding> out;
    if (probe.endpoints.empty()) return out;

    bool all_none = true;
    bool any_deprecated = false;
    std::string deprecated_uris;
    bool any_anonymous = false;
    for (const auto& ep : probe.endpoints) {
        if (ep.security_mode != wire::SecurityMode::None) all_none = false;
        PolicyId policy = policy_from_uri(ep.security_policy_uri.str());
        if (policy_deprecated(policy)) {
            any_deprecated = true;
            if (!deprecated_uris.empty()) deprecated_uris += ", ";
            deprecated_uris += policy_name(policy);
        }
        if (ep.offers_token(wire::UserTokenType::Anonymous)) any_anonymous = true;
    }

    if (all_none)
        detail::add_finding(out, DeficitKind::NoSecurityOnly,
                            "all " + std::to_string(probe.endpoints.size()) +
                                " endpoints advertise security mode None");
    if (policy_deprecated(summary.most_policy))
        detail::add_finding(out, DeficitKind::DeprecatedMostSecure,
                            std::string("most secure offered policy is ") + policy_name(summary.most_policy));
    if (any_deprecated)
        detail::add_finding(out, DeficitKind::DeprecatedOffered, "deprecated policies offered: " + deprecated_uris);

    for (const auto& pc : conformance) {
        std::string why = std::string(policy_name(pc.policy)) + ":";
        for (auto r : pc.verdict.reasons) why += std::string(" ") + cert::to_string(r);
        if (pc.verdict.verdict == cert::Verdict::WeakerThanPolicy)
            detail::add_finding(out, DeficitKind::CertWeakerThanPolicy, "certificate below " + why);
        else if (pc.verdict.verdict == cert::Verdict::StrongerThanPolicy)
            detail::add_finding(out, DeficitKind::CertStrongerThanPolicy, "certificate above " + why);
    }

    if (probe.server_certificate && !probe.server_certificate->empty()) {
        try {
            auto rec = cert::parse_certificate(*probe.server_certificate);
            for (const auto& cluster : reuse_clusters) {
                if (!cluster.confirmed() || cluster.fingerprint != rec.fingerprint) continue;
                detail::add_finding(out, DeficitKind::CertificateReuse,
                                    "certificate " + rec.fingerprint.substr(0, 16) + "... seen on " +
                                        std::to_string(cluster.hosts.size()) + " hosts");
                break;
            }
        } catch (const CertError&) {
            // Unparseable certificate: reuse cannot be asserted.
        }
    }

    if (any_anonymous) {
        detail::add_finding(out, DeficitKind::AnonymousAccess, "anonymous identity token advertised");
        if (wire::mode_rank(summary.least_mode) > 0)
            detail::add_finding(out, DeficitKind::AnonymousDespiteSecurity,
                                std::string("anonymous token offered although the least secure mode is ") +
                                    wire::to_string(summary.least_mode));
    }

    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// System classification
// ---------------------------------------------------------------------------

constexpr std::string_view kStandardNamespace = "http://opcfoundation.org/UA/";

/// Test patterns outrank production patterns: an example-application
/// namespace on a device that also exposes a vendor namespace still marks
/// a test deployment.
inline SystemClass classify_system(const std::vector<std::string>& namespace_array,
                                   const RuleSet& production_rules, const RuleSet& test_rules) {
    bool production = false;
    for (const auto& ns : namespace_array) {
        if (ns == kStandardNamespace) continue;
        if (match_rules(test_rules, ns)) return SystemClass::Test;
        if (match_rules(production_rules, ns)) production = true;
    }
    return production ? SystemClass::Production : SystemClass::Unclassified;
}

// ---------------------------------------------------------------------------
// Address-space access summary
// ---------------------------------------------------------------------------

struct AccessSummary {
    std::optional<double> readable_fraction;    // Variables with CurrentRead
    std::optional<double> writable_fraction;    // Variables with CurrentWrite
    std::optional<double> executable_fraction;  // Methods with Executable
    uint32_t node_count = 0;
    uint32_t variable_count = 0;
    uint32_t method_count = 0;
    bool lower_bound = false;  // snapshot was truncated mid-walk

    bool operator==(const AccessSummary&) const = default;
};

/// Fractions over what was actually seen. Nodes whose attribute read failed
/// stay in the denominator: an unreadable access level is not evidence of
/// accessibility.
inline AccessSummary summarize_access(const client::AddressSpaceSnapshot& snapshot) {
    AccessSummary s;
    s.lower_bound = snapshot.truncated;
    uint32_t readable = 0, writable = 0, executable = 0;
    for (const auto& [id, rec] : snapshot.nodes) {
        ++s.node_count;
        if (rec.node_class == wire::NodeClass::Variable) {
            ++s.variable_count;
            if (rec.access_level && (*rec.access_level & wire::access_level::CurrentRead)) ++readable;
            if (rec.access_level && (*rec.access_level & wire::access_level::CurrentWrite)) ++writable;
        } else if (rec.node_class == wire::NodeClass::Method) {
            ++s.method_count;
            if (rec.executable && *rec.executable) ++executable;
        }
    }
    if (s.variable_count > 0) {
        s.readable_fraction = static_cast<double>(readable) / s.variable_count;
        s.writable_fraction = static_cast<double>(writable) / s.variable_count;
    }
    if (s.method_count > 0) s.executable_fraction = static_cast<double>(executable) / s.method_count;
    return s;
}

// ---------------------------------------------------------------------------
// Manufacturer attribution
// ---------------------------------------------------------------------------

inline std::optional<std::string> attribute_manufacturer(std::string_view application_uri,
                                                         const RuleSet& rules) {
    if (application_uri.empty()) return std::nullopt;
    return match_rules(rules, application_uri);
}

// ---------------------------------------------------------------------------
// Host assessment
// ---------------------------------------------------------------------------

struct HostAssessment {
    net::Target target;
    bool reached = false;
    Role role = Role::FullServer;
    bool has_endpoints = false;
    SecuritySummary security;                      // meaningful iff has_endpoints
    std::vector<wire::SecurityMode> offered_modes; // distinct, ascending rank
    std::vector<PolicyId> offered_policies;        // distinct, ascending strength
    uint8_t auth_tokens = 0;                       // auth:: mask
    std::vector<DeficitFinding> findings;  // sorted, one per kind
    SystemClass system_class = SystemClass::Unclassified;
    std::optional<AccessSummary> access;
    std::optional<std::string> manufacturer;
    std::optional<std::string> as_label;
    client::SessionProbe session_outcome = client::SessionProbe::NotAttempted;
    std::vector<std::string> notes;  // data-quality caveats, not verdicts

    bool operator==(const HostAssessment&) const = default;

    bool has_finding(DeficitKind k) const {
        for (const auto& f : findings)
            if (f.kind == k) return true;
        return false;
    }
};

/// Shared context for assessing many hosts from one snapshot.
struct AssessContext {
    RuleSet manufacturer_rules;
    RuleSet production_rules;
    RuleSet test_rules;
    std::vector<cert::ReuseCluster> reuse_clusters;
    std::map<std::string, std::string> as_labels;  // target string -> AS label
};

/// Distinct non-None policies offered, checked against the server
/// certificate. No certificate or an unparseable one yields no verdicts.
inline std::vector<PolicyConformance> policy_conformance(const client::ProbeResult& probe,
                                                         std::vector<std::string>* notes = nullptr) {
    std::vector<PolicyConformance> out;
    if (!probe.server_certificate || probe.server_certificate->empty()) return out;
    cert::CertificateRecord rec;
    try {
        rec = cert::parse_certificate(*probe.server_certificate);
    } catch (const CertError& e) {
        if (notes) notes->push_back(std::string("server certificate unparseable: ") + e.what());
        return out;
    }
    std::vector<PolicyId> seen;
    for (const auto& ep : probe.endpoints) {
        PolicyId policy = policy_from_uri(ep.security_policy_uri.str());
        if (policy == PolicyId::None || policy == PolicyId::Unknown) continue;
        if (std::find(seen.begin(), seen.end(), policy) != seen.end()) continue;
        seen.push_back(policy);
        out.push_back(PolicyConformance{policy, cert::check_conformance(policy, rec)});
    }
    return out;
}

/// Full per-host pipeline: role, summary, findings, classification,
/// attribution. Pure given (probe, ctx).
inline HostAssessment assess_host(const client::ProbeResult& probe, const AssessContext& ctx) {
    HostAssessment a;
    a.target = probe.target;
    a.reached = probe.reached;
    a.session_outcome = probe.session_probe;
    if (auto it = ctx.as_labels.find(probe.target.to_string()); it != ctx.as_labels.end())
        a.as_label = it->second;
    if (!probe.reached) {
        a.notes.push_back(probe.error.empty() ? "host unreachable" : probe.error);
        return a;
    }
    a.role = classify_role(probe);
    a.has_endpoints = !probe.endpoints.empty();
    if (!a.has_endpoints) {
        a.notes.push_back("endpoint list empty: treated as FullServer with unknown configuration");
    } else {
        a.security = summarize_security(probe.endpoints);
        for (const auto& ep : probe.endpoints) {
            if (std::find(a.offered_modes.begin(), a.offered_modes.end(), ep.security_mode) ==
                a.offered_modes.end())
                a.offered_modes.push_back(ep.security_mode);
            PolicyId policy = policy_from_uri(ep.security_policy_uri.str());
            if (std::find(a.offered_policies.begin(), a.offered_policies.end(), policy) ==
                a.offered_policies.end())
                a.offered_policies.push_back(policy);
        }
        std::sort(a.offered_modes.begin(), a.offered_modes.end(),
                  [](auto x, auto y) { return wire::mode_rank(x) < wire::mode_rank(y); });
        std::sort(a.offered_policies.begin(), a.offered_policies.end(),
                  [](auto x, auto y) { return policy_strength(x) < policy_strength(y); });
        a.auth_tokens = auth_combination(probe.endpoints);
        auto conformance = policy_conformance(probe, &a.notes);
        a.findings = derive_findings(probe, a.security, conformance, ctx.reuse_clusters);
        for (const auto& ep : probe.endpoints)
            if (policy_from_uri(ep.security_policy_uri.str()) == PolicyId::Unknown) {
                a.notes.push_back("unknown security policy URI: " + ep.security_policy_uri.str());
                break;
            }
    }
    if (probe.application_uri)
        a.manufacturer = attribute_manufacturer(*probe.application_uri, ctx.manufacturer_rules);
    if (probe.address_space) {
        a.access = summarize_access(*probe.address_space);
        a.system_class = classify_system(probe.address_space->namespace_array, ctx.production_rules,
                                         ctx.test_rules);
        if (probe.address_space->truncated)
            a.notes.push_back("address-space walk truncated: access fractions are lower bounds");
    }
    return a;
}

}  // namespace uascan::assess
