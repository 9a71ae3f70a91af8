// Assessment layer: rule files, per-host verdicts, fleet aggregation.

#include <algorithm>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "uascan/assess/aggregate.hpp"
#include "uascan/assess/assessment.hpp"
#include "uascan/assess/rules.hpp"
#include "uascan/cert/certificate.hpp"
#include "support/fixtures.hpp"

using namespace uascan;
using assess::DeficitKind;

namespace {

wire::UserTokenPolicy token(wire::UserTokenType type) {
    wire::UserTokenPolicy p;
    p.policy_id = wire::UaString(std::string(wire::to_string(type)));
    p.token_type = type;
    return p;
}

wire::EndpointDescription endpoint(const std::string& url, wire::SecurityMode mode, PolicyId policy,
                                   std::initializer_list<wire::UserTokenType> tokens) {
    wire::EndpointDescription e;
    e.endpoint_url = wire::UaString(url);
    e.security_mode = mode;
    e.security_policy_uri = wire::UaString(policy_uri(policy));
    for (auto t : tokens) e.user_token_policies.push_back(token(t));
    return e;
}

client::ProbeResult probe_with(const net::Target& target,
                               std::vector<wire::EndpointDescription> endpoints) {
    client::ProbeResult p;
    p.target = target;
    p.reached = true;
    p.endpoints = std::move(endpoints);
    return p;
}

const net::Target kHost{"192.0.2.10", 4840};
const std::string kHere = "opc.tcp://192.0.2.10:4840";

}  // namespace

// ---------------------------------------------------------------------------
// Rule files
// ---------------------------------------------------------------------------

TEST_CASE("rule files parse patterns and labels") {
    auto rules = assess::parse_rules("# comment\n\nbeckhoff\tBeckhoff\r\nwago\tWAGO\n");
    REQUIRE(rules.size() == 2);
    CHECK(rules[0] == assess::Rule{"beckhoff", "Beckhoff"});
    CHECK(rules[1] == assess::Rule{"wago", "WAGO"});
}

TEST_CASE("malformed rule lines are rejected") {
    for (const char* bad : {"no-tab-here\n", "\tlabel-without-pattern\n", "pattern\t\n", "a\tb\nc\n"}) {
        try {
            assess::parse_rules(bad);
            FAIL("expected malformed_rule_file for: " << bad);
        } catch (const Error& e) {
            CHECK(e.code() == errc::malformed_rule_file);
        }
    }
}

TEST_CASE("rule matching is case-insensitive, first match wins") {
    auto rules = assess::parse_rules("beckhoff\tBeckhoff\nbeck\tGeneric\n");
    CHECK(assess::match_rules(rules, "urn:BECKHOFF:TcOpcUaServer") == "Beckhoff");
    CHECK(assess::match_rules(rules, "urn:siemens:x") == std::nullopt);
    CHECK(assess::match_rules({}, "anything") == std::nullopt);

    // Order decides ties: the broader pattern first flips the answer.
    auto flipped = assess::parse_rules("beck\tGeneric\nbeckhoff\tBeckhoff\n");
    CHECK(assess::match_rules(flipped, "urn:BECKHOFF:TcOpcUaServer") == "Generic");
}

TEST_CASE("shipped rule files load") {
    auto dir = std::string(UASCAN_DATA_DIR);
    CHECK_FALSE(assess::load_rules(dir + "/manufacturer_rules.tsv").empty());
    CHECK_FALSE(assess::load_rules(dir + "/namespace_production.tsv").empty());
    CHECK_FALSE(assess::load_rules(dir + "/namespace_test.tsv").empty());
}

TEST_CASE("manufacturer attribution") {
    auto rules = assess::parse_rules("beckhoff\tBeckhoff\nbachmann\tBachmann\n");
    CHECK(assess::attribute_manufacturer("urn:plc1:beckhoff:server", rules) == "Beckhoff");
    CHECK(assess::attribute_manufacturer("urn:plc1:other:server", rules) == std::nullopt);
    CHECK(assess::attribute_manufacturer("urn:plc1:beckhoff:server", {}) == std::nullopt);
    CHECK(assess::attribute_manufacturer("", rules) == std::nullopt);
}

// ---------------------------------------------------------------------------
// Role classification
// ---------------------------------------------------------------------------

TEST_CASE("discovery server iff every endpoint lives elsewhere") {
    auto elsewhere1 = endpoint("opc.tcp://10.0.0.5:4840", wire::SecurityMode::None, PolicyId::None, {});
    auto elsewhere2 = endpoint("opc.tcp://192.0.2.10:48010", wire::SecurityMode::None, PolicyId::None, {});
    auto here = endpoint(kHere, wire::SecurityMode::None, PolicyId::None, {});

    CHECK(assess::classify_role(probe_with(kHost, {elsewhere1, elsewhere2})) ==
          assess::Role::DiscoveryServer);
    CHECK(assess::classify_role(probe_with(kHost, {elsewhere1, here})) == assess::Role::FullServer);
    CHECK(assess::classify_role(probe_with(kHost, {})) == assess::Role::FullServer);
}

TEST_CASE("role comparison normalizes host case and default port") {
    // Hostname comparison is case-insensitive; a URL without a port means 4840.
    net::Target named{"plc.example.net", 4840};
    auto self_caps = endpoint("opc.tcp://PLC.EXAMPLE.NET", wire::SecurityMode::None, PolicyId::None, {});
    CHECK(assess::classify_role(probe_with(named, {self_caps})) == assess::Role::FullServer);

    // Unparseable URLs never prove "elsewhere".
    auto junk = endpoint("http://plc.example.net/ua", wire::SecurityMode::None, PolicyId::None, {});
    CHECK(assess::classify_role(probe_with(named, {junk})) == assess::Role::FullServer);
}

// ---------------------------------------------------------------------------
// Security summary
// ---------------------------------------------------------------------------

TEST_CASE("summarize_security finds least and most secure option") {
    std::vector<wire::EndpointDescription> eps{
        endpoint(kHere, wire::SecurityMode::Sign, PolicyId::Basic256, {}),
        endpoint(kHere, wire::SecurityMode::None, PolicyId::None, {}),
        endpoint(kHere, wire::SecurityMode::SignAndEncrypt, PolicyId::Basic256Sha256, {}),
    };
    auto s = assess::summarize_security(eps);
    CHECK(s.least_mode == wire::SecurityMode::None);
    CHECK(s.most_mode == wire::SecurityMode::SignAndEncrypt);
    CHECK(s.least_policy == PolicyId::None);
    CHECK(s.most_policy == PolicyId::Basic256Sha256);
}

TEST_CASE("summarize_security: deprecated policies can be the most secure option") {
    std::vector<wire::EndpointDescription> eps{
        endpoint(kHere, wire::SecurityMode::Sign, PolicyId::Basic128Rsa15, {}),
        endpoint(kHere, wire::SecurityMode::Sign, PolicyId::Basic256, {}),
    };
    auto s = assess::summarize_security(eps);
    CHECK(s.most_policy == PolicyId::Basic256);
    CHECK(policy_deprecated(s.most_policy));
}

TEST_CASE("summarize_security: single None/None endpoint") {
    auto s = assess::summarize_security({endpoint(kHere, wire::SecurityMode::None, PolicyId::None, {})});
    CHECK(s.least_mode == wire::SecurityMode::None);
    CHECK(s.most_mode == wire::SecurityMode::None);
    CHECK(s.least_policy == PolicyId::None);
    CHECK(s.most_policy == PolicyId::None);
}

TEST_CASE("summarize_security throws on empty endpoint list") {
    try {
        assess::summarize_security({});
        FAIL("expected empty_endpoint_list");
    } catch (const Error& e) {
        CHECK(e.code() == errc::empty_endpoint_list);
    }
}

TEST_CASE("summarize_security is permutation-invariant") {
    std::vector<wire::EndpointDescription> eps;
    for (auto mode : {wire::SecurityMode::None, wire::SecurityMode::Sign, wire::SecurityMode::SignAndEncrypt})
        for (auto pol : {PolicyId::None, PolicyId::Basic128Rsa15, PolicyId::Aes256Sha256RsaPss})
            eps.push_back(endpoint(kHere, mode, pol, {}));
    auto expected = assess::summarize_security(eps);
    std::mt19937 rng(7);
    for (int i = 0; i < 50; ++i) {
        std::shuffle(eps.begin(), eps.end(), rng);
        CHECK(assess::summarize_security(eps) == expected);
    }
}

TEST_CASE("unknown policy URIs rank above None but below real policies") {
    std::vector<wire::EndpointDescription> eps{
        endpoint(kHere, wire::SecurityMode::None, PolicyId::None, {}),
        endpoint(kHere, wire::SecurityMode::Sign, PolicyId::Basic128Rsa15, {}),
    };
    eps.push_back(eps[1]);
    eps[2].security_policy_uri = wire::UaString("http://opcfoundation.org/UA/SecurityPolicy#Future");
    auto s = assess::summarize_security(eps);
    CHECK(s.least_policy == PolicyId::None);   // Unknown does not become least
    CHECK(s.most_policy == PolicyId::Basic128Rsa15);  // nor most
}

// ---------------------------------------------------------------------------
// Deficit derivation
// ---------------------------------------------------------------------------

namespace {

std::vector<DeficitKind> kinds_of(const std::vector<assess::DeficitFinding>& fs) {
    std::vector<DeficitKind> ks;
    for (const auto& f : fs) ks.push_back(f.kind);
    return ks;
}

std::vector<assess::DeficitFinding> findings_for(const client::ProbeResult& p,
                                                 const std::vector<assess::PolicyConformance>& pc = {},
                                                 const std::vector<cert::ReuseCluster>& clusters = {}) {
    return assess::derive_findings(p, assess::summarize_security(p.endpoints), pc, clusters);
}

}  // namespace

TEST_CASE("None-only host with anonymous token yields exactly two findings") {
    auto p = probe_with(kHost, {endpoint(kHere, wire::SecurityMode::None, PolicyId::None,
                                         {wire::UserTokenType::Anonymous})});
    auto fs = findings_for(p);
    CHECK(kinds_of(fs) == std::vector<DeficitKind>{DeficitKind::NoSecurityOnly, DeficitKind::AnonymousAccess});
    for (const auto& f : fs) CHECK_FALSE(f.evidence.empty());
}

TEST_CASE("SHA1 certificate under Basic256Sha256 is CertWeakerThanPolicy") {
    cert::SelfSignedSpec spec;
    spec.hash = HashAlgorithm::SHA1;
    spec.common_name = "weak.example.net";
    auto der = cert::generate_self_signed(spec);
    auto rec = cert::parse_certificate(der);

    auto p = probe_with(kHost, {endpoint(kHere, wire::SecurityMode::SignAndEncrypt,
                                         PolicyId::Basic256Sha256, {wire::UserTokenType::Username})});
    p.server_certificate = der;
    std::vector<assess::PolicyConformance> pc{
        {PolicyId::Basic256Sha256, cert::check_conformance(PolicyId::Basic256Sha256, rec)}};
    auto fs = findings_for(p, pc);
    CHECK(kinds_of(fs) == std::vector<DeficitKind>{DeficitKind::CertWeakerThanPolicy});
}

TEST_CASE("anonymous token on secured-only endpoints flags AnonymousDespiteSecurity") {
    auto p = probe_with(kHost, {endpoint(kHere, wire::SecurityMode::Sign, PolicyId::Basic256Sha256,
                                         {wire::UserTokenType::Anonymous, wire::UserTokenType::Username})});
    auto fs = findings_for(p);
    CHECK(kinds_of(fs) ==
          std::vector<DeficitKind>{DeficitKind::AnonymousAccess, DeficitKind::AnonymousDespiteSecurity});
}

TEST_CASE("anonymous next to a None endpoint is not despite-security") {
    auto p = probe_with(kHost, {
        endpoint(kHere, wire::SecurityMode::None, PolicyId::None, {wire::UserTokenType::Anonymous}),
        endpoint(kHere, wire::SecurityMode::Sign, PolicyId::Basic256Sha256, {wire::UserTokenType::Username}),
    });
    auto fs = findings_for(p);
    CHECK(kinds_of(fs) == std::vector<DeficitKind>{DeficitKind::AnonymousAccess});
}

TEST_CASE("deprecated policies flag offered and most-secure deficits") {
    auto p = probe_with(kHost, {
        endpoint(kHere, wire::SecurityMode::Sign, PolicyId::Basic128Rsa15, {wire::UserTokenType::Username}),
        endpoint(kHere, wire::SecurityMode::Sign, PolicyId::Basic256, {wire::UserTokenType::Username}),
    });
    auto fs = findings_for(p);
    CHECK(kinds_of(fs) ==
          std::vector<DeficitKind>{DeficitKind::DeprecatedMostSecure, DeficitKind::DeprecatedOffered});

    // A secure policy on top keeps DeprecatedOffered but clears DeprecatedMostSecure.
    p.endpoints.push_back(
        endpoint(kHere, wire::SecurityMode::SignAndEncrypt, PolicyId::Basic256Sha256,
                 {wire::UserTokenType::Username}));
    fs = findings_for(p);
    CHECK(kinds_of(fs) == std::vector<DeficitKind>{DeficitKind::DeprecatedOffered});
}

TEST_CASE("NoSecurityOnly monotonicity under added endpoints") {
    auto p = probe_with(kHost, {endpoint(kHere, wire::SecurityMode::None, PolicyId::None, {})});
    REQUIRE(kinds_of(findings_for(p)) == std::vector<DeficitKind>{DeficitKind::NoSecurityOnly});

    // Adding another None endpoint keeps the finding.
    p.endpoints.push_back(endpoint(kHere, wire::SecurityMode::None, PolicyId::None, {}));
    CHECK(kinds_of(findings_for(p)) == std::vector<DeficitKind>{DeficitKind::NoSecurityOnly});

    // Adding a secured endpoint must clear it.
    p.endpoints.push_back(endpoint(kHere, wire::SecurityMode::Sign, PolicyId::Basic256Sha256, {}));
    auto fs = findings_for(p);
    CHECK(std::find(kinds_of(fs).begin(), kinds_of(fs).end(), DeficitKind::NoSecurityOnly) ==
          kinds_of(fs).end());
}

TEST_CASE("certificate reuse requires a confirmed cluster") {
    cert::SelfSignedSpec spec;
    spec.common_name = "shared.example.net";
    auto der = cert::generate_self_signed(spec);
    auto fp = cert::parse_certificate(der).fingerprint;

    auto p = probe_with(kHost, {endpoint(kHere, wire::SecurityMode::Sign, PolicyId::Basic256Sha256,
                                         {wire::UserTokenType::Username})});
    p.server_certificate = der;

    cert::ReuseCluster two{fp, {"a:4840", "b:4840"}, {}, "CN=shared.example.net"};
    cert::ReuseCluster three{fp, {"a:4840", "b:4840", "c:4840"}, {}, "CN=shared.example.net"};
    cert::ReuseCluster other{"ff", {"a:4840", "b:4840", "c:4840"}, {}, "CN=other"};

    auto pc = assess::policy_conformance(p);
    CHECK_FALSE(assess::derive_findings(p, assess::summarize_security(p.endpoints), pc, {two}).size());
    CHECK(assess::derive_findings(p, assess::summarize_security(p.endpoints), pc, {other}).empty());
    auto fs = assess::derive_findings(p, assess::summarize_security(p.endpoints), pc, {three});
    REQUIRE(fs.size() == 1);
    CHECK(fs[0].kind == DeficitKind::CertificateReuse);
}

// ---------------------------------------------------------------------------
// System classification
// ---------------------------------------------------------------------------

TEST_CASE("namespace classification") {
    auto production = assess::parse_rules("61131\tIEC 61131-3\nbeckhoff\tBeckhoff\n");
    auto test = assess::parse_rules("freeopcua\tFreeOpcUa examples\n");
    const std::string std_ns = "http://opcfoundation.org/UA/";

    CHECK(assess::classify_system({std_ns, "http://PLCopen.org/OpcUa/IEC61131-3/"}, production, test) ==
          assess::SystemClass::Production);
    CHECK(assess::classify_system({std_ns, "http://examples.freeopcua.github.io"}, production, test) ==
          assess::SystemClass::Test);
    CHECK(assess::classify_system({std_ns}, production, test) == assess::SystemClass::Unclassified);
    CHECK(assess::classify_system({}, production, test) == assess::SystemClass::Unclassified);

    // Test outranks Production when both match.
    CHECK(assess::classify_system({std_ns, "urn:beckhoff:plc", "urn:freeopcua:server"}, production, test) ==
          assess::SystemClass::Test);

    // The standard namespace itself never matches a pattern.
    auto catch_all = assess::parse_rules("opcfoundation\tStandard\n");
    CHECK(assess::classify_system({std_ns}, catch_all, {}) == assess::SystemClass::Unclassified);
}

// ---------------------------------------------------------------------------
// Access summary
// ---------------------------------------------------------------------------

namespace {

client::AddressSpaceSnapshot snapshot_with(uint32_t vars, uint32_t readable, uint32_t writable,
                                           uint32_t methods, uint32_t executable) {
    client::AddressSpaceSnapshot snap;
    uint32_t id = 1000;
    for (uint32_t i = 0; i < vars; ++i) {
        wire::NodeRecord rec;
        rec.node_id = wire::NodeId::numeric(0, id++);
        rec.browse_name = "v" + std::to_string(i);
        rec.node_class = wire::NodeClass::Variable;
        uint8_t level = 0;
        if (i < readable) level |= wire::access_level::CurrentRead;
        if (i < writable) level |= wire::access_level::CurrentWrite;
        rec.access_level = level;
        snap.nodes[rec.node_id] = rec;
    }
    for (uint32_t i = 0; i < methods; ++i) {
        wire::NodeRecord rec;
        rec.node_id = wire::NodeId::numeric(0, id++);
        rec.browse_name = "m" + std::to_string(i);
        rec.node_class = wire::NodeClass::Method;
        rec.executable = i < executable;
        snap.nodes[rec.node_id] = rec;
    }
    return snap;
}

}  // namespace

TEST_CASE("access fractions over variables and methods") {
    auto s = assess::summarize_access(snapshot_with(100, 97, 0, 0, 0));
    REQUIRE(s.readable_fraction.has_value());
    CHECK(*s.readable_fraction == 0.97);
    CHECK(s.variable_count == 100);
    CHECK(s.node_count == 100);
    CHECK_FALSE(s.executable_fraction.has_value());

    s = assess::summarize_access(snapshot_with(10, 10, 1, 0, 0));
    CHECK(*s.writable_fraction == 0.1);
    CHECK_FALSE(s.executable_fraction.has_value());
    CHECK_FALSE(s.lower_bound);
}

TEST_CASE("empty and truncated snapshots") {
    auto s = assess::summarize_access({});
    CHECK(s.node_count == 0);
    CHECK_FALSE(s.readable_fraction.has_value());
    CHECK_FALSE(s.writable_fraction.has_value());
    CHECK_FALSE(s.executable_fraction.has_value());

    auto snap = snapshot_with(4, 4, 0, 2, 2);
    snap.truncated = true;
    s = assess::summarize_access(snap);
    CHECK(s.lower_bound);
    CHECK(*s.executable_fraction == 1.0);
}

TEST_CASE("variables without an access level count as unreadable") {
    auto snap = snapshot_with(3, 3, 3, 0, 0);
    auto first = snap.nodes.begin();
    first->second.access_level.reset();
    auto s = assess::summarize_access(snap);
    CHECK(*s.readable_fraction == Catch::Approx(2.0 / 3.0));
    CHECK(*s.writable_fraction == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("process-tree fixture fractions") {
    // Mirrors a small industrial address space: one readable inflow meter,
    // one writable set point, one executable maintenance function.
    client::AddressSpaceSnapshot snap;
    auto add = [&](uint32_t id, const char* name, wire::NodeClass cls, uint8_t level, bool exec) {
        wire::NodeRecord rec;
        rec.node_id = wire::NodeId::numeric(2, id);
        rec.browse_name = name;
        rec.node_class = cls;
        if (cls == wire::NodeClass::Variable) rec.access_level = level;
        if (cls == wire::NodeClass::Method) rec.executable = exec;
        snap.nodes[rec.node_id] = rec;
    };
    add(1, "Tank", wire::NodeClass::Object, 0, false);
    add(2, "m3InflowPerHour", wire::NodeClass::Variable, wire::access_level::CurrentRead, false);
    add(3, "rSetFillLevel", wire::NodeClass::Variable,
        wire::access_level::CurrentRead | wire::access_level::CurrentWrite, false);
    add(4, "AddEndpoint", wire::NodeClass::Method, 0, true);

    auto s = assess::summarize_access(snap);
    CHECK(s.node_count == 4);
    CHECK(*s.readable_fraction == 1.0);
    CHECK(*s.writable_fraction == 0.5);
    CHECK(*s.executable_fraction == 1.0);
}

// ---------------------------------------------------------------------------
// assess_host end to end
// ---------------------------------------------------------------------------

TEST_CASE("assess_host assembles verdicts from one probe") {
    cert::SelfSignedSpec spec;
    spec.hash = HashAlgorithm::SHA1;
    spec.common_name = "plc9.example.net";
    auto der = cert::generate_self_signed(spec);

    auto p = probe_with(kHost, {
        endpoint(kHere, wire::SecurityMode::None, PolicyId::None, {wire::UserTokenType::Anonymous}),
        endpoint(kHere, wire::SecurityMode::SignAndEncrypt, PolicyId::Basic256Sha256,
                 {wire::UserTokenType::Username}),
    });
    p.server_certificate = der;
    p.application_uri = "urn:plc9:beckhoff:server";
    p.session_probe = client::SessionProbe::AnonymousAccepted;
    p.address_space = snapshot_with(10, 9, 1, 2, 1);
    p.address_space->namespace_array = {"http://opcfoundation.org/UA/",
                                        "http://PLCopen.org/OpcUa/IEC61131-3/"};

    assess::AssessContext ctx;
    ctx.manufacturer_rules = assess::parse_rules("beckhoff\tBeckhoff\n");
    ctx.production_rules = assess::parse_rules("61131\tIEC 61131-3\n");
    ctx.as_labels["192.0.2.10:4840"] = "AS64500";

    auto a = assess::assess_host(p, ctx);
    CHECK(a.reached);
    CHECK(a.role == assess::Role::FullServer);
    CHECK(a.security.least_mode == wire::SecurityMode::None);
    CHECK(a.security.most_policy == PolicyId::Basic256Sha256);
    CHECK(a.offered_modes ==
          std::vector<wire::SecurityMode>{wire::SecurityMode::None, wire::SecurityMode::SignAndEncrypt});
    CHECK(a.offered_policies == std::vector<PolicyId>{PolicyId::None, PolicyId::Basic256Sha256});
    CHECK(a.auth_tokens == (assess::auth::Anonymous | assess::auth::Username));
    CHECK(a.has_finding(DeficitKind::AnonymousAccess));
    CHECK(a.has_finding(DeficitKind::CertWeakerThanPolicy));
    CHECK_FALSE(a.has_finding(DeficitKind::NoSecurityOnly));
    CHECK(a.manufacturer == "Beckhoff");
    CHECK(a.as_label == "AS64500");
    CHECK(a.system_class == assess::SystemClass::Production);
    REQUIRE(a.access.has_value());
    CHECK(*a.access->readable_fraction == 0.9);

    // Pure: the same probe and context reproduce the assessment exactly.
    CHECK(assess::assess_host(p, ctx) == a);

    // Auditable: stored evidence re-derives the stored findings.
    auto re = assess::derive_findings(p, a.security, assess::policy_conformance(p), ctx.reuse_clusters);
    CHECK(re == a.findings);
}

TEST_CASE("assess_host on unreachable and endpoint-less hosts") {
    client::ProbeResult dead;
    dead.target = kHost;
    dead.error = "connect timeout";
    auto a = assess::assess_host(dead, {});
    CHECK_FALSE(a.reached);
    CHECK(a.findings.empty());
    REQUIRE_FALSE(a.notes.empty());

    auto empty = probe_with(kHost, {});
    a = assess::assess_host(empty, {});
    CHECK(a.reached);
    CHECK(a.role == assess::Role::FullServer);
    CHECK_FALSE(a.has_endpoints);
    CHECK(a.findings.empty());
    REQUIRE_FALSE(a.notes.empty());  // data-quality note, not a finding
}

TEST_CASE("assess_host notes unknown policy URIs") {
    auto p = probe_with(kHost, {endpoint(kHere, wire::SecurityMode::Sign, PolicyId::None, {})});
    p.endpoints[0].security_policy_uri =
        wire::UaString("http://opcfoundation.org/UA/SecurityPolicy#Quantum");
    auto a = assess::assess_host(p, {});
    CHECK(a.security.most_policy == PolicyId::Unknown);
    bool noted = false;
    for (const auto& n : a.notes) noted = noted || n.find("Quantum") != std::string::npos;
    CHECK(noted);
}

// ---------------------------------------------------------------------------
// Fleet aggregation
// ---------------------------------------------------------------------------

namespace {

assess::HostAssessment full_server(uint32_t i, std::vector<DeficitKind> kinds,
                                   client::SessionProbe outcome = client::SessionProbe::AuthenticationRejected,
                                   uint8_t tokens = assess::auth::Username) {
    assess::HostAssessment a;
    a.target = {"10.0.0." + std::to_string(i), 4840};
    a.reached = true;
    a.role = assess::Role::FullServer;
    a.has_endpoints = true;
    a.offered_modes = {wire::SecurityMode::Sign};
    a.offered_policies = {PolicyId::Basic256Sha256};
    a.security = {wire::SecurityMode::Sign, wire::SecurityMode::Sign, PolicyId::Basic256Sha256,
                  PolicyId::Basic256Sha256};
    a.auth_tokens = tokens;
    a.session_outcome = outcome;
    for (auto k : kinds) a.findings.push_back({k, "planted"});
    std::sort(a.findings.begin(), a.findings.end());
    return a;
}

}  // namespace

TEST_CASE("aggregate_fleet: deficit rate over full servers") {
    std::vector<assess::HostAssessment> fleet;
    for (uint32_t i = 0; i < 92; ++i) fleet.push_back(full_server(i, {DeficitKind::AnonymousAccess}));
    for (uint32_t i = 92; i < 100; ++i) fleet.push_back(full_server(i, {}));
    auto agg = assess::aggregate_fleet(fleet);
    CHECK(agg.full_server_count == 100);
    CHECK(agg.hosts_with_findings == 92);
    REQUIRE(agg.deficit_rate.has_value());
    CHECK(*agg.deficit_rate == 0.92);
}

TEST_CASE("aggregate_fleet: None-as-most counts match planted NoSecurityOnly hosts") {
    std::vector<assess::HostAssessment> fleet;
    for (uint32_t i = 0; i < 24; ++i) {
        auto a = full_server(i, {DeficitKind::NoSecurityOnly});
        a.offered_modes = {wire::SecurityMode::None};
        a.offered_policies = {PolicyId::None};
        a.security = {wire::SecurityMode::None, wire::SecurityMode::None, PolicyId::None, PolicyId::None};
        fleet.push_back(a);
    }
    for (uint32_t i = 24; i < 100; ++i) fleet.push_back(full_server(i, {}));
    auto agg = assess::aggregate_fleet(fleet);
    CHECK(agg.policies[PolicyId::None].most == 24);
    CHECK(agg.modes[wire::SecurityMode::None].most == 24);
    CHECK(agg.deficits[DeficitKind::NoSecurityOnly].total == 24);
    CHECK(agg.policies[PolicyId::Basic256Sha256].supported == 76);
}

TEST_CASE("aggregate_fleet: empty fleet has zero counts and undefined rate") {
    auto agg = assess::aggregate_fleet({});
    CHECK(agg.host_count == 0);
    CHECK(agg.matrix_total == 0);
    CHECK(agg.deficits.empty());
    CHECK_FALSE(agg.deficit_rate.has_value());
}

TEST_CASE("aggregate_fleet conserves hosts across the access matrix") {
    std::vector<assess::HostAssessment> fleet;
    std::mt19937 rng(42);
    auto outcomes = {client::SessionProbe::AnonymousAccepted, client::SessionProbe::AuthenticationRejected,
                     client::SessionProbe::SecureChannelRejected, client::SessionProbe::InvalidConfiguration,
                     client::SessionProbe::NotAttempted};
    uint32_t i = 0;
    for (auto outcome : outcomes)
        for (uint8_t tokens : {assess::auth::Anonymous, assess::auth::Username,
                               uint8_t(assess::auth::Anonymous | assess::auth::Username)})
            for (auto cls : {assess::SystemClass::Production, assess::SystemClass::Test,
                             assess::SystemClass::Unclassified}) {
                auto a = full_server(i++, {}, outcome, tokens);
                a.system_class = cls;
                fleet.push_back(a);
            }

    // Sprinkle in hosts that must stay outside the matrix.
    assess::HostAssessment dead;
    dead.target = {"10.9.9.9", 4840};
    fleet.push_back(dead);
    auto disco = full_server(i++, {});
    disco.role = assess::Role::DiscoveryServer;
    fleet.push_back(disco);

    auto agg = assess::aggregate_fleet(fleet);
    CHECK(agg.host_count == fleet.size());
    CHECK(agg.unreachable_count == 1);
    CHECK(agg.discovery_server_count == 1);
    CHECK(agg.matrix_total == agg.full_server_count);

    uint32_t rows = 0;
    for (uint8_t m = 0; m < assess::auth::kMaskLimit; ++m) rows += agg.matrix_row_total(m);
    CHECK(rows == agg.matrix_total);
    uint32_t cols = 0;
    for (size_t c = 0; c < assess::kAccessOutcomeCount; ++c)
        cols += agg.matrix_column_total(static_cast<assess::AccessOutcome>(c));
    CHECK(cols == agg.matrix_total);

    // Anonymous-accepted hosts land in classification columns, one each.
    CHECK(agg.matrix_column_total(assess::AccessOutcome::Production) == 3);
    CHECK(agg.matrix_column_total(assess::AccessOutcome::Test) == 3);
    CHECK(agg.matrix_column_total(assess::AccessOutcome::RejectedSecureChannel) == 9);

    // Order independence.
    std::shuffle(fleet.begin(), fleet.end(), rng);
    CHECK(assess::aggregate_fleet(fleet) == agg);
}

TEST_CASE("aggregate_fleet splits deficits by manufacturer and AS") {
    std::vector<assess::HostAssessment> fleet;
    for (uint32_t i = 0; i < 6; ++i) {
        auto a = full_server(i, {DeficitKind::AnonymousAccess});
        if (i < 4) a.manufacturer = "Bachmann";
        if (i % 2 == 0) a.as_label = "AS100";
        fleet.push_back(a);
    }
    auto agg = assess::aggregate_fleet(fleet);
    const auto& d = agg.deficits[DeficitKind::AnonymousAccess];
    CHECK(d.total == 6);
    CHECK(d.by_manufacturer.at("Bachmann") == 4);
    CHECK(d.by_manufacturer.at(assess::kUnattributed) == 2);
    CHECK(d.by_as.at("AS100") == 3);
    CHECK(d.by_as.at(assess::kUnknownAs) == 3);

    uint32_t by_mfr = 0, by_as = 0;
    for (const auto& [k, v] : d.by_manufacturer) by_mfr += v;
    for (const auto& [k, v] : d.by_as) by_as += v;
    CHECK(by_mfr == d.total);
    CHECK(by_as == d.total);
}
