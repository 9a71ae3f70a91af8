#include <catch2/catch_amalgamated.hpp>

#include "uascan/client/probe.hpp"
#include "uascan/mock/mock_server.hpp"
#include "uascan/net/tcp.hpp"

#include <thread>

using namespace uascan;
using client::ChannelProbe;
using client::SessionProbe;

namespace {

client::ProbeOptions fast_options() {
    client::ProbeOptions opts;
    opts.budget.inter_request_delay = std::chrono::milliseconds(1);
    opts.io_timeout = std::chrono::milliseconds(2000);
    return opts;
}

client::ProbeOptions fast_options_with_cert() {
    auto opts = fast_options();
    opts.client_certificate = client::make_client_certificate(opts);
    return opts;
}

mock::FixtureConfig plain_fixture() {
    mock::FixtureConfig cfg;
    cfg.endpoints.push_back({wire::SecurityMode::None, PolicyId::None, "",
                             {wire::UserTokenType::Anonymous}});
    return cfg;
}

mock::MockNodeSpec node_spec(wire::NodeId id, std::string name, wire::NodeClass cls,
                             uint8_t access = wire::access_level::CurrentRead,
                             bool executable = false) {
    return {id, std::move(name), cls, access, executable, std::nullopt};
}

}  // namespace

TEST_CASE("probe of a plain fixture captures endpoints, session, and address space") {
    auto cfg = plain_fixture();
    cfg.namespaces = {"urn:factory:line1"};
    cfg.software_version = "3.4.1";
    cfg.nodes.push_back(node_spec(wire::NodeId::numeric(1, 100), "Pump", wire::NodeClass::Object));
    cfg.nodes.push_back(node_spec(wire::NodeId::numeric(1, 101), "Setpoint",
                                  wire::NodeClass::Variable,
                                  wire::access_level::CurrentRead | wire::access_level::CurrentWrite));
    cfg.nodes.push_back(
        node_spec(wire::NodeId::numeric(1, 102), "Start", wire::NodeClass::Method, 0, true));
    mock::MockServer server(cfg);

    auto result = client::probe_host(server.target(), fast_options());

    CHECK(result.reached);
    CHECK(result.error.empty());
    REQUIRE(result.endpoints.size() == 1);
    CHECK(result.application_uri == cfg.application_uri);
    CHECK(result.product_uri == cfg.product_uri);
    CHECK(result.software_version == "3.4.1");
    CHECK_FALSE(result.server_certificate.has_value());
    CHECK(result.channel_probe == ChannelProbe::NotAttempted);
    CHECK(result.session_probe == SessionProbe::AnonymousAccepted);

    REQUIRE(result.address_space.has_value());
    const auto& snap = *result.address_space;
    CHECK_FALSE(snap.truncated);
    CHECK(snap.nodes.size() == mock::skeleton::kNodeCount + 3);
    CHECK(snap.namespace_array.size() == 2);
    CHECK(snap.namespace_array[1] == "urn:factory:line1");

    const auto& setpoint = snap.nodes.at(wire::NodeId::numeric(1, 101));
    CHECK(setpoint.node_class == wire::NodeClass::Variable);
    CHECK(setpoint.access_level ==
          (wire::access_level::CurrentRead | wire::access_level::CurrentWrite));
    const auto& start = snap.nodes.at(wire::NodeId::numeric(1, 102));
    CHECK(start.node_class == wire::NodeClass::Method);
    CHECK(start.executable == true);
    const auto& root = snap.nodes.at(wire::NodeId::numeric(0, 84));
    CHECK(root.browse_name == "Root");

    CHECK(result.bytes_sent > 0);
    CHECK(result.bytes_received > result.bytes_sent);  // endpoints dominate
    CHECK(result.duration.count() >= 0);
    CHECK(result.observed_at > 0);

    // the probe never mutates: no writes, no calls
    CHECK(server.count(mock::ServiceKind::Write) == 0);
    CHECK(server.count(mock::ServiceKind::Call) == 0);
    CHECK(server.count(mock::ServiceKind::CloseSession) == 1);
}

TEST_CASE("probe rides the secured channel when no plain endpoint exists") {
    mock::FixtureConfig cfg;
    cfg.endpoints.push_back({wire::SecurityMode::SignAndEncrypt, PolicyId::Basic256Sha256, "",
                             {wire::UserTokenType::Anonymous}});
    mock::MockServer server(cfg);

    auto result = client::probe_host(server.target(), fast_options_with_cert());

    CHECK(result.reached);
    REQUIRE(result.endpoints.size() == 1);
    CHECK(result.server_certificate.has_value());
    CHECK(result.channel_probe == ChannelProbe::Accepted);
    CHECK(result.session_probe == SessionProbe::AnonymousAccepted);
    REQUIRE(result.address_space.has_value());
    CHECK(result.address_space->nodes.size() == mock::skeleton::kNodeCount);

    // two connections: discovery + secured probe
    CHECK(server.count(mock::ServiceKind::Hello) == 2);
    CHECK(server.count(mock::ServiceKind::OpenSecureChannel) == 2);
}

TEST_CASE("probe opens the weakest advertised secured policy") {
    mock::FixtureConfig cfg;
    cfg.endpoints.push_back({wire::SecurityMode::SignAndEncrypt, PolicyId::Basic256Sha256, "",
                             {wire::UserTokenType::Username}});
    cfg.endpoints.push_back({wire::SecurityMode::Sign, PolicyId::Basic128Rsa15, "",
                             {wire::UserTokenType::Username}});
    mock::MockServer server(cfg);

    auto result = client::probe_host(server.target(), fast_options_with_cert());

    CHECK(result.channel_probe == ChannelProbe::Accepted);
    // anonymous is not on offer anywhere: the attempt itself is the probe
    CHECK(result.session_probe == SessionProbe::AuthenticationRejected);
    CHECK(result.session_status == wire::status::Bad_IdentityTokenRejected);
    CHECK_FALSE(result.address_space.has_value());

    std::vector<std::string> opens;
    for (const auto& entry : server.log())
        if (entry.kind == mock::ServiceKind::OpenSecureChannel) opens.push_back(entry.detail);
    REQUIRE(opens.size() == 2);
    CHECK(opens[0] == policy_uri(PolicyId::None));
    CHECK(opens[1] == policy_uri(PolicyId::Basic128Rsa15));
}

TEST_CASE("certificate rejection maps to CertificateRejected and SecureChannelRejected") {
    mock::FixtureConfig cfg;
    cfg.endpoints.push_back({wire::SecurityMode::Sign, PolicyId::Basic256Sha256, "",
                             {wire::UserTokenType::Anonymous}});
    cfg.accept_client_cert = false;
    mock::MockServer server(cfg);

    auto result = client::probe_host(server.target(), fast_options_with_cert());

    CHECK(result.reached);
    CHECK(result.channel_probe == ChannelProbe::CertificateRejected);
    CHECK(result.channel_status == wire::status::Bad_CertificateUntrusted);
    CHECK(result.session_probe == SessionProbe::SecureChannelRejected);
    CHECK(result.session_status == wire::status::Bad_CertificateUntrusted);
    CHECK_FALSE(result.address_space.has_value());
}

TEST_CASE("missing client certificate is a certificate rejection") {
    mock::FixtureConfig cfg;
    cfg.endpoints.push_back({wire::SecurityMode::SignAndEncrypt, PolicyId::Aes256Sha256RsaPss, "",
                             {wire::UserTokenType::Anonymous}});
    mock::MockServer server(cfg);

    auto result = client::probe_host(server.target(), fast_options());  // no certificate

    CHECK(result.channel_probe == ChannelProbe::CertificateRejected);
    CHECK(result.channel_status == wire::status::Bad_SecurityChecksFailed);
    CHECK(result.session_probe == SessionProbe::SecureChannelRejected);
}

TEST_CASE("plain endpoint plus secured endpoint runs session on the plain channel") {
    mock::FixtureConfig cfg;
    cfg.endpoints.push_back({wire::SecurityMode::None, PolicyId::None, "",
                             {wire::UserTokenType::Anonymous}});
    cfg.endpoints.push_back({wire::SecurityMode::SignAndEncrypt, PolicyId::Basic256Sha256, "",
                             {wire::UserTokenType::Username}});
    cfg.accept_client_cert = false;  // secured channel verdict is independent
    mock::MockServer server(cfg);

    auto result = client::probe_host(server.target(), fast_options_with_cert());

    CHECK(result.session_probe == SessionProbe::AnonymousAccepted);
    CHECK(result.address_space.has_value());
    CHECK(result.channel_probe == ChannelProbe::CertificateRejected);
    CHECK(server.count(mock::ServiceKind::Hello) == 2);
    CHECK(server.count(mock::ServiceKind::CreateSession) == 1);
}

TEST_CASE("activation faults map to session probe outcomes") {
    SECTION("anonymous not offered") {
        mock::FixtureConfig cfg;
        cfg.endpoints.push_back({wire::SecurityMode::None, PolicyId::None, "",
                                 {wire::UserTokenType::Username}});
        mock::MockServer server(cfg);
        auto result = client::probe_host(server.target(), fast_options());
        CHECK(result.session_probe == SessionProbe::AuthenticationRejected);
        CHECK(result.session_status == wire::status::Bad_IdentityTokenRejected);
    }
    SECTION("server faults on activate") {
        auto cfg = plain_fixture();
        cfg.anonymous_session = mock::AnonBehavior::FaultOnActivate;
        mock::MockServer server(cfg);
        auto result = client::probe_host(server.target(), fast_options());
        CHECK(result.session_probe == SessionProbe::InvalidConfiguration);
        CHECK(result.session_status == wire::status::Bad_InternalError);
    }
    SECTION("server faults on create") {
        auto cfg = plain_fixture();
        cfg.anonymous_session = mock::AnonBehavior::FaultOnCreate;
        mock::MockServer server(cfg);
        auto result = client::probe_host(server.target(), fast_options());
        CHECK(result.session_probe == SessionProbe::InvalidConfiguration);
        CHECK(result.session_status == wire::status::Bad_InternalError);
        CHECK_FALSE(result.address_space.has_value());
    }
}

TEST_CASE("unreachable and non-OPC-UA targets") {
    SECTION("connection refused") {
        net::TcpListener probe_port;  // grab a free port, then close it
        REQUIRE_NOTHROW(probe_port = net::TcpListener::bind_to("127.0.0.1", 0));
        const uint16_t port = probe_port.port();
        probe_port.close();

        auto opts = fast_options();
        opts.io_timeout = std::chrono::milliseconds(500);
        auto result = client::probe_host(net::Target{"127.0.0.1", port}, opts);
        CHECK_FALSE(result.reached);
        CHECK_FALSE(result.error.empty());
        CHECK(result.session_probe == SessionProbe::NotAttempted);
        CHECK(result.duration.count() >= 0);
    }
    SECTION("speaks something else") {
        auto listener = net::TcpListener::bind_to("127.0.0.1", 0);
        std::thread impostor([&listener] {
            auto conn = listener.accept(std::chrono::milliseconds(2000));
            if (!conn) return;
            const char banner[] = "HTTP/1.1 400 Bad Request\r\n\r\n";
            conn->send_all(BytesView(reinterpret_cast<const uint8_t*>(banner), sizeof banner - 1));
        });
        auto opts = fast_options();
        opts.io_timeout = std::chrono::milliseconds(500);
        auto result = client::probe_host(net::Target{"127.0.0.1", listener.port()}, opts);
        impostor.join();
        CHECK_FALSE(result.reached);
        CHECK_FALSE(result.error.empty());
    }
}

TEST_CASE("traversal honours the node cap and follows continuation points") {
    auto cfg = plain_fixture();
    for (uint32_t i = 0; i < 40; ++i)
        cfg.nodes.push_back(node_spec(wire::NodeId::numeric(1, 1000 + i),
                                      "Tag" + std::to_string(i), wire::NodeClass::Variable));
    mock::MockServer server(cfg);

    SECTION("cap trips and marks the snapshot truncated") {
        auto opts = fast_options();
        opts.max_nodes = 10;
        auto result = client::probe_host(server.target(), opts);
        REQUIRE(result.address_space.has_value());
        CHECK(result.address_space->truncated);
        CHECK(result.address_space->nodes.size() >= 10);
        CHECK(result.address_space->nodes.size() < 40);
    }
    SECTION("small per-node window still recovers every reference") {
        auto opts = fast_options();
        opts.max_references = 7;  // Objects folder alone has 41 children
        auto result = client::probe_host(server.target(), opts);
        REQUIRE(result.address_space.has_value());
        CHECK_FALSE(result.address_space->truncated);
        CHECK(result.address_space->nodes.size() == mock::skeleton::kNodeCount + 40);
        CHECK(server.count(mock::ServiceKind::BrowseNext) >= 5);
    }
}

TEST_CASE("byte budget exhaustion truncates the walk and stops within one request") {
    // a 60-deep chain forces one browse round per level, so the budget trips
    // mid-walk rather than after one huge response
    auto cfg = plain_fixture();
    for (uint32_t i = 0; i < 60; ++i) {
        auto spec = node_spec(wire::NodeId::numeric(1, 2000 + i), "Link" + std::to_string(i),
                              wire::NodeClass::Object);
        if (i > 0) spec.parent = wire::NodeId::numeric(1, 2000 + i - 1);
        cfg.nodes.push_back(spec);
    }
    mock::MockServer server(cfg);

    auto opts = fast_options();
    opts.budget.max_bytes_per_host = 8 * 1024;  // endpoints + session fit; the walk does not
    auto result = client::probe_host(server.target(), opts);

    CHECK(result.session_probe == SessionProbe::AnonymousAccepted);
    REQUIRE(result.address_space.has_value());
    CHECK(result.address_space->truncated);
    CHECK(result.address_space->nodes.size() < mock::skeleton::kNodeCount + 60);
    // overshoot is bounded by a single response, not unbounded streaming
    CHECK(result.bytes_sent + result.bytes_received < 8 * 1024 + 64 * 1024);
}

TEST_CASE("probe results are equality-comparable for snapshot diffing") {
    auto cfg = plain_fixture();
    mock::MockServer server(cfg);
    auto opts = fast_options();
    auto a = client::probe_host(server.target(), opts);
    auto b = a;
    CHECK(a == b);
    b.session_probe = SessionProbe::AuthenticationRejected;
    CHECK_FALSE(a == b);
}
