#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "uascan/cert/certificate.hpp"
#include "uascan/errors.hpp"
#include "uascan/mock/fixture.hpp"
#include "uascan/net/framing.hpp"
#include "uascan/net/tcp.hpp"
#include "uascan/net/url.hpp"
#include "uascan/policy.hpp"
#include "uascan/wire/services.hpp"
#include "uascan/wire/transport.hpp"
#include "uascan/wire/types.hpp"

namespace uascan::mock {

// ---------------------------------------------------------------------------
// Service log
//
// Every inbound service lands here with a monotonic timestamp, so tests can
// check both *what* a scanner asked for (never Write, never Call) and *when*
// (inter-request pacing).
// ---------------------------------------------------------------------------

enum class ServiceKind {
    Hello,
    OpenSecureChannel,
    GetEndpoints,
    CreateSession,
    ActivateSession,
    Browse,
    BrowseNext,
    Read,
    Write,
    Call,
    CloseSession,
    CloseSecureChannel,
    Unknown,
};

inline const char* to_string(ServiceKind k) {
    switch (k) {
    case ServiceKind::Hello: return "Hello";
    case ServiceKind::OpenSecureChannel: return "OpenSecureChannel";
    case ServiceKind::GetEndpoints: return "GetEndpoints";
    case ServiceKind::CreateSession: return "CreateSession";
    case ServiceKind::ActivateSession: return "ActivateSession";
    case ServiceKind::Browse: return "Browse";
    case ServiceKind::BrowseNext: return "BrowseNext";
    case ServiceKind::Read: return "Read";
    case ServiceKind::Write: return "Write";
    case ServiceKind::Call: return "Call";
    case ServiceKind::CloseSession: return "CloseSession";
    case ServiceKind::CloseSecureChannel: return "CloseSecureChannel";
    case ServiceKind::Unknown: return "Unknown";
    }
    return "Unknown";
}

struct LogEntry {
    ServiceKind kind = ServiceKind::Unknown;
    std::chrono::steady_clock::time_point at;
    std::string detail;
};

/// All response timestamps: 2020-09-01T00:00:00Z as FILETIME. Frozen so a
/// fixture's responses depend only on config and request sequence.
constexpr int64_t kFixtureTimestamp = 132433920000000000;

// ---------------------------------------------------------------------------
// MockServer
// ---------------------------------------------------------------------------

class MockServer {
public:
    explicit MockServer(FixtureConfig cfg, std::string host = "127.0.0.1", uint16_t port = 0)
        : cfg_(std::move(cfg)), host_(std::move(host)) {
        cfg_.validate();
        if (cfg_.certificate_der) {
            cert_der_ = cfg_.certificate_der;
        } else if (cfg_.certificate_spec) {
            cert::SelfSignedSpec spec = *cfg_.certificate_spec;
            if (spec.application_uri.empty()) spec.application_uri = cfg_.application_uri;
            cert_der_ = cert::generate_self_signed(spec);
        } else if (needs_certificate()) {
            cert::SelfSignedSpec spec;
            spec.common_name = "uascan mock";
            spec.application_uri = cfg_.application_uri;
            cert_der_ = cert::generate_self_signed(spec);
        }
        build_nodes();
        listener_ = net::TcpListener::bind_to(host_, port);
        endpoints_ = build_endpoints();
        accept_thread_ = std::thread([this] { accept_loop(); });
    }

    ~MockServer() { stop(); }
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    void stop() {
        if (stop_.exchange(true)) return;
        listener_.close();
        if (accept_thread_.joinable()) accept_thread_.join();
        std::vector<std::thread> workers;
        {
            std::lock_guard lock(workers_mu_);
            workers.swap(workers_);
        }
        for (auto& t : workers)
            if (t.joinable()) t.join();
    }

    uint16_t port() const { return listener_.port(); }
    net::Target target() const { return net::Target{host_, port()}; }
    std::string url() const { return net::opc_url(target()); }
    const FixtureConfig& config() const { return cfg_; }
    const std::optional<Bytes>& certificate() const { return cert_der_; }
    const std::vector<wire::EndpointDescription>& endpoints() const { return endpoints_; }

    std::vector<LogEntry> log() const {
        std::lock_guard lock(log_mu_);
        return log_;
    }
    size_t count(ServiceKind k) const {
        std::lock_guard lock(log_mu_);
        size_t n = 0;
        for (const auto& e : log_)
            if (e.kind == k) ++n;
        return n;
    }

private:
    // --- address space ------------------------------------------------------

    struct Node {
        std::string browse_name;
        wire::NodeClass node_class = wire::NodeClass::Object;
        uint8_t access_level = 0;
        bool executable = false;
        std::vector<wire::NodeId> children;
    };

    void add_node(uint32_t id, const char* name, wire::NodeClass cls, uint8_t access = 0) {
        nodes_[wire::NodeId::numeric(0, id)] = Node{name, cls, access, false, {}};
    }

    void link(const wire::NodeId& parent, const wire::NodeId& child) {
        nodes_.at(parent).children.push_back(child);
    }

    void build_nodes() {
        using wire::NodeClass;
        add_node(skeleton::Root, "Root", NodeClass::Object);
        add_node(skeleton::Objects, "Objects", NodeClass::Object);
        add_node(skeleton::Types, "Types", NodeClass::Object);
        add_node(skeleton::Views, "Views", NodeClass::Object);
        add_node(skeleton::Server, "Server", NodeClass::Object);
        add_node(skeleton::NamespaceArray, "NamespaceArray", NodeClass::Variable,
                 wire::access_level::CurrentRead);
        add_node(skeleton::SoftwareVersion, "SoftwareVersion", NodeClass::Variable,
                 wire::access_level::CurrentRead);
        auto num = [](uint32_t v) { return wire::NodeId::numeric(0, v); };
        link(num(skeleton::Root), num(skeleton::Objects));
        link(num(skeleton::Root), num(skeleton::Types));
        link(num(skeleton::Root), num(skeleton::Views));
        link(num(skeleton::Objects), num(skeleton::Server));
        link(num(skeleton::Server), num(skeleton::NamespaceArray));
        link(num(skeleton::Server), num(skeleton::SoftwareVersion));

        for (const auto& spec : cfg_.nodes)
            nodes_[spec.id] =
                Node{spec.browse_name, spec.node_class, spec.access_level, spec.executable, {}};
        for (const auto& spec : cfg_.nodes)
            link(spec.parent ? *spec.parent : num(skeleton::Objects), spec.id);
        for (const auto& [from, to] : cfg_.extra_references) link(from, to);
    }

    std::vector<std::string> namespace_array() const {
        std::vector<std::string> out{"http://opcfoundation.org/UA/"};
        out.insert(out.end(), cfg_.namespaces.begin(), cfg_.namespaces.end());
        return out;
    }

    // --- endpoint list ------------------------------------------------------

    bool needs_certificate() const {
        for (const auto& e : cfg_.endpoints)
            if (e.mode != wire::SecurityMode::None || e.policy != PolicyId::None) return true;
        return false;
    }

    bool offers_anonymous() const {
        for (const auto& e : cfg_.endpoints)
            for (auto t : e.tokens)
                if (t == wire::UserTokenType::Anonymous) return true;
        return false;
    }

    std::vector<wire::EndpointDescription> build_endpoints() const {
        wire::ApplicationDescription app;
        app.application_uri = wire::UaString(cfg_.application_uri);
        app.product_uri = wire::UaString(cfg_.product_uri);
        app.application_name.text = wire::UaString(cfg_.application_name);
        app.application_type = cfg_.referral_endpoints.empty() ? 0 : 3;

        size_t count = cfg_.referral_endpoints.empty() ? cfg_.endpoints.size()
                                                       : cfg_.referral_endpoints.size();
        std::vector<wire::EndpointDescription> out;
        out.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            const MockEndpoint& t = cfg_.endpoints[i % cfg_.endpoints.size()];
            wire::EndpointDescription e;
            e.endpoint_url = wire::UaString(cfg_.referral_endpoints.empty()
                                                ? url()
                                                : cfg_.referral_endpoints[i]);
            e.server = app;
            if (cert_der_) e.server_certificate = wire::UaBytes(*cert_der_);
            e.security_mode = t.mode;
            e.security_policy_uri = wire::UaString(t.advertised_policy_uri());
            for (size_t k = 0; k < t.tokens.size(); ++k) {
                wire::UserTokenPolicy p;
                p.policy_id = wire::UaString(std::string(wire::to_string(t.tokens[k])) + "-" +
                                             std::to_string(k));
                p.token_type = t.tokens[k];
                e.user_token_policies.push_back(std::move(p));
            }
            e.transport_profile_uri = wire::UaString(
                "http://opcfoundation.org/UA-Profile/Transport/uatcp-uasc-uabinary");
            e.security_level =
                static_cast<uint8_t>(wire::mode_rank(t.mode) * 10 + policy_strength(t.policy));
            out.push_back(std::move(e));
        }
        return out;
    }

    // --- connection handling ------------------------------------------------

    struct Session {
        wire::NodeId session_id;
        wire::NodeId auth_token;
        bool activated = false;
    };

    struct Pending {
        std::vector<wire::ReferenceDescription> references;
        size_t max_per_reply = 0;
    };

    struct ConnState {
        explicit ConnState(net::TcpConn c) : conn(std::move(c)) {}

        net::TcpConn conn;
        bool got_hello = false;
        uint32_t chunk_cap = 8192;
        uint32_t channel_id = 0;
        uint32_t token_id = 0;
        uint32_t server_sequence = 1;
        wire::ChunkAssembler assembler;
        std::optional<Session> session;
        std::map<uint32_t, Pending> continuations;
        uint32_t next_continuation = 1;
    };

    void accept_loop() {
        while (!stop_.load(std::memory_order_relaxed)) {
            std::optional<net::TcpConn> conn;
            try {
                conn = listener_.accept(std::chrono::milliseconds(100));
            } catch (const NetError&) {
                break;  // listener closed under us
            }
            if (!conn) continue;
            std::lock_guard lock(workers_mu_);
            workers_.emplace_back(
                [this, c = std::move(*conn)]() mutable { handle_connection(std::move(c)); });
        }
    }

    void handle_connection(net::TcpConn conn) {
        ConnState st(std::move(conn));
        try {
            while (!stop_.load(std::memory_order_relaxed)) {
                if (!st.conn.readable(std::chrono::milliseconds(100))) continue;
                auto frame = net::read_frame(st.conn, std::chrono::seconds(5));
                if (!on_frame(st, frame)) break;
            }
        } catch (const NetError&) {
            // peer hung up or stalled: nothing to answer
        } catch (const CodecError& e) {
            try {
                send_error(st, wire::status::Bad_TcpMessageTypeInvalid, e.what());
            } catch (const Error&) {
            }
        }
        st.conn.close();
    }

    bool on_frame(ConnState& st, const wire::TransportMessage& frame) {
        switch (frame.kind) {
        case wire::MsgKind::Hello: return on_hello(st, frame.payload);
        case wire::MsgKind::Open: return on_open(st, frame.payload);
        case wire::MsgKind::Msg: return on_msg(st, frame);
        case wire::MsgKind::Close: return on_close_channel(st, frame.payload);
        default:
            send_error(st, wire::status::Bad_TcpMessageTypeInvalid, "unexpected frame kind");
            return false;
        }
    }

    bool on_hello(ConnState& st, BytesView payload) {
        wire::HelloBody hello = wire::decode_hello(payload);
        push_log(ServiceKind::Hello, hello.endpoint_url.str());
        uint32_t buffer = std::max<uint32_t>(hello.receive_buffer_size, 8192);
        if (cfg_.response_chunk_limit) buffer = std::min(buffer, cfg_.response_chunk_limit);
        st.chunk_cap = buffer - 64;  // frame + symmetric headers ride inside the buffer
        st.got_hello = true;

        wire::AckBody ack;
        ack.protocol_version = 0;
        ack.receive_buffer_size = 1u << 16;
        ack.send_buffer_size = buffer;
        ack.max_message_size = 16u << 20;
        ack.max_chunk_count = 4096;
        net::write_frame(st.conn, wire::MsgKind::Ack, 'F', wire::encode_ack(ack));
        return true;
    }

    bool on_open(ConnState& st, BytesView payload) {
        if (!st.got_hello) {
            send_error(st, wire::status::Bad_TcpMessageTypeInvalid, "OPN before HEL");
            return false;
        }
        wire::OpenPayload open = wire::decode_open_payload(payload);
        std::string uri = open.security.security_policy_uri.str();
        push_log(ServiceKind::OpenSecureChannel, uri);

        auto body = wire::decode_message(open.body);
        auto* req = std::get_if<wire::OpenSecureChannelRequest>(&body);
        if (!req) {
            send_error(st, wire::status::Bad_TcpMessageTypeInvalid, "OPN without open request");
            return false;
        }

        const bool secured = !uri.empty() && policy_from_uri(uri) != PolicyId::None;
        Bytes client_thumbprint;
        if (secured) {
            if (!cert_der_) {
                send_error(st, wire::status::Bad_SecurityPolicyRejected, "no secured endpoints");
                return false;
            }
            const auto& sender = open.security.sender_certificate;
            if (sender.null || sender.value.empty()) {
                send_error(st, wire::status::Bad_SecurityChecksFailed, "client certificate missing");
                return false;
            }
            try {
                cert::parse_certificate(sender.value);
            } catch (const CertError&) {
                send_error(st, wire::status::Bad_SecurityChecksFailed, "client certificate malformed");
                return false;
            }
            if (!cfg_.accept_client_cert) {
                send_error(st, wire::status::Bad_CertificateUntrusted, "client certificate not trusted");
                return false;
            }
            client_thumbprint = cert::sha1_thumbprint(sender.value);
        }

        st.channel_id = next_channel_.fetch_add(1, std::memory_order_relaxed);
        st.token_id = 1;

        wire::OpenSecureChannelResponse resp;
        resp.header = response_header(req->header.request_handle);
        resp.server_protocol_version = 0;
        resp.token.channel_id = st.channel_id;
        resp.token.token_id = st.token_id;
        resp.token.created_at = kFixtureTimestamp;
        resp.token.revised_lifetime_ms =
            std::clamp<uint32_t>(req->requested_lifetime_ms, 60000, 3600000);
        if (secured) resp.server_nonce = wire::UaBytes(Bytes(32, 0));

        wire::OpenPayload out;
        out.channel_id = st.channel_id;
        out.security.security_policy_uri = wire::UaString(uri);
        if (secured) {
            out.security.sender_certificate = wire::UaBytes(*cert_der_);
            out.security.receiver_certificate_thumbprint = wire::UaBytes(client_thumbprint);
        }
        out.sequence.sequence_number = st.server_sequence++;
        out.sequence.request_id = open.sequence.request_id;
        out.body = wire::encode_message(resp);
        net::write_frame(st.conn, wire::MsgKind::Open, 'F', wire::encode_open_payload(out));
        return true;
    }

    bool on_msg(ConnState& st, const wire::TransportMessage& frame) {
        wire::MsgPayload msg = wire::decode_msg_payload(frame.payload);
        if (st.channel_id == 0 || msg.channel_id != st.channel_id) {
            send_error(st, wire::status::Bad_CommunicationError, "no such secure channel");
            return false;
        }
        auto body = st.assembler.feed(frame.chunk, msg.body);
        if (!body) return true;
        dispatch(st, *body, msg.sequence.request_id);
        return true;
    }

    bool on_close_channel(ConnState&, BytesView payload) {
        try {
            wire::decode_msg_payload(payload);
        } catch (const CodecError&) {
            // close is close, however mangled
        }
        push_log(ServiceKind::CloseSecureChannel);
        return false;  // no response; the connection ends here
    }

    // --- service dispatch ---------------------------------------------------

    void dispatch(ConnState& st, BytesView body, uint32_t request_id) {
        wire::ServiceBody sb = wire::decode_message(body);
        if (auto* r = std::get_if<wire::GetEndpointsRequest>(&sb))
            return on_get_endpoints(st, *r, request_id);
        if (auto* r = std::get_if<wire::CreateSessionRequest>(&sb))
            return on_create_session(st, *r, request_id);
        if (auto* r = std::get_if<wire::ActivateSessionRequest>(&sb))
            return on_activate_session(st, *r, request_id);
        if (auto* r = std::get_if<wire::BrowseRequest>(&sb)) return on_browse(st, *r, request_id);
        if (auto* r = std::get_if<wire::BrowseNextRequest>(&sb))
            return on_browse_next(st, *r, request_id);
        if (auto* r = std::get_if<wire::ReadRequest>(&sb)) return on_read(st, *r, request_id);
        if (auto* r = std::get_if<wire::CloseSessionRequest>(&sb))
            return on_close_session(st, *r, request_id);
        if (auto* r = std::get_if<wire::OpaqueService>(&sb)) return on_opaque(st, *r, request_id);
        push_log(ServiceKind::Unknown);
        send_fault(st, 0, wire::status::Bad_ServiceUnsupported, request_id);
    }

    void on_get_endpoints(ConnState& st, const wire::GetEndpointsRequest& req,
                          uint32_t request_id) {
        push_log(ServiceKind::GetEndpoints, req.endpoint_url.str());
        wire::GetEndpointsResponse resp;
        resp.header = response_header(req.header.request_handle);
        resp.endpoints = endpoints_;
        send_response(st, wire::encode_message(resp), request_id);
    }

    void on_create_session(ConnState& st, const wire::CreateSessionRequest& req,
                           uint32_t request_id) {
        push_log(ServiceKind::CreateSession, req.session_name.str());
        if (cfg_.anonymous_session == AnonBehavior::FaultOnCreate) {
            send_fault(st, req.header.request_handle, wire::status::Bad_InternalError, request_id);
            return;
        }
        uint32_t n = next_session_.fetch_add(1, std::memory_order_relaxed);
        st.session = Session{wire::NodeId::numeric(1, n),
                             wire::NodeId::numeric(0, 0xA0000000u + n), false};

        wire::CreateSessionResponse resp;
        resp.header = response_header(req.header.request_handle);
        resp.session_id = st.session->session_id;
        resp.authentication_token = st.session->auth_token;
        resp.revised_session_timeout_ms =
            req.requested_session_timeout_ms > 0 ? req.requested_session_timeout_ms : 120000.0;
        resp.server_nonce = wire::UaBytes(Bytes(32, 0));
        if (cert_der_) resp.server_certificate = wire::UaBytes(*cert_der_);
        resp.server_endpoints = endpoints_;
        resp.max_request_message_size = 16u << 20;
        send_response(st, wire::encode_message(resp), request_id);
    }

    void on_activate_session(ConnState& st, const wire::ActivateSessionRequest& req,
                             uint32_t request_id) {
        const auto& tok = req.user_identity_token;
        push_log(ServiceKind::ActivateSession, identity_kind(tok));
        if (!st.session || req.header.authentication_token != st.session->auth_token) {
            send_fault(st, req.header.request_handle, wire::status::Bad_SessionIdInvalid, request_id);
            return;
        }

        bool anonymous = false;
        if (wire::parse_anonymous_token(tok)) {
            anonymous = true;
        } else if (tok.type_id.is_numeric() && tok.type_id.namespace_index == 0 &&
                   tok.type_id.numeric_value() == wire::service_id::UserNameIdentityToken) {
            send_fault(st, req.header.request_handle, wire::status::Bad_IdentityTokenRejected,
                       request_id);
            return;
        } else if (tok.encoding == 0) {
            anonymous = true;  // a null token defaults to anonymous
        } else {
            send_fault(st, req.header.request_handle, wire::status::Bad_IdentityTokenInvalid,
                       request_id);
            return;
        }

        if (anonymous) {
            if (!offers_anonymous()) {
                send_fault(st, req.header.request_handle, wire::status::Bad_IdentityTokenRejected,
                           request_id);
                return;
            }
            if (cfg_.anonymous_session == AnonBehavior::FaultOnActivate) {
                send_fault(st, req.header.request_handle, wire::status::Bad_InternalError, request_id);
                return;
            }
        }

        st.session->activated = true;
        wire::ActivateSessionResponse resp;
        resp.header = response_header(req.header.request_handle);
        resp.server_nonce = wire::UaBytes(Bytes(32, 0));
        send_response(st, wire::encode_message(resp), request_id);
    }

    bool require_activated(ConnState& st, const wire::RequestHeader& h, uint32_t request_id) {
        if (!st.session || h.authentication_token != st.session->auth_token) {
            send_fault(st, h.request_handle, wire::status::Bad_SessionIdInvalid, request_id);
            return false;
        }
        if (!st.session->activated) {
            send_fault(st, h.request_handle, wire::status::Bad_SessionNotActivated, request_id);
            return false;
        }
        return true;
    }

    void on_browse(ConnState& st, const wire::BrowseRequest& req, uint32_t request_id) {
        push_log(ServiceKind::Browse, std::to_string(req.nodes_to_browse.size()) + " nodes");
        if (!require_activated(st, req.header, request_id)) return;
        if (req.nodes_to_browse.size() > kMaxOperations) {
            send_fault(st, req.header.request_handle, wire::status::Bad_TooManyOperations, request_id);
            return;
        }
        wire::BrowseResponse resp;
        resp.header = response_header(req.header.request_handle);
        resp.results.reserve(req.nodes_to_browse.size());
        for (const auto& desc : req.nodes_to_browse)
            resp.results.push_back(
                browse_one(st, desc, req.requested_max_references_per_node));
        send_response(st, wire::encode_message(resp), request_id);
    }

    wire::BrowseResult browse_one(ConnState& st, const wire::BrowseDescription& desc,
                                  uint32_t requested_max) {
        auto it = nodes_.find(desc.node_id);
        if (it == nodes_.end()) return wire::BrowseResult{wire::status::Bad_NodeIdUnknown, {}, {}};

        wire::BrowseResult out;
        if (desc.direction == wire::BrowseDirection::Inverse) return out;
        for (const auto& child_id : it->second.children) {
            const Node& child = nodes_.at(child_id);
            if (desc.node_class_mask != 0 &&
                (desc.node_class_mask & class_bits(child.node_class)) == 0)
                continue;
            out.references.push_back(reference_to(child_id, child));
        }
        if (requested_max != 0 && out.references.size() > requested_max) {
            Pending rest;
            rest.references.assign(out.references.begin() + requested_max,
                                   out.references.end());
            rest.max_per_reply = requested_max;
            out.references.resize(requested_max);
            out.continuation_point = make_continuation(st, std::move(rest));
        }
        return out;
    }

    void on_browse_next(ConnState& st, const wire::BrowseNextRequest& req, uint32_t request_id) {
        push_log(ServiceKind::BrowseNext,
                 std::to_string(req.continuation_points.size()) + " points");
        if (!require_activated(st, req.header, request_id)) return;
        wire::BrowseNextResponse resp;
        resp.header = response_header(req.header.request_handle);
        for (const auto& cp : req.continuation_points) {
            auto id = continuation_id(cp);
            if (!id || !st.continuations.count(*id)) {
                resp.results.push_back({wire::status::Bad_ContinuationPointInvalid, {}, {}});
                continue;
            }
            if (req.release_continuation_points) {
                st.continuations.erase(*id);
                resp.results.push_back({wire::status::Good, {}, {}});
                continue;
            }
            Pending pending = std::move(st.continuations.at(*id));
            st.continuations.erase(*id);
            wire::BrowseResult result;
            if (pending.references.size() > pending.max_per_reply) {
                result.references.assign(pending.references.begin(),
                                         pending.references.begin() +
                                             static_cast<ptrdiff_t>(pending.max_per_reply));
                pending.references.erase(pending.references.begin(),
                                         pending.references.begin() +
                                             static_cast<ptrdiff_t>(pending.max_per_reply));
                result.continuation_point = make_continuation(st, std::move(pending));
            } else {
                result.references = std::move(pending.references);
            }
            resp.results.push_back(std::move(result));
        }
        send_response(st, wire::encode_message(resp), request_id);
    }

    void on_read(ConnState& st, const wire::ReadRequest& req, uint32_t request_id) {
        push_log(ServiceKind::Read, std::to_string(req.nodes_to_read.size()) + " attributes");
        if (!require_activated(st, req.header, request_id)) return;
        if (req.nodes_to_read.size() > kMaxOperations) {
            send_fault(st, req.header.request_handle, wire::status::Bad_TooManyOperations, request_id);
            return;
        }
        wire::ReadResponse resp;
        resp.header = response_header(req.header.request_handle);
        resp.results.reserve(req.nodes_to_read.size());
        for (const auto& rv : req.nodes_to_read)
            resp.results.push_back(read_one(rv, req.timestamps_to_return));
        send_response(st, wire::encode_message(resp), request_id);
    }

    wire::DataValue read_one(const wire::ReadValueId& rv, uint32_t timestamps) const {
        auto it = nodes_.find(rv.node_id);
        if (it == nodes_.end()) return bad_value(wire::status::Bad_NodeIdUnknown);
        const Node& node = it->second;

        wire::DataValue out;
        switch (rv.attribute_id) {
        case wire::attribute_id::Value: {
            if (node.node_class != wire::NodeClass::Variable)
                return bad_value(wire::status::Bad_AttributeIdInvalid);
            if ((node.access_level & wire::access_level::CurrentRead) == 0)
                return bad_value(wire::status::Bad_NotReadable);
            if (rv.node_id == wire::NodeId::numeric(0, skeleton::NamespaceArray))
                out.value = wire::Variant::string_array(namespace_array());
            else if (rv.node_id == wire::NodeId::numeric(0, skeleton::SoftwareVersion))
                out.value = wire::Variant::string_value(cfg_.software_version);
            else
                out.value = wire::Variant::scalar(wire::variant_type::Int32, int32_t{0});
            break;
        }
        case wire::attribute_id::AccessLevel:
            if (node.node_class != wire::NodeClass::Variable)
                return bad_value(wire::status::Bad_AttributeIdInvalid);
            out.value = wire::Variant::byte_value(node.access_level);
            break;
        case wire::attribute_id::Executable:
            if (node.node_class != wire::NodeClass::Method)
                return bad_value(wire::status::Bad_AttributeIdInvalid);
            out.value = wire::Variant::boolean_value(node.executable);
            break;
        case wire::attribute_id::NodeClass:
            out.value = wire::Variant::scalar(wire::variant_type::Int32,
                                              static_cast<int32_t>(class_bits(node.node_class)));
            break;
        case wire::attribute_id::BrowseName:
            out.value = wire::Variant::scalar(
                wire::variant_type::QualifiedNameType,
                wire::QualifiedName{rv.node_id.namespace_index,
                                    wire::UaString(node.browse_name)});
            break;
        default: return bad_value(wire::status::Bad_AttributeIdInvalid);
        }
        if (timestamps == 0 || timestamps == 2) out.source_timestamp = kFixtureTimestamp;
        if (timestamps == 1 || timestamps == 2) out.server_timestamp = kFixtureTimestamp;
        return out;
    }

    void on_close_session(ConnState& st, const wire::CloseSessionRequest& req,
                          uint32_t request_id) {
        push_log(ServiceKind::CloseSession);
        if (!st.session || req.header.authentication_token != st.session->auth_token) {
            send_fault(st, req.header.request_handle, wire::status::Bad_SessionIdInvalid, request_id);
            return;
        }
        st.session.reset();
        st.continuations.clear();
        wire::CloseSessionResponse resp;
        resp.header = response_header(req.header.request_handle);
        send_response(st, wire::encode_message(resp), request_id);
    }

    void on_opaque(ConnState& st, const wire::OpaqueService& req, uint32_t request_id) {
        ServiceKind kind = ServiceKind::Unknown;
        if (req.type_id.is_numeric() && req.type_id.namespace_index == 0) {
            if (req.type_id.numeric_value() == wire::service_id::WriteRequest)
                kind = ServiceKind::Write;
            else if (req.type_id.numeric_value() == wire::service_id::CallRequest)
                kind = ServiceKind::Call;
        }
        push_log(kind, req.type_id.to_string());
        send_fault(st, 0, wire::status::Bad_ServiceUnsupported, request_id);
    }

    // --- plumbing -----------------------------------------------------------

    static constexpr size_t kMaxOperations = 10000;

    static wire::ResponseHeader response_header(uint32_t request_handle,
                                                uint32_t result = wire::status::Good) {
        wire::ResponseHeader h;
        h.timestamp = kFixtureTimestamp;
        h.request_handle = request_handle;
        h.service_result = result;
        return h;
    }

    static wire::DataValue bad_value(uint32_t code) {
        wire::DataValue v;
        v.status = code;
        return v;
    }

    static uint32_t class_bits(wire::NodeClass c) {
        switch (c) {
        case wire::NodeClass::Object: return wire::node_class_bits::Object;
        case wire::NodeClass::Variable: return wire::node_class_bits::Variable;
        case wire::NodeClass::Method: return wire::node_class_bits::Method;
        case wire::NodeClass::Other: return 0;
        }
        return 0;
    }

    wire::ReferenceDescription reference_to(const wire::NodeId& id, const Node& node) const {
        wire::ReferenceDescription d;
        d.reference_type_id = wire::NodeId::numeric(0, 35);  // Organizes
        d.is_forward = true;
        d.node_id.node = id;
        d.browse_name = wire::QualifiedName{id.namespace_index, wire::UaString(node.browse_name)};
        d.display_name.text = wire::UaString(node.browse_name);
        d.node_class = class_bits(node.node_class);
        return d;
    }

    wire::UaBytes make_continuation(ConnState& st, Pending pending) const {
        uint32_t id = st.next_continuation++;
        st.continuations.emplace(id, std::move(pending));
        ByteWriter w;
        w.u32(id);
        return wire::UaBytes(w.take());
    }

    static std::optional<uint32_t> continuation_id(const wire::UaBytes& cp) {
        if (cp.null || cp.value.size() != 4) return std::nullopt;
        return static_cast<uint32_t>(cp.value[0]) | static_cast<uint32_t>(cp.value[1]) << 8 |
               static_cast<uint32_t>(cp.value[2]) << 16 |
               static_cast<uint32_t>(cp.value[3]) << 24;
    }

    static std::string identity_kind(const wire::ExtensionObject& tok) {
        if (wire::parse_anonymous_token(tok)) return "anonymous";
        if (tok.encoding == 0) return "null";
        if (tok.type_id.is_numeric() && tok.type_id.namespace_index == 0 &&
            tok.type_id.numeric_value() == wire::service_id::UserNameIdentityToken)
            return "username";
        return tok.type_id.to_string();
    }

    void send_response(ConnState& st, BytesView body, uint32_t request_id) {
        auto frames = wire::chunk_message(st.channel_id, st.token_id, st.server_sequence,
                                          request_id, body, st.chunk_cap);
        for (const auto& f : frames) st.conn.send_all(f);
    }

    void send_fault(ConnState& st, uint32_t request_handle, uint32_t code, uint32_t request_id) {
        wire::ServiceFault fault;
        fault.header = response_header(request_handle, code);
        send_response(st, wire::encode_message(fault), request_id);
    }

    void send_error(ConnState& st, uint32_t code, const std::string& reason) {
        wire::ErrorBody err;
        err.code = code;
        err.reason = wire::UaString(reason);
        net::write_frame(st.conn, wire::MsgKind::Error, 'F', wire::encode_error(err));
    }

    void push_log(ServiceKind kind, std::string detail = {}) {
        std::lock_guard lock(log_mu_);
        log_.push_back({kind, std::chrono::steady_clock::now(), std::move(detail)});
    }

    FixtureConfig cfg_;
    std::string host_;
    std::optional<Bytes> cert_der_;
    std::map<wire::NodeId, Node> nodes_;
    std::vector<wire::EndpointDescription> endpoints_;
    net::TcpListener listener_;

    std::atomic<bool> stop_{false};
    std::atomic<uint32_t> next_channel_{1};
    std::atomic<uint32_t> next_session_{1};
    std::thread accept_thread_;
    std::mutex workers_mu_;
    std::vector<std::thread> workers_;
    mutable std::mutex log_mu_;
    std::vector<LogEntry> log_;
};

/// Starts one fixture per config. With a non-zero base port the fixtures sit
/// on consecutive ports (base, base+1, ...); with zero each takes an
/// ephemeral port.
inline std::vector<std::unique_ptr<MockServer>> fleet(const std::vector<FixtureConfig>& configs,
                                                      uint16_t base_port = 0,
                                                      const std::string& host = "127.0.0.1") {
    std::vector<std::unique_ptr<MockServer>> out;
    out.reserve(configs.size());
    for (size_t i = 0; i < configs.size(); ++i)
        out.push_back(std::make_unique<MockServer>(
            configs[i], host,
            base_port == 0 ? uint16_t{0} : static_cast<uint16_t>(base_port + i)));
    return out;
}

}  // namespace uascan::mock
