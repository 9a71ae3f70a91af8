#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "uascan/bytes.hpp"
#include "uascan/wire/types.hpp"

namespace uascan::wire {

// ---------------------------------------------------------------------------
// Status codes (the subset this tool produces or interprets)
// ---------------------------------------------------------------------------

namespace status {
constexpr uint32_t Good = 0x00000000;
constexpr uint32_t Bad_UnexpectedError = 0x80010000;
constexpr uint32_t Bad_InternalError = 0x80020000;
constexpr uint32_t Bad_Timeout = 0x800A0000;
constexpr uint32_t Bad_ServiceUnsupported = 0x800B0000;
constexpr uint32_t Bad_CommunicationError = 0x80050000;
constexpr uint32_t Bad_TcpMessageTypeInvalid = 0x807E0000;
constexpr uint32_t Bad_TcpMessageTooLarge = 0x80800000;
constexpr uint32_t Bad_TcpEndpointUrlInvalid = 0x80830000;
constexpr uint32_t Bad_SecurityChecksFailed = 0x80130000;
constexpr uint32_t Bad_CertificateUntrusted = 0x801A0000;
constexpr uint32_t Bad_IdentityTokenInvalid = 0x80200000;
constexpr uint32_t Bad_IdentityTokenRejected = 0x80210000;
constexpr uint32_t Bad_SecurityPolicyRejected = 0x80550000;
constexpr uint32_t Bad_SecurityModeRejected = 0x80560000;
constexpr uint32_t Bad_SessionIdInvalid = 0x80250000;
constexpr uint32_t Bad_SessionNotActivated = 0x80270000;
constexpr uint32_t Bad_NodeIdUnknown = 0x80340000;
constexpr uint32_t Bad_AttributeIdInvalid = 0x80350000;
constexpr uint32_t Bad_UserAccessDenied = 0x801F0000;
constexpr uint32_t Bad_NotReadable = 0x803A0000;
constexpr uint32_t Bad_ContinuationPointInvalid = 0x804A0000;
constexpr uint32_t Bad_TooManyOperations = 0x80100000;

inline bool is_bad(uint32_t code) { return (code & 0x80000000u) != 0; }
}  // namespace status

// ---------------------------------------------------------------------------
// Service type identifiers (namespace-0 numeric node ids of the binary
// encodings). A message body is this NodeId followed by the struct fields.
// ---------------------------------------------------------------------------

namespace service_id {
constexpr uint32_t ServiceFault = 397;
constexpr uint32_t GetEndpointsRequest = 428;
constexpr uint32_t GetEndpointsResponse = 431;
constexpr uint32_t OpenSecureChannelRequest = 446;
constexpr uint32_t OpenSecureChannelResponse = 449;
constexpr uint32_t CloseSecureChannelRequest = 452;
constexpr uint32_t CreateSessionRequest = 461;
constexpr uint32_t CreateSessionResponse = 464;
constexpr uint32_t ActivateSessionRequest = 467;
constexpr uint32_t ActivateSessionResponse = 470;
constexpr uint32_t CloseSessionRequest = 473;
constexpr uint32_t CloseSessionResponse = 476;
constexpr uint32_t BrowseRequest = 527;
constexpr uint32_t BrowseResponse = 530;
constexpr uint32_t BrowseNextRequest = 533;
constexpr uint32_t BrowseNextResponse = 536;
constexpr uint32_t ReadRequest = 631;
constexpr uint32_t ReadResponse = 634;
constexpr uint32_t WriteRequest = 673;
constexpr uint32_t WriteResponse = 676;
constexpr uint32_t CallRequest = 712;
constexpr uint32_t CallResponse = 715;
constexpr uint32_t AnonymousIdentityToken = 321;
constexpr uint32_t UserNameIdentityToken = 324;
}  // namespace service_id

// ---------------------------------------------------------------------------
// Common headers
// ---------------------------------------------------------------------------

struct RequestHeader {
    NodeId authentication_token;      // null before a session exists
    int64_t timestamp = 0;            // caller-supplied; encoding adds none
    uint32_t request_handle = 0;
    uint32_t return_diagnostics = 0;
    UaString audit_entry_id;
    uint32_t timeout_hint = 0;
    ExtensionObject additional_header;

    bool operator==(const RequestHeader&) const = default;
};

inline void encode(ByteWriter& w, const RequestHeader& h) {
    encode(w, h.authentication_token);
    w.i64(h.timestamp);
    w.u32(h.request_handle);
    w.u32(h.return_diagnostics);
    encode(w, h.audit_entry_id);
    w.u32(h.timeout_hint);
    encode(w, h.additional_header);
}

inline RequestHeader decode_request_header(ByteReader& r) {
    RequestHeader h;
    h.authentication_token = decode_node_id(r);
    h.timestamp = r.i64();
    h.request_handle = r.u32();
    h.return_diagnostics = r.u32();
    h.audit_entry_id = decode_string(r);
    h.timeout_hint = r.u32();
    h.additional_header = decode_extension_object(r);
    return h;
}

struct ResponseHeader {
    int64_t timestamp = 0;
    uint32_t request_handle = 0;
    uint32_t service_result = status::Good;
    DiagnosticInfo service_diagnostics;
    std::vector<UaString> string_table;
    ExtensionObject additional_header;

    bool operator==(const ResponseHeader&) const = default;
};

inline void encode(ByteWriter& w, const ResponseHeader& h) {
    w.i64(h.timestamp);
    w.u32(h.request_handle);
    w.u32(h.service_result);
    encode(w, h.service_diagnostics);
    w.i32(static_cast<int32_t>(h.string_table.size()));
    for (const auto& s : h.string_table) encode(w, s);
    encode(w, h.additional_header);
}

inline ResponseHeader decode_response_header(ByteReader& r) {
    ResponseHeader h;
    h.timestamp = r.i64();
    h.request_handle = r.u32();
    h.service_result = r.u32();
    h.service_diagnostics = decode_diagnostic_info(r);
    size_t n = r.array_length(4);
    for (size_t i = 0; i < n; ++i) h.string_table.push_back(decode_string(r));
    h.additional_header = decode_extension_object(r);
    return h;
}

struct SignatureData {
    UaString algorithm;
    UaBytes signature;
    bool operator==(const SignatureData&) const = default;
};

inline void encode(ByteWriter& w, const SignatureData& s) {
    encode(w, s.algorithm);
    encode(w, s.signature);
}
inline SignatureData decode_signature_data(ByteReader& r) {
    SignatureData s;
    s.algorithm = decode_string(r);
    s.signature = decode_byte_string(r);
    return s;
}

struct SignedSoftwareCertificate {
    UaBytes certificate_data;
    UaBytes signature;
    bool operator==(const SignedSoftwareCertificate&) const = default;
};

inline void encode(ByteWriter& w, const SignedSoftwareCertificate& s) {
    encode(w, s.certificate_data);
    encode(w, s.signature);
}
inline SignedSoftwareCertificate decode_signed_software_certificate(ByteReader& r) {
    SignedSoftwareCertificate s;
    s.certificate_data = decode_byte_string(r);
    s.signature = decode_byte_string(r);
    return s;
}

// ---------------------------------------------------------------------------
// Secure-channel services
// ---------------------------------------------------------------------------

enum class SecurityTokenRequestType : uint32_t { Issue = 0, Renew = 1 };

struct OpenSecureChannelRequest {
    RequestHeader header;
    uint32_t client_protocol_version = 0;
    SecurityTokenRequestType request_type = SecurityTokenRequestType::Issue;
    SecurityMode security_mode = SecurityMode::None;
    UaBytes client_nonce;
    uint32_t requested_lifetime_ms = 0;

    bool operator==(const OpenSecureChannelRequest&) const = default;
};

struct ChannelSecurityToken {
    uint32_t channel_id = 0;
    uint32_t token_id = 0;
    int64_t created_at = 0;
    uint32_t revised_lifetime_ms = 0;

    bool operator==(const ChannelSecurityToken&) const = default;
};

struct OpenSecureChannelResponse {
    ResponseHeader header;
    uint32_t server_protocol_version = 0;
    ChannelSecurityToken token;
    UaBytes server_nonce;

    bool operator==(const OpenSecureChannelResponse&) const = default;
};

struct CloseSecureChannelRequest {
    RequestHeader header;
    bool operator==(const CloseSecureChannelRequest&) const = default;
};

// ---------------------------------------------------------------------------
// Discovery
// ---------------------------------------------------------------------------

struct GetEndpointsRequest {
    RequestHeader header;
    UaString endpoint_url;
    std::vector<UaString> locale_ids;
    std::vector<UaString> profile_uris;

    bool operator==(const GetEndpointsRequest&) const = default;
};

struct GetEndpointsResponse {
    ResponseHeader header;
    std::vector<EndpointDescription> endpoints;

    bool operator==(const GetEndpointsResponse&) const = default;
};

// ---------------------------------------------------------------------------
// Session services
// ---------------------------------------------------------------------------

struct CreateSessionRequest {
    RequestHeader header;
    ApplicationDescription client_description;
    UaString server_uri;
    UaString endpoint_url;
    UaString session_name;
    UaBytes client_nonce;
    UaBytes client_certificate;
    double requested_session_timeout_ms = 0;
    uint32_t max_response_message_size = 0;

    bool operator==(const CreateSessionRequest&) const = default;
};

struct CreateSessionResponse {
    ResponseHeader header;
    NodeId session_id;
    NodeId authentication_token;
    double revised_session_timeout_ms = 0;
    UaBytes server_nonce;
    UaBytes server_certificate;
    std::vector<EndpointDescription> server_endpoints;
    std::vector<SignedSoftwareCertificate> server_software_certificates;
    SignatureData server_signature;
    uint32_t max_request_message_size = 0;

    bool operator==(const CreateSessionResponse&) const = default;
};

struct ActivateSessionRequest {
    RequestHeader header;
    SignatureData client_signature;
    std::vector<SignedSoftwareCertificate> client_software_certificates;
    std::vector<UaString> locale_ids;
    ExtensionObject user_identity_token;
    SignatureData user_token_signature;

    bool operator==(const ActivateSessionRequest&) const = default;
};

struct ActivateSessionResponse {
    ResponseHeader header;
    UaBytes server_nonce;
    std::vector<uint32_t> results;
    std::vector<DiagnosticInfo> diagnostic_infos;

    bool operator==(const ActivateSessionResponse&) const = default;
};

struct CloseSessionRequest {
    RequestHeader header;
    bool delete_subscriptions = false;

    bool operator==(const CloseSessionRequest&) const = default;
};

struct CloseSessionResponse {
    ResponseHeader header;
    bool operator==(const CloseSessionResponse&) const = default;
};

// ---------------------------------------------------------------------------
// View / attribute services
// ---------------------------------------------------------------------------

enum class BrowseDirection : uint32_t { Forward = 0, Inverse = 1, Both = 2 };

struct ViewDescription {
    NodeId view_id;
    int64_t timestamp = 0;
    uint32_t view_version = 0;
    bool operator==(const ViewDescription&) const = default;
};

struct BrowseDescription {
    NodeId node_id;
    BrowseDirection direction = BrowseDirection::Forward;
    NodeId reference_type_id;
    bool include_subtypes = true;
    uint32_t node_class_mask = 0;  // 0 = all classes
    uint32_t result_mask = 0x3f;   // all reference fields

    bool operator==(const BrowseDescription&) const = default;
};

struct BrowseRequest {
    RequestHeader header;
    ViewDescription view;
    uint32_t requested_max_references_per_node = 0;
    std::vector<BrowseDescription> nodes_to_browse;

    bool operator==(const BrowseRequest&) const = default;
};

struct ReferenceDescription {
    NodeId reference_type_id;
    bool is_forward = true;
    ExpandedNodeId node_id;
    QualifiedName browse_name;
    LocalizedText display_name;
    uint32_t node_class = 0;
    ExpandedNodeId type_definition;

    bool operator==(const ReferenceDescription&) const = default;
};

struct BrowseResult {
    uint32_t status = status::Good;
    UaBytes continuation_point;
    std::vector<ReferenceDescription> references;

    bool operator==(const BrowseResult&) const = default;
};

struct BrowseResponse {
    ResponseHeader header;
    std::vector<BrowseResult> results;
    std::vector<DiagnosticInfo> diagnostic_infos;

    bool operator==(const BrowseResponse&) const = default;
};

struct BrowseNextRequest {
    RequestHeader header;
    bool release_continuation_points = false;
    std::vector<UaBytes> continuation_points;

    bool operator==(const BrowseNextRequest&) const = default;
};

struct BrowseNextResponse {
    ResponseHeader header;
    std::vector<BrowseResult> results;
    std::vector<DiagnosticInfo> diagnostic_infos;

    bool operator==(const BrowseNextResponse&) const = default;
};

struct ReadValueId {
    NodeId node_id;
    uint32_t attribute_id = 13;  // Value
    UaString index_range;
    QualifiedName data_encoding;

    bool operator==(const ReadValueId&) const = default;
};

namespace attribute_id {
constexpr uint32_t NodeClass = 2;
constexpr uint32_t BrowseName = 3;
constexpr uint32_t Value = 13;
constexpr uint32_t AccessLevel = 17;
constexpr uint32_t Executable = 21;
}  // namespace attribute_id

struct ReadRequest {
    RequestHeader header;
    double max_age = 0;
    uint32_t timestamps_to_return = 0;  // 0 = source, 3 = neither
    std::vector<ReadValueId> nodes_to_read;

    bool operator==(const ReadRequest&) const = default;
};

struct ReadResponse {
    ResponseHeader header;
    std::vector<DataValue> results;
    std::vector<DiagnosticInfo> diagnostic_infos;

    bool operator==(const ReadResponse&) const = default;
};

struct ServiceFault {
    ResponseHeader header;
    bool operator==(const ServiceFault&) const = default;
};

/// Any service this tool does not model field-by-field. The type id is
/// enough to classify it (e.g. a mock logging a Write or Call attempt);
/// the body is carried opaquely.
struct OpaqueService {
    NodeId type_id;
    Bytes body;

    bool operator==(const OpaqueService&) const = default;
};

// ---------------------------------------------------------------------------
// Identity tokens (extension object bodies)
// ---------------------------------------------------------------------------

struct AnonymousIdentityToken {
    UaString policy_id;
    bool operator==(const AnonymousIdentityToken&) const = default;
};

inline ExtensionObject make_identity_token(const AnonymousIdentityToken& t) {
    ByteWriter w;
    encode(w, t.policy_id);
    ExtensionObject e;
    e.type_id = NodeId::numeric(0, service_id::AnonymousIdentityToken);
    e.encoding = 1;
    e.body = w.take();
    return e;
}

inline std::optional<AnonymousIdentityToken> parse_anonymous_token(const ExtensionObject& e) {
    if (!e.type_id.is_numeric() || e.type_id.namespace_index != 0 ||
        e.type_id.numeric_value() != service_id::AnonymousIdentityToken || e.encoding != 1)
        return std::nullopt;
    ByteReader r(e.body);
    AnonymousIdentityToken t;
    t.policy_id = decode_string(r);
    return t;
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

namespace detail {
inline void write_type_id(ByteWriter& w, uint32_t id) {
    encode(w, NodeId::numeric(0, id));
}
template <typename T>
inline void encode_array(ByteWriter& w, const std::vector<T>& items) {
    w.i32(static_cast<int32_t>(items.size()));
    for (const auto& it : items) encode(w, it);
}
}  // namespace detail

inline void encode(ByteWriter& w, const ViewDescription& v) {
    encode(w, v.view_id);
    w.i64(v.timestamp);
    w.u32(v.view_version);
}

inline void encode(ByteWriter& w, const BrowseDescription& b) {
    encode(w, b.node_id);
    w.u32(static_cast<uint32_t>(b.direction));
    encode(w, b.reference_type_id);
    w.boolean(b.include_subtypes);
    w.u32(b.node_class_mask);
    w.u32(b.result_mask);
}

inline void encode(ByteWriter& w, const ReferenceDescription& d) {
    encode(w, d.reference_type_id);
    w.boolean(d.is_forward);
    encode(w, d.node_id);
    encode(w, d.browse_name);
    encode(w, d.display_name);
    w.u32(d.node_class);
    encode(w, d.type_definition);
}

inline void encode(ByteWriter& w, const BrowseResult& b) {
    w.u32(b.status);
    encode(w, b.continuation_point);
    detail::encode_array(w, b.references);
}

inline void encode(ByteWriter& w, const ReadValueId& v) {
    encode(w, v.node_id);
    w.u32(v.attribute_id);
    encode(w, v.index_range);
    encode(w, v.data_encoding);
}

inline void encode(ByteWriter& w, const ChannelSecurityToken& t) {
    w.u32(t.channel_id);
    w.u32(t.token_id);
    w.i64(t.created_at);
    w.u32(t.revised_lifetime_ms);
}

inline Bytes encode_message(const OpenSecureChannelRequest& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::OpenSecureChannelRequest);
    encode(w, m.header);
    w.u32(m.client_protocol_version);
    w.u32(static_cast<uint32_t>(m.request_type));
    w.u32(static_cast<uint32_t>(m.security_mode));
    encode(w, m.client_nonce);
    w.u32(m.requested_lifetime_ms);
    return w.take();
}

inline Bytes encode_message(const OpenSecureChannelResponse& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::OpenSecureChannelResponse);
    encode(w, m.header);
    w.u32(m.server_protocol_version);
    encode(w, m.token);
    encode(w, m.server_nonce);
    return w.take();
}

inline Bytes encode_message(const CloseSecureChannelRequest& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::CloseSecureChannelRequest);
    encode(w, m.header);
    return w.take();
}

inline Bytes encode_message(const GetEndpointsRequest& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::GetEndpointsRequest);
    encode(w, m.header);
    encode(w, m.endpoint_url);
    detail::encode_array(w, m.locale_ids);
    detail::encode_array(w, m.profile_uris);
    return w.take();
}

inline Bytes encode_message(const GetEndpointsResponse& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::GetEndpointsResponse);
    encode(w, m.header);
    detail::encode_array(w, m.endpoints);
    return w.take();
}

inline Bytes encode_message(const CreateSessionRequest& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::CreateSessionRequest);
    encode(w, m.header);
    encode(w, m.client_description);
    encode(w, m.server_uri);
    encode(w, m.endpoint_url);
    encode(w, m.session_name);
    encode(w, m.client_nonce);
    encode(w, m.client_certificate);
    w.f64(m.requested_session_timeout_ms);
    w.u32(m.max_response_message_size);
    return w.take();
}

inline Bytes encode_message(const CreateSessionResponse& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::CreateSessionResponse);
    encode(w, m.header);
    encode(w, m.session_id);
    encode(w, m.authentication_token);
    w.f64(m.revised_session_timeout_ms);
    encode(w, m.server_nonce);
    encode(w, m.server_certificate);
    detail::encode_array(w, m.server_endpoints);
    detail::encode_array(w, m.server_software_certificates);
    encode(w, m.server_signature);
    w.u32(m.max_request_message_size);
    return w.take();
}

inline Bytes encode_message(const ActivateSessionRequest& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::ActivateSessionRequest);
    encode(w, m.header);
    encode(w, m.client_signature);
    detail::encode_array(w, m.client_software_certificates);
    detail::encode_array(w, m.locale_ids);
    encode(w, m.user_identity_token);
    encode(w, m.user_token_signature);
    return w.take();
}

inline Bytes encode_message(const ActivateSessionResponse& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::ActivateSessionResponse);
    encode(w, m.header);
    encode(w, m.server_nonce);
    w.i32(static_cast<int32_t>(m.results.size()));
    for (uint32_t s : m.results) w.u32(s);
    detail::encode_array(w, m.diagnostic_infos);
    return w.take();
}

inline Bytes encode_message(const CloseSessionRequest& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::CloseSessionRequest);
    encode(w, m.header);
    w.boolean(m.delete_subscriptions);
    return w.take();
}

inline Bytes encode_message(const CloseSessionResponse& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::CloseSessionResponse);
    encode(w, m.header);
    return w.take();
}

inline Bytes encode_message(const BrowseRequest& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::BrowseRequest);
    encode(w, m.header);
    encode(w, m.view);
    w.u32(m.requested_max_references_per_node);
    detail::encode_array(w, m.nodes_to_browse);
    return w.take();
}

inline Bytes encode_message(const BrowseResponse& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::BrowseResponse);
    encode(w, m.header);
    detail::encode_array(w, m.results);
    detail::encode_array(w, m.diagnostic_infos);
    return w.take();
}

inline Bytes encode_message(const BrowseNextRequest& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::BrowseNextRequest);
    encode(w, m.header);
    w.boolean(m.release_continuation_points);
    detail::encode_array(w, m.continuation_points);
    return w.take();
}

inline Bytes encode_message(const BrowseNextResponse& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::BrowseNextResponse);
    encode(w, m.header);
    detail::encode_array(w, m.results);
    detail::encode_array(w, m.diagnostic_infos);
    return w.take();
}

inline Bytes encode_message(const ReadRequest& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::ReadRequest);
    encode(w, m.header);
    w.f64(m.max_age);
    w.u32(m.timestamps_to_return);
    detail::encode_array(w, m.nodes_to_read);
    return w.take();
}

inline Bytes encode_message(const ReadResponse& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::ReadResponse);
    encode(w, m.header);
    detail::encode_array(w, m.results);
    detail::encode_array(w, m.diagnostic_infos);
    return w.take();
}

inline Bytes encode_message(const ServiceFault& m) {
    ByteWriter w;
    detail::write_type_id(w, service_id::ServiceFault);
    encode(w, m.header);
    return w.take();
}

inline Bytes encode_message(const OpaqueService& m) {
    ByteWriter w;
    encode(w, m.type_id);
    w.raw(m.body);
    return w.take();
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

using ServiceBody =
    std::variant<OpenSecureChannelRequest, OpenSecureChannelResponse,
                 CloseSecureChannelRequest, GetEndpointsRequest, GetEndpointsResponse,
                 CreateSessionRequest, CreateSessionResponse, ActivateSessionRequest,
                 ActivateSessionResponse, CloseSessionRequest, CloseSessionResponse,
                 BrowseRequest, BrowseResponse, BrowseNextRequest, BrowseNextResponse,
                 ReadRequest, ReadResponse, ServiceFault, OpaqueService>;

namespace detail {

inline ViewDescription decode_view_description(ByteReader& r) {
    ViewDescription v;
    v.view_id = decode_node_id(r);
    v.timestamp = r.i64();
    v.view_version = r.u32();
    return v;
}

inline BrowseDescription decode_browse_description(ByteReader& r) {
    BrowseDescription b;
    b.node_id = decode_node_id(r);
    uint32_t dir = r.u32();
    if (dir > 2) throw CodecError(errc::malformed_response, "invalid browse direction");
    b.direction = static_cast<BrowseDirection>(dir);
    b.reference_type_id = decode_node_id(r);
    b.include_subtypes = r.boolean();
    b.node_class_mask = r.u32();
    b.result_mask = r.u32();
    return b;
}

inline ReferenceDescription decode_reference_description(ByteReader& r) {
    ReferenceDescription d;
    d.reference_type_id = decode_node_id(r);
    d.is_forward = r.boolean();
    d.node_id = decode_expanded_node_id(r);
    d.browse_name = decode_qualified_name(r);
    d.display_name = decode_localized_text(r);
    d.node_class = r.u32();
    d.type_definition = decode_expanded_node_id(r);
    return d;
}

inline BrowseResult decode_browse_result(ByteReader& r) {
    BrowseResult b;
    b.status = r.u32();
    b.continuation_point = decode_byte_string(r);
    size_t n = r.array_length(4);
    b.references.reserve(n);
    for (size_t i = 0; i < n; ++i) b.references.push_back(decode_reference_description(r));
    return b;
}

inline ReadValueId decode_read_value_id(ByteReader& r) {
    ReadValueId v;
    v.node_id = decode_node_id(r);
    v.attribute_id = r.u32();
    v.index_range = decode_string(r);
    v.data_encoding = decode_qualified_name(r);
    return v;
}

inline ChannelSecurityToken decode_channel_token(ByteReader& r) {
    ChannelSecurityToken t;
    t.channel_id = r.u32();
    t.token_id = r.u32();
    t.created_at = r.i64();
    t.revised_lifetime_ms = r.u32();
    return t;
}

inline std::vector<UaString> decode_string_array(ByteReader& r) {
    size_t n = r.array_length(4);
    std::vector<UaString> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(decode_string(r));
    return out;
}

inline std::vector<DiagnosticInfo> decode_diagnostic_array(ByteReader& r) {
    size_t n = r.array_length(1);
    std::vector<DiagnosticInfo> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(decode_diagnostic_info(r));
    return out;
}

}  // namespace detail

/// Decodes a service body (type id + fields). Unmodeled type ids come back
/// as OpaqueService; modeled ones must parse fully with no trailing bytes.
inline ServiceBody decode_message(BytesView body) {
    ByteReader r(body);
    NodeId type_id = decode_node_id(r);
    if (!type_id.is_numeric() || type_id.namespace_index != 0) {
        OpaqueService o;
        o.type_id = type_id;
        o.body = r.bytes(r.remaining());
        return o;
    }

    auto finish = [&r](auto msg) -> ServiceBody {
        if (r.remaining() != 0)
            throw CodecError(errc::malformed_response, "trailing bytes after service body");
        return msg;
    };

    switch (type_id.numeric_value()) {
    case service_id::OpenSecureChannelRequest: {
        OpenSecureChannelRequest m;
        m.header = decode_request_header(r);
        m.client_protocol_version = r.u32();
        uint32_t rt = r.u32();
        if (rt > 1) throw CodecError(errc::malformed_response, "invalid token request type");
        m.request_type = static_cast<SecurityTokenRequestType>(rt);
        uint32_t mode = r.u32();
        if (mode > 3) throw CodecError(errc::malformed_response, "invalid security mode");
        m.security_mode = static_cast<SecurityMode>(mode);
        m.client_nonce = decode_byte_string(r);
        m.requested_lifetime_ms = r.u32();
        return finish(std::move(m));
    }
    case service_id::OpenSecureChannelResponse: {
        OpenSecureChannelResponse m;
        m.header = decode_response_header(r);
        m.server_protocol_version = r.u32();
        m.token = detail::decode_channel_token(r);
        m.server_nonce = decode_byte_string(r);
        return finish(std::move(m));
    }
    case service_id::CloseSecureChannelRequest: {
        CloseSecureChannelRequest m;
        m.header = decode_request_header(r);
        return finish(std::move(m));
    }
    case service_id::GetEndpointsRequest: {
        GetEndpointsRequest m;
        m.header = decode_request_header(r);
        m.endpoint_url = decode_string(r);
        m.locale_ids = detail::decode_string_array(r);
        m.profile_uris = detail::decode_string_array(r);
        return finish(std::move(m));
    }
    case service_id::GetEndpointsResponse: {
        GetEndpointsResponse m;
        m.header = decode_response_header(r);
        size_t n = r.array_length(4);
        m.endpoints.reserve(n);
        for (size_t i = 0; i < n; ++i) m.endpoints.push_back(decode_endpoint_description(r));
        return finish(std::move(m));
    }
    case service_id::CreateSessionRequest: {
        CreateSessionRequest m;
        m.header = decode_request_header(r);
        m.client_description = decode_application_description(r);
        m.server_uri = decode_string(r);
        m.endpoint_url = decode_string(r);
        m.session_name = decode_string(r);
        m.client_nonce = decode_byte_string(r);
        m.client_certificate = decode_byte_string(r);
        m.requested_session_timeout_ms = r.f64();
        m.max_response_message_size = r.u32();
        return finish(std::move(m));
    }
    case service_id::CreateSessionResponse: {
        CreateSessionResponse m;
        m.header = decode_response_header(r);
        m.session_id = decode_node_id(r);
        m.authentication_token = decode_node_id(r);
        m.revised_session_timeout_ms = r.f64();
        m.server_nonce = decode_byte_string(r);
        m.server_certificate = decode_byte_string(r);
        size_t n = r.array_length(4);
        m.server_endpoints.reserve(n);
        for (size_t i = 0; i < n; ++i)
            m.server_endpoints.push_back(decode_endpoint_description(r));
        size_t c = r.array_length(8);
        for (size_t i = 0; i < c; ++i)
            m.server_software_certificates.push_back(decode_signed_software_certificate(r));
        m.server_signature = decode_signature_data(r);
        m.max_request_message_size = r.u32();
        return finish(std::move(m));
    }
    case service_id::ActivateSessionRequest: {
        ActivateSessionRequest m;
        m.header = decode_request_header(r);
        m.client_signature = decode_signature_data(r);
        size_t c = r.array_length(8);
        for (size_t i = 0; i < c; ++i)
            m.client_software_certificates.push_back(decode_signed_software_certificate(r));
        m.locale_ids = detail::decode_string_array(r);
        m.user_identity_token = decode_extension_object(r);
        m.user_token_signature = decode_signature_data(r);
        return finish(std::move(m));
    }
    case service_id::ActivateSessionResponse: {
        ActivateSessionResponse m;
        m.header = decode_response_header(r);
        m.server_nonce = decode_byte_string(r);
        size_t n = r.array_length(4);
        for (size_t i = 0; i < n; ++i) m.results.push_back(r.u32());
        m.diagnostic_infos = detail::decode_diagnostic_array(r);
        return finish(std::move(m));
    }
    case service_id::CloseSessionRequest: {
        CloseSessionRequest m;
        m.header = decode_request_header(r);
        m.delete_subscriptions = r.boolean();
        return finish(std::move(m));
    }
    case service_id::CloseSessionResponse: {
        CloseSessionResponse m;
        m.header = decode_response_header(r);
        return finish(std::move(m));
    }
    case service_id::BrowseRequest: {
        BrowseRequest m;
        m.header = decode_request_header(r);
        m.view = detail::decode_view_description(r);
        m.requested_max_references_per_node = r.u32();
        size_t n = r.array_length(4);
        m.nodes_to_browse.reserve(n);
        for (size_t i = 0; i < n; ++i)
            m.nodes_to_browse.push_back(detail::decode_browse_description(r));
        return finish(std::move(m));
    }
    case service_id::BrowseResponse:
    case service_id::BrowseNextResponse: {
        auto decode_results = [&r](auto& m) {
            size_t n = r.array_length(4);
            m.results.reserve(n);
            for (size_t i = 0; i < n; ++i)
                m.results.push_back(detail::decode_browse_result(r));
            m.diagnostic_infos = detail::decode_diagnostic_array(r);
        };
        if (type_id.numeric_value() == service_id::BrowseResponse) {
            BrowseResponse m;
            m.header = decode_response_header(r);
            decode_results(m);
            return finish(std::move(m));
        }
        BrowseNextResponse m;
        m.header = decode_response_header(r);
        decode_results(m);
        return finish(std::move(m));
    }
    case service_id::BrowseNextRequest: {
        BrowseNextRequest m;
        m.header = decode_request_header(r);
        m.release_continuation_points = r.boolean();
        size_t n = r.array_length(4);
        for (size_t i = 0; i < n; ++i) m.continuation_points.push_back(decode_byte_string(r));
        return finish(std::move(m));
    }
    case service_id::ReadRequest: {
        ReadRequest m;
        m.header = decode_request_header(r);
        m.max_age = r.f64();
        m.timestamps_to_return = r.u32();
        size_t n = r.array_length(4);
        m.nodes_to_read.reserve(n);
        for (size_t i = 0; i < n; ++i)
            m.nodes_to_read.push_back(detail::decode_read_value_id(r));
        return finish(std::move(m));
    }
    case service_id::ReadResponse: {
        ReadResponse m;
        m.header = decode_response_header(r);
        size_t n = r.array_length(1);
        m.results.reserve(n);
        for (size_t i = 0; i < n; ++i) m.results.push_back(decode_data_value(r));
        m.diagnostic_infos = detail::decode_diagnostic_array(r);
        return finish(std::move(m));
    }
    case service_id::ServiceFault: {
        ServiceFault m;
        m.header = decode_response_header(r);
        return finish(std::move(m));
    }
    default: {
        OpaqueService o;
        o.type_id = type_id;
        o.body = r.bytes(r.remaining());
        return o;
    }
    }
}

/// Type id of an encoded service body without decoding the fields.
inline NodeId peek_type_id(BytesView body) {
    ByteReader r(body);
    return decode_node_id(r);
}

}  // namespace uascan::wire
