#include <catch2/catch_amalgamated.hpp>

#include "uascan/wire/services.hpp"
#include "uascan/wire/transport.hpp"
#include "uascan/wire/types.hpp"

#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace uascan;
using namespace uascan::wire;

namespace {

template <typename T, typename GenFn, typename DecFn>
void roundtrip(int iters, uint64_t seed, GenFn make, DecFn dec) {
    testgen::Gen gen(seed);
    for (int i = 0; i < iters; ++i) {
        T value = make(gen);
        ByteWriter w;
        encode(w, value);
        Bytes buf = w.take();
        ByteReader r(buf);
        T back = dec(r);
        REQUIRE(r.remaining() == 0);
        REQUIRE(back == value);
    }
}

template <typename T, typename GenFn>
void roundtrip_message(int iters, uint64_t seed, GenFn make) {
    testgen::Gen gen(seed);
    for (int i = 0; i < iters; ++i) {
        T msg = make(gen);
        Bytes body = encode_message(msg);
        ServiceBody back = decode_message(body);
        REQUIRE(std::holds_alternative<T>(back));
        REQUIRE(std::get<T>(back) == msg);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Framing
// ---------------------------------------------------------------------------

TEST_CASE("empty hello frame has the canonical 8 header bytes") {
    Bytes frame = encode_frame(MsgKind::Hello, 'F', {});
    REQUIRE(to_hex(frame) == "48454c4608000000");
}

TEST_CASE("frame length counts header plus payload") {
    Bytes payload(100, 0xab);
    Bytes frame = encode_frame(MsgKind::Msg, 'F', payload);
    REQUIRE(frame.size() == 108);
    FrameHeader h = decode_frame_header(frame);
    REQUIRE(h.total_length == 108);
    REQUIRE(h.kind == MsgKind::Msg);
    REQUIRE(h.chunk == 'F');
    REQUIRE(h.payload_length() == 100);
}

TEST_CASE("non-protocol bytes are rejected as unknown kind") {
    const char* http = "HTTP/1.1";
    Bytes b(http, http + 8);
    try {
        decode_frame_header(b);
        FAIL("expected CodecError");
    } catch (const CodecError& e) {
        REQUIRE(e.code() == errc::unknown_kind);
    }
}

TEST_CASE("frame header guards") {
    // Too short for a header at all.
    Bytes short_buf = {0x48, 0x45, 0x4c};
    REQUIRE_THROWS_AS(decode_frame_header(short_buf), CodecError);

    // Declared length smaller than the header itself.
    Bytes tiny = from_hex("48454c4607000000");
    REQUIRE_THROWS_AS(decode_frame_header(tiny), CodecError);

    // Declared length above the frame cap.
    ByteWriter w;
    w.raw(Bytes{'M', 'S', 'G', 'F'});
    w.u32(kMaxFrameLength + 1);
    REQUIRE_THROWS_AS(decode_frame_header(w.data()), CodecError);

    // Unknown chunk letter.
    Bytes badchunk = from_hex("48454c5808000000");
    REQUIRE_THROWS_AS(decode_frame_header(badchunk), CodecError);
}

TEST_CASE("all six message kinds round-trip through the header") {
    for (MsgKind k : {MsgKind::Hello, MsgKind::Ack, MsgKind::Error, MsgKind::Open,
                      MsgKind::Msg, MsgKind::Close}) {
        for (char c : {'F', 'C', 'A'}) {
            Bytes frame = encode_frame(k, c, Bytes{1, 2, 3});
            TransportMessage m = decode_frame(frame);
            REQUIRE(m.kind == k);
            REQUIRE(m.chunk == c);
            REQUIRE(m.payload == Bytes{1, 2, 3});
        }
    }
}

TEST_CASE("hello fixture decodes") {
    Bytes frame = testsupport::load_fixture("hello.hex");
    TransportMessage m = decode_frame(frame);
    REQUIRE(m.kind == MsgKind::Hello);
    HelloBody h = decode_hello(m.payload);
    REQUIRE(h.protocol_version == 0);
    REQUIRE(h.receive_buffer_size == 65536);
    REQUIRE(h.send_buffer_size == 65536);
    REQUIRE(h.max_message_size == 16777216);
    REQUIRE(h.max_chunk_count == 4096);
    REQUIRE(h.endpoint_url.str() == "opc.tcp://plc.example:4840");
    // Re-encoding reproduces the fixture byte for byte.
    REQUIRE(encode_frame(MsgKind::Hello, 'F', encode_hello(h)) == frame);
}

TEST_CASE("error fixture decodes") {
    Bytes frame = testsupport::load_fixture("error.hex");
    TransportMessage m = decode_frame(frame);
    REQUIRE(m.kind == MsgKind::Error);
    ErrorBody e = decode_error(m.payload);
    REQUIRE(e.code == 0x80130000);  // Bad_SecurityChecksFailed
    REQUIRE(e.reason.str() == "sec");
    REQUIRE(encode_frame(MsgKind::Error, 'F', encode_error(e)) == frame);
}

TEST_CASE("hello ack error payloads round-trip") {
    testgen::Gen gen(0x48454c);
    for (int i = 0; i < 500; ++i) {
        HelloBody h{gen.u32(), gen.u32(), gen.u32(), gen.u32(), gen.u32(),
                    gen.ua_string()};
        REQUIRE(decode_hello(encode_hello(h)) == h);
        AckBody a{gen.u32(), gen.u32(), gen.u32(), gen.u32(), gen.u32()};
        REQUIRE(decode_ack(encode_ack(a)) == a);
        ErrorBody e{gen.u32(), gen.ua_string()};
        REQUIRE(decode_error(encode_error(e)) == e);
    }
}

TEST_CASE("open and msg payload layers round-trip") {
    testgen::Gen gen(0x4f504e);
    for (int i = 0; i < 500; ++i) {
        OpenPayload p;
        p.channel_id = gen.u32();
        p.security.security_policy_uri = gen.ua_string();
        p.security.sender_certificate = gen.ua_bytes();
        p.security.receiver_certificate_thumbprint = gen.ua_bytes();
        p.sequence = {gen.u32(), gen.u32()};
        p.body = gen.bytes(64);
        REQUIRE(decode_open_payload(encode_open_payload(p)) == p);

        MsgPayload m;
        m.channel_id = gen.u32();
        m.token_id = gen.u32();
        m.sequence = {gen.u32(), gen.u32()};
        m.body = gen.bytes(64);
        REQUIRE(decode_msg_payload(encode_msg_payload(m)) == m);
    }
}

// ---------------------------------------------------------------------------
// Chunking
// ---------------------------------------------------------------------------

TEST_CASE("chunk assembler concatenates C chunks and completes on F") {
    ChunkAssembler asm_;
    REQUIRE(asm_.feed('C', Bytes{1, 2}) == std::nullopt);
    REQUIRE(asm_.feed('C', Bytes{3}) == std::nullopt);
    auto done = asm_.feed('F', Bytes{4, 5});
    REQUIRE(done.has_value());
    REQUIRE(*done == Bytes{1, 2, 3, 4, 5});
    REQUIRE_FALSE(asm_.pending());
}

TEST_CASE("abort chunk discards buffered data") {
    ChunkAssembler asm_;
    asm_.feed('C', Bytes{1, 2, 3});
    REQUIRE(asm_.pending());
    REQUIRE(asm_.feed('A', {}) == std::nullopt);
    REQUIRE_FALSE(asm_.pending());
    auto done = asm_.feed('F', Bytes{9});
    REQUIRE(done.has_value());
    REQUIRE(*done == Bytes{9});
}

TEST_CASE("chunk assembler enforces the assembled-size cap") {
    ChunkAssembler asm_(16);
    asm_.feed('C', Bytes(10, 0));
    try {
        asm_.feed('C', Bytes(7, 0));
        FAIL("expected CodecError");
    } catch (const CodecError& e) {
        REQUIRE(e.code() == errc::oversized_message);
    }
}

TEST_CASE("chunk_message splits and reassembles") {
    testgen::Gen gen(0x43484b);
    for (int i = 0; i < 50; ++i) {
        Bytes body = gen.bytes(200);
        uint32_t seq = 1;
        auto frames = chunk_message(7, 9, seq, 55, body, 48);
        ChunkAssembler asm_;
        std::optional<Bytes> out;
        for (const auto& f : frames) {
            TransportMessage m = decode_frame(f);
            REQUIRE(m.kind == MsgKind::Msg);
            MsgPayload p = decode_msg_payload(m.payload);
            REQUIRE(p.channel_id == 7);
            REQUIRE(p.token_id == 9);
            REQUIRE(p.sequence.request_id == 55);
            out = asm_.feed(m.chunk, p.body);
        }
        REQUIRE(out.has_value());
        REQUIRE(*out == body);
        REQUIRE(seq == 1 + frames.size());
    }
}

// ---------------------------------------------------------------------------
// Built-in types
// ---------------------------------------------------------------------------

TEST_CASE("null and empty strings stay distinct on the wire") {
    ByteWriter w;
    encode(w, UaString::null_string());
    REQUIRE(to_hex(w.data()) == "ffffffff");

    ByteWriter w2;
    encode(w2, UaString(""));
    REQUIRE(to_hex(w2.data()) == "00000000");

    ByteWriter w3;
    encode(w3, UaString("UA"));
    REQUIRE(to_hex(w3.data()) == "020000005541");

    // The null flag survives a round-trip in both directions.
    ByteReader r1(w.data());
    REQUIRE(decode_string(r1).null);
    ByteReader r2(w2.data());
    UaString empty = decode_string(r2);
    REQUIRE_FALSE(empty.null);
    REQUIRE(empty.value.empty());
}

TEST_CASE("node id canonical encodings") {
    ByteWriter w;
    encode(w, NodeId::numeric(0, 84));
    REQUIRE(to_hex(w.data()) == "0054");

    ByteWriter w2;
    encode(w2, NodeId::numeric(3, 1025));
    REQUIRE(to_hex(w2.data()) == "01030104");

    ByteWriter w3;
    encode(w3, NodeId::numeric(300, 70000));
    REQUIRE(to_hex(w3.data()) == "022c0170110100");

    ByteWriter w4;
    encode(w4, NodeId::string_id(1, "ab"));
    REQUIRE(to_hex(w4.data()) == "0301000200000061" "62");
}

TEST_CASE("node id decode accepts wider-than-needed encodings") {
    // ns=0, id=84 sent in the four-byte form still decodes.
    Bytes b = from_hex("01005400");
    ByteReader r(b);
    REQUIRE(decode_node_id(r) == NodeId::numeric(0, 84));

    Bytes bad = from_hex("06");
    ByteReader r2(bad);
    REQUIRE_THROWS_AS(decode_node_id(r2), CodecError);
}

TEST_CASE("node id text form parses back") {
    testgen::Gen gen(0x4e49);
    for (int i = 0; i < 200; ++i) {
        NodeId n = gen.node_id();
        if (std::holds_alternative<std::string>(n.id)) continue;  // free-form text
        auto parsed = NodeId::parse(n.to_string());
        REQUIRE(parsed.has_value());
        REQUIRE(*parsed == n);
    }
    REQUIRE(NodeId::parse("i=84") == NodeId::numeric(0, 84));
    REQUIRE(NodeId::parse("ns=2;s=Demo.Static") == NodeId::string_id(2, "Demo.Static"));
    REQUIRE_FALSE(NodeId::parse("84").has_value());
    REQUIRE_FALSE(NodeId::parse("ns=2").has_value());
}

TEST_CASE("localized text frozen encoding") {
    LocalizedText t;
    t.locale = UaString("en");
    t.text = UaString("x");
    ByteWriter w;
    encode(w, t);
    REQUIRE(to_hex(w.data()) == "030200000065" "6e0100000078");
}

TEST_CASE("variant byte frozen encoding") {
    ByteWriter w;
    encode(w, Variant::byte_value(7));
    REQUIRE(to_hex(w.data()) == "0307");
}

TEST_CASE("built-in types round-trip") {
    roundtrip<UaString>(2000, 1, [](auto& g) { return g.ua_string(); },
                        [](ByteReader& r) { return decode_string(r); });
    roundtrip<UaBytes>(2000, 2, [](auto& g) { return g.ua_bytes(); },
                       [](ByteReader& r) { return decode_byte_string(r); });
    roundtrip<Guid>(500, 3, [](auto& g) { return g.guid(); },
                    [](ByteReader& r) { return decode_guid(r); });
    roundtrip<NodeId>(2000, 4, [](auto& g) { return g.node_id(); },
                      [](ByteReader& r) { return decode_node_id(r); });
    roundtrip<ExpandedNodeId>(2000, 5, [](auto& g) { return g.expanded_node_id(); },
                              [](ByteReader& r) { return decode_expanded_node_id(r); });
    roundtrip<QualifiedName>(1000, 6, [](auto& g) { return g.qualified_name(); },
                             [](ByteReader& r) { return decode_qualified_name(r); });
    roundtrip<LocalizedText>(1000, 7, [](auto& g) { return g.localized_text(); },
                             [](ByteReader& r) { return decode_localized_text(r); });
    roundtrip<DiagnosticInfo>(1000, 8, [](auto& g) { return g.diagnostic_info(); },
                              [](ByteReader& r) { return decode_diagnostic_info(r); });
    roundtrip<ExtensionObject>(1000, 9, [](auto& g) { return g.extension_object(); },
                               [](ByteReader& r) { return decode_extension_object(r); });
    roundtrip<Variant>(2000, 10, [](auto& g) { return g.variant(); },
                       [](ByteReader& r) { return decode_variant(r); });
    roundtrip<DataValue>(2000, 11, [](auto& g) { return g.data_value(); },
                         [](ByteReader& r) { return decode_data_value(r); });
    roundtrip<UserTokenPolicy>(500, 12, [](auto& g) { return g.user_token_policy(); },
                               [](ByteReader& r) { return decode_user_token_policy(r); });
    roundtrip<ApplicationDescription>(
        500, 13, [](auto& g) { return g.application_description(); },
        [](ByteReader& r) { return decode_application_description(r); });
    roundtrip<EndpointDescription>(
        500, 14, [](auto& g) { return g.endpoint_description(); },
        [](ByteReader& r) { return decode_endpoint_description(r); });
}

// ---------------------------------------------------------------------------
// Service messages
// ---------------------------------------------------------------------------

TEST_CASE("service messages round-trip") {
    roundtrip_message<OpenSecureChannelRequest>(200, 21,
        [](auto& g) { return g.open_request(); });
    roundtrip_message<OpenSecureChannelResponse>(200, 22,
        [](auto& g) { return g.open_response(); });
    roundtrip_message<GetEndpointsRequest>(200, 23,
        [](auto& g) { return g.get_endpoints_request(); });
    roundtrip_message<GetEndpointsResponse>(200, 24,
        [](auto& g) { return g.get_endpoints_response(); });
    roundtrip_message<CreateSessionRequest>(200, 25,
        [](auto& g) { return g.create_session_request(); });
    roundtrip_message<CreateSessionResponse>(100, 26,
        [](auto& g) { return g.create_session_response(); });
    roundtrip_message<ActivateSessionRequest>(200, 27,
        [](auto& g) { return g.activate_session_request(); });
    roundtrip_message<ActivateSessionResponse>(200, 28,
        [](auto& g) { return g.activate_session_response(); });
    roundtrip_message<BrowseRequest>(200, 29, [](auto& g) { return g.browse_request(); });
    roundtrip_message<BrowseResponse>(200, 30, [](auto& g) { return g.browse_response(); });
    roundtrip_message<BrowseNextRequest>(200, 31,
        [](auto& g) { return g.browse_next_request(); });
    roundtrip_message<ReadRequest>(200, 32, [](auto& g) { return g.read_request(); });
    roundtrip_message<ReadResponse>(200, 33, [](auto& g) { return g.read_response(); });

    testgen::Gen gen(34);
    for (int i = 0; i < 200; ++i) {
        CloseSecureChannelRequest c{gen.request_header()};
        auto back = decode_message(encode_message(c));
        REQUIRE(std::get<CloseSecureChannelRequest>(back) == c);
        CloseSessionRequest cs{gen.request_header(), gen.chance(50)};
        REQUIRE(std::get<CloseSessionRequest>(decode_message(encode_message(cs))) == cs);
        CloseSessionResponse cr{gen.response_header()};
        REQUIRE(std::get<CloseSessionResponse>(decode_message(encode_message(cr))) == cr);
        ServiceFault f{gen.response_header()};
        REQUIRE(std::get<ServiceFault>(decode_message(encode_message(f))) == f);
    }
}

TEST_CASE("unmodeled service ids pass through opaquely") {
    OpaqueService o;
    o.type_id = NodeId::numeric(0, service_id::WriteRequest);
    o.body = {1, 2, 3, 4};
    ServiceBody back = decode_message(encode_message(o));
    REQUIRE(std::get<OpaqueService>(back) == o);

    REQUIRE(peek_type_id(encode_message(o)) ==
            NodeId::numeric(0, service_id::WriteRequest));
}

TEST_CASE("anonymous identity token wraps and unwraps") {
    AnonymousIdentityToken t{UaString("anon0")};
    ExtensionObject e = make_identity_token(t);
    REQUIRE(e.type_id == NodeId::numeric(0, service_id::AnonymousIdentityToken));
    auto back = parse_anonymous_token(e);
    REQUIRE(back.has_value());
    REQUIRE(back->policy_id.str() == "anon0");

    ExtensionObject other;
    other.type_id = NodeId::numeric(0, service_id::UserNameIdentityToken);
    REQUIRE_FALSE(parse_anonymous_token(other).has_value());
}

// ---------------------------------------------------------------------------
// Frozen fixtures (bytes produced by an independent packer)
// ---------------------------------------------------------------------------

TEST_CASE("get endpoints response fixture decodes field by field") {
    Bytes frame = testsupport::load_fixture("get_endpoints_response.hex");
    TransportMessage m = decode_frame(frame);
    REQUIRE(m.kind == MsgKind::Msg);
    MsgPayload p = decode_msg_payload(m.payload);
    REQUIRE(p.channel_id == 5);
    REQUIRE(p.token_id == 7);
    REQUIRE(p.sequence.sequence_number == 42);
    REQUIRE(p.sequence.request_id == 3);

    ServiceBody body = decode_message(p.body);
    auto& resp = std::get<GetEndpointsResponse>(body);
    REQUIRE(resp.header.timestamp == 0x0123456789ABCDEF);
    REQUIRE(resp.header.request_handle == 3);
    REQUIRE(resp.header.service_result == status::Good);
    REQUIRE(resp.endpoints.size() == 2);

    const auto& e1 = resp.endpoints[0];
    REQUIRE(e1.endpoint_url.str() == "opc.tcp://plc.example:4840");
    REQUIRE(e1.server.application_uri.str() == "urn:plc");
    REQUIRE(e1.server.application_name.text.str() == "PLC");
    REQUIRE(e1.server_certificate.null);
    REQUIRE(e1.security_mode == SecurityMode::None);
    REQUIRE(e1.security_policy_uri.str() ==
            "http://opcfoundation.org/UA/SecurityPolicy#None");
    REQUIRE(e1.user_token_policies.size() == 1);
    REQUIRE(e1.user_token_policies[0].policy_id.str() == "anon");
    REQUIRE(e1.user_token_policies[0].token_type == UserTokenType::Anonymous);
    REQUIRE(e1.security_level == 0);

    const auto& e2 = resp.endpoints[1];
    REQUIRE(e2.server.discovery_urls.size() == 1);
    REQUIRE(e2.server_certificate.value == Bytes{1, 2, 3});
    REQUIRE(e2.security_mode == SecurityMode::SignAndEncrypt);
    REQUIRE(e2.security_policy_uri.str() ==
            "http://opcfoundation.org/UA/SecurityPolicy#Basic256Sha256");
    REQUIRE(e2.user_token_policies.size() == 2);
    REQUIRE(e2.user_token_policies[0].token_type == UserTokenType::Username);
    REQUIRE(e2.user_token_policies[1].token_type == UserTokenType::Certificate);
    REQUIRE(e2.security_level == 110);

    // Canonical re-encode reproduces the independent packer's bytes.
    MsgPayload out;
    out.channel_id = 5;
    out.token_id = 7;
    out.sequence = {42, 3};
    out.body = encode_message(resp);
    REQUIRE(encode_frame(MsgKind::Msg, 'F', encode_msg_payload(out)) == frame);
}

TEST_CASE("read response fixture decodes") {
    Bytes frame = testsupport::load_fixture("read_response.hex");
    MsgPayload p = decode_msg_payload(decode_frame(frame).payload);
    auto body = decode_message(p.body);
    auto& resp = std::get<ReadResponse>(body);
    REQUIRE(resp.results.size() == 2);
    REQUIRE(resp.results[0].value->as_byte() == uint8_t{5});
    REQUIRE(resp.results[0].status == status::Good);
    auto arr = resp.results[1].value->as_string_array();
    REQUIRE(arr.has_value());
    REQUIRE(*arr == std::vector<std::string>{"a", "bc"});
    REQUIRE_FALSE(resp.results[1].status.has_value());
}

// ---------------------------------------------------------------------------
// Malformed input (smoke; the long corpus lives in the acceptance suite)
// ---------------------------------------------------------------------------

TEST_CASE("every truncation of a valid message yields a typed error") {
    testgen::Gen gen(0x74727563);
    Bytes body = encode_message(gen.get_endpoints_response());
    for (size_t cut = 0; cut < body.size(); ++cut) {
        Bytes prefix(body.begin(), body.begin() + static_cast<ptrdiff_t>(cut));
        try {
            (void)decode_message(prefix);
            // Some prefixes happen to parse as a shorter valid message;
            // that is fine — we only require no untyped failure.
        } catch (const CodecError&) {
        }
    }
}

TEST_CASE("oversized array claims fail fast without allocation") {
    // GetEndpointsResponse whose endpoint count claims INT32_MAX.
    ByteWriter w;
    encode(w, NodeId::numeric(0, service_id::GetEndpointsResponse));
    testgen::Gen gen(1);
    encode(w, ResponseHeader{});
    w.i32(0x7fffffff);
    try {
        (void)decode_message(w.data());
        FAIL("expected CodecError");
    } catch (const CodecError& e) {
        REQUIRE(e.code() == errc::truncated);
    }
}

TEST_CASE("random byte soup never escapes the typed error contract") {
    testgen::Gen gen(0xf00d);
    for (int i = 0; i < 5000; ++i) {
        Bytes junk = gen.bytes(96);
        try {
            (void)decode_message(junk);
        } catch (const CodecError&) {
        }
        if (junk.size() >= 8) {
            try {
                (void)decode_frame_header(junk);
            } catch (const CodecError&) {
            }
        }
    }
}
