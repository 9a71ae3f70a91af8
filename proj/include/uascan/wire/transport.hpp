#pragma once

#include <cstdint>
#include <string>

#include "uascan/bytes.hpp"
#include "uascan/wire/types.hpp"

namespace uascan::wire {

// ---------------------------------------------------------------------------
// Connection-protocol framing (opc.tcp)
//
// Every frame starts with an 8-byte header: three ASCII letters naming the
// message kind, one chunk letter ('F' final, 'C' intermediate, 'A' abort),
// and a uint32 total length that counts the header itself.
// ---------------------------------------------------------------------------

enum class MsgKind : uint8_t { Hello, Ack, Error, Open, Msg, Close };

inline const char* kind_code(MsgKind k) {
    switch (k) {
    case MsgKind::Hello: return "HEL";
    case MsgKind::Ack: return "ACK";
    case MsgKind::Error: return "ERR";
    case MsgKind::Open: return "OPN";
    case MsgKind::Msg: return "MSG";
    case MsgKind::Close: return "CLO";
    }
    return "???";
}

constexpr size_t kFrameHeaderSize = 8;

/// Hard ceiling on a single frame; anything larger is hostile or garbage.
constexpr uint32_t kMaxFrameLength = 16u * 1024 * 1024;

struct FrameHeader {
    MsgKind kind = MsgKind::Hello;
    char chunk = 'F';
    uint32_t total_length = 0;  // includes the 8 header bytes

    size_t payload_length() const { return total_length - kFrameHeaderSize; }
};

inline FrameHeader decode_frame_header(BytesView header) {
    if (header.size() < kFrameHeaderSize)
        throw CodecError(errc::truncated, "frame header needs 8 bytes");
    FrameHeader h;
    const char k0 = static_cast<char>(header[0]);
    const char k1 = static_cast<char>(header[1]);
    const char k2 = static_cast<char>(header[2]);
    auto is = [&](const char* c) { return k0 == c[0] && k1 == c[1] && k2 == c[2]; };
    if (is("HEL")) h.kind = MsgKind::Hello;
    else if (is("ACK")) h.kind = MsgKind::Ack;
    else if (is("ERR")) h.kind = MsgKind::Error;
    else if (is("OPN")) h.kind = MsgKind::Open;
    else if (is("MSG")) h.kind = MsgKind::Msg;
    else if (is("CLO")) h.kind = MsgKind::Close;
    else
        throw CodecError(errc::unknown_kind,
                         std::string("unknown message kind \"") + k0 + k1 + k2 + '"');
    h.chunk = static_cast<char>(header[3]);
    if (h.chunk != 'F' && h.chunk != 'C' && h.chunk != 'A')
        throw CodecError(errc::unknown_kind,
                         std::string("unknown chunk type '") + h.chunk + '\'');
    h.total_length = static_cast<uint32_t>(header[4]) |
                     static_cast<uint32_t>(header[5]) << 8 |
                     static_cast<uint32_t>(header[6]) << 16 |
                     static_cast<uint32_t>(header[7]) << 24;
    if (h.total_length < kFrameHeaderSize)
        throw CodecError(errc::truncated, "declared frame length below header size");
    if (h.total_length > kMaxFrameLength)
        throw CodecError(errc::oversized_message, "declared frame length exceeds cap");
    return h;
}

struct TransportMessage {
    MsgKind kind = MsgKind::Hello;
    char chunk = 'F';
    Bytes payload;  // everything after the 8-byte header
};

inline Bytes encode_frame(MsgKind kind, char chunk, BytesView payload) {
    ByteWriter w;
    const char* code = kind_code(kind);
    w.u8(static_cast<uint8_t>(code[0]));
    w.u8(static_cast<uint8_t>(code[1]));
    w.u8(static_cast<uint8_t>(code[2]));
    w.u8(static_cast<uint8_t>(chunk));
    w.u32(static_cast<uint32_t>(kFrameHeaderSize + payload.size()));
    w.raw(payload);
    return w.take();
}

inline Bytes encode_frame(const TransportMessage& m) {
    return encode_frame(m.kind, m.chunk, m.payload);
}

/// Decodes one complete frame from a buffer that holds exactly one frame.
inline TransportMessage decode_frame(BytesView buf) {
    FrameHeader h = decode_frame_header(buf);
    if (buf.size() != h.total_length)
        throw CodecError(errc::truncated, "frame buffer does not match declared length");
    TransportMessage m;
    m.kind = h.kind;
    m.chunk = h.chunk;
    m.payload.assign(buf.begin() + kFrameHeaderSize, buf.end());
    return m;
}

// ---------------------------------------------------------------------------
// Frame payload layers
// ---------------------------------------------------------------------------

struct HelloBody {
    uint32_t protocol_version = 0;
    uint32_t receive_buffer_size = 0;
    uint32_t send_buffer_size = 0;
    uint32_t max_message_size = 0;   // 0 = no limit announced
    uint32_t max_chunk_count = 0;    // 0 = no limit announced
    UaString endpoint_url;

    bool operator==(const HelloBody&) const = default;
};

inline Bytes encode_hello(const HelloBody& h) {
    ByteWriter w;
    w.u32(h.protocol_version);
    w.u32(h.receive_buffer_size);
    w.u32(h.send_buffer_size);
    w.u32(h.max_message_size);
    w.u32(h.max_chunk_count);
    encode(w, h.endpoint_url);
    return w.take();
}

inline HelloBody decode_hello(BytesView payload) {
    ByteReader r(payload);
    HelloBody h;
    h.protocol_version = r.u32();
    h.receive_buffer_size = r.u32();
    h.send_buffer_size = r.u32();
    h.max_message_size = r.u32();
    h.max_chunk_count = r.u32();
    h.endpoint_url = decode_string(r);
    return h;
}

struct AckBody {
    uint32_t protocol_version = 0;
    uint32_t receive_buffer_size = 0;
    uint32_t send_buffer_size = 0;
    uint32_t max_message_size = 0;
    uint32_t max_chunk_count = 0;

    bool operator==(const AckBody&) const = default;
};

inline Bytes encode_ack(const AckBody& a) {
    ByteWriter w;
    w.u32(a.protocol_version);
    w.u32(a.receive_buffer_size);
    w.u32(a.send_buffer_size);
    w.u32(a.max_message_size);
    w.u32(a.max_chunk_count);
    return w.take();
}

inline AckBody decode_ack(BytesView payload) {
    ByteReader r(payload);
    AckBody a;
    a.protocol_version = r.u32();
    a.receive_buffer_size = r.u32();
    a.send_buffer_size = r.u32();
    a.max_message_size = r.u32();
    a.max_chunk_count = r.u32();
    return a;
}

struct ErrorBody {
    uint32_t code = 0;
    UaString reason;

    bool operator==(const ErrorBody&) const = default;
};

inline Bytes encode_error(const ErrorBody& e) {
    ByteWriter w;
    w.u32(e.code);
    encode(w, e.reason);
    return w.take();
}

inline ErrorBody decode_error(BytesView payload) {
    ByteReader r(payload);
    ErrorBody e;
    e.code = r.u32();
    e.reason = decode_string(r);
    return e;
}

struct SequenceHeader {
    uint32_t sequence_number = 0;
    uint32_t request_id = 0;

    bool operator==(const SequenceHeader&) const = default;
};

/// Asymmetric security header carried by OPN frames.
struct AsymmetricHeader {
    UaString security_policy_uri;
    UaBytes sender_certificate;
    UaBytes receiver_certificate_thumbprint;

    bool operator==(const AsymmetricHeader&) const = default;
};

struct OpenPayload {
    uint32_t channel_id = 0;
    AsymmetricHeader security;
    SequenceHeader sequence;
    Bytes body;

    bool operator==(const OpenPayload&) const = default;
};

inline Bytes encode_open_payload(const OpenPayload& p) {
    ByteWriter w;
    w.u32(p.channel_id);
    encode(w, p.security.security_policy_uri);
    encode(w, p.security.sender_certificate);
    encode(w, p.security.receiver_certificate_thumbprint);
    w.u32(p.sequence.sequence_number);
    w.u32(p.sequence.request_id);
    w.raw(p.body);
    return w.take();
}

inline OpenPayload decode_open_payload(BytesView payload) {
    ByteReader r(payload);
    OpenPayload p;
    p.channel_id = r.u32();
    p.security.security_policy_uri = decode_string(r);
    p.security.sender_certificate = decode_byte_string(r);
    p.security.receiver_certificate_thumbprint = decode_byte_string(r);
    p.sequence.sequence_number = r.u32();
    p.sequence.request_id = r.u32();
    p.body = r.bytes(r.remaining());
    return p;
}

/// Symmetric layer carried by MSG and CLO frames.
struct MsgPayload {
    uint32_t channel_id = 0;
    uint32_t token_id = 0;
    SequenceHeader sequence;
    Bytes body;

    bool operator==(const MsgPayload&) const = default;
};

inline Bytes encode_msg_payload(const MsgPayload& p) {
    ByteWriter w;
    w.u32(p.channel_id);
    w.u32(p.token_id);
    w.u32(p.sequence.sequence_number);
    w.u32(p.sequence.request_id);
    w.raw(p.body);
    return w.take();
}

inline MsgPayload decode_msg_payload(BytesView payload) {
    ByteReader r(payload);
    MsgPayload p;
    p.channel_id = r.u32();
    p.token_id = r.u32();
    p.sequence.sequence_number = r.u32();
    p.sequence.request_id = r.u32();
    p.body = r.bytes(r.remaining());
    return p;
}

// ---------------------------------------------------------------------------
// Chunk reassembly
// ---------------------------------------------------------------------------

/// Reassembles the service body of a chunked message. Callers feed the
/// decoded per-chunk body in arrival order; intermediate chunks ('C')
/// accumulate, the final chunk ('F') completes the message, and an abort
/// ('A') discards everything buffered. The running total is capped so a
/// malicious peer cannot make us buffer unbounded data.
class ChunkAssembler {
public:
    static constexpr size_t kDefaultMaxAssembled = 4u * 1024 * 1024;

    explicit ChunkAssembler(size_t max_assembled = kDefaultMaxAssembled)
        : max_assembled_(max_assembled) {}

    /// Returns the complete body when `chunk` is 'F', std::nullopt otherwise.
    std::optional<Bytes> feed(char chunk, BytesView body) {
        if (chunk == 'A') {
            reset();
            return std::nullopt;
        }
        if (chunk != 'C' && chunk != 'F')
            throw CodecError(errc::unknown_kind,
                             std::string("unknown chunk type '") + chunk + '\'');
        if (buffer_.size() + body.size() > max_assembled_)
            throw CodecError(errc::oversized_message, "assembled message exceeds cap");
        buffer_.insert(buffer_.end(), body.begin(), body.end());
        ++chunks_;
        if (chunk == 'C') return std::nullopt;
        Bytes out = std::move(buffer_);
        reset();
        return out;
    }

    bool pending() const { return !buffer_.empty() || chunks_ > 0; }
    size_t buffered() const { return buffer_.size(); }
    void reset() {
        buffer_.clear();
        chunks_ = 0;
    }

private:
    Bytes buffer_;
    size_t chunks_ = 0;
    size_t max_assembled_;
};

/// Splits a service body into MSG frames no larger than `max_chunk_body`
/// bytes of body each. Sequence numbers continue from `sequence`.
inline std::vector<Bytes> chunk_message(uint32_t channel_id, uint32_t token_id,
                                        uint32_t& sequence, uint32_t request_id,
                                        BytesView body, size_t max_chunk_body,
                                        MsgKind kind = MsgKind::Msg) {
    std::vector<Bytes> frames;
    size_t offset = 0;
    do {
        size_t take = std::min(max_chunk_body, body.size() - offset);
        bool last = offset + take == body.size();
        MsgPayload p;
        p.channel_id = channel_id;
        p.token_id = token_id;
        p.sequence.sequence_number = sequence++;
        p.sequence.request_id = request_id;
        p.body.assign(body.begin() + static_cast<ptrdiff_t>(offset),
                      body.begin() + static_cast<ptrdiff_t>(offset + take));
        frames.push_back(encode_frame(kind, last ? 'F' : 'C', encode_msg_payload(p)));
        offset += take;
    } while (offset < body.size());
    return frames;
}

}  // namespace uascan::wire
