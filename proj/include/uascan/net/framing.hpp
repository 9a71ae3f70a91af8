#pragma once

#include <cstdint>

#include "uascan/errors.hpp"
#include "uascan/net/tcp.hpp"
#include "uascan/wire/transport.hpp"

namespace uascan::net {

/// Reads one complete frame from the stream. The 8-byte header is decoded
/// first so a non-OPC-UA peer fails with unknown_kind before any large
/// allocation.
inline wire::TransportMessage read_frame(TcpConn& conn, Millis timeout,
                                         size_t max_frame = wire::kMaxFrameLength) {
    uint8_t header[wire::kFrameHeaderSize];
    conn.recv_exact(header, sizeof header, timeout);
    wire::FrameHeader h = wire::decode_frame_header(BytesView(header, sizeof header));
    if (h.total_length > max_frame)
        throw CodecError(errc::oversized_message,
                         "frame of " + std::to_string(h.total_length) + " bytes exceeds cap");
    wire::TransportMessage m;
    m.kind = h.kind;
    m.chunk = h.chunk;
    m.payload.resize(h.total_length - wire::kFrameHeaderSize);
    if (!m.payload.empty()) conn.recv_exact(m.payload.data(), m.payload.size(), timeout);
    return m;
}

inline void write_frame(TcpConn& conn, wire::MsgKind kind, char chunk, BytesView payload) {
    conn.send_all(wire::encode_frame(kind, chunk, payload));
}

}  // namespace uascan::net
