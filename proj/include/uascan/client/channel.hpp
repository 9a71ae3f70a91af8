#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "uascan/client/budget.hpp"
#include "uascan/errors.hpp"
#include "uascan/net/framing.hpp"
#include "uascan/net/tcp.hpp"
#include "uascan/net/url.hpp"
#include "uascan/wire/services.hpp"
#include "uascan/wire/transport.hpp"

namespace uascan::client {

/// Server replied with an ERR frame: protocol-level rejection, carries the
/// raw status code (e.g. Bad_SecurityChecksFailed on certificate rejects).
class ServerError : public NetError {
public:
    ServerError(uint32_t code, const std::string& reason)
        : NetError(errc::transport_error, "server error 0x" + to_hex_u32(code) + ": " + reason),
          status_(code) {}
    uint32_t status() const { return status_; }

private:
    static std::string to_hex_u32(uint32_t v) {
        static const char* digits = "0123456789abcdef";
        std::string s(8, '0');
        for (int i = 7; i >= 0; --i, v >>= 4) s[static_cast<size_t>(i)] = digits[v & 0xf];
        return s;
    }
    uint32_t status_;
};

/// One OPC UA client connection: Hello/Ack, one secure channel, one
/// session. Every outbound message is paced and counted against the
/// host budget.
class UaConnection {
public:
    UaConnection(const net::Target& target, BudgetTracker& budget, net::Millis io_timeout)
        : target_(target), budget_(budget), io_timeout_(io_timeout) {}

    const wire::AckBody& ack() const { return ack_; }
    uint32_t channel_id() const { return channel_id_; }
    uint64_t bytes_sent() const { return conn_.bytes_sent(); }
    uint64_t bytes_received() const { return conn_.bytes_received(); }

    /// TCP connect + HEL/ACK. Throws NetError (connect/transport) or
    /// CodecError; an ERR or foreign reply surfaces as not_opc_ua.
    void hello() {
        conn_ = net::TcpConn::connect_to(target_, io_timeout_);
        wire::HelloBody hello;
        hello.protocol_version = 0;
        hello.receive_buffer_size = kReceiveBuffer;
        hello.send_buffer_size = kReceiveBuffer;
        hello.max_message_size = kMaxResponseSize;
        hello.max_chunk_count = 4096;
        hello.endpoint_url = wire::UaString(net::opc_url(target_));
        send(wire::MsgKind::Hello, 'F', wire::encode_hello(hello));

        wire::TransportMessage reply;
        try {
            reply = read();
        } catch (const CodecError& e) {
            if (e.code() == errc::unknown_kind)
                throw NetError(errc::not_opc_ua, target_.to_string() + ": not an OPC UA peer");
            throw;
        }
        if (reply.kind == wire::MsgKind::Error) {
            auto err = wire::decode_error(reply.payload);
            throw ServerError(err.code, err.reason.str());
        }
        if (reply.kind != wire::MsgKind::Ack)
            throw NetError(errc::not_opc_ua, "expected ACK, got different frame");
        ack_ = wire::decode_ack(reply.payload);
        if (ack_.receive_buffer_size < 8192) ack_.receive_buffer_size = 8192;
    }

    /// OpenSecureChannel over the asymmetric header. For policy None both
    /// certificate fields stay null; otherwise the self-signed client
    /// certificate and the server certificate's SHA-1 thumbprint ride along.
    wire::OpenSecureChannelResponse open_channel(const std::string& policy_uri,
                                                 wire::SecurityMode mode, BytesView client_cert,
                                                 BytesView server_cert_thumbprint) {
        wire::OpenSecureChannelRequest req;
        req.header.timestamp = now_filetime();
        req.header.request_handle = next_request_id_;
        req.header.timeout_hint = static_cast<uint32_t>(io_timeout_.count());
        req.client_protocol_version = 0;
        req.request_type = wire::SecurityTokenRequestType::Issue;
        req.security_mode = mode;
        req.requested_lifetime_ms = 3600000;

        wire::OpenPayload payload;
        payload.channel_id = 0;
        payload.security.security_policy_uri = wire::UaString(policy_uri);
        if (!client_cert.empty()) {
            payload.security.sender_certificate = wire::UaBytes(Bytes(client_cert.begin(), client_cert.end()));
            payload.security.receiver_certificate_thumbprint =
                wire::UaBytes(Bytes(server_cert_thumbprint.begin(), server_cert_thumbprint.end()));
        }
        payload.sequence.sequence_number = next_sequence_++;
        payload.sequence.request_id = next_request_id_++;
        payload.body = wire::encode_message(req);
        send(wire::MsgKind::Open, 'F', wire::encode_open_payload(payload));

        auto reply = read();
        if (reply.kind == wire::MsgKind::Error) {
            auto err = wire::decode_error(reply.payload);
            throw ServerError(err.code, err.reason.str());
        }
        if (reply.kind != wire::MsgKind::Open)
            throw NetError(errc::transport_error, "expected OPN response");
        auto open = wire::decode_open_payload(reply.payload);
        auto body = wire::decode_message(open.body);
        if (auto* fault = std::get_if<wire::ServiceFault>(&body))
            throw ServerError(fault->header.service_result, "OpenSecureChannel fault");
        auto* resp = std::get_if<wire::OpenSecureChannelResponse>(&body);
        if (!resp) throw CodecError(errc::malformed_response, "OPN reply is not OpenSecureChannelResponse");
        channel_id_ = resp->token.channel_id;
        token_id_ = resp->token.token_id;
        return *resp;
    }

    /// Sends one service request and returns the decoded response body.
    /// Chunked responses are reassembled; ERR frames become ServerError.
    wire::ServiceBody call(BytesView request_body) {
        uint32_t request_id = next_request_id_++;
        auto frames = wire::chunk_message(channel_id_, token_id_, next_sequence_, request_id,
                                          request_body, max_request_chunk());
        bool first = true;
        for (const auto& f : frames) {
            if (first) {
                budget_.pace();
                first = false;
            }
            conn_.send_all(f);
        }
        budget_.add_bytes(frame_bytes(frames));

        wire::ChunkAssembler assembler(kMaxResponseSize);
        for (;;) {
            auto frame = read();
            if (frame.kind == wire::MsgKind::Error) {
                auto err = wire::decode_error(frame.payload);
                throw ServerError(err.code, err.reason.str());
            }
            if (frame.kind != wire::MsgKind::Msg)
                throw NetError(errc::transport_error, "expected MSG frame");
            auto msg = wire::decode_msg_payload(frame.payload);
            if (msg.channel_id != channel_id_)
                throw NetError(errc::transport_error, "response on wrong channel");
            if (auto body = assembler.feed(frame.chunk, msg.body)) return wire::decode_message(*body);
        }
    }

    /// CloseSecureChannel is fire-and-forget per protocol.
    void close_channel() {
        if (!conn_.open() || channel_id_ == 0) return;
        try {
            wire::CloseSecureChannelRequest req;
            req.header.timestamp = now_filetime();
            req.header.request_handle = next_request_id_;
            auto frames = wire::chunk_message(channel_id_, token_id_, next_sequence_,
                                              next_request_id_++, wire::encode_message(req),
                                              max_request_chunk(), wire::MsgKind::Close);
            budget_.pace();
            for (const auto& f : frames) conn_.send_all(f);
            budget_.add_bytes(frame_bytes(frames));
        } catch (const Error&) {
            // Best effort; the TCP close below is what actually matters.
        }
        conn_.close();
    }

    void abort() { conn_.close(); }

    /// Windows FILETIME (100 ns ticks since 1601-01-01), the protocol's
    /// timestamp epoch.
    static int64_t now_filetime() {
        auto unix_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
        return unix_ns / 100 + 116444736000000000ll;
    }

private:
    static constexpr uint32_t kReceiveBuffer = 1u << 20;       // 1 MiB
    static constexpr uint32_t kMaxResponseSize = 16u << 20;    // matches frame cap

    size_t max_request_chunk() const {
        // Leave room for the 8-byte frame header and 16-byte symmetric headers.
        return ack_.receive_buffer_size > 64 ? ack_.receive_buffer_size - 32 : 8192;
    }

    static uint64_t frame_bytes(const std::vector<Bytes>& frames) {
        uint64_t n = 0;
        for (const auto& f : frames) n += f.size();
        return n;
    }

    void send(wire::MsgKind kind, char chunk, BytesView payload) {
        budget_.pace();
        Bytes frame = wire::encode_frame(kind, chunk, payload);
        conn_.send_all(frame);
        budget_.add_bytes(frame.size());
    }

    wire::TransportMessage read() {
        auto before = conn_.bytes_received();
        auto frame = net::read_frame(conn_, budget_.read_deadline(io_timeout_), kMaxResponseSize);
        budget_.add_bytes(conn_.bytes_received() - before);
        return frame;
    }

    net::Target target_;
    BudgetTracker& budget_;
    net::Millis io_timeout_;
    net::TcpConn conn_;
    wire::AckBody ack_;
    uint32_t channel_id_ = 0;
    uint32_t token_id_ = 0;
    uint32_t next_sequence_ = 1;
    uint32_t next_request_id_ = 1;
};

}  // namespace uascan::client
