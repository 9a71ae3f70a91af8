#pragma once

// Randomized robustness driver for the wire codec. Every input — pure noise,
// corrupted valid encodings, or hostile chunk sequences — must either decode
// or raise a typed CodecError. Anything else (other exception types, crashes)
// is a defect; the first one is captured in Stats::failure.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <typeinfo>

#include "uascan/wire/services.hpp"
#include "uascan/wire/transport.hpp"

#include "gen.hpp"

namespace fuzz {

using namespace uascan;

struct Stats {
    uint64_t iterations = 0;
    uint64_t decoded = 0;   // inputs the codec accepted
    uint64_t rejected = 0;  // inputs refused with a typed error
    std::string failure;    // first unexpected exception; empty when clean

    bool clean() const { return failure.empty(); }
};

namespace detail {

/// One random well-formed service body.
inline Bytes valid_body(testgen::Gen& g) {
    using namespace uascan::wire;
    switch (g.index(18)) {
    case 0: return encode_message(g.open_request());
    case 1: return encode_message(g.open_response());
    case 2: return encode_message(g.get_endpoints_request());
    case 3: return encode_message(g.get_endpoints_response());
    case 4: return encode_message(g.create_session_request());
    case 5: return encode_message(g.create_session_response());
    case 6: return encode_message(g.activate_session_request());
    case 7: return encode_message(g.activate_session_response());
    case 8: return encode_message(g.browse_request());
    case 9: return encode_message(g.browse_response());
    case 10: return encode_message(g.browse_next_request());
    case 11: return encode_message(g.read_request());
    case 12: return encode_message(g.read_response());
    case 13: {
        CloseSecureChannelRequest m;
        m.header = g.request_header();
        return encode_message(m);
    }
    case 14: {
        CloseSessionRequest m;
        m.header = g.request_header();
        m.delete_subscriptions = g.chance(50);
        return encode_message(m);
    }
    case 15: {
        CloseSessionResponse m;
        m.header = g.response_header();
        return encode_message(m);
    }
    case 16: {
        BrowseNextResponse m;
        m.header = g.response_header();
        size_t n = g.index(3);
        for (size_t i = 0; i < n; ++i) m.results.push_back(g.browse_result());
        return encode_message(m);
    }
    default: {
        ServiceFault m;
        m.header = g.response_header();
        return encode_message(m);
    }
    }
}

/// Corrupts a buffer: byte flips, truncation, or random suffix bytes.
inline Bytes mutate(testgen::Gen& g, Bytes buf) {
    switch (g.index(3)) {
    case 0: {
        if (buf.empty()) return buf;
        int flips = g.range(1, 8);
        for (int i = 0; i < flips; ++i) buf[g.index(buf.size())] = g.u8();
        return buf;
    }
    case 1: return Bytes(buf.begin(), buf.begin() + static_cast<long>(g.index(buf.size() + 1)));
    default: {
        size_t extra = g.index(16) + 1;
        for (size_t i = 0; i < extra; ++i) buf.push_back(g.u8());
        return buf;
    }
    }
}

}  // namespace detail

/// Feeds one input through every decoder that could plausibly see it.
/// Returns true when at least one decoder accepted the bytes.
inline bool exercise(testgen::Gen& g, const Bytes& input) {
    using namespace uascan::wire;
    bool accepted = false;
    auto attempt = [&](auto&& fn) {
        try {
            fn();
            accepted = true;
        } catch (const CodecError&) {
        }
    };

    switch (g.index(4)) {
    case 0:  // transport framing
        attempt([&] { decode_frame(input); });
        attempt([&] { decode_hello(input); });
        attempt([&] { decode_ack(input); });
        attempt([&] { decode_error(input); });
        break;
    case 1:  // secure-channel payloads
        attempt([&] { decode_open_payload(input); });
        attempt([&] { decode_msg_payload(input); });
        break;
    case 2:  // service bodies
        attempt([&] { decode_message(input); });
        break;
    default: {  // chunk reassembly of adversarial sequences
        ChunkAssembler assembler(64 * 1024);
        int chunks = g.range(1, 4);
        for (int i = 0; i < chunks; ++i) {
            char kind = "CCFAX"[g.index(5)];
            try {
                if (auto body = assembler.feed(kind, input)) {
                    attempt([&] { decode_message(*body); });
                }
            } catch (const CodecError&) {
                break;
            }
        }
        break;
    }
    }
    return accepted;
}

/// Runs until `iterations` inputs are consumed or `deadline` (when set)
/// passes, whichever comes first. Deterministic for a given seed and
/// iteration count.
inline Stats run(uint64_t seed, uint64_t iterations,
                 std::optional<std::chrono::steady_clock::time_point> deadline = {}) {
    testgen::Gen gen(seed);
    Stats stats;
    for (uint64_t i = 0; i < iterations; ++i) {
        if (deadline && std::chrono::steady_clock::now() >= *deadline) break;
        ++stats.iterations;
        try {
            Bytes input;
            if (gen.chance(45)) {
                input = detail::mutate(gen, detail::valid_body(gen));
            } else if (gen.chance(20)) {
                // valid bodies keep the accept path honest
                input = detail::valid_body(gen);
            } else {
                input = gen.bytes(256);
            }
            if (exercise(gen, input))
                ++stats.decoded;
            else
                ++stats.rejected;
        } catch (const std::exception& e) {
            stats.failure = std::string(typeid(e).name()) + ": " + e.what();
            break;
        } catch (...) {
            stats.failure = "non-standard exception";
            break;
        }
    }
    return stats;
}

}  // namespace fuzz
