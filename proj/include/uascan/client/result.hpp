#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uascan/net/url.hpp"
#include "uascan/wire/services.hpp"
#include "uascan/wire/types.hpp"

namespace uascan::client {

using net::Target;

/// Outcome of the secure-channel probe against the least secure endpoint.
enum class ChannelProbe : uint8_t {
    NotAttempted,         // endpoint phase already failed
    Accepted,             // OpenSecureChannel succeeded
    CertificateRejected,  // server refused our self-signed instance certificate
    Error,                // transport error or unexpected fault
};

/// Outcome of the session probe (CreateSession + anonymous ActivateSession).
enum class SessionProbe : uint8_t {
    NotAttempted,            // no channel to run it over
    AnonymousAccepted,       // anonymous activation succeeded
    AuthenticationRejected,  // session reached, identity token refused
    SecureChannelRejected,   // could not establish a channel to try
    InvalidConfiguration,    // server faulted in a way that breaks its own contract
};

inline const char* to_string(ChannelProbe p) {
    switch (p) {
        case ChannelProbe::NotAttempted: return "NotAttempted";
        case ChannelProbe::Accepted: return "Accepted";
        case ChannelProbe::CertificateRejected: return "CertificateRejected";
        case ChannelProbe::Error: return "Error";
    }
    return "?";
}

inline const char* to_string(SessionProbe p) {
    switch (p) {
        case SessionProbe::NotAttempted: return "NotAttempted";
        case SessionProbe::AnonymousAccepted: return "AnonymousAccepted";
        case SessionProbe::AuthenticationRejected: return "AuthenticationRejected";
        case SessionProbe::SecureChannelRejected: return "SecureChannelRejected";
        case SessionProbe::InvalidConfiguration: return "InvalidConfiguration";
    }
    return "?";
}

/// Browse/Read harvest. Keyed by NodeId so duplicates collapse and ordering
/// is canonical regardless of traversal schedule.
struct AddressSpaceSnapshot {
    std::map<wire::NodeId, wire::NodeRecord> nodes;
    std::vector<std::string> namespace_array;
    bool truncated = false;  // budget tripped or node cap hit mid-walk

    bool operator==(const AddressSpaceSnapshot&) const = default;
};

/// Everything one probe of one target produced. Raw material for assessment;
/// holds observations only, never verdicts.
struct ProbeResult {
    Target target;
    bool reached = false;  // TCP + Hello/Ack completed
    std::string error;     // human-readable cause when !reached or probes erred

    std::vector<wire::EndpointDescription> endpoints;
    std::optional<std::vector<uint8_t>> server_certificate;  // DER, from endpoints

    ChannelProbe channel_probe = ChannelProbe::NotAttempted;
    uint32_t channel_status = 0;  // raw status when the channel probe failed
    SessionProbe session_probe = SessionProbe::NotAttempted;
    uint32_t session_status = 0;  // raw status when the session probe failed

    std::optional<std::string> application_uri;
    std::optional<std::string> product_uri;
    std::optional<std::string> software_version;
    std::optional<AddressSpaceSnapshot> address_space;

    uint64_t bytes_sent = 0;
    uint64_t bytes_received = 0;
    std::chrono::milliseconds duration{0};
    int64_t observed_at = 0;  // unix seconds, campaign wall clock

    bool operator==(const ProbeResult&) const = default;
};

}  // namespace uascan::client
