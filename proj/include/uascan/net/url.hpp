#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace uascan::net {

constexpr uint16_t kDefaultPort = 4840;

/// A TCP scan target. Identity (for blocklists, diffs, anonymization) is
/// the canonical "host:port" string.
struct Target {
    std::string host;
    uint16_t port = kDefaultPort;

    std::string to_string() const { return host + ":" + std::to_string(port); }
    bool operator==(const Target&) const = default;
    auto operator<=>(const Target&) const = default;
};

namespace detail {
inline std::optional<uint16_t> parse_port(std::string_view s) {
    if (s.empty() || s.size() > 5) return std::nullopt;
    uint32_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + static_cast<uint32_t>(c - '0');
    }
    if (v == 0 || v > 0xffff) return std::nullopt;
    return static_cast<uint16_t>(v);
}
}  // namespace detail

/// Parses "host[:port]"; IPv6 literals in brackets ("[::1]:4840").
inline std::optional<Target> parse_target(std::string_view text, uint16_t default_port = kDefaultPort) {
    if (text.empty()) return std::nullopt;
    Target t;
    t.port = default_port;
    if (text.front() == '[') {
        size_t close = text.find(']');
        if (close == std::string_view::npos || close == 1) return std::nullopt;
        t.host = std::string(text.substr(1, close - 1));
        std::string_view rest = text.substr(close + 1);
        if (rest.empty()) return t;
        if (rest.front() != ':') return std::nullopt;
        auto p = detail::parse_port(rest.substr(1));
        if (!p) return std::nullopt;
        t.port = *p;
        return t;
    }
    size_t colon = text.rfind(':');
    if (colon == std::string_view::npos || text.find(':') != colon) {
        // Zero colons: bare host. Multiple colons: bracketless IPv6.
        if (colon != std::string_view::npos) {
            t.host = std::string(text);
            return t;
        }
        t.host = std::string(text);
        return t.host.empty() ? std::nullopt : std::make_optional(t);
    }
    auto p = detail::parse_port(text.substr(colon + 1));
    if (!p) return std::nullopt;
    t.host = std::string(text.substr(0, colon));
    if (t.host.empty()) return std::nullopt;
    t.port = *p;
    return t;
}

/// Parses an endpoint URL of the form "opc.tcp://host[:port][/path]".
/// Only the opc.tcp scheme yields a target; anything else is foreign.
inline std::optional<Target> parse_opc_url(std::string_view url) {
    constexpr std::string_view scheme = "opc.tcp://";
    if (url.size() <= scheme.size()) return std::nullopt;
    for (size_t i = 0; i < scheme.size(); ++i) {
        char a = url[i], b = scheme[i];
        if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
        if (a != b) return std::nullopt;
    }
    std::string_view rest = url.substr(scheme.size());
    size_t slash = rest.find('/');
    if (slash != std::string_view::npos) rest = rest.substr(0, slash);
    return parse_target(rest);
}

/// Builds the canonical endpoint URL for a target.
inline std::string opc_url(const Target& t) {
    if (t.host.find(':') != std::string::npos)
        return "opc.tcp://[" + t.host + "]:" + std::to_string(t.port);
    return "opc.tcp://" + t.to_string();
}

}  // namespace uascan::net
