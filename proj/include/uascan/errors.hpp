#pragma once

#include <stdexcept>
#include <string>

namespace uascan {

enum class errc {
    truncated,
    unknown_kind,
    oversized_message,
    malformed_response,
    unsupported_service,
    malformed_certificate,
    malformed_rule_file,
    connect_timeout,
    not_opc_ua,
    transport_error,
    bind_failure,
    io_error,
    unsupported_format,
    empty_endpoint_list,
    invalid_config,
    malformed_snapshot,
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::truncated: return "truncated";
    case errc::unknown_kind: return "unknown_kind";
    case errc::oversized_message: return "oversized_message";
    case errc::malformed_response: return "malformed_response";
    case errc::unsupported_service: return "unsupported_service";
    case errc::malformed_certificate: return "malformed_certificate";
    case errc::malformed_rule_file: return "malformed_rule_file";
    case errc::connect_timeout: return "connect_timeout";
    case errc::not_opc_ua: return "not_opc_ua";
    case errc::transport_error: return "transport_error";
    case errc::bind_failure: return "bind_failure";
    case errc::io_error: return "io_error";
    case errc::unsupported_format: return "unsupported_format";
    case errc::empty_endpoint_list: return "empty_endpoint_list";
    case errc::invalid_config: return "invalid_config";
    case errc::malformed_snapshot: return "malformed_snapshot";
    }
    return "unknown";
}

/// Base error for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

/// Structural decode/encode failures. Decoders throw nothing else.
class CodecError : public Error {
public:
    using Error::Error;
};

/// Socket-level failures (connect, read, write, bind).
class NetError : public Error {
public:
    using Error::Error;
};

/// X.509 parse failures.
class CertError : public Error {
public:
    using Error::Error;
};

}  // namespace uascan
