#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "uascan/bytes.hpp"

namespace uascan::wire {

// ---------------------------------------------------------------------------
// Built-in scalar types
// ---------------------------------------------------------------------------

/// UA String: length-prefixed UTF-8, with -1 encoding a null string.
/// Null and empty are distinct on the wire; both read back as an empty
/// value but the flag is preserved so re-encoding is byte-stable.
struct UaString {
    std::string value;
    bool null = true;

    UaString() = default;
    UaString(std::string v) : value(std::move(v)), null(false) {}
    UaString(const char* v) : value(v), null(false) {}
    static UaString null_string() { return UaString{}; }

    const std::string& str() const { return value; }
    bool empty() const { return value.empty(); }
    bool operator==(const UaString&) const = default;
};

/// UA ByteString: same framing as UaString, opaque bytes.
struct UaBytes {
    Bytes value;
    bool null = true;

    UaBytes() = default;
    UaBytes(Bytes v) : value(std::move(v)), null(false) {}
    static UaBytes null_bytes() { return UaBytes{}; }

    bool empty() const { return value.empty(); }
    bool operator==(const UaBytes&) const = default;
};

struct Guid {
    std::array<uint8_t, 16> raw{};
    bool operator==(const Guid&) const = default;
    auto operator<=>(const Guid&) const = default;

    /// Inverse of to_string. Expects 8-4-4-4-12 lowercase/uppercase hex.
    static std::optional<Guid> parse(std::string_view text) {
        if (text.size() != 36 || text[8] != '-' || text[13] != '-' || text[18] != '-' ||
            text[23] != '-')
            return std::nullopt;
        auto nib = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            return -1;
        };
        // Byte order of each group mirrors the mixed-endian layout below.
        static constexpr int order[16] = {3, 2, 1, 0, 5, 4, 7, 6, 8, 9, 10, 11, 12, 13, 14, 15};
        Guid g;
        size_t pos = 0;
        for (int i = 0; i < 16; ++i) {
            if (text[pos] == '-') ++pos;
            int hi = nib(text[pos]), lo = nib(text[pos + 1]);
            if (hi < 0 || lo < 0) return std::nullopt;
            g.raw[static_cast<size_t>(order[i])] = static_cast<uint8_t>(hi << 4 | lo);
            pos += 2;
        }
        return g;
    }

    /// Standard mixed-endian textual form.
    std::string to_string() const {
        auto hex2 = [](uint8_t b, std::string& s) {
            static const char d[] = "0123456789abcdef";
            s.push_back(d[b >> 4]);
            s.push_back(d[b & 0xf]);
        };
        std::string s;
        for (int i : {3, 2, 1, 0}) hex2(raw[static_cast<size_t>(i)], s);
        s.push_back('-');
        for (int i : {5, 4}) hex2(raw[static_cast<size_t>(i)], s);
        s.push_back('-');
        for (int i : {7, 6}) hex2(raw[static_cast<size_t>(i)], s);
        s.push_back('-');
        for (int i : {8, 9}) hex2(raw[static_cast<size_t>(i)], s);
        s.push_back('-');
        for (int i = 10; i < 16; ++i) hex2(raw[static_cast<size_t>(i)], s);
        return s;
    }
};

inline void encode(ByteWriter& w, const UaString& s) {
    if (s.null) {
        w.i32(-1);
    } else {
        w.i32(static_cast<int32_t>(s.value.size()));
        w.raw(s.value.data(), s.value.size());
    }
}

inline UaString decode_string(ByteReader& r) {
    int32_t n = r.i32();
    if (n < 0) return UaString::null_string();
    Bytes b = r.bytes(static_cast<size_t>(n));
    UaString out;
    out.null = false;
    out.value.assign(b.begin(), b.end());
    return out;
}

inline void encode(ByteWriter& w, const UaBytes& s) {
    if (s.null) {
        w.i32(-1);
    } else {
        w.i32(static_cast<int32_t>(s.value.size()));
        w.raw(s.value);
    }
}

inline UaBytes decode_byte_string(ByteReader& r) {
    int32_t n = r.i32();
    if (n < 0) return UaBytes::null_bytes();
    return UaBytes{r.bytes(static_cast<size_t>(n))};
}

inline void encode(ByteWriter& w, const Guid& g) { w.raw(g.raw); }
inline Guid decode_guid(ByteReader& r) {
    Guid g;
    auto v = r.view(16);
    std::copy(v.begin(), v.end(), g.raw.begin());
    return g;
}

// ---------------------------------------------------------------------------
// NodeId
// ---------------------------------------------------------------------------

struct NodeId {
    using IdVariant = std::variant<uint32_t, std::string, Guid, Bytes>;

    uint16_t namespace_index = 0;
    IdVariant id = uint32_t{0};

    static NodeId numeric(uint16_t ns, uint32_t value) { return NodeId{ns, value}; }
    static NodeId string_id(uint16_t ns, std::string value) {
        return NodeId{ns, IdVariant{std::move(value)}};
    }
    static NodeId guid_id(uint16_t ns, Guid g) { return NodeId{ns, IdVariant{g}}; }
    static NodeId opaque_id(uint16_t ns, Bytes b) { return NodeId{ns, IdVariant{std::move(b)}}; }

    bool is_numeric() const { return std::holds_alternative<uint32_t>(id); }
    uint32_t numeric_value() const { return std::get<uint32_t>(id); }
    bool is_null() const { return namespace_index == 0 && is_numeric() && numeric_value() == 0; }

    bool operator==(const NodeId&) const = default;
    auto operator<=>(const NodeId&) const = default;

    std::string to_string() const {
        std::string s = "ns=" + std::to_string(namespace_index) + ";";
        if (auto* n = std::get_if<uint32_t>(&id)) return s + "i=" + std::to_string(*n);
        if (auto* t = std::get_if<std::string>(&id)) return s + "s=" + *t;
        if (auto* g = std::get_if<Guid>(&id)) return s + "g=" + g->to_string();
        return s + "b=" + to_hex(std::get<Bytes>(id));
    }

    /// Parses "ns=N;i=.." / "ns=N;s=.." / "i=.." / "s=.." (fixture configs).
    static std::optional<NodeId> parse(std::string_view text) {
        uint16_t ns = 0;
        if (text.rfind("ns=", 0) == 0) {
            size_t semi = text.find(';');
            if (semi == std::string_view::npos) return std::nullopt;
            unsigned long v = 0;
            for (char c : text.substr(3, semi - 3)) {
                if (c < '0' || c > '9') return std::nullopt;
                v = v * 10 + static_cast<unsigned long>(c - '0');
            }
            if (v > 0xffff) return std::nullopt;
            ns = static_cast<uint16_t>(v);
            text = text.substr(semi + 1);
        }
        if (text.rfind("i=", 0) == 0) {
            unsigned long long v = 0;
            if (text.size() == 2) return std::nullopt;
            for (char c : text.substr(2)) {
                if (c < '0' || c > '9') return std::nullopt;
                v = v * 10 + static_cast<unsigned long long>(c - '0');
            }
            if (v > 0xffffffffull) return std::nullopt;
            return numeric(ns, static_cast<uint32_t>(v));
        }
        if (text.rfind("s=", 0) == 0) return string_id(ns, std::string(text.substr(2)));
        if (text.rfind("g=", 0) == 0) {
            auto g = Guid::parse(text.substr(2));
            if (!g) return std::nullopt;
            return guid_id(ns, *g);
        }
        if (text.rfind("b=", 0) == 0) return opaque_id(ns, from_hex(text.substr(2)));
        return std::nullopt;
    }
};

inline void encode(ByteWriter& w, const NodeId& n) {
    if (auto* num = std::get_if<uint32_t>(&n.id)) {
        if (n.namespace_index == 0 && *num <= 0xff) {
            w.u8(0x00);
            w.u8(static_cast<uint8_t>(*num));
        } else if (n.namespace_index <= 0xff && *num <= 0xffff) {
            w.u8(0x01);
            w.u8(static_cast<uint8_t>(n.namespace_index));
            w.u16(static_cast<uint16_t>(*num));
        } else {
            w.u8(0x02);
            w.u16(n.namespace_index);
            w.u32(*num);
        }
    } else if (auto* s = std::get_if<std::string>(&n.id)) {
        w.u8(0x03);
        w.u16(n.namespace_index);
        encode(w, UaString(*s));
    } else if (auto* g = std::get_if<Guid>(&n.id)) {
        w.u8(0x04);
        w.u16(n.namespace_index);
        encode(w, *g);
    } else {
        w.u8(0x05);
        w.u16(n.namespace_index);
        encode(w, UaBytes{std::get<Bytes>(n.id)});
    }
}

/// Decodes a NodeId; the two extra flag bits of an ExpandedNodeId are
/// returned through `expanded_flags` when the caller wants them.
inline NodeId decode_node_id(ByteReader& r, uint8_t* expanded_flags = nullptr) {
    uint8_t enc = r.u8();
    if (expanded_flags) *expanded_flags = enc & 0xc0;
    switch (enc & 0x3f) {
    case 0x00:
        return NodeId::numeric(0, r.u8());
    case 0x01: {
        uint8_t ns = r.u8();
        return NodeId::numeric(ns, r.u16());
    }
    case 0x02: {
        uint16_t ns = r.u16();
        return NodeId::numeric(ns, r.u32());
    }
    case 0x03: {
        uint16_t ns = r.u16();
        UaString s = decode_string(r);
        return NodeId::string_id(ns, s.value);
    }
    case 0x04: {
        uint16_t ns = r.u16();
        return NodeId::guid_id(ns, decode_guid(r));
    }
    case 0x05: {
        uint16_t ns = r.u16();
        UaBytes b = decode_byte_string(r);
        return NodeId::opaque_id(ns, std::move(b.value));
    }
    default:
        throw CodecError(errc::malformed_response, "invalid node id encoding byte");
    }
}

struct ExpandedNodeId {
    NodeId node;
    UaString namespace_uri;           // null when absent
    std::optional<uint32_t> server_index;

    bool operator==(const ExpandedNodeId&) const = default;
};

inline void encode(ByteWriter& w, const ExpandedNodeId& e) {
    size_t mark = w.size();
    encode(w, e.node);
    uint8_t flags = 0;
    if (!e.namespace_uri.null) flags |= 0x80;
    if (e.server_index) flags |= 0x40;
    // The flag bits live in the NodeId encoding byte already written.
    if (flags) w.or_u8(mark, flags);
    if (!e.namespace_uri.null) encode(w, e.namespace_uri);
    if (e.server_index) w.u32(*e.server_index);
}

inline ExpandedNodeId decode_expanded_node_id(ByteReader& r) {
    uint8_t flags = 0;
    ExpandedNodeId e;
    e.node = decode_node_id(r, &flags);
    if (flags & 0x80) e.namespace_uri = decode_string(r);
    if (flags & 0x40) e.server_index = r.u32();
    return e;
}

// ---------------------------------------------------------------------------
// Composite built-ins
// ---------------------------------------------------------------------------

struct QualifiedName {
    uint16_t namespace_index = 0;
    UaString name;
    bool operator==(const QualifiedName&) const = default;
};

inline void encode(ByteWriter& w, const QualifiedName& q) {
    w.u16(q.namespace_index);
    encode(w, q.name);
}
inline QualifiedName decode_qualified_name(ByteReader& r) {
    QualifiedName q;
    q.namespace_index = r.u16();
    q.name = decode_string(r);
    return q;
}

struct LocalizedText {
    UaString locale;  // null when absent
    UaString text;    // null when absent
    bool operator==(const LocalizedText&) const = default;
};

inline void encode(ByteWriter& w, const LocalizedText& t) {
    uint8_t mask = 0;
    if (!t.locale.null) mask |= 0x01;
    if (!t.text.null) mask |= 0x02;
    w.u8(mask);
    if (mask & 0x01) encode(w, t.locale);
    if (mask & 0x02) encode(w, t.text);
}
inline LocalizedText decode_localized_text(ByteReader& r) {
    uint8_t mask = r.u8();
    if (mask & ~0x03)
        throw CodecError(errc::malformed_response, "invalid localized text mask");
    LocalizedText t;
    if (mask & 0x01) t.locale = decode_string(r);
    if (mask & 0x02) t.text = decode_string(r);
    return t;
}

struct DiagnosticInfo {
    std::optional<int32_t> symbolic_id;
    std::optional<int32_t> namespace_uri;
    std::optional<int32_t> locale;
    std::optional<int32_t> localized_text;
    std::optional<UaString> additional_info;
    std::optional<uint32_t> inner_status_code;
    std::vector<DiagnosticInfo> inner;  // 0 or 1 elements

    bool operator==(const DiagnosticInfo&) const = default;
};

inline void encode(ByteWriter& w, const DiagnosticInfo& d) {
    uint8_t mask = 0;
    if (d.symbolic_id) mask |= 0x01;
    if (d.namespace_uri) mask |= 0x02;
    if (d.localized_text) mask |= 0x04;
    if (d.locale) mask |= 0x08;
    if (d.additional_info) mask |= 0x10;
    if (d.inner_status_code) mask |= 0x20;
    if (!d.inner.empty()) mask |= 0x40;
    w.u8(mask);
    if (d.symbolic_id) w.i32(*d.symbolic_id);
    if (d.namespace_uri) w.i32(*d.namespace_uri);
    if (d.locale) w.i32(*d.locale);
    if (d.localized_text) w.i32(*d.localized_text);
    if (d.additional_info) encode(w, *d.additional_info);
    if (d.inner_status_code) w.u32(*d.inner_status_code);
    if (!d.inner.empty()) encode(w, d.inner.front());
}

inline DiagnosticInfo decode_diagnostic_info(ByteReader& r, int depth = 0) {
    if (depth > 8) throw CodecError(errc::malformed_response, "diagnostic info too deep");
    uint8_t mask = r.u8();
    if (mask & 0x80) throw CodecError(errc::malformed_response, "invalid diagnostic info mask");
    DiagnosticInfo d;
    if (mask & 0x01) d.symbolic_id = r.i32();
    if (mask & 0x02) d.namespace_uri = r.i32();
    if (mask & 0x08) d.locale = r.i32();
    if (mask & 0x04) d.localized_text = r.i32();
    if (mask & 0x10) d.additional_info = decode_string(r);
    if (mask & 0x20) d.inner_status_code = r.u32();
    if (mask & 0x40) d.inner.push_back(decode_diagnostic_info(r, depth + 1));
    return d;
}

struct ExtensionObject {
    NodeId type_id;
    uint8_t encoding = 0;  // 0 = no body, 1 = binary body
    Bytes body;

    bool operator==(const ExtensionObject&) const = default;
};

inline void encode(ByteWriter& w, const ExtensionObject& e) {
    encode(w, e.type_id);
    w.u8(e.encoding);
    if (e.encoding == 1) {
        w.i32(static_cast<int32_t>(e.body.size()));
        w.raw(e.body);
    }
}

inline ExtensionObject decode_extension_object(ByteReader& r) {
    ExtensionObject e;
    e.type_id = decode_node_id(r);
    e.encoding = r.u8();
    if (e.encoding == 0) return e;
    if (e.encoding == 1 || e.encoding == 2) {
        UaBytes b = decode_byte_string(r);
        e.body = std::move(b.value);
        if (e.encoding == 2) e.encoding = 1;  // XML bodies carried opaquely
        return e;
    }
    throw CodecError(errc::malformed_response, "invalid extension object encoding");
}

// ---------------------------------------------------------------------------
// Variant / DataValue
// ---------------------------------------------------------------------------

namespace variant_type {
constexpr uint8_t Empty = 0;
constexpr uint8_t Boolean = 1;
constexpr uint8_t SByte = 2;
constexpr uint8_t Byte = 3;
constexpr uint8_t Int16 = 4;
constexpr uint8_t UInt16 = 5;
constexpr uint8_t Int32 = 6;
constexpr uint8_t UInt32 = 7;
constexpr uint8_t Int64 = 8;
constexpr uint8_t UInt64 = 9;
constexpr uint8_t Float = 10;
constexpr uint8_t Double = 11;
constexpr uint8_t String = 12;
constexpr uint8_t DateTime = 13;
constexpr uint8_t GuidType = 14;
constexpr uint8_t ByteString = 15;
constexpr uint8_t XmlElement = 16;
constexpr uint8_t NodeIdType = 17;
constexpr uint8_t ExpandedNodeIdType = 18;
constexpr uint8_t StatusCode = 19;
constexpr uint8_t QualifiedNameType = 20;
constexpr uint8_t LocalizedTextType = 21;
constexpr uint8_t ExtensionObjectType = 22;
constexpr uint8_t DiagnosticInfoType = 25;
}  // namespace variant_type

using VariantScalar =
    std::variant<bool, int8_t, uint8_t, int16_t, uint16_t, int32_t, uint32_t, int64_t,
                 uint64_t, float, double, UaString, Guid, UaBytes, NodeId, ExpandedNodeId,
                 QualifiedName, LocalizedText, ExtensionObject, DiagnosticInfo>;

struct Variant {
    uint8_t type = variant_type::Empty;
    bool array = false;
    std::vector<VariantScalar> values;  // exactly one element for scalars
    std::vector<int32_t> dimensions;

    bool operator==(const Variant&) const = default;

    static Variant scalar(uint8_t type, VariantScalar v) {
        Variant out;
        out.type = type;
        out.values.push_back(std::move(v));
        return out;
    }
    static Variant byte_value(uint8_t v) { return scalar(variant_type::Byte, v); }
    static Variant boolean_value(bool v) { return scalar(variant_type::Boolean, v); }
    static Variant string_value(std::string v) {
        return scalar(variant_type::String, UaString(std::move(v)));
    }
    static Variant string_array(const std::vector<std::string>& items) {
        Variant out;
        out.type = variant_type::String;
        out.array = true;
        for (const auto& s : items) out.values.emplace_back(UaString(s));
        return out;
    }

    bool empty() const { return type == variant_type::Empty; }
    std::optional<uint8_t> as_byte() const {
        if (type == variant_type::Byte && !array && values.size() == 1)
            return std::get<uint8_t>(values[0]);
        return std::nullopt;
    }
    std::optional<bool> as_bool() const {
        if (type == variant_type::Boolean && !array && values.size() == 1)
            return std::get<bool>(values[0]);
        return std::nullopt;
    }
    std::optional<std::string> as_string() const {
        if (type == variant_type::String && !array && values.size() == 1)
            return std::get<UaString>(values[0]).value;
        return std::nullopt;
    }
    std::optional<std::vector<std::string>> as_string_array() const {
        if (type != variant_type::String || !array) return std::nullopt;
        std::vector<std::string> out;
        out.reserve(values.size());
        for (const auto& v : values) out.push_back(std::get<UaString>(v).value);
        return out;
    }
};

namespace detail {

inline void encode_scalar(ByteWriter& w, uint8_t type, const VariantScalar& v) {
    using namespace variant_type;
    switch (type) {
    case Boolean: w.boolean(std::get<bool>(v)); return;
    case SByte: w.u8(static_cast<uint8_t>(std::get<int8_t>(v))); return;
    case Byte: w.u8(std::get<uint8_t>(v)); return;
    case Int16: w.i16(std::get<int16_t>(v)); return;
    case UInt16: w.u16(std::get<uint16_t>(v)); return;
    case Int32: w.i32(std::get<int32_t>(v)); return;
    case UInt32: w.u32(std::get<uint32_t>(v)); return;
    case Int64: case DateTime: w.i64(std::get<int64_t>(v)); return;
    case UInt64: w.u64(std::get<uint64_t>(v)); return;
    case Float: w.f32(std::get<float>(v)); return;
    case Double: w.f64(std::get<double>(v)); return;
    case String: case XmlElement: encode(w, std::get<UaString>(v)); return;
    case GuidType: encode(w, std::get<Guid>(v)); return;
    case ByteString: encode(w, std::get<UaBytes>(v)); return;
    case NodeIdType: encode(w, std::get<NodeId>(v)); return;
    case ExpandedNodeIdType: encode(w, std::get<ExpandedNodeId>(v)); return;
    case StatusCode: w.u32(std::get<uint32_t>(v)); return;
    case QualifiedNameType: encode(w, std::get<QualifiedName>(v)); return;
    case LocalizedTextType: encode(w, std::get<LocalizedText>(v)); return;
    case ExtensionObjectType: encode(w, std::get<ExtensionObject>(v)); return;
    case DiagnosticInfoType: encode(w, std::get<DiagnosticInfo>(v)); return;
    default:
        throw CodecError(errc::malformed_response, "unsupported variant type");
    }
}

inline VariantScalar decode_scalar(ByteReader& r, uint8_t type) {
    using namespace variant_type;
    switch (type) {
    case Boolean: return r.boolean();
    case SByte: return static_cast<int8_t>(r.u8());
    case Byte: return r.u8();
    case Int16: return r.i16();
    case UInt16: return r.u16();
    case Int32: return r.i32();
    case UInt32: return r.u32();
    case Int64: case DateTime: return r.i64();
    case UInt64: return r.u64();
    case Float: return r.f32();
    case Double: return r.f64();
    case String: case XmlElement: return decode_string(r);
    case GuidType: return decode_guid(r);
    case ByteString: return decode_byte_string(r);
    case NodeIdType: return decode_node_id(r);
    case ExpandedNodeIdType: return decode_expanded_node_id(r);
    case StatusCode: return r.u32();
    case QualifiedNameType: return decode_qualified_name(r);
    case LocalizedTextType: return decode_localized_text(r);
    case ExtensionObjectType: return decode_extension_object(r);
    case DiagnosticInfoType: return decode_diagnostic_info(r);
    default:
        throw CodecError(errc::malformed_response, "unsupported variant type");
    }
}

}  // namespace detail

inline void encode(ByteWriter& w, const Variant& v) {
    if (v.empty()) {
        w.u8(0);
        return;
    }
    uint8_t enc = v.type & 0x3f;
    if (v.array) enc |= 0x80;
    if (!v.dimensions.empty()) enc |= 0x40;
    w.u8(enc);
    if (v.array) {
        w.i32(static_cast<int32_t>(v.values.size()));
        for (const auto& s : v.values) detail::encode_scalar(w, v.type, s);
        if (!v.dimensions.empty()) {
            w.i32(static_cast<int32_t>(v.dimensions.size()));
            for (int32_t d : v.dimensions) w.i32(d);
        }
    } else {
        detail::encode_scalar(w, v.type, v.values.front());
    }
}

inline Variant decode_variant(ByteReader& r) {
    uint8_t enc = r.u8();
    Variant v;
    v.type = enc & 0x3f;
    if (v.type == variant_type::Empty) {
        if (enc != 0) throw CodecError(errc::malformed_response, "invalid empty variant");
        return v;
    }
    v.array = (enc & 0x80) != 0;
    if (v.array) {
        size_t n = r.array_length(1);
        v.values.reserve(n);
        for (size_t i = 0; i < n; ++i) v.values.push_back(detail::decode_scalar(r, v.type));
        if (enc & 0x40) {
            size_t dims = r.array_length(4);
            for (size_t i = 0; i < dims; ++i) v.dimensions.push_back(r.i32());
        }
    } else {
        if (enc & 0x40)
            throw CodecError(errc::malformed_response, "dimensions on scalar variant");
        v.values.push_back(detail::decode_scalar(r, v.type));
    }
    return v;
}

struct DataValue {
    std::optional<Variant> value;
    std::optional<uint32_t> status;
    std::optional<int64_t> source_timestamp;
    std::optional<int64_t> server_timestamp;
    std::optional<uint16_t> source_picoseconds;
    std::optional<uint16_t> server_picoseconds;

    bool operator==(const DataValue&) const = default;

    uint32_t status_or_good() const { return status.value_or(0); }
};

inline void encode(ByteWriter& w, const DataValue& d) {
    uint8_t mask = 0;
    if (d.value) mask |= 0x01;
    if (d.status) mask |= 0x02;
    if (d.source_timestamp) mask |= 0x04;
    if (d.server_timestamp) mask |= 0x08;
    if (d.source_picoseconds) mask |= 0x10;
    if (d.server_picoseconds) mask |= 0x20;
    w.u8(mask);
    if (d.value) encode(w, *d.value);
    if (d.status) w.u32(*d.status);
    if (d.source_timestamp) w.i64(*d.source_timestamp);
    if (d.source_picoseconds) w.u16(*d.source_picoseconds);
    if (d.server_timestamp) w.i64(*d.server_timestamp);
    if (d.server_picoseconds) w.u16(*d.server_picoseconds);
}

inline DataValue decode_data_value(ByteReader& r) {
    uint8_t mask = r.u8();
    if (mask & 0xc0) throw CodecError(errc::malformed_response, "invalid data value mask");
    DataValue d;
    if (mask & 0x01) d.value = decode_variant(r);
    if (mask & 0x02) d.status = r.u32();
    if (mask & 0x04) d.source_timestamp = r.i64();
    if (mask & 0x10) d.source_picoseconds = r.u16();
    if (mask & 0x08) d.server_timestamp = r.i64();
    if (mask & 0x20) d.server_picoseconds = r.u16();
    return d;
}

// ---------------------------------------------------------------------------
// Endpoint metadata
// ---------------------------------------------------------------------------

enum class SecurityMode : uint32_t {
    Invalid = 0,
    None = 1,
    Sign = 2,
    SignAndEncrypt = 3,
};

inline const char* to_string(SecurityMode m) {
    switch (m) {
    case SecurityMode::None: return "None";
    case SecurityMode::Sign: return "Sign";
    case SecurityMode::SignAndEncrypt: return "SignAndEncrypt";
    default: return "Invalid";
    }
}

/// Rank for least/most comparisons: None < Sign < SignAndEncrypt.
inline int mode_rank(SecurityMode m) {
    switch (m) {
    case SecurityMode::Sign: return 1;
    case SecurityMode::SignAndEncrypt: return 2;
    default: return 0;
    }
}

enum class UserTokenType : uint32_t {
    Anonymous = 0,
    Username = 1,
    Certificate = 2,
    IssuedToken = 3,
};

inline const char* to_string(UserTokenType t) {
    switch (t) {
    case UserTokenType::Anonymous: return "anonymous";
    case UserTokenType::Username: return "username";
    case UserTokenType::Certificate: return "certificate";
    case UserTokenType::IssuedToken: return "issued_token";
    }
    return "unknown";
}

struct UserTokenPolicy {
    UaString policy_id;
    UserTokenType token_type = UserTokenType::Anonymous;
    UaString issued_token_type;
    UaString issuer_endpoint_url;
    UaString security_policy_uri;

    bool operator==(const UserTokenPolicy&) const = default;
};

inline void encode(ByteWriter& w, const UserTokenPolicy& p) {
    encode(w, p.policy_id);
    w.u32(static_cast<uint32_t>(p.token_type));
    encode(w, p.issued_token_type);
    encode(w, p.issuer_endpoint_url);
    encode(w, p.security_policy_uri);
}

inline UserTokenPolicy decode_user_token_policy(ByteReader& r) {
    UserTokenPolicy p;
    p.policy_id = decode_string(r);
    uint32_t t = r.u32();
    if (t > 3) throw CodecError(errc::malformed_response, "invalid user token type");
    p.token_type = static_cast<UserTokenType>(t);
    p.issued_token_type = decode_string(r);
    p.issuer_endpoint_url = decode_string(r);
    p.security_policy_uri = decode_string(r);
    return p;
}

struct ApplicationDescription {
    UaString application_uri;
    UaString product_uri;
    LocalizedText application_name;
    uint32_t application_type = 0;  // 0 server, 3 discovery server
    UaString gateway_server_uri;
    UaString discovery_profile_uri;
    std::vector<UaString> discovery_urls;

    bool operator==(const ApplicationDescription&) const = default;
};

inline void encode(ByteWriter& w, const ApplicationDescription& a) {
    encode(w, a.application_uri);
    encode(w, a.product_uri);
    encode(w, a.application_name);
    w.u32(a.application_type);
    encode(w, a.gateway_server_uri);
    encode(w, a.discovery_profile_uri);
    w.i32(static_cast<int32_t>(a.discovery_urls.size()));
    for (const auto& u : a.discovery_urls) encode(w, u);
}

inline ApplicationDescription decode_application_description(ByteReader& r) {
    ApplicationDescription a;
    a.application_uri = decode_string(r);
    a.product_uri = decode_string(r);
    a.application_name = decode_localized_text(r);
    a.application_type = r.u32();
    a.gateway_server_uri = decode_string(r);
    a.discovery_profile_uri = decode_string(r);
    size_t n = r.array_length(4);
    for (size_t i = 0; i < n; ++i) a.discovery_urls.push_back(decode_string(r));
    return a;
}

struct EndpointDescription {
    UaString endpoint_url;
    ApplicationDescription server;
    UaBytes server_certificate;
    SecurityMode security_mode = SecurityMode::None;
    UaString security_policy_uri;
    std::vector<UserTokenPolicy> user_token_policies;
    UaString transport_profile_uri;
    uint8_t security_level = 0;

    bool operator==(const EndpointDescription&) const = default;

    bool offers_token(UserTokenType t) const {
        for (const auto& p : user_token_policies)
            if (p.token_type == t) return true;
        return false;
    }
    const UserTokenPolicy* token_policy(UserTokenType t) const {
        for (const auto& p : user_token_policies)
            if (p.token_type == t) return &p;
        return nullptr;
    }
};

inline void encode(ByteWriter& w, const EndpointDescription& e) {
    encode(w, e.endpoint_url);
    encode(w, e.server);
    encode(w, e.server_certificate);
    w.u32(static_cast<uint32_t>(e.security_mode));
    encode(w, e.security_policy_uri);
    w.i32(static_cast<int32_t>(e.user_token_policies.size()));
    for (const auto& p : e.user_token_policies) encode(w, p);
    encode(w, e.transport_profile_uri);
    w.u8(e.security_level);
}

inline EndpointDescription decode_endpoint_description(ByteReader& r) {
    EndpointDescription e;
    e.endpoint_url = decode_string(r);
    e.server = decode_application_description(r);
    e.server_certificate = decode_byte_string(r);
    uint32_t mode = r.u32();
    if (mode > 3) throw CodecError(errc::malformed_response, "invalid security mode");
    e.security_mode = static_cast<SecurityMode>(mode);
    e.security_policy_uri = decode_string(r);
    size_t n = r.array_length(4);
    for (size_t i = 0; i < n; ++i) e.user_token_policies.push_back(decode_user_token_policy(r));
    e.transport_profile_uri = decode_string(r);
    e.security_level = r.u8();
    return e;
}

// ---------------------------------------------------------------------------
// Address space records (scanner-facing view)
// ---------------------------------------------------------------------------

enum class NodeClass : uint8_t { Object, Variable, Method, Other };

inline const char* to_string(NodeClass c) {
    switch (c) {
    case NodeClass::Object: return "Object";
    case NodeClass::Variable: return "Variable";
    case NodeClass::Method: return "Method";
    case NodeClass::Other: return "Other";
    }
    return "Other";
}

/// Wire node class mask values (Part 3).
namespace node_class_bits {
constexpr uint32_t Object = 1;
constexpr uint32_t Variable = 2;
constexpr uint32_t Method = 4;
}  // namespace node_class_bits

inline NodeClass node_class_from_wire(uint32_t v) {
    switch (v) {
    case node_class_bits::Object: return NodeClass::Object;
    case node_class_bits::Variable: return NodeClass::Variable;
    case node_class_bits::Method: return NodeClass::Method;
    default: return NodeClass::Other;
    }
}

namespace access_level {
constexpr uint8_t CurrentRead = 0x01;
constexpr uint8_t CurrentWrite = 0x02;
constexpr uint8_t HistoryRead = 0x04;
constexpr uint8_t HistoryWrite = 0x08;
}  // namespace access_level

struct NodeRecord {
    NodeId node_id;
    std::string browse_name;
    NodeClass node_class = NodeClass::Other;
    std::optional<uint8_t> access_level;  // present iff Variable
    std::optional<bool> executable;       // present iff Method
    uint16_t namespace_index = 0;

    bool operator==(const NodeRecord&) const = default;
};

}  // namespace uascan::wire
