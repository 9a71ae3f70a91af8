#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "uascan/errors.hpp"

namespace uascan {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

inline std::string to_hex(BytesView data) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

/// Parses hex, ignoring whitespace and '#'-to-end-of-line comments
/// (the format of the fixture corpus files).
inline Bytes from_hex(std::string_view text) {
    Bytes out;
    int hi = -1;
    bool in_comment = false;
    for (char c : text) {
        if (in_comment) {
            if (c == '\n') in_comment = false;
            continue;
        }
        if (c == '#') {
            in_comment = true;
            continue;
        }
        if (c == ' ' || c == '\n' || c == '\r' || c == '\t') continue;
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else throw CodecError(errc::malformed_response, "invalid hex character");
        if (hi < 0) {
            hi = v;
        } else {
            out.push_back(static_cast<uint8_t>(hi << 4 | v));
            hi = -1;
        }
    }
    if (hi >= 0) throw CodecError(errc::malformed_response, "odd hex digit count");
    return out;
}

/// Little-endian writer over a growable buffer.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) {
        buf_.push_back(static_cast<uint8_t>(v));
        buf_.push_back(static_cast<uint8_t>(v >> 8));
    }
    void u32(uint32_t v) {
        buf_.push_back(static_cast<uint8_t>(v));
        buf_.push_back(static_cast<uint8_t>(v >> 8));
        buf_.push_back(static_cast<uint8_t>(v >> 16));
        buf_.push_back(static_cast<uint8_t>(v >> 24));
    }
    void u64(uint64_t v) {
        u32(static_cast<uint32_t>(v));
        u32(static_cast<uint32_t>(v >> 32));
    }
    void i16(int16_t v) { u16(static_cast<uint16_t>(v)); }
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
    void f32(float v) {
        uint32_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u32(bits);
    }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }
    void boolean(bool v) { u8(v ? 1 : 0); }
    void raw(BytesView data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
    void raw(const char* s, size_t n) {
        buf_.insert(buf_.end(), reinterpret_cast<const uint8_t*>(s),
                    reinterpret_cast<const uint8_t*>(s) + n);
    }

    size_t size() const { return buf_.size(); }
    /// ORs bits into a previously written byte (flag back-fill).
    void or_u8(size_t offset, uint8_t bits) { buf_[offset] |= bits; }
    /// Patches a previously written u32 in place (length back-fill).
    void patch_u32(size_t offset, uint32_t v) {
        buf_[offset] = static_cast<uint8_t>(v);
        buf_[offset + 1] = static_cast<uint8_t>(v >> 8);
        buf_[offset + 2] = static_cast<uint8_t>(v >> 16);
        buf_[offset + 3] = static_cast<uint8_t>(v >> 24);
    }

    const Bytes& data() const& { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

/// Bounds-checked little-endian reader. Every accessor throws
/// CodecError(truncated) before touching bytes past the end, and no call
/// allocates more than the bytes actually present.
class ByteReader {
public:
    explicit ByteReader(BytesView data) : data_(data) {}

    size_t remaining() const { return data_.size() - pos_; }
    size_t position() const { return pos_; }
    bool done() const { return pos_ == data_.size(); }

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint16_t>(data_[pos_] | data_[pos_ + 1] << 8);
        pos_ += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = static_cast<uint32_t>(data_[pos_]) |
                     static_cast<uint32_t>(data_[pos_ + 1]) << 8 |
                     static_cast<uint32_t>(data_[pos_ + 2]) << 16 |
                     static_cast<uint32_t>(data_[pos_ + 3]) << 24;
        pos_ += 4;
        return v;
    }
    uint64_t u64() {
        uint64_t lo = u32();
        uint64_t hi = u32();
        return lo | hi << 32;
    }
    int16_t i16() { return static_cast<int16_t>(u16()); }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    int64_t i64() { return static_cast<int64_t>(u64()); }
    float f32() {
        uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    double f64() {
        uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    bool boolean() { return u8() != 0; }

    Bytes bytes(size_t n) {
        need(n);
        Bytes out(data_.begin() + static_cast<ptrdiff_t>(pos_),
                  data_.begin() + static_cast<ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }
    BytesView view(size_t n) {
        need(n);
        BytesView out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }
    void skip(size_t n) {
        need(n);
        pos_ += n;
    }

    /// Reads an array length prefix and guards against counts that cannot
    /// possibly fit in the remaining bytes (min_element_size lower bound).
    size_t array_length(size_t min_element_size = 1) {
        int32_t n = i32();
        if (n <= 0) return 0;  // -1 null array and 0 both decode to empty
        size_t count = static_cast<size_t>(n);
        if (min_element_size == 0) min_element_size = 1;
        if (count > remaining() / min_element_size)
            throw CodecError(errc::truncated, "array length exceeds remaining bytes");
        return count;
    }

private:
    void need(size_t n) const {
        if (n > remaining()) throw CodecError(errc::truncated, "unexpected end of input");
    }

    BytesView data_;
    size_t pos_ = 0;
};

}  // namespace uascan
