#ifndef VOXC_IO_UTIL_HPP
#define VOXC_IO_UTIL_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>

#include "voxc/errors.hpp"

namespace voxc::detail {

// Little-endian byte serialization, independent of host endianness.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void bytes(const void* p, std::size_t n) {
        buf_.append(static_cast<const char*>(p), n);
    }
    void magic(const char (&m)[5]) { bytes(m, 4); }

    const std::string& str() const { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    std::size_t offset() const { return off_; }
    std::size_t remaining() const { return data_.size() - off_; }
    bool at_end() const { return off_ == data_.size(); }

    std::uint8_t u8() {
        need(1, "byte");
        return static_cast<std::uint8_t>(data_[off_++]);
    }
    std::uint16_t u16() {
        need(2, "u16");
        std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i)
            v |= static_cast<std::uint16_t>(static_cast<std::uint8_t>(data_[off_++]))
                 << (8 * i);
        return v;
    }
    std::uint32_t u32() {
        need(4, "u32");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[off_++]))
                 << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8, "u64");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[off_++]))
                 << (8 * i);
        return v;
    }
    float f32() {
        std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    std::string_view bytes(std::size_t n, const char* what) {
        need(n, what);
        std::string_view v = data_.substr(off_, n);
        off_ += n;
        return v;
    }
    void expect_magic(const char (&m)[5], const char* format_name) {
        std::size_t at = off_;
        if (remaining() < 4 || data_.substr(off_, 4) != std::string_view(m, 4)) {
            throw FormatError(std::string(format_name) +
                              ": bad magic at byte offset " + std::to_string(at));
        }
        off_ += 4;
    }

private:
    void need(std::size_t n, const char* what) {
        if (remaining() < n) {
            throw TruncationError(std::string("stream truncated reading ") + what +
                                  " at byte offset " + std::to_string(off_));
        }
    }

    std::string_view data_;
    std::size_t off_ = 0;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return data;
}

inline void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace voxc::detail

#endif  // VOXC_IO_UTIL_HPP
