#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace mgt::binio {

/// Little-endian encoder over a growable byte buffer.
class ByteWriter {
public:
    void put_u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void put_u32(std::uint32_t v);
    void put_u64(std::uint64_t v);
    void put_f32(float v);
    void put_f64(double v);
    /// u32 byte length followed by the bytes.
    void put_string(std::string_view s);
    void put_bytes(std::string_view s) { buf_.append(s); }
    /// Same bytes as put_f32 per element, written in one pass.
    void put_f32_array(std::span<const float> values);

    const std::string& data() const noexcept { return buf_; }
    std::string take() && { return std::move(buf_); }

private:
    std::string buf_;
};

/// Little-endian decoder. Reading past the end throws FormatError.
class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_{data} {}

    std::uint8_t get_u8();
    std::uint32_t get_u32();
    std::uint64_t get_u64();
    float get_f32();
    double get_f64();
    std::string get_string();
    std::string_view get_bytes(std::size_t n);
    void get_f32_array(std::span<float> out);

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }

private:
    void need(std::size_t n) const;

    std::string_view data_;
    std::size_t pos_{0};
};

std::uint32_t crc32(std::string_view data) noexcept;

/// Writes through a temporary file and renames it into place, so readers never see a
/// partially written artifact.
void write_file(const std::string& path, std::string_view data);
std::string read_file(const std::string& path);

} // namespace mgt::binio
