#include "mgt/binio.hpp"

#include "mgt/errors.hpp"

#include <zlib.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace mgt::binio {

void ByteWriter::put_u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        put_u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void ByteWriter::put_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        put_u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void ByteWriter::put_f32(float v) { put_u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::put_f32_array(std::span<const float> values) {
    if constexpr (std::endian::native == std::endian::little) {
        buf_.append(reinterpret_cast<const char*>(values.data()), values.size_bytes());
    } else {
        for (float v : values) {
            put_f32(v);
        }
    }
}

void ByteWriter::put_string(std::string_view s) {
    put_u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
}

void ByteReader::need(std::size_t n) const {
    if (remaining() < n) {
        throw FormatError("truncated data at byte " + std::to_string(pos_));
    }
}

std::uint8_t ByteReader::get_u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
}

std::uint32_t ByteReader::get_u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
    }
    return v;
}

std::uint64_t ByteReader::get_u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
    }
    return v;
}

float ByteReader::get_f32() { return std::bit_cast<float>(get_u32()); }

double ByteReader::get_f64() { return std::bit_cast<double>(get_u64()); }

std::string ByteReader::get_string() {
    const auto n = get_u32();
    return std::string(get_bytes(n));
}

std::string_view ByteReader::get_bytes(std::size_t n) {
    need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
}

void ByteReader::get_f32_array(std::span<float> out) {
    if constexpr (std::endian::native == std::endian::little) {
        need(out.size_bytes());
        std::memcpy(out.data(), data_.data() + pos_, out.size_bytes());
        pos_ += out.size_bytes();
    } else {
        for (auto& v : out) {
            v = get_f32();
        }
    }
}

std::uint32_t crc32(std::string_view data) noexcept {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    constexpr std::size_t kChunk = 1u << 30;
    for (std::size_t off = 0; off < data.size(); off += kChunk) {
        const auto len = std::min(kChunk, data.size() - off);
        crc = ::crc32(crc, reinterpret_cast<const Bytef*>(data.data() + off), static_cast<uInt>(len));
    }
    return static_cast<std::uint32_t>(crc);
}

void write_file(const std::string& path, std::string_view data) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + path);
        }
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) {
            throw IoError("write failed for " + path);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move " + tmp + " into place");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    std::string data;
    if (!ec) {
        data.resize(size);
        in.read(data.data(), static_cast<std::streamsize>(size));
        data.resize(static_cast<std::size_t>(in.gcount()));
    }
    // sizes the filesystem cannot report (pipes) or files that grew are read to the end
    data.append(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failed for " + path);
    }
    return data;
}

} // namespace mgt::binio
