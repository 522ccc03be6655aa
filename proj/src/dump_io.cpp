#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <string>

#include "imprint/dataio.hpp"
#include "imprint/error.hpp"
#include "imprint/fileio.hpp"
#include "text.hpp"

namespace imprint {

namespace {

constexpr char kHex[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string crc_hex(std::uint32_t crc) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", crc);
    return buf;
}

}  // namespace

std::uint32_t crc32(std::string_view bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks.
    while (!bytes.empty()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size(), 1u << 30));
        crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), chunk);
        bytes.remove_prefix(chunk);
    }
    return static_cast<std::uint32_t>(crc);
}

std::string format_dump(const PowerUpDump& dump) {
    const std::size_t digits = (dump.cells() + 3) / 4;
    std::string payload;
    payload.reserve(dump.trials() * (digits + 1));
    for (std::size_t m = 0; m < dump.trials(); ++m) {
        const auto bits = dump.trial(m);
        for (std::size_t d = 0; d < digits; ++d) {
            unsigned nibble = 0;
            for (std::size_t b = 0; b < 4; ++b) {
                const std::size_t k = d * 4 + b;
                nibble = (nibble << 1) | (k < bits.size() ? bits[k] : 0u);
            }
            payload += kHex[nibble];
        }
        payload += '\n';
    }
    return "IMPRINT-DUMP v1 " + dump.label() + " " + std::to_string(dump.rows()) + " " + std::to_string(dump.cols()) +
           " " + std::to_string(dump.trials()) + "\n" + payload + "CRC32 " + crc_hex(crc32(payload)) + "\n";
}

PowerUpDump parse_dump(const std::string& contents) {
    const auto lines = text::lines(contents);
    if (lines.empty()) throw Error(Errc::malformed_header, "empty dump file");
    const auto header = text::split_whitespace(lines[0]);
    if (header.size() != 6 || header[0] != "IMPRINT-DUMP") {
        throw Error(Errc::malformed_header, "expected 'IMPRINT-DUMP v1 label rows cols M'");
    }
    if (header[1] != "v1") {
        throw Error(Errc::unsupported_format, "unsupported dump version '" + std::string(header[1]) + "'");
    }
    const std::string label(header[2]);
    const auto rows = text::parse_u64(header[3], "rows", Errc::malformed_header);
    const auto cols = text::parse_u64(header[4], "cols", Errc::malformed_header);
    const auto trials = text::parse_u64(header[5], "M", Errc::malformed_header);
    if (rows == 0 || cols == 0 || trials == 0) throw Error(Errc::malformed_header, "dump dimensions must be positive");
    if (rows > kMaxImageSide || cols > kMaxImageSide || rows * cols > kMaxImageCells || trials > 65535) {
        throw Error(Errc::dimension_overflow, "dump dimensions exceed supported limits");
    }

    const std::size_t cells = rows * cols;
    const std::size_t digits = (cells + 3) / 4;
    std::vector<std::uint8_t> bits(cells * trials, 0);
    std::string payload;
    payload.reserve(trials * (digits + 1));
    for (std::size_t m = 0; m < trials; ++m) {
        const std::size_t index = m + 1;
        if (index >= lines.size() || lines[index].starts_with("CRC32")) {
            throw Error(Errc::truncated, "dump declares M=" + std::to_string(trials) + " but holds " +
                                             std::to_string(m) + " trial lines");
        }
        const auto line = lines[index];
        if (line.size() != digits) {
            throw Error(Errc::dimension_mismatch, "trial " + std::to_string(m) + " has " +
                                                      std::to_string(line.size()) + " hex digits, expected " +
                                                      std::to_string(digits));
        }
        for (std::size_t d = 0; d < digits; ++d) {
            const int v = hex_value(line[d]);
            if (v < 0) {
                throw Error(Errc::bad_digit, "trial " + std::to_string(m) + ": invalid hex digit '" +
                                                 std::string(1, line[d]) + "'");
            }
            for (std::size_t b = 0; b < 4; ++b) {
                const std::size_t k = d * 4 + b;
                const std::uint8_t bit = (v >> (3 - b)) & 1;
                if (k < cells) {
                    bits[m * cells + k] = bit;
                } else if (bit) {
                    throw Error(Errc::bad_digit, "trial " + std::to_string(m) + ": nonzero padding bits");
                }
            }
        }
        payload += line;
        payload += '\n';
    }

    const std::size_t crc_index = trials + 1;
    if (crc_index >= lines.size()) throw Error(Errc::truncated, "dump is missing its CRC32 line");
    const auto crc_line = text::split_whitespace(lines[crc_index]);
    if (crc_line.size() != 2 || crc_line[0] != "CRC32" || crc_line[1].size() != 8) {
        if (!lines[crc_index].starts_with("CRC32")) {
            throw Error(Errc::dimension_mismatch, "dump holds more trial lines than M=" + std::to_string(trials));
        }
        throw Error(Errc::malformed_header, "malformed CRC32 line");
    }
    std::uint32_t stated = 0;
    for (char c : crc_line[1]) {
        const int v = hex_value(c);
        if (v < 0) throw Error(Errc::bad_digit, "invalid hex digit in CRC32");
        stated = (stated << 4) | static_cast<std::uint32_t>(v);
    }
    const std::uint32_t actual = crc32(payload);
    if (stated != actual) {
        throw Error(Errc::checksum_mismatch, "CRC32 mismatch: file says " + crc_hex(stated) + ", payload is " +
                                                 crc_hex(actual));
    }
    if (lines.size() > crc_index + 1) throw Error(Errc::malformed_header, "trailing data after CRC32 line");
    return PowerUpDump(label, rows, cols, trials, std::move(bits));
}

void save_dump(const PowerUpDump& dump, const std::filesystem::path& path) {
    write_file_atomic(path, format_dump(dump));
}

PowerUpDump load_dump(const std::filesystem::path& path) { return parse_dump(read_file(path)); }

}  // namespace imprint
