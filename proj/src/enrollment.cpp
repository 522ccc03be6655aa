#include "imprint/enrollment.hpp"

#include <sodium.h>

#include <algorithm>
#include <bit>
#include <string>

#include "imprint/error.hpp"
#include "imprint/fileio.hpp"
#include "text.hpp"

namespace imprint {

namespace {

constexpr char kHex[] = "0123456789abcdef";

void check_window(std::span<const std::size_t> window, std::size_t cells) {
    if (window.empty()) throw Error(Errc::invalid_argument, "fingerprint window is empty");
    for (std::size_t idx : window) {
        if (idx >= cells) {
            throw Error(Errc::invalid_argument, "window index " + std::to_string(idx) + " outside array of " +
                                                    std::to_string(cells) + " cells");
        }
    }
}

bool valid_field(std::string_view s) {
    return !s.empty() && s.find_first_of("\t\r\n") == std::string_view::npos;
}

std::string encode_counts(const AccumulatedState& state) {
    std::vector<unsigned char> bytes(state.counts.size());
    for (std::size_t k = 0; k < bytes.size(); ++k) bytes[k] = static_cast<unsigned char>(state.counts[k]);
    std::string out(sodium_base64_ENCODED_LEN(bytes.size(), sodium_base64_VARIANT_ORIGINAL), '\0');
    sodium_bin2base64(out.data(), out.size(), bytes.data(), bytes.size(), sodium_base64_VARIANT_ORIGINAL);
    out.resize(out.size() - 1);  // drop the terminator
    return out;
}

Grid<std::int32_t> decode_counts(std::string_view b64, std::size_t rows, std::size_t cols, std::size_t trials) {
    std::vector<unsigned char> bytes(rows * cols + 3);
    std::size_t len = 0;
    const char* end = nullptr;
    if (sodium_base642bin(bytes.data(), bytes.size(), b64.data(), b64.size(), nullptr, &len, &end,
                          sodium_base64_VARIANT_ORIGINAL) != 0 ||
        end != b64.data() + b64.size()) {
        throw Error(Errc::bad_digit, "record counts are not valid base64");
    }
    if (len != rows * cols) {
        throw Error(Errc::dimension_mismatch, "record holds " + std::to_string(len) + " counts, expected " +
                                                  std::to_string(rows * cols));
    }
    Grid<std::int32_t> counts(rows, cols, 0);
    for (std::size_t k = 0; k < len; ++k) {
        if (bytes[k] > trials) throw Error(Errc::bad_digit, "record count exceeds M");
        counts[k] = bytes[k];
    }
    return counts;
}

}  // namespace

std::vector<std::size_t> default_window(std::size_t length, std::size_t cells) {
    if (length == 0 || length > cells) {
        throw Error(Errc::invalid_argument, "fingerprint length " + std::to_string(length) + " must lie in [1, " +
                                                std::to_string(cells) + "]");
    }
    std::vector<std::size_t> window(length);
    for (std::size_t i = 0; i < length; ++i) window[i] = i;
    return window;
}

Fingerprint make_fingerprint(const AccumulatedState& counts, std::span<const std::size_t> window) {
    check_window(window, counts.counts.size());
    Fingerprint fp;
    fp.bits.reserve(window.size());
    for (std::size_t idx : window) {
        fp.bits.push_back(2 * static_cast<std::size_t>(counts.counts[idx]) > counts.trials ? 1 : 0);
    }
    return fp;
}

Fingerprint make_fingerprint(const PowerUpDump& dump, std::span<const std::size_t> window) {
    check_window(window, dump.cells());
    Fingerprint fp;
    fp.bits.reserve(window.size());
    for (std::size_t idx : window) {
        std::size_t ones = 0;
        for (std::size_t m = 0; m < dump.trials(); ++m) ones += dump.bit(m, idx);
        fp.bits.push_back(2 * ones > dump.trials() ? 1 : 0);
    }
    return fp;
}

double fractional_hamming(const Fingerprint& a, const Fingerprint& b) {
    if (a.size() != b.size() || a.size() == 0) {
        throw Error(Errc::dimension_mismatch, "fingerprints have lengths " + std::to_string(a.size()) + " and " +
                                                  std::to_string(b.size()));
    }
    std::size_t differ = 0;
    for (std::size_t i = 0; i < a.size(); ++i) differ += a.bits[i] != b.bits[i];
    return static_cast<double>(differ) / static_cast<double>(a.size());
}

std::string fingerprint_hex(const Fingerprint& fp) {
    std::string out;
    for (std::size_t d = 0; d < (fp.size() + 3) / 4; ++d) {
        unsigned nibble = 0;
        for (std::size_t b = 0; b < 4; ++b) {
            const std::size_t i = d * 4 + b;
            nibble = (nibble << 1) | (i < fp.size() ? fp.bits[i] : 0u);
        }
        out += kHex[nibble];
    }
    return out;
}

Fingerprint fingerprint_from_hex(std::string_view hex, std::size_t length) {
    if (hex.size() != (length + 3) / 4) {
        throw Error(Errc::dimension_mismatch, "fingerprint has " + std::to_string(hex.size()) +
                                                  " hex digits, expected " + std::to_string((length + 3) / 4));
    }
    Fingerprint fp;
    fp.bits.reserve(length);
    for (std::size_t d = 0; d < hex.size(); ++d) {
        const char* pos = std::find(kHex, kHex + 16, hex[d]);
        if (pos == kHex + 16) throw Error(Errc::bad_digit, std::string("invalid fingerprint digit '") + hex[d] + "'");
        const auto v = static_cast<unsigned>(pos - kHex);
        for (std::size_t b = 0; b < 4; ++b) {
            const std::uint8_t bit = (v >> (3 - b)) & 1;
            if (d * 4 + b < length) {
                fp.bits.push_back(bit);
            } else if (bit) {
                throw Error(Errc::bad_digit, "nonzero fingerprint padding");
            }
        }
    }
    return fp;
}

Database::Database(std::vector<std::size_t> window, std::size_t rows, std::size_t cols, std::size_t trials)
    : window_(std::move(window)), rows_(rows), cols_(cols), trials_(trials) {
    if (rows == 0 || cols == 0) throw Error(Errc::invalid_argument, "database dimensions must be positive");
    if (trials == 0 || trials > kMaxDatabaseTrials) {
        throw Error(Errc::invalid_argument, "database M must lie in [1, 255] so counts fit one byte");
    }
    check_window(window_, rows * cols);
}

const EnrollmentRecord* Database::find(std::string_view id_label) const {
    auto it = std::find_if(records_.begin(), records_.end(), [&](const auto& r) { return r.id_label == id_label; });
    return it == records_.end() ? nullptr : &*it;
}

void Database::enroll(EnrollmentRecord record) {
    if (!valid_field(record.id_label)) {
        throw Error(Errc::invalid_argument, "id label must be nonempty and free of tabs and newlines");
    }
    if (!valid_field(record.created)) {
        throw Error(Errc::invalid_argument, "created stamp must be nonempty and free of tabs and newlines");
    }
    if (record.fingerprint.size() != fingerprint_bits()) {
        throw Error(Errc::dimension_mismatch, "fingerprint has " + std::to_string(record.fingerprint.size()) +
                                                  " bits, database uses " + std::to_string(fingerprint_bits()));
    }
    if (!record.ipu_counts.counts.same_shape(rows_, cols_)) {
        throw Error(Errc::dimension_mismatch, "record dimensions differ from the database");
    }
    if (record.ipu_counts.trials != trials_) {
        throw Error(Errc::dimension_mismatch, "record has M=" + std::to_string(record.ipu_counts.trials) +
                                                  ", database uses M=" + std::to_string(trials_));
    }
    for (auto c : record.ipu_counts.counts.cells()) {
        if (c < 0 || static_cast<std::size_t>(c) > trials_) throw Error(Errc::invalid_argument, "count outside [0, M]");
    }
    if (find(record.id_label) != nullptr) {
        throw Error(Errc::duplicate_id, "id '" + record.id_label + "' is already enrolled");
    }
    records_.push_back(std::move(record));
}

EnrollmentRecord make_record(const Database& db, std::string id_label, const PowerUpDump& ipu, std::string created) {
    auto counts = accumulate(ipu);
    auto fp = make_fingerprint(counts, db.window());
    return EnrollmentRecord{std::move(id_label), std::move(fp), std::move(counts), std::move(created)};
}

MatchResult match(const Database& db, const PowerUpDump& fpu, double tau) {
    if (!(tau > 0.0 && tau < 0.5)) throw Error(Errc::invalid_argument, "match threshold tau must lie in (0, 0.5)");
    MatchResult result;
    if (db.records().empty()) return result;
    if (fpu.rows() != db.rows() || fpu.cols() != db.cols()) {
        throw Error(Errc::dimension_mismatch, "dump '" + fpu.label() + "' does not match the database dimensions");
    }
    const auto fp = make_fingerprint(fpu, db.window());
    std::size_t best = 0;
    for (std::size_t i = 0; i < db.records().size(); ++i) {
        const double d = fractional_hamming(fp, db.records()[i].fingerprint);
        if (i == 0 || d < result.fractional_hamming) {
            result.fractional_hamming = d;
            best = i;
        }
    }
    if (result.fractional_hamming <= tau) result.record = best;
    return result;
}

std::string format_database(const Database& db) {
    std::string out = "IMPRINT-DB v1 " + std::to_string(db.fingerprint_bits()) + " " + std::to_string(db.rows()) +
                      " " + std::to_string(db.cols()) + " " + std::to_string(db.trials()) + " window=";
    for (std::size_t i = 0; i < db.window().size(); ++i) {
        if (i) out += ',';
        out += std::to_string(db.window()[i]);
    }
    out += '\n';
    for (const auto& r : db.records()) {
        out += r.id_label + '\t' + fingerprint_hex(r.fingerprint) + '\t' + encode_counts(r.ipu_counts) + '\t' +
               r.created + '\n';
    }
    return out;
}

Database parse_database(const std::string& contents) {
    const auto lines = text::lines(contents);
    if (lines.empty()) throw Error(Errc::malformed_header, "empty database file");
    const auto header = text::split_whitespace(lines[0]);
    if (header.size() != 7 || header[0] != "IMPRINT-DB" || !header[6].starts_with("window=")) {
        throw Error(Errc::malformed_header, "expected 'IMPRINT-DB v1 L rows cols M window=...'");
    }
    if (header[1] != "v1") {
        throw Error(Errc::unsupported_format, "unsupported database version '" + std::string(header[1]) + "'");
    }
    const auto length = text::parse_u64(header[2], "L", Errc::malformed_header);
    const auto rows = text::parse_u64(header[3], "rows", Errc::malformed_header);
    const auto cols = text::parse_u64(header[4], "cols", Errc::malformed_header);
    const auto trials = text::parse_u64(header[5], "M", Errc::malformed_header);
    if (rows > (1u << 16) || cols > (1u << 16)) throw Error(Errc::dimension_overflow, "database dimensions too large");
    std::vector<std::size_t> window;
    for (auto tok : text::split(header[6].substr(7), ',')) {
        window.push_back(text::parse_u64(tok, "window index", Errc::malformed_header));
    }
    if (window.size() != length) {
        throw Error(Errc::malformed_header, "header declares L=" + std::to_string(length) + " but window has " +
                                                std::to_string(window.size()) + " indices");
    }
    Database db(std::move(window), rows, cols, trials);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = text::split(lines[i], '\t');
        if (fields.size() != 4) {
            throw Error(Errc::malformed_header, "record on line " + std::to_string(i + 1) + " needs 4 tab-separated fields");
        }
        EnrollmentRecord r;
        r.id_label = std::string(fields[0]);
        r.fingerprint = fingerprint_from_hex(fields[1], length);
        r.ipu_counts = AccumulatedState{trials, decode_counts(fields[2], rows, cols, trials)};
        r.created = std::string(fields[3]);
        try {
            db.enroll(std::move(r));
        } catch (const Error& e) {
            if (e.code() != Errc::invalid_argument) throw;
            throw Error(Errc::malformed_header, "record on line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return db;
}

void save_database(const Database& db, const std::filesystem::path& path) {
    write_file_atomic(path, format_database(db));
}

Database load_database(const std::filesystem::path& path) { return parse_database(read_file(path)); }

}  // namespace imprint
