#pragma once

// Chip identification from power-up fingerprints and the {ID, IPU} database.
//
// A fingerprint is the per-cell majority power-up value over a fixed window
// of cells. Records carry the full initial accumulated state so a recycled
// chip can be re-identified and its IPU fetched for recovery.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "imprint/recovery.hpp"
#include "imprint/sram_sim.hpp"

namespace imprint {

inline constexpr std::size_t kDefaultFingerprintBits = 256;
inline constexpr double kDefaultMatchTau = 0.35;
inline constexpr std::size_t kMaxDatabaseTrials = 255;

struct Fingerprint {
    std::vector<std::uint8_t> bits;

    std::size_t size() const noexcept { return bits.size(); }
    bool operator==(const Fingerprint&) const = default;
};

/// First `length` cells in row-major order.
std::vector<std::size_t> default_window(std::size_t length, std::size_t cells);

/// Bit l = 1 iff the cell at window[l] powered up at 1 in more than M/2
/// trials; even-M ties give 0.
Fingerprint make_fingerprint(const PowerUpDump& dump, std::span<const std::size_t> window);
Fingerprint make_fingerprint(const AccumulatedState& counts, std::span<const std::size_t> window);

double fractional_hamming(const Fingerprint& a, const Fingerprint& b);

std::string fingerprint_hex(const Fingerprint& fp);
Fingerprint fingerprint_from_hex(std::string_view hex, std::size_t length);

struct EnrollmentRecord {
    std::string id_label;
    Fingerprint fingerprint;
    AccumulatedState ipu_counts;
    std::string created;

    bool operator==(const EnrollmentRecord&) const = default;
};

struct MatchResult {
    std::optional<std::size_t> record;  // index into Database::records()
    double fractional_hamming = 1.0;    // nearest distance; 1.0 for an empty database
};

class Database {
  public:
    Database(std::vector<std::size_t> window, std::size_t rows, std::size_t cols, std::size_t trials);

    const std::vector<std::size_t>& window() const noexcept { return window_; }
    std::size_t fingerprint_bits() const noexcept { return window_.size(); }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t trials() const noexcept { return trials_; }

    const std::vector<EnrollmentRecord>& records() const noexcept { return records_; }
    const EnrollmentRecord* find(std::string_view id_label) const;

    /// Appends after validating label, fingerprint length, dimensions and M.
    void enroll(EnrollmentRecord record);

    bool operator==(const Database&) const = default;

  private:
    std::vector<std::size_t> window_;
    std::size_t rows_;
    std::size_t cols_;
    std::size_t trials_;
    std::vector<EnrollmentRecord> records_;
};

/// Builds the record for a fresh chip from its IPU dump.
EnrollmentRecord make_record(const Database& db, std::string id_label, const PowerUpDump& ipu, std::string created);

/// Nearest record by fractional Hamming distance, accepted iff <= tau.
MatchResult match(const Database& db, const PowerUpDump& fpu, double tau = kDefaultMatchTau);

// Database text format:
//   IMPRINT-DB v1 <L> <rows> <cols> <M> window=<i0,i1,...>
//   <id>\t<fingerprint hex>\t<base64, one count byte per cell>\t<created>
std::string format_database(const Database& db);
Database parse_database(const std::string& text);
void save_database(const Database& db, const std::filesystem::path& path);
Database load_database(const std::filesystem::path& path);

}  // namespace imprint
