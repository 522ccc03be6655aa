#pragma once

// Experiment configuration and the aging/recovery grid: N chips aged with
// one image, recovered at every checkpoint with 1..N chips voting.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "imprint/dataio.hpp"
#include "imprint/recovery.hpp"
#include "imprint/sram_sim.hpp"

namespace imprint {

struct ExperimentConfig {
    std::size_t chips = 6;
    std::size_t rows = 256;
    std::size_t cols = 256;
    double sigma_pv = 5.0;
    double sigma_noise = 0.5;
    std::size_t trials = 10;
    std::int32_t threshold = 0;  // 0 selects ceil(0.3 * M)
    std::vector<double> hours = {2, 4, 6, 8, 10, 12};
    double exponent = 0.2;
    double amplitude = 0.0;  // 0 selects the calibrated amplitude
    std::uint64_t seed = 1;
    std::string image;  // empty selects synthetic_content()
    std::string out = "imprint-out";
    std::size_t fingerprint_bits = 256;
    double tau = 0.35;
    std::string created = "1970-01-01T00:00:00Z";
    bool force = false;

    /// Sets one field from its textual form. Unknown keys and unparsable
    /// values throw Error(invalid_argument).
    void set(std::string_view key, std::string_view value);

    /// Enforces every component precondition; throws Error(invalid_argument).
    void validate() const;

    static const std::vector<std::string>& keys();

    AgingModel aging_model() const;
    Threshold recovery_threshold() const;
    ChipSpec chip_spec(std::size_t chip) const;
    std::uint64_t ipu_seed(std::size_t chip) const;
    std::uint64_t fpu_seed(std::size_t chip, std::size_t checkpoint) const;
};

/// Parses `key=value` lines; blank lines and lines starting with '#' are
/// skipped. Later keys override earlier ones.
std::map<std::string, std::string> parse_config_lines(const std::string& text);

/// Chip `index` as it exists after persistence (biases at 6 decimals), so
/// in-memory runs and file-based runs see identical chips.
ChipState generate_chip(const ExperimentConfig& config, std::size_t index);

/// Aging content for the config: the configured PBM, or the synthetic card.
BinaryImage load_content(const ExperimentConfig& config);

struct GridPoint {
    double hours = 0.0;
    std::size_t chips = 0;
    RecoveryMetrics metrics;
};

struct ExperimentResult {
    std::vector<GridPoint> points;              // checkpoint-major, chip count 1..N
    std::vector<std::vector<RecoveredData>> rd;  // [checkpoint][chips - 1]

    const GridPoint& at(std::size_t checkpoint, std::size_t chips) const;
    std::size_t chip_count() const noexcept { return rd.empty() ? 0 : rd.front().size(); }
};

ExperimentResult run_experiment(const ExperimentConfig& config, const BinaryImage& content);

std::string checkpoint_tag(double hours);

}  // namespace imprint
