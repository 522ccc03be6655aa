#pragma once

// Synthetic SRAM arrays: Gaussian process variation, content-dependent NBTI
// drift, and noisy multi-trial power-up sampling.
//
// Each cell is reduced to one signed mismatch voltage (millivolts). A cell
// powers up at 1 iff bias + noise > 0. Aging moves the bias toward the
// complement of the stored bit: stored 0 drifts positive, stored 1 negative.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "imprint/grid.hpp"

namespace imprint {

struct ChipSpec {
    std::size_t rows = 256;
    std::size_t cols = 256;
    double sigma_pv = 5.0;     // mV
    double sigma_noise = 0.5;  // mV
    std::uint64_t seed = 0;

    /// Throws Error(invalid_argument) on zero dimensions, sigma_pv <= 0,
    /// sigma_noise < 0 or non-finite values.
    void validate() const;

    bool operator==(const ChipSpec&) const = default;
};

/// Power-law NBTI threshold shift, shift(h) = amplitude * h^exponent.
struct AgingModel {
    double amplitude = 1.0;  // mV / h^exponent
    double exponent = 0.2;

    void validate() const;
    double shift(double hours) const;
};

class ChipState {
  public:
    /// Rebuilds a chip from persisted values. The loaded biases become the
    /// reference point for subsequent aging.
    ChipState(ChipSpec spec, Grid<double> bias, double age_hours);

    const ChipSpec& spec() const noexcept { return spec_; }
    const Grid<double>& bias() const noexcept { return bias_; }
    double age_hours() const noexcept { return age_hours_; }
    std::size_t rows() const noexcept { return bias_.rows(); }
    std::size_t cols() const noexcept { return bias_.cols(); }

  private:
    friend ChipState age_chip(const ChipState&, const Grid<std::uint8_t>&, double, const AgingModel&);

    ChipSpec spec_;
    Grid<double> bias_;
    double age_hours_ = 0.0;

    // Per cell, the bias and age at the start of the current run of
    // same-direction stress, plus that direction (+1, -1, or 0 for none).
    // Current bias = anchor + direction * (shift(age) - shift(anchor_age)),
    // so repeated calls with the same content telescope exactly.
    std::vector<double> anchor_bias_;
    std::vector<double> anchor_age_;
    std::vector<std::int8_t> direction_;
};

/// M power-up observations of one chip; bit(m, k) for trial m, cell k.
class PowerUpDump {
  public:
    PowerUpDump(std::string label, std::size_t rows, std::size_t cols, std::size_t trials);
    PowerUpDump(std::string label, std::size_t rows, std::size_t cols, std::size_t trials,
                std::vector<std::uint8_t> bits);

    const std::string& label() const noexcept { return label_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t cells() const noexcept { return rows_ * cols_; }
    std::size_t trials() const noexcept { return trials_; }

    std::uint8_t bit(std::size_t trial, std::size_t cell) const { return bits_[trial * cells() + cell]; }
    void set_bit(std::size_t trial, std::size_t cell, bool value) { bits_[trial * cells() + cell] = value ? 1 : 0; }

    std::span<const std::uint8_t> trial(std::size_t m) const {
        return std::span<const std::uint8_t>(bits_).subspan(m * cells(), cells());
    }
    std::span<std::uint8_t> trial(std::size_t m) { return std::span<std::uint8_t>(bits_).subspan(m * cells(), cells()); }

    /// Every bit inverted, label unchanged.
    PowerUpDump complemented() const;

    bool operator==(const PowerUpDump&) const = default;

  private:
    std::string label_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t trials_ = 0;
    std::vector<std::uint8_t> bits_;
};

enum class Stability : std::uint8_t { S0, S1, U };

ChipState new_chip(const ChipSpec& spec);

/// Ages `chip` for `hours` more hours while it holds `content` (1 byte per
/// cell, nonzero = logic 1).
ChipState age_chip(const ChipState& chip, const Grid<std::uint8_t>& content, double hours, const AgingModel& model);

PowerUpDump power_up(const ChipState& chip, std::size_t trials, std::uint64_t noise_seed, std::string label = "chip");

Grid<Stability> classify_stability(const PowerUpDump& dump);

/// Fraction of cells tagged S0 or S1.
double stable_fraction(const Grid<Stability>& classes);

// Chip state text format:
//   IMPRINT-CHIP v1 rows cols sigma_pv sigma_noise age_hours
//   one signed bias per line, row-major, 6 decimal places
void save_chip(const ChipState& chip, const std::filesystem::path& path);
ChipState load_chip(const std::filesystem::path& path);
std::string format_chip(const ChipState& chip);
ChipState parse_chip(const std::string& text);

}  // namespace imprint
