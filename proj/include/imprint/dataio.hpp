#pragma once

// Codecs (portable bitmaps, ternary graymaps, power-up dumps), recovery
// metrics, and aging-amplitude calibration.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "imprint/grid.hpp"
#include "imprint/recovery.hpp"
#include "imprint/sram_sim.hpp"

namespace imprint {

/// 1 = black, as in portable bitmaps. Doubles as aging content (1 = logic 1).
using BinaryImage = Grid<std::uint8_t>;
using TernaryImage = Grid<Ternary>;

enum class PbmEncoding { Ascii /* P1 */, Binary /* P4 */ };

// Largest accepted image side and cell count. Larger headers are rejected
// as dimension overflow before any allocation.
inline constexpr std::size_t kMaxImageSide = 1u << 16;
inline constexpr std::size_t kMaxImageCells = std::size_t{1} << 28;

BinaryImage parse_pbm(const std::string& bytes);
std::string format_pbm(const BinaryImage& img, PbmEncoding encoding);
BinaryImage load_pbm(const std::filesystem::path& path);
void save_pbm(const BinaryImage& img, const std::filesystem::path& path, PbmEncoding encoding = PbmEncoding::Ascii);

// Ternary images are P2 graymaps, maxval 255: 1 -> 0 (black),
// 0 -> 255 (white), X -> 128 (gray). At most 16 values per line.
std::string format_ternary_pgm(const TernaryImage& img);
TernaryImage parse_ternary_pgm(const std::string& bytes);
void save_ternary_pgm(const TernaryImage& img, const std::filesystem::path& path);
TernaryImage load_ternary_pgm(const std::filesystem::path& path);

/// +1 -> 1, -1 -> 0, 0 -> X, and back.
HypothesisArray ternary_to_hypothesis(const TernaryImage& img);

// Dump format:
//   IMPRINT-DUMP v1 <label> <rows> <cols> <M>
//   M lines of ceil(R*C/4) lowercase hex digits; the row-major bit string,
//   most significant bit first within each digit, zero padded
//   CRC32 <8 hex digits>   (over the payload lines, each with its '\n')
std::string format_dump(const PowerUpDump& dump);
PowerUpDump parse_dump(const std::string& text);
void save_dump(const PowerUpDump& dump, const std::filesystem::path& path);
PowerUpDump load_dump(const std::filesystem::path& path);

std::uint32_t crc32(std::string_view bytes);

struct RecoveryMetrics {
    std::size_t total_cells = 0;
    std::size_t determinate_count = 0;
    std::size_t correct_count = 0;
    double recovery_rate = 0.0;
    double accuracy = 1.0;
    /// False for coverage-only metrics computed without a truth image; the
    /// accuracy and confusion fields are then meaningless.
    bool has_truth = true;
    /// True when nothing was determinate and accuracy is the 1.0 convention.
    bool accuracy_vacuous = true;
    // confusion[recovered][truth] over determinate cells
    std::size_t confusion[2][2] = {{0, 0}, {0, 0}};
};

RecoveryMetrics compute_metrics(const RecoveredData& rd, const BinaryImage& truth);

/// Rate-only metrics for runs without a ground-truth image.
RecoveryMetrics coverage_metrics(const RecoveredData& rd);

/// Returns the model with amplitude = 0.5 * sigma_pv / 4^exponent, i.e.
/// shift(4 h) equals half the process-variation spread.
AgingModel calibrate_amplitude(double sigma_pv, double exponent);

/// Deterministic black-and-white test card (ring, bars, diagonal, blocks)
/// used as default aging content.
BinaryImage synthetic_content(std::size_t rows, std::size_t cols);

}  // namespace imprint
