#pragma once

// Data retrieval from aged power-up states.
//
// Single chip: sum each cell's power-ups before (IS) and after (FS) aging,
// take D = IS - FS and threshold it into a ternary hypothesis:
//   D >  T_H  ->  +1  (cell held logic 1)
//   D < -T_H  ->  -1  (cell held logic 0)
//   otherwise ->   0  (insufficient information)
// Multiple chips: sum the hypotheses per cell; >= +1 -> 1, <= -1 -> 0,
// anything else -> X.

#include <cstdint>
#include <span>
#include <vector>

#include "imprint/grid.hpp"
#include "imprint/sram_sim.hpp"

namespace imprint {

struct AccumulatedState {
    std::size_t trials = 0;
    Grid<std::int32_t> counts;  // number of trials that powered up at 1

    std::size_t rows() const noexcept { return counts.rows(); }
    std::size_t cols() const noexcept { return counts.cols(); }

    bool operator==(const AccumulatedState&) const = default;
};

struct DiffArray {
    std::size_t trials = 0;
    Grid<std::int32_t> values;  // IS - FS, within [-M, +M]
};

class Threshold {
  public:
    explicit Threshold(std::int32_t value);

    /// ceil(0.3 * M).
    static Threshold for_trials(std::size_t trials);

    std::int32_t value() const noexcept { return value_; }

  private:
    std::int32_t value_;
};

using HypothesisArray = Grid<std::int8_t>;

enum class Ternary : std::uint8_t { Zero = 0, One = 1, X = 2 };

using RecoveredData = Grid<Ternary>;

char to_char(Ternary t) noexcept;

AccumulatedState accumulate(const PowerUpDump& dump);

/// Throws Error(dimension_mismatch) unless shapes and trial counts agree.
DiffArray diff(const AccumulatedState& initial, const AccumulatedState& final_state);

/// Throws Error(invalid_argument) if the threshold exceeds M.
HypothesisArray hyp_bit_array(const DiffArray& d, Threshold t);

HypothesisArray partial_retrieve(const PowerUpDump& ipu, const PowerUpDump& fpu, Threshold t);
HypothesisArray partial_retrieve(const AccumulatedState& ipu, const PowerUpDump& fpu, Threshold t);

RecoveredData hypothesis_to_ternary(const HypothesisArray& h);

/// Throws on an empty list or mismatched shapes.
RecoveredData majority_vote(std::span<const HypothesisArray> hypotheses);

}  // namespace imprint
