#include "imprint/recovery.hpp"

#include <cmath>
#include <string>

#include "imprint/error.hpp"

namespace imprint {

Threshold::Threshold(std::int32_t value) : value_(value) {
    if (value < 1) throw Error(Errc::invalid_argument, "threshold T_H must be a positive integer");
}

Threshold Threshold::for_trials(std::size_t trials) {
    // Integer form of ceil(0.3 * M), avoiding 0.3 rounding at multiples of 10.
    const auto t = static_cast<std::int32_t>((3 * trials + 9) / 10);
    return Threshold(t < 1 ? 1 : t);
}

char to_char(Ternary t) noexcept {
    switch (t) {
        case Ternary::Zero: return '0';
        case Ternary::One: return '1';
        case Ternary::X: return 'X';
    }
    return '?';
}

AccumulatedState accumulate(const PowerUpDump& dump) {
    AccumulatedState out{dump.trials(), Grid<std::int32_t>(dump.rows(), dump.cols(), 0)};
    for (std::size_t m = 0; m < dump.trials(); ++m) {
        const auto row = dump.trial(m);
        for (std::size_t k = 0; k < row.size(); ++k) out.counts[k] += row[k];
    }
    return out;
}

DiffArray diff(const AccumulatedState& initial, const AccumulatedState& final_state) {
    if (!initial.counts.same_shape(final_state.counts)) {
        throw Error(Errc::dimension_mismatch,
                    "initial state is " + std::to_string(initial.rows()) + "x" + std::to_string(initial.cols()) +
                        " but final state is " + std::to_string(final_state.rows()) + "x" +
                        std::to_string(final_state.cols()));
    }
    if (initial.trials != final_state.trials) {
        throw Error(Errc::dimension_mismatch, "initial state has M=" + std::to_string(initial.trials) +
                                                  " but final state has M=" + std::to_string(final_state.trials));
    }
    DiffArray out{initial.trials, Grid<std::int32_t>(initial.rows(), initial.cols(), 0)};
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        out.values[k] = initial.counts[k] - final_state.counts[k];
    }
    return out;
}

HypothesisArray hyp_bit_array(const DiffArray& d, Threshold t) {
    if (static_cast<std::size_t>(t.value()) > d.trials) {
        throw Error(Errc::invalid_argument, "threshold " + std::to_string(t.value()) + " exceeds M=" +
                                                std::to_string(d.trials));
    }
    const std::int32_t th = t.value();
    HypothesisArray h(d.values.rows(), d.values.cols(), 0);
    for (std::size_t k = 0; k < h.size(); ++k) {
        const std::int32_t v = d.values[k];
        if (v > th) {
            h[k] = 1;
        } else if (v < -th) {
            h[k] = -1;
        }
    }
    return h;
}

HypothesisArray partial_retrieve(const PowerUpDump& ipu, const PowerUpDump& fpu, Threshold t) {
    return hyp_bit_array(diff(accumulate(ipu), accumulate(fpu)), t);
}

HypothesisArray partial_retrieve(const AccumulatedState& ipu, const PowerUpDump& fpu, Threshold t) {
    return hyp_bit_array(diff(ipu, accumulate(fpu)), t);
}

RecoveredData hypothesis_to_ternary(const HypothesisArray& h) {
    RecoveredData out(h.rows(), h.cols(), Ternary::X);
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (h[k] > 0) {
            out[k] = Ternary::One;
        } else if (h[k] < 0) {
            out[k] = Ternary::Zero;
        }
    }
    return out;
}

RecoveredData majority_vote(std::span<const HypothesisArray> hypotheses) {
    if (hypotheses.empty()) throw Error(Errc::invalid_argument, "majority vote needs at least one chip");
    const auto& first = hypotheses.front();
    std::vector<std::int32_t> sum(first.size(), 0);
    for (std::size_t n = 0; n < hypotheses.size(); ++n) {
        const auto& h = hypotheses[n];
        if (!h.same_shape(first)) {
            throw Error(Errc::dimension_mismatch, "hypothesis " + std::to_string(n) + " has a different shape");
        }
        for (std::size_t k = 0; k < h.size(); ++k) sum[k] += h[k];
    }
    RecoveredData out(first.rows(), first.cols(), Ternary::X);
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (sum[k] >= 1) {
            out[k] = Ternary::One;
        } else if (sum[k] <= -1) {
            out[k] = Ternary::Zero;
        }
    }
    return out;
}

}  // namespace imprint
