#include <cmath>
#include <string>

#include "imprint/dataio.hpp"
#include "imprint/error.hpp"

namespace imprint {

RecoveryMetrics compute_metrics(const RecoveredData& rd, const BinaryImage& truth) {
    if (!rd.same_shape(truth)) {
        throw Error(Errc::dimension_mismatch, "recovered data is " + std::to_string(rd.rows()) + "x" +
                                                  std::to_string(rd.cols()) + " but truth is " +
                                                  std::to_string(truth.rows()) + "x" + std::to_string(truth.cols()));
    }
    RecoveryMetrics m;
    m.total_cells = rd.size();
    for (std::size_t k = 0; k < rd.size(); ++k) {
        if (rd[k] == Ternary::X) continue;
        const int recovered = rd[k] == Ternary::One ? 1 : 0;
        const int expected = truth[k] ? 1 : 0;
        ++m.determinate_count;
        ++m.confusion[recovered][expected];
        if (recovered == expected) ++m.correct_count;
    }
    m.recovery_rate = m.total_cells ? static_cast<double>(m.determinate_count) / static_cast<double>(m.total_cells) : 0.0;
    m.accuracy_vacuous = m.determinate_count == 0;
    m.accuracy = m.accuracy_vacuous ? 1.0
                                    : static_cast<double>(m.correct_count) / static_cast<double>(m.determinate_count);
    return m;
}

RecoveryMetrics coverage_metrics(const RecoveredData& rd) {
    RecoveryMetrics m;
    m.has_truth = false;
    m.total_cells = rd.size();
    for (std::size_t k = 0; k < rd.size(); ++k) {
        if (rd[k] != Ternary::X) ++m.determinate_count;
    }
    m.recovery_rate = m.total_cells ? static_cast<double>(m.determinate_count) / static_cast<double>(m.total_cells) : 0.0;
    m.accuracy_vacuous = m.determinate_count == 0;
    return m;
}

AgingModel calibrate_amplitude(double sigma_pv, double exponent) {
    if (!(sigma_pv > 0.0) || !std::isfinite(sigma_pv)) {
        throw Error(Errc::invalid_argument, "sigma_pv must be positive to calibrate aging");
    }
    AgingModel model{0.5 * sigma_pv / std::pow(4.0, exponent), exponent};
    model.validate();
    return model;
}

BinaryImage synthetic_content(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw Error(Errc::invalid_argument, "content dimensions must be positive");
    BinaryImage img(rows, cols, 0);
    const double h = static_cast<double>(rows);
    const double w = static_cast<double>(cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double y = (static_cast<double>(r) + 0.5) / h;
            const double x = (static_cast<double>(c) + 0.5) / w;
            bool black = false;
            // ring
            const double d = std::hypot(x - 0.5, y - 0.5);
            black |= d > 0.22 && d < 0.34;
            // horizontal bars across the top
            black |= y < 0.12 && static_cast<int>(y * 50.0) % 2 == 0;
            // diagonal band
            black |= std::abs(x - y) < 0.04;
            // checker block, bottom right
            black |= x > 0.72 && y > 0.72 && (static_cast<int>(x * 32.0) + static_cast<int>(y * 32.0)) % 2 == 0;
            // solid block, bottom left
            black |= x < 0.2 && y > 0.8;
            img(r, c) = black ? 1 : 0;
        }
    }
    return img;
}

}  // namespace imprint
