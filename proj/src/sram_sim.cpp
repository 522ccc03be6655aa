#include "imprint/sram_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "imprint/error.hpp"
#include "imprint/fileio.hpp"
#include "imprint/rng.hpp"
#include "text.hpp"

namespace imprint {

namespace {

constexpr std::uint64_t kProcessStream = 0x7076;  // "pv"

void check_dims(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw Error(Errc::invalid_argument, "array dimensions must be positive, got " + std::to_string(rows) +
                                                "x" + std::to_string(cols));
    }
    if (rows > std::numeric_limits<std::size_t>::max() / cols) {
        throw Error(Errc::dimension_overflow, "array dimensions overflow");
    }
}

}  // namespace

void ChipSpec::validate() const {
    check_dims(rows, cols);
    if (!(sigma_pv > 0.0) || !std::isfinite(sigma_pv)) {
        throw Error(Errc::invalid_argument, "sigma_pv must be positive and finite");
    }
    if (!(sigma_noise >= 0.0) || !std::isfinite(sigma_noise)) {
        throw Error(Errc::invalid_argument, "sigma_noise must be nonnegative and finite");
    }
}

void AgingModel::validate() const {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
        throw Error(Errc::invalid_argument, "aging amplitude must be positive and finite");
    }
    if (!(exponent > 0.0 && exponent <= 1.0)) {
        throw Error(Errc::invalid_argument, "aging exponent must lie in (0, 1]");
    }
}

double AgingModel::shift(double hours) const {
    if (hours <= 0.0) return 0.0;
    return amplitude * std::pow(hours, exponent);
}

ChipState::ChipState(ChipSpec spec, Grid<double> bias, double age_hours)
    : spec_(spec), bias_(std::move(bias)), age_hours_(age_hours) {
    spec_.validate();
    if (!bias_.same_shape(spec_.rows, spec_.cols)) {
        throw Error(Errc::dimension_mismatch, "bias array does not match chip dimensions");
    }
    if (!(age_hours >= 0.0) || !std::isfinite(age_hours)) {
        throw Error(Errc::invalid_argument, "age_hours must be nonnegative and finite");
    }
    for (double b : bias_.cells()) {
        if (!std::isfinite(b)) throw Error(Errc::invalid_argument, "bias values must be finite");
    }
    anchor_bias_.assign(bias_.cells().begin(), bias_.cells().end());
    anchor_age_.assign(bias_.size(), age_hours_);
    direction_.assign(bias_.size(), 0);
}

PowerUpDump::PowerUpDump(std::string label, std::size_t rows, std::size_t cols, std::size_t trials)
    : PowerUpDump(std::move(label), rows, cols, trials, std::vector<std::uint8_t>(rows * cols * trials, 0)) {}

PowerUpDump::PowerUpDump(std::string label, std::size_t rows, std::size_t cols, std::size_t trials,
                         std::vector<std::uint8_t> bits)
    : label_(std::move(label)), rows_(rows), cols_(cols), trials_(trials), bits_(std::move(bits)) {
    check_dims(rows, cols);
    if (trials == 0) throw Error(Errc::invalid_argument, "a dump needs at least one trial");
    if (label_.empty() || std::any_of(label_.begin(), label_.end(), [](char c) {
            return std::isspace(static_cast<unsigned char>(c)) != 0;
        })) {
        throw Error(Errc::invalid_argument, "dump label must be nonempty and free of whitespace");
    }
    if (bits_.size() != rows * cols * trials) {
        throw Error(Errc::dimension_mismatch, "dump payload does not hold M*R*C bits");
    }
    for (auto& b : bits_) b = b ? 1 : 0;
}

PowerUpDump PowerUpDump::complemented() const {
    auto out = *this;
    for (auto& b : out.bits_) b ^= 1;
    return out;
}

ChipState new_chip(const ChipSpec& spec) {
    spec.validate();
    Grid<double> bias(spec.rows, spec.cols);
    for (std::size_t k = 0; k < bias.size(); ++k) {
        bias[k] = spec.sigma_pv * rng::standard_normal(spec.seed, kProcessStream, k);
    }
    return ChipState(spec, std::move(bias), 0.0);
}

ChipState age_chip(const ChipState& chip, const Grid<std::uint8_t>& content, double hours, const AgingModel& model) {
    if (!content.same_shape(chip.bias())) {
        throw Error(Errc::dimension_mismatch,
                    "content is " + std::to_string(content.rows()) + "x" + std::to_string(content.cols()) +
                        " but chip is " + std::to_string(chip.rows()) + "x" + std::to_string(chip.cols()));
    }
    if (!(hours >= 0.0) || !std::isfinite(hours)) {
        throw Error(Errc::invalid_argument, "aging hours must be nonnegative and finite");
    }
    model.validate();

    ChipState out = chip;
    const double new_age = chip.age_hours_ + hours;
    const double shift_now = model.shift(new_age);
    for (std::size_t k = 0; k < out.bias_.size(); ++k) {
        const std::int8_t dir = content[k] ? -1 : +1;
        if (dir != out.direction_[k]) {
            out.anchor_bias_[k] = out.bias_[k];
            out.anchor_age_[k] = chip.age_hours_;
            out.direction_[k] = dir;
        }
        out.bias_[k] = out.anchor_bias_[k] + dir * (shift_now - model.shift(out.anchor_age_[k]));
    }
    out.age_hours_ = new_age;
    return out;
}

PowerUpDump power_up(const ChipState& chip, std::size_t trials, std::uint64_t noise_seed, std::string label) {
    if (trials == 0) throw Error(Errc::invalid_argument, "power_up needs at least one trial");
    PowerUpDump dump(std::move(label), chip.rows(), chip.cols(), trials);
    const double sigma = chip.spec().sigma_noise;
    const auto& bias = chip.bias();
    for (std::size_t m = 0; m < trials; ++m) {
        auto row = dump.trial(m);
        for (std::size_t k = 0; k < bias.size(); ++k) {
            const double noise = sigma > 0.0 ? sigma * rng::standard_normal(noise_seed, m, k) : 0.0;
            row[k] = bias[k] + noise > 0.0 ? 1 : 0;
        }
    }
    return dump;
}

Grid<Stability> classify_stability(const PowerUpDump& dump) {
    Grid<Stability> out(dump.rows(), dump.cols(), Stability::U);
    for (std::size_t k = 0; k < dump.cells(); ++k) {
        std::size_t ones = 0;
        for (std::size_t m = 0; m < dump.trials(); ++m) ones += dump.bit(m, k);
        if (ones == 0) {
            out[k] = Stability::S0;
        } else if (ones == dump.trials()) {
            out[k] = Stability::S1;
        }
    }
    return out;
}

double stable_fraction(const Grid<Stability>& classes) {
    if (classes.size() == 0) return 0.0;
    const auto stable = std::count_if(classes.cells().begin(), classes.cells().end(),
                                      [](Stability s) { return s != Stability::U; });
    return static_cast<double>(stable) / static_cast<double>(classes.size());
}

std::string format_chip(const ChipState& chip) {
    const auto& s = chip.spec();
    std::string out = "IMPRINT-CHIP v1 " + std::to_string(s.rows) + " " + std::to_string(s.cols) + " " +
                      text::format_double(s.sigma_pv) + " " + text::format_double(s.sigma_noise) + " " +
                      text::format_double(chip.age_hours()) + "\n";
    out.reserve(out.size() + chip.bias().size() * 11);
    for (double b : chip.bias().cells()) {
        out += text::format_fixed(b, 6);
        out += '\n';
    }
    return out;
}

ChipState parse_chip(const std::string& contents) {
    const auto lines = text::lines(contents);
    if (lines.empty()) throw Error(Errc::malformed_header, "empty chip file");
    const auto header = text::split_whitespace(lines[0]);
    if (header.size() != 7 || header[0] != "IMPRINT-CHIP") {
        throw Error(Errc::malformed_header, "expected 'IMPRINT-CHIP v1 rows cols sigma_pv sigma_noise age_hours'");
    }
    if (header[1] != "v1") throw Error(Errc::unsupported_format, "unsupported chip file version '" +
                                                                   std::string(header[1]) + "'");
    ChipSpec spec;
    spec.rows = text::parse_u64(header[2], "rows", Errc::malformed_header);
    spec.cols = text::parse_u64(header[3], "cols", Errc::malformed_header);
    spec.sigma_pv = text::parse_double(header[4], "sigma_pv", Errc::malformed_header);
    spec.sigma_noise = text::parse_double(header[5], "sigma_noise", Errc::malformed_header);
    const double age = text::parse_double(header[6], "age_hours", Errc::malformed_header);
    spec.validate();

    const std::size_t cells = spec.rows * spec.cols;
    if (lines.size() - 1 < cells) {
        throw Error(Errc::truncated, "chip file holds " + std::to_string(lines.size() - 1) + " of " +
                                         std::to_string(cells) + " bias values");
    }
    if (lines.size() - 1 > cells) throw Error(Errc::dimension_mismatch, "chip file has trailing data");
    Grid<double> bias(spec.rows, spec.cols);
    for (std::size_t k = 0; k < cells; ++k) {
        bias[k] = text::parse_double(lines[k + 1], "bias value", Errc::bad_digit);
    }
    return ChipState(spec, std::move(bias), age);
}

void save_chip(const ChipState& chip, const std::filesystem::path& path) {
    write_file_atomic(path, format_chip(chip));
}

ChipState load_chip(const std::filesystem::path& path) { return parse_chip(read_file(path)); }

}  // namespace imprint
