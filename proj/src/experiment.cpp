#include "imprint/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imprint/error.hpp"
#include "imprint/rng.hpp"
#include "text.hpp"

namespace imprint {

namespace {

std::size_t parse_count(std::string_view key, std::string_view value) {
    return text::parse_u64(text::trim(value), key, Errc::invalid_argument);
}

double parse_real(std::string_view key, std::string_view value) {
    return text::parse_double(text::trim(value), key, Errc::invalid_argument);
}

bool parse_bool(std::string_view key, std::string_view value) {
    const auto v = text::trim(value);
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw Error(Errc::invalid_argument, "invalid " + std::string(key) + " '" + v + "'");
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
    static const std::vector<std::string> k = {"chips",    "rows", "cols",  "sigma_pv", "sigma_noise",
                                               "trials",   "threshold", "hours", "exponent", "amplitude",
                                               "seed",     "image", "out",  "fingerprint_bits", "tau",
                                               "created",  "force"};
    return k;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
    if (key == "chips") {
        chips = parse_count(key, value);
    } else if (key == "rows") {
        rows = parse_count(key, value);
    } else if (key == "cols") {
        cols = parse_count(key, value);
    } else if (key == "sigma_pv") {
        sigma_pv = parse_real(key, value);
    } else if (key == "sigma_noise") {
        sigma_noise = parse_real(key, value);
    } else if (key == "trials") {
        trials = parse_count(key, value);
    } else if (key == "threshold") {
        const auto t = parse_count(key, value);
        if (t > 65535) throw Error(Errc::invalid_argument, "threshold too large");
        threshold = static_cast<std::int32_t>(t);
    } else if (key == "hours") {
        hours.clear();
        for (auto tok : text::split(value, ',')) hours.push_back(parse_real(key, tok));
    } else if (key == "exponent") {
        exponent = parse_real(key, value);
    } else if (key == "amplitude") {
        amplitude = parse_real(key, value);
    } else if (key == "seed") {
        seed = parse_count(key, value);
    } else if (key == "image") {
        image = text::trim(value);
    } else if (key == "out") {
        out = text::trim(value);
    } else if (key == "fingerprint_bits") {
        fingerprint_bits = parse_count(key, value);
    } else if (key == "tau") {
        tau = parse_real(key, value);
    } else if (key == "created") {
        created = text::trim(value);
    } else if (key == "force") {
        force = parse_bool(key, value);
    } else {
        throw Error(Errc::invalid_argument, "unknown config key '" + std::string(key) + "'");
    }
}

void ExperimentConfig::validate() const {
    if (chips == 0) throw Error(Errc::invalid_argument, "chips must be at least 1");
    chip_spec(0).validate();
    if (trials == 0 || trials > 255) throw Error(Errc::invalid_argument, "trials must lie in [1, 255]");
    if (threshold < 0 || static_cast<std::size_t>(threshold) > trials) {
        throw Error(Errc::invalid_argument, "threshold must lie in [1, trials] (0 selects the default)");
    }
    if (hours.empty()) throw Error(Errc::invalid_argument, "hours list is empty");
    for (std::size_t i = 0; i < hours.size(); ++i) {
        if (!(hours[i] >= 0.0)) throw Error(Errc::invalid_argument, "checkpoint hours must be nonnegative");
        if (i > 0 && hours[i] < hours[i - 1]) {
            throw Error(Errc::invalid_argument, "checkpoint hours must be nondecreasing");
        }
    }
    if (amplitude < 0.0) throw Error(Errc::invalid_argument, "amplitude must be positive (0 selects calibration)");
    aging_model().validate();
    if (fingerprint_bits == 0 || fingerprint_bits > rows * cols) {
        throw Error(Errc::invalid_argument, "fingerprint_bits must lie in [1, rows*cols]");
    }
    if (!(tau > 0.0 && tau < 0.5)) throw Error(Errc::invalid_argument, "tau must lie in (0, 0.5)");
    if (created.empty() || created.find_first_of("\t\r\n") != std::string::npos) {
        throw Error(Errc::invalid_argument, "created must be a nonempty single-line stamp without tabs");
    }
    if (out.empty()) throw Error(Errc::invalid_argument, "out directory is empty");
}

AgingModel ExperimentConfig::aging_model() const {
    if (amplitude > 0.0) {
        AgingModel m{amplitude, exponent};
        m.validate();
        return m;
    }
    return calibrate_amplitude(sigma_pv, exponent);
}

Threshold ExperimentConfig::recovery_threshold() const {
    return threshold > 0 ? Threshold(threshold) : Threshold::for_trials(trials);
}

ChipSpec ExperimentConfig::chip_spec(std::size_t chip) const {
    return ChipSpec{rows, cols, sigma_pv, sigma_noise, rng::derive_seed(seed, chip, 0)};
}

std::uint64_t ExperimentConfig::ipu_seed(std::size_t chip) const { return rng::derive_seed(seed, chip, 1); }

std::uint64_t ExperimentConfig::fpu_seed(std::size_t chip, std::size_t checkpoint) const {
    return rng::derive_seed(seed, chip, 2 + checkpoint);
}

std::map<std::string, std::string> parse_config_lines(const std::string& contents) {
    std::map<std::string, std::string> out;
    std::size_t lineno = 0;
    for (auto line : text::lines(contents)) {
        ++lineno;
        const auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw Error(Errc::invalid_argument, "config line " + std::to_string(lineno) + " is not key=value");
        }
        out[text::trim(std::string_view(trimmed).substr(0, eq))] = text::trim(std::string_view(trimmed).substr(eq + 1));
    }
    return out;
}

ChipState generate_chip(const ExperimentConfig& config, std::size_t index) {
    return parse_chip(format_chip(new_chip(config.chip_spec(index))));
}

BinaryImage load_content(const ExperimentConfig& config) {
    BinaryImage img = config.image.empty() ? synthetic_content(config.rows, config.cols) : load_pbm(config.image);
    if (!img.same_shape(config.rows, config.cols)) {
        throw Error(Errc::dimension_mismatch, "content image is " + std::to_string(img.rows()) + "x" +
                                                  std::to_string(img.cols()) + " but chips are " +
                                                  std::to_string(config.rows) + "x" + std::to_string(config.cols));
    }
    return img;
}

const GridPoint& ExperimentResult::at(std::size_t checkpoint, std::size_t chips) const {
    return points.at(checkpoint * chip_count() + (chips - 1));
}

ExperimentResult run_experiment(const ExperimentConfig& config, const BinaryImage& content) {
    config.validate();
    const auto model = config.aging_model();
    const auto th = config.recovery_threshold();

    // hypotheses[checkpoint][chip]
    std::vector<std::vector<HypothesisArray>> hypotheses(config.hours.size());
    for (std::size_t k = 0; k < config.chips; ++k) {
        ChipState chip = generate_chip(config, k);
        const auto ipu = accumulate(power_up(chip, config.trials, config.ipu_seed(k)));
        double age = 0.0;
        for (std::size_t c = 0; c < config.hours.size(); ++c) {
            chip = age_chip(chip, content, config.hours[c] - age, model);
            age = config.hours[c];
            const auto fpu = power_up(chip, config.trials, config.fpu_seed(k, c));
            hypotheses[c].push_back(partial_retrieve(ipu, fpu, th));
        }
    }

    ExperimentResult result;
    for (std::size_t c = 0; c < config.hours.size(); ++c) {
        result.rd.emplace_back();
        for (std::size_t n = 1; n <= config.chips; ++n) {
            auto rd = majority_vote(std::span<const HypothesisArray>(hypotheses[c].data(), n));
            result.points.push_back(GridPoint{config.hours[c], n, compute_metrics(rd, content)});
            result.rd.back().push_back(std::move(rd));
        }
    }
    return result;
}

std::string checkpoint_tag(double hours) { return "h" + text::format_double(hours); }

}  // namespace imprint
