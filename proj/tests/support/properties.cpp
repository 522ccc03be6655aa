#include "properties.hpp"

#include <algorithm>

namespace imprint::testing {

namespace {

struct Shape {
    std::size_t rows, cols, trials;
};

Shape random_shape(std::mt19937_64& gen) {
    std::uniform_int_distribution<std::size_t> side(1, 6), m(1, 12);
    return {side(gen), side(gen), m(gen)};
}

HypothesisArray negated(const HypothesisArray& h) {
    HypothesisArray out = h;
    for (auto& v : out.cells()) v = static_cast<std::int8_t>(-v);
    return out;
}

class Recorder {
  public:
    explicit Recorder(std::string name) { out_.name = std::move(name); }

    void record(bool ok, const std::string& what) {
        ++out_.cases;
        if (!ok && out_.failures++ == 0) out_.first_failure = what;
    }

    PropertyOutcome done() { return out_; }

  private:
    PropertyOutcome out_;
};

}  // namespace

PowerUpDump random_dump(std::mt19937_64& gen, std::size_t rows, std::size_t cols, std::size_t trials) {
    // Per-cell bias probabilities, so counts cover the whole [0, M] range.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(rows * cols);
    for (auto& v : p) {
        const double r = u(gen);
        v = r < 0.25 ? 0.0 : r < 0.5 ? 1.0 : u(gen);
    }
    PowerUpDump dump("random", rows, cols, trials);
    for (std::size_t m = 0; m < trials; ++m)
        for (std::size_t k = 0; k < rows * cols; ++k) dump.set_bit(m, k, u(gen) < p[k]);
    return dump;
}

HypothesisArray random_hypothesis(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
    std::uniform_int_distribution<int> v(-1, 1);
    HypothesisArray h(rows, cols, 0);
    for (auto& x : h.cells()) x = static_cast<std::int8_t>(v(gen));
    return h;
}

DiffArray random_diff(std::mt19937_64& gen, std::size_t rows, std::size_t cols, std::size_t trials) {
    const int m = static_cast<int>(trials);
    std::uniform_int_distribution<int> v(-m, m);
    DiffArray d{trials, Grid<std::int32_t>(rows, cols, 0)};
    for (auto& x : d.values.cells()) x = v(gen);
    return d;
}

PropertyOutcome check_antisymmetry(std::uint64_t seed, std::size_t cases) {
    std::mt19937_64 gen(seed);
    Recorder rec("antisymmetry");
    for (std::size_t i = 0; i < cases; ++i) {
        const auto s = random_shape(gen);
        const auto d = random_diff(gen, s.rows, s.cols, s.trials);
        auto neg = d;
        for (auto& v : neg.values.cells()) v = -v;
        const Threshold t(std::uniform_int_distribution<int>(1, static_cast<int>(s.trials))(gen));
        rec.record(hyp_bit_array(neg, t) == negated(hyp_bit_array(d, t)), "case " + std::to_string(i));
    }
    return rec.done();
}

PropertyOutcome check_swap_duality(std::uint64_t seed, std::size_t cases) {
    std::mt19937_64 gen(seed);
    Recorder rec("swap duality");
    for (std::size_t i = 0; i < cases; ++i) {
        const auto s = random_shape(gen);
        const auto ipu = random_dump(gen, s.rows, s.cols, s.trials);
        const auto fpu = random_dump(gen, s.rows, s.cols, s.trials);
        const Threshold t(std::uniform_int_distribution<int>(1, static_cast<int>(s.trials))(gen));
        rec.record(partial_retrieve(fpu, ipu, t) == negated(partial_retrieve(ipu, fpu, t)), "case " + std::to_string(i));
    }
    return rec.done();
}

PropertyOutcome check_complement_duality(std::uint64_t seed, std::size_t cases) {
    std::mt19937_64 gen(seed);
    Recorder rec("complement duality");
    for (std::size_t i = 0; i < cases; ++i) {
        const auto s = random_shape(gen);
        const auto ipu = random_dump(gen, s.rows, s.cols, s.trials);
        const auto fpu = random_dump(gen, s.rows, s.cols, s.trials);
        const Threshold t(std::uniform_int_distribution<int>(1, static_cast<int>(s.trials))(gen));
        const auto h = partial_retrieve(ipu, fpu, t);
        const auto hc = partial_retrieve(ipu.complemented(), fpu.complemented(), t);
        bool ok = hc == negated(h);
        // Recovered bits flip 0 <-> 1 and X stays X.
        const auto rd = hypothesis_to_ternary(h);
        const auto rdc = hypothesis_to_ternary(hc);
        for (std::size_t k = 0; ok && k < rd.size(); ++k) {
            ok = rd[k] == Ternary::X ? rdc[k] == Ternary::X : rdc[k] != rd[k] && rdc[k] != Ternary::X;
        }
        rec.record(ok, "case " + std::to_string(i));
    }
    return rec.done();
}

PropertyOutcome check_threshold_monotonicity(std::uint64_t seed, std::size_t cases) {
    std::mt19937_64 gen(seed);
    Recorder rec("threshold monotonicity");
    for (std::size_t i = 0; i < cases; ++i) {
        auto s = random_shape(gen);
        s.trials = std::max<std::size_t>(s.trials, 2);
        const auto d = random_diff(gen, s.rows, s.cols, s.trials);
        const int m = static_cast<int>(s.trials);
        const int t1 = std::uniform_int_distribution<int>(1, m - 1)(gen);
        const int t2 = std::uniform_int_distribution<int>(t1 + 1, m)(gen);
        const auto h1 = hyp_bit_array(d, Threshold(t1));
        const auto h2 = hyp_bit_array(d, Threshold(t2));
        bool ok = true;
        for (std::size_t k = 0; k < h1.size(); ++k) {
            if (h2[k] != 0 && h2[k] != h1[k]) ok = false;
        }
        rec.record(ok, "case " + std::to_string(i) + " t1=" + std::to_string(t1) + " t2=" + std::to_string(t2));
    }
    return rec.done();
}

PropertyOutcome check_vote_permutation_invariance(std::uint64_t seed, std::size_t cases) {
    std::mt19937_64 gen(seed);
    Recorder rec("voting permutation invariance");
    for (std::size_t i = 0; i < cases; ++i) {
        const auto s = random_shape(gen);
        const auto n = std::uniform_int_distribution<std::size_t>(1, 7)(gen);
        std::vector<HypothesisArray> hs;
        for (std::size_t c = 0; c < n; ++c) hs.push_back(random_hypothesis(gen, s.rows, s.cols));
        const auto rd = majority_vote(hs);
        std::shuffle(hs.begin(), hs.end(), gen);
        rec.record(majority_vote(hs) == rd, "case " + std::to_string(i));
    }
    return rec.done();
}

PropertyOutcome check_single_chip_consistency(std::uint64_t seed, std::size_t cases) {
    std::mt19937_64 gen(seed);
    Recorder rec("N=1 consistency");
    for (std::size_t i = 0; i < cases; ++i) {
        const auto s = random_shape(gen);
        const std::vector<HypothesisArray> one{random_hypothesis(gen, s.rows, s.cols)};
        rec.record(majority_vote(one) == hypothesis_to_ternary(one.front()), "case " + std::to_string(i));
    }
    return rec.done();
}

PropertyOutcome check_x_absorption(std::uint64_t seed, std::size_t cases) {
    std::mt19937_64 gen(seed);
    Recorder rec("X-absorption");
    for (std::size_t i = 0; i < cases; ++i) {
        const auto s = random_shape(gen);
        const auto n = std::uniform_int_distribution<std::size_t>(1, 7)(gen);
        std::vector<HypothesisArray> hs;
        for (std::size_t c = 0; c < n; ++c) hs.push_back(random_hypothesis(gen, s.rows, s.cols));
        const auto rd = majority_vote(hs);
        hs.emplace_back(s.rows, s.cols, 0);
        rec.record(majority_vote(hs) == rd, "case " + std::to_string(i));
    }
    return rec.done();
}

PropertyOutcome check_vote_monotonicity(std::uint64_t seed, std::size_t cases) {
    std::mt19937_64 gen(seed);
    Recorder rec("vote monotonicity");
    for (std::size_t i = 0; i < cases; ++i) {
        const auto s = random_shape(gen);
        const auto n = std::uniform_int_distribution<std::size_t>(1, 7)(gen);
        std::vector<HypothesisArray> hs;
        for (std::size_t c = 0; c < n; ++c) hs.push_back(random_hypothesis(gen, s.rows, s.cols));
        const auto rd = majority_vote(hs);
        auto agree = random_hypothesis(gen, s.rows, s.cols);
        for (std::size_t k = 0; k < rd.size(); ++k) {
            if (rd[k] == Ternary::One) agree[k] = 1;
            if (rd[k] == Ternary::Zero) agree[k] = -1;
        }
        hs.push_back(agree);
        const auto after = majority_vote(hs);
        bool ok = true;
        for (std::size_t k = 0; k < rd.size(); ++k) {
            if (rd[k] != Ternary::X && after[k] != rd[k]) ok = false;
        }
        rec.record(ok, "case " + std::to_string(i));
    }
    return rec.done();
}

PropertyOutcome check_aging_composition(std::uint64_t seed, std::size_t cases) {
    std::mt19937_64 gen(seed);
    Recorder rec("aging composition");
    std::uniform_real_distribution<double> hours(0.0, 12.0), amp(0.1, 5.0), expo(0.05, 1.0);
    std::uniform_int_distribution<std::size_t> side(1, 8), parts(2, 5);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < cases; ++i) {
        ChipSpec spec{side(gen), side(gen), 5.0, 0.5, gen()};
        const AgingModel model{amp(gen), expo(gen)};
        Grid<std::uint8_t> content(spec.rows, spec.cols, 0);
        for (auto& c : content.cells()) c = coin(gen) ? 1 : 0;

        // Fresh chips take arbitrary real hours. Chips with a prior history
        // under other content use whole hours, where sums are exact.
        const bool history = coin(gen);
        ChipState start = new_chip(spec);
        if (history) {
            Grid<std::uint8_t> other(spec.rows, spec.cols, 0);
            for (auto& c : other.cells()) c = coin(gen) ? 1 : 0;
            start = age_chip(start, other, static_cast<double>(std::uniform_int_distribution<int>(1, 6)(gen)), model);
        }
        const auto n = parts(gen);
        std::vector<double> steps;
        for (std::size_t p = 0; p < n; ++p) {
            steps.push_back(history ? static_cast<double>(std::uniform_int_distribution<int>(0, 4)(gen)) : hours(gen));
        }
        ChipState incremental = start;
        double total = 0.0;
        for (double h : steps) {
            incremental = age_chip(incremental, content, h, model);
            total += h;
        }
        const ChipState once = age_chip(start, content, total, model);
        const bool ok = incremental.bias() == once.bias() && incremental.age_hours() == once.age_hours();
        rec.record(ok, "case " + std::to_string(i));
    }
    return rec.done();
}

std::vector<std::pair<std::string, PropertyCheck>> all_property_checks() {
    return {
        {"antisymmetry", check_antisymmetry},
        {"swap duality", check_swap_duality},
        {"complement duality", check_complement_duality},
        {"threshold monotonicity", check_threshold_monotonicity},
        {"voting permutation invariance", check_vote_permutation_invariance},
        {"N=1 consistency", check_single_chip_consistency},
        {"X-absorption", check_x_absorption},
        {"vote monotonicity", check_vote_monotonicity},
        {"aging composition", check_aging_composition},
    };
}

}  // namespace imprint::testing
