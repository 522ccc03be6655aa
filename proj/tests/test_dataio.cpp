#include <gtest/gtest.h>

#include <random>

#include "errc.hpp"
#include "imprint/dataio.hpp"
#include "imprint/fileio.hpp"
#include "properties.hpp"
#include "temp_dir.hpp"

using namespace imprint;
using imprint::testing::error_of;

namespace {

TernaryImage ternary_row(std::initializer_list<Ternary> values) {
    TernaryImage img(1, values.size(), Ternary::X);
    std::size_t k = 0;
    for (auto v : values) img[k++] = v;
    return img;
}

}  // namespace

TEST(Pbm, ParsesAsciiExample) {
    const auto img = parse_pbm("P1\n2 2\n1 0\n0 1\n");
    ASSERT_EQ(img.rows(), 2u);
    ASSERT_EQ(img.cols(), 2u);
    EXPECT_EQ(img[0], 1);
    EXPECT_EQ(img[1], 0);
    EXPECT_EQ(img[2], 0);
    EXPECT_EQ(img[3], 1);
}

TEST(Pbm, HandlesCommentsAndPackedDigits) {
    EXPECT_EQ(parse_pbm("P1 # c\n# more\n3 1\n101"), parse_pbm("P1 3 1 1 0 1"));
}

TEST(Pbm, BinaryMatchesAscii) {
    const std::string p4 = std::string("P4\n2 2\n") + static_cast<char>(0x80) + static_cast<char>(0x40);
    EXPECT_EQ(parse_pbm(p4), parse_pbm("P1\n2 2\n1 0\n0 1\n"));
}

TEST(Pbm, RoundTripsBothEncodings) {
    imprint::testing::TempDir dir;
    const auto img = synthetic_content(13, 21);
    for (auto enc : {PbmEncoding::Ascii, PbmEncoding::Binary}) {
        save_pbm(img, dir / "a.pbm", enc);
        const auto loaded = load_pbm(dir / "a.pbm");
        EXPECT_EQ(loaded, img);
        save_pbm(loaded, dir / "b.pbm", enc);
        EXPECT_EQ(read_file(dir / "a.pbm"), read_file(dir / "b.pbm"));
    }
}

TEST(Pbm, DistinctErrors) {
    EXPECT_EQ(error_of([] { parse_pbm("P5\n2 2\n255\n"); }), Errc::unsupported_format);
    EXPECT_EQ(error_of([] { parse_pbm("Q1\n2 2\n"); }), Errc::malformed_header);
    EXPECT_EQ(error_of([] { parse_pbm("P1\n2 x\n"); }), Errc::malformed_header);
    EXPECT_EQ(error_of([] { parse_pbm("P1\n2"); }), Errc::truncated);
    EXPECT_EQ(error_of([] { parse_pbm("P1\n0 2\n"); }), Errc::malformed_header);
    EXPECT_EQ(error_of([] { parse_pbm("P1\n2 2\n1 0 1\n"); }), Errc::truncated);
    EXPECT_EQ(error_of([] { parse_pbm("P4\n9 2\n\x01"); }), Errc::truncated);
    EXPECT_EQ(error_of([] { parse_pbm("P1\n2 1\n1 2\n"); }), Errc::bad_digit);
    EXPECT_EQ(error_of([] { parse_pbm("P1\n100000 1\n"); }), Errc::dimension_overflow);
    EXPECT_EQ(error_of([] { parse_pbm("P1\n99999999999999999999999 1\n"); }), Errc::dimension_overflow);
    EXPECT_EQ(error_of([] { load_pbm("/nonexistent/imprint.pbm"); }), Errc::io_error);
}

TEST(TernaryPgm, GrayLevels) {
    const auto text = format_ternary_pgm(ternary_row({Ternary::Zero, Ternary::One, Ternary::X}));
    EXPECT_EQ(text, "P2\n3 1\n255\n255 0 128\n");
    EXPECT_EQ(format_ternary_pgm(TernaryImage(1, 2, Ternary::X)), "P2\n2 1\n255\n128 128\n");
    EXPECT_EQ(format_ternary_pgm(TernaryImage(1, 2, Ternary::One)), "P2\n2 1\n255\n0 0\n");
}

TEST(TernaryPgm, RoundTripIsByteStable) {
    std::mt19937_64 gen(1);
    TernaryImage img(9, 37, Ternary::X);
    for (auto& v : img.cells()) v = static_cast<Ternary>(gen() % 3);
    const auto text = format_ternary_pgm(img);
    EXPECT_EQ(parse_ternary_pgm(text), img);
    EXPECT_EQ(format_ternary_pgm(parse_ternary_pgm(text)), text);
    EXPECT_EQ(error_of([] { parse_ternary_pgm("P2\n1 1\n255\n7\n"); }), Errc::bad_digit);
    EXPECT_EQ(error_of([] { parse_ternary_pgm("P2\n1 1\n15\n0\n"); }), Errc::malformed_header);
    EXPECT_EQ(error_of([] { parse_ternary_pgm("P2\n2 1\n255\n0\n"); }), Errc::truncated);
}

TEST(TernaryPgm, HypothesisConversion) {
    const auto img = ternary_row({Ternary::Zero, Ternary::One, Ternary::X});
    const auto h = ternary_to_hypothesis(img);
    EXPECT_EQ(h[0], -1);
    EXPECT_EQ(h[1], 1);
    EXPECT_EQ(h[2], 0);
    EXPECT_EQ(hypothesis_to_ternary(h), img);
}

TEST(Dump, FormatLayout) {
    PowerUpDump d("abc", 1, 5, 2);
    d.set_bit(0, 0, true);
    d.set_bit(0, 4, true);
    d.set_bit(1, 3, true);
    const auto text = format_dump(d);
    EXPECT_EQ(text.substr(0, text.find("CRC32")), "IMPRINT-DUMP v1 abc 1 5 2\n88\n10\n");
    EXPECT_EQ(crc32("88\n10\n"), crc32(std::string_view("88\n10\n")));
    char expect[32];
    std::snprintf(expect, sizeof expect, "CRC32 %08x\n", crc32("88\n10\n"));
    EXPECT_EQ(text.substr(text.find("CRC32")), expect);
}

TEST(Dump, Crc32KnownValue) { EXPECT_EQ(crc32("123456789"), 0xcbf43926u); }

TEST(Dump, RandomRoundTrip) {
    imprint::testing::TempDir dir;
    std::mt19937_64 gen(9);
    for (int i = 0; i < 20; ++i) {
        auto d = imprint::testing::random_dump(gen, 1 + gen() % 17, 1 + gen() % 17, 1 + gen() % 12);
        save_dump(d, dir / "a.dump");
        const auto loaded = load_dump(dir / "a.dump");
        EXPECT_EQ(loaded.trials(), d.trials());
        EXPECT_EQ(format_dump(loaded), format_dump(d));
        for (std::size_t m = 0; m < d.trials(); ++m)
            for (std::size_t k = 0; k < d.cells(); ++k) ASSERT_EQ(loaded.bit(m, k), d.bit(m, k));
    }
}

TEST(Dump, CorruptionErrors) {
    std::mt19937_64 gen(2);
    const auto d = imprint::testing::random_dump(gen, 4, 4, 10);
    const auto text = format_dump(d);
    const auto first = text.find('\n') + 1;

    auto bad_digit = text;
    bad_digit[first] = 'z';
    EXPECT_EQ(error_of([&] { parse_dump(bad_digit); }), Errc::bad_digit);

    auto flipped = text;
    flipped[first] = flipped[first] == '0' ? '1' : '0';
    EXPECT_EQ(error_of([&] { parse_dump(flipped); }), Errc::checksum_mismatch);

    // Nine of the ten declared trial lines, checksum line kept.
    const auto last_payload = text.rfind('\n', text.find("CRC32") - 2) + 1;
    const auto nine = text.substr(0, last_payload) + text.substr(text.find("CRC32"));
    EXPECT_EQ(error_of([&] { parse_dump(nine); }), Errc::truncated);
    EXPECT_EQ(error_of([&] { parse_dump(text.substr(0, text.find("CRC32"))); }), Errc::truncated);

    auto long_line = text;
    long_line.insert(first, "0");
    EXPECT_EQ(error_of([&] { parse_dump(long_line); }), Errc::dimension_mismatch);

    EXPECT_EQ(error_of([] { parse_dump("IMPRINT-DUMP v9 a 1 1 1\n0\nCRC32 00000000\n"); }), Errc::unsupported_format);
    EXPECT_EQ(error_of([] { parse_dump("NOT-A-DUMP\n"); }), Errc::malformed_header);
    EXPECT_EQ(error_of([] { parse_dump("IMPRINT-DUMP v1 a 1 1 0\nCRC32 00000000\n"); }), Errc::malformed_header);
}

TEST(Metrics, WorkedExample) {
    RecoveredData rd(1, 4, Ternary::X);
    rd[0] = Ternary::Zero;
    rd[1] = Ternary::One;
    rd[3] = Ternary::One;
    BinaryImage truth(1, 4, 0);
    truth[2] = 1;
    truth[3] = 1;
    const auto m = compute_metrics(rd, truth);
    EXPECT_EQ(m.total_cells, 4u);
    EXPECT_EQ(m.determinate_count, 3u);
    EXPECT_EQ(m.correct_count, 2u);
    EXPECT_DOUBLE_EQ(m.recovery_rate, 0.75);
    EXPECT_DOUBLE_EQ(m.accuracy, 2.0 / 3.0);
    EXPECT_FALSE(m.accuracy_vacuous);
    EXPECT_EQ(m.confusion[0][0], 1u);
    EXPECT_EQ(m.confusion[1][0], 1u);
    EXPECT_EQ(m.confusion[1][1], 1u);
    EXPECT_EQ(m.confusion[0][1], 0u);
}

TEST(Metrics, EdgeCases) {
    const BinaryImage truth = synthetic_content(8, 8);
    const auto none = compute_metrics(RecoveredData(8, 8, Ternary::X), truth);
    EXPECT_EQ(none.recovery_rate, 0.0);
    EXPECT_EQ(none.accuracy, 1.0);
    EXPECT_TRUE(none.accuracy_vacuous);

    RecoveredData exact(8, 8, Ternary::X);
    for (std::size_t k = 0; k < exact.size(); ++k) exact[k] = truth[k] ? Ternary::One : Ternary::Zero;
    const auto all = compute_metrics(exact, truth);
    EXPECT_EQ(all.recovery_rate, 1.0);
    EXPECT_EQ(all.accuracy, 1.0);
    EXPECT_EQ(all.confusion[0][0] + all.confusion[0][1] + all.confusion[1][0] + all.confusion[1][1], 64u);

    EXPECT_EQ(error_of([&] { compute_metrics(RecoveredData(8, 7, Ternary::X), truth); }), Errc::dimension_mismatch);
    EXPECT_FALSE(coverage_metrics(exact).has_truth);
    EXPECT_EQ(coverage_metrics(exact).determinate_count, 64u);
}

TEST(Calibration, ClosedForm) {
    const auto m = calibrate_amplitude(5.0, 0.2);
    EXPECT_NEAR(m.amplitude, 2.5 / std::pow(4.0, 0.2), 1e-12);
    EXPECT_NEAR(m.amplitude, 1.8946, 1e-4);
    EXPECT_NEAR(m.shift(4.0), 2.5, 1e-12);
    EXPECT_DOUBLE_EQ(calibrate_amplitude(4.0, 1.0).amplitude, 0.5);
    EXPECT_EQ(error_of([] { calibrate_amplitude(0.0, 0.2); }), Errc::invalid_argument);
}

TEST(SyntheticContent, MixedAndDeterministic) {
    const auto a = synthetic_content(256, 256);
    EXPECT_EQ(a, synthetic_content(256, 256));
    std::size_t ones = 0;
    for (auto v : a.cells()) ones += v;
    EXPECT_GT(ones, a.size() / 5);
    EXPECT_LT(ones, a.size() * 4 / 5);
}
