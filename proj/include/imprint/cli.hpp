#pragma once

// Command-line front end. Subcommands follow the attack workflow:
//   gen-chips      fresh chips, IPU dumps, enrollment database
//   age            age chips with an image; FPU dump per checkpoint
//   enroll, match  database maintenance and chip identification
//   recover        single-chip partial retrieval
//   recover-multi  identify each FPU dump, retrieve, and majority-vote
//   report         tabulate metrics files
//   experiment     the whole grid in memory
//
// Exit codes: 0 success, 1 usage error, 2 data or format error.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "imprint/dataio.hpp"

namespace imprint {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct MetricsReport {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string hours = "NA";
    std::size_t chips = 1;
    RecoveryMetrics metrics;
};

std::string format_metrics_report(const MetricsReport& report);
MetricsReport parse_metrics_report(const std::string& text);

/// Tab-separated (hours, chips, recovery_rate, accuracy) table with header.
/// Throws Error(dimension_mismatch) if the reports disagree on rows/cols.
std::string format_report_table(const std::vector<MetricsReport>& reports);

}  // namespace imprint
