#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace imprint {

/// Failure categories surfaced by the library. The CLI maps
/// `invalid_argument` to a usage error and everything else to a data error.
enum class Errc {
    invalid_argument,
    dimension_mismatch,
    malformed_header,
    unsupported_format,
    truncated,
    dimension_overflow,
    bad_digit,
    checksum_mismatch,
    duplicate_id,
    not_found,
    io_error,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

}  // namespace imprint
