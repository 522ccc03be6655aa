#include "imprint/error.hpp"

namespace imprint {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return "invalid argument";
        case Errc::dimension_mismatch: return "dimension mismatch";
        case Errc::malformed_header: return "malformed header";
        case Errc::unsupported_format: return "unsupported format";
        case Errc::truncated: return "truncated payload";
        case Errc::dimension_overflow: return "dimension overflow";
        case Errc::bad_digit: return "bad digit";
        case Errc::checksum_mismatch: return "checksum mismatch";
        case Errc::duplicate_id: return "duplicate id";
        case Errc::not_found: return "not found";
        case Errc::io_error: return "i/o error";
    }
    return "unknown";
}

}  // namespace imprint
