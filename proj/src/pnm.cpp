#include <cctype>
#include <charconv>
#include <string>

#include "imprint/dataio.hpp"
#include "imprint/error.hpp"
#include "imprint/fileio.hpp"

namespace imprint {

namespace {

// Cursor over a netpbm header: whitespace and '#' comments separate tokens.
class PnmReader {
  public:
    explicit PnmReader(const std::string& bytes) : bytes_(bytes) {}

    void skip_separators() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                return;
            }
        }
    }

    std::string_view magic() {
        if (bytes_.size() < 2 || bytes_[0] != 'P' || !std::isdigit(static_cast<unsigned char>(bytes_[1]))) {
            throw Error(Errc::malformed_header, "missing netpbm magic number");
        }
        if (bytes_.size() > 2 && !std::isspace(static_cast<unsigned char>(bytes_[2])) && bytes_[2] != '#') {
            throw Error(Errc::malformed_header, "magic number must be followed by whitespace");
        }
        pos_ = 2;
        return std::string_view(bytes_).substr(0, 2);
    }

    std::size_t dimension(std::string_view what, std::size_t limit) {
        skip_separators();
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
        if (pos_ == start) {
            if (pos_ >= bytes_.size()) throw Error(Errc::truncated, "header ends before " + std::string(what));
            throw Error(Errc::malformed_header, "expected " + std::string(what));
        }
        if (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])) && bytes_[pos_] != '#') {
            throw Error(Errc::malformed_header, "garbage after " + std::string(what));
        }
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(bytes_.data() + start, bytes_.data() + pos_, value);
        if (ec == std::errc::result_out_of_range || value > limit) {
            throw Error(Errc::dimension_overflow, std::string(what) + " exceeds " + std::to_string(limit));
        }
        if (value == 0) throw Error(Errc::malformed_header, std::string(what) + " must be positive");
        return value;
    }

    /// Consumes the single whitespace byte that ends a binary header.
    void end_binary_header() {
        if (pos_ >= bytes_.size()) throw Error(Errc::truncated, "no raster after header");
        if (!std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            throw Error(Errc::malformed_header, "header must end with one whitespace byte");
        }
        ++pos_;
    }

    std::size_t pos() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    unsigned char byte_at(std::size_t i) const { return static_cast<unsigned char>(bytes_[i]); }
    bool at_end() const noexcept { return pos_ >= bytes_.size(); }
    char peek() const { return bytes_[pos_]; }
    void advance() { ++pos_; }

  private:
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

void check_cells(std::size_t width, std::size_t height) {
    if (width * height > kMaxImageCells) {
        throw Error(Errc::dimension_overflow, "image has more than " + std::to_string(kMaxImageCells) + " pixels");
    }
}

}  // namespace

BinaryImage parse_pbm(const std::string& bytes) {
    PnmReader in(bytes);
    const auto magic = in.magic();
    if (magic == "P2" || magic == "P3" || magic == "P5" || magic == "P6" || magic == "P7") {
        throw Error(Errc::unsupported_format, "unsupported netpbm type " + std::string(magic) + "; expected P1 or P4");
    }
    if (magic != "P1" && magic != "P4") throw Error(Errc::malformed_header, "unknown magic " + std::string(magic));

    const std::size_t width = in.dimension("width", kMaxImageSide);
    const std::size_t height = in.dimension("height", kMaxImageSide);
    check_cells(width, height);
    BinaryImage img(height, width, 0);

    if (magic == "P1") {
        std::size_t k = 0;
        while (k < img.size()) {
            in.skip_separators();
            if (in.at_end()) {
                throw Error(Errc::truncated, "P1 raster holds " + std::to_string(k) + " of " +
                                                 std::to_string(img.size()) + " pixels");
            }
            const char c = in.peek();
            if (c != '0' && c != '1') throw Error(Errc::bad_digit, std::string("invalid P1 pixel '") + c + "'");
            img[k++] = c == '1' ? 1 : 0;
            in.advance();
        }
        return img;
    }

    in.end_binary_header();
    const std::size_t stride = (width + 7) / 8;
    if (in.remaining() < stride * height) {
        throw Error(Errc::truncated, "P4 raster holds " + std::to_string(in.remaining()) + " of " +
                                         std::to_string(stride * height) + " bytes");
    }
    const std::size_t base = in.pos();
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            const unsigned char byte = in.byte_at(base + r * stride + c / 8);
            img(r, c) = (byte >> (7 - c % 8)) & 1;
        }
    }
    return img;
}

std::string format_pbm(const BinaryImage& img, PbmEncoding encoding) {
    if (img.size() == 0) throw Error(Errc::invalid_argument, "cannot encode an empty image");
    std::string out = std::string(encoding == PbmEncoding::Ascii ? "P1" : "P4") + "\n" + std::to_string(img.cols()) +
                      " " + std::to_string(img.rows()) + "\n";
    if (encoding == PbmEncoding::Ascii) {
        for (std::size_t r = 0; r < img.rows(); ++r) {
            for (std::size_t c = 0; c < img.cols(); ++c) {
                if (c > 0 && c % 70 == 0) out += '\n';
                out += img(r, c) ? '1' : '0';
            }
            out += '\n';
        }
        return out;
    }
    const std::size_t stride = (img.cols() + 7) / 8;
    for (std::size_t r = 0; r < img.rows(); ++r) {
        std::string row(stride, '\0');
        for (std::size_t c = 0; c < img.cols(); ++c) {
            if (img(r, c)) row[c / 8] = static_cast<char>(row[c / 8] | (0x80 >> (c % 8)));
        }
        out += row;
    }
    return out;
}

BinaryImage load_pbm(const std::filesystem::path& path) { return parse_pbm(read_file(path)); }

void save_pbm(const BinaryImage& img, const std::filesystem::path& path, PbmEncoding encoding) {
    write_file_atomic(path, format_pbm(img, encoding));
}

std::string format_ternary_pgm(const TernaryImage& img) {
    if (img.size() == 0) throw Error(Errc::invalid_argument, "cannot encode an empty image");
    std::string out = "P2\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
    for (std::size_t k = 0; k < img.size(); ++k) {
        switch (img[k]) {
            case Ternary::One: out += "0"; break;
            case Ternary::Zero: out += "255"; break;
            case Ternary::X: out += "128"; break;
        }
        out += (k % 16 == 15 || k + 1 == img.size()) ? '\n' : ' ';
    }
    return out;
}

TernaryImage parse_ternary_pgm(const std::string& bytes) {
    PnmReader in(bytes);
    const auto magic = in.magic();
    if (magic != "P2") throw Error(Errc::unsupported_format, "ternary images are P2 graymaps, got " + std::string(magic));
    const std::size_t width = in.dimension("width", kMaxImageSide);
    const std::size_t height = in.dimension("height", kMaxImageSide);
    check_cells(width, height);
    const std::size_t maxval = in.dimension("maxval", 65535);
    if (maxval != 255) throw Error(Errc::malformed_header, "ternary images use maxval 255");

    TernaryImage img(height, width, Ternary::X);
    for (std::size_t k = 0; k < img.size(); ++k) {
        in.skip_separators();
        if (in.at_end()) {
            throw Error(Errc::truncated, "P2 raster holds " + std::to_string(k) + " of " + std::to_string(img.size()) +
                                             " pixels");
        }
        std::string token;
        while (!in.at_end() && !std::isspace(static_cast<unsigned char>(in.peek()))) {
            token += in.peek();
            in.advance();
        }
        if (token == "0") {
            img[k] = Ternary::One;
        } else if (token == "255") {
            img[k] = Ternary::Zero;
        } else if (token == "128") {
            img[k] = Ternary::X;
        } else {
            throw Error(Errc::bad_digit, "pixel '" + token + "' is not one of 0, 128, 255");
        }
    }
    return img;
}

void save_ternary_pgm(const TernaryImage& img, const std::filesystem::path& path) {
    write_file_atomic(path, format_ternary_pgm(img));
}

TernaryImage load_ternary_pgm(const std::filesystem::path& path) { return parse_ternary_pgm(read_file(path)); }

HypothesisArray ternary_to_hypothesis(const TernaryImage& img) {
    HypothesisArray h(img.rows(), img.cols(), 0);
    for (std::size_t k = 0; k < img.size(); ++k) {
        if (img[k] == Ternary::One) {
            h[k] = 1;
        } else if (img[k] == Ternary::Zero) {
            h[k] = -1;
        }
    }
    return h;
}

}  // namespace imprint
