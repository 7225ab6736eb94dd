#include <png.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "cofflow/image.hpp"

namespace cofflow {
namespace {

namespace fs = std::filesystem;

std::vector<unsigned char> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string lower_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

bool is_png(const std::vector<unsigned char>& bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

// --- PGM -------------------------------------------------------------------

class PgmReader {
public:
    PgmReader(const std::vector<unsigned char>& bytes, const fs::path& path)
        : bytes_(bytes), path_(path) {}

    GrayImage read() {
        if (bytes_.size() < 2 || bytes_[0] != 'P' || (bytes_[1] != '2' && bytes_[1] != '5')) {
            throw FormatError("'" + path_.string() + "': unsupported image format");
        }
        const bool ascii = bytes_[1] == '2';
        pos_ = 2;
        const long width = next_int();
        const long height = next_int();
        const long maxval = next_int();
        if (width <= 0 || height <= 0) {
            throw FormatError("'" + path_.string() + "': zero-dimension image");
        }
        if (maxval <= 0 || maxval > 65535) {
            throw FormatError("'" + path_.string() + "': invalid PGM maxval");
        }
        const Size size{static_cast<int>(width), static_cast<int>(height)};
        std::vector<double> data(size.area());
        const auto scale = static_cast<double>(maxval);

        if (ascii) {
            for (auto& v : data) v = clamp_sample(next_int(), maxval) / scale;
        } else {
            ++pos_;  // single whitespace after maxval
            const std::size_t bpp = maxval < 256 ? 1 : 2;
            if (bytes_.size() < pos_ + data.size() * bpp) {
                throw FormatError("'" + path_.string() + "': truncated PGM data");
            }
            for (auto& v : data) {
                long s = bytes_[pos_++];
                if (bpp == 2) s = (s << 8) | bytes_[pos_++];
                v = clamp_sample(s, maxval) / scale;
            }
        }
        return GrayImage(size, std::move(data));
    }

private:
    static double clamp_sample(long s, long maxval) {
        return static_cast<double>(std::clamp(s, 0L, maxval));
    }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long next_int() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw FormatError("'" + path_.string() + "': malformed PGM header or data");
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_++] - '0');
            if (value > 1'000'000'000L) throw FormatError("'" + path_.string() + "': PGM value overflow");
        }
        return value;
    }

    const std::vector<unsigned char>& bytes_;
    const fs::path& path_;
    std::size_t pos_ = 0;
};

void write_pgm(const GrayImage& image, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    std::vector<char> bytes;
    bytes.reserve(image.size().area());
    for (double v : image.pixels().values()) bytes.push_back(static_cast<char>(to_byte(v)));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// --- PNG -------------------------------------------------------------------

struct DecodedPng {
    Size size;
    bool color = false;
    std::vector<std::uint8_t> pixels;  // gray or interleaved rgb
};

DecodedPng decode_png(const std::vector<unsigned char>& bytes, const fs::path& path,
                      bool force_rgb) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw FormatError("'" + path.string() + "': " + image.message);
    }
    DecodedPng out;
    out.color = force_rgb || (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = out.color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (image.width == 0 || image.height == 0) {
        png_image_free(&image);
        throw FormatError("'" + path.string() + "': zero-dimension image");
    }
    out.size = {static_cast<int>(image.width), static_cast<int>(image.height)};
    out.pixels.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        const std::string message = image.message;
        png_image_free(&image);
        throw FormatError("'" + path.string() + "': " + message);
    }
    return out;
}

void write_png(Size size, bool color, const std::uint8_t* pixels, const fs::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(size.width);
    image.height = static_cast<png_uint_32>(size.height);
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels, 0, nullptr)) {
        throw IoError("cannot write '" + path.string() + "': " + image.message);
    }
}

}  // namespace

GrayImage load_image(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("no such file '" + path.string() + "'");
    const auto bytes = read_file(path);
    if (!is_png(bytes)) return PgmReader(bytes, path).read();

    const DecodedPng png = decode_png(bytes, path, false);
    std::vector<double> data(png.size.area());
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = png.color ? luma(png.pixels[3 * i], png.pixels[3 * i + 1], png.pixels[3 * i + 2])
                            : png.pixels[i] / 255.0;
    }
    return GrayImage(png.size, std::move(data));
}

RgbImage load_rgb_image(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("no such file '" + path.string() + "'");
    const auto bytes = read_file(path);
    if (!is_png(bytes)) {
        const GrayImage gray = PgmReader(bytes, path).read();
        RgbImage rgb(gray.size());
        for (int y = 0; y < gray.height(); ++y) {
            for (int x = 0; x < gray.width(); ++x) {
                const auto b = to_byte(gray(x, y));
                rgb.set(x, y, {b, b, b});
            }
        }
        return rgb;
    }
    DecodedPng png = decode_png(bytes, path, true);
    return RgbImage(png.size, std::move(png.pixels));
}

void save_image(const GrayImage& image, const fs::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") {
        std::vector<std::uint8_t> bytes;
        bytes.reserve(image.size().area());
        for (double v : image.pixels().values()) bytes.push_back(to_byte(v));
        write_png(image.size(), false, bytes.data(), path);
    } else if (ext == ".pgm") {
        write_pgm(image, path);
    } else {
        throw InvalidArgument("unsupported output extension '" + ext + "' for gray image");
    }
}

void save_image(const RgbImage& image, const fs::path& path) {
    const std::string ext = lower_extension(path);
    if (ext != ".png") {
        throw InvalidArgument("unsupported output extension '" + ext + "' for rgb image");
    }
    write_png(image.size(), true, image.bytes().data(), path);
}

}  // namespace cofflow
