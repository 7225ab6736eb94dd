#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "cofflow/flow.hpp"

namespace cofflow {
namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const std::vector<unsigned char>& in, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
    return v;
}

void put_f32(std::vector<unsigned char>& out, double value) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(value)));
}

double get_f32(const std::vector<unsigned char>& in, std::size_t at) {
    return static_cast<double>(std::bit_cast<float>(get_u32(in, at)));
}

}  // namespace

std::vector<unsigned char> encode_flo(const FlowField& flow) {
    if (flow.width() <= 0 || flow.height() <= 0) throw DimensionError("cannot encode an empty flow field");
    std::vector<unsigned char> out;
    out.reserve(12 + flow.size().area() * 8);
    put_u32(out, std::bit_cast<std::uint32_t>(kFloTag));
    put_u32(out, static_cast<std::uint32_t>(flow.width()));
    put_u32(out, static_cast<std::uint32_t>(flow.height()));
    for (int y = 0; y < flow.height(); ++y) {
        for (int x = 0; x < flow.width(); ++x) {
            put_f32(out, flow.u(x, y));
            put_f32(out, flow.v(x, y));
        }
    }
    return out;
}

FlowField decode_flo(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 12) throw FormatError(".flo data shorter than its 12-byte header");
    if (std::bit_cast<float>(get_u32(bytes, 0)) != kFloTag) {
        throw FormatError(".flo tag mismatch (expected PIEH / 202021.25)");
    }
    const auto width = static_cast<std::int32_t>(get_u32(bytes, 4));
    const auto height = static_cast<std::int32_t>(get_u32(bytes, 8));
    if (width <= 0 || height <= 0 || width > (1 << 16) || height > (1 << 16)) {
        throw FormatError(".flo has invalid dimensions");
    }
    const Size size{width, height};
    if (bytes.size() != 12 + size.area() * 8) throw FormatError(".flo payload length mismatch");

    FlowField flow(size);
    std::size_t at = 12;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            flow.u(x, y) = get_f32(bytes, at);
            flow.v(x, y) = get_f32(bytes, at + 4);
            at += 8;
        }
    }
    if (!flow.finite()) throw FormatError(".flo contains non-finite values");
    return flow;
}

void write_flo(const FlowField& flow, const std::filesystem::path& path) {
    const auto bytes = encode_flo(flow);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

FlowField read_flo(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                           std::istreambuf_iterator<char>()};
    try {
        return decode_flo(bytes);
    } catch (const FormatError& e) {
        throw FormatError("'" + path.string() + "': " + e.what());
    }
}

}  // namespace cofflow
