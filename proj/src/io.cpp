#include "padreg/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace padreg {

namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

// Netpbm header: magic, then whitespace/comment separated integers, then a
// single whitespace byte before the raster.
class NetpbmHeader {
public:
    NetpbmHeader(const std::vector<std::uint8_t>& bytes, const char* magic, const std::filesystem::path& path)
        : bytes_(bytes), path_(path) {
        if (bytes.size() < 2 || bytes[0] != magic[0] || bytes[1] != magic[1])
            throw IoError(path.string() + ": not a " + magic + " file");
        pos_ = 2;
    }

    long next_int() {
        skip_space();
        long v = 0;
        bool any = false;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_++] - '0');
            any = true;
            if (v > (1L << 30)) break;
        }
        if (!any) throw IoError(path_.string() + ": malformed header");
        return v;
    }

    std::size_t raster_start() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw IoError(path_.string() + ": malformed header");
        return pos_ + 1;
    }

private:
    void skip_space() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<std::uint8_t>& bytes_;
    const std::filesystem::path& path_;
    std::size_t pos_ = 0;
};

void append(std::vector<std::uint8_t>& out, const std::string& s) { out.insert(out.end(), s.begin(), s.end()); }

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

void put_f32_le(std::vector<std::uint8_t>& out, double v) {
    put_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

double get_f32_le(const std::uint8_t* p) { return std::bit_cast<float>(get_u32_le(p)); }

constexpr char kFloMagic[4] = {'P', 'I', 'E', 'H'};

std::pair<Field<double>, Field<double>> read_flo_components(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    if (bytes.size() < 12 || std::memcmp(bytes.data(), kFloMagic, 4) != 0)
        throw IoError(path.string() + ": not a .flo file");
    const auto w = static_cast<std::int32_t>(get_u32_le(bytes.data() + 4));
    const auto h = static_cast<std::int32_t>(get_u32_le(bytes.data() + 8));
    if (w <= 0 || h <= 0 || w > (1 << 20) || h > (1 << 20)) throw IoError(path.string() + ": bad .flo dimensions");
    if (bytes.size() != 12 + 8 * std::size_t(w) * std::size_t(h))
        throw IoError(path.string() + ": .flo length does not match its dimensions");
    Field<double> horizontal(h, w), vertical(h, w);
    const std::uint8_t* p = bytes.data() + 12;
    for (Eigen::Index i = 0; i < horizontal.size(); ++i, p += 8) {
        horizontal.data()[i] = get_f32_le(p);
        vertical.data()[i] = get_f32_le(p + 4);
    }
    return {std::move(horizontal), std::move(vertical)};
}

void write_flo_components(const std::filesystem::path& path, const ScalarField& horizontal,
                          const ScalarField& vertical) {
    require_same_shape(horizontal, vertical, "write_flo");
    std::vector<std::uint8_t> out(kFloMagic, kFloMagic + 4);
    out.reserve(12 + 8 * static_cast<std::size_t>(horizontal.size()));
    put_u32_le(out, static_cast<std::uint32_t>(horizontal.cols()));
    put_u32_le(out, static_cast<std::uint32_t>(horizontal.rows()));
    for (Eigen::Index i = 0; i < horizontal.size(); ++i) {
        put_f32_le(out, horizontal.data()[i]);
        put_f32_le(out, vertical.data()[i]);
    }
    write_all(path, out);
}

}  // namespace

PgmData read_pgm(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    NetpbmHeader hdr(bytes, "P5", path);
    const long w = hdr.next_int(), h = hdr.next_int(), maxval = hdr.next_int();
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw IoError(path.string() + ": bad PGM header values");
    const std::size_t start = hdr.raster_start();
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    if (bytes.size() < start + bpp * std::size_t(w) * std::size_t(h)) throw IoError(path.string() + ": truncated PGM");
    PgmData out{Field<std::uint16_t>(h, w), static_cast<int>(maxval)};
    const std::uint8_t* p = bytes.data() + start;
    for (Eigen::Index i = 0; i < out.values.size(); ++i, p += bpp) {
        const std::uint16_t v = bpp == 2 ? static_cast<std::uint16_t>((p[0] << 8) | p[1]) : p[0];
        if (v > maxval) throw IoError(path.string() + ": sample exceeds maxval");
        out.values.data()[i] = v;
    }
    return out;
}

void write_pgm(const std::filesystem::path& path, const Field<std::uint16_t>& values, int maxval) {
    if (maxval <= 0 || maxval > 65535) throw IoError("write_pgm: maxval must lie in [1, 65535]");
    std::vector<std::uint8_t> out;
    append(out, "P5\n" + std::to_string(values.cols()) + " " + std::to_string(values.rows()) + "\n" +
                    std::to_string(maxval) + "\n");
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const std::uint16_t v = values.data()[i];
        if (v > maxval) throw IoError("write_pgm: sample exceeds maxval");
        if (maxval > 255) out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
    write_all(path, out);
}

ScalarField read_pgm_image(const std::filesystem::path& path) {
    const PgmData pgm = read_pgm(path);
    return pgm.values.cast<double>() / double(pgm.maxval);
}

void write_pgm_image(const std::filesystem::path& path, const ScalarField& image, int maxval) {
    if (!all_finite(image)) throw IoError("write_pgm_image: image has non-finite values");
    Field<std::uint16_t> q(image.rows(), image.cols());
    for (Eigen::Index i = 0; i < image.size(); ++i)
        q.data()[i] = static_cast<std::uint16_t>(std::lround(std::clamp(image.data()[i], 0.0, 1.0) * maxval));
    write_pgm(path, q, maxval);
}

LabelMask read_pgm_mask(const std::filesystem::path& path) {
    const PgmData pgm = read_pgm(path);
    if (pgm.values.size() > 0 && pgm.values.maxCoeff() > 2)
        throw IoError(path.string() + ": mask labels must be 0, 1 or 2");
    return pgm.values.cast<std::uint8_t>();
}

void write_pgm_mask(const std::filesystem::path& path, const LabelMask& mask) {
    write_pgm(path, mask.cast<std::uint16_t>(), 255);
}

VectorField read_flo(const std::filesystem::path& path) {
    auto [horizontal, vertical] = read_flo_components(path);
    return {std::move(vertical), std::move(horizontal)};
}

void write_flo(const std::filesystem::path& path, const VectorField& field) {
    write_flo_components(path, field.dy, field.dx);
}

StiffnessMap read_stiffness_flo(const std::filesystem::path& path) {
    auto [horizontal, vertical] = read_flo_components(path);
    return {std::move(vertical), std::move(horizontal)};
}

void write_stiffness_flo(const std::filesystem::path& path, const StiffnessMap& k) {
    write_flo_components(path, k.ky, k.kx);
}

RgbImage read_ppm(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    NetpbmHeader hdr(bytes, "P6", path);
    const long w = hdr.next_int(), h = hdr.next_int(), maxval = hdr.next_int();
    if (w <= 0 || h <= 0 || maxval != 255) throw IoError(path.string() + ": only 8-bit P6 files are supported");
    const std::size_t start = hdr.raster_start();
    const std::size_t n = 3 * std::size_t(w) * std::size_t(h);
    if (bytes.size() < start + n) throw IoError(path.string() + ": truncated PPM");
    return {static_cast<int>(h), static_cast<int>(w), {bytes.begin() + start, bytes.begin() + start + n}};
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image) {
    if (image.pixels.size() != 3 * static_cast<std::size_t>(image.width) * image.height)
        throw IoError("write_ppm: pixel buffer does not match dimensions");
    std::vector<std::uint8_t> out;
    append(out, "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n");
    out.insert(out.end(), image.pixels.begin(), image.pixels.end());
    write_all(path, out);
}

}  // namespace padreg
