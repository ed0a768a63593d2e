#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "padreg/io.hpp"
#include "test_helpers.hpp"

using namespace padreg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_bytes(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

}  // namespace

TEST_CASE(".flo round trip is bit-exact") {
    TempDir dir("padreg_test_io_flo");
    std::mt19937_64 rng(40);
    // Values representable in float32 survive exactly.
    const VectorField d{test::random_field(7, 11, rng, -5, 5).cast<float>().cast<double>(),
                        test::random_field(7, 11, rng, -5, 5).cast<float>().cast<double>()};
    write_flo(dir.path / "a.flo", d);
    CHECK(fs::file_size(dir.path / "a.flo") == 12u + 8u * 7u * 11u);
    const auto back = read_flo(dir.path / "a.flo");
    CHECK((back.dx == d.dx).all());
    CHECK((back.dy == d.dy).all());

    std::ifstream in(dir.path / "a.flo", std::ios::binary);
    char head[20];
    in.read(head, 20);
    CHECK(std::string(head, 4) == "PIEH");
    std::int32_t w, h;
    float first[2];
    std::memcpy(&w, head + 4, 4);
    std::memcpy(&h, head + 8, 4);
    std::memcpy(first, head + 12, 8);
    CHECK(w == 11);
    CHECK(h == 7);
    CHECK(first[0] == float(d.dy(0, 0)));
    CHECK(first[1] == float(d.dx(0, 0)));

    const StiffnessMap k{d.dx, d.dy};
    write_stiffness_flo(dir.path / "k.flo", k);
    const auto kb = read_stiffness_flo(dir.path / "k.flo");
    CHECK((kb.kx == k.kx).all());
    CHECK((kb.ky == k.ky).all());
}

TEST_CASE("malformed .flo files are rejected") {
    TempDir dir("padreg_test_io_badflo");
    write_bytes(dir.path / "tag.flo", std::string("XIEH") + std::string(8, '\0'));
    CHECK_THROWS_AS(read_flo(dir.path / "tag.flo"), IoError);

    VectorField d = VectorField::zero(3, 3);
    write_flo(dir.path / "ok.flo", d);
    fs::resize_file(dir.path / "ok.flo", 12 + 8 * 9 - 4);
    CHECK_THROWS_AS(read_flo(dir.path / "ok.flo"), IoError);
    CHECK_THROWS_AS(read_flo(dir.path / "missing.flo"), IoError);
}

TEST_CASE("PGM round trips") {
    TempDir dir("padreg_test_io_pgm");
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> u16(0, 65535), u8(0, 255);
    Field<std::uint16_t> wide(5, 9), narrow(5, 9);
    for (Eigen::Index i = 0; i < wide.size(); ++i) {
        wide.data()[i] = std::uint16_t(u16(rng));
        narrow.data()[i] = std::uint16_t(u8(rng));
    }
    write_pgm(dir.path / "w.pgm", wide, 65535);
    write_pgm(dir.path / "n.pgm", narrow, 255);
    CHECK(fs::file_size(dir.path / "n.pgm") < fs::file_size(dir.path / "w.pgm"));
    auto w = read_pgm(dir.path / "w.pgm");
    auto n = read_pgm(dir.path / "n.pgm");
    CHECK(w.maxval == 65535);
    CHECK(n.maxval == 255);
    CHECK((w.values == wide).all());
    CHECK((n.values == narrow).all());

    const ScalarField img = wide.cast<double>() / 65535.0;
    write_pgm_image(dir.path / "i.pgm", img);
    CHECK((read_pgm_image(dir.path / "i.pgm") == img).all());

    LabelMask m = LabelMask::Zero(4, 4);
    m(1, 1) = 1;
    m(2, 3) = 2;
    write_pgm_mask(dir.path / "m.pgm", m);
    CHECK((read_pgm_mask(dir.path / "m.pgm") == m).all());

    Field<std::uint16_t> bad = Field<std::uint16_t>::Zero(2, 2);
    bad(0, 0) = 3;
    write_pgm(dir.path / "bad.pgm", bad, 255);
    CHECK_THROWS_AS(read_pgm_mask(dir.path / "bad.pgm"), IoError);
}

TEST_CASE("PGM header parsing") {
    TempDir dir("padreg_test_io_pgmhdr");
    write_bytes(dir.path / "c.pgm", std::string("P5\n# comment\n2 1\n255\n") + "\x10\x20");
    const auto p = read_pgm(dir.path / "c.pgm");
    CHECK(p.values(0, 0) == 16);
    CHECK(p.values(0, 1) == 32);

    write_bytes(dir.path / "ascii.pgm", "P2\n2 1\n255\n1 2\n");
    CHECK_THROWS_AS(read_pgm(dir.path / "ascii.pgm"), IoError);
    write_bytes(dir.path / "short.pgm", std::string("P5\n2 2\n255\n") + "\x01");
    CHECK_THROWS_AS(read_pgm(dir.path / "short.pgm"), IoError);
    write_bytes(dir.path / "range.pgm", std::string("P5\n1 1\n100\n") + "\x70");
    CHECK_THROWS_AS(read_pgm(dir.path / "range.pgm"), IoError);
}

TEST_CASE("PPM round trip") {
    TempDir dir("padreg_test_io_ppm");
    RgbImage img{3, 4, {}};
    for (int i = 0; i < 36; ++i) img.pixels.push_back(std::uint8_t(i * 7));
    write_ppm(dir.path / "x.ppm", img);
    CHECK(read_ppm(dir.path / "x.ppm") == img);
    write_bytes(dir.path / "bad.ppm", "P5\n1 1\n255\n\x01");
    CHECK_THROWS_AS(read_ppm(dir.path / "bad.ppm"), IoError);
}
