#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ctmark/grid.hpp"
#include "ctmark/pgm.hpp"
#include "ctmark/rng.hpp"
#include "doctest.h"
#include "support/synth_images.hpp"

using namespace ctmark;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("grid construction and accessors") {
    Grid2D g(2, 3, 1.5);
    CHECK(g.rows() == 2);
    CHECK(g.cols() == 3);
    CHECK(g.size() == 6);
    CHECK(g(1, 2) == 1.5);
    g(0, 1) = -4.0;
    CHECK(g(0, 1) == -4.0);
    CHECK_THROWS_AS(Grid2D(0, 3), std::invalid_argument);
    CHECK_THROWS_AS(Grid2D(3, -1), std::invalid_argument);

    Grid2D same(2, 3), other(3, 2);
    CHECK(g.same_shape(same));
    CHECK_FALSE(g.same_shape(other));
}

TEST_CASE("validate_finite rejects NaN and infinity") {
    Grid2D g(2, 2, 0.0);
    CHECK_NOTHROW(g.validate_finite("test"));
    g(1, 1) = std::nan("");
    CHECK_THROWS(g.validate_finite("test"));
    g(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS(g.validate_finite("test"));
}

TEST_CASE("image construction") {
    ImageU8 img(3, 2, 7);
    CHECK(img.width == 3);
    CHECK(img.height == 2);
    CHECK(img.pixels.size() == 6);
    CHECK(img.at(1, 2) == 7);
    CHECK_THROWS_AS(ImageU8(0, 4), std::invalid_argument);
}

TEST_CASE("quantize rounds half away from zero and clamps") {
    CHECK(quantize_u8(0.0) == 0);
    CHECK(quantize_u8(127.4) == 127);
    CHECK(quantize_u8(127.5) == 128);
    CHECK(quantize_u8(-3.0) == 0);
    CHECK(quantize_u8(255.49) == 255);
    CHECK(quantize_u8(300.0) == 255);
}

TEST_CASE("grid/image round trip") {
    ImageU8 img = testsupport::random_image_u8(11, 16, 12);
    Grid2D g = to_grid(img);
    CHECK(g.rows() == img.height);
    CHECK(g.cols() == img.width);
    ImageU8 back = to_image_u8(g);
    CHECK(back.pixels == img.pixels);
}

TEST_CASE("psnr identical images hits the infinity sentinel") {
    ImageU8 img = testsupport::random_image_u8(3, 16, 16);
    CHECK(psnr(img, img) == kPsnrInfinity);
}

TEST_CASE("psnr of uniform difference 255 is 0 dB") {
    ImageU8 a(8, 8, 0), b(8, 8, 255);
    CHECK(psnr(a, b) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("psnr of uniform difference 1 matches the closed form") {
    ImageU8 a(8, 8, 100), b(8, 8, 101);
    CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(255.0 * 255.0)).epsilon(1e-9));
    CHECK(psnr(a, b) == doctest::Approx(48.1308).epsilon(1e-4));
}

TEST_CASE("psnr is symmetric and checks dimensions") {
    ImageU8 a = testsupport::random_image_u8(4, 16, 16);
    ImageU8 b = testsupport::random_image_u8(5, 16, 16);
    CHECK(psnr(a, b) == psnr(b, a));
    ImageU8 c(8, 16);
    CHECK_THROWS(psnr(a, c));
}

TEST_CASE("subband energy hand values and homogeneity") {
    Grid2D z(4, 4, 0.0);
    CHECK(subband_energy(z) == 0.0);

    Grid2D g(2, 2);
    g(0, 0) = 1;
    g(0, 1) = 2;
    g(1, 0) = 3;
    g(1, 1) = 4;
    CHECK(subband_energy(g) == doctest::Approx(30.0).epsilon(1e-14));

    Grid2D scaled = g;
    const double c = -2.5;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) scaled(i, j) *= c;
    CHECK(subband_energy(scaled) ==
          doctest::Approx(c * c * subband_energy(g)).epsilon(1e-12));
}

TEST_CASE("sample stats: symmetric two-point data has kurtosis 1") {
    std::vector<double> xs = {1, -1, 1, -1, 1, -1};
    ScalarStats s = sample_stats(xs);
    CHECK(s.mean == doctest::Approx(0.0));
    CHECK(s.variance == doctest::Approx(1.0));
    CHECK(s.kurtosis == doctest::Approx(1.0));
    CHECK(s.n == xs.size());
}

TEST_CASE("sample stats: gaussian kurtosis near 3") {
    KeyedRng rng(97);
    std::vector<double> xs(1000000);
    for (auto& x : xs) x = rng.next_normal();
    ScalarStats s = sample_stats(xs);
    CHECK(s.kurtosis > 2.9);
    CHECK(s.kurtosis < 3.1);
    CHECK(std::fabs(s.mean) < 0.01);
    CHECK(s.variance == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("sample stats: population variance uses 1/n") {
    std::vector<double> xs = {0.0, 2.0};
    ScalarStats s = sample_stats(xs);
    CHECK(s.mean == doctest::Approx(1.0));
    CHECK(s.variance == doctest::Approx(1.0));  // population; sample would be 2
}

TEST_CASE("sample stats error cases") {
    CHECK_THROWS(sample_stats({1.0}));
    CHECK_THROWS(sample_stats({2.0, 2.0, 2.0}));  // zero variance
}

TEST_CASE("kurtosis is at least 1 for random data") {
    for (uint64_t seed = 1; seed <= 8; ++seed) {
        KeyedRng rng(seed);
        std::vector<double> xs(257);
        for (auto& x : xs) x = rng.next_unit() * 10.0 - 3.0;
        CHECK(sample_stats(xs).kurtosis >= 1.0);
    }
}

TEST_CASE("pgm round trip is bit exact") {
    for (uint64_t seed = 0; seed < 4; ++seed) {
        ImageU8 img = testsupport::random_image_u8(100 + seed, 24, 17);
        const std::string path = temp_path("ctmark_rt_" + std::to_string(seed) + ".pgm");
        save_pgm(path, img);
        ImageU8 back = load_pgm(path);
        CHECK(back.width == img.width);
        CHECK(back.height == img.height);
        CHECK(back.pixels == img.pixels);
        std::filesystem::remove(path);
    }
}

TEST_CASE("pgm constant image decodes to constant pixels") {
    ImageU8 img(8, 8, 128);
    const std::string path = temp_path("ctmark_const.pgm");
    save_pgm(path, img);
    ImageU8 back = load_pgm(path);
    REQUIRE(back.pixels.size() == 64);
    for (uint8_t p : back.pixels) CHECK(p == 128);
    std::filesystem::remove(path);
}

TEST_CASE("pgm file size is header plus payload") {
    ImageU8 img = testsupport::random_image_u8(7, 512, 512);
    const std::string path = temp_path("ctmark_size.pgm");
    save_pgm(path, img);
    const auto total = std::filesystem::file_size(path);
    // header is "P5\n512 512\n255\n"
    CHECK(total == std::string("P5\n512 512\n255\n").size() + 512 * 512);
    std::filesystem::remove(path);
}

TEST_CASE("pgm rejects ascii magic, bad maxval, and truncation") {
    const std::string p2 = temp_path("ctmark_bad_p2.pgm");
    {
        std::ofstream out(p2, std::ios::binary);
        out << "P2\n2 2\n255\n1 2 3 4\n";
    }
    CHECK_THROWS_WITH_AS(load_pgm(p2), doctest::Contains("ASCII"), std::runtime_error);
    std::filesystem::remove(p2);

    const std::string badmax = temp_path("ctmark_bad_max.pgm");
    {
        std::ofstream out(badmax, std::ios::binary);
        out << "P5\n2 2\n65535\n";
        out.write("\0\0\0\0\0\0\0\0", 8);
    }
    CHECK_THROWS(load_pgm(badmax));
    std::filesystem::remove(badmax);

    const std::string trunc = temp_path("ctmark_trunc.pgm");
    {
        std::ofstream out(trunc, std::ios::binary);
        out << "P5\n4 4\n255\n";
        out.write("\1\2\3", 3);  // needs 16 bytes
    }
    CHECK_THROWS(load_pgm(trunc));
    std::filesystem::remove(trunc);

    CHECK_THROWS(load_pgm(temp_path("ctmark_does_not_exist.pgm")));
}
