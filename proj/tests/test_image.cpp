#include <doctest.h>

#include <array>
#include <cmath>

#include "bamc/common.hpp"
#include "bamc/image.hpp"
#include "bamc/rng.hpp"
#include "helpers.hpp"

using namespace bamc;

namespace {

Rgb8Image solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Rgb8Image img;
    img.width = w;
    img.height = h;
    img.data.resize(static_cast<std::size_t>(3) * w * h);
    for (int p = 0; p < w * h; ++p) {
        img.data[3 * p] = r;
        img.data[3 * p + 1] = g;
        img.data[3 * p + 2] = b;
    }
    return img;
}

}  // namespace

TEST_CASE("black and white hit the exact ends of the lightness scale") {
    const auto black = rgb_to_lab(0, 0, 0);
    CHECK(black[0] == 0.0);
    CHECK(black[1] == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
    CHECK(black[2] == doctest::Approx(128.0 / 255.0).epsilon(1e-12));

    const auto white = rgb_to_lab(255, 255, 255);
    CHECK(white[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(white[1] == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
    CHECK(white[2] == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
}

TEST_CASE("mid gray sits on the neutral axis") {
    // Reference values computed with an independent sRGB->Lab implementation
    // (D65, linearization 0.04045/12.92 with exponent 2.4).
    const auto gray = rgb_to_lab(119, 119, 119);
    CHECK(gray[0] == doctest::Approx(0.500344387925).epsilon(1e-9));
    CHECK(gray[1] == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
    CHECK(gray[2] == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
}

TEST_CASE("saturated colors match independently computed Lab references") {
    const auto red = rgb_to_lab(200, 60, 60);
    CHECK(red[0] == doctest::Approx(46.765457552799 / 100.0).epsilon(1e-9));
    CHECK(red[1] == doctest::Approx((55.086681909433 + 128.0) / 255.0).epsilon(1e-9));
    CHECK(red[2] == doctest::Approx((32.323703111501 + 128.0) / 255.0).epsilon(1e-9));

    const auto blue = rgb_to_lab(60, 60, 200);
    CHECK(blue[0] == doctest::Approx(34.724032038079 / 100.0).epsilon(1e-9));
    CHECK(blue[1] == doctest::Approx((44.797642283930 + 128.0) / 255.0).epsilon(1e-9));
    CHECK(blue[2] == doctest::Approx((-72.320168310399 + 128.0) / 255.0).epsilon(1e-9));
}

TEST_CASE("image conversion rejects empty input and stays in [0,1]") {
    CHECK_THROWS_AS(rgb_to_lab(Rgb8Image{}), InvalidInput);

    Rgb8Image bad = solid(4, 4, 10, 20, 30);
    bad.data.pop_back();
    CHECK_THROWS_AS(rgb_to_lab(bad), InvalidInput);

    Rng rng(7);
    Rgb8Image img = solid(8, 8, 0, 0, 0);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    const LabImage lab = rgb_to_lab(img);
    REQUIRE(lab.width == 8);
    REQUIRE(lab.height == 8);
    REQUIRE(lab.data.size() == img.data.size());
    for (double v : lab.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // Per-pixel conversion agrees with the whole-image path.
    const auto one = rgb_to_lab(img.data[0], img.data[1], img.data[2]);
    CHECK(lab.data[0] == one[0]);
    CHECK(lab.data[1] == one[1]);
    CHECK(lab.data[2] == one[2]);
}

TEST_CASE("Lab inversion round-trips every color it declares in gamut") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint8_t r = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        const std::uint8_t g = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        const std::uint8_t b = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        const auto lab = rgb_to_lab(r, g, b);
        std::array<std::uint8_t, 3> back{};
        REQUIRE(lab_to_rgb(lab, back));
        CHECK(back[0] == r);
        CHECK(back[1] == g);
        CHECK(back[2] == b);
    }
    // L*=50 with extreme a*/b* is far outside sRGB.
    std::array<std::uint8_t, 3> out{};
    CHECK_FALSE(lab_to_rgb({0.5, 1.0, 0.0}, out));
}

TEST_CASE("PNG round trip preserves bytes and encoding is byte-stable") {
    testutil::TempDir tmp("image");
    Rng rng(3);

    Rgb8Image img = solid(13, 9, 0, 0, 0);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    save_png(img, tmp.str("rgb.png"));
    const Rgb8Image rgb_back = load_rgb8(tmp.str("rgb.png"));
    REQUIRE(rgb_back.width == img.width);
    REQUIRE(rgb_back.height == img.height);
    CHECK(rgb_back.data == img.data);

    GrayImage8 gray;
    gray.width = 10;
    gray.height = 7;
    gray.data.resize(70);
    for (auto& v : gray.data) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    save_png(gray, tmp.str("gray.png"));
    const GrayImage8 gray_back = load_gray8(tmp.str("gray.png"));
    REQUIRE(gray_back.width == 10);
    REQUIRE(gray_back.height == 7);
    CHECK(gray_back.data == gray.data);

    save_png(gray, tmp.str("gray2.png"));
    CHECK(testutil::read_file(tmp.str("gray.png")) == testutil::read_file(tmp.str("gray2.png")));
}

TEST_CASE("16-bit label dump is a real 16-bit PNG") {
    testutil::TempDir tmp("image16");
    std::vector<std::uint16_t> labels = {0, 1, 2, 300, 40000, 5, 6, 7};
    save_png16(labels, 4, 2, tmp.str("labels.png"));
    const std::string bytes = testutil::read_file(tmp.str("labels.png"));
    REQUIRE(bytes.size() > 24);
    const unsigned char sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    for (int i = 0; i < 8; ++i) CHECK(static_cast<unsigned char>(bytes[i]) == sig[i]);
    CHECK(static_cast<unsigned char>(bytes[24]) == 16);  // IHDR bit depth field
}

TEST_CASE("decode failures name the file") {
    testutil::TempDir tmp("decode");
    CHECK_THROWS_AS(load_rgb8(tmp.str("missing.png")), DecodeError);

    std::ofstream out(tmp.str("garbage.png"), std::ios::binary);
    out << "not a png at all";
    out.close();
    CHECK_THROWS_WITH_AS(load_rgb8(tmp.str("garbage.png")),
                         doctest::Contains("garbage.png"), DecodeError);
    CHECK_THROWS_AS(load_gray8(tmp.str("garbage.png")), DecodeError);
}
