#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "fixtures.hpp"
#include "lrfr/error.hpp"
#include "lrfr/image.hpp"

using namespace lrfr;

namespace {

// Independent box-filter oracle for integer shrink factors: exact integer
// block sums, then round half up.
ImageBuffer block_average(const ImageBuffer& img, int factor) {
    ImageBuffer out(img.width() / factor, img.height() / factor, img.channels());
    const int n = factor * factor;
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            for (int c = 0; c < img.channels(); ++c) {
                int sum = 0;
                for (int dy = 0; dy < factor; ++dy)
                    for (int dx = 0; dx < factor; ++dx) sum += img.at(x * factor + dx, y * factor + dy, c);
                out.at(x, y, c) = static_cast<std::uint8_t>((2 * sum + n) / (2 * n));
            }
    return out;
}

double mean_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.pixels().size(); ++i) s += std::abs(int(a.pixels()[i]) - int(b.pixels()[i]));
    return s / static_cast<double>(a.pixels().size());
}

}  // namespace

TEST_CASE("ImageBuffer invariants") {
    CHECK_THROWS_AS(ImageBuffer(0, 5, 1), Error);
    CHECK_THROWS_AS(ImageBuffer(5, 5, 2), Error);
    CHECK_THROWS_AS(ImageBuffer(2, 2, 1, std::vector<std::uint8_t>(3)), Error);
    const ImageBuffer img(3, 2, 3);
    CHECK(img.pixels().size() == 18);
}

TEST_CASE("same-size area and bilinear resizes are identities") {
    const ImageBuffer img = testing::textured_image(224, 224, 3, 9);
    CHECK(resize(img, 224, 224, ResizeKernel::Bilinear) == img);
    CHECK(resize(img, 224, 224, ResizeKernel::Area) == img);
    CHECK(resize(img, 224, 224, ResizeKernel::Bicubic) == img);
}

TEST_CASE("2x2 {0,0,255,255} area-averages to 128") {
    // Hand oracle: (0 + 0 + 255 + 255) / 4 = 127.5, rounded half up.
    for (int ch : {1, 3}) {
        ImageBuffer img(2, 2, ch);
        for (int c = 0; c < ch; ++c) {
            img.at(0, 0, c) = 0;
            img.at(1, 0, c) = 0;
            img.at(0, 1, c) = 255;
            img.at(1, 1, c) = 255;
        }
        const ImageBuffer out = resize(img, 1, 1, ResizeKernel::Area);
        for (int c = 0; c < ch; ++c) CHECK(out.at(0, 0, c) == 128);
    }
}

TEST_CASE("area kernel agrees with an exact block-average oracle") {
    for (int factor : {2, 3, 4, 7}) {
        const ImageBuffer img = testing::textured_image(21 * factor, 14 * factor, 3, 100 + factor);
        const ImageBuffer got = resize(img, 21, 14, ResizeKernel::Area);
        const ImageBuffer want = block_average(img, factor);
        std::size_t exact = 0;
        for (std::size_t i = 0; i < got.pixels().size(); ++i) {
            const int d = std::abs(int(got.pixels()[i]) - int(want.pixels()[i]));
            CHECK(d <= 1);
            exact += d == 0;
        }
        // Only float ties at exactly .5 may land on the other side.
        CHECK(exact >= got.pixels().size() * 99 / 100);
    }
}

TEST_CASE("constant images survive every kernel and size") {
    for (std::uint8_t v : {std::uint8_t(0), std::uint8_t(1), std::uint8_t(128), std::uint8_t(254), std::uint8_t(255)}) {
        const ImageBuffer img = ImageBuffer::filled(64, 48, 3, v);
        for (auto k : {ResizeKernel::Area, ResizeKernel::Bilinear, ResizeKernel::Bicubic}) {
            for (auto [w, h] : {std::pair{32, 32}, std::pair{7, 13}, std::pair{224, 224}, std::pair{65, 1}}) {
                const ImageBuffer out = resize(img, w, h, k);
                CHECK(out.width() == w);
                CHECK(out.height() == h);
                CHECK(std::all_of(out.pixels().begin(), out.pixels().end(), [&](auto p) { return p == v; }));
            }
        }
        const ImageBuffer m = match_resolution(img, 24, 112);
        CHECK(std::all_of(m.pixels().begin(), m.pixels().end(), [&](auto p) { return p == v; }));
    }
}

TEST_CASE("property: area outputs stay within the input range") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 1 + static_cast<int>(rng() % 80);
        const int h = 1 + static_cast<int>(rng() % 80);
        ImageBuffer img(w, h, 1);
        std::uniform_int_distribution<int> lo(0, 120);
        const int base = lo(rng);
        std::uniform_int_distribution<int> px(base, base + 100);
        for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(px(rng));
        const auto [mn, mx] = std::minmax_element(img.pixels().begin(), img.pixels().end());
        const ImageBuffer out = resize(img, 1 + static_cast<int>(rng() % 100), 1 + static_cast<int>(rng() % 100),
                                       ResizeKernel::Area);
        for (auto p : out.pixels()) {
            CHECK(p >= *mn);
            CHECK(p <= *mx);
        }
    }
}

TEST_CASE("resize rejects empty targets") {
    const ImageBuffer img = ImageBuffer::filled(4, 4, 1, 0);
    try {
        resize(img, 0, 4, ResizeKernel::Area);
        FAIL("expected InvalidDims");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidDims);
    }
    CHECK_THROWS_AS(match_resolution(img, 0, 224), Error);
}

TEST_CASE("match_resolution is downsample-area then upsample-bicubic") {
    const ImageBuffer face = testing::textured_image(224, 224, 3, 17);
    for (int t : {24, 32, 40, 48, 64}) {
        MatchDiagnostics diag;
        const ImageBuffer out = match_resolution(face, t, 224, &diag);
        CHECK(out.width() == 224);
        CHECK(out.height() == 224);
        CHECK_FALSE(diag.upscaled_as_match);
        const ImageBuffer composed =
            resize(resize(face, t, t, ResizeKernel::Area), 224, 224, ResizeKernel::Bicubic);
        CHECK(out == composed);
    }
    // The 224x224 output is exactly the 32x32 bottleneck blown back up.
    const ImageBuffer small = resize(face, 32, 32, ResizeKernel::Area);
    CHECK(match_resolution(face, 32, 224) == resize(small, 224, 224, ResizeKernel::Bicubic));
}

TEST_CASE("match_resolution with target == source == input size is a no-op") {
    const ImageBuffer face = testing::textured_image(112, 112, 3, 5);
    CHECK(match_resolution(face, 112, 112) == face);
}

TEST_CASE("match_resolution flags targets that would upscale") {
    const ImageBuffer face = testing::textured_image(40, 40, 3, 5);
    MatchDiagnostics diag;
    const ImageBuffer out = match_resolution(face, 64, 112, &diag);
    CHECK(diag.upscaled_as_match);
    CHECK(out.width() == 112);
}

TEST_CASE("lower matched resolution loses at least as much detail") {
    const ImageBuffer face = testing::textured_image(224, 224, 3, 23);
    double previous = 1e9;
    for (int t : {24, 32, 40, 48, 64, 112, 224}) {
        const double d = mean_abs_diff(match_resolution(face, t, 224), face);
        CHECK(d <= previous);
        previous = d;
    }
    CHECK(previous == 0.0);
}

TEST_CASE("to_grayscale luma") {
    ImageBuffer img(3, 1, 3);
    const std::uint8_t px[3][3] = {{255, 255, 255}, {255, 0, 0}, {0, 0, 0}};
    for (int x = 0; x < 3; ++x)
        for (int c = 0; c < 3; ++c) img.at(x, 0, c) = px[x][c];
    const ImageBuffer g = to_grayscale(img);
    REQUIRE(g.channels() == 1);
    CHECK(g.at(0, 0, 0) == 255);
    CHECK(g.at(1, 0, 0) == 76);  // 0.299 * 255 = 76.245
    CHECK(g.at(2, 0, 0) == 0);

    const ImageBuffer gray = testing::textured_image(10, 10, 1, 3);
    CHECK(to_grayscale(gray) == gray);
}

TEST_CASE("to_grayscale matches a double-precision oracle") {
    std::mt19937_64 rng(8);
    ImageBuffer img(64, 64, 3);
    for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng());
    const ImageBuffer g = to_grayscale(img);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            const double l = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
            // At exact .5 ties the double sum itself may sit a hair below.
            const bool tie = std::abs(l - std::floor(l) - 0.5) < 1e-9;
            CHECK(std::abs(g.at(x, y, 0) - std::floor(l + 0.5)) <= (tie ? 1.0 : 0.0));
            if (tie) CHECK(g.at(x, y, 0) == std::ceil(l - 1e-9));
        }
}

TEST_CASE("determinism: repeated resizes are bit-identical") {
    const ImageBuffer img = testing::textured_image(97, 61, 3, 31);
    for (auto k : {ResizeKernel::Area, ResizeKernel::Bilinear, ResizeKernel::Bicubic}) {
        CHECK(resize(img, 224, 224, k) == resize(img, 224, 224, k));
        CHECK(resize(img, 13, 29, k) == resize(img, 13, 29, k));
    }
}

TEST_CASE("PNG round trip is lossless; JPEG decodes") {
    const auto dir = testing::scratch_dir("image_io");
    for (int ch : {1, 3}) {
        const ImageBuffer img = testing::textured_image(33, 20, ch, 12);
        write_png(img, dir / ("x" + std::to_string(ch) + ".png"));
        CHECK(read_image(dir / ("x" + std::to_string(ch) + ".png")) == img);
    }

    cv::Mat bgr(16, 24, CV_8UC3, cv::Scalar(10, 20, 200));
    REQUIRE(cv::imwrite((dir / "red.jpg").string(), bgr));
    const ImageBuffer jpg = read_image(dir / "red.jpg");
    CHECK(jpg.width() == 24);
    CHECK(jpg.height() == 16);
    CHECK(std::abs(jpg.at(5, 5, 0) - 200) <= 3);  // RGB order after decode
    CHECK(std::abs(jpg.at(5, 5, 2) - 10) <= 3);

    try {
        read_image(dir / "missing.png");
        FAIL("expected DecodeError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DecodeError);
    }
}
