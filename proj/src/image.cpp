#include "lrfr/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrfr/error.hpp"

namespace lrfr {

namespace {

void check_dims(int width, int height, int channels) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidDims, "image dimensions must be at least 1x1, got " +
                                                std::to_string(width) + "x" + std::to_string(height));
    }
    if (channels != 1 && channels != 3) {
        throw Error(ErrorCode::InvalidDims, "channels must be 1 or 3, got " + std::to_string(channels));
    }
}

// One output sample = sum of weight * source[index] over its taps.
struct Tap {
    int index;
    float weight;
};

struct TapTable {
    std::vector<std::size_t> offsets;  // size out + 1
    std::vector<Tap> taps;
};

TapTable area_taps(int in, int out) {
    TapTable t;
    t.offsets.push_back(0);
    const double scale = static_cast<double>(in) / out;
    for (int i = 0; i < out; ++i) {
        const double start = i * scale;
        const double end = std::min<double>((i + 1) * scale, in);
        const int first = static_cast<int>(std::floor(start));
        const int last = std::min(in - 1, static_cast<int>(std::ceil(end)) - 1);
        for (int j = first; j <= last; ++j) {
            const double overlap = std::min<double>(end, j + 1) - std::max<double>(start, j);
            if (overlap > 0.0) t.taps.push_back({j, static_cast<float>(overlap / scale)});
        }
        t.offsets.push_back(t.taps.size());
    }
    return t;
}

TapTable bilinear_taps(int in, int out) {
    TapTable t;
    t.offsets.push_back(0);
    const double scale = static_cast<double>(in) / out;
    for (int i = 0; i < out; ++i) {
        const double src = (i + 0.5) * scale - 0.5;
        const double base = std::floor(src);
        const float frac = static_cast<float>(src - base);
        const int i0 = std::clamp(static_cast<int>(base), 0, in - 1);
        const int i1 = std::clamp(static_cast<int>(base) + 1, 0, in - 1);
        t.taps.push_back({i0, 1.0f - frac});
        t.taps.push_back({i1, frac});
        t.offsets.push_back(t.taps.size());
    }
    return t;
}

// Catmull-Rom cubic convolution, a = -0.5.
float cubic_weight(float d) {
    constexpr float a = -0.5f;
    d = std::fabs(d);
    if (d <= 1.0f) return ((a + 2.0f) * d - (a + 3.0f)) * d * d + 1.0f;
    if (d < 2.0f) return ((a * d - 5.0f * a) * d + 8.0f * a) * d - 4.0f * a;
    return 0.0f;
}

TapTable bicubic_taps(int in, int out) {
    TapTable t;
    t.offsets.push_back(0);
    const double scale = static_cast<double>(in) / out;
    for (int i = 0; i < out; ++i) {
        const double src = (i + 0.5) * scale - 0.5;
        const double base = std::floor(src);
        const float frac = static_cast<float>(src - base);
        for (int k = -1; k <= 2; ++k) {
            const int j = std::clamp(static_cast<int>(base) + k, 0, in - 1);
            t.taps.push_back({j, cubic_weight(static_cast<float>(k) - frac)});
        }
        t.offsets.push_back(t.taps.size());
    }
    return t;
}

TapTable make_taps(ResizeKernel kernel, int in, int out) {
    switch (kernel) {
        case ResizeKernel::Area: return area_taps(in, out);
        case ResizeKernel::Bilinear: return bilinear_taps(in, out);
        case ResizeKernel::Bicubic: return bicubic_taps(in, out);
    }
    return area_taps(in, out);
}

std::uint8_t to_u8(float v) {
    return static_cast<std::uint8_t>(std::floor(std::clamp(v, 0.0f, 255.0f) + 0.5f));
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels)
    : ImageBuffer(width, height, channels,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                            std::max(height, 0) * std::max(channels, 0))) {}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
    check_dims(width, height, channels);
    if (pixels_.size() != static_cast<std::size_t>(width) * height * channels) {
        throw Error(ErrorCode::InvalidDims, "pixel count does not match width*height*channels");
    }
}

ImageBuffer ImageBuffer::filled(int width, int height, int channels, std::uint8_t value) {
    check_dims(width, height, channels);
    return ImageBuffer(width, height, channels,
                       std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height * channels, value));
}

ImageBuffer resize(const ImageBuffer& img, int out_w, int out_h, ResizeKernel kernel) {
    if (out_w < 1 || out_h < 1) {
        throw Error(ErrorCode::InvalidDims, "resize target must be at least 1x1");
    }
    if (img.empty()) throw Error(ErrorCode::InvalidDims, "cannot resize an empty image");
    const int in_w = img.width();
    const int in_h = img.height();
    const int ch = img.channels();
    if (in_w == out_w && in_h == out_h && kernel != ResizeKernel::Bicubic) return img;

    const TapTable hx = make_taps(kernel, in_w, out_w);
    const TapTable vy = make_taps(kernel, in_h, out_h);

    // Horizontal pass into float, then vertical pass; no rounding in between.
    std::vector<float> mid(static_cast<std::size_t>(out_w) * in_h * ch);
    const auto src = img.pixels();
    for (int y = 0; y < in_h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * in_w;
        for (int x = 0; x < out_w; ++x) {
            for (int c = 0; c < ch; ++c) {
                float acc = 0.0f;
                for (std::size_t k = hx.offsets[x]; k < hx.offsets[x + 1]; ++k) {
                    acc += hx.taps[k].weight * src[(row + hx.taps[k].index) * ch + c];
                }
                mid[(static_cast<std::size_t>(y) * out_w + x) * ch + c] = acc;
            }
        }
    }

    ImageBuffer out(out_w, out_h, ch);
    auto dst = out.pixels();
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            for (int c = 0; c < ch; ++c) {
                float acc = 0.0f;
                for (std::size_t k = vy.offsets[y]; k < vy.offsets[y + 1]; ++k) {
                    acc += vy.taps[k].weight *
                           mid[(static_cast<std::size_t>(vy.taps[k].index) * out_w + x) * ch + c];
                }
                dst[(static_cast<std::size_t>(y) * out_w + x) * ch + c] = to_u8(acc);
            }
        }
    }
    return out;
}

ImageBuffer match_resolution(const ImageBuffer& img, int target, int input_size,
                             MatchDiagnostics* diagnostics) {
    if (target < 1 || input_size < 1) {
        throw Error(ErrorCode::InvalidDims, "target and input size must be positive");
    }
    if (diagnostics) {
        diagnostics->upscaled_as_match = target > img.width() || target > img.height();
    }
    const ImageBuffer small = resize(img, target, target, ResizeKernel::Area);
    return resize(small, input_size, input_size, ResizeKernel::Bicubic);
}

ImageBuffer to_grayscale(const ImageBuffer& img) {
    if (img.channels() == 1) return img;
    ImageBuffer out(img.width(), img.height(), 1);
    const auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const unsigned r = src[3 * i];
        const unsigned g = src[3 * i + 1];
        const unsigned b = src[3 * i + 2];
        dst[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
    return out;
}

ResizeKernel kernel_for(const ImageBuffer& img, int out_w, int out_h) {
    return (out_w <= img.width() && out_h <= img.height()) ? ResizeKernel::Area
                                                           : ResizeKernel::Bicubic;
}

}  // namespace lrfr
