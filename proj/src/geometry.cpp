#include "lrfr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrfr/error.hpp"

namespace lrfr {

FaceBox extend_box(const FaceBox& box, double ratio) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) {
        throw Error(ErrorCode::InvalidRatio, "crop ratio must be positive, got " + std::to_string(ratio));
    }
    if (ratio == 1.0) return box;
    const double w = box.w * ratio;
    const double h = box.h * ratio;
    return {box.center_x() - w / 2.0, box.center_y() - h / 2.0, w, h};
}

ImageBuffer crop_padded(const ImageBuffer& img, const FaceBox& box) {
    // std::round is half away from zero.
    const double rw = std::round(box.w);
    const double rh = std::round(box.h);
    if (!(rw >= 1.0) || !(rh >= 1.0)) {
        throw Error(ErrorCode::EmptyCrop, "crop rounds to an empty region");
    }
    if (img.empty()) throw Error(ErrorCode::EmptyCrop, "source image is empty");

    const int out_w = static_cast<int>(rw);
    const int out_h = static_cast<int>(rh);
    const long long x0 = static_cast<long long>(std::floor(box.x));
    const long long y0 = static_cast<long long>(std::floor(box.y));
    const int ch = img.channels();

    ImageBuffer out(out_w, out_h, ch);
    for (int y = 0; y < out_h; ++y) {
        const int sy = static_cast<int>(std::clamp<long long>(y0 + y, 0, img.height() - 1));
        for (int x = 0; x < out_w; ++x) {
            const int sx = static_cast<int>(std::clamp<long long>(x0 + x, 0, img.width() - 1));
            for (int c = 0; c < ch; ++c) out.at(x, y, c) = img.at(sx, sy, c);
        }
    }
    return out;
}

}  // namespace lrfr
