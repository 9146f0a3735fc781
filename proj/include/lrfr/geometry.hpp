#pragma once

#include "lrfr/image.hpp"

namespace lrfr {

/// Face bounding box in pixel space. Coordinates stay floating point through
/// extension and may lie outside the image.
struct FaceBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double center_x() const noexcept { return x + w / 2.0; }
    double center_y() const noexcept { return y + h / 2.0; }
    double area() const noexcept { return w * h; }

    friend bool operator==(const FaceBox&, const FaceBox&) = default;
};

/// Scales the box about its center by `ratio` in both dimensions.
/// Throws InvalidRatio for ratio <= 0 (or non-finite).
FaceBox extend_box(const FaceBox& box, double ratio);

/// Crops round(w) x round(h) pixels (half away from zero) starting at
/// (floor(x), floor(y)). Pixels outside the source replicate the nearest edge.
ImageBuffer crop_padded(const ImageBuffer& img, const FaceBox& box);

}  // namespace lrfr
