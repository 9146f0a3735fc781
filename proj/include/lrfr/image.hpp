#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace lrfr {

/// Row-major 8-bit image with interleaved channels (1 = gray, 3 = RGB).
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, int channels);
    ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> pixels);

    static ImageBuffer filled(int width, int height, int channels, std::uint8_t value);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return pixels_.empty(); }

    std::uint8_t& at(int x, int y, int c) {
        return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
    std::span<std::uint8_t> pixels() noexcept { return pixels_; }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> pixels_;
};

enum class ResizeKernel { Area, Bilinear, Bicubic };

/// Resamples to exactly out_w x out_h. Arithmetic is float32 with a final
/// round-half-up to 8 bits, so results are bit-reproducible.
///
/// Area integrates source pixels over each destination footprint. Bilinear
/// and bicubic (Catmull-Rom, a = -0.5) use half-pixel centers with edge
/// clamping. Same-size area/bilinear resizes return the input unchanged.
ImageBuffer resize(const ImageBuffer& img, int out_w, int out_h, ResizeKernel kernel);

struct MatchDiagnostics {
    /// Set when the requested target exceeds the source size, i.e. the
    /// "downsampling" step actually enlarged the image.
    bool upscaled_as_match = false;
};

/// Gallery resolution matching: area-resize to target x target, then bicubic
/// back up to input_size x input_size.
ImageBuffer match_resolution(const ImageBuffer& img, int target, int input_size,
                             MatchDiagnostics* diagnostics = nullptr);

/// Integer luma 0.299 R + 0.587 G + 0.114 B, rounded half-up.
ImageBuffer to_grayscale(const ImageBuffer& img);

/// Kernel used to bring a crop to the model input size: area when shrinking
/// along both axes, bicubic otherwise.
ResizeKernel kernel_for(const ImageBuffer& img, int out_w, int out_h);

// Codec boundary. Decodes PNG/JPEG into 1 or 3 channels (RGB order); always
// encodes PNG.
ImageBuffer read_image(const std::filesystem::path& path);
void write_png(const ImageBuffer& img, const std::filesystem::path& path);

}  // namespace lrfr
