#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "file_util.hpp"
#include "lrfr/error.hpp"
#include "lrfr/image.hpp"

namespace lrfr {

ImageBuffer read_image(const std::filesystem::path& path) {
    cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (mat.empty()) throw Error(ErrorCode::DecodeError, "cannot decode " + path.string());
    if (mat.depth() != CV_8U) {
        cv::Mat converted;
        const double scale = mat.depth() == CV_16U ? 1.0 / 257.0 : 1.0;
        mat.convertTo(converted, CV_8U, scale);
        mat = converted;
    }
    const int src_ch = mat.channels();
    if (src_ch != 1 && src_ch != 3 && src_ch != 4) {
        throw Error(ErrorCode::DecodeError, "unsupported channel count in " + path.string());
    }
    const int ch = src_ch == 1 ? 1 : 3;
    ImageBuffer out(mat.cols, mat.rows, ch);
    for (int y = 0; y < mat.rows; ++y) {
        const std::uint8_t* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < mat.cols; ++x) {
            const std::uint8_t* px = row + static_cast<std::size_t>(x) * src_ch;
            if (ch == 1) {
                out.at(x, y, 0) = px[0];
            } else {
                // OpenCV decodes as BGR(A).
                out.at(x, y, 0) = px[2];
                out.at(x, y, 1) = px[1];
                out.at(x, y, 2) = px[0];
            }
        }
    }
    return out;
}

void write_png(const ImageBuffer& img, const std::filesystem::path& path) {
    const int ch = img.channels();
    cv::Mat mat(img.height(), img.width(), ch == 1 ? CV_8UC1 : CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        std::uint8_t* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.width(); ++x) {
            std::uint8_t* px = row + static_cast<std::size_t>(x) * ch;
            if (ch == 1) {
                px[0] = img.at(x, y, 0);
            } else {
                px[0] = img.at(x, y, 2);
                px[1] = img.at(x, y, 1);
                px[2] = img.at(x, y, 0);
            }
        }
    }
    const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 6};
    std::vector<std::uint8_t> bytes;
    try {
        if (!cv::imencode(".png", mat, bytes, params)) {
            throw Error(ErrorCode::EncodeError, "cannot encode " + path.string());
        }
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::EncodeError, "cannot encode " + path.string() + ": " + e.what());
    }
    detail::write_file(path, std::string(bytes.begin(), bytes.end()));
}

}  // namespace lrfr
