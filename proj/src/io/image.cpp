#include "hypsam/io/image.hpp"

#include <filesystem>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "hypsam/core/errors.hpp"

namespace hypsam::io {

bool file_exists(const std::string& path) { return std::filesystem::exists(path); }

Image8 imread_rgb(const std::string& path) {
    if (!file_exists(path)) throw MissingFile(path);
    cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
    if (bgr.empty()) throw CorruptImage(path);
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    Image8 out(rgb.rows, rgb.cols, 3);
    for (int y = 0; y < rgb.rows; ++y) {
        const uint8_t* row = rgb.ptr<uint8_t>(y);
        std::copy(row, row + static_cast<size_t>(rgb.cols) * 3,
                  out.data.begin() + static_cast<size_t>(y) * rgb.cols * 3);
    }
    return out;
}

SalMap imread_gray01(const std::string& path) {
    if (!file_exists(path)) throw MissingFile(path);
    cv::Mat g = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (g.empty()) throw CorruptImage(path);
    SalMap out(g.rows, g.cols);
    for (int y = 0; y < g.rows; ++y) {
        const uint8_t* row = g.ptr<uint8_t>(y);
        for (int x = 0; x < g.cols; ++x) out.at(y, x) = row[x] / 255.0;
    }
    return out;
}

BinMask imread_mask(const std::string& path) {
    if (!file_exists(path)) throw MissingFile(path);
    cv::Mat g = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (g.empty()) throw CorruptImage(path);
    BinMask out(g.rows, g.cols);
    for (int y = 0; y < g.rows; ++y) {
        const uint8_t* row = g.ptr<uint8_t>(y);
        for (int x = 0; x < g.cols; ++x) out.at(y, x) = row[x] > 127 ? 1 : 0;
    }
    return out;
}

void imwrite_gray01(const std::string& path, const SalMap& map) {
    cv::Mat g(map.h, map.w, CV_8UC1);
    for (int y = 0; y < map.h; ++y) {
        uint8_t* row = g.ptr<uint8_t>(y);
        for (int x = 0; x < map.w; ++x) {
            double v = map.at(y, x);
            v = v < 0 ? 0 : (v > 1 ? 1 : v);
            row[x] = static_cast<uint8_t>(std::lround(v * 255.0));
        }
    }
    if (!cv::imwrite(path, g)) throw Error("cannot write image: " + path);
}

void imwrite_rgb(const std::string& path, const Image8& img) {
    cv::Mat rgb(img.h, img.w, CV_8UC3, const_cast<uint8_t*>(img.data.data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    if (!cv::imwrite(path, bgr)) throw Error("cannot write image: " + path);
}

}  // namespace hypsam::io
