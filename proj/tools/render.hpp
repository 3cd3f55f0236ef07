#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include <Eigen/Dense>

namespace rydosc::render {

/// Binary PPM heatmap with a blue-white-red diverging map centred on 0.
/// Row 0 of the matrix ends up at the bottom of the image.
inline void diverging_ppm(const Eigen::MatrixXd& values,
                          const std::filesystem::path& file) {
    const int nx = static_cast<int>(values.rows());
    const int np = static_cast<int>(values.cols());
    const double scale = std::max(values.maxCoeff(), -values.minCoeff());
    std::ofstream out(file, std::ios::binary);
    out << "P6\n" << nx << " " << np << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<std::size_t>(nx) * 3);
    for (int j = np - 1; j >= 0; --j) {
        for (int i = 0; i < nx; ++i) {
            const double v = scale > 0.0 ? values(i, j) / scale : 0.0;
            const double a = std::min(1.0, std::abs(v));
            std::uint8_t r = 255, g = 255, b = 255;
            if (v >= 0.0) {
                g = static_cast<std::uint8_t>(255 * (1.0 - a));
                b = static_cast<std::uint8_t>(255 * (1.0 - 0.85 * a));
            } else {
                r = static_cast<std::uint8_t>(255 * (1.0 - 0.85 * a));
                g = static_cast<std::uint8_t>(255 * (1.0 - a));
            }
            row[3 * i] = r;
            row[3 * i + 1] = g;
            row[3 * i + 2] = b;
        }
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
}

/// Grayscale PGM for non-negative scalar fields (sweep maps).
inline void grayscale_pgm(const Eigen::MatrixXd& values,
                          const std::filesystem::path& file) {
    const int nx = static_cast<int>(values.rows());
    const int np = static_cast<int>(values.cols());
    const double lo = values.minCoeff(), hi = values.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    std::ofstream out(file, std::ios::binary);
    out << "P5\n" << nx << " " << np << "\n255\n";
    std::vector<std::uint8_t> row(nx);
    for (int j = np - 1; j >= 0; --j) {
        for (int i = 0; i < nx; ++i)
            row[i] = static_cast<std::uint8_t>(255 * (values(i, j) - lo) / span);
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
}

} // namespace rydosc::render
