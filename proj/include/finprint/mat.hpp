#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace finprint {

// Dense row-major matrix of doubles.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

    std::size_t size() const { return v.size(); }

    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

    friend bool operator==(const Mat&, const Mat&) = default;
};

inline void require_same_shape(const Mat& a, const Mat& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                                    " vs " + std::to_string(b.rows) + "x" +
                                    std::to_string(b.cols) + ")");
}

} // namespace finprint
