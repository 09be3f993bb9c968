#pragma once

#include <algorithm>
#include <ostream>

#include "finprint/mat.hpp"

namespace finprint {

// ASCII portable graymap, max value scaled to 255.  Good enough to eyeball
// fingerprints and generator output in any image viewer.
inline void write_pgm(const Mat& img, std::ostream& out) {
    double hi = 0.0;
    for (double v : img.v) hi = std::max(hi, v);
    out << "P2\n" << img.cols << ' ' << img.rows << "\n255\n";
    for (int r = 0; r < img.rows; ++r) {
        for (int c = 0; c < img.cols; ++c) {
            const int g = hi > 0.0
                              ? std::clamp(static_cast<int>(img.at(r, c) / hi * 255.0 + 0.5),
                                           0, 255)
                              : 0;
            out << g << (c + 1 == img.cols ? '\n' : ' ');
        }
    }
}

} // namespace finprint
