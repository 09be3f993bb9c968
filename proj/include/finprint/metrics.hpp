#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finprint/mat.hpp"

// Frobenius-cosine affinity between image arrays and the two-stage averaged
// log2 ratio score built on it.  Sign convention: positive means the fakes
// sit closer to the training sample than to the test sample.

namespace finprint {

inline double frobenius_inner(const Mat& x, const Mat& y) {
    require_same_shape(x, y, "frobenius_inner");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x.v[i] * y.v[i];
    return acc;
}

inline double frobenius_norm(const Mat& x) {
    double acc = 0.0;
    for (double v : x.v) acc += v * v;
    return std::sqrt(acc);
}

enum class CosineVariant { exact, stable };

struct CosineScore {
    double value = 0.0;
    CosineVariant variant = CosineVariant::exact;
};

// (||X+Y||^2 - ||X-Y||^2) / (4 ||X|| ||Y||), the polarization form.
// Tiny overshoot beyond [-1,1] is clamped; anything larger is reported as is.
inline CosineScore cosine_exact(const Mat& x, const Mat& y) {
    require_same_shape(x, y, "cosine_exact");
    const double nx = frobenius_norm(x);
    const double ny = frobenius_norm(y);
    if (nx == 0.0 || ny == 0.0)
        throw std::domain_error("cosine_exact: zero-norm argument");
    double sum_sq = 0.0, diff_sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = x.v[i] + y.v[i];
        const double d = x.v[i] - y.v[i];
        sum_sq += s * s;
        diff_sq += d * d;
    }
    double value = (sum_sq - diff_sq) / (4.0 * nx * ny);
    if (value > 1.0 && value - 1.0 < 1e-12) value = 1.0;
    if (value < -1.0 && -1.0 - value < 1e-12) value = -1.0;
    return {value, CosineVariant::exact};
}

// The empty-fake-proof prescription: both numerators keep their polarization
// form but share the fixed denominator 4 ||train|| ||test||, so an all-zero
// fake gives (0, 0) instead of a division failure.  literal_second_numerator
// reproduces the document's printed second numerator (||train - fake||^2 in
// the test score); it exists for comparison only.
inline std::pair<CosineScore, CosineScore>
cosine_stable(const Mat& train, const Mat& test, const Mat& fake,
              bool literal_second_numerator = false) {
    require_same_shape(train, test, "cosine_stable");
    require_same_shape(train, fake, "cosine_stable");
    const double nt = frobenius_norm(train);
    const double ns = frobenius_norm(test);
    if (nt == 0.0 || ns == 0.0)
        throw std::domain_error("cosine_stable: zero-norm train or test");
    const double denom = 4.0 * nt * ns;

    auto polarization = [&](const Mat& a, const Mat& b) {
        double sum_sq = 0.0, diff_sq = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double s = a.v[i] + b.v[i];
            const double d = a.v[i] - b.v[i];
            sum_sq += s * s;
            diff_sq += d * d;
        }
        return sum_sq - diff_sq;
    };

    const double c_train = polarization(train, fake) / denom;
    double c_test;
    if (literal_second_numerator) {
        // ||test+fake||^2 - ||train-fake||^2, as printed
        double sum_sq = 0.0, diff_sq = 0.0;
        for (std::size_t i = 0; i < test.size(); ++i) {
            const double s = test.v[i] + fake.v[i];
            const double d = train.v[i] - fake.v[i];
            sum_sq += s * s;
            diff_sq += d * d;
        }
        c_test = (sum_sq - diff_sq) / denom;
    } else {
        c_test = polarization(test, fake) / denom;
    }
    return {{c_train, CosineVariant::stable}, {c_test, CosineVariant::stable}};
}

// ---------------------------------------------------------------------------
// MInfo
// ---------------------------------------------------------------------------

struct CosinePair {
    double c_train_fake = 0.0;
    double c_test_fake = 0.0;
};

struct MInfoResult {
    double value = 0.0; // bits
    int n_runs = 0;
    std::vector<double> per_run_terms;
};

constexpr double kDefaultCosineFloor = 1e-12;

// Stage one averages log2 ratios over a run's fakes; stage two averages the
// runs.  Terms are computed as log2(train) - log2(test) so exchanging the
// samples negates every term exactly.
inline MInfoResult minfo(std::span<const std::vector<CosinePair>> runs,
                         double epsilon = kDefaultCosineFloor) {
    if (runs.empty()) throw std::invalid_argument("minfo: no runs");
    if (!(epsilon > 0.0)) throw std::invalid_argument("minfo: epsilon must be positive");
    MInfoResult res;
    res.n_runs = static_cast<int>(runs.size());
    for (const auto& run : runs) {
        if (run.empty()) throw std::invalid_argument("minfo: empty run");
        double term = 0.0;
        for (const CosinePair& p : run) {
            const double ct = std::max(p.c_train_fake, epsilon);
            const double cs = std::max(p.c_test_fake, epsilon);
            term += std::log2(ct) - std::log2(cs);
        }
        res.per_run_terms.push_back(term / static_cast<double>(run.size()));
    }
    double total = 0.0;
    for (double t : res.per_run_terms) total += t;
    res.value = total / static_cast<double>(res.n_runs);
    return res;
}

// ---------------------------------------------------------------------------
// 5x5 report
// ---------------------------------------------------------------------------

struct MInfoReport {
    std::vector<std::string> test_labels;  // rows
    std::vector<std::string> train_labels; // columns
    std::vector<std::vector<MInfoResult>> cells;
    std::vector<double> row_averages;    // per test file, mean over trainings
    std::vector<double> column_averages; // per training file, mean over tests
};

inline MInfoReport summarize(std::vector<std::string> test_labels,
                             std::vector<std::string> train_labels,
                             std::vector<std::vector<MInfoResult>> cells) {
    if (cells.size() != test_labels.size())
        throw std::invalid_argument("summarize: row count mismatch");
    for (const auto& row : cells)
        if (row.size() != train_labels.size())
            throw std::invalid_argument("summarize: column count mismatch");

    MInfoReport rep;
    rep.test_labels = std::move(test_labels);
    rep.train_labels = std::move(train_labels);
    rep.cells = std::move(cells);
    rep.row_averages.assign(rep.test_labels.size(), 0.0);
    rep.column_averages.assign(rep.train_labels.size(), 0.0);
    for (std::size_t i = 0; i < rep.cells.size(); ++i) {
        for (std::size_t j = 0; j < rep.cells[i].size(); ++j) {
            rep.row_averages[i] += rep.cells[i][j].value;
            rep.column_averages[j] += rep.cells[i][j].value;
        }
    }
    for (double& r : rep.row_averages) r /= static_cast<double>(rep.train_labels.size());
    for (double& c : rep.column_averages) c /= static_cast<double>(rep.test_labels.size());
    return rep;
}

inline std::string render_report_text(const MInfoReport& rep) {
    char buf[64];
    std::string out;
    auto cell = [&](double v) {
        std::snprintf(buf, sizeof buf, "%10.4f", v);
        out += buf;
    };
    out += "          ";
    for (const auto& t : rep.train_labels) {
        std::snprintf(buf, sizeof buf, "%10s", t.c_str());
        out += buf;
    }
    out += "       avg\n";
    for (std::size_t i = 0; i < rep.test_labels.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%-10s", rep.test_labels[i].c_str());
        out += buf;
        for (const auto& c : rep.cells[i]) cell(c.value);
        cell(rep.row_averages[i]);
        out += '\n';
    }
    out += "avg       ";
    for (double c : rep.column_averages) cell(c);
    out += '\n';
    return out;
}

} // namespace finprint
