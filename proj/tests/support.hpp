#pragma once

// Test-only oracles. Each one recomputes a quantity by a route independent of
// the library code path it is used to check.

#include <gsc/image.hpp>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace gsc::test {

inline std::filesystem::path data_dir() { return GSC_TEST_DATA_DIR; }

/// Deterministic generator for test inputs (mt19937_64 is fully specified by
/// the standard; distributions are hand-rolled for portability).
class TestRng {
  public:
    explicit TestRng(std::uint64_t seed) : eng_{seed} {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    int integer(int lo, int hi) { // inclusive
        return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i)
                m(i, j) = normal();
        return m;
    }
    Eigen::VectorXd vector(Eigen::Index n) { return matrix(n, 1).col(0); }
    Image image(int w, int h, double lo = 0.0, double hi = 255.0) {
        Image img(w, h);
        for (double &v : img.data())
            v = uniform(lo, hi);
        return img;
    }

  private:
    std::mt19937_64 eng_;
};

/// Direct MSE -> PSNR, accumulated row by row in long double.
inline double psnr_oracle(const Image &a, const Image &b) {
    long double sum = 0.0L;
    for (int r = 0; r < a.height(); ++r)
        for (int c = 0; c < a.width(); ++c) {
            const long double d = static_cast<long double>(a(r, c)) - b(r, c);
            sum += d * d;
        }
    const long double mse = sum / (static_cast<long double>(a.width()) * a.height());
    if (mse == 0.0L)
        return std::numeric_limits<double>::infinity();
    return static_cast<double>(10.0L * std::log10(65025.0L / mse));
}

/// Per-pixel brute force: for every output pixel scan every patch of every
/// group and average the entries that land on it.
inline Image aggregate_oracle(const std::vector<GroupEstimate> &groups, int w, int h, int d,
                              const Image &fallback) {
    Image out(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double sum = 0.0;
            int count = 0;
            for (const auto &g : groups)
                for (std::size_t j = 0; j < g.coords.size(); ++j) {
                    const auto pc = g.coords[j];
                    const int dr = r - pc.row, dc = c - pc.col;
                    if (dr < 0 || dc < 0 || dr >= d || dc >= d)
                        continue;
                    sum += g.matrix(dc * d + dr, static_cast<Eigen::Index>(j));
                    ++count;
                }
            out(r, c) = count ? sum / count : fallback(r, c);
        }
    return out;
}

/// 0.5*(x - y)^2 + lambda*|x|^p
inline double scalar_objective(double x, double y, double lambda, double p) {
    const double ax = std::abs(x);
    const double penalty = p == 1.0 ? ax : p == 0.5 ? std::sqrt(ax) : std::pow(ax, p);
    return 0.5 * (x - y) * (x - y) + lambda * penalty;
}

struct GridMin {
    double x;
    double value;
};

/// Exhaustive grid search of the scalar objective over [lo, hi].
inline GridMin scalar_grid_min(double y, double lambda, double p, double lo, double hi,
                               double step) {
    GridMin best{lo, scalar_objective(lo, y, lambda, p)};
    const auto n = static_cast<long>(std::floor((hi - lo) / step));
    for (long i = 1; i <= n; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        const double v = scalar_objective(x, y, lambda, p);
        if (v < best.value)
            best = {x, v};
    }
    const double v_hi = scalar_objective(hi, y, lambda, p);
    if (v_hi < best.value)
        best = {hi, v_hi};
    return best;
}

/// Nuclear norm via the eigenvalues of m^T m.
inline double nuclear_norm_oracle(const Eigen::MatrixXd &m) {
    Eigen::MatrixXd g = m.rows() >= m.cols() ? Eigen::MatrixXd(m.transpose() * m)
                                             : Eigen::MatrixXd(m * m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        sum += std::sqrt(std::max(es.eigenvalues()[i], 0.0));
    return sum;
}

/// Largest singular value from the eigenvalues of m^T m.
inline double spectral_norm_oracle(const Eigen::MatrixXd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m);
    return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const Image &a, const Image &b) {
    return max_abs_diff(a.data(), b.data());
}

} // namespace gsc::test
