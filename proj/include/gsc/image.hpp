#pragma once

#include <gsc/error.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace gsc {

/// Grayscale raster, row-major. Values are nominally in [0, 255] but
/// intermediate iterates may leave that range.
class Image {
  public:
    Image() = default;

    Image(int width, int height, double fill = 0.0)
        : width_{width}, height_{height} {
        check_dims(width, height);
        data_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    Image(int width, int height, std::vector<double> data)
        : width_{width}, height_{height}, data_{std::move(data)} {
        check_dims(width, height);
        detail::require(data_.size() == static_cast<std::size_t>(width) * height,
                        Errc::DimensionMismatch,
                        "image data length does not match width*height");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double operator()(int row, int col) const noexcept {
        return data_[static_cast<std::size_t>(row) * width_ + col];
    }
    double &operator()(int row, int col) noexcept {
        return data_[static_cast<std::size_t>(row) * width_ + col];
    }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    bool same_dims(const Image &other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Image &, const Image &) = default;

  private:
    static void check_dims(int width, int height) {
        detail::require(width >= 1 && height >= 1, Errc::InvalidArgument,
                        "image dimensions must be positive");
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Top-left pixel of a square patch.
struct PatchCoord {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const PatchCoord &, const PatchCoord &) = default;
};

inline void require_same_dims(const Image &a, const Image &b, const char *what) {
    detail::require(a.same_dims(b), Errc::DimensionMismatch,
                    std::string(what) + ": image dimensions differ");
}

/// Peak signal-to-noise ratio on the 8-bit scale. Identical images give
/// +infinity.
inline double psnr(const Image &a, const Image &b) {
    require_same_dims(a, b, "psnr");
    double sse = 0.0;
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double diff = da[i] - db[i];
        sse += diff * diff;
    }
    if (sse == 0.0)
        return std::numeric_limits<double>::infinity();
    const double mse = sse / static_cast<double>(da.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

inline bool patch_in_bounds(const Image &img, PatchCoord coord, int d) noexcept {
    return d >= 1 && coord.row >= 0 && coord.col >= 0 &&
           coord.row + d <= img.height() && coord.col + d <= img.width();
}

/// Column-major vectorization of the d x d block at `coord`: element
/// (dr, dc) of the block lands at index dc*d + dr.
inline Eigen::VectorXd extract_patch(const Image &img, PatchCoord coord, int d) {
    detail::require(patch_in_bounds(img, coord, d), Errc::OutOfBounds,
                    "patch at (" + std::to_string(coord.row) + "," +
                        std::to_string(coord.col) + ") size " +
                        std::to_string(d) + " exceeds image");
    Eigen::VectorXd out(static_cast<Eigen::Index>(d) * d);
    for (int dc = 0; dc < d; ++dc)
        for (int dr = 0; dr < d; ++dr)
            out[dc * d + dr] = img(coord.row + dr, coord.col + dc);
    return out;
}

/// A d^2 x k matrix of patch estimates together with where each column goes.
struct GroupEstimate {
    Eigen::MatrixXd matrix;
    std::vector<PatchCoord> coords;
};

/// Running sum/count buffers for overlap-averaged patch aggregation.
/// Contributions are summed in call order, so a fixed call order gives
/// bitwise-reproducible output.
class PatchAccumulator {
  public:
    PatchAccumulator(int width, int height, int d)
        : width_{width}, height_{height}, d_{d},
          sum_(static_cast<std::size_t>(width) * height, 0.0),
          count_(static_cast<std::size_t>(width) * height, 0) {
        detail::require(width >= 1 && height >= 1 && d >= 1,
                        Errc::InvalidArgument, "invalid aggregation dims");
    }

    void add(const Eigen::MatrixXd &matrix, std::span<const PatchCoord> coords) {
        detail::require(matrix.rows() == static_cast<Eigen::Index>(d_) * d_,
                        Errc::DimensionMismatch,
                        "group matrix rows must equal d*d");
        detail::require(matrix.cols() == static_cast<Eigen::Index>(coords.size()),
                        Errc::DimensionMismatch,
                        "group matrix columns must equal coordinate count");
        for (std::size_t j = 0; j < coords.size(); ++j) {
            const PatchCoord c = coords[j];
            detail::require(c.row >= 0 && c.col >= 0 && c.row + d_ <= height_ &&
                                c.col + d_ <= width_,
                            Errc::OutOfBounds, "aggregation coordinate out of bounds");
            const auto col = matrix.col(static_cast<Eigen::Index>(j));
            for (int dc = 0; dc < d_; ++dc) {
                for (int dr = 0; dr < d_; ++dr) {
                    const std::size_t px =
                        static_cast<std::size_t>(c.row + dr) * width_ + (c.col + dc);
                    sum_[px] += col[dc * d_ + dr];
                    ++count_[px];
                }
            }
        }
    }

    /// Averaged image; pixels nobody covered take the fallback's value.
    Image finish(const Image &fallback) const {
        detail::require(fallback.width() == width_ && fallback.height() == height_,
                        Errc::DimensionMismatch, "fallback image dims differ");
        std::vector<double> out(sum_.size());
        const auto fb = fallback.data();
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = count_[i] > 0 ? sum_[i] / count_[i] : fb[i];
        return Image(width_, height_, std::move(out));
    }

    std::span<const int> counts() const noexcept { return count_; }

  private:
    int width_, height_, d_;
    std::vector<double> sum_;
    std::vector<int> count_;
};

inline Image aggregate_groups(std::span<const GroupEstimate> groups, int width,
                              int height, int d, const Image &fallback) {
    PatchAccumulator acc(width, height, d);
    for (const auto &g : groups)
        acc.add(g.matrix, g.coords);
    return acc.finish(fallback);
}

inline Image clamp_to_8bit_range(Image img) {
    for (double &v : img.data())
        v = std::clamp(v, 0.0, 255.0);
    return img;
}

inline bool all_finite(const Image &img) {
    return std::ranges::all_of(img.data(), [](double v) { return std::isfinite(v); });
}

} // namespace gsc
