#pragma once

#include <gsc/error.hpp>
#include <gsc/image.hpp>
#include <gsc/rng.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <vector>

namespace gsc {

// ---------------------------------------------------------------------------
// Pixel masks (inpainting)

/// Per-pixel observation mask; 1 == observed.
struct MaskOp {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> observed;

    bool is_observed(std::size_t i) const noexcept { return observed[i] != 0; }
    std::size_t observed_count() const noexcept {
        return static_cast<std::size_t>(std::count(observed.begin(), observed.end(), 1));
    }
    bool operator==(const MaskOp &) const = default;
};

namespace detail {
inline void require_nonempty(const MaskOp &m) {
    require(std::any_of(m.observed.begin(), m.observed.end(), [](auto v) { return v != 0; }),
            Errc::EmptyMask, "mask has no observed pixels");
}
inline void require_mask_dims(const MaskOp &m, const Image &img, const char *what) {
    require(m.width == img.width() && m.height == img.height(), Errc::DimensionMismatch,
            std::string(what) + ": mask and image dimensions differ");
}
} // namespace detail

/// Exactly round(fraction * N) pixels removed, chosen by a seeded
/// Fisher-Yates shuffle of the pixel indices.
inline MaskOp make_random_mask(int width, int height, double missing_fraction,
                               std::uint64_t seed) {
    detail::require(missing_fraction >= 0.0 && missing_fraction < 1.0,
                    Errc::InvalidArgument, "missing fraction must lie in [0, 1)");
    detail::require(width >= 1 && height >= 1, Errc::InvalidArgument, "empty mask dims");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    const auto missing = static_cast<std::size_t>(std::llround(missing_fraction * n));

    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    Pcg32 rng(seed, streams::mask);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = rng.bounded(static_cast<std::uint32_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    MaskOp out{width, height, std::vector<std::uint8_t>(n, 1)};
    for (std::size_t i = 0; i < missing; ++i)
        out.observed[perm[i]] = 0;
    detail::require_nonempty(out);
    return out;
}

/// Text-overlay mask: a pixel is observed iff the overlay value is below
/// `threshold` (the overlay text is bright).
inline MaskOp mask_from_image(const Image &textmask, double threshold) {
    MaskOp out{textmask.width(), textmask.height(),
               std::vector<std::uint8_t>(textmask.size(), 0)};
    const auto data = textmask.data();
    for (std::size_t i = 0; i < data.size(); ++i)
        out.observed[i] = data[i] < threshold ? 1 : 0;
    detail::require_nonempty(out);
    return out;
}

/// Mask raster for file output: 255 observed, 0 missing.
inline Image mask_to_image(const MaskOp &m) {
    std::vector<double> data(m.observed.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = m.observed[i] ? 255.0 : 0.0;
    return Image(m.width, m.height, std::move(data));
}

/// Inverse of mask_to_image; values above 127 count as observed.
inline MaskOp mask_from_mask_image(const Image &img) {
    MaskOp out{img.width(), img.height(), std::vector<std::uint8_t>(img.size(), 0)};
    const auto data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i)
        out.observed[i] = data[i] > 127.0 ? 1 : 0;
    detail::require_nonempty(out);
    return out;
}

/// H x for a diagonal 0/1 operator: missing pixels become 0.
inline Image apply_mask(const MaskOp &op, const Image &img) {
    detail::require_mask_dims(op, img, "apply_mask");
    Image out = img;
    auto data = out.data();
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!op.observed[i])
            data[i] = 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Block compressive sensing

using CsMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Deterministic M x block^2 Gaussian projection for one block: i.i.d.
/// standard normal entries from PCG32 stream `cs_base + block_index`,
/// filled row by row, then rows orthonormalized by Gram-Schmidt with one
/// reorthogonalization pass.
inline CsMatrix generate_cs_matrix(std::uint64_t seed, int block, int rows,
                                   std::size_t block_index) {
    const Eigen::Index n = static_cast<Eigen::Index>(block) * block;
    CsMatrix phi(rows, n);
    Pcg32 rng(seed, streams::cs_base + block_index);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            phi(i, j) = rng.normal();
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (int pass = 0; pass < 2 && i > 0; ++pass) {
            const Eigen::VectorXd coeff = phi.topRows(i) * phi.row(i).transpose();
            phi.row(i) -= coeff.transpose() * phi.topRows(i);
        }
        const double norm = phi.row(i).norm();
        detail::require(norm > 0.0, Errc::MalformedData, "degenerate projection row");
        phi.row(i) /= norm;
    }
    return phi;
}

/// Block-CS operator. Matrices are regenerated from (seed, block index) on
/// first use and memoized; copies share the memo.
class CsOp {
  public:
    CsOp(int block, double ratio, std::uint64_t seed)
        : block_{block}, ratio_{ratio}, seed_{seed}, cache_{std::make_shared<Cache>()} {
        detail::require(block >= 1, Errc::InvalidArgument, "CS block size must be positive");
        detail::require(ratio > 0.0 && ratio <= 1.0, Errc::InvalidArgument,
                        "CS ratio must lie in (0, 1]");
        const long n = static_cast<long>(block) * block;
        rows_ = static_cast<int>(std::clamp(std::lround(ratio * static_cast<double>(n)), 1L, n));
    }

    int block() const noexcept { return block_; }
    double ratio() const noexcept { return ratio_; }
    std::uint64_t seed() const noexcept { return seed_; }
    int rows_per_block() const noexcept { return rows_; }
    int block_pixels() const noexcept { return block_ * block_; }

    const CsMatrix &matrix(std::size_t block_index) const {
        std::lock_guard lock(cache_->mutex);
        auto it = cache_->matrices.find(block_index);
        if (it == cache_->matrices.end())
            it = cache_->matrices
                     .emplace(block_index, generate_cs_matrix(seed_, block_, rows_, block_index))
                     .first;
        return it->second;
    }

  private:
    struct Cache {
        std::mutex mutex;
        std::map<std::size_t, CsMatrix> matrices;
    };

    int block_;
    double ratio_;
    std::uint64_t seed_;
    int rows_ = 0;
    std::shared_ptr<Cache> cache_;
};

inline CsOp make_cs_op(int block, double ratio, std::uint64_t seed) {
    return CsOp(block, ratio, seed);
}

/// Per-block measurement vectors in row-major block scan order.
struct Measurements {
    int width = 0;
    int height = 0;
    int block = 0;
    std::vector<Eigen::VectorXd> blocks;

    int blocks_x() const noexcept { return width / block; }
    int blocks_y() const noexcept { return height / block; }
};

namespace detail {
inline void require_block_dims(int width, int height, int block) {
    require(width % block == 0 && height % block == 0, Errc::DimensionMismatch,
            "image " + std::to_string(width) + "x" + std::to_string(height) +
                " is not divisible into " + std::to_string(block) + "-pixel blocks");
}
} // namespace detail

/// Column-major vectorization of block (by, bx).
inline Eigen::VectorXd block_vector(const Image &img, int block, int by, int bx) {
    return extract_patch(img, PatchCoord{by * block, bx * block}, block);
}

inline void store_block(Image &img, int block, int by, int bx, const Eigen::VectorXd &v) {
    for (int dc = 0; dc < block; ++dc)
        for (int dr = 0; dr < block; ++dr)
            img(by * block + dr, bx * block + dc) = v[dc * block + dr];
}

inline Measurements cs_measure(const CsOp &op, const Image &img) {
    detail::require_block_dims(img.width(), img.height(), op.block());
    Measurements out{img.width(), img.height(), op.block(), {}};
    const int bx_count = out.blocks_x();
    for (int by = 0; by < out.blocks_y(); ++by)
        for (int bx = 0; bx < bx_count; ++bx) {
            const auto index = static_cast<std::size_t>(by) * bx_count + bx;
            out.blocks.push_back(op.matrix(index) * block_vector(img, op.block(), by, bx));
        }
    return out;
}

inline void require_consistent(const CsOp &op, const Measurements &meas) {
    detail::require(meas.block == op.block(), Errc::DimensionMismatch,
                    "measurement block size differs from operator");
    detail::require_block_dims(meas.width, meas.height, op.block());
    detail::require(meas.blocks.size() ==
                        static_cast<std::size_t>(meas.blocks_x()) * meas.blocks_y(),
                    Errc::DimensionMismatch, "measurement block count mismatch");
    for (const auto &b : meas.blocks)
        detail::require(b.size() == op.rows_per_block(), Errc::DimensionMismatch,
                        "measurement vector length differs from operator rows");
}

/// Phi^T y per block.
inline Image cs_adjoint(const CsOp &op, const Measurements &meas) {
    require_consistent(op, meas);
    Image out(meas.width, meas.height);
    const int bx_count = meas.blocks_x();
    for (int by = 0; by < meas.blocks_y(); ++by)
        for (int bx = 0; bx < bx_count; ++bx) {
            const auto index = static_cast<std::size_t>(by) * bx_count + bx;
            store_block(out, op.block(), by, bx, op.matrix(index).transpose() * meas.blocks[index]);
        }
    return out;
}

// ---------------------------------------------------------------------------

/// Optional additive white Gaussian noise stage.
inline Image add_gaussian_noise(Image img, double sigma, std::uint64_t seed) {
    detail::require(sigma >= 0.0, Errc::InvalidArgument, "noise sigma must be >= 0");
    Pcg32 rng(seed, streams::noise);
    for (double &v : img.data())
        v += sigma * rng.normal();
    return img;
}

} // namespace gsc
