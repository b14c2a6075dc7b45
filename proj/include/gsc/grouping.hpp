#pragma once

#include <gsc/error.hpp>
#include <gsc/image.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace gsc {

/// Reference patch plus its k nearest window neighbours; members[0] is the
/// reference itself.
struct GroupIndex {
    PatchCoord reference;
    std::vector<PatchCoord> members;
};

struct PatchGroup {
    Eigen::MatrixXd matrix; // d^2 x k, column j is members[j]
    GroupIndex index;
};

namespace detail {
inline std::vector<int> grid_positions(int extent, int d, int stride) {
    std::vector<int> out;
    const int last = extent - d;
    for (int p = 0; p <= last; p += stride)
        out.push_back(p);
    if (out.back() != last)
        out.push_back(last);
    return out;
}
} // namespace detail

/// Patch top-left corners on a `stride` grid; the last row/column is snapped
/// to the border so every pixel is covered. Row-major order.
inline std::vector<PatchCoord> reference_coords(int width, int height, int d,
                                                int stride) {
    detail::require(d >= 1 && stride >= 1 && stride <= d, Errc::InvalidArgument,
                    "stride must satisfy 1 <= stride <= d");
    detail::require(width >= d && height >= d, Errc::ImageTooSmall,
                    "image " + std::to_string(width) + "x" + std::to_string(height) +
                        " is smaller than patch " + std::to_string(d));
    const auto rows = detail::grid_positions(height, d, stride);
    const auto cols = detail::grid_positions(width, d, stride);
    std::vector<PatchCoord> out;
    out.reserve(rows.size() * cols.size());
    for (int r : rows)
        for (int c : cols)
            out.push_back({r, c});
    return out;
}

/// Half-open candidate range [lo, hi) along one axis for a window of side
/// `window` centred at `ref`, clipped to valid top-left positions.
struct WindowRange {
    int lo, hi;
};

inline WindowRange window_range(int ref, int window, int extent, int d) noexcept {
    const int half = window / 2;
    const int lo = std::max(0, ref - half);
    const int hi = std::min(extent - d + 1, ref - half + window);
    return {lo, hi};
}

inline double patch_distance(const Image &img, PatchCoord a, PatchCoord b, int d) noexcept {
    double dist = 0.0;
    for (int dr = 0; dr < d; ++dr) {
        for (int dc = 0; dc < d; ++dc) {
            const double diff = img(a.row + dr, a.col + dc) - img(b.row + dr, b.col + dc);
            dist += diff * diff;
        }
    }
    return dist;
}

/// Block matching: the reference followed by the k-1 window candidates with
/// smallest squared distance to it. Ties go to the earlier candidate in
/// row-major order.
inline GroupIndex match_group(const Image &img, PatchCoord ref, int d, int k, int window) {
    detail::require(k >= 1 && window >= 1, Errc::InvalidArgument,
                    "k and window must be positive");
    detail::require(patch_in_bounds(img, ref, d), Errc::OutOfBounds,
                    "reference patch out of bounds");
    const auto rows = window_range(ref.row, window, img.height(), d);
    const auto cols = window_range(ref.col, window, img.width(), d);
    const auto available =
        static_cast<std::size_t>(rows.hi - rows.lo) * static_cast<std::size_t>(cols.hi - cols.lo);
    detail::require(available >= static_cast<std::size_t>(k), Errc::TooFewCandidates,
                    std::to_string(available) + " window candidates for k=" +
                        std::to_string(k));

    struct Candidate {
        double dist;
        std::size_t order;
        PatchCoord coord;
    };
    std::vector<Candidate> cands;
    cands.reserve(available);
    std::size_t order = 0;
    for (int r = rows.lo; r < rows.hi; ++r) {
        for (int c = cols.lo; c < cols.hi; ++c, ++order) {
            const PatchCoord pc{r, c};
            if (pc == ref)
                continue;
            cands.push_back({patch_distance(img, ref, pc, d), order, pc});
        }
    }
    const auto keep = static_cast<std::ptrdiff_t>(k - 1);
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                      [](const Candidate &a, const Candidate &b) {
                          return a.dist < b.dist || (a.dist == b.dist && a.order < b.order);
                      });

    GroupIndex out{ref, {}};
    out.members.reserve(static_cast<std::size_t>(k));
    out.members.push_back(ref);
    for (std::ptrdiff_t i = 0; i < keep; ++i)
        out.members.push_back(cands[static_cast<std::size_t>(i)].coord);
    return out;
}

inline PatchGroup gather(const Image &img, const GroupIndex &gi, int d) {
    PatchGroup out;
    out.matrix.resize(static_cast<Eigen::Index>(d) * d,
                      static_cast<Eigen::Index>(gi.members.size()));
    for (std::size_t j = 0; j < gi.members.size(); ++j)
        out.matrix.col(static_cast<Eigen::Index>(j)) = extract_patch(img, gi.members[j], d);
    out.index = gi;
    return out;
}

} // namespace gsc
