#pragma once

#include <gsc/config.hpp>
#include <gsc/degrade.hpp>
#include <gsc/dictionary.hpp>
#include <gsc/error.hpp>
#include <gsc/grouping.hpp>
#include <gsc/image.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace gsc {

/// ADMM iterates: auxiliary variable z, aggregated group estimate x = D alpha,
/// and scaled multiplier c.
struct AdmmState {
    Image z;
    Image x;
    Image c;
    int iter = 0;
};

struct IterRecord {
    int iter = 0;
    double fidelity = 0.0;
    std::optional<double> psnr;
    double seconds = 0.0;
};

struct IterLog {
    std::vector<IterRecord> records;
};

// ---------------------------------------------------------------------------
// Initialization

/// Nearest-observed-pixel fill. Missing pixels are filled in layers of
/// increasing 4-neighbour distance from the observed set; each copies the
/// value of its first already-filled neighbour in the order up, left, right,
/// down. Within a layer only values from earlier layers are read, so the
/// result does not depend on scan order.
inline Image fill_missing(const Image &obs, const MaskOp &mask) {
    detail::require_mask_dims(mask, obs, "fill_missing");
    detail::require_nonempty(mask);
    const int w = obs.width();
    const int h = obs.height();
    Image out = obs;
    std::vector<std::uint8_t> filled = mask.observed;
    std::vector<std::pair<std::size_t, double>> layer;
    for (;;) {
        layer.clear();
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * w + c;
                if (filled[i])
                    continue;
                const std::array<std::pair<int, int>, 4> order{
                    {{r - 1, c}, {r, c - 1}, {r, c + 1}, {r + 1, c}}};
                for (const auto &[rr, cc] : order) {
                    if (rr < 0 || rr >= h || cc < 0 || cc >= w)
                        continue;
                    if (filled[static_cast<std::size_t>(rr) * w + cc]) {
                        layer.emplace_back(i, out(rr, cc));
                        break;
                    }
                }
            }
        }
        if (layer.empty())
            break;
        for (const auto &[i, v] : layer) {
            out.data()[i] = v;
            filled[i] = 1;
        }
    }
    return out;
}

inline AdmmState init_state(const Image &obs, const MaskOp &mask) {
    Image z = fill_missing(obs, mask);
    Image x = z;
    return AdmmState{std::move(z), std::move(x), Image(obs.width(), obs.height(), 0.0), 0};
}

inline AdmmState init_state(const Measurements &meas, const CsOp &op) {
    Image z = cs_adjoint(op, meas);
    Image x = z;
    return AdmmState{std::move(z), std::move(x), Image(meas.width, meas.height, 0.0), 0};
}

// ---------------------------------------------------------------------------
// Z sub-problem: argmin 0.5*||y - H z||^2 + rho/2 * ||z - x - c||^2

inline Image z_update_mask(const Image &obs, const MaskOp &mask, const Image &x,
                           const Image &c, double rho) {
    detail::require(rho > 0.0, Errc::InvalidArgument, "rho must be > 0");
    detail::require_mask_dims(mask, obs, "z_update");
    require_same_dims(obs, x, "z_update");
    require_same_dims(obs, c, "z_update");
    Image z(obs.width(), obs.height());
    const auto y = obs.data();
    const auto xd = x.data();
    const auto cd = c.data();
    auto zd = z.data();
    for (std::size_t j = 0; j < zd.size(); ++j) {
        const double target = xd[j] + cd[j];
        zd[j] = mask.observed[j] ? (y[j] + rho * target) / (1.0 + rho) : target;
    }
    return z;
}

/// Per block, with r = vec(x + c): z = (Phi^T Phi + rho I)^-1 (Phi^T y + rho r).
/// Orthonormal rows make the Woodbury inner inverse the scalar 1/(1 + rho),
/// which simplifies to z = r + Phi^T (y - Phi r) / (1 + rho).
inline Image z_update_cs(const Measurements &meas, const CsOp &op, const Image &x,
                         const Image &c, double rho) {
    detail::require(rho > 0.0, Errc::InvalidArgument, "rho must be > 0");
    require_consistent(op, meas);
    detail::require(x.width() == meas.width && x.height() == meas.height,
                    Errc::DimensionMismatch, "z_update: image and measurement dims differ");
    require_same_dims(x, c, "z_update");
    Image z(meas.width, meas.height);
    const int b = op.block();
    const int bx_count = meas.blocks_x();
    for (int by = 0; by < meas.blocks_y(); ++by) {
        for (int bx = 0; bx < bx_count; ++bx) {
            const auto index = static_cast<std::size_t>(by) * bx_count + bx;
            const auto &phi = op.matrix(index);
            const Eigen::VectorXd r = block_vector(x, b, by, bx) + block_vector(c, b, by, bx);
            const Eigen::VectorXd resid = meas.blocks[index] - phi * r;
            store_block(z, b, by, bx, r + phi.transpose() * resid / (1.0 + rho));
        }
    }
    return z;
}

inline Image z_update(const Image &obs, const MaskOp &mask, const Image &x, const Image &c,
                      double rho) {
    return z_update_mask(obs, mask, x, c, rho);
}
inline Image z_update(const Measurements &meas, const CsOp &op, const Image &x,
                      const Image &c, double rho) {
    return z_update_cs(meas, op, x, c, rho);
}

/// 0.5 * ||y - H z||^2
inline double data_fidelity(const Image &obs, const MaskOp &mask, const Image &z) {
    detail::require_mask_dims(mask, z, "data_fidelity");
    double sum = 0.0;
    const auto y = obs.data();
    const auto zd = z.data();
    for (std::size_t j = 0; j < zd.size(); ++j)
        if (mask.observed[j]) {
            const double diff = y[j] - zd[j];
            sum += diff * diff;
        }
    return 0.5 * sum;
}

inline double data_fidelity(const Measurements &meas, const CsOp &op, const Image &z) {
    double sum = 0.0;
    const int bx_count = meas.blocks_x();
    for (int by = 0; by < meas.blocks_y(); ++by)
        for (int bx = 0; bx < bx_count; ++bx) {
            const auto index = static_cast<std::size_t>(by) * bx_count + bx;
            sum += (meas.blocks[index] - op.matrix(index) * block_vector(z, op.block(), by, bx))
                       .squaredNorm();
        }
    return 0.5 * sum;
}

// ---------------------------------------------------------------------------
// Alpha sub-problem

/// Spread of a coefficient vector as used by the lambda rule (population
/// statistics over its entries).
inline double coefficient_spread(const Eigen::VectorXd &gamma, DeltaMode mode) {
    if (gamma.size() == 0)
        return 0.0;
    const double mean = gamma.mean();
    const double var = (gamma.array() - mean).square().sum() / static_cast<double>(gamma.size());
    return mode == DeltaMode::StdDev ? std::sqrt(var) : var;
}

/// lambda_i = 2*sqrt(2)*sigma^2 / (delta_i + eps_l) and the group threshold
/// tau_i = lambda_i * K / (rho * N), K = d^2 * k * n.
struct GroupThreshold {
    double lambda = 0.0;
    double tau = 0.0;
};

inline GroupThreshold group_threshold(const Eigen::VectorXd &gamma, const SolverConfig &cfg,
                                      double coverage_ratio) {
    const double delta = coefficient_spread(gamma, cfg.delta);
    const double lambda =
        2.0 * std::numbers::sqrt2 * cfg.sigma * cfg.sigma / (delta + cfg.eps_l);
    return {lambda, lambda * coverage_ratio / cfg.rho};
}

inline Eigen::VectorXd group_weights(const Eigen::VectorXd &gamma, const SolverConfig &cfg) {
    if (cfg.weights == GroupWeights::Uniform)
        return Eigen::VectorXd::Ones(gamma.size());
    return (gamma.array().abs() + cfg.eps_w).inverse().matrix();
}

/// Match, learn the adaptive dictionary, shrink the coefficients and
/// synthesize one group estimate. `coverage_ratio` is K / N.
inline GroupEstimate solve_group(const Image &r, PatchCoord ref, const SolverConfig &cfg,
                                 double coverage_ratio) {
    const auto gi = match_group(r, ref, cfg.patch, cfg.k, cfg.window);
    const auto group = gather(r, gi, cfg.patch);
    const auto dict = learn_dictionary(group.matrix);
    const auto th = group_threshold(dict.mu, cfg, coverage_ratio);
    const auto alpha = solve_group_lp(dict, th.tau, group_weights(dict.mu, cfg), cfg.p,
                                      cfg.gst_iters);
    return GroupEstimate{synthesize(dict, alpha), gi.members};
}

struct AlphaResult {
    Image x;
    std::size_t groups_solved = 0;
};

/// One pass of the per-group l_p update over every reference patch of `r`,
/// aggregated back into an image. Groups are solved in parallel chunks but
/// accumulated strictly in reference order, so the output is bitwise
/// identical for any worker count.
inline AlphaResult alpha_update(const Image &r, const SolverConfig &cfg) {
    cfg.validate();
    const auto coords = reference_coords(r.width(), r.height(), cfg.patch, cfg.stride);
    const double big_k = static_cast<double>(cfg.patch) * cfg.patch * cfg.k *
                         static_cast<double>(coords.size());
    const double coverage_ratio = big_k / static_cast<double>(r.size());

    PatchAccumulator acc(r.width(), r.height(), cfg.patch);
    constexpr std::size_t kChunk = 256;
    std::vector<GroupEstimate> chunk(kChunk);
    const auto workers = static_cast<std::size_t>(cfg.workers);
    for (std::size_t begin = 0; begin < coords.size(); begin += kChunk) {
        const std::size_t count = std::min(kChunk, coords.size() - begin);
        auto work = [&](std::size_t first, std::size_t step) {
            for (std::size_t i = first; i < count; i += step)
                chunk[i] = solve_group(r, coords[begin + i], cfg, coverage_ratio);
        };
        if (workers <= 1) {
            work(0, 1);
        } else {
            std::vector<std::jthread> pool;
            std::vector<std::exception_ptr> errors(workers);
            for (std::size_t t = 0; t < workers; ++t)
                pool.emplace_back([&, t] {
                    try {
                        work(t, workers);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            pool.clear();
            for (const auto &e : errors)
                if (e)
                    std::rethrow_exception(e);
        }
        for (std::size_t i = 0; i < count; ++i)
            acc.add(chunk[i].matrix, chunk[i].coords);
    }
    return AlphaResult{acc.finish(r), coords.size()};
}

/// c - (z - x)
inline Image multiplier_update(const Image &c, const Image &z, const Image &x) {
    require_same_dims(c, z, "multiplier_update");
    require_same_dims(c, x, "multiplier_update");
    Image out = c;
    auto od = out.data();
    const auto zd = z.data();
    const auto xd = x.data();
    for (std::size_t j = 0; j < od.size(); ++j)
        od[j] -= zd[j] - xd[j];
    return out;
}

// ---------------------------------------------------------------------------
// Driver

/// Optional observation points inside the ADMM loop.
struct RestoreHooks {
    /// Called right after the z update with the new z and the x, c it was
    /// computed from.
    std::function<void(int iter, const Image &z, const Image &x, const Image &c)> after_z_update;
    /// Called at the end of every iteration.
    std::function<void(const AdmmState &)> after_iteration;
};

struct RestoreResult {
    Image image; ///< final x clamped to [0, 255]
    IterLog log;
};

/// ADMM: repeat { z update; R = z - c; x = alpha_update(R); c -= z - x }.
/// `Obs`/`Op` are (Image, MaskOp) for inpainting or (Measurements, CsOp)
/// for compressive sensing.
template <class Obs, class Op>
RestoreResult restore(const Obs &obs, const Op &op, const SolverConfig &cfg,
                      const std::optional<Image> &reference = std::nullopt,
                      const RestoreHooks &hooks = {}) {
    cfg.validate();
    AdmmState state = init_state(obs, op);
    if (reference)
        require_same_dims(*reference, state.z, "restore reference");
    RestoreResult result;
    using clock = std::chrono::steady_clock;
    for (int t = 1; t <= cfg.iters; ++t) {
        const auto start = clock::now();
        Image z = z_update(obs, op, state.x, state.c, cfg.rho);
        if (hooks.after_z_update)
            hooks.after_z_update(t, z, state.x, state.c);
        Image r = z;
        {
            auto rd = r.data();
            const auto cd = state.c.data();
            for (std::size_t j = 0; j < rd.size(); ++j)
                rd[j] -= cd[j];
        }
        Image x = alpha_update(r, cfg).x;
        state.c = multiplier_update(state.c, z, x);
        state.z = std::move(z);
        state.x = std::move(x);
        state.iter = t;
        detail::require(all_finite(state.x) && all_finite(state.z) && all_finite(state.c),
                        Errc::NonFinite, "ADMM produced non-finite pixels at iteration " +
                                             std::to_string(t));

        IterRecord rec;
        rec.iter = t;
        rec.fidelity = data_fidelity(obs, op, state.z);
        if (reference)
            rec.psnr = psnr(clamp_to_8bit_range(state.x), *reference);
        rec.seconds = std::chrono::duration<double>(clock::now() - start).count();
        result.log.records.push_back(rec);
        if (hooks.after_iteration)
            hooks.after_iteration(state);
    }
    result.image = clamp_to_8bit_range(state.x);
    return result;
}

} // namespace gsc
