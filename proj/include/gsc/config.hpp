#pragma once

#include <gsc/error.hpp>
#include <gsc/lowrank.hpp>

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gsc {

/// How the per-group spread delta_i of the coefficient vector is measured
/// in the regularization rule lambda_i = 2*sqrt(2)*sigma^2 / (delta_i + eps_l).
enum class DeltaMode { StdDev, Variance };

/// Per-group weights for the coefficient-domain l_p solve.
enum class GroupWeights {
    Reciprocal, ///< w_j = 1 / (|gamma_j| + eps_w)
    Uniform,    ///< w_j = 1
};

struct SolverConfig {
    int patch = 8;   ///< patch side d (patch vectors have d^2 entries)
    int k = 60;      ///< patches per group
    int window = 25; ///< search window side I
    int stride = 4;  ///< reference patch stride
    double rho = 0.0003;
    double p = 0.45;
    double sigma = std::sqrt(2.0);
    double eps_w = 0.1; ///< weight-rule offset
    double eps_l = 0.3; ///< lambda-rule offset
    int iters = 60;
    std::uint64_t seed = 0;
    int workers = 1;
    DeltaMode delta = DeltaMode::StdDev;
    GroupWeights weights = GroupWeights::Reciprocal;
    int gst_iters = kGstMaxIterations;

    void validate() const {
        detail::require(patch >= 1, Errc::InvalidArgument, "patch must be >= 1");
        detail::require(k >= 1, Errc::InvalidArgument, "k must be >= 1");
        detail::require(window >= 1, Errc::InvalidArgument, "window must be >= 1");
        detail::require(stride >= 1 && stride <= patch, Errc::InvalidArgument,
                        "stride must satisfy 1 <= stride <= patch");
        detail::require(rho > 0.0 && std::isfinite(rho), Errc::InvalidArgument, "rho must be > 0");
        detail::require(p > 0.0 && p <= 1.0, Errc::InvalidArgument, "p must lie in (0, 1]");
        detail::require(sigma >= 0.0, Errc::InvalidArgument, "sigma must be >= 0");
        detail::require(eps_w > 0.0, Errc::InvalidArgument, "eps_w must be > 0");
        detail::require(eps_l > 0.0, Errc::InvalidArgument, "eps_l must be > 0");
        detail::require(iters >= 1, Errc::InvalidArgument, "iters must be >= 1");
        detail::require(workers >= 1, Errc::InvalidArgument, "workers must be >= 1");
        detail::require(gst_iters >= 1, Errc::InvalidArgument, "gst_iters must be >= 1");
    }
};

struct Preset {
    std::string_view name;
    SolverConfig config;
};

namespace detail {
constexpr SolverConfig make_preset(int patch, int window, double rho, double p, double eps_l,
                                   int iters) {
    SolverConfig c;
    c.patch = patch;
    c.k = 60;
    c.window = window;
    c.stride = 4;
    c.rho = rho;
    c.p = p;
    c.eps_w = 0.1;
    c.eps_l = eps_l;
    c.iters = iters;
    return c;
}
} // namespace detail

/// Built-in experiment presets: inpainting at 80/70/60/50 % missing pixels
/// and with a text overlay, and block-CS at subrates 0.1/0.2/0.3.
inline const std::array<Preset, 8> &presets() {
    static const std::array<Preset, 8> table{{
        {"inpaint-80", detail::make_preset(8, 25, 0.0003, 0.45, 0.3, 60)},
        {"inpaint-70", detail::make_preset(8, 25, 0.0003, 0.45, 0.3, 60)},
        {"inpaint-60", detail::make_preset(8, 25, 0.03, 1.0, 0.3, 60)},
        {"inpaint-50", detail::make_preset(8, 25, 0.04, 1.0, 0.3, 60)},
        {"inpaint-text", detail::make_preset(10, 25, 0.06, 0.95, 0.3, 60)},
        {"cs-10", detail::make_preset(7, 20, 0.0001, 0.65, 0.4, 100)},
        {"cs-20", detail::make_preset(7, 20, 0.0005, 0.5, 0.4, 100)},
        {"cs-30", detail::make_preset(7, 20, 0.05, 1.0, 0.4, 100)},
    }};
    return table;
}

inline SolverConfig preset(std::string_view name) {
    for (const auto &p : presets())
        if (p.name == name)
            return p.config;
    throw Error(Errc::InvalidArgument, "unknown preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const SolverConfig &c) {
    return nlohmann::json{
        {"patch", c.patch},
        {"k", c.k},
        {"window", c.window},
        {"stride", c.stride},
        {"rho", c.rho},
        {"p", c.p},
        {"sigma", c.sigma},
        {"eps_w", c.eps_w},
        {"eps_l", c.eps_l},
        {"iters", c.iters},
        {"seed", c.seed},
        {"workers", c.workers},
        {"delta", c.delta == DeltaMode::StdDev ? "stddev" : "variance"},
        {"weights", c.weights == GroupWeights::Reciprocal ? "reciprocal" : "uniform"},
        {"gst_iters", c.gst_iters},
    };
}

/// Overlays every key present in `j` onto `base`. Unknown keys are rejected
/// so that typos do not silently fall back to defaults.
inline SolverConfig merge_json(SolverConfig base, const nlohmann::json &j) {
    detail::require(j.is_object(), Errc::MalformedData, "config must be a JSON object");
    try {
        for (const auto &[key, value] : j.items()) {
            if (key == "patch") base.patch = value.get<int>();
            else if (key == "k") base.k = value.get<int>();
            else if (key == "window") base.window = value.get<int>();
            else if (key == "stride") base.stride = value.get<int>();
            else if (key == "rho") base.rho = value.get<double>();
            else if (key == "p") base.p = value.get<double>();
            else if (key == "sigma") base.sigma = value.get<double>();
            else if (key == "eps_w") base.eps_w = value.get<double>();
            else if (key == "eps_l") base.eps_l = value.get<double>();
            else if (key == "iters") base.iters = value.get<int>();
            else if (key == "seed") base.seed = value.get<std::uint64_t>();
            else if (key == "workers") base.workers = value.get<int>();
            else if (key == "gst_iters") base.gst_iters = value.get<int>();
            else if (key == "delta") {
                const auto s = value.get<std::string>();
                detail::require(s == "stddev" || s == "variance", Errc::MalformedData,
                                "delta must be 'stddev' or 'variance'");
                base.delta = s == "stddev" ? DeltaMode::StdDev : DeltaMode::Variance;
            } else if (key == "weights") {
                const auto s = value.get<std::string>();
                detail::require(s == "reciprocal" || s == "uniform", Errc::MalformedData,
                                "weights must be 'reciprocal' or 'uniform'");
                base.weights = s == "reciprocal" ? GroupWeights::Reciprocal : GroupWeights::Uniform;
            } else {
                throw Error(Errc::MalformedData, "unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception &e) {
        throw Error(Errc::MalformedData, std::string("config: ") + e.what());
    }
    return base;
}

} // namespace gsc
