#pragma once

#include <gsc/config.hpp>
#include <gsc/error.hpp>
#include <gsc/grouping.hpp>
#include <gsc/image.hpp>
#include <gsc/lowrank.hpp>

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <vector>

namespace gsc {

struct SingularSpectrum {
    std::string label;
    std::vector<double> values; // non-increasing, non-negative
};

/// Per-norm shrinkage scales.
struct NormThresholds {
    double nnm = 0.0;
    double wnnm = 0.0;
    double snm = 0.0;
    double wsnm = 0.0;

    static NormThresholds shared(double tau) { return {tau, tau, tau, tau}; }
};

inline std::vector<double> to_std(const Eigen::VectorXd &v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

/// Spectra of a clean group, its degraded counterpart, and the four
/// nuclear-norm proximal restorations of the degraded group. Weighted
/// variants use w_j = 1 / (sigma_j + eps_w) on the degraded spectrum;
/// the Schatten variants use exponent p.
inline std::vector<SingularSpectrum>
compare_spectra(const Eigen::MatrixXd &clean_group, const Eigen::MatrixXd &degraded_group,
                const NormThresholds &taus, double p, double eps_w,
                int gst_iters = kGstMaxIterations) {
    detail::require(clean_group.rows() == degraded_group.rows() &&
                        clean_group.cols() == degraded_group.cols(),
                    Errc::DimensionMismatch, "clean and degraded groups differ in shape");
    const Eigen::VectorXd truth = svd(clean_group).s;
    const Eigen::VectorXd degraded = svd(degraded_group).s;
    const ReciprocalWeights rule{eps_w};

    std::vector<SingularSpectrum> out;
    out.push_back({"ground-truth", to_std(truth)});
    out.push_back({"degraded", to_std(degraded)});
    out.push_back({"NNM", to_std(shrink_spectrum(degraded, NormKind::nnm(), taus.nnm))});
    out.push_back(
        {"WNNM", to_std(shrink_spectrum(degraded, NormKind::wnnm(rule), taus.wnnm))});
    out.push_back(
        {"SNM", to_std(shrink_spectrum(degraded, NormKind::snm(p), taus.snm, gst_iters))});
    out.push_back({"WSNM", to_std(shrink_spectrum(degraded, NormKind::wsnm(p, rule),
                                                  taus.wsnm, gst_iters))});
    return out;
}

/// Matches the group on the clean image at `ref` and gathers the same member
/// coordinates from both images before comparing spectra.
inline std::vector<SingularSpectrum> spectra_at(const Image &clean, const Image &degraded,
                                                PatchCoord ref, const SolverConfig &cfg,
                                                const NormThresholds &taus) {
    require_same_dims(clean, degraded, "spectra_at");
    const auto gi = match_group(clean, ref, cfg.patch, cfg.k, cfg.window);
    return compare_spectra(gather(clean, gi, cfg.patch).matrix,
                           gather(degraded, gi, cfg.patch).matrix, taus, cfg.p, cfg.eps_w,
                           cfg.gst_iters);
}

/// l2 distance between two spectra.
inline double spectrum_error(const SingularSpectrum &a, const SingularSpectrum &b) {
    detail::require(a.values.size() == b.values.size(), Errc::DimensionMismatch,
                    "spectra differ in length");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double diff = a.values[i] - b.values[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

/// Smallest tau for which singular value soft-thresholding removes at least
/// `removed_fraction` of the spectral energy sum(sigma^2).
inline double energy_threshold(const Eigen::VectorXd &sigma, double removed_fraction) {
    detail::require(removed_fraction >= 0.0 && removed_fraction <= 1.0,
                    Errc::InvalidArgument, "removed fraction must lie in [0, 1]");
    const double total = sigma.squaredNorm();
    const double keep = (1.0 - removed_fraction) * total;
    auto kept = [&](double tau) {
        return (sigma.array() - tau).max(0.0).square().sum();
    };
    double lo = 0.0;
    double hi = sigma.size() > 0 ? sigma.maxCoeff() : 0.0;
    if (kept(lo) <= keep)
        return lo;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        (kept(mid) <= keep ? hi : lo) = mid;
    }
    return hi;
}

/// Threshold that both removes `removed_fraction` of the energy and
/// truncates the NNM output to at most `rank` singular values.
inline double calibrate_nnm_threshold(const Eigen::VectorXd &sigma, double removed_fraction,
                                      Eigen::Index rank) {
    double tau = energy_threshold(sigma, removed_fraction);
    if (rank >= 0 && rank < sigma.size())
        tau = std::max(tau, sigma[rank]);
    return tau;
}

} // namespace gsc
