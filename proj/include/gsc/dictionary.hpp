#pragma once

#include <gsc/error.hpp>
#include <gsc/lowrank.hpp>

#include <Eigen/Core>

namespace gsc {

/// Per-group adaptive dictionary. Atom j is the rank-1 matrix
/// u.col(j) * v.col(j)^T; atoms are stored factorized. `mu` holds the source
/// group's singular values, i.e. its coefficients in this dictionary.
struct AdaptiveDict {
    Eigen::MatrixXd u;  // d^2 x m
    Eigen::MatrixXd v;  // k x m
    Eigen::VectorXd mu; // m, non-increasing

    Eigen::Index atoms() const noexcept { return mu.size(); }

    /// Dense atom j, for inspection and tests.
    Eigen::MatrixXd atom(Eigen::Index j) const { return u.col(j) * v.col(j).transpose(); }
};

inline AdaptiveDict learn_dictionary(const Eigen::MatrixXd &group) {
    auto f = svd(group);
    return AdaptiveDict{std::move(f.u), std::move(f.v), std::move(f.s)};
}

/// Sum_j alpha_j * atom_j.
inline Eigen::MatrixXd synthesize(const AdaptiveDict &dict, const Eigen::VectorXd &alpha) {
    detail::require(alpha.size() == dict.atoms(), Errc::DimensionMismatch,
                    "coefficient length must equal atom count");
    return dict.u * alpha.asDiagonal() * dict.v.transpose();
}

/// Coefficient-domain l_p solve: alpha_j = GST(mu_j, tau * w_j, p). By the
/// dictionary's orthonormality this is the exact minimizer of
/// 0.5 * ||group - D alpha||_F^2 + tau * sum_j w_j |alpha_j|^p.
inline Eigen::VectorXd solve_group_lp(const AdaptiveDict &dict, double tau,
                                      const Eigen::VectorXd &weights, double p,
                                      int gst_iters = kGstMaxIterations) {
    detail::require(weights.size() == dict.atoms(), Errc::DimensionMismatch,
                    "weight length must equal atom count");
    detail::require(tau >= 0.0, Errc::InvalidArgument, "negative tau");
    detail::require((weights.array() >= 0.0).all(), Errc::InvalidArgument,
                    "weights must be non-negative");
    Eigen::VectorXd alpha(dict.atoms());
    for (Eigen::Index j = 0; j < alpha.size(); ++j)
        alpha[j] = gst_scalar(dict.mu[j], tau * weights[j], p, gst_iters);
    return alpha;
}

} // namespace gsc
