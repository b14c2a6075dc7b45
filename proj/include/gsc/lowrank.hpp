#pragma once

#include <gsc/error.hpp>

#include <Eigen/Core>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gsc {

/// Singular values at or below this are treated as zero for rank decisions.
inline constexpr double kRankTolerance = 1e-12;

/// Default cap on generalized soft-thresholding fixed-point iterations.
inline constexpr int kGstMaxIterations = 50;

/// Thin SVD m = u * diag(s) * v^T with s non-increasing.
struct SvdFactors {
    Eigen::MatrixXd u; // n1 x r
    Eigen::VectorXd s; // r = min(n1, n2)
    Eigen::MatrixXd v; // n2 x r

    Eigen::MatrixXd reconstruct() const { return u * s.asDiagonal() * v.transpose(); }

    Eigen::Index rank() const {
        return static_cast<Eigen::Index>((s.array() > kRankTolerance).count());
    }
};

namespace detail {
inline void require_finite(const Eigen::MatrixXd &m, const char *what) {
    require(m.allFinite(), Errc::NonFinite, std::string(what) + ": non-finite input");
}
} // namespace detail

/// Thin SVD. Each u column is sign-normalized so its first nonzero entry is
/// positive (the matching v column flips with it).
inline SvdFactors svd(const Eigen::MatrixXd &m) {
    detail::require_finite(m, "svd");
    SvdFactors out;
    if (m.size() == 0) {
        out.u.resize(m.rows(), 0);
        out.v.resize(m.cols(), 0);
        return out;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = dec.matrixU();
    out.s = dec.singularValues();
    out.v = dec.matrixV();
    for (Eigen::Index j = 0; j < out.u.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.u.rows(); ++i) {
            const double x = out.u(i, j);
            if (x == 0.0)
                continue;
            if (x < 0.0) {
                out.u.col(j) *= -1.0;
                out.v.col(j) *= -1.0;
            }
            break;
        }
    }
    return out;
}

/// sign(a) * max(|a| - tau, 0).
inline double soft(double a, double tau) {
    detail::require(tau >= 0.0, Errc::InvalidArgument, "soft: negative threshold");
    const double mag = std::max(std::abs(a) - tau, 0.0);
    return a < 0.0 ? -mag : mag;
}

/// Singular value soft-thresholding, the proximal map of tau * nuclear norm.
inline Eigen::MatrixXd svt(const Eigen::MatrixXd &q, double tau) {
    detail::require(tau >= 0.0, Errc::InvalidArgument, "svt: negative threshold");
    const auto f = svd(q);
    Eigen::VectorXd shrunk = f.s;
    for (Eigen::Index i = 0; i < shrunk.size(); ++i)
        shrunk[i] = soft(f.s[i], tau);
    return f.u * shrunk.asDiagonal() * f.v.transpose();
}

/// Threshold below which the l_p proximal map returns zero.
inline double gst_threshold(double lambda, double p) noexcept {
    const double base = 2.0 * lambda * (1.0 - p);
    return std::pow(base, 1.0 / (2.0 - p)) +
           lambda * p * std::pow(base, (p - 1.0) / (2.0 - p));
}

/// Generalized soft-thresholding: global minimizer of
/// 0.5 * (x - y)^2 + lambda * |x|^p for 0 < p <= 1.
///
/// Above the threshold, x <- |y| - lambda*p*x^(p-1) is iterated from x = |y|
/// until the update stalls or `max_iters` is reached. The map contracts
/// with rate at most p/2 on the branch it starts in.
inline double gst_scalar(double y, double lambda, double p,
                         int max_iters = kGstMaxIterations) {
    detail::require(p > 0.0 && p <= 1.0, Errc::InvalidArgument,
                    "gst: exponent must lie in (0, 1]");
    detail::require(lambda >= 0.0, Errc::InvalidArgument, "gst: negative lambda");
    if (p == 1.0)
        return soft(y, lambda);
    if (lambda == 0.0)
        return y;
    const double ay = std::abs(y);
    if (ay <= gst_threshold(lambda, p))
        return 0.0;
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * ay;
    double x = ay;
    for (int it = 0; it < max_iters; ++it) {
        const double next = ay - lambda * p * std::pow(x, p - 1.0);
        const bool done = std::abs(next - x) <= tol;
        x = next;
        if (done)
            break;
    }
    return y < 0.0 ? -x : x;
}

enum class NormVariant { NNM, WNNM, SNM, WSNM };

constexpr std::string_view to_string(NormVariant v) noexcept {
    switch (v) {
    case NormVariant::NNM: return "NNM";
    case NormVariant::WNNM: return "WNNM";
    case NormVariant::SNM: return "SNM";
    case NormVariant::WSNM: return "WSNM";
    }
    return "?";
}

/// w_j = 1 for every singular value.
struct UniformWeights {};
/// Explicit per-singular-value weights.
struct ExplicitWeights {
    std::vector<double> values;
};
/// w_j = 1 / (sigma_j + eps), sigma_j the input's own singular values.
struct ReciprocalWeights {
    double eps = 0.1;
};
using WeightRule = std::variant<UniformWeights, ExplicitWeights, ReciprocalWeights>;

/// One of the four nuclear-norm surrogates, parameterized by the Schatten
/// exponent p and the weight rule. Build through the named constructors so
/// the variant/parameter pairing stays consistent.
class NormKind {
  public:
    static NormKind nnm() { return NormKind(NormVariant::NNM, 1.0, UniformWeights{}); }
    static NormKind wnnm(WeightRule weights) {
        return NormKind(NormVariant::WNNM, 1.0, std::move(weights));
    }
    static NormKind snm(double p) { return NormKind(NormVariant::SNM, p, UniformWeights{}); }
    static NormKind wsnm(double p, WeightRule weights) {
        return NormKind(NormVariant::WSNM, p, std::move(weights));
    }

    NormVariant variant() const noexcept { return variant_; }
    double p() const noexcept { return p_; }
    const WeightRule &weights() const noexcept { return weights_; }

    /// Weight vector for a spectrum of the given singular values.
    Eigen::VectorXd materialize(const Eigen::VectorXd &sigma) const {
        Eigen::VectorXd w(sigma.size());
        std::visit(
            [&](const auto &rule) {
                using T = std::decay_t<decltype(rule)>;
                if constexpr (std::is_same_v<T, UniformWeights>) {
                    w.setOnes();
                } else if constexpr (std::is_same_v<T, ExplicitWeights>) {
                    detail::require(rule.values.size() == static_cast<std::size_t>(sigma.size()),
                                    Errc::DimensionMismatch,
                                    "weight count must equal min(n1, n2)");
                    for (Eigen::Index i = 0; i < w.size(); ++i)
                        w[i] = rule.values[static_cast<std::size_t>(i)];
                } else {
                    detail::require(rule.eps > 0.0, Errc::InvalidArgument,
                                    "reciprocal weight eps must be positive");
                    for (Eigen::Index i = 0; i < w.size(); ++i)
                        w[i] = 1.0 / (std::abs(sigma[i]) + rule.eps);
                }
            },
            weights_);
        detail::require((w.array() >= 0.0).all() && w.allFinite(), Errc::InvalidArgument,
                        "weights must be finite and non-negative");
        return w;
    }

  private:
    NormKind(NormVariant variant, double p, WeightRule weights)
        : variant_{variant}, p_{p}, weights_{std::move(weights)} {
        detail::require(p > 0.0 && p <= 1.0, Errc::InvalidArgument,
                        "Schatten exponent must lie in (0, 1]");
    }

    NormVariant variant_;
    double p_;
    WeightRule weights_;
};

/// Shrunken singular values for a given spectrum under `kind` at scale tau.
inline Eigen::VectorXd shrink_spectrum(const Eigen::VectorXd &sigma, const NormKind &kind,
                                       double tau, int gst_iters = kGstMaxIterations) {
    detail::require(tau >= 0.0, Errc::InvalidArgument, "prox: negative threshold");
    const Eigen::VectorXd w = kind.materialize(sigma);
    Eigen::VectorXd out(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        const double t = tau * w[i];
        const double v = kind.p() == 1.0 ? soft(sigma[i], t)
                                         : gst_scalar(sigma[i], t, kind.p(), gst_iters);
        out[i] = std::max(v, 0.0);
    }
    return out;
}

/// Proximal map of tau * R(X) for the selected nuclear norm, applied per
/// singular value. Singular vectors keep the input ordering.
inline Eigen::MatrixXd prox_norm(const Eigen::MatrixXd &y, const NormKind &kind, double tau,
                                 int gst_iters = kGstMaxIterations) {
    const auto f = svd(y);
    const Eigen::VectorXd shrunk = shrink_spectrum(f.s, kind, tau, gst_iters);
    return f.u * shrunk.asDiagonal() * f.v.transpose();
}

} // namespace gsc
