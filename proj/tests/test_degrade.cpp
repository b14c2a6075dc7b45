#include "support.hpp"

#include <gsc/degrade.hpp>
#include <gsc/rng.hpp>

#include <gtest/gtest.h>

#include <array>

namespace gsc {
namespace {

TEST(Pcg32, ReferenceSequence) {
    // First outputs of the reference pcg32 demo, seeded (42, 54).
    Pcg32 rng(42, 54);
    const std::array<std::uint32_t, 6> want{0xa15c02b7, 0x7b47f409, 0xba1d3330,
                                            0x83d2f293, 0xbfa4784b, 0xcbed606e};
    for (const auto w : want)
        EXPECT_EQ(rng.next_u32(), w);
}

TEST(Pcg32, NormalMoments) {
    Pcg32 rng(1, 2);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        sum += v;
        sq += v * v;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(RandomMask, CountsAndDeterminism) {
    const auto all = make_random_mask(7, 5, 0.0, 3);
    EXPECT_EQ(all.observed_count(), 35u);
    const auto m = make_random_mask(10, 10, 0.8, 99);
    EXPECT_EQ(m.observed_count(), 20u);
    EXPECT_EQ(make_random_mask(10, 10, 0.8, 99), m);
    EXPECT_NE(make_random_mask(10, 10, 0.8, 100), m);
    EXPECT_THROW(make_random_mask(10, 10, 1.0, 0), Error);
}

TEST(TextMask, Thresholding) {
    EXPECT_EQ(mask_from_image(Image(4, 3, 0.0), 128).observed_count(), 12u);
    try {
        mask_from_image(Image(4, 3, 255.0), 128);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::EmptyMask);
    }
    Image overlay(6, 6, 0.0);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            overlay(r, c) = (r + c) % 3 == 0 ? 255.0 : 10.0;
    const auto m = mask_from_image(overlay, 128);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            EXPECT_EQ(m.observed[static_cast<std::size_t>(r) * 6 + c] != 0, overlay(r, c) < 128);
}

TEST(MaskImage, RoundTrip) {
    const auto m = make_random_mask(9, 8, 0.6, 5);
    EXPECT_EQ(mask_from_mask_image(mask_to_image(m)), m);
}

TEST(ApplyMask, Properties) {
    test::TestRng rng(91);
    const Image img = rng.image(10, 10);
    EXPECT_EQ(apply_mask(make_random_mask(10, 10, 0.0, 0), img), img);

    MaskOp single{10, 10, std::vector<std::uint8_t>(100, 0)};
    single.observed[37] = 1;
    const Image one = apply_mask(single, img);
    for (std::size_t i = 0; i < 100; ++i)
        EXPECT_EQ(one.data()[i], i == 37 ? img.data()[i] : 0.0);

    const auto m = make_random_mask(10, 10, 0.5, 1);
    const Image once = apply_mask(m, img);
    EXPECT_EQ(apply_mask(m, once), once);

    const Image other = rng.image(10, 10);
    double lhs = 0.0, rhs = 0.0;
    const Image hx = apply_mask(m, img), hy = apply_mask(m, other);
    for (std::size_t i = 0; i < 100; ++i) {
        lhs += hx.data()[i] * other.data()[i];
        rhs += img.data()[i] * hy.data()[i];
    }
    EXPECT_NEAR(lhs, rhs, 1e-9);
    EXPECT_THROW(apply_mask(m, Image(9, 10)), Error);
}

TEST(CsOp, RowCounts) {
    EXPECT_EQ(make_cs_op(32, 0.1, 0).rows_per_block(), 102);
    EXPECT_EQ(make_cs_op(32, 1.0, 0).rows_per_block(), 1024);
    EXPECT_EQ(make_cs_op(4, 0.01, 0).rows_per_block(), 1);
    EXPECT_THROW(make_cs_op(32, 0.0, 0), Error);
    EXPECT_THROW(make_cs_op(32, 1.5, 0), Error);
}

TEST(CsOp, OrthonormalRowsAndDeterminism) {
    const auto op = make_cs_op(8, 0.3, 17);
    const auto &phi = op.matrix(3);
    const Eigen::Index m = op.rows_per_block();
    EXPECT_LE((phi * phi.transpose() - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_EQ(generate_cs_matrix(17, 8, static_cast<int>(m), 3), phi);
    EXPECT_NE(generate_cs_matrix(17, 8, static_cast<int>(m), 4), phi);
    EXPECT_NE(generate_cs_matrix(18, 8, static_cast<int>(m), 3), phi);

    test::TestRng rng(92);
    for (int i = 0; i < 20; ++i) {
        const Eigen::VectorXd x = rng.vector(64);
        EXPECT_LE((phi * x).norm(), x.norm() + 1e-8);
    }
}

TEST(CsMeasure, FullRatioInverts) {
    test::TestRng rng(93);
    const Image img = rng.image(16, 8);
    const auto op = make_cs_op(8, 1.0, 4);
    EXPECT_LE(test::max_abs_diff(cs_adjoint(op, cs_measure(op, img)), img), 1e-8);
}

TEST(CsMeasure, ZeroImageAndZeroMeasurements) {
    const auto op = make_cs_op(8, 0.25, 4);
    const auto meas = cs_measure(op, Image(16, 16, 0.0));
    ASSERT_EQ(meas.blocks.size(), 4u);
    for (const auto &b : meas.blocks) {
        EXPECT_EQ(b.size(), 16);
        EXPECT_TRUE((b.array() == 0.0).all());
    }
    EXPECT_EQ(cs_adjoint(op, meas), Image(16, 16, 0.0));
}

TEST(CsMeasure, MatchesDenseMatVec) {
    test::TestRng rng(94);
    const Image img = rng.image(32, 32);
    const auto op = make_cs_op(32, 0.1, 8);
    const auto meas = cs_measure(op, img);
    ASSERT_EQ(meas.blocks.size(), 1u);
    const auto &phi = op.matrix(0);
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
        double acc = 0.0;
        for (int c = 0; c < 32; ++c)
            for (int r = 0; r < 32; ++r)
                acc += phi(i, c * 32 + r) * img(r, c);
        EXPECT_NEAR(meas.blocks[0][i], acc, 1e-10);
    }
}

TEST(CsAdjoint, InnerProductIdentity) {
    test::TestRng rng(95);
    const auto op = make_cs_op(8, 0.4, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const Image x = rng.image(24, 16, -1, 1);
        Measurements y{24, 16, 8, {}};
        for (int i = 0; i < 6; ++i)
            y.blocks.push_back(rng.vector(op.rows_per_block()));
        const auto px = cs_measure(op, x);
        double lhs = 0.0;
        for (std::size_t b = 0; b < 6; ++b)
            lhs += px.blocks[b].dot(y.blocks[b]);
        const Image pty = cs_adjoint(op, y);
        double rhs = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            rhs += x.data()[i] * pty.data()[i];
        EXPECT_NEAR(lhs, rhs, 1e-10);
    }
}

TEST(CsMeasure, DimensionErrors) {
    const auto op = make_cs_op(8, 0.5, 0);
    EXPECT_THROW(cs_measure(op, Image(12, 8)), Error);
    Measurements bad{8, 8, 8, {Eigen::VectorXd::Zero(3)}};
    EXPECT_THROW(cs_adjoint(op, bad), Error);
}

TEST(Noise, DeterministicAndCentred) {
    const Image img(64, 64, 100.0);
    const Image a = add_gaussian_noise(img, 2.0, 5);
    EXPECT_EQ(a, add_gaussian_noise(img, 2.0, 5));
    double sum = 0.0;
    for (double v : a.data())
        sum += v - 100.0;
    EXPECT_NEAR(sum / 4096.0, 0.0, 0.15);
    EXPECT_EQ(add_gaussian_noise(img, 0.0, 5), img);
}

} // namespace
} // namespace gsc
