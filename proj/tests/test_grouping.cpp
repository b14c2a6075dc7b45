#include "support.hpp"

#include <gsc/grouping.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

namespace gsc {
namespace {

TEST(ReferenceCoords, PatchSizedImage) {
    for (int stride = 1; stride <= 8; ++stride) {
        const auto coords = reference_coords(8, 8, 8, stride);
        ASSERT_EQ(coords.size(), 1u);
        EXPECT_EQ(coords[0], (PatchCoord{0, 0}));
    }
}

TEST(ReferenceCoords, SnapsToBorder) {
    const auto coords = reference_coords(10, 10, 8, 4);
    const std::vector<PatchCoord> want{{0, 0}, {0, 2}, {2, 0}, {2, 2}};
    EXPECT_EQ(coords, want);
}

TEST(ReferenceCoords, Errors) {
    EXPECT_THROW(reference_coords(7, 10, 8, 4), Error);
    EXPECT_THROW(reference_coords(10, 10, 8, 9), Error);
    EXPECT_THROW(reference_coords(10, 10, 8, 0), Error);
}

TEST(ReferenceCoords, CoversEveryPixelInRowMajorOrder) {
    test::TestRng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = rng.integer(1, 9);
        const int w = rng.integer(d, 40), h = rng.integer(d, 40);
        const int stride = rng.integer(1, d);
        const auto coords = reference_coords(w, h, d, stride);
        EXPECT_TRUE(std::is_sorted(coords.begin(), coords.end()));
        std::vector<int> hits(static_cast<std::size_t>(w) * h, 0);
        for (const auto pc : coords) {
            ASSERT_LE(pc.row + d, h);
            ASSERT_LE(pc.col + d, w);
            EXPECT_TRUE((pc.row % stride == 0 || pc.row == h - d) &&
                        (pc.col % stride == 0 || pc.col == w - d));
            for (int r = pc.row; r < pc.row + d; ++r)
                for (int c = pc.col; c < pc.col + d; ++c)
                    ++hits[static_cast<std::size_t>(r) * w + c];
        }
        EXPECT_TRUE(std::ranges::all_of(hits, [](int n) { return n > 0; }));
    }
}

/// Every window candidate sorted by (distance, row-major order); the
/// reference is pulled to the front.
std::vector<PatchCoord> exhaustive_match(const Image &img, PatchCoord ref, int d, int k,
                                         int window) {
    const Eigen::VectorXd rp = extract_patch(img, ref, d);
    std::vector<std::pair<double, PatchCoord>> all;
    for (int r = 0; r + d <= img.height(); ++r)
        for (int c = 0; c + d <= img.width(); ++c) {
            const bool inside = r >= ref.row - window / 2 && r < ref.row - window / 2 + window &&
                                c >= ref.col - window / 2 && c < ref.col - window / 2 + window;
            if (inside && !(PatchCoord{r, c} == ref))
                all.push_back({(extract_patch(img, {r, c}, d) - rp).squaredNorm(), {r, c}});
        }
    std::stable_sort(all.begin(), all.end(),
                     [](const auto &a, const auto &b) { return a.first < b.first; });
    std::vector<PatchCoord> out{ref};
    for (int i = 0; i + 1 < k; ++i)
        out.push_back(all[static_cast<std::size_t>(i)].second);
    return out;
}

TEST(MatchGroup, SingleMemberIsReference) {
    test::TestRng rng(2);
    const Image img = rng.image(20, 20);
    const auto gi = match_group(img, {5, 7}, 4, 1, 9);
    ASSERT_EQ(gi.members.size(), 1u);
    EXPECT_EQ(gi.members[0], (PatchCoord{5, 7}));
    EXPECT_EQ(gi.reference, (PatchCoord{5, 7}));
}

TEST(MatchGroup, ConstantImageTakesRowMajorFirst) {
    const Image img(20, 20, 3.0);
    const auto gi = match_group(img, {0, 0}, 4, 5, 9);
    const std::vector<PatchCoord> want{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}};
    EXPECT_EQ(gi.members, want);
}

TEST(MatchGroup, ConstantImageInteriorKeepsReferenceThenRowMajor) {
    const Image img(20, 20, 3.0);
    const auto gi = match_group(img, {8, 8}, 4, 5, 9);
    const std::vector<PatchCoord> want{{8, 8}, {4, 4}, {4, 5}, {4, 6}, {4, 7}};
    EXPECT_EQ(gi.members, want);
}

TEST(MatchGroup, AgreesWithExhaustiveSort) {
    test::TestRng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Image img = rng.image(32, 32);
        const PatchCoord ref{rng.integer(0, 28), rng.integer(0, 28)};
        const auto gi = match_group(img, ref, 4, 8, 16);
        EXPECT_EQ(gi.members, exhaustive_match(img, ref, 4, 8, 16));
    }
}

TEST(MatchGroup, MembersStayInWindowAndDistancesAreOrdered) {
    test::TestRng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const Image img = rng.image(30, 26);
        const int d = 5, k = 12, window = 11;
        const PatchCoord ref{rng.integer(0, 26 - d), rng.integer(0, 30 - d)};
        const auto gi = match_group(img, ref, d, k, window);
        ASSERT_EQ(gi.members.size(), static_cast<std::size_t>(k));
        EXPECT_EQ(gi.members[0], ref);
        const auto rows = window_range(ref.row, window, img.height(), d);
        const auto cols = window_range(ref.col, window, img.width(), d);
        std::set<PatchCoord> chosen(gi.members.begin(), gi.members.end());
        EXPECT_EQ(chosen.size(), gi.members.size());
        double prev = 0.0, worst = 0.0;
        for (std::size_t j = 1; j < gi.members.size(); ++j) {
            const auto m = gi.members[j];
            EXPECT_TRUE(m.row >= rows.lo && m.row < rows.hi && m.col >= cols.lo && m.col < cols.hi);
            EXPECT_LE(std::abs(m.row - ref.row), window / 2 + 1);
            const double dist = patch_distance(img, ref, m, d);
            EXPECT_GE(dist, prev);
            prev = dist;
            worst = std::max(worst, dist);
        }
        for (int r = rows.lo; r < rows.hi; ++r)
            for (int c = cols.lo; c < cols.hi; ++c)
                if (!chosen.contains({r, c}))
                    EXPECT_GE(patch_distance(img, ref, {r, c}, d), worst);
    }
}

TEST(MatchGroup, InvariantUnderConstantShift) {
    test::TestRng rng(51);
    const Image img = rng.image(24, 24);
    Image shifted = img;
    for (double &v : shifted.data())
        v += 64.0; // exact in binary, so distances are bitwise unchanged
    for (const PatchCoord ref : {PatchCoord{0, 0}, PatchCoord{10, 7}, PatchCoord{18, 18}})
        EXPECT_EQ(match_group(img, ref, 6, 10, 13).members,
                  match_group(shifted, ref, 6, 10, 13).members);
}

TEST(MatchGroup, TooFewCandidates) {
    const Image img(10, 10);
    try {
        match_group(img, {0, 0}, 8, 5, 25); // 3x3 positions, k=5 fits
        match_group(img, {0, 0}, 8, 10, 25);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::TooFewCandidates);
    }
}

TEST(MatchGroup, OutOfBoundsReference) {
    EXPECT_THROW(match_group(Image(10, 10), {3, 3}, 8, 1, 5), Error);
}

TEST(Gather, ColumnsEqualExtractedPatches) {
    test::TestRng rng(61);
    const Image img = rng.image(25, 19);
    const auto gi = match_group(img, {6, 9}, 5, 9, 11);
    const auto g = gather(img, gi, 5);
    ASSERT_EQ(g.matrix.rows(), 25);
    ASSERT_EQ(g.matrix.cols(), 9);
    for (std::size_t j = 0; j < gi.members.size(); ++j)
        EXPECT_EQ(Eigen::VectorXd(g.matrix.col(static_cast<Eigen::Index>(j))),
                  extract_patch(img, gi.members[j], 5));
}

TEST(Gather, SingleMember) {
    test::TestRng rng(62);
    const Image img = rng.image(12, 12);
    const auto g = gather(img, match_group(img, {2, 3}, 4, 1, 5), 4);
    EXPECT_EQ(g.matrix.cols(), 1);
    EXPECT_EQ(Eigen::VectorXd(g.matrix.col(0)), extract_patch(img, {2, 3}, 4));
}

TEST(Gather, ConstantImageIsRankOne) {
    const Image img(16, 16, 9.0);
    const auto g = gather(img, match_group(img, {4, 4}, 4, 6, 9), 4);
    EXPECT_TRUE((g.matrix.array() == 9.0).all());
}

TEST(Gather, OutOfBoundsMember) {
    GroupIndex gi{{0, 0}, {{0, 0}, {7, 7}}};
    EXPECT_THROW(gather(Image(8, 8), gi, 4), Error);
}

} // namespace
} // namespace gsc
