#include <gtest/gtest.h>

#include "fairgroups/color.hpp"
#include "fairgroups/core.hpp"

using namespace fairgroups;

namespace {

Dataset small_1d() {
    std::vector<Sample> s(4);
    s[0].l[0] = 0.0, s[0].y = 0;
    s[1].l[0] = 2.5, s[1].y = 1;
    s[2].l[0] = 5.0, s[2].y = 1;
    s[3].l[0] = 10.0, s[3].y = 0;
    return Dataset(s, 1);
}

}  // namespace

TEST(Dataset, RejectsInvalidSamples) {
    EXPECT_THROW(Dataset({}, 1), ValidationError);
    std::vector<Sample> s(1);
    EXPECT_THROW(Dataset(s, 3), ValidationError);
    s[0].y = 2;
    EXPECT_THROW(Dataset(s, 1), ValidationError);
    s[0].y = 1;
    s[0].score = 1.5;
    EXPECT_THROW(Dataset(s, 1), ValidationError);
    s[0].score.reset();
    s[0].l[0] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(Dataset(s, 1), ValidationError);
}

TEST(Dataset, OptionalColumnsMustBeUniform) {
    std::vector<Sample> s(2);
    s[0].score = 0.3;
    EXPECT_THROW(Dataset(s, 1), ValidationError);
    s[1].score = 0.6;
    const Dataset d(s, 1);
    EXPECT_TRUE(d.has_score());
    EXPECT_FALSE(d.has_y_hat());
    EXPECT_THROW(d.require_target(Target::YHat), ValidationError);
    EXPECT_EQ(d.outcome(0, Target::Score), 0);
    EXPECT_EQ(d.outcome(1, Target::Score), 1);
}

TEST(Grid, BinsAreHalfOpenWithClosedLastBin) {
    const Grid g({0.0, 1.0, 2.0, 3.0});
    EXPECT_EQ(g.bins(), 3u);
    EXPECT_EQ(g.bin_of(0.0), 0u);
    EXPECT_EQ(g.bin_of(0.999), 0u);
    EXPECT_EQ(g.bin_of(1.0), 1u);
    EXPECT_EQ(g.bin_of(3.0), 2u);
    EXPECT_FALSE(g.bin_of(-0.1).has_value());
    EXPECT_FALSE(g.bin_of(3.1).has_value());
    EXPECT_EQ(g.clamped_bin_of(-5.0), 0u);
    EXPECT_EQ(g.clamped_bin_of(7.0), 2u);
}

TEST(Grid, UniformEndsExactlyAtUpperBound) {
    const Grid g = Grid::uniform(0.1, 0.7, 7);
    EXPECT_EQ(g.bins(), 7u);
    EXPECT_EQ(g.lo(), 0.1);
    EXPECT_EQ(g.hi(), 0.7);
    EXPECT_THROW(Grid::uniform(1.0, 1.0, 4), ValidationError);
    EXPECT_THROW(Grid::uniform(0.0, 1.0, 1), ValidationError);
    EXPECT_THROW(Grid({0.0, 2.0, 1.0}), ValidationError);
}

TEST(Partition, SegmentsValidateBoundaries) {
    const Grid g = Grid::uniform(0, 10, 5);
    EXPECT_THROW(Partition::segments(g, {0, 2, 2, 5}), ValidationError);
    EXPECT_THROW(Partition::segments(g, {1, 5}), ValidationError);
    EXPECT_THROW(Partition::segments(g, {0, 4}), ValidationError);
    const Partition p = Partition::segments(g, {0, 2, 5});
    EXPECT_EQ(p.group_count(), 2u);
    EXPECT_TRUE(p.is_segmented());
    const double x = 3.9, y = 4.0;
    EXPECT_EQ(p.group_of(std::span(&x, 1)), 0u);
    EXPECT_EQ(p.group_of(std::span(&y, 1)), 1u);
}

TEST(Partition, LabelledBinsRenumberAndDetectRuns) {
    const Grid g = Grid::uniform(0, 6, 6);
    const std::vector<std::size_t> runs{4, 4, 1, 1, 1, 7};
    const Partition a = Partition::labelled_bins(g, runs);
    EXPECT_TRUE(a.is_segmented());
    EXPECT_EQ(std::vector<std::size_t>(a.boundaries().begin(), a.boundaries().end()),
              (std::vector<std::size_t>{0, 2, 5, 6}));
    EXPECT_TRUE(a.same_groups(Partition::segments(g, {0, 2, 5, 6})));

    const std::vector<std::size_t> split{2, 0, 0, 2, 1, 1};
    const Partition b = Partition::labelled_bins(g, split);
    EXPECT_FALSE(b.is_segmented());
    EXPECT_EQ(b.group_count(), 3u);
    EXPECT_EQ(std::vector<std::size_t>(b.bin_labels().begin(), b.bin_labels().end()),
              (std::vector<std::size_t>{0, 1, 1, 0, 2, 2}));
    EXPECT_THROW(b.boundaries(), ValidationError);
}

TEST(Partition, RectanglesMustTileTheBox) {
    const Grid gx = Grid::uniform(0, 4, 4), gy = Grid::uniform(0, 2, 2);
    EXPECT_THROW(Partition::rectangles(gx, gy, {{0, 2, 0, 2}}), ValidationError);
    EXPECT_THROW(Partition::rectangles(gx, gy, {{0, 3, 0, 2}, {2, 4, 0, 2}}), ValidationError);
    const Partition p = Partition::rectangles(gx, gy, {{0, 1, 0, 2}, {1, 4, 0, 1}, {1, 4, 1, 2}});
    EXPECT_EQ(p.group_count(), 3u);
    const double a[2] = {0.5, 1.5}, b[2] = {3.0, 0.2}, c[2] = {3.0, 2.0}, out[2] = {5.0, 1.9};
    EXPECT_EQ(p.group_of(a), 0u);
    EXPECT_EQ(p.group_of(b), 1u);
    EXPECT_EQ(p.group_of(c), 2u);
    EXPECT_FALSE(p.group_of(out).has_value());
    EXPECT_EQ(p.clamped_group_of(out), 2u);
}

TEST(AssignGroups, CountsAndOutOfRangePolicy) {
    const Dataset d = small_1d();
    const Partition p = Partition::segments(Grid({0.0, 4.0, 8.0}), {0, 1, 2});
    EXPECT_THROW(
        {
            try {
                assign_groups(d, p);
            } catch (const OutOfRangeError& e) {
                EXPECT_EQ(e.sample_index(), 3u);
                throw;
            }
        },
        OutOfRangeError);
    Warnings w;
    const GroupAssignment a = assign_groups(d, p, Target::Y, OutOfRange::Clamp, &w);
    EXPECT_EQ(a.labels, (std::vector<std::size_t>{0, 0, 1, 1}));
    EXPECT_EQ(a.counts, (std::vector<std::size_t>{2, 2}));
    EXPECT_EQ(a.positives, (std::vector<std::size_t>{1, 1}));
    EXPECT_EQ(a.clamped, 1u);
    EXPECT_EQ(w.size(), 1u);
}

TEST(AssignGroups, DimensionMismatch) {
    const Dataset d = small_1d();
    const Partition p = Partition::rectangles(Grid::uniform(0, 1, 2), Grid::uniform(0, 1, 2),
                                              {{0, 2, 0, 2}});
    EXPECT_THROW(assign_groups(d, p), ValidationError);
}

TEST(Color, ItaAndHue) {
    EXPECT_DOUBLE_EQ(lab_to_ita(50.0, 10.0), 0.0);
    EXPECT_NEAR(lab_to_ita(60.0, 10.0), 45.0, 1e-12);
    EXPECT_NEAR(lab_to_ita(40.0, 10.0), -45.0, 1e-12);
    EXPECT_THROW(lab_to_ita(60.0, 0.0), DomainError);
    EXPECT_NEAR(lab_to_hue(1.0, 1.0), 45.0, 1e-12);
    EXPECT_NEAR(lab_to_hue(-1.0, 0.0), 180.0, 1e-12);
    EXPECT_NEAR(lab_to_hue(0.0, -2.0), 270.0, 1e-12);
    EXPECT_THROW(lab_to_hue(0.0, 0.0), DomainError);
}

TEST(Target, NamesRoundTrip) {
    for (Target t : {Target::Y, Target::YHat, Target::Score}) EXPECT_EQ(parse_target(to_string(t)), t);
    EXPECT_THROW(parse_target("z"), ValidationError);
}
