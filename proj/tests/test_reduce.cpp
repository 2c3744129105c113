#include "fanpack/harness.hpp"
#include "fanpack/reduce.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace fanpack;

TEST(LiftReal, Examples) {
    HorizontalParallelogram p = liftReal(Rat(0), 7);
    EXPECT_EQ(p.base, Rat(1, 7));
    EXPECT_EQ(p.shear, Rat(0));
    EXPECT_EQ(p.height, Rat(1));
    EXPECT_EQ(p.width(), Rat(1, 7));

    EXPECT_EQ(liftReal(Rat(1), 4).width(), Rat(5, 4));

    p = liftReal(Rat(37, 100), 100);
    EXPECT_EQ(p.base, Rat(1, 100));
    EXPECT_EQ(p.shear, Rat(37, 100));
    EXPECT_EQ(p.area(), Rat(1, 100));

    EXPECT_THROW(liftReal(Rat(-1, 2), 3), InputError);
    EXPECT_THROW(liftReal(Rat(1, 2), 0), InputError);
}

TEST(PackerSorter, SingleRealUsesItsCornerCell) {
    for (const char* name : {"greedy", "onlinepacker", "randomfit"}) {
        PackerSorter ps(makePacker(name, 4), 10);
        size_t c = ps.place(Rat(1, 2));
        const ReductionStep& st = ps.steps().front();
        EXPECT_EQ(Rat(static_cast<int64_t>(c)), (st.x * Rat(10)).floor()) << name;
        GapCertificate g = gapCertificate(ps);
        EXPECT_TRUE(g.holds);
        EXPECT_FALSE(Rat(2) < g.cost);
        EXPECT_FALSE(g.width < Rat(1, 2) + Rat(1, 10));
    }
}

TEST(PackerSorter, CellsAreInjectiveAndGapCertificateHolds) {
    for (const char* name : {"greedy", "onlinepacker", "randomfit"}) {
        for (const char* fam : {"uniform", "reverse", "sawtooth", "bit-reversal", "two-cluster"}) {
            size_t n = 150;
            auto xs = makeStream(fam, n, 9);
            PackerSorter ps(makePacker(name, 9), n);
            std::set<size_t> cells;
            for (auto& x : xs) ASSERT_TRUE(cells.insert(ps.place(x)).second);
            auto rep = validatePlacements(ps.packer().placements(), Box2{Rat(0), Rat(0), Rat(0), Rat(1), true});
            ASSERT_TRUE(rep.ok) << rep.message;
            GapCertificate g = gapCertificate(ps);
            EXPECT_TRUE(g.holds) << name << " " << fam << " cost " << g.cost.toDouble() << " width " << g.width.toDouble();
            // order of the reals agrees with the left-to-right corners
            std::vector<ReductionStep> st = ps.steps();
            std::sort(st.begin(), st.end(), [](auto& a, auto& b) { return a.cell < b.cell; });
            std::vector<Rat> byCell;
            for (auto& s : st) byCell.push_back(s.s);
            EXPECT_EQ(byCell, ps.order());
            for (size_t i = 1; i < st.size(); ++i) EXPECT_TRUE(st[i - 1].x < st[i].x);
        }
    }
}

TEST(PackerSorter, SortedGridStreamIsCheap) {
    size_t n = 200;
    PackerSorter ps(makePacker("greedy"), n);
    for (size_t i = 0; i < n; ++i) ps.place(Rat(static_cast<int64_t>(i), static_cast<int64_t>(n)));
    GapCertificate g = gapCertificate(ps);
    EXPECT_FALSE(Rat(1) + Rat(2, static_cast<int64_t>(n)) < g.cost);
    EXPECT_TRUE(g.holds);
    EXPECT_FALSE(Rat(2) < g.width);
}

TEST(PackerSorter, RealizedGammaCoversTheArray) {
    size_t n = 120;
    PackerSorter ps(makePacker("greedy"), n);
    for (auto& x : makeStream("uniform", n, 2)) ps.place(x);
    EXPECT_FALSE(Rat(static_cast<int64_t>(ps.array().capacity()), static_cast<int64_t>(n)) < ps.realizedGamma());
    EXPECT_EQ(ps.name(), "reduce-greedy");
}
