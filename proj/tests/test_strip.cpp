#include "fanpack/harness.hpp"
#include "fanpack/strip.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fanpack;

namespace {

bool closedInside(const std::vector<Point>& outerCcw, const std::vector<Point>& pts) {
    for (auto& p : pts)
        for (size_t i = 0; i < outerCcw.size(); ++i)
            if (orient(outerCcw[i], outerCcw[(i + 1) % outerCcw.size()], p) < 0) return false;
    return true;
}

Rat r(std::mt19937_64& rng, int64_t lo, int64_t hi, int64_t den) {
    return Rat(lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(hi - lo + 1)), den);
}

void expectValidStrip(const StripPacker& pk) {
    auto rep = validatePlacements(pk.placements(), Box2{Rat(0), Rat(0), Rat(0), Rat(1), true});
    EXPECT_TRUE(rep.ok) << pk.name() << ": " << rep.message;
}

}  // namespace

TEST(NaiveGreedy, UnitSquares) {
    NaiveGreedy g;
    ConvexPiece sq = ConvexPiece::rect(Rat(0), Rat(0), Rat(1), Rat(1));
    Placement a = g.place(sq);
    EXPECT_EQ(a.dx, Rat(0));
    EXPECT_EQ(a.dy, Rat(0));
    Placement b = g.place(sq);
    EXPECT_EQ(b.dx, Rat(1));
    EXPECT_EQ(b.dy, Rat(0));
    EXPECT_THROW(g.place(ConvexPiece::rect(Rat(0), Rat(0), Rat(1), Rat(2))), InputError);
}

TEST(NaiveGreedy, AlternatingSlopesGrowLinearly) {
    size_t n = 200;
    NaiveGreedy g;
    for (auto& p : alternatingSlopes(n)) g.place(p);
    expectValidStrip(g);
    EXPECT_FALSE(g.occupiedWidth() < Rat(static_cast<int64_t>(n / 3)));
}

TEST(NaiveGreedy, NoPieceCanSlideLeft) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 4; ++t) {
        NaiveGreedy g;
        std::vector<Placement> done;
        for (int i = 0; i < 25; ++i) {
            ConvexPiece p = randomConvexPiece(rng, Rat(1), 8, 8);
            Placement pl = g.place(p);
            Rat eps(1, 4096);
            Rat x = pl.dx - eps;
            bool blocked = p.xmin() + x < Rat(0);
            for (auto& q : done)
                if (interiorOverlap(p, x, pl.dy, q.piece, q.dx, q.dy)) blocked = true;
            EXPECT_TRUE(blocked) << "trial " << t << " piece " << i;
            done.push_back(pl);
        }
        expectValidStrip(g);
    }
}

TEST(RandomFit, ValidAndDeterministic) {
    auto pieces = makePieces("random-convex", 60, 5);
    RandomFit a(3), b(3);
    for (auto& p : pieces) {
        Placement x = a.place(p), y = b.place(p);
        ASSERT_EQ(x.dx, y.dx);
        ASSERT_EQ(x.dy, y.dy);
    }
    expectValidStrip(a);
}

TEST(MatchType, SpecExamples) {
    MatchResult m = matchType(Rat(1, 2), Rat(0));
    EXPECT_TRUE(m.type.empty());
    EXPECT_FALSE(Rat(6) * Rat(1, 2) < typeBase(0));

    m = matchType(Rat(1, 5), Rat(9, 10));
    EXPECT_EQ(tritString(m.type), "+");

    for (int d = 1; d <= 6; ++d) {
        Rat base = Rat(1, 2) / Rat::ipow(Rat(3), d);
        m = matchType(base, Rat(0));
        EXPECT_EQ(m.type.size(), static_cast<size_t>(d));
        for (auto x : m.type) EXPECT_EQ(x, 0);
    }
    EXPECT_THROW(matchType(Rat(0), Rat(0)), InputError);
    EXPECT_THROW(matchType(Rat(1, 2), Rat(3, 2)), InputError);
}

TEST(MatchType, PieceFitsItsBoxAndAreaIsComparable) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 3000; ++t) {
        Rat base = t % 3 == 0 ? Rat::pow2(-static_cast<int>(rng() % 12)) * r(rng, 1, 999, 1000) : r(rng, 1, 1000, 1000);
        Rat shear = r(rng, -1000, 1000, 1000);
        MatchResult m = matchType(base, shear);
        size_t d = m.type.size();
        ASSERT_FALSE(Rat(6) * base < typeBase(d)) << base.str();
        HorizontalParallelogram box{{Rat(0), Rat(0)}, typeBase(d), typeShear(m.type), Rat(1)};
        HorizontalParallelogram piece{{m.offset, Rat(0)}, base, shear, Rat(1)};
        ASSERT_TRUE(closedInside(box.corners(), piece.corners()))
            << "base " << base.str() << " shear " << shear.str() << " type " << tritString(m.type);
        // the box is a sub-box of the basic 2x1 box placed at the origin
        Rat b0 = Rat(1) - (m.side == Side::Left ? base : Rat(0)) - m.offset;
        HorizontalParallelogram placedBox{{b0, Rat(0)}, typeBase(d), typeShear(m.type), Rat(1)};
        ASSERT_TRUE(closedInside(HorizontalParallelogram{{Rat(0), Rat(0)}, Rat(2), Rat(0), Rat(1)}.corners(),
                                 placedBox.corners()));
    }
}

TEST(OnlinePacker, FirstUnitSquareOpensOneBasicBox) {
    OnlinePacker pk;
    Placement p = pk.place(ConvexPiece::rect(Rat(0), Rat(0), Rat(1), Rat(1)));
    EXPECT_EQ(pk.allocatedWidth(), Rat(2));
    ASSERT_FALSE(pk.boxes().empty());
    const OnlineBox& leaf = pk.boxes()[0];
    EXPECT_EQ(leaf.wclass, 1);
    EXPECT_EQ(leaf.hclass, 0);
    EXPECT_TRUE(leaf.type.empty());
    EXPECT_FALSE(p.dx < Rat(0));
    EXPECT_TRUE(pk.nearEmptyAudit().empty());
}

TEST(OnlinePacker, HeightAndWidthClasses) {
    OnlinePacker pk;
    pk.place(ConvexPiece::rect(Rat(0), Rat(0), Rat(1), Rat(1)));
    pk.place(ConvexPiece::rect(Rat(0), Rat(0), Rat(1, 2), Rat(3, 10)));
    pk.place(ConvexPiece::rect(Rat(0), Rat(0), Rat(3, 2), Rat(1)));
    long leaf1 = -1, leaf2 = -1;
    for (size_t b = 0; b < pk.boxes().size(); ++b) {
        if (pk.boxes()[b].piece == 1) leaf1 = static_cast<long>(b);
        if (pk.boxes()[b].piece == 2) leaf2 = static_cast<long>(b);
    }
    ASSERT_GE(leaf1, 0);
    ASSERT_GE(leaf2, 0);
    EXPECT_EQ(pk.boxes()[static_cast<size_t>(leaf1)].hclass, 1);
    EXPECT_EQ(pk.boxes()[static_cast<size_t>(leaf2)].wclass, 2);
    EXPECT_EQ(pk.boxes()[static_cast<size_t>(leaf2)].hclass, 0);
    expectValidStrip(pk);
}

TEST(OnlinePacker, EmptyStateAuditsClean) {
    OnlinePacker pk;
    EXPECT_TRUE(pk.nearEmptyAudit().empty());
    EXPECT_TRUE(pk.auditBoxes());
    EXPECT_EQ(pk.allocatedWidth(), Rat(0));
}

TEST(OnlinePacker, StreamsStayValidAndAudited) {
    for (auto& fam : pieceFamilies()) {
        auto pieces = makePieces(fam, 400, 11);
        OnlinePacker pk;
        Rat lastWidth;
        for (auto& p : pieces) {
            pk.place(p);
            ASSERT_FALSE(pk.occupiedWidth() < lastWidth);
            lastWidth = pk.occupiedWidth();
            for (auto& v : pk.placements().back().placed().vertices()) {
                ASSERT_FALSE(v.y.sign() < 0);
                ASSERT_FALSE(Rat(1) < v.y);
                ASSERT_FALSE(v.x.sign() < 0);
            }
        }
        expectValidStrip(pk);
        EXPECT_EQ(pk.stats().containmentViolations, 0u) << fam;
        EXPECT_EQ(pk.stats().lemmaAreaViolations, 0u) << fam;
        EXPECT_EQ(pk.stats().nearEmptyViolations, 0u) << fam;
        auto audit = pk.nearEmptyAudit();
        for (auto& kv : audit) EXPECT_LE(kv.second, 2u);
        EXPECT_TRUE(pk.auditBoxes()) << fam;
        EXPECT_FALSE(pk.allocatedWidth() < pk.occupiedWidth());
    }
}

TEST(OnlinePacker, BeatsGreedyOnAlternatingSlopes) {
    size_t n = 300;
    OnlinePacker on;
    NaiveGreedy g;
    for (auto& p : alternatingSlopes(n)) {
        on.place(p);
        g.place(p);
    }
    expectValidStrip(on);
    EXPECT_TRUE(on.occupiedWidth() * Rat(4) < g.occupiedWidth());
}

TEST(MakePacker, Names) {
    EXPECT_EQ(makePacker("greedy")->name(), "greedy");
    EXPECT_EQ(makePacker("onlinepacker")->name(), "onlinepacker");
    EXPECT_EQ(makePacker("randomfit", 2)->name(), "randomfit");
    EXPECT_THROW(makePacker("nope"), InputError);
}
