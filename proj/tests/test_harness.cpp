#include "fanpack/harness.hpp"
#include "fanpack/json_io.hpp"
#include "fanpack/svg.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace fanpack;

namespace {

size_t countOf(const std::string& s, const std::string& needle) {
    size_t c = 0;
    for (size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++c;
    return c;
}

ExperimentSpec spec(const std::string& kind, const std::string& algo, const std::string& adv, size_t n, uint64_t seed = 0) {
    ExperimentSpec s;
    s.kind = kind;
    s.algo = algo;
    s.adversary = adv;
    s.n = n;
    s.seed = seed;
    return s;
}

}  // namespace

TEST(Streams, FamiliesProduceValuesInRange) {
    std::vector<std::string> all = randomStreamFamilies();
    for (auto& f : adversarialStreamFamilies()) all.push_back(f);
    EXPECT_EQ(adversarialStreamFamilies().size(), 20u);
    for (auto& f : all) {
        EXPECT_TRUE(isStreamFamily(f));
        for (size_t n : {1u, 7u, 100u}) {
            auto xs = makeStream(f, n, 5);
            ASSERT_EQ(xs.size(), n) << f;
            for (auto& x : xs) {
                ASSERT_FALSE(x.sign() < 0) << f;
                ASSERT_FALSE(Rat(1) < x) << f;
            }
            EXPECT_EQ(xs, makeStream(f, n, 5));
        }
    }
    auto sorted = makeStream("sorted", 50, 1);
    EXPECT_TRUE(std::is_sorted(sorted.begin(), sorted.end()));
    EXPECT_FALSE(isStreamFamily("nope"));
}

TEST(Pieces, GeneratorsRespectLimits) {
    for (auto& f : pieceFamilies()) {
        auto ps = makePieces(f, 30, 2);
        ASSERT_EQ(ps.size(), 30u);
        for (auto& p : ps) EXPECT_FALSE(Rat(1) < p.height()) << f;
    }
    auto sq = makeOfflineInstance(Problem::Square, 3000, 1);
    EXPECT_FALSE(squareDensity(Rat(1, 10)) < totalArea(sq));
    for (auto& p : makeOfflineInstance(Problem::Bins, 50, 1)) {
        const auto& v = p.vertices();
        for (size_t a = 0; a < v.size(); ++a)
            for (size_t b = a + 1; b < v.size(); ++b) {
                Rat dx = v[a].x - v[b].x, dy = v[a].y - v[b].y;
                EXPECT_FALSE(Rat(1, 100) < dx * dx + dy * dy);
            }
    }
}

TEST(SortDuel, BalancedOnSortedStreamOfOneInterval) {
    // the sorted family spans all intervals; restrict to the first one by hand
    std::vector<Rat> xs;
    size_t n = 900;
    for (size_t i = 0; i < n; ++i) xs.push_back(Rat(static_cast<int64_t>(i), static_cast<int64_t>(40 * n)));
    TrialRecord r = runSortDuel(spec("sort-duel", "balanced", "given", n), &xs);
    EXPECT_TRUE(r.valid) << r.message;
    EXPECT_EQ(r.cost, Rat(1));
}

TEST(SortDuel, BalancedAgainstUnitAdversaryWithinBothBounds) {
    for (size_t n : {100u, 1000u}) {
        TrialRecord r = runTrial(spec("sort-duel", "balanced", "unit", n));
        EXPECT_TRUE(r.valid) << r.message;
        EXPECT_TRUE(detail::meetsUnitLowerBound(r.cost, n));
        EXPECT_TRUE(detail::meetsBalancedUpperBound(r.cost, n));
    }
}

TEST(SortDuel, BoxSorterUniformStaysInCapacity) {
    ExperimentSpec s = spec("sort-duel", "boxsorter", "uniform", 10000, 3);
    s.params["epsilon"] = "1";
    RunLog log;
    TrialRecord r = runTrial(s, &log);
    EXPECT_TRUE(r.valid) << r.message;
    ASSERT_TRUE(log.array.has_value());
    EXPECT_LE(log.array->capacity(), 20000u);
    EXPECT_EQ(log.duel.size(), 10000u);
}

TEST(SortDuel, FailuresBecomeRecords) {
    TrialRecord r = runTrial(spec("sort-duel", "no-such-sorter", "uniform", 10));
    EXPECT_FALSE(r.valid);
    EXPECT_FALSE(r.message.empty());
    r = runTrial(spec("nonsense", "balanced", "uniform", 10));
    EXPECT_FALSE(r.valid);
}

TEST(PackBench, OnlinePackerSingleSquareWidth) {
    std::vector<ConvexPiece> ps{ConvexPiece::rect(Rat(0), Rat(0), Rat(1), Rat(1))};
    RunLog log;
    TrialRecord r = runPackBench(spec("pack-run", "onlinepacker", "given", 1), &ps, &log);
    EXPECT_TRUE(r.valid) << r.message;
    EXPECT_EQ(log.boxes.size(), 1u);
    EXPECT_EQ(log.boxes[0].width(), Rat(2));
}

TEST(PackBench, GreedyVersusOnlineOnAlternatingSlopes) {
    TrialRecord g = runTrial(spec("pack-run", "greedy", "alternating", 100));
    TrialRecord o = runTrial(spec("pack-run", "onlinepacker", "alternating", 100));
    EXPECT_TRUE(g.valid) << g.message;
    EXPECT_TRUE(o.valid) << o.message;
    EXPECT_FALSE(g.cost < Rat(90));
    EXPECT_TRUE(o.cost * Rat(2) < g.cost);
}

TEST(Sweep, EmptySpecListGivesHeaderOnly) {
    EXPECT_EQ(sweepCsv(sweep({}, 4)), csvHeader());
    EXPECT_EQ(fitsCsv({}), "kind,algo,adversary,slope\n");
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
    json j = json::parse(R"({"sweep": [
        {"kind": "sort-duel", "algo": ["balanced", "boxsorter"], "adversary": ["uniform", "reverse", "unit"], "n": [50, 400], "seeds": 2},
        {"kind": "pack-run", "algo": ["greedy", "onlinepacker"], "adversary": "random-convex", "n": 40, "seed": [3, 3]},
        {"kind": "reduction-run", "algo": "reduce-greedy", "adversary": "uniform", "n": 60},
        {"kind": "offline-run", "algo": ["strip", "perimeter", "bins", "square"], "adversary": "random", "n": 30}
    ]})");
    auto specs = specsFromJson(j);
    EXPECT_EQ(specs.size(), 24u + 4u + 1u + 4u);
    std::string a = sweepCsv(sweep(specs, 1));
    std::string b = sweepCsv(sweep(specs, 8));
    EXPECT_EQ(a, b);
    EXPECT_EQ(countOf(a, "\n"), specs.size() + 1);
    // duplicate seeds give identical rows
    auto rows = sweep({specs[24], specs[25]}, 2);
    EXPECT_EQ(csvRow(rows[0]), csvRow(rows[1]));
}

TEST(Sweep, FitSlopeOfSquareRootGrowth) {
    std::vector<TrialRecord> rs;
    for (size_t n : {100u, 400u, 1600u}) {
        TrialRecord r;
        r.spec = spec("sort-duel", "x", "y", n);
        r.valid = true;
        r.ratio = Rat(static_cast<int64_t>(n)).sqrtLower(20);
        rs.push_back(r);
    }
    std::string f = fitsCsv(rs);
    EXPECT_NE(f.find("sort-duel,x,y,0.5000"), std::string::npos) << f;
}

TEST(Svg, EmptyPackingHasFrameOnly) {
    SvgScene sc;
    sc.frames.push_back({Rat(0), Rat(0), Rat(1), Rat(1), "strip"});
    std::string s = renderSvg(sc);
    EXPECT_EQ(countOf(s, "class=\"frame\""), 1u);
    EXPECT_EQ(countOf(s, "<polygon"), 0u);
    EXPECT_EQ(s.rfind("<svg", 0), 0u);
    EXPECT_NE(s.find("</svg>"), std::string::npos);
}

TEST(Svg, ThreePiecesThreeFills) {
    SvgScene sc;
    sc.frames.push_back({Rat(0), Rat(0), Rat(3), Rat(1), "strip"});
    for (int i = 0; i < 3; ++i) sc.pieces.push_back({ConvexPiece::rect(Rat(0), Rat(0), Rat(1), Rat(1)), Rat(i), Rat(0)});
    std::string s = renderSvg(sc);
    EXPECT_EQ(countOf(s, "class=\"piece\""), 3u);
    std::set<std::string> fills;
    for (size_t p = s.find("class=\"piece\""); p != std::string::npos; p = s.find("class=\"piece\"", p + 1)) {
        size_t f = s.find("fill=\"", p) + 6;
        fills.insert(s.substr(f, s.find('"', f) - f));
    }
    EXPECT_EQ(fills.size(), 3u);
    EXPECT_EQ(s, renderSvg(sc));
}

TEST(Svg, ArrayBars) {
    SortArray a(3, 5);
    a.place(0, Rat(1, 2));
    a.place(3, Rat(1));
    std::string s = renderArraySvg(a, "demo");
    EXPECT_EQ(countOf(s, "class=\"cell\""), 2u);
}

TEST(Json, PiecesAndStreamsRoundTrip) {
    auto ps = makePieces("random-convex", 10, 4);
    auto back = piecesFromJson(json::parse(piecesToJson(ps).dump()));
    ASSERT_EQ(back.size(), ps.size());
    for (size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(back[i].key(), ps[i].key());

    auto xs = makeStream("uniform", 20, 1);
    EXPECT_EQ(streamFromJson(json::parse(streamToJson(xs).dump())), xs);
    EXPECT_EQ(streamFromJson(json::parse(R"({"values": ["1/3", 0.25, 1]})")),
              (std::vector<Rat>{Rat(1, 3), Rat(1, 4), Rat(1)}));
    EXPECT_THROW(streamFromJson(json::parse("[1.5]")), InputError);
    EXPECT_THROW(pieceFromJson(json::parse(R"({"vertices": [["0","0"],["1","1"]]})")), InputError);
}

TEST(Json, RecordCarriesNotes) {
    TrialRecord r = runTrial(spec("reduction-run", "reduce-greedy", "uniform", 30));
    json j = recordToJson(r);
    EXPECT_TRUE(j.contains("width"));
    EXPECT_TRUE(j.contains("gamma"));
    EXPECT_EQ(j.at("holds"), "true");
}
