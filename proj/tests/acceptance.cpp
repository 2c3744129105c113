// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "fanpack/fanpack.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fanpack;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Line {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

int failures = 0;

void report(int id, const std::string& title, Line ln, double secs) {
    if (!ln.pass) ++failures;
    // details are appended piecewise; drop a dangling separator at the front
    size_t at = ln.detail.find_first_not_of(" |");
    ln.detail = at == std::string::npos ? std::string() : ln.detail.substr(at);
    std::printf("AC%-2d %s  %s  (%.1fs) %s\n", id, ln.pass ? "PASS" : "FAIL", title.c_str(), secs, ln.detail.c_str());
    std::fflush(stdout);
}

ExperimentSpec spec(const std::string& kind, const std::string& algo, const std::string& adv, size_t n, uint64_t seed) {
    ExperimentSpec s;
    s.kind = kind;
    s.algo = algo;
    s.adversary = adv;
    s.n = n;
    s.seed = seed;
    return s;
}

std::string fmt(const char* f, double a) {
    char b[64];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

// ---------------------------------------------------------------------------

void sortedOptimum() {
    auto t0 = Clock::now();
    Line ln;
    size_t runs = 0;
    std::vector<std::string> fams = randomStreamFamilies();
    for (auto& f : adversarialStreamFamilies()) fams.push_back(f);
    for (auto& f : fams)
        for (size_t n : {1u, 2u, 17u, 100u, 1000u, 10000u})
            for (uint64_t seed = 0; seed < 3; ++seed) {
                auto xs = makeStream(f, n, seed);
                std::sort(xs.begin(), xs.end());
                SortArray a(n, 2 * n);
                // sorted order with arbitrary gaps between cells
                for (size_t i = 0; i < n; ++i) a.place(i + (seed == 2 ? i : 0), xs[i]);
                ++runs;
                if (totalCost(a) != Rat(1)) ln.fail(f + " n=" + std::to_string(n) + " cost " + totalCost(a).str());
            }
    // big denominators take the exact slow path
    std::vector<Rat> big;
    for (int k = 1; k <= 40; ++k) big.push_back(Rat(1, 3) * Rat::pow2(-k) + Rat(k, 41));
    std::sort(big.begin(), big.end());
    ++runs;
    if (costOfSequence(big) != Rat(1)) ln.fail("big-denominator stream");
    if (ln.pass) ln.detail = std::to_string(runs) + " sorted streams, cost exactly 1";
    report(1, "sorted streams cost exactly 1", ln, since(t0));
}

void balancedUpper() {
    auto t0 = Clock::now();
    Line ln;
    size_t runs = 0;
    double worst = 0;
    for (size_t n : {100u, 1000u, 10000u, 100000u}) {
        std::vector<std::string> fams;
        std::vector<uint64_t> seeds;
        const auto& rnd = randomStreamFamilies();
        for (uint64_t i = 0; i < 1000; ++i) {
            fams.push_back(rnd[i % rnd.size()]);
            seeds.push_back(i);
        }
        for (auto& f : adversarialStreamFamilies()) {
            fams.push_back(f);
            seeds.push_back(0);
        }
        for (size_t t = 0; t < fams.size(); ++t) {
            auto xs = makeStream(fams[t], n, seeds[t]);
            BalancedSorter s(n);
            for (auto& x : xs) s.place(x);
            Rat c = totalCost(s.array());
            ++runs;
            worst = std::max(worst, c.toDouble() / std::sqrt(static_cast<double>(n)));
            if (!detail::meetsBalancedUpperBound(c, n))
                ln.fail(fams[t] + " n=" + std::to_string(n) + " cost " + fmt("%.3f", c.toDouble()));
        }
    }
    double secs = since(t0);
    if (secs >= 60) ln.fail("runtime " + fmt("%.1f s", secs) + " exceeds 60 s");
    if (ln.pass) ln.detail = std::to_string(runs) + " streams, max cost/sqrt(n) = " + fmt("%.3f", worst);
    report(2, "balanced sorter cost <= 18 sqrt(n)", ln, secs);
}

void unitLower() {
    auto t0 = Clock::now();
    Line ln;
    std::ostringstream d;
    std::vector<ExperimentSpec> specs;
    for (const char* algo : {"balanced", "boxsorter", "reduce-greedy", "reduce-onlinepacker"})
        for (size_t n : {100u, 1000u, 10000u}) {
            ExperimentSpec s = spec("sort-duel", algo, "unit", n, 0);
            if (std::string(algo) == "boxsorter") s.params["gamma"] = "1";
            specs.push_back(s);
        }
    auto recs = sweep(specs);
    for (auto& r : recs) {
        bool ok = r.valid && detail::meetsUnitLowerBound(r.cost, r.spec.n);
        std::string g;
        for (auto& [k, v] : r.extra)
            if (k == "gamma") g = v;
        d << " " << r.spec.algo << "@" << r.spec.n << "=" << fmt("%.2f", r.cost.toDouble()) << "(gamma " << g << ")";
        if (!ok) {
            std::string why = r.spec.algo + " n=" + std::to_string(r.spec.n) + " cost " + fmt("%.3f", r.cost.toDouble()) +
                              " < sqrt(n/2) = " + fmt("%.3f", std::sqrt(static_cast<double>(r.spec.n) / 2));
            if (!r.message.empty()) why += " [" + r.message + "]";
            ln.fail(why);
        }
    }
    double secs = since(t0);
    if (secs >= 120) ln.fail("runtime " + fmt("%.1f s", secs) + " exceeds 120 s");
    ln.detail += " |" + d.str();
    report(3, "unit adversary forces cost >= sqrt(n/2)", ln, secs);
}

void boxCapacity() {
    auto t0 = Clock::now();
    Line ln;
    size_t runs = 0;
    double worst = 0;
    std::vector<size_t> ns{100, 1000, 10000, 100000};
    const auto& rnd = randomStreamFamilies();
    for (size_t t = 0; t < 100; ++t) {
        size_t n = ns[t % ns.size()];
        SorterParams p = chooseParams(n, Rat(1));
        size_t limit = 2 * n;
        if (boxSorterCapacity(n, p) > limit) ln.fail("capacity above 2n for n=" + std::to_string(n));
        auto xs = makeStream(rnd[t % rnd.size()], n, 1000 + t);
        BoxSorter s(n, p);
        size_t maxCell = 0;
        try {
            for (auto& x : xs) maxCell = std::max(maxCell, s.place(x));
        } catch (const std::exception& e) {
            ln.fail("n=" + std::to_string(n) + ": " + e.what());
            continue;
        }
        if (maxCell >= limit) ln.fail("cell " + std::to_string(maxCell) + " beyond 2n");
        worst = std::max(worst, static_cast<double>(maxCell + 1) / static_cast<double>(n));
        ++runs;
    }
    if (ln.pass) ln.detail = std::to_string(runs) + " streams, max (cell+1)/n = " + fmt("%.3f", worst);
    report(4, "box sorter stays within floor(2n) cells", ln, since(t0));
}

void gapInequality() {
    auto t0 = Clock::now();
    Line ln;
    std::mt19937_64 rng(2024);
    std::vector<std::string> fams = randomStreamFamilies();
    for (auto& f : adversarialStreamFamilies()) fams.push_back(f);
    std::vector<std::string> packers{"reduce-greedy", "reduce-onlinepacker", "reduce-randomfit"};
    std::vector<ExperimentSpec> specs;
    for (size_t t = 0; t < 500; ++t) {
        size_t n = 1 + rng() % 1000;
        if (t % 5 == 0) n = 1 + rng() % 30;
        specs.push_back(spec("reduction-run", packers[t % 3], fams[rng() % fams.size()], n, rng() % 100000));
    }
    auto recs = sweep(specs);
    double tightest = 1e18;
    for (auto& r : recs) {
        bool holds = false;
        double w = 0;
        for (auto& [k, v] : r.extra) {
            if (k == "holds") holds = v == "true";
            if (k == "width") w = std::stod(v);
        }
        if (!r.valid || !holds)
            ln.fail(r.spec.algo + " " + r.spec.adversary + " n=" + std::to_string(r.spec.n) + ": " + r.message);
        else
            tightest = std::min(tightest, w / (r.cost.toDouble() / 2));
    }
    if (ln.pass) ln.detail = "500 runs, min width/(cost/2) = " + fmt("%.3f", tightest);
    report(5, "occupied width >= cost/2 under the reduction", ln, since(t0));
}

void onlineInvariants() {
    auto t0 = Clock::now();
    Line ln;
    std::ostringstream d;
    std::vector<ExperimentSpec> specs;
    for (const char* fam : {"random-convex", "parallelograms", "alternating", "lifted-uniform"})
        specs.push_back(spec("pack-run", "onlinepacker", fam, 10000, 6));
    auto recs = sweep(specs);
    for (auto& r : recs) {
        std::string checks, viol, near;
        for (auto& [k, v] : r.extra) {
            if (k == "area_checks") checks = v;
            if (k == "area_violations") viol = v;
            if (k == "max_near_empty") near = v;
        }
        d << " " << r.spec.adversary << ": " << checks << " boxes, " << viol << " area violations, near-empty max " << near
          << ";";
        if (!r.valid) ln.fail(r.spec.adversary + ": " + r.message);
    }
    ln.detail += d.str();
    report(6, "OnlinePacker box area and near-empty invariants", ln, since(t0));
}

void separation() {
    auto t0 = Clock::now();
    Line ln;
    size_t n = 1000;
    auto recs = sweep({spec("pack-run", "greedy", "alternating", n, 0), spec("pack-run", "onlinepacker", "alternating", n, 0)});
    const TrialRecord& g = recs[0];
    const TrialRecord& o = recs[1];
    if (!g.valid) ln.fail("greedy: " + g.message);
    if (!o.valid) ln.fail("onlinepacker: " + o.message);
    if (g.cost * Rat(3) < Rat(static_cast<int64_t>(n))) ln.fail("greedy width below n/3");
    if (Rat(static_cast<int64_t>(n)) < o.cost * Rat(10)) ln.fail("OnlinePacker width above n/10");
    ln.detail += " greedy width " + fmt("%.2f", g.cost.toDouble()) + ", OnlinePacker width " + fmt("%.2f", o.cost.toDouble());
    report(7, "greedy >= n/3 and OnlinePacker <= n/10 on alternating slopes", ln, since(t0));
}

void offlineConstants() {
    auto t0 = Clock::now();
    Line ln;
    const Rat rho = squareDensity(Rat(1, 10));
    struct Agg {
        double worst = 0;
        size_t bad = 0;
    } strip, bins, perim, square;
    size_t binsRatioFlags = 0;
    for (uint64_t seed = 0; seed < 200; ++seed) {
        const char* fam = seed % 2 ? "triangles" : "random";
        {
            OfflineResult r;
            TrialRecord rec = runOffline(spec("offline-run", "strip", fam, 20 + seed % 80, seed), nullptr, nullptr, &r);
            strip.worst = std::max(strip.worst, r.ratio.toDouble());
            if (!rec.valid || Rat(327, 10) < r.ratio) {
                ++strip.bad;
                ln.fail("strip seed " + std::to_string(seed) + ": " + rec.message);
            }
        }
        {
            OfflineResult r;
            TrialRecord rec = runOffline(spec("offline-run", "bins", fam, 50 + 3 * seed, seed), nullptr, nullptr, &r);
            Rat area;
            for (auto& p : r.placements) area += p.piece.area();
            bins.worst = std::max(bins.worst, r.cost.toDouble() / (area / rho + Rat(1)).toDouble());
            bool countOk = !(area / rho + Rat(1) < r.cost);
            bool packOk = true;
            for (size_t b = 0; b < r.bins; ++b) {
                std::vector<Placement> in;
                for (size_t i = 0; i < r.placements.size(); ++i)
                    if (r.region[i] == static_cast<int>(b)) in.push_back(r.placements[i]);
                if (!validatePlacements(in, Box2{Rat(0), Rat(0), Rat(1), Rat(1), false}).ok) packOk = false;
            }
            if (rec.message.find("1/rho + rho") != std::string::npos) ++binsRatioFlags;
            if (!countOk || !packOk || !r.containers.boundHolds) {
                ++bins.bad;
                ln.fail("bins seed " + std::to_string(seed) + ": " + rec.message);
            }
        }
        {
            OfflineResult r;
            TrialRecord rec = runOffline(spec("offline-run", "perimeter", fam, 20 + seed % 80, seed), nullptr, nullptr, &r);
            perim.worst = std::max(perim.worst, r.ratio.toDouble());
            if (!rec.valid || Rat(89, 10) < r.ratio) {
                ++perim.bad;
                ln.fail("perimeter seed " + std::to_string(seed) + ": " + rec.message);
            }
        }
        {
            OfflineResult r;
            TrialRecord rec = runOffline(spec("offline-run", "square", fam, 4000, seed), nullptr, nullptr, &r);
            Rat area;
            for (auto& p : r.placements) area += p.piece.area();
            square.worst = std::max(square.worst, r.cost.toDouble());
            if (!rec.valid || !r.fits || Rat(1, 10) < area) {
                ++square.bad;
                ln.fail("square seed " + std::to_string(seed) + ": " + rec.message);
            }
        }
    }
    double secs = since(t0);
    if (secs >= 300) ln.fail("runtime " + fmt("%.1f s", secs) + " exceeds 5 min");
    ln.detail += " | strip max ratio " + fmt("%.3f", strip.worst) + ", bins max count/(area/rho+1) " +
                 fmt("%.3f", bins.worst) + ", perimeter max ratio " + fmt("%.3f", perim.worst) +
                 ", square max stack height " + fmt("%.3f", square.worst) + ", bin ratio flags " +
                 std::to_string(binsRatioFlags);
    report(8, "offline constants over 200 instances each", ln, secs);
}

void coarsening() {
    auto t0 = Clock::now();
    Line ln;
    std::vector<size_t> ns{size_t(1) << 14, size_t(1) << 16, size_t(1) << 18};
    std::vector<ExperimentSpec> specs;
    for (size_t n : ns)
        for (uint64_t seed = 0; seed < 5; ++seed) specs.push_back(spec("sort-duel", "boxsorter", "coarsen", n, seed));
    auto recs = sweep(specs);
    std::ostringstream d;
    std::vector<double> mean(ns.size(), 0);
    for (size_t i = 0; i < ns.size(); ++i) {
        d << " n=2^" << (14 + 2 * i) << ":";
        for (uint64_t seed = 0; seed < 5; ++seed) {
            const TrialRecord& r = recs[i * 5 + seed];
            if (!r.valid) ln.fail("n=" + std::to_string(ns[i]) + " seed " + std::to_string(seed) + ": " + r.message);
            mean[i] += r.cost.toDouble() / 5;
            d << " " << fmt("%.3f", r.cost.toDouble());
            if (i > 0 && r.cost < recs[(i - 1) * 5 + seed].cost)
                ln.fail("seed " + std::to_string(seed) + " cost decreased from n=" + std::to_string(ns[i - 1]) +
                        " to n=" + std::to_string(ns[i]));
        }
        if (i > 0 && mean[i] < mean[i - 1]) ln.fail("mean cost decreased at n=" + std::to_string(ns[i]));
        d << " (mean " << fmt("%.3f", mean[i]) << ");";
    }
    ln.detail += " |" + d.str();
    report(9, "coarsening adversary: grid values, termination, disjoint deserted spaces, cost trend", ln, since(t0));
}

void determinism() {
    auto t0 = Clock::now();
    Line ln;
    std::vector<ExperimentSpec> specs;
    for (const char* algo : {"balanced", "boxsorter", "reduce-greedy"})
        for (const char* adv : {"uniform", "unit", "reverse", "coarsen"})
            for (uint64_t seed = 0; seed < 2; ++seed) specs.push_back(spec("sort-duel", algo, adv, 600, seed));
    for (const char* fam : {"random-convex", "alternating", "triangles"})
        for (const char* pk : {"greedy", "onlinepacker", "randomfit"}) specs.push_back(spec("pack-run", pk, fam, 80, 5));
    for (const char* pr : {"strip", "bins", "square", "perimeter"}) specs.push_back(spec("offline-run", pr, "random", 60, 3));
    specs.push_back(spec("reduction-run", "reduce-onlinepacker", "uniform", 200, 1));
    auto both = [&](unsigned threads) {
        auto rs = sweep(specs, threads);
        return sweepCsv(rs) + fitsCsv(rs);
    };
    std::string a = both(1), b = both(4), c = both(1);
    if (a != b || a != c) ln.fail("sweep CSV differs between repetitions");
    RunLog l1, l2;
    runTrial(spec("pack-run", "onlinepacker", "random-convex", 60, 9), &l1);
    runTrial(spec("pack-run", "onlinepacker", "random-convex", 60, 9), &l2);
    SvgScene s1{l1.placements, l1.boxes, l1.frames, {}}, s2{l2.placements, l2.boxes, l2.frames, {}};
    if (renderSvg(s1) != renderSvg(s2)) ln.fail("SVG differs between repetitions");
    if (ln.pass) ln.detail = std::to_string(specs.size()) + " trials, " + std::to_string(a.size()) + " bytes identical";
    report(10, "repeated sweeps are byte-identical", ln, since(t0));
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::function<void()>> all{sortedOptimum, balancedUpper, unitLower,      boxCapacity, gapInequality,
                                           onlineInvariants, separation, offlineConstants, coarsening, determinism};
    std::vector<bool> run(all.size(), argc <= 1);
    for (int i = 1; i < argc; ++i) {
        int k = std::atoi(argv[i]);
        if (k >= 1 && k <= static_cast<int>(all.size())) run[static_cast<size_t>(k - 1)] = true;
    }
    for (size_t i = 0; i < all.size(); ++i)
        if (run[i]) all[i]();
    std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
