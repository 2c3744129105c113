#pragma once
// Experiment runner: sorting duels, packing benchmarks, reduction runs and
// offline runs, each re-audited with the exact checkers, plus a parallel sweep
// with CSV reports.

#include "fanpack/adversary.hpp"
#include "fanpack/errors.hpp"
#include "fanpack/geometry.hpp"
#include "fanpack/json_io.hpp"
#include "fanpack/offline.hpp"
#include "fanpack/reduce.hpp"
#include "fanpack/sorting.hpp"
#include "fanpack/strip.hpp"
#include "fanpack/svg.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace fanpack {

// ---------------------------------------------------------------- streams

inline const std::vector<std::string>& randomStreamFamilies() {
    static const std::vector<std::string> f = {"uniform", "sorted", "grid"};
    return f;
}

inline const std::vector<std::string>& adversarialStreamFamilies() {
    static const std::vector<std::string> f = {
        "reverse",       "extremes",       "sawtooth",    "interval-cycle", "blocks-desc",
        "bit-reversal",  "organ-pipe",     "shuffle",     "random-walk",    "two-cluster",
        "geometric",     "boundary-hug",   "few-values",  "zeros",          "ones",
        "desc-blocks",   "stride",         "interval-down", "half-split",   "sqrt-grid"};
    return f;
}

inline bool isStreamFamily(const std::string& id) {
    auto has = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), id) != v.end(); };
    return has(randomStreamFamilies()) || has(adversarialStreamFamilies());
}

// A stream of n reals in [0,1] from a named family.
inline std::vector<Rat> makeStream(const std::string& family, size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x1234567ULL);
    const int64_t D30 = int64_t(1) << 30;
    auto uni = [&]() { return Rat(static_cast<int64_t>(rng() % static_cast<uint64_t>(D30 + 1)), D30); };
    const int64_t N = static_cast<int64_t>(std::max<size_t>(n, 1));
    const int64_t n1 = std::max<int64_t>(1, static_cast<int64_t>(std::sqrt(static_cast<double>(N))));
    std::vector<Rat> out;
    out.reserve(n);
    if (family == "sorted") {
        // same draws as uniform, sorted on the integer numerators
        std::vector<int64_t> num(n);
        for (auto& v : num) v = static_cast<int64_t>(rng() % static_cast<uint64_t>(D30 + 1));
        std::sort(num.begin(), num.end());
        for (int64_t v : num) out.emplace_back(v, D30);
        return out;
    }
    Rat walk(1, 2);
    for (size_t t = 0; t < n; ++t) {
        int64_t i = static_cast<int64_t>(t);
        Rat x;
        if (family == "uniform") {
            x = uni();
        } else if (family == "grid") {
            x = Rat(static_cast<int64_t>(rng() % static_cast<uint64_t>(N + 1)), N);
        } else if (family == "reverse") {
            x = Rat(N - 1 - i, N);
        } else if (family == "extremes") {
            x = Rat(i % 2);
        } else if (family == "sawtooth") {
            x = Rat(1) - Rat(i % n1, n1);
        } else if (family == "interval-cycle") {
            x = Rat(2 * (i % n1) + 1, 2 * n1);
        } else if (family == "blocks-desc") {
            int64_t blk = std::max<int64_t>(1, N / n1);
            int64_t b = std::min(n1 - 1, i / blk);
            x = (Rat(b + 1) - Rat(i % blk + 1, blk + 1)) / Rat(n1);
        } else if (family == "bit-reversal") {
            uint64_t v = static_cast<uint64_t>(i), r = 0;
            for (int k = 0; k < 20; ++k) r = (r << 1) | ((v >> k) & 1);
            x = Rat(static_cast<int64_t>(r), int64_t(1) << 20);
        } else if (family == "organ-pipe") {
            x = 2 * i < N ? Rat(2 * i, N) : Rat(2 * (N - i), N);
        } else if (family == "shuffle") {
            int64_t h = (N + 1) / 2;
            x = i % 2 == 0 ? Rat(i / 2, N) : Rat(i / 2 + h, N);
        } else if (family == "random-walk") {
            Rat step(1, n1);
            walk = (rng() & 1) ? walk + step : walk - step;
            if (walk.sign() < 0) walk = Rat(0);
            if (Rat(1) < walk) walk = Rat(1);
            x = walk;
        } else if (family == "two-cluster") {
            x = (i % 2 == 0 ? Rat(1, 4) : Rat(3, 4)) + Rat(i % 64, int64_t(1) << 24);
        } else if (family == "geometric") {
            x = Rat::pow2(-static_cast<int>(i % 30));
        } else if (family == "boundary-hug") {
            int64_t k = 1 + (i / 2) % n1;
            x = i % 2 == 0 ? Rat(k, n1) : Rat(k, n1) - Rat(1, D30);
        } else if (family == "few-values") {
            x = Rat(static_cast<int64_t>(rng() % 4), 3);
        } else if (family == "zeros") {
            x = Rat(0);
        } else if (family == "ones") {
            x = Rat(1);
        } else if (family == "desc-blocks") {
            int64_t blk = n1;
            int64_t nb = (N + blk - 1) / blk;
            int64_t b = nb - 1 - i / blk;
            x = Rat(std::min(b * blk + i % blk, N), N);
        } else if (family == "stride") {
            int64_t p = std::max<int64_t>(1, static_cast<int64_t>(0.6180339887 * static_cast<double>(N)));
            while (std::gcd(p, N) != 1) ++p;
            x = Rat((i * p) % N, N);
        } else if (family == "interval-down") {
            x = Rat(2 * (n1 - 1 - i % n1) + 1, 2 * n1);
        } else if (family == "half-split") {
            Rat u = uni() / Rat(2);
            x = 2 * i < N ? u + Rat(1, 2) : u;
        } else if (family == "sqrt-grid") {
            int64_t g = std::max<int64_t>(1, static_cast<int64_t>(std::sqrt(2.0 * static_cast<double>(N))));
            int64_t k = i % (2 * g);
            x = k <= g ? Rat(k, g) : Rat(2 * g - k, g);
        } else {
            throw InputError("unknown stream family '" + family + "'");
        }
        out.push_back(x);
    }
    return out;
}

// ----------------------------------------------------------------- pieces

// Random convex piece: hull of 3..maxPoints points in a disc of the given
// diameter, coordinates snapped to multiples of 2^-bits. Degenerate or
// over-wide hulls are redrawn.
inline ConvexPiece randomConvexPiece(std::mt19937_64& rng, const Rat& diameter, size_t maxPoints = 12, int bits = 16) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double D = diameter.toDouble();
    const double scale = std::ldexp(1.0, bits);
    Rat minArea = diameter * diameter / Rat(50);
    Rat d2 = diameter * diameter;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        size_t k = 3 + static_cast<size_t>(rng() % (std::max<size_t>(maxPoints, 3) - 2));
        std::vector<Point> pts;
        while (pts.size() < k) {
            double u = U(rng), v = U(rng);
            if (u * u + v * v > 1.0) continue;
            double x = D / 2 * (1 + u), y = D / 2 * (1 + v);
            pts.push_back({Rat(static_cast<int64_t>(std::llround(x * scale))) / Rat::pow2(bits),
                           Rat(static_cast<int64_t>(std::llround(y * scale))) / Rat::pow2(bits)});
        }
        auto hull = convexHull(pts);
        if (hull.size() < 3) continue;
        try {
            ConvexPiece p(hull);
            if (p.area() < minArea) continue;
            bool ok = true;
            for (size_t a = 0; a < hull.size() && ok; ++a)
                for (size_t b = a + 1; b < hull.size() && ok; ++b) {
                    Rat dx = hull[a].x - hull[b].x, dy = hull[a].y - hull[b].y;
                    if (d2 < dx * dx + dy * dy) ok = false;
                }
            if (!ok) continue;
            return p.translated(-p.xmin(), -p.ymin());
        } catch (const InputError&) {
            continue;
        }
    }
    throw InvariantViolation("random piece generator failed to produce a piece");
}

inline const std::vector<std::string>& pieceFamilies() {
    static const std::vector<std::string> f = {"alternating", "squares",    "random-convex", "parallelograms",
                                               "lifted-uniform", "small-convex", "triangles"};
    return f;
}

// n pieces of height at most 1 from a named family.
inline std::vector<ConvexPiece> makePieces(const std::string& family, size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed * 0xD1B54A32D192ED03ULL + 77);
    std::vector<ConvexPiece> out;
    out.reserve(n);
    if (family == "alternating") return alternatingSlopes(n);
    for (size_t i = 0; i < n; ++i) {
        if (family == "squares") {
            out.push_back(ConvexPiece::rect(Rat(0), Rat(0), Rat(1), Rat(1)));
        } else if (family == "random-convex") {
            out.push_back(randomConvexPiece(rng, Rat(static_cast<int64_t>(2 + rng() % 19), 20)));
        } else if (family == "small-convex") {
            out.push_back(randomConvexPiece(rng, Rat(1, 10)));
        } else if (family == "triangles") {
            out.push_back(randomConvexPiece(rng, Rat(static_cast<int64_t>(2 + rng() % 19), 20), 3));
        } else if (family == "parallelograms") {
            Rat h(static_cast<int64_t>(1 + rng() % 64), 64);
            Rat b(static_cast<int64_t>(1 + rng() % 64), 64);
            Rat s(static_cast<int64_t>(rng() % 129) - 64, 64);
            out.push_back(HorizontalParallelogram{{Rat(0), Rat(0)}, b, s, h}.toPiece());
        } else if (family == "lifted-uniform") {
            Rat s(static_cast<int64_t>(rng() % ((1u << 20) + 1)), int64_t(1) << 20);
            out.push_back(liftReal(s, n).toPiece());
        } else {
            throw InputError("unknown piece family '" + family + "'");
        }
    }
    return out;
}

// Random instance for an offline problem. Strip pieces have diameter at most
// 1, perimeter pieces at most 2, bin and square pieces at most delta. The
// square instance stops before total area exceeds the guaranteed density.
inline std::vector<ConvexPiece> makeOfflineInstance(Problem pr, size_t n, uint64_t seed, const Rat& delta = Rat(1, 10),
                                                    const std::string& family = "random") {
    std::mt19937_64 rng(seed * 0xA24BAED4963EE407ULL + static_cast<uint64_t>(pr) * 1315423911ULL + 5);
    std::vector<ConvexPiece> out;
    size_t maxPts = family == "triangles" ? 3 : 12;
    if (family == "squares") {
        for (size_t i = 0; i < n; ++i)
            out.push_back(pr == Problem::Strip || pr == Problem::Perimeter
                              ? ConvexPiece::rect(Rat(0), Rat(0), Rat(1), Rat(1))
                              : ConvexPiece::rect(Rat(0), Rat(0), delta / Rat(2), delta / Rat(2)));
        return out;
    }
    if (family == "alternating") return alternatingSlopes(n);
    if (family != "random" && family != "triangles") throw InputError("unknown instance family '" + family + "'");
    switch (pr) {
        case Problem::Strip:
            for (size_t i = 0; i < n; ++i)
                out.push_back(randomConvexPiece(rng, Rat(static_cast<int64_t>(1 + rng() % 20), 20), maxPts));
            break;
        case Problem::Perimeter:
            for (size_t i = 0; i < n; ++i)
                out.push_back(randomConvexPiece(rng, Rat(static_cast<int64_t>(1 + rng() % 40), 20), maxPts));
            break;
        case Problem::Bins:
            for (size_t i = 0; i < n; ++i)
                out.push_back(randomConvexPiece(rng, delta * Rat(static_cast<int64_t>(5 + rng() % 6), 10), maxPts));
            break;
        case Problem::Square: {
            Rat budget = squareDensity(delta), used;
            for (size_t i = 0; i < n; ++i) {
                ConvexPiece p = randomConvexPiece(rng, delta * Rat(static_cast<int64_t>(5 + rng() % 6), 10), maxPts);
                if (budget < used + p.area()) break;
                used += p.area();
                out.push_back(std::move(p));
            }
            break;
        }
    }
    return out;
}

// ------------------------------------------------------------ experiments

struct ExperimentSpec {
    std::string kind;       // sort-duel | pack-run | reduction-run | offline-run
    std::string algo;       // sorter, packer or offline problem
    std::string adversary;  // adversary, stream family, instance family or file:<path>
    size_t n = 0;
    uint64_t seed = 0;
    std::map<std::string, std::string> params;

    std::string param(const std::string& k, const std::string& def = "") const {
        auto it = params.find(k);
        return it == params.end() ? def : it->second;
    }
    bool has(const std::string& k) const { return params.count(k) != 0; }
};

struct TrialRecord {
    ExperimentSpec spec;
    Rat cost, bound, ratio;
    bool valid = false;
    std::string message;
    double seconds = 0;
    std::vector<std::pair<std::string, std::string>> extra;

    void note(const std::string& k, const std::string& v) { extra.emplace_back(k, v); }
    void fail(const std::string& why) {
        valid = false;
        if (!message.empty()) message += "; ";
        message += why;
    }
};

struct DuelStep {
    size_t step;
    Rat value;
    size_t cell;
    int phase;
    size_t marked;
};

struct RunLog {
    std::vector<DuelStep> duel;
    std::vector<ReductionStep> reduction;
    std::vector<Placement> placements;
    std::vector<HorizontalParallelogram> boxes;
    std::vector<SvgFrame> frames;
    std::optional<SortArray> array;
};

namespace detail {

inline Rat paramRat(const ExperimentSpec& s, const std::string& k, const Rat& def) {
    return s.has(k) ? Rat::parse(s.param(k)) : def;
}

inline bool isFileRef(const std::string& id) { return id.rfind("file:", 0) == 0; }

inline std::vector<Rat> loadStreamRef(const std::string& id) { return streamFromJson(readJsonFile(id.substr(5))); }
inline std::vector<ConvexPiece> loadPiecesRef(const std::string& id) { return piecesFromJson(readJsonFile(id.substr(5))); }

// Values for a duel: an adaptive adversary or a fixed stream.
class Source {
public:
    std::unique_ptr<Adversary> adv;
    std::vector<Rat> stream;
    Rat next(const SortArray& a, size_t i) { return adv ? adv->next(a) : stream.at(i); }
};

inline CoarsenParams coarsenFor(const ExperimentSpec& s, size_t n, const Rat& gamma) {
    CoarsenParams p = coarsenDefaults(n, gamma);
    if (s.has("s")) p.s = std::stoll(s.param("s"));
    if (s.has("delta")) p.delta = std::stod(s.param("delta"));
    if (s.has("istar")) p.istar = std::stoi(s.param("istar"));
    return p;
}

inline Source makeSource(const ExperimentSpec& s, size_t n, const Rat& gamma, const std::vector<Rat>* given) {
    Source src;
    if (given) {
        src.stream = *given;
    } else if (s.adversary == "unit") {
        src.adv = std::make_unique<UnitAdversary>(n);
    } else if (s.adversary == "coarsen") {
        src.adv = std::make_unique<CoarsenAdversary>(coarsenFor(s, n, gamma), s.seed);
    } else if (isFileRef(s.adversary)) {
        src.stream = loadStreamRef(s.adversary);
    } else {
        src.stream = makeStream(s.adversary, n, s.seed);
    }
    if (!src.adv && src.stream.size() < n) throw InputError("stream shorter than n");
    return src;
}

inline std::string packerName(const std::string& algo) {
    return algo.rfind("reduce-", 0) == 0 ? algo.substr(7) : algo;
}

inline std::unique_ptr<Sorter> makeSorter(const ExperimentSpec& s, size_t n) {
    if (s.algo == "balanced") {
        Rat g = paramRat(s, "gamma", Rat(1));
        size_t cap = static_cast<size_t>((g * Rat(static_cast<int64_t>(n))).floorInt());
        if (cap < n) throw InputError("balanced sorter needs gamma >= 1");
        return std::make_unique<BalancedSorter>(n, cap);
    }
    if (s.algo == "boxsorter") {
        if (s.has("gamma") && Rat::parse(s.param("gamma")) == Rat(1))
            return std::make_unique<BoxSorter>(n, SorterParams{1, Rat(1, 4)}, n);
        Rat eps = paramRat(s, "epsilon", Rat(1));
        SorterParams p = n >= 4 ? chooseParams(n, eps) : SorterParams{1, Rat(1, 4)};
        if (s.has("k")) p.k = std::stoi(s.param("k"));
        return std::make_unique<BoxSorter>(n, p);
    }
    if (s.algo.rfind("reduce-", 0) == 0)
        return std::make_unique<PackerSorter>(makePacker(packerName(s.algo), s.seed), n);
    throw InputError("unknown sorter '" + s.algo + "'");
}

// cost >= sqrt(n/2), exactly
inline bool meetsUnitLowerBound(const Rat& cost, size_t n) {
    return !(Rat(2) * cost * cost < Rat(static_cast<int64_t>(n)));
}
// cost <= 18 sqrt(n), exactly
inline bool meetsBalancedUpperBound(const Rat& cost, size_t n) {
    return !(Rat(324) * Rat(static_cast<int64_t>(n)) < cost * cost);
}

inline void auditOnline(const OnlinePacker& op, TrialRecord& rec) {
    const OnlineStats& st = op.stats();
    rec.note("area_checks", std::to_string(st.lemmaAreaChecks));
    rec.note("area_violations", std::to_string(st.lemmaAreaViolations));
    rec.note("containment_violations", std::to_string(st.containmentViolations));
    rec.note("max_near_empty", std::to_string(st.maxNearEmpty));
    if (st.lemmaAreaViolations) rec.fail("box area exceeds six times the piece");
    if (st.containmentViolations) rec.fail("piece outside its box");
    if (st.nearEmptyViolations) rec.fail("more than two near-empty boxes of a type");
    try {
        op.nearEmptyAudit();
    } catch (const InvariantViolation& e) {
        rec.fail(e.what());
    }
    if (!op.auditBoxes()) rec.fail("box tree audit failed");
}

inline void logPacker(const StripPacker& pk, RunLog* log) {
    if (!log) return;
    log->placements = pk.placements();
    if (auto* op = dynamic_cast<const OnlinePacker*>(&pk))
        for (size_t b = 0; b < op->boxes().size(); ++b) log->boxes.push_back(op->boxGeometry(static_cast<long>(b)));
    log->frames.push_back({Rat(0), Rat(0), max(pk.occupiedWidth(), Rat(1)), Rat(1), "strip"});
}

}  // namespace detail

inline TrialRecord runSortDuel(const ExperimentSpec& s, const std::vector<Rat>* stream = nullptr, RunLog* log = nullptr) {
    TrialRecord rec;
    rec.spec = s;
    rec.valid = true;
    size_t n = s.n;
    if (n == 0) throw InputError("n must be positive");
    auto sorter = detail::makeSorter(s, n);
    Rat gamma = sorter->array().gamma();
    auto src = detail::makeSource(s, n, gamma, stream);
    auto* coarsen = dynamic_cast<CoarsenAdversary*>(src.adv.get());
    bool gridOk = true;
    for (size_t i = 0; i < n; ++i) {
        Rat x = src.next(sorter->array(), i);
        if (coarsen) {
            Rat j = x * Rat(static_cast<int64_t>(n)) / Rat(coarsen->params().s);
            if (!j.isInteger() || Rat(1) < x) gridOk = false;
        }
        size_t cell = sorter->place(x);
        if (log)
            log->duel.push_back({i, x, cell, coarsen ? coarsen->phase() : 0, coarsen ? coarsen->markedTotal() : 0});
    }
    const SortArray& arr = sorter->array();
    rec.cost = totalCost(arr);
    rec.bound = Rat(1);
    rec.ratio = rec.cost;
    if (auto* ps = dynamic_cast<PackerSorter*>(sorter.get())) {
        rec.note("gamma", decimal(ps->realizedGamma()));
        rec.note("width", decimal(ps->packer().occupiedWidth()));
    } else {
        rec.note("gamma", decimal(gamma));
    }
    if (s.adversary == "unit") {
        // the sqrt(n/2) bound is for arrays of exactly n cells
        Rat used = Rat(static_cast<int64_t>(arr.capacity()), static_cast<int64_t>(n));
        if (auto* ps = dynamic_cast<PackerSorter*>(sorter.get())) used = ps->realizedGamma();
        bool holds = detail::meetsUnitLowerBound(rec.cost, n);
        rec.note("sqrt_half_n", holds ? "true" : "false");
        if (!holds && !(Rat(1) < used)) rec.fail("cost below sqrt(n/2)");
    }
    if (s.algo == "balanced" && !detail::meetsBalancedUpperBound(rec.cost, n)) rec.fail("cost above 18 sqrt(n)");
    if (coarsen) {
        rec.note("phase", std::to_string(coarsen->phase()));
        rec.note("marked", std::to_string(coarsen->markedTotal()));
        if (!gridOk) rec.fail("adversary issued an off-grid value");
        if (coarsen->issued() > n) rec.fail("adversary issued more than n values");
        if (!coarsen->disjointDeserted()) rec.fail("deserted spaces overlap");
    }
    if (log) log->array = arr;
    return rec;
}

inline TrialRecord runPackBench(const ExperimentSpec& s, const std::vector<ConvexPiece>* given = nullptr,
                                RunLog* log = nullptr) {
    TrialRecord rec;
    rec.spec = s;
    rec.valid = true;
    std::vector<ConvexPiece> pieces = given                                  ? *given
                                      : detail::isFileRef(s.adversary) ? detail::loadPiecesRef(s.adversary)
                                                                       : makePieces(s.adversary, s.n, s.seed);
    if (pieces.empty()) throw InputError("no pieces");
    rec.spec.n = pieces.size();
    auto pk = makePacker(s.algo, s.seed);
    Rat last;
    for (size_t i = 0; i < pieces.size(); ++i) {
        Placement pl = pk->place(pieces[i]);
        ConvexPiece q = pl.placed();
        if (q.xmin().sign() < 0 || q.ymin().sign() < 0 || Rat(1) < q.ymax())
            rec.fail("step " + std::to_string(i) + ": piece leaves the strip");
        if (pk->occupiedWidth() < last) rec.fail("step " + std::to_string(i) + ": width decreased");
        last = pk->occupiedWidth();
    }
    ValidityReport v = validatePlacements(pk->placements(), Box2{Rat(0), Rat(0), Rat(0), Rat(1), true});
    if (!v.ok) rec.fail("invalid packing: " + v.message);
    rec.cost = pk->occupiedWidth();
    rec.bound = optLowerBound(pieces, Problem::Strip);
    rec.ratio = rec.cost / rec.bound;
    rec.note("density", decimal(pk->totalArea() / rec.cost));
    if (auto* op = dynamic_cast<const OnlinePacker*>(pk.get())) detail::auditOnline(*op, rec);
    detail::logPacker(*pk, log);
    return rec;
}

inline TrialRecord runReduction(const ExperimentSpec& s, const std::vector<Rat>* stream = nullptr, RunLog* log = nullptr) {
    TrialRecord rec;
    rec.spec = s;
    rec.valid = true;
    size_t n = s.n;
    if (n == 0) throw InputError("n must be positive");
    PackerSorter run(makePacker(detail::packerName(s.algo), s.seed), n);
    auto src = detail::makeSource(s, n, Rat(1), stream);
    for (size_t i = 0; i < n; ++i) run.place(src.next(run.array(), i));
    GapCertificate g = gapCertificate(run);
    ValidityReport v = validatePlacements(run.packer().placements(), Box2{Rat(0), Rat(0), Rat(0), Rat(1), true});
    if (!v.ok) rec.fail("invalid packing: " + v.message);
    if (!g.holds) rec.fail("width below half the cost");
    if (s.adversary == "unit") {
        bool holds = detail::meetsUnitLowerBound(g.cost, n);
        rec.note("sqrt_half_n", holds ? "true" : "false");
        if (!holds && !(Rat(1) < run.realizedGamma())) rec.fail("cost below sqrt(n/2)");
    }
    rec.cost = g.cost;
    rec.bound = Rat(1);
    rec.ratio = g.cost;
    rec.note("width", decimal(g.width));
    rec.note("gamma", decimal(run.realizedGamma()));
    rec.note("holds", g.holds ? "true" : "false");
    if (auto* op = dynamic_cast<const OnlinePacker*>(&run.packer())) detail::auditOnline(*op, rec);
    if (log) {
        log->reduction = run.steps();
        log->array = run.array();
        detail::logPacker(run.packer(), log);
    }
    return rec;
}

inline TrialRecord runOffline(const ExperimentSpec& s, const std::vector<ConvexPiece>* given = nullptr,
                              RunLog* log = nullptr, OfflineResult* out = nullptr) {
    TrialRecord rec;
    rec.spec = s;
    rec.valid = true;
    Problem pr = parseProblem(s.algo);
    Rat delta = detail::paramRat(s, "delta", Rat(1, 10));
    std::string family = s.adversary.empty() ? "random" : s.adversary;
    std::vector<ConvexPiece> ps = given                           ? *given
                                  : detail::isFileRef(family) ? detail::loadPiecesRef(family)
                                                              : makeOfflineInstance(pr, s.n, s.seed, delta, family);
    rec.spec.n = ps.size();
    OfflineResult r;
    Rat area = totalArea(ps);
    const Box2 unit{Rat(0), Rat(0), Rat(1), Rat(1), false};
    switch (pr) {
        case Problem::Strip: {
            r = offlineStrip(ps, detail::paramRat(s, "alpha", Rat(109, 200)), detail::paramRat(s, "c", Rat(11, 5)));
            auto v = validatePlacements(r.placements, Box2{Rat(0), Rat(0), Rat(0), Rat(1), true});
            if (!v.ok) rec.fail("invalid packing: " + v.message);
            if (Rat(327, 10) < r.ratio) rec.fail("strip ratio above 32.7");
            if (log) log->frames.push_back({Rat(0), Rat(0), max(r.cost, Rat(1)), Rat(1), "strip"});
            break;
        }
        case Problem::Bins: {
            r = offlineBins(ps, delta);
            std::map<int, std::vector<Placement>> bins;
            for (size_t i = 0; i < r.placements.size(); ++i) bins[r.region[i]].push_back(r.placements[i]);
            for (auto& [b, pl] : bins) {
                auto v = validatePlacements(pl, unit);
                if (!v.ok) rec.fail("bin " + std::to_string(b) + ": " + v.message);
            }
            Rat rho = squareDensity(delta);
            if (area / rho + Rat(1) < r.cost) rec.fail("bin count above area/rho + 1");
            if (!ps.empty() && Rat(1) / rho + rho < r.ratio) rec.fail("bin ratio above 1/rho + rho");
            rec.note("area_bound", decimal(area / rho + Rat(1)));
            if (log)
                for (size_t b = 0; b < r.bins; ++b) {
                    Rat off(static_cast<int64_t>(b) * 6, 5);
                    log->frames.push_back({off, Rat(0), off + Rat(1), Rat(1), "bin " + std::to_string(b)});
                }
            break;
        }
        case Problem::Square: {
            std::optional<Rat> alpha;
            if (s.has("alpha")) alpha = Rat::parse(s.param("alpha"));
            r = offlineSquare(ps, delta, alpha);
            if (r.fits) {
                auto v = validatePlacements(r.placements, unit);
                if (!v.ok) rec.fail("invalid packing: " + v.message);
            }
            if (!(squareDensity(delta) < area) && !r.fits) rec.fail("instance within the density guarantee did not fit");
            rec.note("fits", r.fits ? "true" : "false");
            rec.note("near_empty_max", std::to_string(r.nearEmptyMax));
            if (r.nearEmptyMax > 1) rec.fail("more than one near-empty container in a height class");
            if (log) log->frames.push_back({Rat(0), Rat(0), Rat(1), Rat(1), "square"});
            break;
        }
        case Problem::Perimeter: {
            r = offlinePerimeter(ps, detail::paramRat(s, "alpha", Rat(1, 2)), detail::paramRat(s, "c", Rat(53, 50)));
            auto v = validatePlacements(r.placements, std::nullopt);
            if (!v.ok) rec.fail("invalid packing: " + v.message);
            if (Rat(89, 10) < r.ratio) rec.fail("perimeter ratio above 8.9");
            break;
        }
    }
    if (!ps.empty() && !r.containers.boundHolds) rec.fail("container area exceeds its bound");
    rec.cost = r.cost;
    rec.bound = r.lowerBound;
    rec.ratio = r.ratio;
    rec.note("pieces", std::to_string(ps.size()));
    rec.note("layout_cost", decimal(r.layoutCost));
    if (log) {
        if (pr == Problem::Bins) {
            for (size_t i = 0; i < r.placements.size(); ++i) {
                Placement p = r.placements[i];
                p.dx += Rat(static_cast<int64_t>(r.region[i]) * 6, 5);
                log->placements.push_back(p);
            }
        } else {
            log->placements = r.placements;
        }
    }
    if (out) *out = std::move(r);
    return rec;
}

// Runs one trial; errors become failed records.
inline TrialRecord runTrial(const ExperimentSpec& s, RunLog* log = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    TrialRecord rec;
    try {
        if (s.kind == "sort-duel") rec = runSortDuel(s, nullptr, log);
        else if (s.kind == "pack-run") rec = runPackBench(s, nullptr, log);
        else if (s.kind == "reduction-run") rec = runReduction(s, nullptr, log);
        else if (s.kind == "offline-run") rec = runOffline(s, nullptr, log);
        else throw InputError("unknown experiment kind '" + s.kind + "'");
    } catch (const std::exception& e) {
        rec = TrialRecord{};
        rec.spec = s;
        rec.fail(e.what());
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

// ------------------------------------------------------------------ sweep

// Runs trials on `threads` workers; results come back in spec order.
inline std::vector<TrialRecord> sweep(const std::vector<ExperimentSpec>& specs, unsigned threads = 0) {
    std::vector<TrialRecord> out(specs.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<size_t>(threads, std::max<size_t>(specs.size(), 1)));
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (size_t i; (i = next.fetch_add(1)) < specs.size();) out[i] = runTrial(specs[i]);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return out;
}

inline std::string csvHeader() { return "kind,algo,adversary,n,cost,bound,ratio,valid\n"; }

inline std::string csvRow(const TrialRecord& r) {
    const ExperimentSpec& s = r.spec;
    return csvField(s.kind) + "," + csvField(s.algo) + "," + csvField(s.adversary) + "," + std::to_string(s.n) + "," +
           decimal(r.cost) + "," + decimal(r.bound) + "," + decimal(r.ratio) + "," + (r.valid ? "true" : "false") + "\n";
}

inline std::string sweepCsv(const std::vector<TrialRecord>& rs) {
    std::string s = csvHeader();
    for (auto& r : rs) s += csvRow(r);
    return s;
}

// Least-squares slope of log(mean ratio) against log(n) per
// (kind, algo, adversary); groups with fewer than two sizes are skipped.
inline std::string fitsCsv(const std::vector<TrialRecord>& rs) {
    std::map<std::tuple<std::string, std::string, std::string>, std::map<size_t, std::pair<double, size_t>>> g;
    for (auto& r : rs) {
        if (!r.valid || r.ratio.sign() <= 0) continue;
        auto& cell = g[{r.spec.kind, r.spec.algo, r.spec.adversary}][r.spec.n];
        cell.first += r.ratio.toDouble();
        cell.second += 1;
    }
    std::string s = "kind,algo,adversary,slope\n";
    for (auto& [key, byN] : g) {
        if (byN.size() < 2) continue;
        double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
        for (auto& [n, acc] : byN) {
            double x = std::log(static_cast<double>(n)), y = std::log(acc.first / static_cast<double>(acc.second));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            m += 1;
        }
        double den = m * sxx - sx * sx;
        double slope = den == 0 ? 0 : (m * sxy - sx * sy) / den;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", slope);
        s += csvField(std::get<0>(key)) + "," + csvField(std::get<1>(key)) + "," + csvField(std::get<2>(key)) + "," + buf + "\n";
    }
    return s;
}

// Specs from JSON. Each entry may list several values for algo, adversary,
// n and seed; the cartesian product is expanded in that order.
inline std::vector<ExperimentSpec> specsFromJson(const json& j) {
    const json& arr = j.is_object() ? j.at("sweep") : j;
    std::vector<ExperimentSpec> out;
    auto list = [](const json& v) {
        std::vector<json> r;
        if (v.is_array())
            for (auto& x : v) r.push_back(x);
        else
            r.push_back(v);
        return r;
    };
    for (auto& e : arr) {
        ExperimentSpec base;
        base.kind = e.at("kind").get<std::string>();
        if (e.contains("params"))
            for (auto& [k, v] : e.at("params").items()) base.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
        std::vector<json> seeds;
        if (e.contains("seeds") && e.at("seeds").is_number_integer()) {
            for (int64_t i = 0; i < e.at("seeds").get<int64_t>(); ++i) seeds.push_back(i);
        } else {
            seeds = list(e.value("seed", json(0)));
        }
        for (auto& a : list(e.at("algo")))
            for (auto& adv : list(e.value("adversary", json(""))))
                for (auto& n : list(e.at("n")))
                    for (auto& sd : seeds) {
                        ExperimentSpec s = base;
                        s.algo = a.get<std::string>();
                        s.adversary = adv.get<std::string>();
                        s.n = n.get<size_t>();
                        s.seed = sd.get<uint64_t>();
                        if (s.n == 0) throw InputError("n must be at least 1");
                        out.push_back(std::move(s));
                    }
    }
    return out;
}

inline json recordToJson(const TrialRecord& r) {
    json j = {{"kind", r.spec.kind},          {"algo", r.spec.algo},     {"adversary", r.spec.adversary},
              {"n", r.spec.n},                {"seed", r.spec.seed},     {"cost", r.cost.str()},
              {"cost_decimal", decimal(r.cost)}, {"bound", r.bound.str()}, {"ratio", decimal(r.ratio)},
              {"valid", r.valid},             {"message", r.message}};
    for (auto& [k, v] : r.extra) j[k] = v;
    return j;
}

}  // namespace fanpack
