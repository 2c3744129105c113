#pragma once
// Offline packing through height classes and slope-sorted mini-containers.

#include "fanpack/errors.hpp"
#include "fanpack/geometry.hpp"
#include "fanpack/rat.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fanpack {

struct MiniContainer {
    int heightClass = 0;
    Rat width, height;
    std::vector<size_t> pieces;  // indices into the input
    std::vector<Rat> dx, dy;     // local offsets, bottom-left of the container at the origin
    Rat contentRight;            // rightmost x of the contents
    bool closed = false;         // a later piece of this class did not fit
};

struct ContainerSet {
    std::vector<MiniContainer> containers;
    Rat alpha, c, wmax, hmax, area;
    Rat totalArea;  // sum of container areas
    Rat bound;      // right-hand side of the container-area inequality
    bool boundHolds = false;
};

inline Rat maxWidth(const std::vector<ConvexPiece>& ps) {
    Rat w;
    for (auto& p : ps) w = max(w, p.width());
    return w;
}
inline Rat maxHeight(const std::vector<ConvexPiece>& ps) {
    Rat h;
    for (auto& p : ps) h = max(h, p.height());
    return h;
}
inline Rat totalArea(const std::vector<ConvexPiece>& ps) {
    Rat a;
    for (auto& p : ps) a += p.area();
    return a;
}

// Container area bound: (1 + 1/c) [2/alpha area + (c + 2/alpha)/(1 - alpha) hmax wmax].
inline Rat containerAreaBound(const Rat& alpha, const Rat& c, const Rat& area, const Rat& hmax, const Rat& wmax) {
    Rat two(2);
    return (Rat(1) + Rat(1) / c) * (two / alpha * area + (c + two / alpha) / (Rat(1) - alpha) * hmax * wmax);
}

// Groups pieces by height class, sorts each class by spine slope and fills
// containers left to right, each piece standing on the floor at the leftmost
// free offset. `widthOverride` replaces (c + 1) wmax as the container width.
inline ContainerSet buildMiniContainers(const std::vector<ConvexPiece>& ps, const Rat& alpha, const Rat& c,
                                        const std::optional<Rat>& widthOverride = std::nullopt) {
    if (ps.empty()) throw InputError("buildMiniContainers: empty piece set");
    if (!(Rat(0) < alpha && alpha < Rat(1))) throw InputError("alpha must lie in (0,1)");
    ContainerSet out;
    out.alpha = alpha;
    out.c = c;
    out.wmax = maxWidth(ps);
    out.hmax = maxHeight(ps);
    out.area = totalArea(ps);
    Rat W = widthOverride ? *widthOverride : (c + Rat(1)) * out.wmax;
    if (W < out.wmax) throw InputError("container narrower than the widest piece");

    std::map<int, std::vector<size_t>> classes;
    for (size_t i = 0; i < ps.size(); ++i) {
        int k = 0;
        Rat next = alpha * out.hmax;
        while (!(next < ps[i].height())) {
            ++k;
            next *= alpha;
        }
        classes[k].push_back(i);
    }
    for (auto& [k, idx] : classes) {
        std::vector<Rat> slope(ps.size());
        for (size_t i : idx) slope[i] = spine(ps[i]).slope();
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return slope[a] < slope[b]; });
        Rat hk = out.hmax * Rat::ipow(alpha, k);
        std::vector<ConvexPiece> local;
        MiniContainer cur;
        auto open = [&]() {
            cur = MiniContainer{};
            cur.heightClass = k;
            cur.width = W;
            cur.height = hk;
            local.clear();
        };
        open();
        for (size_t i : idx) {
            const ConvexPiece& p = ps[i];
            Rat ty = -p.ymin();
            Rat t = -p.xmin();
            std::vector<std::pair<Rat, Rat>> iv;
            for (auto& q : local) {
                auto b = blockedInterval(p, ty, q, Rat(0), Rat(0));
                if (b) iv.push_back(*b);
            }
            std::sort(iv.begin(), iv.end(), [](auto& a, auto& b) { return a.first < b.first; });
            for (auto& [a, b] : iv) {
                if (!(a < t)) break;
                if (t < b) t = b;
            }
            if (W < t + p.xmax()) {
                cur.closed = true;
                out.containers.push_back(std::move(cur));
                open();
                t = -p.xmin();
            }
            cur.pieces.push_back(i);
            cur.dx.push_back(t);
            cur.dy.push_back(ty);
            local.push_back(p.translated(t, ty));
            cur.contentRight = max(cur.contentRight, t + p.xmax());
        }
        out.containers.push_back(std::move(cur));
    }
    for (auto& m : out.containers) out.totalArea += m.width * m.height;
    Rat cc = widthOverride ? *widthOverride / out.wmax - Rat(1) : c;
    out.bound = containerAreaBound(alpha, cc, out.area, out.hmax, out.wmax);
    out.boundHolds = !(out.bound < out.totalArea);
    return out;
}

enum class Problem { Strip, Bins, Square, Perimeter };

inline std::string problemName(Problem p) {
    switch (p) {
        case Problem::Strip: return "strip";
        case Problem::Bins: return "bins";
        case Problem::Square: return "square";
        case Problem::Perimeter: return "perimeter";
    }
    return "?";
}
inline Problem parseProblem(const std::string& s) {
    if (s == "strip") return Problem::Strip;
    if (s == "bins") return Problem::Bins;
    if (s == "square") return Problem::Square;
    if (s == "perimeter") return Problem::Perimeter;
    throw InputError("unknown problem '" + s + "'");
}

// Certified lower bound on the optimum.
inline Rat optLowerBound(const std::vector<ConvexPiece>& ps, Problem pr) {
    if (ps.empty()) throw InputError("optLowerBound: empty piece set");
    Rat w = maxWidth(ps), h = maxHeight(ps), a = totalArea(ps);
    switch (pr) {
        case Problem::Strip: return max(w, a);
        case Problem::Bins: return max(Rat(1), a.ceil());
        case Problem::Perimeter: return max(Rat(2) * w + Rat(2) * h, Rat(4) * a.sqrtLower(48));
        case Problem::Square: return Rat(1);
    }
    return Rat(0);
}

struct OfflineResult {
    Problem problem = Problem::Strip;
    std::vector<Placement> placements;
    std::vector<int> region;  // bin index per placement (bins), else 0
    Rat cost;                 // width | bin count | perimeter | stack height (square)
    Rat layoutCost;           // same measure on the container layout
    Rat lowerBound;
    Rat ratio;
    bool fits = true;
    size_t bins = 0;
    ContainerSet containers;
    size_t nearEmptyMax = 0;  // square mode: most non-full containers in one class
};

namespace detail {

struct Slot {
    size_t container;
    Rat x, y;
};

// First fit of containers (tallest first) into columns of height `limit`.
// `fits(used, h)` decides whether a column at height `used` accepts height h.
template <class Fits>
std::vector<std::vector<size_t>> firstFitColumns(const ContainerSet& cs, Fits fits) {
    std::vector<size_t> order(cs.containers.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return cs.containers[b].height < cs.containers[a].height; });
    std::vector<std::vector<size_t>> cols;
    std::vector<Rat> used;
    for (size_t i : order) {
        const Rat& h = cs.containers[i].height;
        size_t k = 0;
        for (; k < cols.size(); ++k)
            if (fits(used[k], h)) break;
        if (k == cols.size()) {
            cols.emplace_back();
            used.emplace_back();
        }
        cols[k].push_back(i);
        used[k] += h;
    }
    return cols;
}

inline void emitColumn(const std::vector<ConvexPiece>& ps, const ContainerSet& cs, const std::vector<size_t>& col,
                       const Rat& x0, const Rat& y0, int region, OfflineResult& r) {
    Rat y = y0;
    for (size_t ci : col) {
        const MiniContainer& m = cs.containers[ci];
        for (size_t j = 0; j < m.pieces.size(); ++j) {
            r.placements.push_back({ps[m.pieces[j]], m.dx[j] + x0, m.dy[j] + y});
            r.region.push_back(region);
        }
        y += m.height;
    }
}

inline Rat placedRight(const std::vector<Placement>& ps) {
    Rat r;
    for (auto& p : ps) r = max(r, p.piece.xmax() + p.dx);
    return r;
}
inline Rat placedTop(const std::vector<Placement>& ps) {
    Rat r;
    for (auto& p : ps) r = max(r, p.piece.ymax() + p.dy);
    return r;
}

inline void checkDiameters(const std::vector<ConvexPiece>& ps, const Rat& delta) {
    Rat d2 = delta * delta;
    for (size_t i = 0; i < ps.size(); ++i) {
        const auto& v = ps[i].vertices();
        for (size_t a = 0; a < v.size(); ++a)
            for (size_t b = a + 1; b < v.size(); ++b) {
                Rat dx = v[a].x - v[b].x, dy = v[a].y - v[b].y;
                if (d2 < dx * dx + dy * dy)
                    throw InputError("piece " + std::to_string(i) + " has diameter above " + delta.str());
            }
    }
}

}  // namespace detail

inline OfflineResult offlineStrip(const std::vector<ConvexPiece>& ps, const Rat& alpha = Rat(109, 200),
                                  const Rat& c = Rat(11, 5)) {
    OfflineResult r;
    r.problem = Problem::Strip;
    if (ps.empty()) throw InputError("offlineStrip: empty piece set");
    for (auto& p : ps)
        if (Rat(1) < p.height()) throw InputError("offlineStrip: piece taller than the strip");
    r.containers = buildMiniContainers(ps, alpha, c);
    const ContainerSet& cs = r.containers;
    auto cols = detail::firstFitColumns(cs, [](const Rat& used, const Rat& h) { return !(Rat(1) < used + h); });
    Rat W = (c + Rat(1)) * cs.wmax;
    for (size_t k = 0; k < cols.size(); ++k) detail::emitColumn(ps, cs, cols[k], W * Rat(static_cast<int64_t>(k)), Rat(0), 0, r);
    r.cost = detail::placedRight(r.placements);
    r.layoutCost = W * Rat(static_cast<int64_t>(cols.size()));
    r.lowerBound = optLowerBound(ps, Problem::Strip);
    r.ratio = r.layoutCost / r.lowerBound;
    return r;
}

// Density guaranteed in full containers: (1 - 5 delta)(1 - 2 delta) / 4.
inline Rat squareDensity(const Rat& delta) { return (Rat(1) - Rat(5) * delta) * (Rat(1) - Rat(2) * delta) / Rat(4); }

// The alternative height ratio 1 - sqrt(3d^3 - 4d^2 + d) / (1 - d), rounded to
// a nearby rational.
inline Rat squareAlphaTuned(const Rat& delta) {
    Rat d = delta;
    Rat inner = Rat(3) * d * d * d - Rat(4) * d * d + d;
    return Rat(1) - inner.sqrtLower(30) / (Rat(1) - d);
}

inline OfflineResult offlineSquare(const std::vector<ConvexPiece>& ps, const Rat& delta,
                                   const std::optional<Rat>& alphaOverride = std::nullopt) {
    OfflineResult r;
    r.problem = Problem::Square;
    if (Rat(1, 10) < delta) throw InputError("offlineSquare: delta must be at most 1/10");
    if (ps.empty()) {
        r.fits = true;
        r.lowerBound = Rat(1);
        r.ratio = Rat(0);
        return r;
    }
    detail::checkDiameters(ps, delta);
    Rat alpha = alphaOverride ? *alphaOverride : Rat(1, 2);
    r.containers = buildMiniContainers(ps, alpha, Rat(0), Rat(1));
    const ContainerSet& cs = r.containers;
    std::map<int, size_t> notFull;
    for (auto& m : cs.containers)
        if (!(Rat(1) - delta < m.contentRight)) ++notFull[m.heightClass];
    for (auto& kv : notFull) r.nearEmptyMax = std::max(r.nearEmptyMax, kv.second);
    std::vector<size_t> all(cs.containers.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::stable_sort(all.begin(), all.end(),
                     [&](size_t a, size_t b) { return cs.containers[b].height < cs.containers[a].height; });
    detail::emitColumn(ps, cs, all, Rat(0), Rat(0), 0, r);
    Rat total;
    for (auto& m : cs.containers) total += m.height;
    r.layoutCost = total;
    r.cost = total;
    r.fits = !(Rat(1) < total);
    r.lowerBound = Rat(1);
    r.ratio = total;
    return r;
}

inline OfflineResult offlineBins(const std::vector<ConvexPiece>& ps, const Rat& delta) {
    OfflineResult r;
    r.problem = Problem::Bins;
    if (Rat(1, 10) < delta) throw InputError("offlineBins: delta must be at most 1/10");
    if (ps.empty()) {
        r.bins = 0;
        r.cost = Rat(0);
        r.lowerBound = Rat(0);
        r.ratio = Rat(0);
        return r;
    }
    detail::checkDiameters(ps, delta);
    r.containers = buildMiniContainers(ps, Rat(1, 2), Rat(0), Rat(1));
    const ContainerSet& cs = r.containers;
    auto cols = detail::firstFitColumns(cs, [](const Rat& used, const Rat& h) { return !(Rat(1) < used + h); });
    for (size_t k = 0; k < cols.size(); ++k) detail::emitColumn(ps, cs, cols[k], Rat(0), Rat(0), static_cast<int>(k), r);
    r.bins = cols.size();
    r.cost = Rat(static_cast<int64_t>(r.bins));
    r.layoutCost = r.cost;
    r.lowerBound = optLowerBound(ps, Problem::Bins);
    r.ratio = r.cost / r.lowerBound;
    return r;
}

inline OfflineResult offlinePerimeter(const std::vector<ConvexPiece>& ps, const Rat& alpha = Rat(1, 2),
                                      const Rat& c = Rat(53, 50)) {
    OfflineResult r;
    r.problem = Problem::Perimeter;
    if (ps.empty()) throw InputError("offlinePerimeter: empty piece set");
    r.containers = buildMiniContainers(ps, alpha, c);
    const ContainerSet& cs = r.containers;
    Rat hmax = cs.hmax, AC = cs.totalArea;
    // used + h <= sqrt(AC) + hmax, compared after squaring
    auto fits = [&](const Rat& used, const Rat& h) {
        Rat lhs = used + h - hmax;
        return lhs.sign() <= 0 || !(AC < lhs * lhs);
    };
    auto cols = detail::firstFitColumns(cs, fits);
    Rat W = (c + Rat(1)) * cs.wmax;
    Rat tallest;
    for (size_t k = 0; k < cols.size(); ++k) {
        Rat h;
        for (size_t ci : cols[k]) h += cs.containers[ci].height;
        tallest = max(tallest, h);
        detail::emitColumn(ps, cs, cols[k], W * Rat(static_cast<int64_t>(k)), Rat(0), 0, r);
    }
    Rat xmin = r.placements.front().piece.xmin() + r.placements.front().dx, ymin = xmin;
    ymin = r.placements.front().piece.ymin() + r.placements.front().dy;
    for (auto& p : r.placements) {
        xmin = min(xmin, p.piece.xmin() + p.dx);
        ymin = min(ymin, p.piece.ymin() + p.dy);
    }
    Rat bw = detail::placedRight(r.placements) - xmin, bh = detail::placedTop(r.placements) - ymin;
    r.cost = Rat(2) * (bw + bh);
    r.layoutCost = Rat(2) * (W * Rat(static_cast<int64_t>(cols.size())) + tallest);
    r.lowerBound = optLowerBound(ps, Problem::Perimeter);
    r.ratio = r.layoutCost / r.lowerBound;
    return r;
}

}  // namespace fanpack
