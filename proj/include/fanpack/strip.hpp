#pragma once
// Online translational packing into the strip [0, inf) x [0, 1].

#include "fanpack/errors.hpp"
#include "fanpack/geometry.hpp"
#include "fanpack/rat.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace fanpack {

class StripPacker {
public:
    virtual ~StripPacker() = default;
    virtual Placement place(const ConvexPiece& p) = 0;
    virtual std::string name() const = 0;

    const std::vector<Placement>& placements() const { return placements_; }
    // Rightmost x of any placed piece.
    const Rat& occupiedWidth() const { return width_; }
    Rat totalArea() const {
        Rat a;
        for (auto& p : placements_) a += p.piece.area();
        return a;
    }

protected:
    std::vector<Placement> placements_;
    std::vector<ConvexPiece> world_;
    Rat width_;

    void record(const ConvexPiece& p, const Rat& dx, const Rat& dy) {
        placements_.push_back({p, dx, dy});
        world_.push_back(p.translated(dx, dy));
        if (width_ < world_.back().xmax()) width_ = world_.back().xmax();
    }
    static void checkHeight(const ConvexPiece& p) {
        if (Rat(1) < p.height()) throw InputError("piece taller than the strip");
    }

    // Leftmost t >= tlo with p raised by ty clear of every placed piece.
    Rat sweepAtHeight(const ConvexPiece& p, const Rat& ty, Rat t) const {
        std::vector<std::pair<Rat, Rat>> iv;
        for (auto& q : world_) {
            if (!(q.xmax() - p.xmin() > t)) continue;
            auto b = blockedInterval(p, ty, q, Rat(0), Rat(0));
            if (b) iv.push_back(*b);
        }
        std::sort(iv.begin(), iv.end(), [](auto& a, auto& b) { return a.first < b.first; });
        for (auto& [a, b] : iv) {
            if (!(a < t)) break;
            if (t < b) t = b;
        }
        return t;
    }
};

namespace detail {

// Full-height pieces in a strip are totally ordered left to right; a new
// full-height piece can only collide with its two neighbours in that order.
class FullHeightOrder {
public:
    struct Fit {
        size_t gap;
        Rat t;
    };

    // Leftmost feasible offset t >= tlo; gap k sits before order[k].
    Fit leftmost(const std::vector<ConvexPiece>& world, const ConvexPiece& p, const Rat& ty, const Rat& tlo) const {
        double pw[3];
        for (int j = 0; j < 3; ++j) {
            auto [l, r] = p.slice(Rat(j, 2) - ty);
            pw[j] = (r - l).toDouble();
        }
        double plo = p.xmin().toDouble();
        double tlod = tlo.toDouble();
        const double eps = 1e-9;
        for (size_t k = 0; k <= order_.size(); ++k) {
            if (k < order_.size()) {
                const Slices& nx = sl_[order_[k]];
                if (nx.xmax - plo < tlod - eps) continue;
                bool room = true;
                for (int j = 0; j < 3 && room; ++j) {
                    double left = k == 0 ? 0.0 : sl_[order_[k - 1]].r[j];
                    if (nx.l[j] - left < pw[j] - eps) room = false;
                }
                if (!room) continue;
            }
            Rat t = tlo;
            if (k > 0) {
                auto b = blockedInterval(p, ty, world[order_[k - 1]], Rat(0), Rat(0));
                if (b && t < b->second) t = b->second;
            }
            if (k < order_.size()) {
                auto a = blockedInterval(p, ty, world[order_[k]], Rat(0), Rat(0));
                if (a && a->first < t) continue;
            }
            return {k, t};
        }
        throw InvariantViolation("no gap found to the right of all pieces");
    }

    void insert(size_t gap, size_t idx, const ConvexPiece& placed) {
        if (sl_.size() <= idx) sl_.resize(idx + 1);
        Slices& s = sl_[idx];
        for (int j = 0; j < 3; ++j) {
            auto [l, r] = placed.slice(Rat(j, 2));
            s.l[j] = l.toDouble();
            s.r[j] = r.toDouble();
        }
        s.xmax = placed.xmax().toDouble();
        order_.insert(order_.begin() + static_cast<long>(gap), idx);
    }
    const std::vector<size_t>& order() const { return order_; }

private:
    struct Slices {
        double l[3], r[3], xmax;
    };
    std::vector<size_t> order_;
    std::vector<Slices> sl_;
};

}  // namespace detail

// Open x-interval where the horizontal line at height y meets the interior
// of a convex polygon; y must lie strictly between its ymin and ymax.
inline std::pair<Rat, Rat> sliceAt(const ConvexPiece& f, const Rat& y) {
    const auto& v = f.vertices();
    std::optional<Rat> lo, hi;
    for (size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        if (a.y == b.y) continue;
        if ((y < a.y) == (y < b.y) && a.y != y && b.y != y) continue;
        Rat x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (!lo || x < *lo) lo = x;
        if (!hi || *hi < x) hi = x;
    }
    return {*lo, *hi};
}

// Places every piece as far left as possible.
class NaiveGreedy : public StripPacker {
public:
    Placement place(const ConvexPiece& p) override {
        checkHeight(p);
        Rat ty = -p.ymin();
        if (allFull_ && p.height() == Rat(1)) {
            auto fit = order_.leftmost(world_, p, ty, -p.xmin());
            record(p, fit.t, ty);
            order_.insert(fit.gap, world_.size() - 1, world_.back());
            return placements_.back();
        }
        allFull_ = false;
        Point t = leftmost2D(p);
        record(p, t.x, t.y);
        return placements_.back();
    }
    std::string name() const override { return "greedy"; }

    // Leftmost feasible translation (then lowest) among horizontal lines through
    // no-fit polygon vertices and the two strip bounds. On each line the
    // blocked set is a union of open intervals, swept from the left wall.
    Point leftmost2D(const ConvexPiece& p) const {
        Rat xlo = -p.xmin(), ylo = -p.ymin(), yhi = Rat(1) - p.ymax();
        std::vector<ConvexPiece> nfp;
        nfp.reserve(world_.size());
        for (auto& q : world_) nfp.push_back(noFitPolygon(q, Rat(0), Rat(0), p));
        std::vector<Rat> ys{ylo, yhi};
        for (auto& f : nfp)
            for (auto& v : f.vertices())
                if (ylo < v.y && v.y < yhi) ys.push_back(v.y);
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

        std::optional<Point> best;
        std::vector<std::pair<Rat, Rat>> blocked;
        for (const Rat& y : ys) {
            blocked.clear();
            for (auto& f : nfp) {
                if (!(f.ymin() < y && y < f.ymax())) continue;
                if (best && !(f.xmin() < best->x)) continue;
                blocked.push_back(sliceAt(f, y));
            }
            std::sort(blocked.begin(), blocked.end());
            Rat x = xlo;
            for (auto& [l, r] : blocked) {
                if (!(l < x)) break;
                if (x < r) x = r;
            }
            if (!best || x < best->x) best = Point{x, y};
        }
        return *best;
    }

    // Whether translation (tx, ty) is feasible for p against the current packing.    // Whether translation (tx, ty) is feasible for p against the current packing.
    bool feasible(const ConvexPiece& p, const Rat& tx, const Rat& ty) const {
        if (tx + p.xmin() < Rat(0) || ty + p.ymin() < Rat(0) || Rat(1) < ty + p.ymax()) return false;
        for (auto& q : world_)
            if (interiorOverlap(p, tx, ty, q, Rat(0), Rat(0))) return false;
        return true;
    }

private:
    detail::FullHeightOrder order_;
    bool allFull_ = true;
};

// Valid but deliberately erratic packer: a random height, then the leftmost
// free offset to the right of a random starting point.
class RandomFit : public StripPacker {
public:
    explicit RandomFit(uint64_t seed) : rng_(seed) {}

    Placement place(const ConvexPiece& p) override {
        checkHeight(p);
        Rat tlo = -p.xmin() + width_ * Rat(static_cast<int64_t>(rng_() % 1025), 1024);
        if (allFull_ && p.height() == Rat(1)) {
            Rat ty = -p.ymin();
            auto fit = order_.leftmost(world_, p, ty, tlo);
            record(p, fit.t, ty);
            order_.insert(fit.gap, world_.size() - 1, world_.back());
            return placements_.back();
        }
        allFull_ = false;
        Rat ty = -p.ymin() + (Rat(1) - p.height()) * Rat(static_cast<int64_t>(rng_() % 1025), 1024);
        Rat t = sweepAtHeight(p, ty, tlo);
        record(p, t, ty);
        return placements_.back();
    }
    std::string name() const override { return "randomfit"; }

private:
    std::mt19937_64 rng_;
    detail::FullHeightOrder order_;
    bool allFull_ = true;
};

// Box types are trit vectors; a d-dimensional type has base 2 * 3^-d and
// shear 2 * sum x_j / 3^j, in class units where the basic box is 2 x 1.
using Trits = std::vector<int8_t>;

inline std::string tritString(const Trits& t) {
    std::string s;
    for (auto x : t) s.push_back(x < 0 ? '-' : (x > 0 ? '+' : '0'));
    return s;
}
inline Rat typeBase(size_t d) { return Rat(2) / Rat::ipow(Rat(3), static_cast<int>(d)); }
inline Rat typeShear(const Trits& t) {
    Rat s;
    Rat w(2, 3);
    for (auto x : t) {
        if (x) s += Rat(x) * w;
        w /= Rat(3);
    }
    return s;
}

enum class Side { Left, Right };

struct MatchResult {
    Trits type;
    Side side = Side::Right;
    Rat offset;  // bottom-left of the piece relative to the box's bottom-left
};

// Matching box type for a parallelogram of height 1, base `base` and shear
// `shear`. The construction needs base <= 1 and |shear| <= 1.
inline MatchResult matchType(const Rat& base, const Rat& shear) {
    if (base.sign() <= 0) throw InputError("matchType: base must be positive");
    if (Rat(1) < base || Rat(1) < abs(shear)) throw InputError("matchType: base or shear exceeds 1");
    size_t d = 0;
    Rat p3(1, 3);
    while (!(p3 < base)) {
        ++d;
        p3 /= Rat(3);
    }
    MatchResult m;
    Rat b0(0), L(2), sT(0);
    Rat top = Rat(1) + shear;
    for (size_t j = 0; j < d; ++j) {
        Rat rel = top - (b0 + sT);
        Rat third = L / Rat(3);
        int8_t x = 0;
        if (rel < third)
            x = -1;
        else if (third + third < rel)
            x = 1;
        m.type.push_back(x);
        b0 += third;
        sT += Rat(x) * third;
        L = third;
    }
    Rat mid = b0 + sT + L / Rat(2);
    if (mid < top) {
        m.side = Side::Left;
        m.offset = Rat(1) - base - b0;
    } else {
        m.side = Side::Right;
        m.offset = Rat(1) - b0;
    }
    return m;
}

struct OnlineBox {
    int wclass = 1, hclass = 0;
    Trits type;
    Rat ax, ay;  // bottom-left corner in strip coordinates
    long parent = -1;
    std::vector<long> children;
    std::vector<Rat> childOffset;  // local class units
    long piece = -1;
};

struct OnlineStats {
    size_t lemmaAreaChecks = 0;
    size_t lemmaAreaViolations = 0;
    size_t containmentChecks = 0;
    size_t containmentViolations = 0;
    size_t nearEmptyViolations = 0;
    size_t maxNearEmpty = 0;
};

class OnlinePacker : public StripPacker {
public:
    Placement place(const ConvexPiece& p) override {
        checkHeight(p);
        if (!unit_) unit_ = p.width();
        const Rat& u = *unit_;
        HorizontalParallelogram pp = boundingParallelogram(p);
        Rat H = pp.height;
        int h = 0;
        while (!(Rat::pow2(-h - 1) < H)) ++h;
        HorizontalParallelogram pe = pp.extendedTo(Rat::pow2(-h));
        Rat ew = pe.width() / u;
        int wc = 1;
        if (Rat(1) < ew)
            while (Rat::pow2(wc) < ew * Rat(2)) ++wc;
        Rat sx = u * Rat::pow2(wc - 1);
        Rat base = pe.base / sx, shear = pe.shear / sx;
        MatchResult m = matchType(base, shear);
        size_t d = m.type.size();

        ++stats_.lemmaAreaChecks;
        if (Rat(6) * base < typeBase(d)) ++stats_.lemmaAreaViolations;

        long cur = -1;
        size_t lvl = 0;
        for (size_t j = d; j-- > 0;) {
            Trits prefix(m.type.begin(), m.type.begin() + static_cast<long>(j));
            auto it = registry_.find(regKey(wc, h, prefix, m.type[j]));
            if (it != registry_.end() && !it->second.empty()) {
                cur = *it->second.begin();
                lvl = j;
                break;
            }
        }
        if (cur < 0) {
            cur = newBasicBox(wc, h);
            lvl = 0;
        }
        std::vector<long> touched;
        while (lvl < d) {
            auto c = leftmostChild(cur, m.type[lvl]);
            if (!c) throw InvariantViolation("registered box has no room for its child");
            long child = addChild(cur, m.type[lvl], *c);
            touched.push_back(cur);
            cur = child;
            ++lvl;
        }
        boxes_[static_cast<size_t>(cur)].piece = static_cast<long>(placements_.size());
        for (long b : touched) refreshRegistry(b);

        const OnlineBox& leaf = boxes_[static_cast<size_t>(cur)];
        Rat tx = leaf.ax + m.offset * sx;
        Rat tyy = leaf.ay;
        Rat dx = tx - pp.anchor.x, dy = tyy - pp.anchor.y;
        ++stats_.containmentChecks;
        if (!inside(p.translated(dx, dy), boxGeometry(cur))) ++stats_.containmentViolations;
        record(p, dx, dy);
        pieceBox_.push_back(cur);

        size_t worst = 0;
        for (auto& kv : nearEmpty_) worst = std::max(worst, kv.second);
        stats_.maxNearEmpty = std::max(stats_.maxNearEmpty, worst);
        if (worst > 2) ++stats_.nearEmptyViolations;
        return placements_.back();
    }
    std::string name() const override { return "onlinepacker"; }

    const std::vector<OnlineBox>& boxes() const { return boxes_; }
    const OnlineStats& stats() const { return stats_; }
    std::optional<Rat> unit() const { return unit_; }

    // Boxes with exactly one child, per (width class, height class, type).
    // Recounted from scratch; throws if any count exceeds two.
    std::map<std::string, size_t> nearEmptyAudit() const {
        std::map<std::string, size_t> out;
        for (auto& b : boxes_)
            if (b.children.size() == 1) ++out[typeKey(b.wclass, b.hclass, b.type)];
        for (auto& kv : out)
            if (kv.second > 2) throw InvariantViolation("more than two near-empty boxes of type " + kv.first);
        for (auto& kv : nearEmpty_) {
            auto it = out.find(kv.first);
            size_t v = it == out.end() ? 0 : it->second;
            if (v != kv.second) throw InvariantViolation("near-empty bookkeeping out of sync for " + kv.first);
        }
        return out;
    }

    // The parallelogram of box b in strip coordinates.
    HorizontalParallelogram boxGeometry(long b) const {
        const OnlineBox& x = boxes_[static_cast<size_t>(b)];
        Rat sx = *unit_ * Rat::pow2(x.wclass - 1), sy = Rat::pow2(-x.hclass);
        return {{x.ax, x.ay}, typeBase(x.type.size()) * sx, typeShear(x.type) * sx, sy};
    }
    // Occupied extent of the allocated rectangles.
    Rat allocatedWidth() const {
        Rat w;
        for (auto& r : rects_) w = max(w, r.x + r.w);
        return w;
    }

    // Child placement and containment checks from scratch; used by tests.
    bool auditBoxes() const {
        for (size_t i = 0; i < boxes_.size(); ++i) {
            const OnlineBox& b = boxes_[i];
            for (size_t a = 0; a < b.children.size(); ++a) {
                ConvexPiece ca = boxGeometry(b.children[a]).toPiece();
                if (!inside(ca, boxGeometry(static_cast<long>(i)))) return false;
                for (size_t c = a + 1; c < b.children.size(); ++c) {
                    ConvexPiece cc = boxGeometry(b.children[c]).toPiece();
                    if (interiorOverlap(ca, Rat(0), Rat(0), cc, Rat(0), Rat(0))) return false;
                }
            }
            if (b.piece >= 0 && !b.children.empty()) return false;
        }
        return true;
    }

private:
    struct RectSlot {
        int wclass;
        Rat x, w, used;
    };
    std::optional<Rat> unit_;
    std::vector<OnlineBox> boxes_;
    std::vector<RectSlot> rects_;
    std::map<std::string, std::set<long>> registry_;
    std::map<std::string, size_t> nearEmpty_;
    std::vector<long> pieceBox_;
    OnlineStats stats_;

    static std::string typeKey(int wc, int h, const Trits& t) {
        return std::to_string(wc) + "/" + std::to_string(h) + "/" + tritString(t);
    }
    static std::string regKey(int wc, int h, const Trits& t, int8_t x) {
        return typeKey(wc, h, t) + ">" + (x < 0 ? "-" : (x > 0 ? "+" : "0"));
    }

    static bool inside(const ConvexPiece& piece, const HorizontalParallelogram& box) {
        ConvexPiece bp = box.toPiece();
        const auto& v = bp.vertices();
        for (auto& q : piece.vertices())
            for (size_t i = 0; i < v.size(); ++i)
                if (orient(v[i], v[(i + 1) % v.size()], q) < 0) return false;
        return true;
    }

    // Leftmost local offset for a new child of trit x inside box b.
    std::optional<Rat> leftmostChild(long b, int8_t x) const {
        const OnlineBox& B = boxes_[static_cast<size_t>(b)];
        if (B.piece >= 0 || B.children.size() >= 3) return std::nullopt;
        size_t d = B.type.size();
        Rat L = typeBase(d), L3 = L / Rat(3);
        Rat sT = typeShear(B.type);
        Rat sc = sT + Rat(x) * typeBase(d + 1);
        Rat lo = max(Rat(0), sT - sc);
        Rat hi = min(L - L3, sT + L - L3 - sc);
        if (hi < lo) return std::nullopt;
        std::vector<std::pair<Rat, Rat>> iv;
        for (size_t k = 0; k < B.children.size(); ++k) {
            const OnlineBox& C = boxes_[static_cast<size_t>(B.children[k])];
            Rat cp = B.childOffset[k];
            Rat sp = typeShear(C.type);
            Rat A = min(cp - L3, cp + sp - sc - L3);
            Rat Bv = max(cp + L3, cp + sp - sc + L3);
            iv.push_back({A, Bv});
        }
        std::sort(iv.begin(), iv.end(), [](auto& a, auto& b) { return a.first < b.first; });
        Rat t = lo;
        for (auto& [a, bb] : iv) {
            if (!(a < t)) break;
            if (t < bb) t = bb;
        }
        if (hi < t) return std::nullopt;
        return t;
    }

    long addChild(long parent, int8_t x, const Rat& offset) {
        OnlineBox& P = boxes_[static_cast<size_t>(parent)];
        OnlineBox c;
        c.wclass = P.wclass;
        c.hclass = P.hclass;
        c.type = P.type;
        c.type.push_back(x);
        Rat sx = *unit_ * Rat::pow2(P.wclass - 1);
        c.ax = P.ax + offset * sx;
        c.ay = P.ay;
        c.parent = parent;
        long id = static_cast<long>(boxes_.size());
        size_t before = P.children.size();
        P.children.push_back(id);
        P.childOffset.push_back(offset);
        std::string k = typeKey(P.wclass, P.hclass, P.type);
        if (before == 0) ++nearEmpty_[k];
        if (before == 1 && --nearEmpty_[k] == 0) nearEmpty_.erase(k);
        boxes_.push_back(std::move(c));

        ++stats_.containmentChecks;
        HorizontalParallelogram me = boxGeometry(id);
        if (!inside(me.toPiece(), boxGeometry(parent))) ++stats_.containmentViolations;
        const OnlineBox& PP = boxes_[static_cast<size_t>(parent)];
        for (long s : PP.children)
            if (s != id &&
                interiorOverlap(me.toPiece(), Rat(0), Rat(0), boxGeometry(s).toPiece(), Rat(0), Rat(0)))
                ++stats_.containmentViolations;
        return id;
    }

    void refreshRegistry(long b) {
        const OnlineBox& B = boxes_[static_cast<size_t>(b)];
        for (int8_t x : {int8_t(-1), int8_t(0), int8_t(1)}) {
            std::string k = regKey(B.wclass, B.hclass, B.type, x);
            bool ok = B.piece < 0 && leftmostChild(b, x).has_value();
            if (ok) {
                registry_[k].insert(b);
            } else {
                auto it = registry_.find(k);
                if (it != registry_.end()) {
                    it->second.erase(b);
                    if (it->second.empty()) registry_.erase(it);
                }
            }
        }
    }

    long newBasicBox(int wc, int h) {
        Rat bh = Rat::pow2(-h);
        Rat w = *unit_ * Rat::pow2(wc);
        RectSlot* slot = nullptr;
        for (auto& r : rects_)
            if (r.wclass == wc && !(Rat(1) < r.used + bh) && (!slot || r.x < slot->x)) slot = &r;
        if (!slot) {
            std::vector<std::pair<Rat, Rat>> iv;
            for (auto& r : rects_) iv.push_back({r.x, r.x + r.w});
            std::sort(iv.begin(), iv.end());
            Rat x(0);
            for (auto& [a, b] : iv) {
                if (!(a < x + w)) break;
                if (x < b) x = b;
            }
            rects_.push_back({wc, x, w, Rat(0)});
            slot = &rects_.back();
        }
        OnlineBox box;
        box.wclass = wc;
        box.hclass = h;
        box.ax = slot->x;
        box.ay = slot->used;
        slot->used += bh;
        boxes_.push_back(std::move(box));
        return static_cast<long>(boxes_.size()) - 1;
    }
};

inline std::unique_ptr<StripPacker> makePacker(const std::string& name, uint64_t seed = 1) {
    if (name == "greedy") return std::make_unique<NaiveGreedy>();
    if (name == "onlinepacker") return std::make_unique<OnlinePacker>();
    if (name == "randomfit") return std::make_unique<RandomFit>(seed);
    throw InputError("unknown packer '" + name + "'");
}

// Alternating-slope stream: height 1, base 1/n, shear +-(1 - 1/n).
inline std::vector<ConvexPiece> alternatingSlopes(size_t n) {
    std::vector<ConvexPiece> out;
    Rat b(1, static_cast<int64_t>(n));
    for (size_t i = 0; i < n; ++i) {
        Rat s = (Rat(1) - b) * Rat(i % 2 == 0 ? 1 : -1);
        out.push_back(HorizontalParallelogram{{Rat(0), Rat(0)}, b, s, Rat(1)}.toPiece());
    }
    return out;
}

}  // namespace fanpack
