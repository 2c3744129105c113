#pragma once
// Exact 2-D kernel for convex pieces.

#include "fanpack/errors.hpp"
#include "fanpack/rat.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fanpack {

struct Point {
    Rat x, y;

    friend Point operator+(const Point& a, const Point& b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(const Point& a, const Point& b) { return {a.x - b.x, a.y - b.y}; }
    friend bool operator==(const Point& a, const Point& b) = default;
    friend bool operator<(const Point& a, const Point& b) {
        int c = cmp(a.x, b.x);
        return c != 0 ? c < 0 : a.y < b.y;
    }
};

// Twice the signed area of triangle (o, a, b); positive for a left turn.
inline Rat cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}
inline int orient(const Point& o, const Point& a, const Point& b) { return cross(o, a, b).sign(); }

// Convex hull, counter-clockwise, collinear points dropped.
inline std::vector<Point> convexHull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point> h(2 * pts.size());
    size_t k = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && orient(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && orient(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
        h[k++] = pts[i - 1];
    }
    h.resize(k - 1);
    return h;
}

struct Measure {
    Rat width, height, area;
};

class ConvexPiece {
public:
    ConvexPiece() = default;

    // Accepts either orientation; drops repeated and collinear vertices.
    // Throws InputError for fewer than three corners, zero area or a
    // non-convex vertex sequence.
    explicit ConvexPiece(std::vector<Point> pts) {
        std::vector<Point> v;
        for (auto& p : pts)
            if (v.empty() || !(v.back() == p)) v.push_back(p);
        while (v.size() > 1 && v.front() == v.back()) v.pop_back();
        if (v.size() < 3) throw InputError("piece needs at least three distinct vertices");
        Rat a2;
        for (size_t i = 0; i < v.size(); ++i) {
            const Point& p = v[i];
            const Point& q = v[(i + 1) % v.size()];
            a2 += p.x * q.y - q.x * p.y;
        }
        if (a2.isZero()) throw InputError("piece has zero area");
        if (a2.sign() < 0) std::reverse(v.begin(), v.end());
        bool changed = true;
        while (changed && v.size() >= 3) {
            changed = false;
            for (size_t i = 0; i < v.size(); ++i) {
                size_t n = v.size();
                if (orient(v[(i + n - 1) % n], v[i], v[(i + 1) % n]) == 0) {
                    v.erase(v.begin() + static_cast<long>(i));
                    changed = true;
                    break;
                }
            }
        }
        if (v.size() < 3) throw InputError("piece has zero area");
        for (size_t i = 0; i < v.size(); ++i) {
            size_t n = v.size();
            if (orient(v[(i + n - 1) % n], v[i], v[(i + 1) % n]) < 0)
                throw InputError("piece is not convex");
        }
        if (convexHull(v).size() != v.size()) throw InputError("piece is not a simple convex polygon");
        v_ = std::move(v);
        finish();
    }

    static ConvexPiece hullOf(const std::vector<Point>& pts) { return ConvexPiece(convexHull(pts)); }

    // Axis-aligned rectangle [x0,x1] x [y0,y1].
    static ConvexPiece rect(const Rat& x0, const Rat& y0, const Rat& x1, const Rat& y1) {
        return ConvexPiece({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
    }

    const std::vector<Point>& vertices() const { return v_; }
    size_t size() const { return v_.size(); }
    const Point& operator[](size_t i) const { return v_[i]; }

    const Rat& xmin() const { return xmin_; }
    const Rat& xmax() const { return xmax_; }
    const Rat& ymin() const { return ymin_; }
    const Rat& ymax() const { return ymax_; }
    Rat width() const { return xmax_ - xmin_; }
    Rat height() const { return ymax_ - ymin_; }
    const Rat& area() const { return area_; }

    ConvexPiece translated(const Rat& dx, const Rat& dy) const {
        ConvexPiece r = *this;
        for (auto& p : r.v_) p = {p.x + dx, p.y + dy};
        r.xmin_ += dx;
        r.xmax_ += dx;
        r.ymin_ += dy;
        r.ymax_ += dy;
        return r;
    }
    ConvexPiece scaled(const Rat& sx, const Rat& sy) const {
        std::vector<Point> w;
        for (auto& p : v_) w.push_back({p.x * sx, p.y * sy});
        return ConvexPiece(std::move(w));
    }

    // Leftmost / rightmost x of the horizontal slice at height y (ymin <= y <= ymax).
    std::pair<Rat, Rat> slice(const Rat& y) const {
        std::optional<Rat> lo, hi;
        size_t n = v_.size();
        for (size_t i = 0; i < n; ++i) {
            const Point& p = v_[i];
            const Point& q = v_[(i + 1) % n];
            int a = cmp(p.y, y), b = cmp(q.y, y);
            if (a > 0 && b > 0) continue;
            if (a < 0 && b < 0) continue;
            Rat x;
            if (a == 0) {
                x = p.x;
            } else if (b == 0) {
                x = q.x;
            } else {
                x = p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y);
            }
            if (!lo || x < *lo) lo = x;
            if (!hi || *hi < x) hi = x;
        }
        if (!lo) throw InvariantViolation("slice outside piece y-range");
        return {*lo, *hi};
    }

    std::string key() const {
        std::string s;
        for (auto& p : v_) s += p.x.str() + "," + p.y.str() + ";";
        return s;
    }

private:
    std::vector<Point> v_;
    Rat xmin_, xmax_, ymin_, ymax_, area_;

    void finish() {
        xmin_ = xmax_ = v_[0].x;
        ymin_ = ymax_ = v_[0].y;
        Rat a2;
        for (size_t i = 0; i < v_.size(); ++i) {
            const Point& p = v_[i];
            const Point& q = v_[(i + 1) % v_.size()];
            if (p.x < xmin_) xmin_ = p.x;
            if (xmax_ < p.x) xmax_ = p.x;
            if (p.y < ymin_) ymin_ = p.y;
            if (ymax_ < p.y) ymax_ = p.y;
            a2 += p.x * q.y - q.x * p.y;
        }
        area_ = a2 / Rat(2);
    }
};

inline Measure measure(const ConvexPiece& p) { return {p.width(), p.height(), p.area()}; }

struct Spine {
    Point bottom, top;
    // Horizontal displacement per unit height, dx/dy.
    Rat slope() const { return (top.x - bottom.x) / (top.y - bottom.y); }
    Rat dx() const { return top.x - bottom.x; }
};

// Bottommost and topmost vertices, ties broken towards smallest x.
inline Spine spine(const ConvexPiece& p) {
    const auto& v = p.vertices();
    Point b = v[0], t = v[0];
    for (auto& q : v) {
        int cb = cmp(q.y, b.y);
        if (cb < 0 || (cb == 0 && q.x < b.x)) b = q;
        int ct = cmp(q.y, t.y);
        if (ct > 0 || (ct == 0 && q.x < t.x)) t = q;
    }
    return {b, t};
}

struct HorizontalParallelogram {
    Point anchor;  // bottom-left corner
    Rat base, shear, height;

    std::vector<Point> corners() const {
        const Rat& ax = anchor.x;
        const Rat& ay = anchor.y;
        return {{ax, ay}, {ax + base, ay}, {ax + base + shear, ay + height}, {ax + shear, ay + height}};
    }
    ConvexPiece toPiece() const { return ConvexPiece(corners()); }
    Rat width() const { return base + abs(shear); }
    Rat area() const { return base * height; }
    Rat xmin() const { return anchor.x + min(Rat(0), shear); }
    Rat xmax() const { return anchor.x + base + max(Rat(0), shear); }
    HorizontalParallelogram translated(const Rat& dx, const Rat& dy) const {
        return {{anchor.x + dx, anchor.y + dy}, base, shear, height};
    }
    // Same side directions, stretched upward to the given height.
    HorizontalParallelogram extendedTo(const Rat& h) const {
        return {anchor, base, shear * h / height, h};
    }
};

// Smallest parallelogram with horizontal top and bottom whose other sides are
// parallel to the spine and tangent to the piece.
inline HorizontalParallelogram boundingParallelogram(const ConvexPiece& p) {
    Spine s = spine(p);
    Rat slope = s.slope();
    const Point& cb = s.bottom;
    std::optional<Rat> umin, umax;
    for (auto& v : p.vertices()) {
        Rat u = v.x - (cb.x + (v.y - cb.y) * slope);
        if (!umin || u < *umin) umin = u;
        if (!umax || *umax < u) umax = u;
    }
    Rat h = p.height();
    return {{cb.x + *umin, cb.y}, *umax - *umin, s.dx(), h};
}

struct Placement {
    ConvexPiece piece;
    Rat dx, dy;

    ConvexPiece placed() const { return piece.translated(dx, dy); }
};

namespace detail {
// True if every vertex of b (shifted by rel) lies on or right of some edge of a.
inline bool separatedByEdgeOf(const ConvexPiece& a, const ConvexPiece& b, const Rat& relx, const Rat& rely) {
    const auto& av = a.vertices();
    size_t n = av.size();
    for (size_t i = 0; i < n; ++i) {
        const Point& p = av[i];
        const Point& q = av[(i + 1) % n];
        Rat ex = q.x - p.x, ey = q.y - p.y;
        bool allOut = true;
        for (auto& w : b.vertices()) {
            Rat c = ex * (w.y + rely - p.y) - ey * (w.x + relx - p.x);
            if (c.sign() > 0) {
                allOut = false;
                break;
            }
        }
        if (allOut) return true;
    }
    return false;
}
}  // namespace detail

// Whether two translated pieces share an interior point.
inline bool interiorOverlap(const ConvexPiece& a, const Rat& ax, const Rat& ay, const ConvexPiece& b, const Rat& bx,
                            const Rat& by) {
    if (a.xmax() + ax <= b.xmin() + bx || b.xmax() + bx <= a.xmin() + ax) return false;
    if (a.ymax() + ay <= b.ymin() + by || b.ymax() + by <= a.ymin() + ay) return false;
    Rat rx = bx - ax, ry = by - ay;
    if (detail::separatedByEdgeOf(a, b, rx, ry)) return false;
    if (detail::separatedByEdgeOf(b, a, -rx, -ry)) return false;
    return true;
}
inline bool interiorOverlap(const Placement& a, const Placement& b) {
    return interiorOverlap(a.piece, a.dx, a.dy, b.piece, b.dx, b.dy);
}

// Offsets tx for which piece p, raised by ty, overlaps q (placed at qx, qy) in
// the interior form the open interval returned here; nullopt when no tx does.
inline std::optional<std::pair<Rat, Rat>> blockedInterval(const ConvexPiece& p, const Rat& ty, const ConvexPiece& q,
                                                          const Rat& qx, const Rat& qy) {
    Rat lo = max(p.ymin() + ty, q.ymin() + qy);
    Rat hi = min(p.ymax() + ty, q.ymax() + qy);
    if (!(lo < hi)) return std::nullopt;
    std::vector<Rat> ys{lo, hi};
    for (auto& v : p.vertices()) {
        Rat y = v.y + ty;
        if (lo < y && y < hi) ys.push_back(y);
    }
    for (auto& v : q.vertices()) {
        Rat y = v.y + qy;
        if (lo < y && y < hi) ys.push_back(y);
    }
    std::optional<Rat> a, b;
    for (auto& y : ys) {
        auto [pl, pr] = p.slice(y - ty);
        auto [ql, qr] = q.slice(y - qy);
        Rat l = ql + qx - pr;
        Rat r = qr + qx - pl;
        if (!a || l < *a) a = l;
        if (!b || *b < r) b = r;
    }
    return std::make_pair(*a, *b);
}

// Translations t with (p + t) overlapping q's interior: the interior of q (-) p.
inline ConvexPiece noFitPolygon(const ConvexPiece& q, const Rat& qx, const Rat& qy, const ConvexPiece& p) {
    // Minkowski sum of q and -p by merging edges in angular order
    auto fromLowest = [](std::vector<Point> v) {
        auto lowest = std::min_element(v.begin(), v.end(), [](const Point& a, const Point& b) {
            return a.y < b.y || (a.y == b.y && a.x < b.x);
        });
        std::rotate(v.begin(), lowest, v.end());
        v.push_back(v[0]);
        v.push_back(v[1]);
        return v;
    };
    std::vector<Point> a, b;
    for (auto& v : q.vertices()) a.push_back({v.x + qx, v.y + qy});
    for (auto& v : p.vertices()) b.push_back({-v.x, -v.y});
    a = fromLowest(std::move(a));
    b = fromLowest(std::move(b));
    std::vector<Point> out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() - 2 || j < b.size() - 2) {
        out.push_back({a[i].x + b[j].x, a[i].y + b[j].y});
        Rat ex = a[i + 1].x - a[i].x, ey = a[i + 1].y - a[i].y;
        Rat fx = b[j + 1].x - b[j].x, fy = b[j + 1].y - b[j].y;
        int c = (ex * fy - ey * fx).sign();
        if (c >= 0 && i < a.size() - 2) ++i;
        if (c <= 0 && j < b.size() - 2) ++j;
    }
    return ConvexPiece(std::move(out));
}

// Strictly inside a counter-clockwise convex polygon.
inline bool strictlyInside(const ConvexPiece& poly, const Point& pt) {
    if (!(poly.xmin() < pt.x && pt.x < poly.xmax() && poly.ymin() < pt.y && pt.y < poly.ymax())) return false;
    const auto& v = poly.vertices();
    for (size_t i = 0; i < v.size(); ++i)
        if (orient(v[i], v[(i + 1) % v.size()], pt) <= 0) return false;
    return true;
}

// Intersection point of segments ab and cd, if they cross at a single point.
inline std::optional<Point> segmentIntersection(const Point& a, const Point& b, const Point& c, const Point& d) {
    Rat d1x = b.x - a.x, d1y = b.y - a.y, d2x = d.x - c.x, d2y = d.y - c.y;
    Rat den = d1x * d2y - d1y * d2x;
    if (den.isZero()) return std::nullopt;
    Rat t = ((c.x - a.x) * d2y - (c.y - a.y) * d2x) / den;
    Rat u = ((c.x - a.x) * d1y - (c.y - a.y) * d1x) / den;
    if (t.sign() < 0 || Rat(1) < t || u.sign() < 0 || Rat(1) < u) return std::nullopt;
    return Point{a.x + t * d1x, a.y + t * d1y};
}

// Axis-aligned container used by validators.
struct Box2 {
    Rat x0, y0, x1, y1;
    bool unboundedRight = false;
};

struct ValidityReport {
    bool ok = true;
    std::string message;
    long first = -1, second = -1;
};

// Exact check that placements are pairwise interior-disjoint and inside the
// container.
inline ValidityReport validatePlacements(const std::vector<Placement>& ps, const std::optional<Box2>& container) {
    ValidityReport rep;
    struct Item {
        Rat x0, x1, y0, y1;
        size_t idx;
    };
    std::vector<Item> items;
    items.reserve(ps.size());
    for (size_t i = 0; i < ps.size(); ++i) {
        const auto& p = ps[i];
        Item it{p.piece.xmin() + p.dx, p.piece.xmax() + p.dx, p.piece.ymin() + p.dy, p.piece.ymax() + p.dy, i};
        if (container) {
            const Box2& c = *container;
            bool in = !(it.x0 < c.x0) && !(it.y0 < c.y0) && !(c.y1 < it.y1) && (c.unboundedRight || !(c.x1 < it.x1));
            if (!in) {
                rep.ok = false;
                rep.first = static_cast<long>(i);
                rep.message = "piece " + std::to_string(i) + " leaves the container";
                return rep;
            }
        }
        items.push_back(std::move(it));
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        int c = cmp(a.x0, b.x0);
        return c != 0 ? c < 0 : a.idx < b.idx;
    });
    std::vector<size_t> active;
    for (size_t k = 0; k < items.size(); ++k) {
        const Item& it = items[k];
        std::vector<size_t> keep;
        for (size_t j : active) {
            const Item& o = items[j];
            if (!(it.x0 < o.x1)) continue;
            keep.push_back(j);
            if (!(it.y0 < o.y1 && o.y0 < it.y1)) continue;
            if (interiorOverlap(ps[it.idx], ps[o.idx])) {
                rep.ok = false;
                rep.first = static_cast<long>(std::min(it.idx, o.idx));
                rep.second = static_cast<long>(std::max(it.idx, o.idx));
                rep.message = "pieces " + std::to_string(rep.first) + " and " + std::to_string(rep.second) + " overlap";
                return rep;
            }
        }
        keep.push_back(k);
        active.swap(keep);
    }
    return rep;
}

}  // namespace fanpack
