#pragma once
// Online sorting: the array, its cost, and two online sorters.

#include "fanpack/errors.hpp"
#include "fanpack/rat.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fanpack {

class SortArray {
public:
    SortArray() = default;
    SortArray(size_t declaredN, size_t capacity) : n_(declaredN), cells_(capacity), filled_(capacity, 0) {}

    // capacity = floor(gamma * n)
    static SortArray withGamma(size_t n, const Rat& gamma) {
        return SortArray(n, static_cast<size_t>((gamma * Rat(static_cast<int64_t>(n))).floorInt()));
    }

    size_t capacity() const { return cells_.size(); }
    size_t declaredN() const { return n_; }
    size_t count() const { return count_; }
    bool full() const { return count_ == cells_.size(); }
    bool filled(size_t i) const { return filled_[i] != 0; }
    const Rat& at(size_t i) const { return cells_[i]; }
    Rat gamma() const { return Rat(static_cast<int64_t>(capacity()), static_cast<int64_t>(n_ ? n_ : 1)); }

    void place(size_t cell, const Rat& v) {
        if (cell >= cells_.size()) throw InvariantViolation("cell " + std::to_string(cell) + " beyond capacity");
        if (filled_[cell]) throw InvariantViolation("cell " + std::to_string(cell) + " already filled");
        if (v.sign() < 0 || Rat(1) < v) throw InputError("value outside [0,1]: " + v.str());
        if (n_ && count_ >= n_) throw CapacityError("more than n values placed");
        cells_[cell] = v;
        filled_[cell] = 1;
        ++count_;
        log_.push_back(cell);
    }
    void grow(size_t newCapacity) {
        if (newCapacity <= cells_.size()) return;
        cells_.resize(newCapacity);
        filled_.resize(newCapacity, 0);
    }

    const std::vector<size_t>& placementLog() const { return log_; }
    std::optional<size_t> lastPlaced() const {
        if (log_.empty()) return std::nullopt;
        return log_.back();
    }

    std::vector<Rat> filledValues() const {
        std::vector<Rat> out;
        out.reserve(count_);
        for (size_t i = 0; i < cells_.size(); ++i)
            if (filled_[i]) out.push_back(cells_[i]);
        return out;
    }

private:
    size_t n_ = 0;
    std::vector<Rat> cells_;
    std::vector<char> filled_;
    size_t count_ = 0;
    std::vector<size_t> log_;
};

// Sum of gaps between consecutive values with sentinels 0 and 1.
inline Rat costOfSequence(const std::vector<Rat>& r) {
    if (r.empty()) throw InputError("cost is undefined for an empty sequence");
    // Fast path: a common denominator that fits in 63 bits.
    bool fast = true;
    int64_t l = 1;
    for (const Rat& v : r) {
        if (!v.isSmall()) {
            fast = false;
            break;
        }
        int64_t d = v.smallDen();
        int64_t g = std::gcd(l, d);
        __int128 nl = static_cast<__int128>(l / g) * d;
        if (nl > (static_cast<__int128>(1) << 62)) {
            fast = false;
            break;
        }
        l = static_cast<int64_t>(nl);
    }
    if (fast) {
        __int128 sum = 0, prev = 0;
        for (const Rat& v : r) {
            __int128 cur = static_cast<__int128>(v.smallNum()) * (l / v.smallDen());
            sum += cur > prev ? cur - prev : prev - cur;
            prev = cur;
        }
        __int128 last = l;
        sum += last > prev ? last - prev : prev - last;
        if (sum < (static_cast<__int128>(1) << 62)) return Rat(static_cast<int64_t>(sum), l);
        mpz_class hi(static_cast<unsigned long>(static_cast<uint64_t>(sum >> 64)));
        mpz_class lo(static_cast<unsigned long>(static_cast<uint64_t>(sum)));
        return Rat::fromParts((hi << 64) + lo, mpz_class(static_cast<long>(l)));
    }
    Rat sum, prev;
    for (const Rat& v : r) {
        sum += abs(v - prev);
        prev = v;
    }
    sum += abs(Rat(1) - prev);
    return sum;
}

inline Rat totalCost(const SortArray& a) {
    if (a.count() == 0) throw InputError("cost is undefined before any placement");
    return costOfSequence(a.filledValues());
}

// Integer floor of the j-th root of v.
inline mpz_class floorRoot(const mpz_class& v, unsigned long j) {
    mpz_class r;
    mpz_root(r.get_mpz_t(), v.get_mpz_t(), j);
    return r;
}

class Sorter {
public:
    virtual ~Sorter() = default;
    virtual size_t place(const Rat& x) = 0;
    virtual const SortArray& array() const = 0;
    virtual std::string name() const = 0;
};

// Balanced sorter over a window of physical cells. Values are taken from
// [lo, lo + span) and binned into floor(sqrt(L)) intervals; each interval
// fills its own subarray, and when an interval has neither an open subarray
// nor an empty one left, the sorter continues on the array of remaining
// empty cells.
class BalancedCore {
public:
    BalancedCore() = default;
    BalancedCore(size_t firstCell, size_t length, Rat lo = Rat(0), Rat span = Rat(1))
        : lo_(std::move(lo)), span_(std::move(span)), unit_(lo_.isZero() && span_ == Rat(1)) {
        std::vector<size_t> cells(length);
        for (size_t i = 0; i < length; ++i) cells[i] = firstCell + i;
        pushLevel(std::move(cells));
    }

    // Physical cell for x; the caller writes it. Throws CapacityError when full.
    size_t choose(const Rat& x) {
        for (;;) {
            Level& L = levels_.back();
            if (L.placed == L.cells.size()) throw CapacityError("balanced sorter: array full");
            size_t iv = intervalOf(x, L.n1);
            long s = L.openSub[iv];
            if (s >= 0) return take(L, static_cast<size_t>(s), iv);
            if (L.nextEmpty < L.subStart.size()) {
                size_t sub = L.nextEmpty++;
                L.tag[sub] = static_cast<long>(iv);
                L.openSub[iv] = static_cast<long>(sub);
                return take(L, sub, iv);
            }
            std::vector<size_t> rest;
            rest.reserve(L.cells.size() - L.placed);
            for (size_t j = 0; j < L.subStart.size(); ++j) {
                size_t b = L.subStart[j], e = j + 1 < L.subStart.size() ? L.subStart[j + 1] : L.cells.size();
                for (size_t c = b + L.fill[j]; c < e; ++c) rest.push_back(L.cells[c]);
            }
            if (rest.empty()) throw CapacityError("balanced sorter: array full");
            pushLevel(std::move(rest));
        }
    }

    size_t depth() const { return levels_.size(); }
    size_t topIntervals() const { return levels_.empty() ? 0 : levels_.front().n1; }
    size_t topSubarrays() const { return levels_.empty() ? 0 : levels_.front().subStart.size(); }

private:
    struct Level {
        std::vector<size_t> cells;     // logical -> physical
        size_t n1 = 1;
        std::vector<size_t> subStart;  // non-empty subarrays only
        std::vector<size_t> fill;
        std::vector<long> tag;
        std::vector<long> openSub;     // per interval
        size_t nextEmpty = 0;
        size_t placed = 0;
    };
    std::vector<Level> levels_;
    Rat lo_ = Rat(0), span_ = Rat(1);
    bool unit_ = true;

    void pushLevel(std::vector<size_t> cells) {
        Level L;
        size_t len = cells.size();
        L.cells = std::move(cells);
        size_t n1 = static_cast<size_t>(floorRoot(mpz_class(static_cast<unsigned long>(len)), 2).get_ui());
        if (n1 == 0) n1 = 1;
        L.n1 = n1;
        size_t n2 = 2 * n1;
        size_t q = len / n2, r = len % n2, at = 0;
        for (size_t j = 0; j < n2; ++j) {
            size_t sz = q + (j < r ? 1 : 0);
            if (sz == 0) continue;
            L.subStart.push_back(at);
            at += sz;
        }
        L.fill.assign(L.subStart.size(), 0);
        L.tag.assign(L.subStart.size(), -1);
        L.openSub.assign(n1, -1);
        levels_.push_back(std::move(L));
    }

    size_t intervalOf(const Rat& x, size_t n1) const {
        if (unit_ && x.isSmall() && x.smallNum() >= 0) {
            __int128 q = static_cast<__int128>(x.smallNum()) * static_cast<__int128>(n1) / x.smallDen();
            return q >= static_cast<__int128>(n1) ? n1 - 1 : static_cast<size_t>(q);
        }
        Rat t = (x - lo_) * Rat(static_cast<int64_t>(n1)) / span_;
        int64_t i = t.floorInt();
        if (i < 0) i = 0;
        if (i >= static_cast<int64_t>(n1)) i = static_cast<int64_t>(n1) - 1;
        return static_cast<size_t>(i);
    }

    size_t subSize(const Level& L, size_t j) const {
        size_t e = j + 1 < L.subStart.size() ? L.subStart[j + 1] : L.cells.size();
        return e - L.subStart[j];
    }

    size_t take(Level& L, size_t sub, size_t iv) {
        size_t cell = L.cells[L.subStart[sub] + L.fill[sub]];
        ++L.fill[sub];
        ++L.placed;
        if (L.fill[sub] == subSize(L, sub)) L.openSub[iv] = -1;
        return cell;
    }
};

class BalancedSorter : public Sorter {
public:
    BalancedSorter(size_t n, size_t capacity) : arr_(n, capacity), core_(0, capacity) {}
    explicit BalancedSorter(size_t n) : BalancedSorter(n, n) {}

    size_t place(const Rat& x) override {
        if (arr_.full()) throw CapacityError("balanced sorter: array full");
        size_t c = core_.choose(x);
        arr_.place(c, x);
        return c;
    }
    const SortArray& array() const override { return arr_; }
    std::string name() const override { return "balanced"; }
    const BalancedCore& core() const { return core_; }

private:
    SortArray arr_;
    BalancedCore core_;
};

struct SorterParams {
    int k = 1;
    Rat delta = Rat(1, 4);
};

struct BoxShape {
    size_t b = 1;       // number of quantile intervals
    size_t boxCap = 1;  // reals per box
    size_t width = 1;   // cells per box
};

// Box layout for level k on n reals.
inline BoxShape boxShape(size_t n, int k, const Rat& delta) {
    BoxShape s;
    mpz_class N(static_cast<unsigned long>(n));
    s.b = floorRoot(N, static_cast<unsigned long>(k + 1)).get_ui();
    if (s.b == 0) s.b = 1;
    // floor(delta * n^(k/(k+1))) = floor((p^(k+1) n^k / q^(k+1))^(1/(k+1)))
    mpz_class p = delta.numerator(), q = delta.denominator();
    mpz_class pk, qk, nk;
    mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k + 1));
    mpz_pow_ui(qk.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(k + 1));
    mpz_pow_ui(nk.get_mpz_t(), N.get_mpz_t(), static_cast<unsigned long>(k));
    mpz_class inner = (pk * nk) / qk;
    mpz_class np = floorRoot(inner, static_cast<unsigned long>(k + 1));
    s.boxCap = np.get_ui();
    if (s.boxCap == 0) s.boxCap = 1;
    Rat w = (Rat(1) + Rat(2 * (k - 1)) * delta) * Rat(static_cast<int64_t>(s.boxCap));
    s.width = static_cast<size_t>(w.ceilInt());
    return s;
}

// Cells the box layout can touch in the worst case, or nullopt when a nested
// box can outgrow its window. Level 1 stays inside whatever window it gets.
inline std::optional<size_t> boxFootprint(size_t n, int k, const Rat& delta) {
    if (k <= 1 || n == 0) return n;
    BoxShape s = boxShape(n, k, delta);
    size_t child = s.width;
    if (k > 2) {
        auto f = boxFootprint(s.boxCap, k - 1, delta);
        if (!f || *f > s.width) return std::nullopt;
        child = *f;
    }
    // every quantile keeps one open box; the rest are full
    size_t last = s.b - 1 + (n - 1) / s.boxCap;
    return last * s.width + child;
}

// Cells used by the box sorter: floor((1 + 2 k delta) n).
inline size_t boxSorterCapacity(size_t n, const SorterParams& p) {
    return static_cast<size_t>(((Rat(1) + Rat(2 * p.k) * p.delta) * Rat(static_cast<int64_t>(n))).floorInt());
}

inline bool boxLayoutFits(size_t n, const SorterParams& p, size_t capacity) {
    auto f = boxFootprint(n, p.k, p.delta);
    return f && *f <= capacity;
}

inline SorterParams chooseParams(size_t n, const Rat& epsilon) {
    if (n < 4) throw InputError("chooseParams needs n >= 4");
    if (epsilon.sign() <= 0) throw InputError("chooseParams needs epsilon > 0");
    double lg = std::log2(static_cast<double>(n));
    double llg = std::log2(lg);
    int k = 1;
    if (llg > 0) k = static_cast<int>(std::lround(std::sqrt(lg / llg)));
    if (k < 1) k = 1;
    SorterParams p;
    for (;; --k) {
        p.k = k;
        p.delta = epsilon / Rat(2 * k);
        Rat cap = k >= 2 ? Rat(1, 2 * k) : Rat(1, 4);
        if (cap < p.delta) p.delta = cap;
        // rounding to whole cells eats the slack when n is small
        if (k == 1 || boxLayoutFits(n, p, boxSorterCapacity(n, p))) return p;
    }
}

// Recursive box sorter on a window [first, first + len) of the shared array.
class BoxCore {
public:
    BoxCore(int k, Rat delta, size_t n, Rat lo, Rat span, size_t first, size_t len)
        : k_(k), delta_(std::move(delta)), n_(n), lo_(std::move(lo)), span_(std::move(span)), first_(first), len_(len) {
        if (k_ <= 1) {
            base_ = std::make_unique<BalancedCore>(first_, len_, lo_, span_);
            return;
        }
        shape_ = boxShape(n_, k_, delta_);
        ptr_.resize(shape_.b);
        for (size_t i = 0; i < shape_.b; ++i) ptr_[i] = i;
        maxPtr_ = shape_.b - 1;
    }

    size_t choose(const Rat& x) {
        if (base_) return base_->choose(x);
        size_t b = shape_.b;
        Rat t = (x - lo_) * Rat(static_cast<int64_t>(b)) / span_;
        int64_t qi = t.floorInt();
        if (qi < 0) qi = 0;
        if (qi >= static_cast<int64_t>(b)) qi = static_cast<int64_t>(b) - 1;
        size_t box = ptr_[static_cast<size_t>(qi)];
        auto& child = childFor(box, static_cast<size_t>(qi));
        if (child.count == shape_.boxCap) {
            ptr_[static_cast<size_t>(qi)] = ++maxPtr_;
            box = maxPtr_;
        }
        auto& c = childFor(box, static_cast<size_t>(qi));
        size_t cell = c.core->choose(x);
        ++c.count;
        return cell;
    }

    const BoxShape& shape() const { return shape_; }
    size_t boxesOpened() const { return children_.size(); }
    int level() const { return k_; }

private:
    struct Child {
        std::unique_ptr<BoxCore> core;
        size_t count = 0;
    };
    int k_;
    Rat delta_;
    size_t n_;
    Rat lo_, span_;
    size_t first_, len_;
    std::unique_ptr<BalancedCore> base_;
    BoxShape shape_;
    std::vector<size_t> ptr_;
    size_t maxPtr_ = 0;
    std::vector<Child> children_;  // indexed by box number

    Child& childFor(size_t box, size_t quantile) {
        if (box >= children_.size()) children_.resize(box + 1);
        Child& c = children_[box];
        if (!c.core) {
            Rat sub = span_ / Rat(static_cast<int64_t>(shape_.b));
            Rat lo = lo_ + sub * Rat(static_cast<int64_t>(quantile));
            c.core = std::make_unique<BoxCore>(k_ - 1, delta_, shape_.boxCap, lo, sub, first_ + box * shape_.width,
                                               shape_.width);
        }
        return c;
    }
};

class BoxSorter : public Sorter {
public:
    BoxSorter(size_t n, const SorterParams& p) : BoxSorter(n, p, boxSorterCapacity(n, p)) {}
    BoxSorter(size_t n, const SorterParams& p, size_t capacity)
        : params_(p), arr_(n, capacity), core_(p.k, p.delta, n, Rat(0), Rat(1), 0, capacity) {
        if (!boxLayoutFits(n, p, capacity))
            throw InputError("box sorter: k=" + std::to_string(p.k) + " delta=" + p.delta.str() +
                             " does not fit n=" + std::to_string(n) + " in " + std::to_string(capacity) + " cells");
    }

    size_t place(const Rat& x) override {
        if (arr_.count() >= arr_.declaredN()) throw CapacityError("box sorter: n values already placed");
        size_t c = core_.choose(x);
        if (c >= arr_.capacity())
            throw InvariantViolation("box sorter wrote cell " + std::to_string(c) + " beyond capacity " +
                                     std::to_string(arr_.capacity()));
        arr_.place(c, x);
        return c;
    }
    const SortArray& array() const override { return arr_; }
    std::string name() const override { return "boxsorter"; }
    const SorterParams& params() const { return params_; }

private:
    SorterParams params_;
    SortArray arr_;
    BoxCore core_;
};

}  // namespace fanpack
