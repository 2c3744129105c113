#pragma once
// Adaptive adversaries for the online sorting game.

#include "fanpack/errors.hpp"
#include "fanpack/rat.hpp"
#include "fanpack/sorting.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace fanpack {

class Adversary {
public:
    virtual ~Adversary() = default;
    // Next value given the array after the previous placement.
    virtual Rat next(const SortArray& a) = 0;
    virtual std::string name() const = 0;
};

// Presents values k/N, N = floor(sqrt(2n)). A value is expensive when none of
// its copies sits next to an empty cell; the smallest expensive value is
// presented while one exists, zeros after that.
class UnitAdversary : public Adversary {
public:
    explicit UnitAdversary(size_t n) : n_(n) {
        N_ = static_cast<size_t>(floorRoot(mpz_class(static_cast<unsigned long>(2 * n)), 2).get_ui());
        if (N_ == 0) N_ = 1;
        exposed_.assign(N_ + 1, 0);
    }

    size_t gridSize() const { return N_; }
    bool flooding() const { return flooding_; }
    size_t issued() const { return issued_; }

    Rat next(const SortArray& a) override {
        if (issued_ >= n_) throw ExhaustedError("unit adversary: n values already issued");
        sync(a);
        size_t k = 0;
        if (!flooding_) {
            auto e = smallestExpensive();
            if (e) {
                k = *e;
            } else {
                flooding_ = true;
            }
        }
        ++issued_;
        pending_ = k;
        return Rat(static_cast<int64_t>(k), static_cast<int64_t>(N_));
    }
    std::string name() const override { return "unit"; }

    std::optional<size_t> smallestExpensive() const {
        for (size_t k = 0; k <= N_; ++k)
            if (exposed_[k] == 0) return k;
        return std::nullopt;
    }
    // Exposure counts, recomputed from scratch; used to audit the incremental state.
    std::vector<size_t> recountExposure(const SortArray& a) const {
        std::vector<size_t> e(N_ + 1, 0);
        for (size_t c = 0; c < a.capacity(); ++c)
            if (a.filled(c) && isExposed(a, c)) {
                auto k = gridIndex(a.at(c));
                if (k) ++e[*k];
            }
        return e;
    }
    const std::vector<size_t>& exposure() const { return exposed_; }

private:
    size_t n_, N_ = 1;
    std::vector<size_t> exposed_;
    std::vector<long> kAt_;
    std::vector<char> wasExposed_;
    size_t seen_ = 0;
    size_t cap_ = 0;
    size_t issued_ = 0;
    size_t pending_ = 0;
    bool flooding_ = false;

    std::optional<size_t> gridIndex(const Rat& v) const {
        Rat t = v * Rat(static_cast<int64_t>(N_));
        if (!t.isInteger()) return std::nullopt;
        return static_cast<size_t>(t.floorInt());
    }
    static bool isExposed(const SortArray& a, size_t c) {
        if (!a.filled(c)) return false;
        if (c > 0 && !a.filled(c - 1)) return true;
        if (c + 1 < a.capacity() && !a.filled(c + 1)) return true;
        return false;
    }
    void refresh(const SortArray& a, size_t c) {
        bool now = isExposed(a, c);
        bool was = wasExposed_[c] != 0;
        if (now == was) return;
        long k = kAt_[c];
        if (k >= 0) {
            if (now)
                ++exposed_[static_cast<size_t>(k)];
            else
                --exposed_[static_cast<size_t>(k)];
        }
        wasExposed_[c] = now;
    }
    void sync(const SortArray& a) {
        if (a.capacity() > cap_) {
            kAt_.resize(a.capacity(), -1);
            wasExposed_.resize(a.capacity(), 0);
            size_t old = cap_;
            cap_ = a.capacity();
            if (old > 0) refresh(a, old - 1);
        }
        const auto& log = a.placementLog();
        for (; seen_ < log.size(); ++seen_) {
            size_t c = log[seen_];
            auto k = gridIndex(a.at(c));
            kAt_[c] = k ? static_cast<long>(*k) : -1;
            refresh(a, c);
            if (c > 0) refresh(a, c - 1);
            if (c + 1 < cap_) refresh(a, c + 1);
        }
    }
};

struct CoarsenParams {
    size_t n = 0;
    Rat gamma = Rat(1);
    int64_t s = 2;      // grid coarsening factor
    double C = 3;       // exponent with s = log2(n)^C
    double delta = 1;   // small-home threshold is s^i / delta
    int istar = 1;      // last full phase: max i with s^i <= n
};

// Parameters from n and gamma: s = ceil(log2(n)^3) (the least integer
// log2(n)^C with C >= 3), delta = log n / (16 C gamma log log n).
inline CoarsenParams coarsenDefaults(size_t n, const Rat& gamma) {
    CoarsenParams p;
    p.n = n;
    p.gamma = gamma;
    double L = std::log2(static_cast<double>(n));
    double s3 = L * L * L;
    double r = std::round(s3);
    int64_t s = std::fabs(s3 - r) < 1e-9 ? static_cast<int64_t>(r) : static_cast<int64_t>(std::ceil(s3));
    if (s < 2) s = 2;
    p.s = s;
    p.C = std::log(static_cast<double>(s)) / std::log(L);
    if (!(p.C >= 3)) p.C = 3;
    double LL = std::log2(L);
    p.delta = L / (16.0 * p.C * gamma.toDouble() * LL);
    int64_t pw = 1;
    int i = 0;
    while (pw <= static_cast<int64_t>(n) / s) {
        pw *= s;
        ++i;
    }
    p.istar = i;
    return p;
}

struct HomeReport {
    Rat x;
    std::vector<size_t> home;
    bool expensive = false;
};

// Home of x: empty unmarked cells whose first filled neighbour on either side
// holds a value within threshold of x. Expensive when |home| * delta < s^i.
inline HomeReport computeHome(const Rat& x, const SortArray& a, const Rat& threshold, const Rat& smallBound,
                              const std::vector<char>* marked = nullptr) {
    HomeReport r;
    r.x = x;
    size_t m = a.capacity();
    std::vector<long> left(m, -1), right(m, -1);
    long last = -1;
    for (size_t c = 0; c < m; ++c) {
        left[c] = last;
        if (a.filled(c)) last = static_cast<long>(c);
    }
    last = -1;
    for (size_t c = m; c-- > 0;) {
        right[c] = last;
        if (a.filled(c)) last = static_cast<long>(c);
    }
    for (size_t c = 0; c < m; ++c) {
        if (a.filled(c)) continue;
        if (marked && (*marked)[c]) continue;
        bool in = false;
        for (long q : {left[c], right[c]})
            if (q >= 0 && abs(a.at(static_cast<size_t>(q)) - x) < threshold) in = true;
        if (in) r.home.push_back(c);
    }
    r.expensive = Rat(static_cast<int64_t>(r.home.size())) < smallBound;
    return r;
}

// Coarsening adversary. All issued values lie on the grid j * s / n; the
// internal bookkeeping works with the integer j.
class CoarsenAdversary : public Adversary {
public:
    CoarsenAdversary(const CoarsenParams& p, uint64_t seed = 0) : p_(p), seed_(seed) {
        if (p_.s < 2) throw InputError("coarsening factor s must be at least 2");
        jmax_ = static_cast<int64_t>(p_.n) / p_.s;
    }

    int phase() const { return phase_; }
    size_t markedTotal() const { return markedTotal_; }
    size_t issued() const { return issued_; }
    const CoarsenParams& params() const { return p_; }
    const std::vector<size_t>& desertedSizes() const { return desertedSizes_; }
    bool disjointDeserted() const { return disjoint_; }

    // s^e with saturation.
    int64_t spow(int e) const {
        int64_t r = 1;
        for (int i = 0; i < e; ++i) {
            if (r > INT64_MAX / p_.s) return INT64_MAX;
            r *= p_.s;
        }
        return r;
    }
    Rat valueOf(int64_t j) const { return Rat(j * p_.s, static_cast<int64_t>(p_.n)); }

    Rat next(const SortArray& a) override {
        if (issued_ >= p_.n) throw ExhaustedError("coarsening adversary: n values already issued");
        sync(a);
        int64_t j = 0;
        if (phase_ == 0) {
            j = 0;
            if (seed_ != 0 && jmax_ > 0) {
                std::mt19937_64 rng(seed_);
                j = static_cast<int64_t>(rng() % static_cast<uint64_t>(jmax_ + 1));
            }
            phase_ = 1;
            rebuild(a);
            current_.reset();
        } else if (phase_ > p_.istar + 2) {
            j = 0;
        } else {
            // keep presenting x while its last copy landed in its home
            if (current_ && !lastLandedOutside_) {
                j = *current_;
            } else {
                current_.reset();
                for (;;) {
                    auto e = smallestExpensive();
                    if (e) {
                        current_ = *e;
                        j = *e;
                        break;
                    }
                    endPhase(a);
                    if (phase_ > p_.istar + 2) {
                        j = 0;
                        break;
                    }
                }
            }
        }
        ++issued_;
        lastIssued_ = j;
        return valueOf(j);
    }
    std::string name() const override { return "coarsen"; }

    // Home size of grid value j in the current phase.
    size_t homeSize(int64_t j) const {
        auto it = home_.find(j);
        return it == home_.end() ? 0 : it->second;
    }
    size_t homeSizeSum() const {
        size_t s = 0;
        for (auto& kv : home_) s += kv.second;
        return s;
    }
    size_t emptyCells() const { return emptyCount_; }

private:
    CoarsenParams p_;
    uint64_t seed_;
    int64_t jmax_ = 0;
    int phase_ = 0;
    size_t issued_ = 0;
    std::optional<int64_t> current_;
    int64_t lastIssued_ = 0;
    bool lastLandedOutside_ = true;

    size_t cap_ = 0, seen_ = 0, emptyCount_ = 0;
    std::vector<int64_t> jAt_;
    std::vector<char> filled_;
    std::vector<char> marked_;
    std::vector<long> fenwick_;
    std::set<size_t> filledSet_;
    std::map<int64_t, size_t> home_;
    size_t markedTotal_ = 0;
    std::vector<size_t> desertedSizes_;
    bool disjoint_ = true;

    int64_t step() const { return spow(phase_ - 1); }  // grid spacing of S_phase in j units

    void fenAdd(size_t i, long d) {
        for (++i; i <= fenwick_.size(); i += i & (~i + 1)) fenwick_[i - 1] += d;
    }
    long fenSum(size_t i) const {  // marks in [0, i)
        long s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += fenwick_[i - 1];
        return s;
    }
    size_t unmarkedIn(size_t l, size_t r) const {  // inclusive range of empty cells
        if (l > r) return 0;
        long mk = fenSum(r + 1) - fenSum(l);
        return (r - l + 1) - static_cast<size_t>(mk);
    }

    // Grid value of S_phase within the home threshold of array value jq, if any.
    std::optional<int64_t> matchOf(int64_t jq) const {
        int64_t st = step();
        if (st == INT64_MAX) return jq == 0 ? std::optional<int64_t>(0) : std::nullopt;
        // |jq - k st| * 2 < st
        int64_t k = (2 * jq + st) / (2 * st);
        for (int64_t kk : {k - 1, k, k + 1}) {
            if (kk < 0) continue;
            int64_t x = kk * st;
            if (x > jmax_) continue;
            int64_t d = jq > x ? jq - x : x - jq;
            if (2 * d < st) return x;
        }
        return std::nullopt;
    }

    // Values whose home contains the gap between filled cells L and R.
    void gapMatches(long L, long R, std::optional<int64_t>& m1, std::optional<int64_t>& m2) const {
        m1.reset();
        m2.reset();
        if (L >= 0) m1 = matchOf(jAt_[static_cast<size_t>(L)]);
        if (R >= 0) m2 = matchOf(jAt_[static_cast<size_t>(R)]);
        if (m1 && m2 && *m1 == *m2) m2.reset();
    }
    void addGap(long L, long R, long sign) {
        size_t l = static_cast<size_t>(L + 1);
        size_t r = R >= 0 ? static_cast<size_t>(R - 1) : cap_ - 1;
        if (R >= 0 && R - 1 < L + 1) return;
        if (cap_ == 0 || l > r) return;
        std::optional<int64_t> m1, m2;
        gapMatches(L, R, m1, m2);
        size_t u = unmarkedIn(l, r);
        for (auto& m : {m1, m2})
            if (m) {
                auto& h = home_[*m];
                h = sign > 0 ? h + u : h - u;
            }
    }
    std::pair<long, long> neighbours(size_t c) const {
        long L = -1, R = -1;
        auto it = filledSet_.lower_bound(c);
        if (it != filledSet_.end()) R = static_cast<long>(*it);
        if (it != filledSet_.begin()) L = static_cast<long>(*std::prev(it));
        return {L, R};
    }

    void rebuild(const SortArray& a) {
        (void)a;
        home_.clear();
        long prev = -1;
        for (size_t c : filledSet_) {
            addGap(prev, static_cast<long>(c), +1);
            prev = static_cast<long>(c);
        }
        addGap(prev, -1, +1);
    }

    void sync(const SortArray& a) {
        if (a.capacity() > cap_) {
            // growth only happens in reductions; rebuild from scratch
            size_t old = cap_;
            cap_ = a.capacity();
            jAt_.resize(cap_, 0);
            filled_.resize(cap_, 0);
            marked_.resize(cap_, 0);
            std::vector<long> f(cap_, 0);
            fenwick_.swap(f);
            for (size_t i = 0; i < cap_; ++i)
                if (marked_[i]) fenAdd(i, 1);
            emptyCount_ += cap_ - old;
            if (phase_ >= 1) rebuild(a);
        }
        const auto& log = a.placementLog();
        for (; seen_ < log.size(); ++seen_) {
            size_t c = log[seen_];
            Rat t = a.at(c) * Rat(static_cast<int64_t>(p_.n)) / Rat(p_.s);
            if (!t.isInteger()) throw InvariantViolation("coarsening adversary saw an off-grid value");
            bool wasMarked = marked_[c] != 0;
            auto [L, R] = neighbours(c);
            bool inHome = false;
            if (phase_ >= 1 && current_) {
                std::optional<int64_t> m1, m2;
                gapMatches(L, R, m1, m2);
                inHome = (m1 && *m1 == *current_) || (m2 && *m2 == *current_);
            }
            if (phase_ >= 1) addGap(L, R, -1);
            jAt_[c] = t.floorInt();
            filled_[c] = 1;
            filledSet_.insert(c);
            --emptyCount_;
            if (phase_ >= 1) {
                addGap(L, static_cast<long>(c), +1);
                addGap(static_cast<long>(c), R, +1);
            }
            lastLandedOutside_ = !wasMarked && !inHome;
        }
    }

    std::optional<int64_t> smallestExpensive() const {
        int64_t st = step();
        double bound = static_cast<double>(spow(phase_)) / p_.delta;
        if (st == INT64_MAX) return 0;
        for (int64_t x = 0; x <= jmax_; x += st)
            if (static_cast<double>(homeSize(x)) < bound) return x;
        return std::nullopt;
    }

    void endPhase(const SortArray& a) {
        (void)a;
        int64_t st = step();
        double lowB = static_cast<double>(spow(phase_)) / p_.delta;
        double highB = 4.0 * p_.gamma.toDouble() * static_cast<double>(spow(phase_));
        int64_t nextStep = spow(phase_);  // spacing of S_{phase+1}
        std::set<int64_t> deserted;
        for (int64_t x = 0; x <= jmax_ && st != INT64_MAX; x += st) {
            double h = static_cast<double>(homeSize(x));
            if (!(lowB <= h && h <= highB)) continue;
            bool far = true;
            if (nextStep != INT64_MAX) {
                // nearest points of S_{phase+1}: need 12 |y - x| >= s^phase for all y
                int64_t k = x / nextStep;
                for (int64_t kk : {k - 1, k, k + 1, k + 2}) {
                    if (kk < 0) continue;
                    int64_t y = kk * nextStep;
                    if (y > jmax_) continue;
                    int64_t d = y > x ? y - x : x - y;
                    __int128 lhs = static_cast<__int128>(12) * d;
                    if (lhs < static_cast<__int128>(spow(phase_))) far = false;
                }
            } else {
                int64_t d = x;
                if (static_cast<__int128>(12) * d < static_cast<__int128>(spow(phase_))) far = false;
            }
            if (far) deserted.insert(x);
        }
        size_t newly = 0;
        if (!deserted.empty()) {
            long prev = -1;
            auto markGap = [&](long L, long R) {
                size_t l = static_cast<size_t>(L + 1);
                if (cap_ == 0) return;
                size_t r = R >= 0 ? static_cast<size_t>(R - 1) : cap_ - 1;
                if (R >= 0 && R - 1 < L + 1) return;
                if (l > r) return;
                std::optional<int64_t> m1, m2;
                gapMatches(L, R, m1, m2);
                bool hit = (m1 && deserted.count(*m1)) || (m2 && deserted.count(*m2));
                if (!hit) return;
                for (size_t c = l; c <= r; ++c) {
                    if (marked_[c]) continue;
                    marked_[c] = 1;
                    fenAdd(c, 1);
                    ++newly;
                }
            };
            for (size_t c : filledSet_) {
                markGap(prev, static_cast<long>(c));
                prev = static_cast<long>(c);
            }
            markGap(prev, -1);
        }
        markedTotal_ += newly;
        desertedSizes_.push_back(newly);
        ++phase_;
        current_.reset();
        lastLandedOutside_ = true;
        rebuild(a);
    }
};

}  // namespace fanpack
