#pragma once
// Exact rational number. Small values live in a pair of int64 with 128-bit
// intermediates; anything larger falls back to a GMP rational.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <bit>
#include <numeric>
#include <ostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fanpack {

namespace detail {

// binary gcd on magnitudes; gcd(0, v) = v
inline uint64_t gcdU64(uint64_t u, uint64_t v) {
    if (u == 0) return v;
    if (v == 0) return u;
    int shift = std::countr_zero(u | v);
    u >>= std::countr_zero(u);
    do {
        v >>= std::countr_zero(v);
        if (u > v) std::swap(u, v);
        v -= u;
    } while (v);
    return u << shift;
}

inline uint64_t magnitude(int64_t a) { return a < 0 ? 0 - static_cast<uint64_t>(a) : static_cast<uint64_t>(a); }

inline int64_t gcdI64(int64_t a, int64_t b) { return static_cast<int64_t>(gcdU64(magnitude(a), magnitude(b))); }

}  // namespace detail

class Rat {
public:
    using i128 = __int128;
    using u128 = unsigned __int128;

    Rat() = default;
    Rat(int v) : num_(v), den_(1) {}
    Rat(long v) : num_(v), den_(1) {}
    Rat(long long v) : num_(static_cast<int64_t>(v)), den_(1) {}
    Rat(int64_t n, int64_t d) { assign128(n, d); }
    explicit Rat(const mpq_class& q) { assignBig(q); }

    static Rat fromParts(const mpz_class& n, const mpz_class& d) {
        if (d == 0) throw std::domain_error("Rat: zero denominator");
        mpq_class q(n, d);
        q.canonicalize();
        return Rat(q);
    }

    // Accepts "p/q", integers, decimals and scientific notation.
    static Rat parse(std::string_view s);

    bool isSmall() const { return !big_; }
    int64_t smallNum() const { return num_; }
    int64_t smallDen() const { return den_; }

    mpq_class toMpq() const {
        if (big_) return *big_;
        mpq_class q;
        mpz_set_si(q.get_num_mpz_t(), num_);
        mpz_set_si(q.get_den_mpz_t(), den_);
        return q;
    }
    mpz_class numerator() const { return toMpq().get_num(); }
    mpz_class denominator() const { return toMpq().get_den(); }

    int sign() const {
        if (big_) return sgn(*big_);
        return (num_ > 0) - (num_ < 0);
    }
    bool isZero() const { return !big_ && num_ == 0; }
    bool isInteger() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

    double toDouble() const {
        if (big_) return big_->get_d();
        return static_cast<double>(num_) / static_cast<double>(den_);
    }
    std::string str() const {
        if (big_) return big_->get_str();
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    Rat operator-() const {
        if (!big_ && num_ != INT64_MIN) {
            Rat r;
            r.num_ = -num_;
            r.den_ = den_;
            return r;
        }
        return Rat(mpq_class(-toMpq()));
    }

    friend Rat operator+(const Rat& a, const Rat& b) {
        if (!a.big_ && !b.big_) {
            if (a.den_ == b.den_) {
                Rat r;
                r.assign128(static_cast<i128>(a.num_) + b.num_, a.den_);
                return r;
            }
            int64_t g = detail::gcdI64(a.den_, b.den_);
            i128 bd = a.den_ / g, dd = b.den_ / g;
            i128 t = static_cast<i128>(a.num_) * dd + static_cast<i128>(b.num_) * bd;
            int64_t tm = static_cast<int64_t>(t % g);
            int64_t g2 = detail::gcdI64(tm < 0 ? -tm : tm, g);
            Rat r;
            r.assignReduced(t / g2, bd * (b.den_ / g2));
            return r;
        }
        return Rat(mpq_class(a.toMpq() + b.toMpq()));
    }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
    friend Rat operator*(const Rat& a, const Rat& b) {
        if (!a.big_ && !b.big_) {
            if (a.num_ == 0 || b.num_ == 0) return Rat();
            int64_t g1 = detail::gcdI64(a.num_, b.den_);
            int64_t g2 = detail::gcdI64(b.num_, a.den_);
            i128 n = static_cast<i128>(a.num_ / g1) * (b.num_ / g2);
            i128 d = static_cast<i128>(a.den_ / g2) * (b.den_ / g1);
            Rat r;
            r.assignReduced(n, d);
            return r;
        }
        return Rat(mpq_class(a.toMpq() * b.toMpq()));
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.isZero()) throw std::domain_error("Rat: division by zero");
        return a * b.reciprocal();
    }
    Rat reciprocal() const {
        if (isZero()) throw std::domain_error("Rat: reciprocal of zero");
        if (!big_) {
            Rat r;
            r.assign128(den_, num_);
            return r;
        }
        return Rat(mpq_class(1 / *big_));
    }

    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }
    Rat& operator/=(const Rat& o) { return *this = *this / o; }

    friend int cmp(const Rat& a, const Rat& b) {
        if (!a.big_ && !b.big_) {
            if (a.den_ == b.den_) return (a.num_ > b.num_) - (a.num_ < b.num_);
            i128 l = static_cast<i128>(a.num_) * b.den_;
            i128 r = static_cast<i128>(b.num_) * a.den_;
            return (l > r) - (l < r);
        }
        int c = ::cmp(a.toMpq(), b.toMpq());
        return (c > 0) - (c < 0);
    }
    friend bool operator==(const Rat& a, const Rat& b) {
        if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
        return cmp(a, b) == 0;
    }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
        int c = cmp(a, b);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    // Largest integer <= this.
    Rat floor() const {
        if (!big_) return Rat(floorDiv(num_, den_));
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), big_->get_num_mpz_t(), big_->get_den_mpz_t());
        return Rat(mpq_class(q));
    }
    Rat ceil() const { return -((-*this).floor()); }

    int64_t floorInt() const {
        if (!big_) return floorDiv(num_, den_);
        Rat f = floor();
        if (!f.isSmall()) throw std::overflow_error("Rat: floor does not fit in int64");
        return f.num_;
    }
    int64_t ceilInt() const { return -((-*this).floorInt()); }

    friend Rat abs(const Rat& a) { return a.sign() < 0 ? -a : a; }
    friend Rat min(const Rat& a, const Rat& b) { return b < a ? b : a; }
    friend Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

    // 2^e for any integer e.
    static Rat pow2(int e) {
        if (e >= 0 && e < 62) return Rat(int64_t{1} << e, 1);
        if (e < 0 && e > -62) return Rat(1, int64_t{1} << -e);
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
        return e >= 0 ? Rat(mpq_class(p)) : Rat(mpq_class(1 / mpq_class(p)));
    }
    // base^e for integer e (base nonzero when e < 0).
    static Rat ipow(const Rat& base, int e) {
        if (e < 0) return ipow(base.reciprocal(), -e);
        Rat r(1), b = base;
        while (e) {
            if (e & 1) r *= b;
            e >>= 1;
            if (e) b *= b;
        }
        return r;
    }

    // A rational q with q <= sqrt(this) and sqrt(this) - q < 2^-bits.
    Rat sqrtLower(int bits = 40) const {
        if (sign() < 0) throw std::domain_error("Rat: sqrt of negative");
        mpq_class q = toMpq();
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 2, static_cast<unsigned long>(bits));
        mpz_class prod = q.get_num() * q.get_den() * scale * scale;
        mpz_class root;
        mpz_sqrt(root.get_mpz_t(), prod.get_mpz_t());
        return fromParts(root, q.get_den() * scale);
    }

    size_t hash() const {
        if (!big_) return std::hash<int64_t>()(num_) * 1000003u ^ std::hash<int64_t>()(den_);
        return std::hash<std::string>()(big_->get_str());
    }

    friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

private:
    int64_t num_ = 0;
    int64_t den_ = 1;
    std::shared_ptr<const mpq_class> big_;

    static int64_t floorDiv(int64_t a, int64_t b) {
        int64_t q = a / b;
        if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
        return q;
    }
    static u128 gcd128(u128 a, u128 b) {
        if (a == 0) return b;
        if (b == 0) return a;
        if ((a >> 64) == 0 && (b >> 64) == 0)
            return detail::gcdU64(static_cast<uint64_t>(a), static_cast<uint64_t>(b));
        int shift = 0;
        while (((a | b) & 1) == 0) {
            a >>= 1;
            b >>= 1;
            ++shift;
        }
        while ((a & 1) == 0) a >>= 1;
        do {
            while ((b & 1) == 0) b >>= 1;
            if (a > b) std::swap(a, b);
            b -= a;
        } while (b != 0);
        return a << shift;
    }
    static bool fits64(i128 v) { return v >= INT64_MIN + 1 && v <= INT64_MAX; }
    static mpz_class toMpz(i128 v) {
        bool neg = v < 0;
        u128 u = neg ? -static_cast<u128>(v) : static_cast<u128>(v);
        mpz_class hi(static_cast<unsigned long>(static_cast<uint64_t>(u >> 64)));
        mpz_class lo(static_cast<unsigned long>(static_cast<uint64_t>(u)));
        mpz_class r = (hi << 64) + lo;
        return neg ? mpz_class(-r) : r;
    }

    void assign128(i128 n, i128 d) {
        if (d == 0) throw std::domain_error("Rat: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        if (fits64(n) && fits64(d)) {
            int64_t a = static_cast<int64_t>(n), b = static_cast<int64_t>(d);
            if (a == 0) {
                assignReduced(0, 1);
                return;
            }
            uint64_t g = detail::gcdU64(detail::magnitude(a), static_cast<uint64_t>(b));
            if (a != std::numeric_limits<int64_t>::min()) {
                assignReduced(a / static_cast<int64_t>(g), b / static_cast<int64_t>(g));
                return;
            }
        }
        u128 g = gcd128(n < 0 ? -static_cast<u128>(n) : static_cast<u128>(n), static_cast<u128>(d));
        if (g > 1) {
            n /= static_cast<i128>(g);
            d /= static_cast<i128>(g);
        }
        assignReduced(n, d);
    }
    // n/d already in lowest terms with d > 0.
    void assignReduced(i128 n, i128 d) {
        if (n == 0) {
            num_ = 0;
            den_ = 1;
            big_.reset();
            return;
        }
        if (fits64(n) && fits64(d)) {
            num_ = static_cast<int64_t>(n);
            den_ = static_cast<int64_t>(d);
            big_.reset();
            return;
        }
        mpq_class q;
        mpz_set(q.get_num_mpz_t(), toMpz(n).get_mpz_t());
        mpz_set(q.get_den_mpz_t(), toMpz(d).get_mpz_t());
        big_ = std::make_shared<const mpq_class>(std::move(q));
        num_ = 0;
        den_ = 1;
    }
    void assignBig(const mpq_class& q) {
        if (mpz_fits_slong_p(q.get_num_mpz_t()) && mpz_fits_slong_p(q.get_den_mpz_t()) &&
            mpz_cmp_si(q.get_num_mpz_t(), INT64_MIN) != 0) {
            num_ = mpz_get_si(q.get_num_mpz_t());
            den_ = mpz_get_si(q.get_den_mpz_t());
            big_.reset();
            return;
        }
        big_ = std::make_shared<const mpq_class>(q);
        num_ = 0;
        den_ = 1;
    }
};

inline Rat Rat::parse(std::string_view sv) {
    std::string s;
    for (char c : sv)
        if (c != ' ' && c != '\t' && c != '\n') s.push_back(c);
    if (s.empty()) throw std::invalid_argument("Rat::parse: empty string");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rat n = parse(s.substr(0, slash));
        Rat d = parse(s.substr(slash + 1));
        if (d.isZero()) throw std::invalid_argument("Rat::parse: zero denominator in '" + s + "'");
        return n / d;
    }
    bool neg = false;
    size_t i = 0;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    std::string digits;
    long exp10 = 0;
    bool seenDot = false, anyDigit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            anyDigit = true;
            if (seenDot) --exp10;
        } else if (c == '.' && !seenDot) {
            seenDot = true;
        } else if (c == 'e' || c == 'E') {
            std::string e = s.substr(i + 1);
            if (e.empty()) throw std::invalid_argument("Rat::parse: bad exponent in '" + s + "'");
            size_t used = 0;
            long ev = std::stol(e, &used);
            if (used != e.size()) throw std::invalid_argument("Rat::parse: bad exponent in '" + s + "'");
            exp10 += ev;
            break;
        } else {
            throw std::invalid_argument("Rat::parse: unexpected character in '" + s + "'");
        }
    }
    if (!anyDigit) throw std::invalid_argument("Rat::parse: no digits in '" + s + "'");
    mpz_class n(digits, 10);
    if (neg) n = -n;
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    if (exp10 >= 0) return fromParts(n * p, mpz_class(1));
    return fromParts(n, p);
}

struct RatHash {
    size_t operator()(const Rat& r) const { return r.hash(); }
};

}  // namespace fanpack
