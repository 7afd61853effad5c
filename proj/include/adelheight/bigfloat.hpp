#pragma once

// MPFR-backed floating point at a configurable global precision, plus a
// complex pair built on it. Values carry their own precision; binary
// operations widen to the larger operand precision.

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>

namespace adelheight {

inline mpfr_prec_t& default_precision() {
    static thread_local mpfr_prec_t p = 256;
    return p;
}

struct PrecisionGuard {
    mpfr_prec_t saved;
    explicit PrecisionGuard(mpfr_prec_t p) : saved(default_precision()) { default_precision() = p; }
    ~PrecisionGuard() { default_precision() = saved; }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;
};

class BigFloat {
    mpfr_t v_;

public:
    BigFloat() { mpfr_init2(v_, default_precision()); mpfr_set_zero(v_, 1); }
    explicit BigFloat(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    static BigFloat from(long x, mpfr_prec_t prec = 0) {
        BigFloat r(prec ? prec : default_precision());
        mpfr_set_si(r.v_, x, MPFR_RNDN);
        return r;
    }
    static BigFloat from(double x, mpfr_prec_t prec = 0) {
        BigFloat r(prec ? prec : default_precision());
        mpfr_set_d(r.v_, x, MPFR_RNDN);
        return r;
    }
    static BigFloat from(const mpz_class& x, mpfr_rnd_t rnd = MPFR_RNDN, mpfr_prec_t prec = 0) {
        BigFloat r(prec ? prec : default_precision());
        mpfr_set_z(r.v_, x.get_mpz_t(), rnd);
        return r;
    }
    static BigFloat from(const mpq_class& x, mpfr_rnd_t rnd = MPFR_RNDN, mpfr_prec_t prec = 0) {
        BigFloat r(prec ? prec : default_precision());
        mpfr_set_q(r.v_, x.get_mpq_t(), rnd);
        return r;
    }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    std::string str(int digits = 20) const {
        char* s = nullptr;
        mpfr_asprintf(&s, "%.*Rg", digits, v_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

    int sign() const { return mpfr_sgn(v_); }
    bool is_zero() const { return mpfr_zero_p(v_); }
    bool is_finite() const { return mpfr_number_p(v_); }

    friend int cmp(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_); }
    friend bool operator<(const BigFloat& a, const BigFloat& b) { return cmp(a, b) < 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return cmp(a, b) > 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return cmp(a, b) <= 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return cmp(a, b) >= 0; }
    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

    static mpfr_prec_t join(const BigFloat& a, const BigFloat& b) {
        return std::max(mpfr_get_prec(a.v_), mpfr_get_prec(b.v_));
    }

#define ADELHEIGHT_BF_BINOP(name, fn)                                                              \
    friend BigFloat name(const BigFloat& a, const BigFloat& b, mpfr_rnd_t rnd = MPFR_RNDN) {       \
        BigFloat r(join(a, b));                                                                    \
        fn(r.v_, a.v_, b.v_, rnd);                                                                 \
        return r;                                                                                  \
    }
    ADELHEIGHT_BF_BINOP(add, mpfr_add)
    ADELHEIGHT_BF_BINOP(sub, mpfr_sub)
    ADELHEIGHT_BF_BINOP(mul, mpfr_mul)
    ADELHEIGHT_BF_BINOP(div, mpfr_div)
    ADELHEIGHT_BF_BINOP(atan2v, mpfr_atan2)
    ADELHEIGHT_BF_BINOP(hypot, mpfr_hypot)
#undef ADELHEIGHT_BF_BINOP

#define ADELHEIGHT_BF_UNOP(name, fn)                                                               \
    friend BigFloat name(const BigFloat& a, mpfr_rnd_t rnd = MPFR_RNDN) {                          \
        BigFloat r(a.prec());                                                                      \
        fn(r.v_, a.v_, rnd);                                                                       \
        return r;                                                                                  \
    }
    ADELHEIGHT_BF_UNOP(log, mpfr_log)
    ADELHEIGHT_BF_UNOP(exp, mpfr_exp)
    ADELHEIGHT_BF_UNOP(sqrt, mpfr_sqrt)
    ADELHEIGHT_BF_UNOP(abs, mpfr_abs)
    ADELHEIGHT_BF_UNOP(neg, mpfr_neg)
#undef ADELHEIGHT_BF_UNOP

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b) { return add(a, b); }
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b) { return sub(a, b); }
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b) { return mul(a, b); }
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b) { return div(a, b); }
    friend BigFloat operator-(const BigFloat& a) { return neg(a); }

    BigFloat& operator+=(const BigFloat& b) { mpfr_add(v_, v_, b.v_, MPFR_RNDN); return *this; }
    BigFloat& operator-=(const BigFloat& b) { mpfr_sub(v_, v_, b.v_, MPFR_RNDN); return *this; }
    BigFloat& operator*=(const BigFloat& b) { mpfr_mul(v_, v_, b.v_, MPFR_RNDN); return *this; }
    BigFloat& operator/=(const BigFloat& b) { mpfr_div(v_, v_, b.v_, MPFR_RNDN); return *this; }

    friend BigFloat max(const BigFloat& a, const BigFloat& b) { return a < b ? b : a; }
    friend BigFloat min(const BigFloat& a, const BigFloat& b) { return a < b ? a : b; }

    // a * 2^e
    friend BigFloat ldexp2(const BigFloat& a, long e) {
        BigFloat r(a.prec());
        mpfr_mul_2si(r.v_, a.v_, e, MPFR_RNDN);
        return r;
    }

    static BigFloat pi(mpfr_prec_t prec = 0) {
        BigFloat r(prec ? prec : default_precision());
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }
    static BigFloat pow2(long e, mpfr_prec_t prec = 0) {
        BigFloat r(prec ? prec : default_precision());
        mpfr_set_si_2exp(r.v_, 1, e, MPFR_RNDN);
        return r;
    }
};

struct BigComplex {
    BigFloat re, im;

    BigComplex() = default;
    BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}
    static BigComplex from(double r, double i, mpfr_prec_t prec = 0) {
        return {BigFloat::from(r, prec), BigFloat::from(i, prec)};
    }

    friend BigComplex operator+(const BigComplex& a, const BigComplex& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend BigComplex operator-(const BigComplex& a, const BigComplex& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend BigComplex operator*(const BigFloat& s, const BigComplex& a) {
        return {s * a.re, s * a.im};
    }
    friend BigComplex operator-(const BigComplex& a) { return {-a.re, -a.im}; }

    friend BigFloat norm2(const BigComplex& a) { return a.re * a.re + a.im * a.im; }
    friend BigFloat abs(const BigComplex& a) { return hypot(a.re, a.im); }

    friend BigComplex operator/(const BigComplex& a, const BigComplex& b) {
        BigFloat n = norm2(b);
        return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
    }
    friend BigComplex operator/(const BigComplex& a, const BigFloat& s) {
        return {a.re / s, a.im / s};
    }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    double to_double_re() const { return re.to_double(); }
    double to_double_im() const { return im.to_double(); }
};

} // namespace adelheight
