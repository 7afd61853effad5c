#pragma once

// Exact reals of the shape  q0 + sum_p q_p * log p  (q rational, p prime).
// Equality is formal and complete: 1 and the log p are Q-linearly independent,
// so the zero test reduces to all coefficients vanishing. Sign evaluation uses
// MPFR interval enclosures at escalating precision; a formally nonzero value
// always separates from zero eventually.

#include <gmpxx.h>

#include <map>
#include <optional>
#include <utility>

#include "adelheight/bigfloat.hpp"
#include "adelheight/errors.hpp"
#include "adelheight/primes.hpp"

namespace adelheight {

class LogReal {
    mpq_class rat_;
    std::map<mpz_class, mpq_class> logs_; // prime -> coefficient, no zero entries

    void put(const mpz_class& p, const mpq_class& c) {
        if (c == 0) return;
        auto [it, fresh] = logs_.emplace(p, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) logs_.erase(it);
        }
    }

public:
    LogReal() : rat_(0) {}
    explicit LogReal(const mpq_class& q) : rat_(q) {}
    explicit LogReal(long q) : rat_(q) {}

    static LogReal log_prime(const mpz_class& p, const mpq_class& coeff = 1) {
        LogReal r;
        r.put(p, coeff);
        return r;
    }

    // log of a positive rational, via factorization (intended for small inputs)
    static LogReal log_rational(const mpq_class& x) {
        if (x <= 0) throw InputError("log_rational: argument must be positive");
        LogReal r;
        for (const auto& [p, e] : factor_integer(mpz_class(x.get_num())))
            r.put(p, mpq_class(static_cast<long>(e)));
        if (x.get_den() != 1)
            for (const auto& [p, e] : factor_integer(mpz_class(x.get_den())))
                r.put(p, mpq_class(-static_cast<long>(e)));
        return r;
    }

    const mpq_class& rational_part() const { return rat_; }
    const std::map<mpz_class, mpq_class>& log_terms() const { return logs_; }

    bool is_formal_zero() const { return rat_ == 0 && logs_.empty(); }
    bool is_rational() const { return logs_.empty(); }

    friend LogReal operator+(const LogReal& a, const LogReal& b) {
        LogReal r = a;
        r.rat_ += b.rat_;
        for (const auto& [p, c] : b.logs_) r.put(p, c);
        return r;
    }
    friend LogReal operator-(const LogReal& a, const LogReal& b) {
        LogReal r = a;
        r.rat_ -= b.rat_;
        for (const auto& [p, c] : b.logs_) r.put(p, -c);
        return r;
    }
    friend LogReal operator-(const LogReal& a) {
        LogReal r;
        r.rat_ = -a.rat_;
        for (const auto& [p, c] : a.logs_) r.logs_.emplace(p, -c);
        return r;
    }
    friend LogReal operator*(const mpq_class& s, const LogReal& a) {
        LogReal r;
        if (s == 0) return r;
        r.rat_ = s * a.rat_;
        for (const auto& [p, c] : a.logs_) r.logs_.emplace(p, s * c);
        return r;
    }
    friend LogReal operator/(const LogReal& a, const mpq_class& s) {
        if (s == 0) throw InputError("LogReal: division by zero");
        return mpq_class(1 / s) * a;
    }
    LogReal& operator+=(const LogReal& b) { return *this = *this + b; }
    LogReal& operator-=(const LogReal& b) { return *this = *this - b; }

    friend bool operator==(const LogReal& a, const LogReal& b) {
        return a.rat_ == b.rat_ && a.logs_ == b.logs_;
    }

    // [lower, upper] enclosure at the given precision
    std::pair<BigFloat, BigFloat> enclosure(mpfr_prec_t prec) const {
        BigFloat lo(prec), hi(prec);
        mpfr_set_q(lo.raw(), rat_.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(hi.raw(), rat_.get_mpq_t(), MPFR_RNDU);
        BigFloat t(prec), lp(prec);
        for (const auto& [p, c] : logs_) {
            bool cpos = c > 0;
            mpfr_set_z(lp.raw(), p.get_mpz_t(), cpos ? MPFR_RNDD : MPFR_RNDU);
            mpfr_log(lp.raw(), lp.raw(), cpos ? MPFR_RNDD : MPFR_RNDU);
            mpfr_mul_q(t.raw(), lp.raw(), c.get_mpq_t(), MPFR_RNDD);
            mpfr_add(lo.raw(), lo.raw(), t.raw(), MPFR_RNDD);
            mpfr_set_z(lp.raw(), p.get_mpz_t(), cpos ? MPFR_RNDU : MPFR_RNDD);
            mpfr_log(lp.raw(), lp.raw(), cpos ? MPFR_RNDU : MPFR_RNDD);
            mpfr_mul_q(t.raw(), lp.raw(), c.get_mpq_t(), MPFR_RNDU);
            mpfr_add(hi.raw(), hi.raw(), t.raw(), MPFR_RNDU);
        }
        return {lo, hi};
    }

    BigFloat to_float(mpfr_prec_t prec = 0) const {
        if (prec == 0) prec = default_precision();
        BigFloat acc(prec), t(prec);
        mpfr_set_q(acc.raw(), rat_.get_mpq_t(), MPFR_RNDN);
        for (const auto& [p, c] : logs_) {
            mpfr_set_z(t.raw(), p.get_mpz_t(), MPFR_RNDN);
            mpfr_log(t.raw(), t.raw(), MPFR_RNDN);
            mpfr_mul_q(t.raw(), t.raw(), c.get_mpq_t(), MPFR_RNDN);
            mpfr_add(acc.raw(), acc.raw(), t.raw(), MPFR_RNDN);
        }
        return acc;
    }
    double to_double() const { return to_float(128).to_double(); }

    int sign() const {
        if (is_formal_zero()) return 0;
        bool all_nonneg = rat_ >= 0, all_nonpos = rat_ <= 0;
        for (const auto& [p, c] : logs_) {
            (void)p;
            if (c < 0) all_nonneg = false;
            if (c > 0) all_nonpos = false;
        }
        if (all_nonneg) return 1;
        if (all_nonpos) return -1;
        for (mpfr_prec_t prec = 128; prec <= 1 << 20; prec *= 2) {
            auto [lo, hi] = enclosure(prec);
            if (lo.sign() > 0) return 1;
            if (hi.sign() < 0) return -1;
        }
        throw NumericError("LogReal::sign: enclosure failed to separate from zero");
    }

    friend int cmp(const LogReal& a, const LogReal& b) { return (a - b).sign(); }
    friend bool operator<(const LogReal& a, const LogReal& b) { return cmp(a, b) < 0; }
    friend bool operator>(const LogReal& a, const LogReal& b) { return cmp(a, b) > 0; }
    friend bool operator<=(const LogReal& a, const LogReal& b) { return cmp(a, b) <= 0; }
    friend bool operator>=(const LogReal& a, const LogReal& b) { return cmp(a, b) >= 0; }

    friend LogReal abs(const LogReal& a) { return a.sign() < 0 ? -a : a; }

    // exact rational r with a = r*b, when one exists and b != 0
    friend std::optional<mpq_class> exact_ratio(const LogReal& a, const LogReal& b) {
        if (b.is_formal_zero()) return std::nullopt;
        if (a.is_formal_zero()) return mpq_class(0);
        mpq_class r;
        bool have = false;
        if (b.rat_ != 0) {
            r = a.rat_ / b.rat_;
            have = true;
        } else if (a.rat_ != 0) {
            return std::nullopt;
        }
        for (const auto& [p, c] : b.logs_) {
            auto it = a.logs_.find(p);
            if (it == a.logs_.end()) return std::nullopt;
            mpq_class ri = it->second / c;
            if (have && ri != r) return std::nullopt;
            r = ri;
            have = true;
        }
        if (a.logs_.size() != b.logs_.size()) return std::nullopt;
        if (a.rat_ != r * b.rat_) return std::nullopt;
        return r;
    }
};

} // namespace adelheight
