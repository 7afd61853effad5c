#pragma once

// Dense univariate integer polynomials, lowest degree first. Includes exact
// division, primitive-PRS gcd, and squarefree decomposition (used for root
// multiplicities and exact factor stripping).

#include <gmpxx.h>

#include <utility>
#include <vector>

#include "adelheight/bigfloat.hpp"
#include "adelheight/errors.hpp"

namespace adelheight {

struct IntPoly {
    std::vector<mpz_class> c; // c[i] multiplies x^i; invariant: back() != 0 unless empty

    IntPoly() = default;
    explicit IntPoly(std::vector<mpz_class> coeffs) : c(std::move(coeffs)) { trim(); }
    static IntPoly constant(const mpz_class& a) { return IntPoly(std::vector<mpz_class>{a}); }
    static IntPoly monomial(const mpz_class& a, size_t k) {
        std::vector<mpz_class> v(k + 1);
        v[k] = a;
        return IntPoly(std::move(v));
    }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    long deg() const { return static_cast<long>(c.size()) - 1; } // -1 for zero
    const mpz_class& lead() const { return c.back(); }
    mpz_class coeff(size_t i) const { return i < c.size() ? c[i] : mpz_class(0); }

    friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c == b.c; }

    friend IntPoly operator+(const IntPoly& a, const IntPoly& b) {
        std::vector<mpz_class> r(std::max(a.c.size(), b.c.size()));
        for (size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
        return IntPoly(std::move(r));
    }
    friend IntPoly operator-(const IntPoly& a, const IntPoly& b) {
        std::vector<mpz_class> r(std::max(a.c.size(), b.c.size()));
        for (size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) - b.coeff(i);
        return IntPoly(std::move(r));
    }
    friend IntPoly operator-(const IntPoly& a) {
        std::vector<mpz_class> r(a.c.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = -a.c[i];
        return IntPoly(std::move(r));
    }
    friend IntPoly operator*(const IntPoly& a, const IntPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<mpz_class> r(a.c.size() + b.c.size() - 1);
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return IntPoly(std::move(r));
    }
    friend IntPoly operator*(const mpz_class& s, const IntPoly& a) {
        if (s == 0) return {};
        std::vector<mpz_class> r(a.c.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = s * a.c[i];
        return IntPoly(std::move(r));
    }

    IntPoly derivative() const {
        if (c.size() <= 1) return {};
        std::vector<mpz_class> r(c.size() - 1);
        for (size_t i = 1; i < c.size(); ++i) r[i - 1] = mpz_class(static_cast<long>(i)) * c[i];
        return IntPoly(std::move(r));
    }

    mpz_class content() const {
        mpz_class g = 0;
        for (const auto& a : c) {
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
            if (g == 1) break;
        }
        return g; // 0 for the zero polynomial
    }
    IntPoly primitive_part() const {
        if (is_zero()) return {};
        mpz_class g = content();
        std::vector<mpz_class> r(c.size());
        for (size_t i = 0; i < c.size(); ++i) mpz_divexact(r[i].get_mpz_t(), c[i].get_mpz_t(), g.get_mpz_t());
        return IntPoly(std::move(r));
    }

    mpz_class eval_z(const mpz_class& x) const {
        mpz_class acc = 0;
        for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    }
    mpq_class eval_q(const mpq_class& x) const {
        mpq_class acc = 0;
        for (size_t i = c.size(); i-- > 0;) acc = acc * x + mpq_class(c[i]);
        return acc;
    }
    BigComplex eval_c(const BigComplex& x) const {
        BigComplex acc;
        for (size_t i = c.size(); i-- > 0;) {
            acc = acc * x;
            acc.re += BigFloat::from(c[i]);
        }
        return acc;
    }
    BigFloat eval_f(const BigFloat& x) const {
        BigFloat acc;
        for (size_t i = c.size(); i-- > 0;) acc = acc * x + BigFloat::from(c[i]);
        return acc;
    }

    // max |coefficient|
    mpz_class height() const {
        mpz_class h = 0;
        for (const auto& a : c) {
            mpz_class aa = abs(a);
            if (aa > h) h = aa;
        }
        return h;
    }
};

// quotient of an exact division in Z[x]; throws if the division is inexact
inline IntPoly divexact(const IntPoly& a, const IntPoly& b) {
    if (b.is_zero()) throw InputError("divexact: division by zero polynomial");
    if (a.is_zero()) return {};
    if (a.deg() < b.deg()) throw InputError("divexact: not divisible (degree)");
    std::vector<mpz_class> rem = a.c;
    std::vector<mpz_class> q(a.deg() - b.deg() + 1);
    for (long k = a.deg() - b.deg(); k >= 0; --k) {
        mpz_class& top = rem[k + b.deg()];
        if (top == 0) { q[k] = 0; continue; }
        if (!mpz_divisible_p(top.get_mpz_t(), b.lead().get_mpz_t()))
            throw InputError("divexact: not divisible (coefficient)");
        mpz_divexact(q[k].get_mpz_t(), top.get_mpz_t(), b.lead().get_mpz_t());
        for (long i = 0; i <= b.deg(); ++i) rem[k + i] -= q[k] * b.c[i];
    }
    for (const auto& r : rem)
        if (r != 0) throw InputError("divexact: nonzero remainder");
    return IntPoly(std::move(q));
}

// quotient of an exact division in Q[x], returned primitive with the sign of
// lead(a)*lead(b); intended for factor extraction where constants are irrelevant
inline IntPoly divexact_q(const IntPoly& a, const IntPoly& b) {
    if (b.is_zero()) throw InputError("divexact_q: division by zero polynomial");
    if (a.is_zero()) return {};
    if (a.deg() < b.deg()) throw InputError("divexact_q: not divisible (degree)");
    std::vector<mpq_class> rem(a.c.size());
    for (size_t i = 0; i < a.c.size(); ++i) rem[i] = a.c[i];
    std::vector<mpq_class> q(a.deg() - b.deg() + 1);
    for (long k = a.deg() - b.deg(); k >= 0; --k) {
        mpq_class top = rem[k + b.deg()];
        if (top == 0) continue;
        q[k] = top / mpq_class(b.lead());
        for (long i = 0; i <= b.deg(); ++i) rem[k + i] -= q[k] * mpq_class(b.c[i]);
    }
    for (const auto& r : rem)
        if (r != 0) throw InputError("divexact_q: nonzero remainder");
    mpz_class den = 1;
    for (const auto& x : q) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den().get_mpz_t());
    std::vector<mpz_class> zi(q.size());
    for (size_t i = 0; i < q.size(); ++i) zi[i] = mpz_class(q[i] * mpq_class(den));
    IntPoly out(std::move(zi));
    out = out.primitive_part();
    if (!out.is_zero() && (out.lead() < 0) != ((a.lead() < 0) != (b.lead() < 0))) out = -out;
    return out;
}

namespace detail {

// pseudo-remainder: lead(b)^(deg a - deg b + 1) * a mod b
inline IntPoly prem(IntPoly a, const IntPoly& b) {
    long db = b.deg();
    while (!a.is_zero() && a.deg() >= db) {
        long k = a.deg() - db;
        mpz_class la = a.lead();
        a = b.lead() * a - la * (b * IntPoly::monomial(1, k));
    }
    return a;
}

} // namespace detail

inline IntPoly gcd(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() && b.is_zero()) return {};
    if (a.is_zero()) return b.lead() < 0 ? -b : b;
    if (b.is_zero()) return a.lead() < 0 ? -a : a;
    mpz_class cg;
    mpz_gcd(cg.get_mpz_t(), a.content().get_mpz_t(), b.content().get_mpz_t());
    IntPoly u = a.primitive_part(), v = b.primitive_part();
    if (u.deg() < v.deg()) std::swap(u, v);
    while (!v.is_zero()) {
        IntPoly r = detail::prem(u, v);
        u = std::move(v);
        v = r.is_zero() ? IntPoly{} : r.primitive_part();
    }
    if (u.lead() < 0) u = -u;
    return cg * u;
}

// factors of f with multiplicities, each returned primitive up to sign;
// the product of factor^mult equals f up to a rational constant
inline std::vector<std::pair<IntPoly, unsigned>> squarefree_decomposition(const IntPoly& f) {
    std::vector<std::pair<IntPoly, unsigned>> out;
    if (f.deg() <= 0) return out;
    // chain f_i = gcd(f_{i-1}, f_{i-1}'), squarefree parts s_i = f_i / f_{i+1},
    // multiplicity-m factors a_m = s_{m-1} / s_m
    std::vector<IntPoly> chain{f.primitive_part()};
    while (chain.back().deg() > 0) {
        IntPoly g = gcd(chain.back(), chain.back().derivative()).primitive_part();
        chain.push_back(g);
        if (g.deg() == 0) break;
    }
    std::vector<IntPoly> sq; // s_i
    for (size_t i = 0; i + 1 < chain.size(); ++i) sq.push_back(divexact_q(chain[i], chain[i + 1]));
    for (size_t m = 0; m < sq.size(); ++m) {
        IntPoly am = (m + 1 < sq.size()) ? divexact_q(sq[m], sq[m + 1]) : sq[m];
        if (am.deg() > 0) out.emplace_back(am, static_cast<unsigned>(m + 1));
    }
    return out;
}

inline IntPoly squarefree_part(const IntPoly& f) {
    if (f.deg() <= 0) return f;
    IntPoly g = gcd(f, f.derivative());
    if (g.deg() <= 0) return f.primitive_part();
    return divexact_q(f.primitive_part(), g.primitive_part());
}

} // namespace adelheight
