#pragma once

// Adelic divisors on open subschemes U = Spec Z \ {boundary primes}: exact
// boundary-norm calculus, arithmetic degrees, Picard classes, and limits of
// Cauchy sequences in the completion. Coefficients stay exact: rationals at
// the finite places, formal log-linear combinations at the archimedean one.

#include <gmpxx.h>

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adelheight/errors.hpp"
#include "adelheight/logreal.hpp"
#include "adelheight/primes.hpp"

namespace adelheight {

struct OpenModel {
    std::set<mpz_class> boundary_primes;

    static OpenModel spec_z(std::vector<mpz_class> primes = {}) {
        OpenModel m;
        for (auto& p : primes) {
            if (!is_prime(p)) throw InputError("OpenModel: " + p.get_str() + " is not prime");
            m.boundary_primes.insert(p);
        }
        return m;
    }
    bool on_boundary(const mpz_class& p) const { return boundary_primes.count(p) != 0; }
    friend bool operator==(const OpenModel& a, const OpenModel& b) {
        return a.boundary_primes == b.boundary_primes;
    }
};

// interior: integral coefficients at primes of U; boundary: rational
// coefficients at the removed primes; arch: the archimedean Green constant
struct ArithDivisor {
    OpenModel model;
    std::map<mpz_class, mpz_class> interior;
    std::map<mpz_class, mpq_class> boundary;
    LogReal arch;

    explicit ArithDivisor(OpenModel m = OpenModel{}) : model(std::move(m)) {}

    ArithDivisor& set_interior(const mpz_class& p, mpz_class c) {
        if (!is_prime(p)) throw InputError("ArithDivisor: " + p.get_str() + " is not prime");
        if (model.on_boundary(p))
            throw InputError("ArithDivisor: " + p.get_str() + " lies on the boundary");
        if (c == 0)
            interior.erase(p);
        else
            interior[p] = std::move(c);
        return *this;
    }
    ArithDivisor& set_boundary(const mpz_class& p, mpq_class c) {
        if (!model.on_boundary(p))
            throw InputError("ArithDivisor: " + p.get_str() + " is not a boundary prime");
        c.canonicalize();
        if (c == 0)
            boundary.erase(p);
        else
            boundary[p] = std::move(c);
        return *this;
    }
    ArithDivisor& set_arch(LogReal g) {
        arch = std::move(g);
        return *this;
    }

    bool is_zero() const {
        return interior.empty() && boundary.empty() && arch.is_formal_zero();
    }

    friend ArithDivisor operator+(const ArithDivisor& a, const ArithDivisor& b) {
        if (!(a.model == b.model)) throw InputError("ArithDivisor: mixed models");
        ArithDivisor out(a.model);
        out.interior = a.interior;
        for (const auto& [p, c] : b.interior) {
            auto& slot = out.interior[p];
            slot += c;
            if (slot == 0) out.interior.erase(p);
        }
        out.boundary = a.boundary;
        for (const auto& [p, c] : b.boundary) {
            auto& slot = out.boundary[p];
            slot += c;
            if (slot == 0) out.boundary.erase(p);
        }
        out.arch = a.arch + b.arch;
        return out;
    }
    friend ArithDivisor operator-(const ArithDivisor& a) {
        ArithDivisor out(a.model);
        for (const auto& [p, c] : a.interior) out.interior[p] = -c;
        for (const auto& [p, c] : a.boundary) out.boundary[p] = -c;
        out.arch = -a.arch;
        return out;
    }
    friend ArithDivisor operator-(const ArithDivisor& a, const ArithDivisor& b) {
        return a + (-b);
    }
    friend ArithDivisor operator*(const mpq_class& s, const ArithDivisor& a) {
        ArithDivisor out(a.model);
        if (s == 0) return out;
        for (const auto& [p, c] : a.interior) {
            mpq_class t = s * mpq_class(c);
            t.canonicalize();
            if (t.get_den() != 1)
                throw InputError("ArithDivisor: scaling breaks interior integrality");
            out.interior[p] = t.get_num();
        }
        for (const auto& [p, c] : a.boundary) {
            mpq_class t = s * c;
            t.canonicalize();
            out.boundary[p] = t;
        }
        out.arch = s * a.arch;
        return out;
    }
    friend bool operator==(const ArithDivisor& a, const ArithDivisor& b) {
        return a.model == b.model && a.interior == b.interior && a.boundary == b.boundary &&
               a.arch == b.arch;
    }
};

// strictly effective divisor supported on every boundary prime and infinity
struct BoundaryDivisor {
    ArithDivisor div;

    explicit BoundaryDivisor(ArithDivisor d) : div(std::move(d)) {
        if (!div.interior.empty())
            throw InputError("BoundaryDivisor: interior support is not allowed");
        for (const auto& p : div.model.boundary_primes) {
            auto it = div.boundary.find(p);
            if (it == div.boundary.end() || it->second <= 0)
                throw InputError("BoundaryDivisor: needs a positive coefficient at " +
                                 p.get_str());
        }
        if (div.arch.sign() <= 0)
            throw InputError("BoundaryDivisor: needs a positive archimedean part");
    }
};

inline bool is_effective(const ArithDivisor& e) {
    for (const auto& [p, c] : e.interior)
        if (c < 0) return false;
    for (const auto& [p, c] : e.boundary)
        if (c < 0) return false;
    return e.arch.sign() >= 0;
}

// inf{eps > 0 : -eps D0 <= E <= eps D0}; infinity iff E touches the interior
inline double boundary_norm(const ArithDivisor& e, const BoundaryDivisor& d0) {
    if (!(e.model == d0.div.model)) throw InputError("boundary_norm: mixed models");
    if (!e.interior.empty()) return std::numeric_limits<double>::infinity();
    double best = 0;
    for (const auto& [p, c] : e.boundary) {
        mpq_class r = abs(c) / d0.div.boundary.at(p);
        r.canonicalize();
        best = std::max(best, r.get_d());
    }
    if (!e.arch.is_formal_zero()) {
        LogReal num = abs(e.arch);
        if (auto r = exact_ratio(num, d0.div.arch))
            best = std::max(best, r->get_d());
        else
            best = std::max(best, num.to_double() / d0.div.arch.to_double());
    }
    return best;
}

// deg(E) = sum e_p log p + arch/2; exact, so principal divisors give a
// formal zero (the product formula)
inline LogReal arithmetic_degree(const ArithDivisor& e) {
    LogReal out;
    for (const auto& [p, c] : e.interior) out += LogReal::log_prime(p, mpq_class(c));
    for (const auto& [p, c] : e.boundary) out += LogReal::log_prime(p, c);
    out += mpq_class(1, 2) * e.arch;
    return out;
}

// div(f) with the convention arch = -2 log |f|, so arithmetic_degree is 0
inline ArithDivisor principal_divisor(const mpq_class& f_in, const OpenModel& model) {
    mpq_class f = f_in;
    f.canonicalize();
    if (f == 0) throw InputError("principal_divisor: zero function");
    ArithDivisor out(model);
    mpz_class num = abs(f.get_num()), den = f.get_den();
    for (const auto& [p, e] : factor_integer(num)) {
        if (model.on_boundary(p))
            out.set_boundary(p, mpq_class(static_cast<long>(e)));
        else
            out.set_interior(p, mpz_class(static_cast<long>(e)));
    }
    for (const auto& [p, e] : factor_integer(den)) {
        if (model.on_boundary(p))
            out.set_boundary(p, mpq_class(-static_cast<long>(e)));
        else
            out.set_interior(p, mpz_class(-static_cast<long>(e)));
    }
    out.arch = mpq_class(-2) * LogReal::log_rational(abs(f));
    return out;
}

// canonical Picard-class representative: no interior part, boundary
// coefficients in [0,1), arch free
struct PicClass {
    OpenModel model;
    std::map<mpz_class, mpq_class> boundary;
    LogReal arch;

    friend bool operator==(const PicClass& a, const PicClass& b) {
        return a.model == b.model && a.boundary == b.boundary && a.arch == b.arch;
    }
};

// reduce modulo principal divisors of products of primes; the degree is
// preserved exactly and the result is a transversal of the lattice action
inline PicClass pic_reduce(const ArithDivisor& e) {
    PicClass out;
    out.model = e.model;
    out.arch = e.arch;
    for (const auto& [p, c] : e.interior) {
        // subtract div(p^c): clears the coefficient, arch gains 2 c log p
        out.arch += LogReal::log_prime(p, mpq_class(2 * c));
    }
    for (const auto& [p, c] : e.boundary) {
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), c.get_num().get_mpz_t(), c.get_den().get_mpz_t());
        mpq_class frac = c - mpq_class(fl);
        frac.canonicalize();
        if (frac != 0) out.boundary[p] = frac;
        out.arch += LogReal::log_prime(p, mpq_class(2 * fl));
    }
    return out;
}

inline ArithDivisor pic_representative(const PicClass& c) {
    ArithDivisor out(c.model);
    out.boundary = c.boundary;
    out.arch = c.arch;
    return out;
}

struct CauchyLimit {
    bool cauchy = false;
    ArithDivisor limit;
    long bad_i = -1, bad_j = -1; // indices of the violating pair when !cauchy
    std::string reason;
};

namespace detail {

// exact limit of the last three terms of a geometrically converging
// coordinate; nullopt when the tail is not certifiably geometric
inline std::optional<mpq_class> geometric_limit_q(const std::vector<mpq_class>& xs) {
    size_t n = xs.size();
    bool constant = true;
    for (size_t i = 1; i < n; ++i) constant &= xs[i] == xs[0];
    if (constant) return xs[0];
    mpq_class d1 = xs[n - 2] - xs[n - 3], d2 = xs[n - 1] - xs[n - 2];
    if (d2 == 0) return xs[n - 1];
    if (d1 == 0) return std::nullopt;
    mpq_class r = d2 / d1;
    r.canonicalize();
    if (abs(r) >= 1) return std::nullopt;
    mpq_class lim = xs[n - 1] + d2 * r / (1 - r);
    lim.canonicalize();
    return lim;
}

inline std::optional<LogReal> geometric_limit_log(const std::vector<LogReal>& xs) {
    size_t n = xs.size();
    bool constant = true;
    for (size_t i = 1; i < n; ++i) constant &= xs[i] == xs[0];
    if (constant) return xs[0];
    LogReal d1 = xs[n - 2] - xs[n - 3], d2 = xs[n - 1] - xs[n - 2];
    if (d2.is_formal_zero()) return xs[n - 1];
    if (d1.is_formal_zero()) return std::nullopt;
    auto r = exact_ratio(d2, d1);
    if (!r) return std::nullopt;
    mpq_class rr = *r;
    if (abs(rr) >= 1) return std::nullopt;
    return xs[n - 1] + (rr / (1 - rr)) * d2;
}

} // namespace detail

// limit of a Cauchy sequence in the completion. Certification is explicit:
// gaps must strictly shrink and each coordinate must end in an exactly
// geometric (or constant) tail; anything else yields a not-Cauchy verdict.
inline CauchyLimit cauchy_limit(const std::vector<ArithDivisor>& seq,
                                const BoundaryDivisor& d0) {
    if (seq.empty()) throw InputError("cauchy_limit: empty sequence");
    for (const auto& e : seq)
        if (!(e.model == d0.div.model)) throw InputError("cauchy_limit: mixed models");
    CauchyLimit out;
    out.limit = seq.back();
    if (seq.size() == 1) {
        out.cauchy = true;
        return out;
    }
    for (size_t i = 0; i + 1 < seq.size(); ++i) {
        if (seq[i].interior != seq[i + 1].interior) {
            out.bad_i = long(i);
            out.bad_j = long(i + 1);
            out.reason = "interior coefficients are not eventually constant";
            return out;
        }
    }
    std::vector<double> gaps;
    for (size_t i = 0; i + 1 < seq.size(); ++i)
        gaps.push_back(boundary_norm(seq[i + 1] - seq[i], d0));
    for (size_t i = 0; i + 1 < gaps.size(); ++i) {
        if (gaps[i + 1] > 0 && gaps[i + 1] >= gaps[i]) {
            out.bad_i = long(i + 1);
            out.bad_j = long(i + 2);
            out.reason = "gap did not shrink";
            return out;
        }
    }
    bool constant = true;
    for (const auto& e : seq) constant &= e == seq[0];
    if (constant) {
        out.cauchy = true;
        return out;
    }
    if (seq.size() < 3) {
        out.bad_i = 0;
        out.bad_j = 1;
        out.reason = "too few terms to certify a limit";
        return out;
    }

    ArithDivisor lim(seq[0].model);
    lim.interior = seq[0].interior;
    std::set<mpz_class> support;
    for (const auto& e : seq)
        for (const auto& [p, c] : e.boundary) support.insert(p);
    size_t n = seq.size();
    for (const auto& p : support) {
        std::vector<mpq_class> xs;
        for (const auto& e : seq) {
            auto it = e.boundary.find(p);
            xs.push_back(it == e.boundary.end() ? mpq_class(0) : it->second);
        }
        auto l = detail::geometric_limit_q(xs);
        if (!l) {
            out.bad_i = long(n - 2);
            out.bad_j = long(n - 1);
            out.reason = "no certified geometric tail at prime " + p.get_str();
            return out;
        }
        if (*l != 0) lim.boundary[p] = *l;
    }
    std::vector<LogReal> as;
    for (const auto& e : seq) as.push_back(e.arch);
    auto la = detail::geometric_limit_log(as);
    if (!la) {
        out.bad_i = long(n - 2);
        out.bad_j = long(n - 1);
        out.reason = "no certified geometric tail at the archimedean place";
        return out;
    }
    lim.arch = *la;
    out.cauchy = true;
    out.limit = lim;
    return out;
}

} // namespace adelheight
