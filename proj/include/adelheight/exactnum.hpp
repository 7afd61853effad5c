#pragma once

// Exact numeric substrate: arbitrary-precision integers/rationals, integer
// polynomials and forms, resultants, factorization, certified root finding.

#include <gmpxx.h>

#include <string>

#include "adelheight/bigfloat.hpp"
#include "adelheight/binform.hpp"
#include "adelheight/errors.hpp"
#include "adelheight/intpoly.hpp"
#include "adelheight/logreal.hpp"
#include "adelheight/primes.hpp"
#include "adelheight/roots.hpp"

namespace adelheight {

using Integer = mpz_class;
using Rational = mpq_class;

// parses "a", "a/b", decimal "0.25"; always reduced, denominator > 0
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw InputError("parse_rational: empty string");
    auto dot = s.find('.');
    try {
        if (dot != std::string::npos) {
            // explicit base 10: the default base 0 would read "025" as octal
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            mpz_class num(digits, 10);
            mpz_class den = 1;
            for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
            Rational r(num, den);
            r.canonicalize();
            return r;
        }
        Rational r(s, 10);
        if (r.get_den() == 0) throw InputError("parse_rational: zero denominator in " + s);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw InputError("parse_rational: cannot parse '" + s + "'");
    }
}

} // namespace adelheight
