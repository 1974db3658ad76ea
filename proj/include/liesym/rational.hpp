#pragma once

#include <boost/rational.hpp>

namespace liesym {

// Exact rational coefficients for the symbolic jet-polynomial engine.
using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) {
    return boost::rational_cast<double>(r);
}

}  // namespace liesym
