#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "liesym/rational.hpp"

namespace liesym {

// Exponent vector over the coordinates of a jet space at a fixed level.
using Monomial = std::vector<int>;

// Sparse multivariate polynomial over jet coordinates with exact rational
// coefficients. Zero coefficients are never stored; the term order is the
// lexicographic order on exponent vectors (canonical and deterministic).
class JetPolynomial {
  public:
    JetPolynomial() = default;
    explicit JetPolynomial(int n_coords) : n_(n_coords) {}

    static JetPolynomial zero(int n_coords);
    static JetPolynomial constant(int n_coords, const Rational& c);
    static JetPolynomial coordinate(int n_coords, int idx);

    int n_coords() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Monomial, Rational>& terms() const { return terms_; }

    void add_term(const Monomial& mono, const Rational& c);

    JetPolynomial& operator+=(const JetPolynomial& o);
    JetPolynomial operator+(const JetPolynomial& o) const;
    JetPolynomial operator-(const JetPolynomial& o) const;
    JetPolynomial scaled(const Rational& c) const;
    // Multiply by the coordinate with the given index.
    JetPolynomial times_coordinate(int idx) const;
    // Partial derivative with respect to the coordinate with the given index.
    JetPolynomial partial(int idx) const;

    // True if any term has a nonzero exponent on a coordinate index >= from.
    bool touches_coordinates_from(int from) const;

    // Re-embed into a coordinate space of different size. Growing pads
    // exponent vectors with zeros; shrinking requires that no term touches
    // the removed coordinates.
    JetPolynomial resized(int new_n) const;

    double eval(const Eigen::VectorXd& z) const;

    bool operator==(const JetPolynomial& o) const;
    bool operator!=(const JetPolynomial& o) const { return !(*this == o); }

    // Rendering for diagnostics/dumps: "c * name^e * ..." terms joined by " + ".
    std::string to_string(const std::vector<std::string>& names) const;

  private:
    int n_ = 0;
    std::map<Monomial, Rational> terms_;
};

}  // namespace liesym
