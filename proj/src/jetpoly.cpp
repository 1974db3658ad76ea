#include "liesym/jetpoly.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace liesym {

JetPolynomial JetPolynomial::zero(int n_coords) { return JetPolynomial(n_coords); }

JetPolynomial JetPolynomial::constant(int n_coords, const Rational& c) {
    JetPolynomial p(n_coords);
    p.add_term(Monomial(n_coords, 0), c);
    return p;
}

JetPolynomial JetPolynomial::coordinate(int n_coords, int idx) {
    if (idx < 0 || idx >= n_coords) throw std::out_of_range("coordinate: index");
    JetPolynomial p(n_coords);
    Monomial mono(n_coords, 0);
    mono[idx] = 1;
    p.add_term(mono, Rational(1));
    return p;
}

void JetPolynomial::add_term(const Monomial& mono, const Rational& c) {
    if (static_cast<int>(mono.size()) != n_) {
        throw std::invalid_argument("add_term: monomial length mismatch");
    }
    if (c == Rational(0)) return;
    auto it = terms_.find(mono);
    if (it == terms_.end()) {
        terms_.emplace(mono, c);
    } else {
        it->second += c;
        if (it->second == Rational(0)) terms_.erase(it);
    }
}

JetPolynomial& JetPolynomial::operator+=(const JetPolynomial& o) {
    if (o.n_ != n_) throw std::invalid_argument("operator+=: ring mismatch");
    for (const auto& [mono, c] : o.terms_) add_term(mono, c);
    return *this;
}

JetPolynomial JetPolynomial::operator+(const JetPolynomial& o) const {
    JetPolynomial r = *this;
    r += o;
    return r;
}

JetPolynomial JetPolynomial::operator-(const JetPolynomial& o) const {
    JetPolynomial r = *this;
    r += o.scaled(Rational(-1));
    return r;
}

JetPolynomial JetPolynomial::scaled(const Rational& c) const {
    JetPolynomial r(n_);
    if (c == Rational(0)) return r;
    for (const auto& [mono, coeff] : terms_) r.terms_.emplace(mono, coeff * c);
    return r;
}

JetPolynomial JetPolynomial::times_coordinate(int idx) const {
    if (idx < 0 || idx >= n_) throw std::out_of_range("times_coordinate: index");
    JetPolynomial r(n_);
    for (const auto& [mono, coeff] : terms_) {
        Monomial m2 = mono;
        m2[idx] += 1;
        r.terms_.emplace(std::move(m2), coeff);
    }
    return r;
}

JetPolynomial JetPolynomial::partial(int idx) const {
    if (idx < 0 || idx >= n_) throw std::out_of_range("partial: index");
    JetPolynomial r(n_);
    for (const auto& [mono, coeff] : terms_) {
        if (mono[idx] == 0) continue;
        Monomial m2 = mono;
        const int e = m2[idx];
        m2[idx] -= 1;
        r.add_term(m2, coeff * Rational(e));
    }
    return r;
}

bool JetPolynomial::touches_coordinates_from(int from) const {
    for (const auto& [mono, coeff] : terms_) {
        for (int i = from; i < n_; ++i) {
            if (mono[i] != 0) return true;
        }
    }
    return false;
}

JetPolynomial JetPolynomial::resized(int new_n) const {
    JetPolynomial r(new_n);
    for (const auto& [mono, coeff] : terms_) {
        Monomial m2(new_n, 0);
        for (int i = 0; i < n_; ++i) {
            if (mono[i] == 0) continue;
            if (i >= new_n) {
                throw std::logic_error("resized: term touches removed coordinate");
            }
            m2[i] = mono[i];
        }
        r.terms_.emplace(std::move(m2), coeff);
    }
    return r;
}

double JetPolynomial::eval(const Eigen::VectorXd& z) const {
    if (z.size() != n_) throw std::invalid_argument("eval: point dimension mismatch");
    double sum = 0.0;
    for (const auto& [mono, coeff] : terms_) {
        double term = to_double(coeff);
        for (int i = 0; i < n_; ++i) {
            for (int e = 0; e < mono[i]; ++e) term *= z[i];
        }
        sum += term;
    }
    return sum;
}

bool JetPolynomial::operator==(const JetPolynomial& o) const {
    return n_ == o.n_ && terms_ == o.terms_;
}

std::string JetPolynomial::to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mono, coeff] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << coeff.numerator();
        if (coeff.denominator() != 1) os << "/" << coeff.denominator();
        for (int i = 0; i < n_; ++i) {
            if (mono[i] == 0) continue;
            os << " * " << (i < static_cast<int>(names.size()) ? names[i]
                                                               : "z" + std::to_string(i));
            if (mono[i] > 1) os << "^" << mono[i];
        }
    }
    return os.str();
}

}  // namespace liesym
