#include "liesym/ansatz.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace liesym {

AnsatzBasis monomial_ansatz(int n, int m, int degree) {
    if (n < 1 || m < 1) throw std::invalid_argument("monomial_ansatz: n, m must be >= 1");
    if (degree < 0) throw std::invalid_argument("monomial_ansatz: degree must be >= 0");
    AnsatzBasis basis;
    basis.n = n;
    basis.m = m;
    basis.degree = degree;
    for (int deg = 0; deg <= degree; ++deg) {
        for (auto& mono : multi_indices(n + m, deg)) {
            basis.monomials.push_back(std::move(mono));
        }
    }
    return basis;
}

AnsatzBasis monomial_ansatz(const JetLayout& layout, int degree) {
    return monomial_ansatz(layout.d, layout.m, degree);
}

JetPolynomial total_derivative(const JetPolynomial& f, int i, const JetLayout& layout) {
    if (i < 0 || i >= layout.d) throw std::out_of_range("total_derivative: axis index");
    const long long ring = layout.jet_dimension(layout.p);
    if (f.n_coords() != ring) {
        throw std::invalid_argument("total_derivative: polynomial ring does not match layout");
    }
    JetPolynomial out = f.partial(layout.x_offset(i));
    for (int c = layout.d; c < ring; ++c) {
        JetPolynomial df = f.partial(c);
        if (df.is_zero()) continue;
        auto [b, J] = layout.offset_to_pair(c);
        MultiIndex J2 = J;
        J2[i] += 1;
        if (order_of(J2) > layout.p) {
            throw std::runtime_error(
                "total_derivative: order overflow (result needs coordinates of order " +
                std::to_string(order_of(J2)) + "; extend the layout order to opt in)");
        }
        out += df.times_coordinate(layout.coordinate_offset(b, J2));
    }
    return out;
}

namespace {

// The ansatz monomial psi_j as a polynomial in the given jet-coordinate ring.
JetPolynomial psi_poly(const AnsatzBasis& basis, int j, const JetLayout& ring_layout) {
    const long long ring = ring_layout.jet_dimension(ring_layout.p);
    JetPolynomial p(static_cast<int>(ring));
    Monomial mono(static_cast<int>(ring), 0);
    const MultiIndex& e = basis.monomials[j];
    for (int v = 0; v < basis.n; ++v) mono[ring_layout.x_offset(v)] = e[v];
    for (int b = 0; b < basis.m; ++b) {
        mono[ring_layout.coordinate_offset(b, MultiIndex(ring_layout.d, 0))] =
            e[basis.n + b];
    }
    p.add_term(mono, Rational(1));
    return p;
}

// D_J as a composition of first-order total derivatives in fixed axis order.
JetPolynomial apply_DJ(JetPolynomial f, const MultiIndex& J, const JetLayout& layout) {
    for (int axis = 0; axis < static_cast<int>(J.size()); ++axis) {
        for (int rep = 0; rep < J[axis]; ++rep) {
            f = total_derivative(f, axis, layout);
        }
    }
    return f;
}

}  // namespace

ProlongedAnsatz prolong_ansatz(const AnsatzBasis& basis, const JetLayout& layout) {
    if (layout.d != basis.n || layout.m != basis.m) {
        throw std::invalid_argument("prolong_ansatz: ansatz does not match layout");
    }
    const int n = basis.n;
    const int m = basis.m;
    const int p = layout.p;
    JetLayout ext{n, m, p + 1};
    const int ring = static_cast<int>(ext.jet_dimension(p + 1));
    const int Dp = static_cast<int>(layout.jet_dimension(p));

    ProlongedAnsatz lp;
    lp.layout = layout;
    lp.basis = basis;
    lp.entries.assign(Dp, std::vector<JetPolynomial>(basis.K(), JetPolynomial(Dp)));

    for (int slot = 0; slot < n + m; ++slot) {
        for (int j = 0; j < basis.kappa(); ++j) {
            const int col = basis.column(slot, j);
            const JetPolynomial psi = psi_poly(basis, j, ext);

            // Base block rows: xi_i and eta_b of this basis field.
            if (slot < n) {
                lp.entries[layout.x_offset(slot)][col] = psi.resized(Dp);
            } else {
                const int b0 = slot - n;
                lp.entries[layout.coordinate_offset(b0, MultiIndex(n, 0))][col] =
                    psi.resized(Dp);
            }

            // Jet rows eta_{b,J} = D_J(eta_b - sum_k xi_k u_{b,e_k})
            //                      + sum_k xi_k u_{b,J+e_k}.
            for (int b = 0; b < m; ++b) {
                JetPolynomial base(ring);
                if (slot < n) {
                    MultiIndex e_s(n, 0);
                    e_s[slot] = 1;
                    base = psi.times_coordinate(ext.coordinate_offset(b, e_s))
                               .scaled(Rational(-1));
                } else if (slot - n == b) {
                    base = psi;
                }
                if (base.is_zero() && slot >= n) continue;
                for (int k = 1; k <= p; ++k) {
                    for (const auto& J : multi_indices(n, k)) {
                        JetPolynomial eta = apply_DJ(base, J, ext);
                        if (slot < n) {
                            MultiIndex J2 = J;
                            J2[slot] += 1;
                            eta += psi.times_coordinate(ext.coordinate_offset(b, J2));
                        }
                        if (eta.touches_coordinates_from(
                                static_cast<int>(ext.jet_dimension(p)))) {
                            throw std::logic_error(
                                "prolong_ansatz: top-order cancellation failed");
                        }
                        lp.entries[layout.coordinate_offset(b, J)][col] = eta.resized(Dp);
                    }
                }
            }
        }
    }
    return lp;
}

Eigen::MatrixXd evaluate_prolonged(const ProlongedAnsatz& lp, const JetPoint& z) {
    if (z.size() != lp.rows()) {
        throw std::invalid_argument("evaluate_prolonged: point dimension mismatch");
    }
    Eigen::MatrixXd out(lp.rows(), lp.cols());
    for (int r = 0; r < lp.rows(); ++r) {
        for (int c = 0; c < lp.cols(); ++c) {
            out(r, c) = lp.entries[r][c].eval(z);
        }
    }
    return out;
}

namespace {

std::string format_coeff(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

std::string monomial_text(const MultiIndex& e, const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!s.empty()) s += " ";
        s += names[i];
        if (e[i] > 1) s += "^" + std::to_string(e[i]);
    }
    return s;
}

}  // namespace

std::string render_generator(const Eigen::VectorXd& c, const AnsatzBasis& basis,
                             std::vector<std::string> var_names, double threshold) {
    if (c.size() != basis.K()) {
        throw std::invalid_argument("render_generator: coefficient length mismatch");
    }
    if (var_names.empty()) {
        if (basis.n == 1) {
            var_names.push_back("x");
        } else {
            for (int i = 0; i < basis.n; ++i) var_names.push_back("x" + std::to_string(i + 1));
        }
        if (basis.m == 1) {
            var_names.push_back("u");
        } else {
            for (int b = 0; b < basis.m; ++b) var_names.push_back("u" + std::to_string(b + 1));
        }
    }
    if (static_cast<int>(var_names.size()) != basis.n + basis.m) {
        throw std::invalid_argument("render_generator: need n + m variable names");
    }

    std::string out;
    for (int slot = 0; slot < basis.n + basis.m; ++slot) {
        // Collect the visible terms of this component.
        std::vector<std::pair<double, std::string>> terms;
        for (int j = 0; j < basis.kappa(); ++j) {
            const double coef = c[basis.column(slot, j)];
            if (std::abs(coef) < threshold) continue;
            terms.emplace_back(coef, monomial_text(basis.monomials[j], var_names));
        }
        if (terms.empty()) continue;

        std::string comp;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            auto [coef, mono] = terms[t];
            std::string piece;
            const bool unit = std::abs(std::abs(coef) - 1.0) < 1e-12 && !mono.empty();
            if (unit) {
                piece = (coef < 0 ? "-" : "") + mono;
            } else {
                piece = format_coeff(coef);
                if (!mono.empty()) piece += " " + mono;
            }
            if (t == 0) {
                comp = piece;
            } else if (!piece.empty() && piece[0] == '-') {
                comp += " - " + piece.substr(1);
            } else {
                comp += " + " + piece;
            }
        }
        if (terms.size() > 1) comp = "(" + comp + ")";
        if (comp == "1") comp.clear();
        if (comp == "-1") comp = "-";

        const std::string partial = "∂" + var_names[slot];
        std::string piece = comp.empty() ? partial
                          : (comp == "-" ? "-" + partial : comp + " " + partial);
        if (out.empty()) {
            out = piece;
        } else if (!piece.empty() && piece[0] == '-') {
            out += " - " + piece.substr(1);
        } else {
            out += " + " + piece;
        }
    }
    return out.empty() ? "0" : out;
}

std::string dump_prolonged(const ProlongedAnsatz& lp) {
    const auto names = lp.layout.coordinate_names(lp.layout.p);
    std::ostringstream os;
    for (int r = 0; r < lp.rows(); ++r) {
        for (int c = 0; c < lp.cols(); ++c) {
            os << names[r] << " | c" << c << " : " << lp.entries[r][c].to_string(names)
               << "\n";
        }
    }
    return os.str();
}

}  // namespace liesym
