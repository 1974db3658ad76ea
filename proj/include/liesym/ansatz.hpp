#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "liesym/jetpoly.hpp"
#include "liesym/jetspace.hpp"

namespace liesym {

// Shared polynomial basis psi for every generator component. Monomials range
// over the true independent variables and the dependents only, graded-lex,
// total degree <= degree. kappa = C(degree + n + m, n + m); K = kappa*(n+m).
struct AnsatzBasis {
    int n = 1;       // true independent variables entering the ansatz
    int m = 1;       // dependent variables
    int degree = 1;  // maximum total degree
    std::vector<MultiIndex> monomials;  // exponent vectors over (x_1..x_n, u_1..u_m)

    int kappa() const { return static_cast<int>(monomials.size()); }
    int K() const { return kappa() * (n + m); }
    // Column of coefficient c_{slot,j}: slot-major (xi_1.., then eta_1..).
    int column(int slot, int monomial_idx) const { return slot * kappa() + monomial_idx; }
};

AnsatzBasis monomial_ansatz(int n, int m, int degree);
// Overload taking a classical layout (layout.d = true independents).
AnsatzBasis monomial_ansatz(const JetLayout& layout, int degree);

// Total derivative D_i f = df/dx_i + sum_{b,J} u_{b,J+e_i} * df/du_{b,J}.
// `f` is indexed over the level-(layout.p) coordinate ring. Throws if the
// result would need coordinates of order layout.p + 1 (extend layout.p to
// opt into a larger ring).
JetPolynomial total_derivative(const JetPolynomial& f, int i, const JetLayout& layout);

// The D_p x K matrix-valued prolonged ansatz: entry (row, col) is the
// coefficient polynomial of basis field `col` in jet coordinate `row`.
struct ProlongedAnsatz {
    JetLayout layout;  // classical layout; rows indexed by its level-p ordering
    AnsatzBasis basis;
    std::vector<std::vector<JetPolynomial>> entries;  // [D_p][K]

    int rows() const { return static_cast<int>(entries.size()); }
    int cols() const { return basis.K(); }
};

// Prolongation of every basis vector field through order layout.p via
//   eta_{b,J} = D_J(eta_b - sum_k xi_k u_{b,e_k}) + sum_k xi_k u_{b,J+e_k},
// with D_J composed in fixed axis order. Computed over an extended ring one
// order higher; the top-order cancellation is asserted exactly.
ProlongedAnsatz prolong_ansatz(const AnsatzBasis& basis, const JetLayout& layout);

// Numeric evaluation at a level-p jet point (this is L~_i on estimated data).
Eigen::MatrixXd evaluate_prolonged(const ProlongedAnsatz& lp, const JetPoint& z);

// Human-readable generator sum(xi_i d/dx_i) + sum(eta_b d/du_b) for a unit
// coefficient vector; coefficients below `threshold` are suppressed.
std::string render_generator(const Eigen::VectorXd& c, const AnsatzBasis& basis,
                             std::vector<std::string> var_names = {},
                             double threshold = 1e-8);

// Text dump of all entries, one polynomial per line, for diffing.
std::string dump_prolonged(const ProlongedAnsatz& lp);

}  // namespace liesym
