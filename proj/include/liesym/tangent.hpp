#pragma once

#include <vector>

#include <Eigen/Core>

#include "liesym/jetspace.hpp"
#include "liesym/neighbors.hpp"

namespace liesym {

// Orthonormal tangent/normal frame at one cloud point.
struct TangentFrame {
    Eigen::MatrixXd T;    // D x d
    Eigen::MatrixXd Nrm;  // D x (D-d)
    int base_index = 0;
    Eigen::VectorXd singular_values;  // of the neighbor-difference matrix
    bool degenerate = false;          // sigma_d below the rank tolerance
};

// Intrinsic polynomial chart s = pi(tau) fitted over a frame: B is Y x (D-d),
// rows aligned with the graded-lex monomials of degree <= `degree` in d
// tangent coordinates; Y = C(degree + d, d).
struct LocalChart {
    Eigen::MatrixXd B;
    int degree = 0;
    int d = 0;
    std::vector<MultiIndex> basis;  // monomial exponents, graded-lex
    double residual = 0.0;          // Frobenius norm of the LSQ residual
};

struct GmlsParams {
    int k = 10;             // stencil size (nearest neighbors, self included)
    int degree = 2;         // polynomial degree l
    double stop_tol = 1e-12;  // ||Dpi(0)||_2 stopping threshold
    int max_iter = 20;
};

// Graded-lex monomial exponents of degree <= ell over d variables.
std::vector<MultiIndex> chart_monomial_basis(int d, int ell);
// Evaluate all basis monomials at tau.
Eigen::VectorXd chart_monomial_values(const std::vector<MultiIndex>& basis,
                                      const Eigen::VectorXd& tau);

// First d left singular vectors of the neighbor-difference matrix as T, the
// rest as Nrm. Flags the frame degenerate when sigma_d <= 1e-12 * sigma_1.
TangentFrame svd_frame(const Eigen::MatrixXd& points, const NeighborTable& table,
                       int i, int d);

// Unweighted least-squares chart over the frame. Requires k >= Y; throws on a
// rank-deficient Vandermonde matrix, naming the stencil.
LocalChart fit_chart(const TangentFrame& frame, const Eigen::MatrixXd& points,
                     const NeighborTable& table, int i, const GmlsParams& params);

// Analytic Jacobian Dpi(tau), shape (D-d) x d.
Eigen::MatrixXd chart_jacobian(const LocalChart& chart, const Eigen::VectorXd& tau);

struct GmlsResult {
    TangentFrame frame;
    LocalChart chart;  // fitted in the returned frame
    int iterations = 0;
    bool converged = false;
};

// Iterated GMLS frame refinement: fit, stop when ||Dpi(0)||_2 <= stop_tol,
// else re-orthonormalize [T + Nrm*Dpi(0)] and repeat (warning flag when the
// iteration cap is reached).
GmlsResult gmls_refine(const Eigen::MatrixXd& points, const NeighborTable& table,
                       int i, int d, const GmlsParams& params);

}  // namespace liesym
