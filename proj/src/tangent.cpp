#include "liesym/tangent.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace liesym {

std::vector<MultiIndex> chart_monomial_basis(int d, int ell) {
    if (d < 1 || ell < 0) throw std::invalid_argument("chart_monomial_basis: bad d/ell");
    std::vector<MultiIndex> basis;
    for (int deg = 0; deg <= ell; ++deg) {
        for (auto& e : multi_indices(d, deg)) basis.push_back(std::move(e));
    }
    return basis;
}

Eigen::VectorXd chart_monomial_values(const std::vector<MultiIndex>& basis,
                                      const Eigen::VectorXd& tau) {
    Eigen::VectorXd out(static_cast<long long>(basis.size()));
    for (std::size_t y = 0; y < basis.size(); ++y) {
        double v = 1.0;
        for (std::size_t l = 0; l < basis[y].size(); ++l) {
            for (int rep = 0; rep < basis[y][l]; ++rep) v *= tau[static_cast<long long>(l)];
        }
        out[static_cast<long long>(y)] = v;
    }
    return out;
}

TangentFrame svd_frame(const Eigen::MatrixXd& points, const NeighborTable& table, int i,
                       int d) {
    const long long D = points.cols();
    if (d < 1 || d > D) throw std::invalid_argument("svd_frame: d out of range");
    if (i < 0 || i >= table.indices.rows()) throw std::out_of_range("svd_frame: index");

    Eigen::MatrixXd M(D, table.k);  // columns are neighbor differences
    for (int w = 0; w < table.k; ++w) {
        M.col(w) = (points.row(table.indices(i, w)) - points.row(i)).transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);

    TangentFrame frame;
    frame.base_index = i;
    frame.T = svd.matrixU().leftCols(d);
    frame.Nrm = svd.matrixU().rightCols(D - d);
    frame.singular_values = svd.singularValues();
    const long long nsv = frame.singular_values.size();
    const double s1 = nsv > 0 ? frame.singular_values[0] : 0.0;
    const double sd = d <= nsv ? frame.singular_values[d - 1] : 0.0;
    frame.degenerate = sd <= 1e-12 * s1;
    return frame;
}

LocalChart fit_chart(const TangentFrame& frame, const Eigen::MatrixXd& points,
                     const NeighborTable& table, int i, const GmlsParams& params) {
    const long long D = points.cols();
    const int d = static_cast<int>(frame.T.cols());
    LocalChart chart;
    chart.degree = params.degree;
    chart.d = d;
    chart.basis = chart_monomial_basis(d, params.degree);
    const long long Y = static_cast<long long>(chart.basis.size());
    if (table.k < Y) {
        throw std::invalid_argument("fit_chart: stencil size k=" + std::to_string(table.k) +
                                    " is below the polynomial basis size Y=" +
                                    std::to_string(Y));
    }

    Eigen::MatrixXd Xi(table.k, Y);
    Eigen::MatrixXd S(table.k, D - d);
    for (int w = 0; w < table.k; ++w) {
        const Eigen::VectorXd diff =
            (points.row(table.indices(i, w)) - points.row(i)).transpose();
        Xi.row(w) = chart_monomial_values(chart.basis, frame.T.transpose() * diff);
        S.row(w) = (frame.Nrm.transpose() * diff).transpose();
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xi);
    if (qr.rank() < Y) {
        throw std::runtime_error("fit_chart: rank-deficient polynomial system at point " +
                                 std::to_string(i) + " (rank " + std::to_string(qr.rank()) +
                                 " < " + std::to_string(Y) + ")");
    }
    chart.B = qr.solve(S);
    chart.residual = (Xi * chart.B - S).norm();
    return chart;
}

Eigen::MatrixXd chart_jacobian(const LocalChart& chart, const Eigen::VectorXd& tau) {
    const long long codim = chart.B.cols();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(codim, chart.d);
    for (std::size_t y = 0; y < chart.basis.size(); ++y) {
        const MultiIndex& e = chart.basis[y];
        for (int l = 0; l < chart.d; ++l) {
            if (e[l] == 0) continue;
            double v = static_cast<double>(e[l]);
            for (int a = 0; a < chart.d; ++a) {
                const int pow = a == l ? e[a] - 1 : e[a];
                for (int rep = 0; rep < pow; ++rep) v *= tau[a];
            }
            J.col(l) += v * chart.B.row(static_cast<long long>(y)).transpose();
        }
    }
    return J;
}

GmlsResult gmls_refine(const Eigen::MatrixXd& points, const NeighborTable& table, int i,
                       int d, const GmlsParams& params) {
    GmlsResult result;
    result.frame = svd_frame(points, table, i, d);
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(d);

    for (int it = 1; it <= params.max_iter; ++it) {
        result.chart = fit_chart(result.frame, points, table, i, params);
        result.iterations = it;
        const Eigen::MatrixXd G = chart_jacobian(result.chart, origin);
        const double gnorm =
            G.size() == 0 ? 0.0 : Eigen::JacobiSVD<Eigen::MatrixXd>(G).singularValues()[0];
        if (gnorm <= params.stop_tol) {
            result.converged = true;
            return result;
        }
        if (it == params.max_iter) break;  // keep the chart consistent with the frame

        // Rotate the frame toward the graph tangent of the current chart.
        const Eigen::MatrixXd raw = result.frame.T + result.frame.Nrm * G;
        Eigen::HouseholderQR<Eigen::MatrixXd> thin(raw);
        const Eigen::MatrixXd Tnew =
            thin.householderQ() * Eigen::MatrixXd::Identity(points.cols(), d);
        Eigen::HouseholderQR<Eigen::MatrixXd> full(Tnew);
        const Eigen::MatrixXd Q =
            full.householderQ() * Eigen::MatrixXd::Identity(points.cols(), points.cols());
        result.frame.T = Tnew;
        result.frame.Nrm = Q.rightCols(points.cols() - d);
    }
    result.converged = false;
    return result;
}

}  // namespace liesym
