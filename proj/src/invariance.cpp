#include "liesym/invariance.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "liesym/threading.hpp"

namespace liesym {

NormalBundle normals(const PointCloud& jet_cloud, const GmlsParams& params,
                     const ProlongOptions& options) {
    const long long N = jet_cloud.N();
    const long long D = jet_cloud.D();
    const int d = jet_cloud.intrinsic_d;
    if (d >= D) {
        throw std::invalid_argument("normals: cloud has no normal directions");
    }
    const long long Y = static_cast<long long>(chart_monomial_basis(d, params.degree).size());
    if (params.k < Y) {
        throw std::invalid_argument("normals: stencil size k=" + std::to_string(params.k) +
                                    " is below the polynomial basis size Y=" +
                                    std::to_string(Y));
    }
    if (params.k > N) {
        throw std::invalid_argument("normals: stencil size exceeds the cloud size");
    }

    const NeighborTable table = knn(jet_cloud.data, params.k);

    NormalBundle bundle;
    bundle.codim = static_cast<int>(D) - d;
    bundle.diagnostics.resize(static_cast<std::size_t>(N));
    std::vector<Eigen::MatrixXd> frames(static_cast<std::size_t>(N));

    parallel_for(static_cast<std::size_t>(N), options.threads, [&](std::size_t i) {
        PointDiagnostics& pd = bundle.diagnostics[i];
        try {
            const GmlsResult g =
                gmls_refine(jet_cloud.data, table, static_cast<int>(i), d, params);
            pd.gmls_iterations = g.iterations;
            pd.converged = g.converged;
            if (g.frame.degenerate) {
                pd.dropped = true;
                return;
            }
            frames[i] = g.frame.Nrm;
        } catch (const std::runtime_error&) {
            pd.dropped = true;
        }
    });

    int dropped = 0;
    for (long long i = 0; i < N; ++i) {
        if (bundle.diagnostics[static_cast<std::size_t>(i)].dropped) {
            ++dropped;
        } else {
            bundle.kept.push_back(static_cast<int>(i));
            bundle.S.push_back(std::move(frames[static_cast<std::size_t>(i)]));
        }
    }
    if (dropped > options.max_drop_fraction * static_cast<double>(N)) {
        throw std::runtime_error("normals: dropped " + std::to_string(dropped) + " of " +
                                 std::to_string(N) + " points (exceeds the " +
                                 std::to_string(options.max_drop_fraction) + " budget)");
    }
    return bundle;
}

Eigen::MatrixXd pointwise_block(const Eigen::MatrixXd& Li, const Eigen::MatrixXd& Si) {
    if (Li.rows() != Si.rows()) {
        throw std::invalid_argument("pointwise_block: row mismatch between L and S");
    }
    return Li.transpose() * Si;
}

StackedSystem assemble(const std::vector<Eigen::MatrixXd>& blocks) {
    if (blocks.empty()) throw std::invalid_argument("assemble: no blocks");
    const long long K = blocks.front().rows();
    long long total = 0;
    for (const auto& b : blocks) {
        if (b.rows() != K) throw std::invalid_argument("assemble: inconsistent block height");
        total += b.cols();
    }
    StackedSystem sys;
    sys.P.resize(K, total);
    long long at = 0;
    for (const auto& b : blocks) {
        sys.offsets.push_back(static_cast<int>(at));
        sys.P.middleCols(at, b.cols()) = b;
        at += b.cols();
    }
    sys.offsets.push_back(static_cast<int>(at));
    return sys;
}

namespace {

// Shared nullity detection given the descending spectrum and left basis
// ordered so that column j of `vectors` pairs with sigma[j].
SpectralReport detect(const Eigen::VectorXd& sigma, const Eigen::MatrixXd& vectors,
                      const NullspacePolicy& policy) {
    const long long K = sigma.size();
    SpectralReport report;
    report.sigma = sigma;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.gap_ratio = nan;

    if (!(sigma[0] > 0.0)) {
        report.all_zero = true;
        report.r = static_cast<int>(K);
        report.basis = vectors;
        report.threshold = 0.0;
        return report;
    }

    int r = 0;
    switch (policy.mode) {
        case NullspacePolicy::Mode::RelativeThreshold: {
            report.threshold = policy.theta * sigma[0];
            for (long long i = 0; i < K; ++i) {
                if (sigma[i] < report.threshold) ++r;
            }
            break;
        }
        case NullspacePolicy::Mode::LargestGap: {
            double best = 0.0;
            long long best_i = -1;
            for (long long i = 0; i + 1 < K; ++i) {
                const double ratio = sigma[i + 1] > 0.0
                                         ? sigma[i] / sigma[i + 1]
                                         : std::numeric_limits<double>::infinity();
                if (ratio > best) {
                    best = ratio;
                    best_i = i;
                }
            }
            if (best_i >= 0 && best >= policy.gap_floor) r = static_cast<int>(K - 1 - best_i);
            report.threshold = best_i >= 0 ? sigma[best_i + 1] : 0.0;
            break;
        }
        case NullspacePolicy::Mode::FixedNullity:
            r = std::max(0, std::min(policy.fixed_r, static_cast<int>(K)));
            break;
    }
    report.r = r;
    if (r > 0 && r < K) {
        const double null_top = sigma[K - r];  // largest sigma inside the nullspace
        report.gap_ratio =
            null_top > 0.0 ? sigma[K - r - 1] / null_top : std::numeric_limits<double>::infinity();
    }
    // Basis columns ascend in sigma: column 0 is the most-null direction.
    report.basis.resize(vectors.rows(), r);
    for (int j = 0; j < r; ++j) report.basis.col(j) = vectors.col(K - 1 - j);
    return report;
}

}  // namespace

SpectralReport nullspace_gram(const StackedSystem& system, const NullspacePolicy& policy) {
    Eigen::MatrixXd P = system.P;
    if (policy.normalize_blocks) {
        for (long long c = 0; c < P.cols(); ++c) {
            const double n = P.col(c).norm();
            if (n > 0.0) P.col(c) /= n;
        }
    }
    const Eigen::MatrixXd G = P * P.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("nullspace_gram: eigensolver failed");
    }
    const long long K = G.rows();
    Eigen::VectorXd sigma(K);
    Eigen::MatrixXd vectors(K, K);
    for (long long i = 0; i < K; ++i) {
        // Eigenvalues ascend; flip so sigma descends, vectors pair by column.
        sigma[i] = std::sqrt(std::max(0.0, eig.eigenvalues()[K - 1 - i]));
        vectors.col(i) = eig.eigenvectors().col(K - 1 - i);
    }
    return detect(sigma, vectors, policy);
}

SpectralReport nullspace_svd(const StackedSystem& system, const NullspacePolicy& policy) {
    Eigen::MatrixXd P = system.P;
    if (policy.normalize_blocks) {
        for (long long c = 0; c < P.cols(); ++c) {
            const double n = P.col(c).norm();
            if (n > 0.0) P.col(c) /= n;
        }
    }
    const long long K = P.rows();
    const long long M = P.cols();
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(K);
    Eigen::MatrixXd vectors;
    if (M >= K) {
        // Tall orientation: thin right vectors of P^T are the left vectors of P.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(P.transpose(), Eigen::ComputeThinV);
        sigma.head(svd.singularValues().size()) = svd.singularValues();
        vectors = svd.matrixV();
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeFullU);
        sigma.head(svd.singularValues().size()) = svd.singularValues();
        vectors = svd.matrixU();
    }
    return detect(sigma, vectors, policy);
}

SpectralReport nullspace(const StackedSystem& system, const NullspacePolicy& policy) {
    return policy.use_gram ? nullspace_gram(system, policy) : nullspace_svd(system, policy);
}

namespace {

Eigen::MatrixXd orthonormalized(const Eigen::MatrixXd& U) {
    if (U.cols() == 0) return U;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(U);
    return qr.householderQ() * Eigen::MatrixXd::Identity(U.rows(), U.cols());
}

}  // namespace

SubspaceAngle principal_angles(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
    if (U.rows() != V.rows()) {
        throw std::invalid_argument("principal_angles: ambient dimension mismatch");
    }
    if (U.cols() != V.cols()) {
        throw std::invalid_argument("principal_angles: subspace ranks differ (" +
                                    std::to_string(U.cols()) + " vs " +
                                    std::to_string(V.cols()) + ")");
    }
    if (U.cols() == 0) return {Eigen::VectorXd(), 0.0};
    const Eigen::MatrixXd Uo = orthonormalized(U);
    const Eigen::MatrixXd Vo = orthonormalized(V);
    // sin(theta_i) are the singular values of (I - U U^T) V. Unlike
    // sqrt(1 - cos^2) on the cosines of U^T V, this loses no precision for
    // angles near zero (where the cosine saturates at 1 - O(eps)).
    const Eigen::MatrixXd R = Vo - Uo * (Uo.transpose() * Vo);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
    const Eigen::VectorXd s = svd.singularValues();  // sines, descending
    SubspaceAngle out;
    out.sines.resize(s.size());
    for (long long i = 0; i < s.size(); ++i) {
        out.sines[i] = std::min(1.0, s[s.size() - 1 - i]);  // ascending
    }
    out.max_sine = out.sines[s.size() - 1];
    return out;
}

double containment_sine(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
    if (U.rows() != V.rows()) {
        throw std::invalid_argument("containment_sine: ambient dimension mismatch");
    }
    if (U.cols() > V.cols()) {
        throw std::invalid_argument("containment_sine: rank(U) must be <= rank(V)");
    }
    if (U.cols() == 0) return 0.0;
    const Eigen::MatrixXd Uo = orthonormalized(U);
    const Eigen::MatrixXd Vo = orthonormalized(V);
    // Largest sine = largest singular value of (I - V V^T) U; exact at small
    // angles where the cosine route would cancel.
    const Eigen::MatrixXd R = Uo - Vo * (Vo.transpose() * Uo);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
    return std::min(1.0, svd.singularValues()[0]);
}

double theoretical_rate(double N, int ell, int d) {
    if (N <= 1.0) throw std::invalid_argument("theoretical_rate: N must exceed 1");
    return N * std::pow(std::log(N) / N, static_cast<double>(ell) / d);
}

void save_spectrum_csv(const SpectralReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_spectrum_csv: cannot open '" + path + "'");
    char buf[64];
    out << "# liesym spectrum; K=" << report.sigma.size() << "; r=" << report.r
        << "; gap_ratio=";
    std::snprintf(buf, sizeof(buf), "%.17g", report.gap_ratio);
    out << buf << "; threshold=";
    std::snprintf(buf, sizeof(buf), "%.17g", report.threshold);
    out << buf << "; all_zero=" << (report.all_zero ? 1 : 0) << "\n";
    out << "index,sigma\n";
    for (long long i = 0; i < report.sigma.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", report.sigma[i]);
        out << (i + 1) << "," << buf << "\n";
    }
}

}  // namespace liesym
