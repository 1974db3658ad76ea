#include "liesym/prolong.hpp"

#include <Eigen/Dense>
#include <stdexcept>

#include "liesym/threading.hpp"

namespace liesym {

ChainRuleSystem chain_rule_system(const TangentFrame& frame, const JetLayout& layout,
                                  int level) {
    const int d = layout.d;
    if (frame.T.cols() != d) {
        throw std::invalid_argument("chain_rule_system: frame dimension != layout.d");
    }
    if (frame.T.rows() != layout.jet_dimension(level)) {
        throw std::invalid_argument("chain_rule_system: frame does not sit at this level");
    }
    const long long block_hi = layout.jet_dimension(level);
    const long long block_lo =
        level == 0 ? d : layout.jet_dimension(level - 1);
    const long long mk = block_hi - block_lo;

    ChainRuleSystem sys;
    sys.A = frame.T.topRows(d).transpose();          // A(j,l) = dx_l / dvarsigma_j
    sys.B = frame.T.middleRows(block_lo, mk).transpose();  // B(j,q) = dq / dvarsigma_j

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.A);
    const double s1 = svd.singularValues()[0];
    const double sd = svd.singularValues()[d - 1];
    sys.cond = sd > 0.0 ? s1 / sd : std::numeric_limits<double>::infinity();
    sys.X = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(sys.A).solve(sys.B);
    return sys;
}

std::vector<double> derivatives_at_point(const TangentFrame& frame, const JetLayout& layout,
                                         int level, double* cond_out) {
    const ChainRuleSystem sys = chain_rule_system(frame, layout, level);
    if (cond_out) *cond_out = sys.cond;

    const long long block_lo = level == 0 ? layout.d : layout.jet_dimension(level - 1);
    const auto next = layout.level_coordinates(level + 1);
    std::vector<double> out;
    out.reserve(next.size());
    for (const auto& [b, J2] : next) {
        // Symmetric accumulation: every first-order route into this slot,
        // averaged (mixed partials arrive from several lower coordinates).
        double acc = 0.0;
        int routes = 0;
        for (int l = 0; l < layout.d; ++l) {
            if (J2[l] == 0) continue;
            MultiIndex J = J2;
            J[l] -= 1;
            const long long q = layout.coordinate_offset(b, J) - block_lo;
            acc += sys.X(l, q);
            ++routes;
        }
        out.push_back(acc / routes);
    }
    return out;
}

ProlongedCloud prolongate_once(const PointCloud& cloud, const GmlsParams& params,
                               const ProlongOptions& options) {
    if (cloud.intrinsic_d != cloud.layout.d) {
        throw std::invalid_argument(
            "prolongate_once: free constants were projected out; prolong before projecting");
    }
    const int level = cloud.level;
    const JetLayout next_layout{cloud.layout.d, cloud.layout.m,
                                std::max(cloud.layout.p, level + 1)};
    const long long D_now = cloud.D();
    const long long D_next = next_layout.jet_dimension(level + 1);
    const long long N = cloud.N();
    const long long m_new = D_next - D_now;

    // Configuration errors surface before the per-point loop.
    const long long Y = static_cast<long long>(
        chart_monomial_basis(cloud.intrinsic_d, params.degree).size());
    if (params.k < Y) {
        throw std::invalid_argument("prolongate_once: stencil size k=" +
                                    std::to_string(params.k) +
                                    " is below the polynomial basis size Y=" +
                                    std::to_string(Y));
    }
    if (params.k > N) {
        throw std::invalid_argument("prolongate_once: stencil size exceeds the cloud size");
    }

    const NeighborTable table = knn(cloud.data, params.k);

    LevelDiagnostics diag;
    diag.level = level;
    diag.points.resize(static_cast<std::size_t>(N));
    Eigen::MatrixXd new_block(N, m_new);

    parallel_for(static_cast<std::size_t>(N), options.threads, [&](std::size_t i) {
        PointDiagnostics& pd = diag.points[i];
        try {
            const GmlsResult g =
                gmls_refine(cloud.data, table, static_cast<int>(i), cloud.intrinsic_d, params);
            pd.gmls_iterations = g.iterations;
            pd.converged = g.converged;
            if (g.frame.degenerate) {
                pd.dropped = true;
                return;
            }
            const std::vector<double> vals =
                derivatives_at_point(g.frame, next_layout, level, &pd.condA);
            if (!(pd.condA <= options.cond_threshold)) {
                pd.dropped = true;
                return;
            }
            for (long long c = 0; c < m_new; ++c) {
                new_block(static_cast<long long>(i), c) = vals[static_cast<std::size_t>(c)];
            }
        } catch (const std::runtime_error&) {
            pd.dropped = true;  // data-dependent failure (e.g. rank-deficient stencil)
        }
    });

    std::vector<long long> kept;
    kept.reserve(static_cast<std::size_t>(N));
    for (long long i = 0; i < N; ++i) {
        if (diag.points[static_cast<std::size_t>(i)].dropped) {
            ++diag.dropped_count;
        } else {
            kept.push_back(i);
        }
    }
    if (diag.dropped_count > options.max_drop_fraction * static_cast<double>(N)) {
        throw std::runtime_error("prolongate_once: dropped " +
                                 std::to_string(diag.dropped_count) + " of " +
                                 std::to_string(N) + " points (exceeds the " +
                                 std::to_string(options.max_drop_fraction) + " budget)");
    }

    ProlongedCloud out;
    out.cloud.layout = next_layout;
    out.cloud.level = level + 1;
    out.cloud.intrinsic_d = cloud.intrinsic_d;
    out.cloud.seed = cloud.seed;
    out.cloud.roles = canonical_roles(next_layout, level + 1, cloud.n_free_constant());
    out.cloud.data.resize(static_cast<long long>(kept.size()), D_next);
    for (std::size_t r = 0; r < kept.size(); ++r) {
        out.cloud.data.block(static_cast<long long>(r), 0, 1, D_now) =
            cloud.data.row(kept[r]);
        out.cloud.data.block(static_cast<long long>(r), D_now, 1, m_new) =
            new_block.row(kept[r]);
    }
    out.levels.push_back(std::move(diag));
    return out;
}

ProlongedCloud prolongate(const PointCloud& cloud, int p, const GmlsParams& params,
                          const ProlongOptions& options) {
    if (p < cloud.level) {
        throw std::invalid_argument("prolongate: target order below the cloud level");
    }
    ProlongedCloud out;
    out.cloud = cloud;
    if (out.cloud.layout.p < p) out.cloud.layout.p = p;
    while (out.cloud.level < p) {
        ProlongedCloud step = prolongate_once(out.cloud, params, options);
        out.cloud = std::move(step.cloud);
        if (out.cloud.layout.p < p) out.cloud.layout.p = p;
        out.levels.push_back(std::move(step.levels.front()));
    }
    return out;
}

PointCloud project_free_constants(const PointCloud& cloud) {
    const int nf = cloud.n_free_constant();
    if (nf == 0) return cloud;
    const int n_true = cloud.layout.d - nf;
    if (n_true < 1) {
        throw std::invalid_argument("project_free_constants: no true independents left");
    }
    const JetLayout new_layout{n_true, cloud.layout.m, cloud.layout.p};

    // Keep: true independents, dependents, and jets with no free-constant axis.
    std::vector<long long> keep;
    for (long long c = 0; c < cloud.D(); ++c) {
        const ColumnRole& role = cloud.roles[static_cast<std::size_t>(c)];
        switch (role.kind) {
            case ColumnRole::Kind::Independent:
            case ColumnRole::Kind::Dependent:
                keep.push_back(c);
                break;
            case ColumnRole::Kind::FreeConstant:
                break;
            case ColumnRole::Kind::Jet: {
                bool touches = false;
                for (int l = n_true; l < cloud.layout.d; ++l) {
                    if (role.J[l] != 0) touches = true;
                }
                if (!touches) keep.push_back(c);
                break;
            }
        }
    }

    PointCloud out;
    out.layout = new_layout;
    out.level = cloud.level;
    out.intrinsic_d = cloud.intrinsic_d;  // the manifold itself is unchanged
    out.seed = cloud.seed;
    out.roles = canonical_roles(new_layout, cloud.level, 0);
    out.data.resize(cloud.N(), static_cast<long long>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.data.col(static_cast<long long>(j)) = cloud.data.col(keep[j]);
    }
    if (static_cast<long long>(out.roles.size()) != out.data.cols()) {
        throw std::logic_error("project_free_constants: column bookkeeping mismatch");
    }
    return out;
}

}  // namespace liesym
