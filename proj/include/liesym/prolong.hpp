#pragma once

#include <vector>

#include <Eigen/Core>

#include "liesym/pointcloud.hpp"
#include "liesym/tangent.hpp"

namespace liesym {

// The per-point chain-rule system A * X = B of the prolongation step:
// A(j,l) = dx_l/dvarsigma_j (tangent-frame rows of the independent block),
// B(j,q) = dq/dvarsigma_j for each lifted quantity q, X(l,q) = dq/dx_l.
struct ChainRuleSystem {
    Eigen::MatrixXd A;  // d x d
    Eigen::MatrixXd B;  // d x m_k
    Eigen::MatrixXd X;  // d x m_k
    double cond = 0.0;  // condition number of A
};

ChainRuleSystem chain_rule_system(const TangentFrame& frame, const JetLayout& layout,
                                  int level);

// New top-order coordinate values (level k+1), assembled from X by symmetric
// multi-index accumulation (contributions to a shared slot are averaged).
// Returns the values in canonical layout order for level k+1 and reports
// cond(A) through `cond_out`.
std::vector<double> derivatives_at_point(const TangentFrame& frame,
                                         const JetLayout& layout, int level,
                                         double* cond_out);

struct PointDiagnostics {
    double condA = 0.0;
    int gmls_iterations = 0;
    bool converged = true;
    bool dropped = false;
};

struct LevelDiagnostics {
    int level = 0;  // level lifted from
    std::vector<PointDiagnostics> points;
    int dropped_count = 0;
};

struct ProlongedCloud {
    PointCloud cloud;
    std::vector<LevelDiagnostics> levels;
};

struct ProlongOptions {
    double cond_threshold = 1e8;     // cond(A) above this marks a point degenerate
    double max_drop_fraction = 0.01; // hard failure above this fraction
    int threads = 1;
};

// One jet-level lift (Algorithm steps: frames -> GMLS refinement -> chain
// rule). Lower-level columns are copied bit-exactly; degenerate points are
// dropped with a report.
ProlongedCloud prolongate_once(const PointCloud& cloud, const GmlsParams& params,
                               const ProlongOptions& options = {});

// Lift to level p (extends layout.p if needed). p == level is the identity.
ProlongedCloud prolongate(const PointCloud& cloud, int p, const GmlsParams& params,
                          const ProlongOptions& options = {});

// Drop the free-constant base columns and every jet column whose multi-index
// touches a free-constant axis, leaving the classical jet space over the true
// independents. The intrinsic manifold dimension is preserved. Identity for
// clouds without free constants.
PointCloud project_free_constants(const PointCloud& cloud);

}  // namespace liesym
