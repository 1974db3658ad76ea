#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "liesym/ansatz.hpp"
#include "liesym/prolong.hpp"

namespace liesym {

// Per-point orthonormal normal frames S~_i of the prolonged solution manifold
// (the discrete stand-in for the unknown equation's gradients).
struct NormalBundle {
    std::vector<Eigen::MatrixXd> S;  // each D_p x (D_p - d)
    std::vector<PointDiagnostics> diagnostics;
    std::vector<int> kept;  // row indices of the cloud that produced S
    int codim = 0;
};

// Tangent/normal estimation on the level-p cloud (parameters may differ from
// the prolongation stage); returns the normal frames.
NormalBundle normals(const PointCloud& jet_cloud, const GmlsParams& params,
                     const ProlongOptions& options = {});

// p~_i = L~_i^T S~_i.
Eigen::MatrixXd pointwise_block(const Eigen::MatrixXd& Li, const Eigen::MatrixXd& Si);

// Horizontal concatenation of the per-point blocks.
struct StackedSystem {
    Eigen::MatrixXd P;  // K x (N_kept * codim)
    std::vector<int> offsets;
};

StackedSystem assemble(const std::vector<Eigen::MatrixXd>& blocks);

struct NullspacePolicy {
    enum class Mode { RelativeThreshold, LargestGap, FixedNullity };
    Mode mode = Mode::RelativeThreshold;
    double theta = 1e-5;      // sigma_i < theta * sigma_1 counts as null
    double gap_floor = 10.0;  // LargestGap: required ratio at the chosen split
    int fixed_r = 0;
    bool use_gram = true;            // Gram-eigen route (fallback: thin SVD)
    bool normalize_blocks = false;   // column-normalize p~_i before stacking
};

struct SpectralReport {
    Eigen::VectorXd sigma;   // descending
    int r = 0;               // detected nullity
    Eigen::MatrixXd basis;   // K x r, orthonormal
    double gap_ratio = 0.0;  // sigma_{K-r} / sigma_{K-r+1} (NaN if undefined)
    double threshold = 0.0;
    bool all_zero = false;   // sigma_1 == 0: everything is a symmetry
};

// Numerical nullspace of P~ per policy.
SpectralReport nullspace(const StackedSystem& system, const NullspacePolicy& policy = {});
// The two internal routes, exposed for the equivalence tests.
SpectralReport nullspace_gram(const StackedSystem& system, const NullspacePolicy& policy = {});
SpectralReport nullspace_svd(const StackedSystem& system, const NullspacePolicy& policy = {});

// Sines of the principal angles between equal-rank subspaces, ascending;
// max_sine is ||sin Theta||_2.
struct SubspaceAngle {
    Eigen::VectorXd sines;
    double max_sine = 0.0;
};

SubspaceAngle principal_angles(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V);

// Largest sine of the angles between span(U) and its projection onto span(V);
// allows rank(U) <= rank(V) (containment diagnostic).
double containment_sine(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V);

// Reference convergence curve N * (log N / N)^(l/d).
double theoretical_rate(double N, int ell, int d);

// One row per singular value, preceded by a summary comment line.
void save_spectrum_csv(const SpectralReport& report, const std::string& path);

}  // namespace liesym
