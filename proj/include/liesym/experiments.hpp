#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "liesym/invariance.hpp"
#include "liesym/pointcloud.hpp"

namespace liesym {

// A fully specified benchmark pipeline: sampling recipe, per-stage GMLS
// parameters, ansatz, prolongation order, and the reference nullspace.
struct Benchmark {
    std::string name;
    FamilySpec spec;
    GmlsParams prolong_params;
    GmlsParams normal_params;
    int ansatz_degree = 1;
    int p = 1;
    NullspacePolicy policy;
    ProlongOptions options;
    Eigen::MatrixXd reference;  // K x r, orthonormal
    // "reported": as published for this system. "derived": recomputed by the
    // exact residual oracle where the published statement is inconsistent.
    std::string reference_provenance;
    std::vector<std::string> var_names;  // for rendering generators
    std::vector<long long> sweep_N;      // default convergence grid
    int trials = 20;
};

// Known benchmarks: linear_ode, linear_ode_fixed, stuart_landau,
// stuart_landau_fixed, transport, heat. Throws on unknown names.
Benchmark make_benchmark(const std::string& name);
std::vector<std::string> benchmark_names();

// The reference nullspace basis (orthonormal) for a benchmark.
Eigen::MatrixXd reference_nullspace(const Benchmark& benchmark);

struct RunResult {
    SpectralReport report;
    SubspaceAngle angle;    // vs the reference, valid only if ranks matched
    bool angle_valid = false;
    double containment = 0.0;  // max sine of detected basis against reference span
    double runtime_s = 0.0;
    int dropped_points = 0;
    std::string rendered;   // rendered generators, one per line
};

// Full pipeline: sample -> prolongate(p) -> project free constants ->
// normals -> evaluate prolonged ansatz -> assemble -> nullspace -> angles.
RunResult run_benchmark(const Benchmark& benchmark, std::uint64_t seed, int threads = 1);

struct ConvergenceRow {
    long long N = 0;
    int trials = 0;
    double mean_sin = 0.0;
    double std_sin = 0.0;
    double mean_runtime = 0.0;
    double theory_rescaled = 0.0;
    bool partial = false;  // some trials failed
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    double slope = 0.0;  // log-log LSQ slope of mean_sin vs N
};

// Per-N trial-averaged error sweep; the theoretical curve is rescaled to the
// first row's mean.
ConvergenceResult convergence_sweep(const Benchmark& benchmark,
                                    const std::vector<long long>& Ns, int trials,
                                    std::uint64_t seed, int threads = 1);

void save_convergence_csv(const ConvergenceResult& result, const std::string& path,
                          bool timings = false);

// Derivative-estimation convergence for y = sin(x) on [0, pi] (d = 1):
// mean over trials of the max-over-points error of the GMLS-refined du/dx.
struct DerivativeConvergence {
    std::vector<long long> N;
    std::vector<double> mean_max_err;
    double slope = 0.0;
};

DerivativeConvergence gmls_derivative_convergence(const std::vector<long long>& Ns,
                                                  int trials, std::uint64_t seed,
                                                  const GmlsParams& params,
                                                  int threads = 1);

// Least-squares slope of log10(y) against log10(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace liesym
