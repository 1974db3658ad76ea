#include "liesym/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "liesym/rng.hpp"
#include "liesym/threading.hpp"

namespace liesym {

namespace {

Eigen::MatrixXd columns_from(std::initializer_list<Eigen::VectorXd> cols) {
    const Eigen::VectorXd& first = *cols.begin();
    Eigen::MatrixXd M(first.size(), static_cast<long long>(cols.size()));
    long long j = 0;
    for (const auto& c : cols) M.col(j++) = c;
    return M;
}

Eigen::VectorXd unit(int K, std::initializer_list<std::pair<int, double>> entries) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(K);
    for (const auto& [i, x] : entries) v[i] = x;
    v.normalize();
    return v;
}

}  // namespace

Benchmark make_benchmark(const std::string& name) {
    Benchmark b;
    b.name = name;
    // Presets detect the nullity by the spectral gap: the benchmark claims are
    // phrased in gap ratios, and the gap location is stable across the N
    // sweeps while a fixed relative threshold is not.
    b.policy.mode = NullspacePolicy::Mode::LargestGap;
    if (name == "linear_ode") {
        // u' = u, general solution u = C e^x, sampled as a two-parameter family.
        b.spec.system = FamilySpec::System::linear_ode;
        b.spec.n1 = 100;
        b.spec.range1 = {-1.0, 1.0};
        b.spec.n2 = 100;
        b.spec.range2 = {1.0, 2.0};
        // Tensor grids put whole stencils on single C-fibers of the family,
        // which are exactly straight lines in ambient space: the stencil loses
        // rank and the square degree-4 fit is not poised. The i.i.d. mode is
        // the sampling the convergence theory assumes, and it keeps every
        // stencil in general position.
        b.spec.iid = true;
        b.policy.normalize_blocks = true;
        b.prolong_params = {15, 4, 1e-12, 20};
        b.normal_params = {25, 3, 1e-12, 20};
        b.p = 1;
        // K = 6 over psi in (1, x, u): translation d/dx and scaling u d/du.
        b.reference = columns_from({unit(6, {{0, 1.0}}), unit(6, {{5, 1.0}})});
        b.reference_provenance = "reported";
        b.var_names = {"x", "u"};
    } else if (name == "linear_ode_fixed") {
        b.spec.system = FamilySpec::System::linear_ode;
        b.spec.n1 = 1280;
        b.spec.range1 = {-2.0, 1.0};
        b.spec.fixed1 = 1.0;
        b.prolong_params = {10, 3, 1e-12, 20};
        b.normal_params = {10, 3, 1e-12, 20};
        b.p = 1;
        // Single curve u = e^x: the symmetry d/dx + u d/du survives on it.
        b.reference = columns_from({unit(6, {{0, 1.0}, {5, 1.0}})});
        b.reference_provenance = "reported";
        b.var_names = {"x", "u"};
        b.sweep_N = {80, 160, 320, 640, 1280, 2560, 5120, 10240};
    } else if (name == "stuart_landau") {
        b.spec.system = FamilySpec::System::stuart_landau;
        b.spec.n1 = 30;
        b.spec.range1 = {0.0, M_PI};
        b.spec.n2 = 30;
        b.spec.range2 = {0.0, 2.0 * M_PI};
        b.spec.n3 = 30;
        b.spec.range3 = {1.0, 1.3};
        b.spec.iid = true;  // same stencil-poisedness concern as linear_ode
        b.prolong_params = {40, 4, 1e-12, 20};
        b.normal_params = {40, 4, 1e-12, 20};
        b.p = 1;
        // K = 12 over psi in (1, t, x, y): time translation and rotation.
        b.reference =
            columns_from({unit(12, {{0, 1.0}}), unit(12, {{7, 1.0}, {10, -1.0}})});
        b.reference_provenance = "reported";
        b.var_names = {"t", "x", "y"};
    } else if (name == "stuart_landau_fixed") {
        b.spec.system = FamilySpec::System::stuart_landau;
        b.spec.n1 = 1280;
        b.spec.range1 = {0.0, 2.0 * M_PI};
        b.spec.fixed1 = 0.0;
        b.spec.fixed2 = 1.0;
        b.prolong_params = {10, 3, 1e-12, 20};
        b.normal_params = {10, 3, 1e-12, 20};
        b.p = 1;
        // Unit circle (x, y) = (cos t, -sin t): d/dt + y d/dx - x d/dy. The
        // published coefficient relation for this case is internally
        // inconsistent; this basis is the recomputed one (see the tests'
        // residual oracle).
        b.reference = columns_from({unit(12, {{0, 1.0}, {7, 1.0}, {10, -1.0}})});
        b.reference_provenance = "derived";
        b.var_names = {"t", "x", "y"};
        b.sweep_N = {80, 160, 320, 640, 1280, 2560, 5120, 10240};
    } else if (name == "transport") {
        b.spec.system = FamilySpec::System::transport;
        b.spec.n1 = 160;
        b.spec.range1 = {-0.5, 0.5};
        b.spec.n2 = 160;
        b.spec.range2 = {-0.5, 0.5};
        // Per-axis random product grids develop sliver stencils (two
        // near-coincident t-columns supplying a whole neighbourhood), which
        // inflates the jet-estimation noise floor by ~100x and buries the
        // spectral gap. I.i.d. sampling is what the convergence theory
        // assumes and keeps stencils in general position.
        b.spec.iid = true;
        b.prolong_params = {20, 3, 1e-12, 20};
        b.normal_params = {20, 3, 1e-12, 20};
        b.p = 1;
        // u = sin(t + x) solves u_t = u_x, whose degree-1 invariance nullspace
        // is f(t,x,u)(d/dt - d/dx) for every basis monomial f: nullity 4.
        // (The published account lists a single generator; the residual
        // oracle in the tests confirms the four-dimensional space.)
        b.reference = columns_from({unit(12, {{0, 1.0}, {4, -1.0}}),
                                    unit(12, {{1, 1.0}, {5, -1.0}}),
                                    unit(12, {{2, 1.0}, {6, -1.0}}),
                                    unit(12, {{3, 1.0}, {7, -1.0}})});
        b.reference_provenance = "derived";
        b.var_names = {"t", "x", "u"};
        b.sweep_N = {56, 80, 113, 160};
    } else if (name == "heat") {
        b.spec.system = FamilySpec::System::heat;
        b.spec.n1 = 160;
        b.spec.range1 = {1.0, 2.0};
        b.spec.n2 = 160;
        b.spec.range2 = {1.0, 2.0};
        b.prolong_params = {40, 4, 1e-12, 20};
        b.normal_params = {40, 4, 1e-12, 20};
        b.p = 2;
        // Same sliver-stencil rationale as the transport preset; on product
        // grids ~5% of the degree-4 fits here are outright rank-deficient.
        b.spec.iid = true;
        // Fundamental solution of u_t = u_xx; the published reference vector
        // (coefficients 2t d/dt + x d/dx - 2u d/du, normalized by 3) is kept
        // verbatim as the comparison target. The recomputed generator has
        // eta = -u rather than -2u; see the residual oracle in the tests.
        Eigen::VectorXd ref = Eigen::VectorXd::Zero(12);
        ref[1] = 2.0 / 3.0;
        ref[6] = 1.0 / 3.0;
        ref[11] = -2.0 / 3.0;
        b.reference = columns_from({ref});
        b.reference_provenance = "reported";
        b.var_names = {"t", "x", "u"};
        b.sweep_N = {56, 80, 113, 160};
    } else {
        throw std::invalid_argument("make_benchmark: unknown benchmark '" + name + "'");
    }
    return b;
}

std::vector<std::string> benchmark_names() {
    return {"linear_ode", "linear_ode_fixed", "stuart_landau",
            "stuart_landau_fixed", "transport", "heat"};
}

Eigen::MatrixXd reference_nullspace(const Benchmark& benchmark) {
    return benchmark.reference;
}

RunResult run_benchmark(const Benchmark& benchmark, std::uint64_t seed, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult result;

    FamilySpec spec = benchmark.spec;
    spec.seed = seed;
    ProlongOptions options = benchmark.options;
    options.threads = threads;

    PointCloud cloud = sample(spec);
    ProlongedCloud pro = prolongate(cloud, benchmark.p, benchmark.prolong_params, options);
    for (const auto& lvl : pro.levels) result.dropped_points += lvl.dropped_count;

    PointCloud proj = project_free_constants(pro.cloud);
    NormalBundle bundle = normals(proj, benchmark.normal_params, options);
    result.dropped_points +=
        static_cast<int>(proj.N()) - static_cast<int>(bundle.kept.size());

    const JetLayout classical{proj.layout.d, proj.layout.m, benchmark.p};
    const AnsatzBasis basis = monomial_ansatz(classical, benchmark.ansatz_degree);
    const ProlongedAnsatz lp = prolong_ansatz(basis, classical);

    std::vector<Eigen::MatrixXd> blocks(bundle.S.size());
    parallel_for(bundle.S.size(), threads, [&](std::size_t i) {
        const Eigen::MatrixXd Li =
            evaluate_prolonged(lp, proj.data.row(bundle.kept[i]).transpose());
        blocks[i] = pointwise_block(Li, bundle.S[i]);
    });

    const StackedSystem sys = assemble(blocks);
    result.report = nullspace(sys, benchmark.policy);

    const Eigen::MatrixXd& ref = benchmark.reference;
    if (result.report.r == ref.cols()) {
        result.angle = principal_angles(result.report.basis, ref);
        result.angle_valid = true;
    }
    if (result.report.r > 0) {
        result.containment = result.report.r <= ref.cols()
                                 ? containment_sine(result.report.basis, ref)
                                 : containment_sine(ref, result.report.basis);
    }
    for (int j = 0; j < result.report.r; ++j) {
        if (j) result.rendered += "\n";
        result.rendered += render_generator(result.report.basis.col(j), basis,
                                            benchmark.var_names);
    }

    result.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

ConvergenceResult convergence_sweep(const Benchmark& benchmark,
                                    const std::vector<long long>& Ns, int trials,
                                    std::uint64_t seed, int threads) {
    if (Ns.empty()) throw std::invalid_argument("convergence_sweep: empty N grid");
    if (trials < 1) throw std::invalid_argument("convergence_sweep: trials must be >= 1");

    ConvergenceResult result;
    std::vector<double> xs, ys;
    for (std::size_t ni = 0; ni < Ns.size(); ++ni) {
        Benchmark bench = benchmark;
        bench.spec.n1 = static_cast<int>(Ns[ni]);
        if (bench.spec.system == FamilySpec::System::transport ||
            bench.spec.system == FamilySpec::System::heat) {
            bench.spec.n2 = static_cast<int>(Ns[ni]);  // N x N grid
        }
        ConvergenceRow row;
        row.N = Ns[ni];
        double sum = 0.0, sum2 = 0.0, time_sum = 0.0;
        int ok = 0;
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t trial_seed =
                derive_seed(seed, static_cast<std::uint64_t>(ni) * 100003ULL +
                                      static_cast<std::uint64_t>(t));
            try {
                const RunResult r = run_benchmark(bench, trial_seed, threads);
                time_sum += r.runtime_s;
                double err;
                if (r.angle_valid) {
                    err = r.angle.max_sine;
                } else if (r.report.r > benchmark.reference.cols()) {
                    // Detector kept more modes than the reference dimension
                    // (extra quasi-symmetries); score how completely the
                    // reference space sits inside the detected span.
                    err = r.containment;
                } else {
                    row.partial = true;
                    continue;
                }
                sum += err;
                sum2 += err * err;
                ++ok;
            } catch (const std::exception&) {
                row.partial = true;
            }
        }
        row.trials = ok;
        if (ok > 0) {
            row.mean_sin = sum / ok;
            const double var = sum2 / ok - row.mean_sin * row.mean_sin;
            row.std_sin = std::sqrt(std::max(0.0, var));
            row.mean_runtime = time_sum / ok;
            xs.push_back(static_cast<double>(row.N));
            ys.push_back(row.mean_sin);
        }
        result.rows.push_back(row);
    }

    // Rescale the theoretical curve through the first resolved row.
    const int ell = benchmark.normal_params.degree;
    const int d = sample(benchmark.spec).intrinsic_d;
    double scale = 0.0;
    for (const auto& row : result.rows) {
        if (row.trials > 0 && row.mean_sin > 0.0) {
            scale = row.mean_sin / theoretical_rate(static_cast<double>(row.N), ell, d);
            break;
        }
    }
    for (auto& row : result.rows) {
        row.theory_rescaled = scale * theoretical_rate(static_cast<double>(row.N), ell, d);
    }
    result.slope = loglog_slope(xs, ys);
    return result;
}

void save_convergence_csv(const ConvergenceResult& result, const std::string& path,
                          bool timings) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_convergence_csv: cannot open '" + path + "'");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", result.slope);
    out << "# liesym convergence; slope=" << buf << "\n";
    out << "N,trials,mean_sin,std_sin,theory_rescaled,partial,runtime_s\n";
    for (const auto& row : result.rows) {
        out << row.N << "," << row.trials << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", row.mean_sin);
        out << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", row.std_sin);
        out << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", row.theory_rescaled);
        out << buf << "," << (row.partial ? 1 : 0) << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", timings ? row.mean_runtime : 0.0);
        out << buf << "\n";
    }
}

DerivativeConvergence gmls_derivative_convergence(const std::vector<long long>& Ns,
                                                  int trials, std::uint64_t seed,
                                                  const GmlsParams& params, int threads) {
    DerivativeConvergence out;
    std::vector<double> xs, ys;
    for (std::size_t ni = 0; ni < Ns.size(); ++ni) {
        const long long N = Ns[ni];
        double sum = 0.0;
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t trial_seed =
                derive_seed(seed, static_cast<std::uint64_t>(ni) * 100003ULL +
                                      static_cast<std::uint64_t>(t));
            Eigen::MatrixXd pts(N, 2);
            for (long long i = 0; i < N; ++i) {
                const double x = uniform_in(0.0, M_PI, trial_seed, 1, i);
                pts(i, 0) = x;
                pts(i, 1) = std::sin(x);
            }
            const NeighborTable table = knn(pts, params.k);
            std::vector<double> errs(static_cast<std::size_t>(N), 0.0);
            parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t i) {
                const GmlsResult g = gmls_refine(pts, table, static_cast<int>(i), 1, params);
                // Slope of the refined tangent line in graph coordinates.
                const double slope = g.frame.T(1, 0) / g.frame.T(0, 0);
                errs[i] = std::abs(slope - std::cos(pts(static_cast<long long>(i), 0)));
            });
            double worst = 0.0;
            for (double e : errs) worst = std::max(worst, e);
            sum += worst;
        }
        out.N.push_back(N);
        out.mean_max_err.push_back(sum / trials);
        xs.push_back(static_cast<double>(N));
        ys.push_back(sum / trials);
    }
    out.slope = loglog_slope(xs, ys);
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("loglog_slope: length mismatch");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log10(x[i]);
        const double ly = std::log10(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

}  // namespace liesym
