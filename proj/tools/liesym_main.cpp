#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "liesym/experiments.hpp"
#include "liesym/invariance.hpp"
#include "liesym/pointcloud.hpp"
#include "liesym/prolong.hpp"
#include "liesym/threading.hpp"

namespace {

using namespace liesym;

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("LIESYM_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

FamilySpec default_spec(FamilySpec::System system) {
    switch (system) {
        case FamilySpec::System::linear_ode: return make_benchmark("linear_ode").spec;
        case FamilySpec::System::stuart_landau: return make_benchmark("stuart_landau").spec;
        case FamilySpec::System::transport: return make_benchmark("transport").spec;
        case FamilySpec::System::heat: return make_benchmark("heat").spec;
    }
    throw std::invalid_argument("unknown system");
}

void save_diagnostics(const ProlongedCloud& pro, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "# liesym diagnostics\n";
    out << "level,point,condA,gmls_iterations,converged,dropped\n";
    char buf[64];
    for (const auto& lvl : pro.levels) {
        for (std::size_t i = 0; i < lvl.points.size(); ++i) {
            const auto& pd = lvl.points[i];
            std::snprintf(buf, sizeof(buf), "%.17g", pd.condA);
            out << lvl.level << "," << i << "," << buf << "," << pd.gmls_iterations << ","
                << (pd.converged ? 1 : 0) << "," << (pd.dropped ? 1 : 0) << "\n";
        }
    }
}

void print_spectrum(const SpectralReport& report) {
    std::printf("singular values (descending):");
    for (long long i = 0; i < report.sigma.size(); ++i) {
        std::printf(" %.6g", report.sigma[i]);
    }
    std::printf("\n");
    if (report.all_zero) {
        std::printf("nullity %d (spectrum identically zero: every ansatz field is tangent)\n",
                    report.r);
        return;
    }
    std::printf("nullity %d (gap ratio %.6g, threshold %.6g)\n", report.r, report.gap_ratio,
                report.threshold);
}

int print_generators(const SpectralReport& report, const AnsatzBasis& basis,
                     const std::vector<std::string>& names) {
    if (report.r == 0) {
        std::printf("no symmetry found within the ansatz "
                    "(empty numerical nullspace at this threshold)\n");
        return 2;
    }
    std::printf("generators:\n");
    for (int j = 0; j < report.r; ++j) {
        std::printf("  X%d: %s\n", j + 1,
                    render_generator(report.basis.col(j), basis, names).c_str());
    }
    return 0;
}

NullspacePolicy build_policy(const std::string& mode, double theta, double gap_floor,
                             int fixed_r, bool use_svd) {
    NullspacePolicy policy;
    if (mode == "relative") {
        policy.mode = NullspacePolicy::Mode::RelativeThreshold;
    } else if (mode == "gap") {
        policy.mode = NullspacePolicy::Mode::LargestGap;
    } else if (mode == "fixed") {
        policy.mode = NullspacePolicy::Mode::FixedNullity;
    } else {
        throw std::invalid_argument("unknown nullity policy '" + mode + "'");
    }
    policy.theta = theta;
    policy.gap_floor = gap_floor;
    policy.fixed_r = fixed_r;
    policy.use_gram = !use_svd;
    return policy;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"liesym: recover Lie point symmetries of an unknown differential "
                 "equation from scattered solution data"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "Sample a solution cloud and write it as CSV");
    gen->set_config("--config", "", "Flat key=value config; command-line flags override");
    std::string gen_system, gen_out;
    int gen_n = 0, gen_n1 = 0, gen_n2 = 0, gen_n3 = 0;
    std::vector<double> gen_r1, gen_r2, gen_r3;
    double gen_fixc = 0.0, gen_fixc2 = 0.0;
    bool gen_iid = false;
    std::uint64_t gen_seed = 0;
    gen->add_option("--system", gen_system,
                    "System: linear_ode, stuart_landau, transport, heat")
        ->required();
    gen->add_option("--n", gen_n, "Sample count applied to every active axis");
    gen->add_option("--n1", gen_n1, "Axis-1 sample count");
    gen->add_option("--n2", gen_n2, "Axis-2 sample count");
    gen->add_option("--n3", gen_n3, "Axis-3 sample count");
    gen->add_option("--range1", gen_r1, "Axis-1 range (lo hi)")->expected(2);
    gen->add_option("--range2", gen_r2, "Axis-2 range (lo hi)")->expected(2);
    gen->add_option("--range3", gen_r3, "Axis-3 range (lo hi)")->expected(2);
    auto* gen_fixc_opt =
        gen->add_option("--fix-c", gen_fixc, "Pin the first integration constant");
    auto* gen_fixc2_opt =
        gen->add_option("--fix-c2", gen_fixc2, "Pin the second integration constant");
    gen->add_flag("--iid", gen_iid, "Fully i.i.d. rows instead of a tensor grid");
    gen->add_option("--seed", gen_seed, "Sampling seed");
    gen->add_option("-o,--out", gen_out, "Output CSV path")->required();

    // ---- prolong ----
    auto* prolong_cmd =
        app.add_subcommand("prolong", "Lift a cloud CSV into jet space (order p)");
    prolong_cmd->set_config("--config", "", "Flat key=value config; flags override");
    std::string pr_in, pr_out, pr_diag;
    int pr_p = 1, pr_k = 10, pr_l = 3, pr_max_iter = 20, pr_threads = 0;
    double pr_cond = 1e8, pr_drop = 0.01, pr_stop = 1e-12;
    prolong_cmd->add_option("-i,--input", pr_in, "Input cloud CSV")->required();
    prolong_cmd->add_option("-o,--out", pr_out, "Output level-p CSV")->required();
    prolong_cmd->add_option("-p", pr_p, "Target jet order");
    prolong_cmd->add_option("-k", pr_k, "GMLS stencil size");
    prolong_cmd->add_option("-l,--degree", pr_l, "GMLS polynomial degree");
    prolong_cmd->add_option("--stop-tol", pr_stop, "GMLS refinement stop tolerance");
    prolong_cmd->add_option("--max-iter", pr_max_iter, "GMLS refinement iteration cap");
    prolong_cmd->add_option("--cond-threshold", pr_cond, "Drop points with cond(A) above");
    prolong_cmd->add_option("--max-drop", pr_drop, "Hard failure above this drop fraction");
    prolong_cmd->add_option("--diag", pr_diag,
                            "Diagnostics sidecar path (default: <out>.diag.csv)");
    prolong_cmd->add_option("--threads", pr_threads, "Worker threads (default: cores)");

    // ---- discover ----
    auto* discover =
        app.add_subcommand("discover", "Recover infinitesimal generators from data");
    discover->set_config("--config", "", "Flat key=value config; flags override");
    std::string di_in, di_bench, di_spectrum;
    int di_p = -1, di_k = 10, di_l = 3, di_nk = 0, di_nl = 0, di_degree = 1;
    int di_fixed_r = 0, di_threads = 0, di_max_iter = 20;
    int di_n = 0, di_n1 = 0, di_n2 = 0, di_n3 = 0;
    double di_theta = 1e-5, di_gap = 10.0, di_cond = 1e8, di_drop = 0.01, di_stop = 1e-12;
    std::string di_policy = "relative";
    bool di_svd = false, di_timings = false;
    std::uint64_t di_seed = 0;
    auto* di_in_opt = discover->add_option("-i,--input", di_in, "Level-0 or level-p CSV");
    auto* di_bench_opt = discover->add_option(
        "--benchmark", di_bench, "Named benchmark (see `converge` for the list)");
    discover->add_option("-o,--spectrum", di_spectrum, "Write the spectrum CSV here");
    discover->add_option("-p", di_p, "Jet order (default: benchmark preset or 1)");
    discover->add_option("-k", di_k, "Prolongation-stage stencil size");
    discover->add_option("-l,--degree-chart", di_l, "Prolongation-stage GMLS degree");
    discover->add_option("--nk", di_nk, "Normal-stage stencil size (default: -k)");
    discover->add_option("--nl", di_nl, "Normal-stage GMLS degree (default: -l)");
    discover->add_option("--degree", di_degree, "Ansatz polynomial degree");
    discover->add_option("--theta", di_theta, "Relative nullity threshold");
    discover->add_option("--policy", di_policy, "Nullity policy: relative, gap, fixed");
    discover->add_option("--gap-floor", di_gap, "LargestGap: minimum accepted ratio");
    discover->add_option("--fixed-r", di_fixed_r, "FixedNullity: the nullity");
    discover->add_flag("--svd", di_svd, "Use the direct SVD route instead of the Gram route");
    discover->add_option("--stop-tol", di_stop, "GMLS refinement stop tolerance");
    discover->add_option("--max-iter", di_max_iter, "GMLS refinement iteration cap");
    discover->add_option("--cond-threshold", di_cond, "Drop points with cond(A) above");
    discover->add_option("--max-drop", di_drop, "Hard failure above this drop fraction");
    discover->add_option("--n", di_n, "Benchmark mode: override every axis count");
    discover->add_option("--n1", di_n1, "Benchmark mode: axis-1 count");
    discover->add_option("--n2", di_n2, "Benchmark mode: axis-2 count");
    discover->add_option("--n3", di_n3, "Benchmark mode: axis-3 count");
    discover->add_option("--seed", di_seed, "Benchmark mode: sampling seed");
    discover->add_flag("--timings", di_timings, "Report wall-clock time");
    discover->add_option("--threads", di_threads, "Worker threads (default: cores)");

    // ---- converge ----
    auto* converge = app.add_subcommand("converge", "Trial-averaged convergence sweep");
    converge->set_config("--config", "", "Flat key=value config; flags override");
    std::string co_bench, co_out;
    int co_trials = 0, co_threads = 0;
    std::uint64_t co_seed = 0;
    std::vector<long long> co_N;
    bool co_timings = false;
    converge
        ->add_option("--benchmark", co_bench,
                     "One of: linear_ode, linear_ode_fixed, stuart_landau, "
                     "stuart_landau_fixed, transport, heat")
        ->required();
    converge->add_option("--trials", co_trials, "Trials per N (default: preset)");
    converge->add_option("--seed", co_seed, "Master seed");
    converge->add_option("--N", co_N, "Comma-separated N grid (default: preset)")
        ->delimiter(',');
    converge->add_option("-o,--out", co_out,
                         "Output CSV (default: <benchmark>_convergence.csv)");
    converge->add_flag("--timings", co_timings, "Record wall-clock time in the CSV");
    converge->add_option("--threads", co_threads, "Worker threads (default: cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen) {
            FamilySpec spec = default_spec(parse_system(gen_system));
            if (gen_n > 0) spec.n1 = spec.n2 = spec.n3 = gen_n;
            if (gen_n1 > 0) spec.n1 = gen_n1;
            if (gen_n2 > 0) spec.n2 = gen_n2;
            if (gen_n3 > 0) spec.n3 = gen_n3;
            if (!gen_r1.empty()) spec.range1 = {gen_r1[0], gen_r1[1]};
            if (!gen_r2.empty()) spec.range2 = {gen_r2[0], gen_r2[1]};
            if (!gen_r3.empty()) spec.range3 = {gen_r3[0], gen_r3[1]};
            if (gen_fixc_opt->count()) spec.fixed1 = gen_fixc;
            if (gen_fixc2_opt->count()) spec.fixed2 = gen_fixc2;
            spec.iid = gen_iid;
            spec.seed = gen_seed;
            PointCloud cloud = sample(spec);
            cloud.validate();
            save_csv(cloud, gen_out);
            std::printf("wrote %s: %lld rows, %lld columns (system %s, d=%d, m=%d)\n",
                        gen_out.c_str(), cloud.N(), cloud.D(),
                        system_name(spec.system).c_str(), cloud.layout.d, cloud.layout.m);
            return 0;
        }

        if (*prolong_cmd) {
            const PointCloud cloud = load_csv(pr_in);
            GmlsParams params{pr_k, pr_l, pr_stop, pr_max_iter};
            ProlongOptions options;
            options.cond_threshold = pr_cond;
            options.max_drop_fraction = pr_drop;
            options.threads = resolve_threads(pr_threads);
            const ProlongedCloud pro = prolongate(cloud, pr_p, params, options);
            save_csv(pro.cloud, pr_out);
            save_diagnostics(pro, pr_diag.empty() ? pr_out + ".diag.csv" : pr_diag);
            int dropped = 0;
            for (const auto& lvl : pro.levels) dropped += lvl.dropped_count;
            std::printf("wrote %s: %lld rows, %lld columns (level %d, dropped %d)\n",
                        pr_out.c_str(), pro.cloud.N(), pro.cloud.D(), pro.cloud.level,
                        dropped);
            return 0;
        }

        if (*discover) {
            if ((di_in_opt->count() == 0) == (di_bench_opt->count() == 0)) {
                throw CLI::ValidationError(
                    "discover", "exactly one of --input or --benchmark is required");
            }
            const bool policy_given =
                discover->count("--policy") || discover->count("--theta") ||
                discover->count("--gap-floor") || discover->count("--fixed-r") ||
                discover->count("--svd");
            const NullspacePolicy policy =
                build_policy(di_policy, di_theta, di_gap, di_fixed_r, di_svd);
            const int threads = resolve_threads(di_threads);

            SpectralReport report;
            AnsatzBasis basis;
            std::vector<std::string> names;
            double runtime = 0.0;

            if (di_bench_opt->count()) {
                Benchmark bench = make_benchmark(di_bench);
                if (di_n > 0) bench.spec.n1 = bench.spec.n2 = bench.spec.n3 = di_n;
                if (di_n1 > 0) bench.spec.n1 = di_n1;
                if (di_n2 > 0) bench.spec.n2 = di_n2;
                if (di_n3 > 0) bench.spec.n3 = di_n3;
                if (discover->count("-p")) bench.p = di_p;
                if (discover->count("-k")) bench.prolong_params.k = di_k;
                if (discover->count("--degree-chart")) bench.prolong_params.degree = di_l;
                if (di_nk > 0) bench.normal_params.k = di_nk;
                if (di_nl > 0) bench.normal_params.degree = di_nl;
                if (discover->count("--degree")) bench.ansatz_degree = di_degree;
                if (policy_given) bench.policy = policy;
                if (discover->count("--cond-threshold")) bench.options.cond_threshold = di_cond;
                if (discover->count("--max-drop")) bench.options.max_drop_fraction = di_drop;
                const RunResult result = run_benchmark(bench, di_seed, threads);
                report = result.report;
                const PointCloud probe = sample(bench.spec);
                const int n_true = probe.layout.d - probe.n_free_constant();
                basis = monomial_ansatz(n_true, probe.layout.m, bench.ansatz_degree);
                names = bench.var_names;
                runtime = result.runtime_s;
                print_spectrum(report);
                if (result.angle_valid) {
                    std::printf("reference comparison (%s): ||sin Theta|| = %.6g\n",
                                bench.reference_provenance.c_str(), result.angle.max_sine);
                }
            } else {
                PointCloud cloud = load_csv(di_in);
                if (cloud.N() == 0) throw std::runtime_error("discover: empty input cloud");
                const int p = di_p >= 0 ? di_p : std::max(1, cloud.level);
                GmlsParams pp{di_k, di_l, di_stop, di_max_iter};
                const int nk = di_nk > 0 ? di_nk : di_k;
                const int nl = di_nl > 0 ? di_nl : di_l;
                GmlsParams np{nk, nl, di_stop, di_max_iter};
                ProlongOptions options;
                options.cond_threshold = di_cond;
                options.max_drop_fraction = di_drop;
                options.threads = threads;

                const auto t0 = std::chrono::steady_clock::now();
                ProlongedCloud pro = prolongate(cloud, p, pp, options);
                PointCloud proj = project_free_constants(pro.cloud);
                NormalBundle bundle = normals(proj, np, options);
                const JetLayout classical{proj.layout.d, proj.layout.m, p};
                basis = monomial_ansatz(classical, di_degree);
                const ProlongedAnsatz lp = prolong_ansatz(basis, classical);
                std::vector<Eigen::MatrixXd> blocks(bundle.S.size());
                parallel_for(bundle.S.size(), threads, [&](std::size_t i) {
                    blocks[i] = pointwise_block(
                        evaluate_prolonged(lp, proj.data.row(bundle.kept[i]).transpose()),
                        bundle.S[i]);
                });
                report = nullspace(assemble(blocks), policy);
                runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                              .count();
                print_spectrum(report);
            }

            if (!di_spectrum.empty()) save_spectrum_csv(report, di_spectrum);
            if (di_timings) std::printf("runtime_s %.3f\n", runtime);
            return print_generators(report, basis, names);
        }

        if (*converge) {
            Benchmark bench = make_benchmark(co_bench);
            const std::vector<long long> Ns = co_N.empty() ? bench.sweep_N : co_N;
            if (Ns.empty()) {
                throw std::runtime_error("converge: benchmark '" + co_bench +
                                         "' has no default N grid; pass --N");
            }
            const int trials = co_trials > 0 ? co_trials : bench.trials;
            const ConvergenceResult result =
                convergence_sweep(bench, Ns, trials, co_seed, resolve_threads(co_threads));
            const std::string out_path =
                co_out.empty() ? co_bench + "_convergence.csv" : co_out;
            save_convergence_csv(result, out_path, co_timings);
            std::printf("wrote %s: %zu rows, slope %.4f\n", out_path.c_str(),
                        result.rows.size(), result.slope);
            for (const auto& row : result.rows) {
                std::printf("  N=%lld mean_sin=%.6g std=%.6g theory=%.6g%s\n", row.N,
                            row.mean_sin, row.std_sin, row.theory_rescaled,
                            row.partial ? " (partial)" : "");
            }
            return 0;
        }
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
