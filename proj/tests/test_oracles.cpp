#include "doctest.h"

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "liesym/experiments.hpp"
#include "liesym/invariance.hpp"
#include "liesym/pointcloud.hpp"
#include "oracles/analytic_families.hpp"
#include "oracles/flow_oracle.hpp"
#include "oracles/residual_nullspace.hpp"

using namespace liesym;
using namespace liesym::oracles;

namespace {

using ParamPartial =
    std::function<double(const Eigen::VectorXd&, const std::vector<int>&)>;

// Central finite-difference check: the closed-form partial one order up in
// axis q must match an FD quotient of the partial at `a`.
void fd_check(const ParamPartial& f, const Eigen::VectorXd& base,
              const std::vector<int>& a, int q, double tol = 1e-6) {
    std::vector<int> up = a;
    up[q] += 1;
    const double h = 1e-4;
    Eigen::VectorXd hi = base, lo = base;
    hi[q] += h;
    lo[q] -= h;
    const double fd = (f(hi, a) - f(lo, a)) / (2.0 * h);
    const double exact = f(base, up);
    INFO("axis ", q, " exact ", exact, " fd ", fd);
    CHECK(std::abs(exact - fd) <= tol * std::max(1.0, std::abs(exact)));
}

void check_jacobian_fd(const std::function<AnalyticJet(const Eigen::VectorXd&)>& jet,
                       const Eigen::VectorXd& base, double tol = 1e-6) {
    const AnalyticJet at_base = jet(base);
    const double h = 1e-4;
    REQUIRE(at_base.J.cols() == base.size());
    for (int q = 0; q < base.size(); ++q) {
        Eigen::VectorXd hi = base, lo = base;
        hi[q] += h;
        lo[q] -= h;
        const Eigen::VectorXd fd = (jet(hi).z - jet(lo).z) / (2.0 * h);
        for (int i = 0; i < fd.size(); ++i) {
            INFO("column ", q, " row ", i);
            CHECK(std::abs(at_base.J(i, q) - fd[i]) <=
                  tol * std::max(1.0, std::abs(at_base.J(i, q))));
        }
    }
}

}  // namespace

TEST_CASE("linear family partials match finite differences") {
    const ParamPartial f = [](const Eigen::VectorXd& p, const std::vector<int>& a) {
        return linear_ode_partial(p[0], p[1], a);
    };
    for (double x : {-0.7, 0.4})
        for (double C : {1.2, 1.9}) {
            Eigen::VectorXd base(2);
            base << x, C;
            for (int ax = 0; ax <= 2; ++ax)
                for (int aC = 0; aC <= 1; ++aC) {
                    fd_check(f, base, {ax, aC}, 0);
                    if (aC == 0) fd_check(f, base, {ax, aC}, 1);
                }
        }
}

TEST_CASE("Stuart-Landau partials match finite differences") {
    // Multi-indices with closed forms; FD pairs must stay inside this set.
    const std::vector<std::vector<int>> supported = {
        {0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0}, {1, 1, 0},
        {0, 2, 0}, {0, 0, 1}, {1, 0, 1}, {0, 1, 1}};
    auto in_set = [&](const std::vector<int>& a) {
        for (const auto& s : supported)
            if (s == a) return true;
        return false;
    };
    for (int b : {0, 1}) {
        const ParamPartial f = [b](const Eigen::VectorXd& p, const std::vector<int>& a) {
            return stuart_landau_partial(p[0], p[1], p[2], b, a);
        };
        for (double t : {0.35, 1.8}) {
            Eigen::VectorXd base(3);
            base << t, 0.9, 1.2;
            for (const auto& a : supported)
                for (int q = 0; q < 3; ++q) {
                    std::vector<int> up = a;
                    up[q] += 1;
                    if (in_set(up)) fd_check(f, base, a, q);
                }
        }
    }
}

TEST_CASE("transport partials match finite differences") {
    const ParamPartial f = [](const Eigen::VectorXd& p, const std::vector<int>& a) {
        return transport_partial(p[0], p[1], a);
    };
    Eigen::VectorXd base(2);
    base << 0.15, -0.3;
    for (int at = 0; at <= 3; ++at)
        for (int ax = 0; ax <= 3 - at; ++ax) {
            fd_check(f, base, {at, ax}, 0);
            fd_check(f, base, {at, ax}, 1);
        }
}

TEST_CASE("heat partials match finite differences") {
    const ParamPartial f = [](const Eigen::VectorXd& p, const std::vector<int>& a) {
        return heat_partial(p[0], p[1], a);
    };
    for (double t : {1.3, 1.8}) {
        Eigen::VectorXd base(2);
        base << t, 0.7;
        for (int at = 0; at <= 2; ++at)
            for (int ax = 0; ax <= 3; ++ax) {
                fd_check(f, base, {at, ax}, 0);
                fd_check(f, base, {at, ax}, 1);
            }
    }
}

TEST_CASE("embedding Jacobians match finite differences") {
    SUBCASE("linear classical family view") {
        Eigen::VectorXd base(2);
        base << 0.4, 1.5;
        check_jacobian_fd(
            [](const Eigen::VectorXd& p) {
                return linear_ode_jet(p[0], p[1], true, 1);
            },
            base);
    }
    SUBCASE("linear fixed-constant view") {
        Eigen::VectorXd base(1);
        base << -0.8;
        check_jacobian_fd(
            [](const Eigen::VectorXd& p) {
                return linear_ode_jet(p[0], 1.0, false, 2);
            },
            base);
    }
    SUBCASE("linear augmented family view") {
        Eigen::VectorXd base(2);
        base << 0.4, 1.5;
        check_jacobian_fd(
            [](const Eigen::VectorXd& p) {
                return linear_ode_family_jet(p[0], p[1], 1);
            },
            base);
    }
    SUBCASE("Stuart-Landau family view") {
        Eigen::VectorXd base(3);
        base << 0.6, 2.0, 1.15;
        check_jacobian_fd(
            [](const Eigen::VectorXd& p) {
                return stuart_landau_jet(p[0], p[1], p[2], true, 1);
            },
            base);
    }
    SUBCASE("Stuart-Landau fixed view") {
        Eigen::VectorXd base(1);
        base << 2.3;
        check_jacobian_fd(
            [](const Eigen::VectorXd& p) {
                return stuart_landau_jet(p[0], 0.0, 1.0, false, 1);
            },
            base);
    }
    SUBCASE("transport") {
        Eigen::VectorXd base(2);
        base << 0.2, -0.1;
        check_jacobian_fd(
            [](const Eigen::VectorXd& p) { return transport_jet(p[0], p[1], 2); },
            base);
    }
    SUBCASE("heat") {
        Eigen::VectorXd base(2);
        base << 1.4, 1.6;
        check_jacobian_fd(
            [](const Eigen::VectorXd& p) { return heat_jet(p[0], p[1], 2); }, base);
    }
}

TEST_CASE("analytic_jet dispatch agrees with the direct assemblers") {
    SUBCASE("linear family row") {
        FamilySpec spec;
        spec.system = FamilySpec::System::linear_ode;
        Eigen::VectorXd row(3);
        row << 0.3, 1.4, 1.4 * std::exp(0.3);  // (x, C, u)
        const AnalyticJet a = analytic_jet(spec, row, 1);
        const AnalyticJet b = linear_ode_family_jet(0.3, 1.4, 1);
        CHECK((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("linear fixed row") {
        FamilySpec spec;
        spec.system = FamilySpec::System::linear_ode;
        spec.fixed1 = 1.0;
        Eigen::VectorXd row(2);
        row << -0.5, std::exp(-0.5);  // (x, u)
        const AnalyticJet a = analytic_jet(spec, row, 1);
        const AnalyticJet b = linear_ode_jet(-0.5, 1.0, false, 1);
        CHECK((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("Stuart-Landau fixed row") {
        FamilySpec spec;
        spec.system = FamilySpec::System::stuart_landau;
        spec.fixed1 = 0.0;
        spec.fixed2 = 1.0;
        const AnalyticJet b = stuart_landau_jet(1.1, 0.0, 1.0, false, 1);
        Eigen::VectorXd row(3);
        row << 1.1, b.z[1], b.z[2];  // (t, x, y)
        const AnalyticJet a = analytic_jet(spec, row, 1);
        CHECK((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("heat row") {
        FamilySpec spec;
        spec.system = FamilySpec::System::heat;
        const AnalyticJet b = heat_jet(1.2, 1.7, 2);
        Eigen::VectorXd row(3);
        row << 1.2, 1.7, b.z[2];  // (t, x, u)
        const AnalyticJet a = analytic_jet(spec, row, 2);
        CHECK((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("flow oracle: rotation of a periodic-orbit patch") {
    Eigen::VectorXd base_x(1), constants(2);
    base_x << 0.8;
    constants << 1.3, 1.2;
    const GraphPatch patch = family_patch("stuart_landau", base_x, constants);
    const AnsatzBasis basis = monomial_ansatz(1, 2, 1);

    // Generator -y d/dx + x d/dy; monomials over (t, x, y) are (1, t, x, y).
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.K());
    c[basis.column(1, 3)] = -1.0;  // eta_x = -y
    c[basis.column(2, 2)] = 1.0;   // eta_y = x
    const Eigen::VectorXd sym = symbolic_prolongation(patch, basis, c);
    const JetPoint& z = patch.base_jet;  // (t, x, y, x_t, y_t)

    // First prolongation: eta_{x,t} = -y_t and eta_{y,t} = x_t.
    Eigen::VectorXd expected(5);
    expected << 0.0, -z[2], z[1], -z[4], z[3];
    CHECK((sym - expected).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::VectorXd flow =
        flow_prolongation_oracle(patch, basis, c, flow_params("stuart_landau"));
    CHECK((flow - sym).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("flow oracle: translation acts with zero jet components") {
    Eigen::VectorXd base_x(1), constants(1);
    base_x << 0.25;
    constants << 1.6;
    const GraphPatch patch = family_patch("linear_ode", base_x, constants);
    const AnsatzBasis basis = monomial_ansatz(1, 1, 1);

    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.K());
    c[basis.column(0, 0)] = 1.0;  // xi = 1
    const Eigen::VectorXd sym = symbolic_prolongation(patch, basis, c);
    Eigen::VectorXd expected(3);
    expected << 1.0, 0.0, 0.0;
    CHECK((sym - expected).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::VectorXd flow =
        flow_prolongation_oracle(patch, basis, c, flow_params("linear_ode"));
    CHECK((flow - sym).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("flow oracle: scaling u d/du lifts to u_x on an exponential graph") {
    Eigen::VectorXd base_x(1), constants(1);
    base_x << -0.4;
    constants << 1.25;
    const GraphPatch patch = family_patch("linear_ode", base_x, constants);
    const AnsatzBasis basis = monomial_ansatz(1, 1, 1);

    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.K());
    c[basis.column(1, 2)] = 1.0;  // eta = u; monomials over (x, u) are (1, x, u)
    const Eigen::VectorXd sym = symbolic_prolongation(patch, basis, c);
    const JetPoint& z = patch.base_jet;  // (x, u, u_x)
    Eigen::VectorXd expected(3);
    expected << 0.0, z[1], z[2];  // eta_{1,1} = u_x
    CHECK((sym - expected).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::VectorXd flow =
        flow_prolongation_oracle(patch, basis, c, flow_params("linear_ode"));
    CHECK((flow - sym).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("flow oracle agrees with the symbolic prolongation on random generators") {
    for (const char* family : {"linear_ode", "stuart_landau", "transport", "heat"}) {
        CAPTURE(family);
        double worst = 0.0;
        for (std::uint64_t trial = 0; trial < 50; ++trial)
            worst = std::max(worst, random_flow_check(family, 7000 + trial));
        INFO("worst deviation for ", family, ": ", worst);
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("residual nullspace oracle recovers the exact invariance nullspaces") {
    struct Expect {
        const char* name;
        int r;
    };
    for (const Expect& e : {Expect{"linear_ode", 2}, Expect{"linear_ode_fixed", 1},
                            Expect{"stuart_landau", 2}, Expect{"stuart_landau_fixed", 1},
                            Expect{"transport", 4}, Expect{"heat", 1}}) {
        CAPTURE(e.name);
        const ResidualOracle oracle = residual_nullspace_oracle(e.name);
        CHECK(oracle.r == e.r);
        const int K = oracle.basis.K();
        // Clear spectral separation between the null block and the rest.
        REQUIRE(oracle.r >= 1);
        CHECK(oracle.sigma[K - e.r - 1] / oracle.sigma[0] > 1e-6);
        CHECK(oracle.sigma[K - e.r] / oracle.sigma[0] < 1e-9);
        const SubspaceAngle angle =
            principal_angles(oracle.nullbasis, frozen_reference(e.name));
        INFO("max principal-angle sine ", angle.max_sine);
        CHECK(angle.max_sine < 1e-7);
    }
}

TEST_CASE("transport: oracle nullity disagrees with the published count") {
    const ResidualOracle oracle = residual_nullspace_oracle("transport");
    CHECK(oracle.r == 4);
    CHECK(published_nullity("transport") == 1);
    CHECK(oracle.r != published_nullity("transport"));
    // The published single-vector statement is inconsistent with the exact
    // nullspace of this first-order equation: every degree-1 multiple
    // f(t,x,u)(d/dt - d/dx) annihilates it, so the nullity is four.
}

TEST_CASE("heat: reported coefficient vector is not the exact null vector") {
    const ResidualOracle oracle = residual_nullspace_oracle("heat");
    REQUIRE(oracle.r == 1);
    const SubspaceAngle vs_true =
        principal_angles(oracle.nullbasis, frozen_reference("heat"));
    CHECK(vs_true.max_sine < 1e-7);
    const SubspaceAngle vs_reported =
        principal_angles(oracle.nullbasis, frozen_reference("heat_reported"));
    // The reported vector scales the last coefficient by 2 relative to the
    // exact one; the discrepancy is a fixed, order-0.3 angle.
    CHECK(vs_reported.max_sine > 0.25);
    CHECK(vs_reported.max_sine < 0.35);
    // Exact vector satisfies c1 = 2 c6 and c11 = -c6 (not -2 c6).
    const Eigen::VectorXd v = oracle.nullbasis.col(0) / oracle.nullbasis.col(0)[6];
    CHECK(v[1] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(v[11] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("benchmark reference subspaces match the oracle") {
    for (const char* name : {"linear_ode", "linear_ode_fixed", "stuart_landau",
                             "stuart_landau_fixed", "transport"}) {
        CAPTURE(name);
        const Benchmark b = make_benchmark(name);
        const ResidualOracle oracle = residual_nullspace_oracle(name);
        REQUIRE(b.reference.cols() == oracle.r);
        CHECK(principal_angles(b.reference, oracle.nullbasis).max_sine < 1e-7);
    }
    // The heat benchmark pins the reported vector, which differs from the
    // oracle by design; the acceptance runner documents that gap.
    const Benchmark heat = make_benchmark("heat");
    CHECK(principal_angles(heat.reference, frozen_reference("heat_reported")).max_sine <
          1e-9);
}
