#include "doctest.h"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "liesym/pointcloud.hpp"
#include "liesym/prolong.hpp"

using namespace liesym;

namespace {

PointCloud graph_cloud_1d(int N, double lo, double hi,
                          const std::function<double(double)>& f) {
    PointCloud cloud;
    cloud.layout = JetLayout{1, 1, 0};
    cloud.level = 0;
    cloud.intrinsic_d = 1;
    cloud.roles = canonical_roles(cloud.layout, 0, 0);
    cloud.data.resize(N, 2);
    for (int i = 0; i < N; ++i) {
        const double x = lo + (hi - lo) * i / (N - 1);
        cloud.data(i, 0) = x;
        cloud.data(i, 1) = f(x);
    }
    return cloud;
}

}  // namespace

TEST_CASE("chain rule on an exponential curve") {
    // Frame of the graph (x, e^x): tangent direction (1, e^x) normalized.
    const double x = 0.7, ex = std::exp(x);
    TangentFrame frame;
    frame.T.resize(2, 1);
    frame.T << 1.0, ex;
    frame.T /= frame.T.norm();
    frame.Nrm.resize(2, 1);
    frame.Nrm << -ex, 1.0;
    frame.Nrm /= frame.Nrm.norm();

    const JetLayout layout{1, 1, 1};
    const ChainRuleSystem sys = chain_rule_system(frame, layout, 0);
    REQUIRE(sys.X.rows() == 1);
    REQUIRE(sys.X.cols() == 1);
    CHECK(sys.X(0, 0) == doctest::Approx(ex).epsilon(1e-14));
    CHECK(sys.cond == doctest::Approx(1.0).epsilon(1e-14));

    double cond = 0.0;
    const auto vals = derivatives_at_point(frame, layout, 0, &cond);
    REQUIRE(vals.size() == 1);
    CHECK(vals[0] == doctest::Approx(ex).epsilon(1e-14));
    CHECK(cond == sys.cond);
}

TEST_CASE("chain rule with an axis-aligned frame is a read-off") {
    TangentFrame frame;
    frame.T.resize(3, 2);
    frame.T << 1.0, 0.0, 0.0, 1.0, 0.25, -2.0;
    const JetLayout layout{2, 1, 1};
    const ChainRuleSystem sys = chain_rule_system(frame, layout, 0);
    CHECK(sys.A == Eigen::MatrixXd::Identity(2, 2));
    CHECK(sys.X == sys.B);
    CHECK(sys.X(0, 0) == 0.25);
    CHECK(sys.X(1, 0) == -2.0);
}

TEST_CASE("mixed partials are averaged over their routes") {
    // Level-1 frame for d = 2: rows (x1, x2, u, u_(1,0), u_(0,1)).
    TangentFrame frame;
    frame.T.resize(5, 2);
    frame.T << 1.0, 0.0,   //
        0.0, 1.0,          //
        0.5, 0.5,          //
        3.0, 5.0,          // c1, d1
        7.0, 11.0;         // c2, d2
    const JetLayout layout{2, 1, 2};
    double cond = 0.0;
    const auto vals = derivatives_at_point(frame, layout, 1, &cond);
    REQUIRE(vals.size() == 3);          // (2,0), (1,1), (0,2)
    CHECK(vals[0] == 3.0);              // d u_(1,0) / dx1
    CHECK(vals[1] == (7.0 + 5.0) / 2);  // mean of the two routes into u_(1,1)
    CHECK(vals[2] == 11.0);             // d u_(0,1) / dx2
    CHECK(cond == doctest::Approx(1.0));
}

TEST_CASE("chain rule rejects mismatched frames") {
    TangentFrame frame;
    frame.T = Eigen::MatrixXd::Identity(3, 2);
    CHECK_THROWS_AS((chain_rule_system(frame, JetLayout{1, 1, 1}, 0)),
                    std::invalid_argument);  // frame cols != d
    CHECK_THROWS_AS((chain_rule_system(frame, JetLayout{2, 3, 1}, 0)),
                    std::invalid_argument);  // rows != jet dimension
}

TEST_CASE("affine graphs prolong exactly") {
    const PointCloud cloud =
        graph_cloud_1d(120, -1.0, 1.0, [](double x) { return 2.0 + 3.0 * x; });
    GmlsParams params;
    params.k = 8;
    params.degree = 2;
    const ProlongedCloud pc = prolongate(cloud, 2, params);
    CHECK(pc.cloud.level == 2);
    CHECK(pc.cloud.layout.p == 2);
    REQUIRE(pc.cloud.D() == 4);
    REQUIRE(pc.levels.size() == 2);
    CHECK(pc.levels[0].level == 0);
    CHECK(pc.levels[1].level == 1);
    CHECK(pc.levels[0].dropped_count == 0);
    CHECK(pc.levels[1].dropped_count == 0);
    for (long long i = 0; i < pc.cloud.N(); ++i) {
        CHECK(pc.cloud.data(i, 2) == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(std::abs(pc.cloud.data(i, 3)) <= 1e-8);
    }
}

TEST_CASE("lower-level columns are copied bit-exactly") {
    const PointCloud cloud =
        graph_cloud_1d(200, 0.0, 1.0, [](double x) { return std::sin(x); });
    GmlsParams params;
    params.k = 10;
    params.degree = 3;
    const ProlongedCloud pc = prolongate_once(cloud, params);
    REQUIRE(pc.levels.front().dropped_count == 0);
    CHECK(pc.cloud.data.leftCols(2) == cloud.data);
    CHECK(pc.cloud.level == 1);
    CHECK(pc.cloud.roles.back().token() == "u1_J(1)");
}

TEST_CASE("derivatives of a smooth graph are accurate") {
    const PointCloud cloud =
        graph_cloud_1d(1200, -1.0, 1.0, [](double x) { return std::sin(2.0 * x); });
    GmlsParams params;
    params.k = 12;
    params.degree = 4;
    const ProlongedCloud pc = prolongate(cloud, 2, params);
    REQUIRE(pc.levels[0].dropped_count == 0);
    double worst1 = 0.0, worst2 = 0.0;
    for (long long i = 0; i < pc.cloud.N(); ++i) {
        const double x = pc.cloud.data(i, 0);
        worst1 = std::max(worst1,
                          std::abs(pc.cloud.data(i, 2) - 2.0 * std::cos(2.0 * x)));
        worst2 = std::max(worst2,
                          std::abs(pc.cloud.data(i, 3) + 4.0 * std::sin(2.0 * x)));
    }
    CHECK(worst1 <= 1e-6);
    CHECK(worst2 <= 1e-3);
}

TEST_CASE("transport sheet lifts to its known first derivatives") {
    FamilySpec spec;
    spec.system = FamilySpec::System::transport;
    spec.n1 = spec.n2 = 30;
    spec.range1 = spec.range2 = {-0.5, 0.5};
    spec.iid = true;
    spec.seed = 17;
    const PointCloud cloud = sample(spec);
    GmlsParams params;
    params.k = 12;
    params.degree = 3;
    const ProlongedCloud pc = prolongate_once(cloud, params);
    REQUIRE(pc.cloud.D() == 5);
    double worst = 0.0;
    for (long long i = 0; i < pc.cloud.N(); ++i) {
        const double c = std::cos(pc.cloud.data(i, 0) + pc.cloud.data(i, 1));
        worst = std::max(worst, std::abs(pc.cloud.data(i, 3) - c));
        worst = std::max(worst, std::abs(pc.cloud.data(i, 4) - c));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("heat sheet reaches second order with the expected columns") {
    FamilySpec spec;
    spec.system = FamilySpec::System::heat;
    spec.n1 = spec.n2 = 26;
    spec.range1 = spec.range2 = {1.0, 2.0};
    spec.iid = true;
    spec.seed = 23;
    const PointCloud cloud = sample(spec);
    GmlsParams params;
    params.k = 30;
    params.degree = 4;
    const ProlongedCloud pc = prolongate(cloud, 2, params);
    REQUIRE(pc.cloud.D() == 8);
    CHECK(pc.cloud.roles[5].token() == "u1_J(2,0)");
    CHECK(pc.cloud.roles[6].token() == "u1_J(1,1)");
    CHECK(pc.cloud.roles[7].token() == "u1_J(0,2)");
    // The samples solve u_t = u_xx; the lifted columns should nearly do so.
    double worst = 0.0;
    for (long long i = 0; i < pc.cloud.N(); ++i) {
        worst = std::max(worst, std::abs(pc.cloud.data(i, 3) - pc.cloud.data(i, 7)));
    }
    CHECK(worst <= 5e-2);
}

TEST_CASE("prolongation to the current level is the identity") {
    const PointCloud cloud =
        graph_cloud_1d(50, 0.0, 1.0, [](double x) { return x * x; });
    GmlsParams params;
    params.k = 8;
    params.degree = 2;
    const ProlongedCloud pc = prolongate(cloud, 0, params);
    CHECK(pc.cloud.data == cloud.data);
    CHECK(pc.cloud.level == 0);
    CHECK(pc.levels.empty());
    CHECK_THROWS_AS(prolongate(prolongate(cloud, 1, params).cloud, 0, params),
                    std::invalid_argument);
}

TEST_CASE("stencil size is validated against the basis and the cloud") {
    const PointCloud cloud =
        graph_cloud_1d(40, 0.0, 1.0, [](double x) { return x; });
    GmlsParams params;
    params.k = 3;
    params.degree = 3;  // basis size 4
    CHECK_THROWS_AS(prolongate_once(cloud, params), std::invalid_argument);
    params.k = 41;
    CHECK_THROWS_AS(prolongate_once(cloud, params), std::invalid_argument);
}

TEST_CASE("degenerate points are dropped and budgeted") {
    const PointCloud cloud =
        graph_cloud_1d(100, 0.0, 1.0, [](double x) { return std::sin(x); });
    GmlsParams params;
    params.k = 8;
    params.degree = 2;
    ProlongOptions options;
    options.cond_threshold = 0.0;  // marks every point degenerate
    CHECK_THROWS_WITH_AS(prolongate_once(cloud, params, options),
                         doctest::Contains("budget"), std::runtime_error);
    options.max_drop_fraction = 2.0;  // unlimited budget: returns an empty lift
    const ProlongedCloud pc = prolongate_once(cloud, params, options);
    CHECK(pc.cloud.N() == 0);
    CHECK(pc.levels.front().dropped_count == 100);
    for (const auto& p : pc.levels.front().points) CHECK(p.dropped);
}

TEST_CASE("thread count does not change the result") {
    FamilySpec spec;
    spec.system = FamilySpec::System::transport;
    spec.n1 = spec.n2 = 16;
    spec.range1 = spec.range2 = {-0.5, 0.5};
    spec.iid = true;
    spec.seed = 31;
    const PointCloud cloud = sample(spec);
    GmlsParams params;
    params.k = 12;
    params.degree = 3;
    ProlongOptions serial, parallel;
    serial.threads = 1;
    parallel.threads = 4;
    const ProlongedCloud a = prolongate_once(cloud, params, serial);
    const ProlongedCloud b = prolongate_once(cloud, params, parallel);
    CHECK(a.cloud.data == b.cloud.data);
}

TEST_CASE("free-constant projection keeps the classical jet") {
    FamilySpec spec;
    spec.system = FamilySpec::System::linear_ode;
    spec.n1 = 30;
    spec.n2 = 20;
    spec.range1 = {-1.0, 1.0};
    spec.range2 = {1.0, 2.0};
    // Tensor grids put whole stencils on straight C-fibers of this family,
    // which de-poises the surface fit; sample in general position instead.
    spec.iid = true;
    spec.seed = 41;
    const PointCloud cloud = sample(spec);
    GmlsParams params;
    params.k = 14;
    params.degree = 3;
    const ProlongedCloud pc = prolongate_once(cloud, params);
    REQUIRE(pc.cloud.D() == 5);  // x, C, u, u_(1,0), u_(0,1)

    const PointCloud proj = project_free_constants(pc.cloud);
    CHECK(proj.layout.d == 1);
    CHECK(proj.layout.m == 1);
    CHECK(proj.level == 1);
    CHECK(proj.intrinsic_d == 2);  // the manifold is still a surface
    REQUIRE(proj.D() == 3);
    CHECK(proj.roles[0].token() == "x1");
    CHECK(proj.roles[1].token() == "u1");
    CHECK(proj.roles[2].token() == "u1_J(1)");
    CHECK(proj.data.col(0) == pc.cloud.data.col(0));
    CHECK(proj.data.col(1) == pc.cloud.data.col(2));
    CHECK(proj.data.col(2) == pc.cloud.data.col(3));

    // du/dx at fixed C is C e^x = u.
    for (long long i = 0; i < proj.N(); ++i) {
        CHECK(proj.data(i, 2) ==
              doctest::Approx(proj.data(i, 1)).epsilon(1e-3));
    }

    // Further lifting of a projected cloud must be refused: the manifold
    // dimension no longer matches the retained coordinate block.
    CHECK_THROWS_AS(prolongate_once(proj, params), std::invalid_argument);

    // Projection without free constants is the identity.
    const PointCloud same = project_free_constants(proj);
    CHECK(same.data == proj.data);
    CHECK(same.layout == proj.layout);
}
