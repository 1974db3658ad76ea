#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "liesym/jetspace.hpp"

namespace liesym {

// Role of one column of a PointCloud.
struct ColumnRole {
    enum class Kind { Independent, FreeConstant, Dependent, Jet };
    Kind kind = Kind::Independent;
    int index = 0;  // 1-based ordinal within the kind; for Jet: dependent ordinal
    MultiIndex J;   // only for Kind::Jet

    std::string token() const;
    static ColumnRole parse(const std::string& token);
    bool operator==(const ColumnRole& o) const;
};

// Scattered samples on a solution manifold (optionally prolonged into jet
// space). Column order follows the JetLayout ordering, with the free-constant
// columns appended after the true independents inside the d block.
struct PointCloud {
    Eigen::MatrixXd data;  // N x D
    std::vector<ColumnRole> roles;
    JetLayout layout;
    int level = 0;
    // Intrinsic manifold dimension used for tangent estimation. Equals
    // layout.d except for clouds whose free-constant columns were projected
    // out (the manifold dimension is unchanged by that projection).
    int intrinsic_d = 0;
    std::optional<std::uint64_t> seed;

    long long N() const { return data.rows(); }
    long long D() const { return data.cols(); }
    int n_true_independent() const;
    int n_free_constant() const;

    // Checks the layout/role/shape invariants and pairwise-distinct rows.
    // Throws std::runtime_error naming the first offending pair of rows.
    void validate() const;
};

// Canonical roles for a layout at `level`, with the trailing
// `n_free_constants` of the d block marked FreeConstant.
std::vector<ColumnRole> canonical_roles(const JetLayout& layout, int level,
                                        int n_free_constants);

// Sampling recipe for one of the four closed-form benchmark systems.
//
// Axis meaning per system:
//   linear_ode:    axis1 = x, axis2 = C   (fixed1 pins C; then d = 1)
//   stuart_landau: axis1 = t, axis2 = C1, axis3 = C2 (fixed1/fixed2 pin them)
//   transport:     axis1 = t, axis2 = x
//   heat:          axis1 = t, axis2 = x
struct FamilySpec {
    enum class System { linear_ode, stuart_landau, transport, heat };
    System system = System::linear_ode;
    int n1 = 0, n2 = 0, n3 = 0;  // per-axis sample counts (tensor grid)
    std::array<double, 2> range1{0.0, 1.0};
    std::array<double, 2> range2{0.0, 1.0};
    std::array<double, 2> range3{0.0, 1.0};
    std::optional<double> fixed1;  // linear_ode: C;  stuart_landau: C1
    std::optional<double> fixed2;  // stuart_landau: C2
    bool iid = false;  // fully i.i.d. rows instead of a tensor grid
    std::uint64_t seed = 0;
};

std::string system_name(FamilySpec::System s);
FamilySpec::System parse_system(const std::string& name);

PointCloud sample_linear_ode(const FamilySpec& spec);
PointCloud sample_stuart_landau(const FamilySpec& spec);
PointCloud sample_transport(const FamilySpec& spec);
PointCloud sample_heat(const FamilySpec& spec);
PointCloud sample(const FamilySpec& spec);

PointCloud load_csv(const std::string& path);
void save_csv(const PointCloud& cloud, const std::string& path);

}  // namespace liesym
