#include "liesym/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "liesym/rng.hpp"

namespace liesym {

std::string ColumnRole::token() const {
    switch (kind) {
        case Kind::Independent: return "x" + std::to_string(index);
        case Kind::FreeConstant: return "C" + std::to_string(index);
        case Kind::Dependent: return "u" + std::to_string(index);
        case Kind::Jet: {
            std::string s = "u" + std::to_string(index) + "_J(";
            for (std::size_t i = 0; i < J.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(J[i]);
            }
            return s + ")";
        }
    }
    return "?";
}

ColumnRole ColumnRole::parse(const std::string& token) {
    auto bad = [&]() -> ColumnRole {
        throw std::runtime_error("unknown role token '" + token + "'");
    };
    if (token.size() < 2) return bad();
    ColumnRole role;
    const char head = token[0];
    std::size_t jpos = token.find("_J(");
    if (head == 'u' && jpos != std::string::npos) {
        if (token.back() != ')') return bad();
        role.kind = Kind::Jet;
        try {
            role.index = std::stoi(token.substr(1, jpos - 1));
        } catch (...) {
            return bad();
        }
        std::string inner = token.substr(jpos + 3, token.size() - jpos - 4);
        std::stringstream ss(inner);
        std::string part;
        while (std::getline(ss, part, ',')) {
            try {
                role.J.push_back(std::stoi(part));
            } catch (...) {
                return bad();
            }
        }
        if (role.J.empty() || role.index < 1) return bad();
        return role;
    }
    if (head != 'x' && head != 'C' && head != 'u') return bad();
    try {
        role.index = std::stoi(token.substr(1));
    } catch (...) {
        return bad();
    }
    if (role.index < 1) return bad();
    role.kind = head == 'x'   ? Kind::Independent
                : head == 'C' ? Kind::FreeConstant
                              : Kind::Dependent;
    return role;
}

bool ColumnRole::operator==(const ColumnRole& o) const {
    return kind == o.kind && index == o.index && J == o.J;
}

int PointCloud::n_true_independent() const {
    int n = 0;
    for (const auto& r : roles) {
        if (r.kind == ColumnRole::Kind::Independent) ++n;
    }
    return n;
}

int PointCloud::n_free_constant() const {
    int n = 0;
    for (const auto& r : roles) {
        if (r.kind == ColumnRole::Kind::FreeConstant) ++n;
    }
    return n;
}

void PointCloud::validate() const {
    if (layout.d < 1 || layout.m < 1) {
        throw std::runtime_error("PointCloud: layout needs d >= 1, m >= 1");
    }
    if (level < 0 || level > layout.p) {
        throw std::runtime_error("PointCloud: level outside [0, p]");
    }
    const long long want = layout.jet_dimension(level);
    if (D() != want) {
        throw std::runtime_error("PointCloud: expected " + std::to_string(want) +
                                 " columns for level " + std::to_string(level) +
                                 ", got " + std::to_string(D()));
    }
    if (static_cast<long long>(roles.size()) != D()) {
        throw std::runtime_error("PointCloud: role count does not match columns");
    }
    const auto want_roles = canonical_roles(layout, level, n_free_constant());
    for (std::size_t i = 0; i < roles.size(); ++i) {
        if (!(roles[i] == want_roles[i])) {
            throw std::runtime_error("PointCloud: column " + std::to_string(i) +
                                     " has role '" + roles[i].token() +
                                     "', expected '" + want_roles[i].token() + "'");
        }
    }
    if (n_true_independent() + n_free_constant() != layout.d) {
        throw std::runtime_error("PointCloud: independent block does not fill d");
    }
    if (intrinsic_d < 1 || intrinsic_d > static_cast<int>(D())) {
        throw std::runtime_error("PointCloud: intrinsic_d out of range");
    }

    // Pairwise-distinct rows, reported by index.
    std::vector<long long> order(N());
    std::iota(order.begin(), order.end(), 0LL);
    const Eigen::MatrixXd& M = data;
    std::sort(order.begin(), order.end(), [&](long long a, long long b) {
        for (long long c = 0; c < M.cols(); ++c) {
            if (M(a, c) != M(b, c)) return M(a, c) < M(b, c);
        }
        return a < b;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        const long long a = order[i - 1], b = order[i];
        if ((M.row(a).array() == M.row(b).array()).all()) {
            throw std::runtime_error("PointCloud: duplicate rows " +
                                     std::to_string(std::min(a, b)) + " and " +
                                     std::to_string(std::max(a, b)));
        }
    }
}

std::vector<ColumnRole> canonical_roles(const JetLayout& layout, int level,
                                        int n_free_constants) {
    if (n_free_constants < 0 || n_free_constants >= layout.d + 1) {
        throw std::invalid_argument("canonical_roles: bad free-constant count");
    }
    std::vector<ColumnRole> roles;
    const int n_true = layout.d - n_free_constants;
    for (int i = 0; i < n_true; ++i) {
        roles.push_back({ColumnRole::Kind::Independent, i + 1, {}});
    }
    for (int i = 0; i < n_free_constants; ++i) {
        roles.push_back({ColumnRole::Kind::FreeConstant, i + 1, {}});
    }
    for (int b = 0; b < layout.m; ++b) {
        roles.push_back({ColumnRole::Kind::Dependent, b + 1, {}});
    }
    for (int k = 1; k <= level; ++k) {
        for (const auto& [b, J] : layout.level_coordinates(k)) {
            roles.push_back({ColumnRole::Kind::Jet, b + 1, J});
        }
    }
    return roles;
}

std::string system_name(FamilySpec::System s) {
    switch (s) {
        case FamilySpec::System::linear_ode: return "linear_ode";
        case FamilySpec::System::stuart_landau: return "stuart_landau";
        case FamilySpec::System::transport: return "transport";
        case FamilySpec::System::heat: return "heat";
    }
    return "?";
}

FamilySpec::System parse_system(const std::string& name) {
    if (name == "linear_ode") return FamilySpec::System::linear_ode;
    if (name == "stuart_landau") return FamilySpec::System::stuart_landau;
    if (name == "transport") return FamilySpec::System::transport;
    if (name == "heat") return FamilySpec::System::heat;
    throw std::invalid_argument("unknown system '" + name + "'");
}

namespace {

struct Axis {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    std::uint64_t id = 0;  // rng axis stream
};

void check_axis(const Axis& a, const std::string& what) {
    if (a.n < 1) throw std::invalid_argument(what + ": count must be >= 1");
    if (!(a.lo < a.hi)) throw std::invalid_argument(what + ": empty range");
}

// Tensor grid (independent draws per axis) or fully i.i.d. rows.
Eigen::MatrixXd draw_base(const std::vector<Axis>& axes, bool iid, std::uint64_t seed) {
    long long rows = 1;
    for (const auto& a : axes) rows *= a.n;
    Eigen::MatrixXd out(rows, static_cast<long long>(axes.size()));
    if (iid) {
        for (long long r = 0; r < rows; ++r) {
            for (std::size_t a = 0; a < axes.size(); ++a) {
                out(r, a) = uniform_in(axes[a].lo, axes[a].hi, seed, axes[a].id, r);
            }
        }
        return out;
    }
    std::vector<std::vector<double>> vals(axes.size());
    for (std::size_t a = 0; a < axes.size(); ++a) {
        vals[a].resize(axes[a].n);
        for (int j = 0; j < axes[a].n; ++j) {
            vals[a][j] = uniform_in(axes[a].lo, axes[a].hi, seed, axes[a].id, j);
        }
    }
    std::vector<int> idx(axes.size(), 0);
    for (long long r = 0; r < rows; ++r) {
        for (std::size_t a = 0; a < axes.size(); ++a) out(r, a) = vals[a][idx[a]];
        for (int a = static_cast<int>(axes.size()) - 1; a >= 0; --a) {
            if (++idx[a] < axes[a].n) break;
            idx[a] = 0;
        }
    }
    return out;
}

PointCloud finish(Eigen::MatrixXd data, int d, int nf, int m, const FamilySpec& spec) {
    PointCloud cloud;
    cloud.data = std::move(data);
    cloud.layout = JetLayout{d, m, 0};
    cloud.level = 0;
    cloud.intrinsic_d = d;
    cloud.seed = spec.seed;
    cloud.roles = canonical_roles(cloud.layout, 0, nf);
    return cloud;
}

}  // namespace

PointCloud sample_linear_ode(const FamilySpec& spec) {
    if (spec.system != FamilySpec::System::linear_ode) {
        throw std::invalid_argument("sample_linear_ode: wrong system");
    }
    std::vector<Axis> axes{{spec.range1[0], spec.range1[1], spec.n1, 1}};
    check_axis(axes[0], "linear_ode x axis");
    const bool c_free = !spec.fixed1.has_value();
    if (c_free) {
        axes.push_back({spec.range2[0], spec.range2[1], spec.n2, 2});
        check_axis(axes[1], "linear_ode C axis");
    }
    Eigen::MatrixXd base = draw_base(axes, spec.iid, spec.seed);
    const long long N = base.rows();
    const int d = c_free ? 2 : 1;
    Eigen::MatrixXd data(N, d + 1);
    for (long long r = 0; r < N; ++r) {
        const double x = base(r, 0);
        const double C = c_free ? base(r, 1) : *spec.fixed1;
        data(r, 0) = x;
        if (c_free) data(r, 1) = C;
        data(r, d) = C * std::exp(x);
    }
    return finish(std::move(data), d, c_free ? 1 : 0, 1, spec);
}

PointCloud sample_stuart_landau(const FamilySpec& spec) {
    if (spec.system != FamilySpec::System::stuart_landau) {
        throw std::invalid_argument("sample_stuart_landau: wrong system");
    }
    std::vector<Axis> axes{{spec.range1[0], spec.range1[1], spec.n1, 1}};
    check_axis(axes[0], "stuart_landau t axis");
    const bool c1_free = !spec.fixed1.has_value();
    const bool c2_free = !spec.fixed2.has_value();
    if (c1_free) {
        axes.push_back({spec.range2[0], spec.range2[1], spec.n2, 2});
        check_axis(axes.back(), "stuart_landau C1 axis");
    }
    if (c2_free) {
        axes.push_back({spec.range3[0], spec.range3[1], spec.n3, 3});
        check_axis(axes.back(), "stuart_landau C2 axis");
    }
    Eigen::MatrixXd base = draw_base(axes, spec.iid, spec.seed);
    const long long N = base.rows();
    const int d = 1 + (c1_free ? 1 : 0) + (c2_free ? 1 : 0);
    Eigen::MatrixXd data(N, d + 2);
    for (long long r = 0; r < N; ++r) {
        int col = 0;
        const double t = base(r, col++);
        const double C1 = c1_free ? base(r, col++) : *spec.fixed1;
        const double C2 = c2_free ? base(r, col++) : *spec.fixed2;
        if (C2 == 0.0) throw std::runtime_error("sample_stuart_landau: C2 = 0");
        const double a = 1.0 - 1.0 / (C2 * C2);
        const double radicand = 1.0 - a * std::exp(-2.0 * t);
        if (radicand <= 0.0) {
            throw std::runtime_error("sample_stuart_landau: nonpositive radicand at t=" +
                                     std::to_string(t));
        }
        const double g = 1.0 / std::sqrt(radicand);
        const double phi = -t + C1;
        int out = 0;
        data(r, out++) = t;
        if (c1_free) data(r, out++) = C1;
        if (c2_free) data(r, out++) = C2;
        data(r, out++) = std::cos(phi) * g;
        data(r, out++) = std::sin(phi) * g;
    }
    return finish(std::move(data), d, (c1_free ? 1 : 0) + (c2_free ? 1 : 0), 2, spec);
}

PointCloud sample_transport(const FamilySpec& spec) {
    if (spec.system != FamilySpec::System::transport) {
        throw std::invalid_argument("sample_transport: wrong system");
    }
    std::vector<Axis> axes{{spec.range1[0], spec.range1[1], spec.n1, 1},
                           {spec.range2[0], spec.range2[1], spec.n2, 2}};
    check_axis(axes[0], "transport t axis");
    check_axis(axes[1], "transport x axis");
    Eigen::MatrixXd base = draw_base(axes, spec.iid, spec.seed);
    const long long N = base.rows();
    Eigen::MatrixXd data(N, 3);
    for (long long r = 0; r < N; ++r) {
        data(r, 0) = base(r, 0);
        data(r, 1) = base(r, 1);
        data(r, 2) = std::sin(base(r, 0) + base(r, 1));
    }
    return finish(std::move(data), 2, 0, 1, spec);
}

PointCloud sample_heat(const FamilySpec& spec) {
    if (spec.system != FamilySpec::System::heat) {
        throw std::invalid_argument("sample_heat: wrong system");
    }
    std::vector<Axis> axes{{spec.range1[0], spec.range1[1], spec.n1, 1},
                           {spec.range2[0], spec.range2[1], spec.n2, 2}};
    check_axis(axes[0], "heat t axis");
    check_axis(axes[1], "heat x axis");
    if (axes[0].lo <= 0.0) throw std::invalid_argument("heat: t range must be positive");
    Eigen::MatrixXd base = draw_base(axes, spec.iid, spec.seed);
    const long long N = base.rows();
    Eigen::MatrixXd data(N, 3);
    for (long long r = 0; r < N; ++r) {
        const double t = base(r, 0), x = base(r, 1);
        data(r, 0) = t;
        data(r, 1) = x;
        data(r, 2) = std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * M_PI * t);
    }
    return finish(std::move(data), 2, 0, 1, spec);
}

PointCloud sample(const FamilySpec& spec) {
    switch (spec.system) {
        case FamilySpec::System::linear_ode: return sample_linear_ode(spec);
        case FamilySpec::System::stuart_landau: return sample_stuart_landau(spec);
        case FamilySpec::System::transport: return sample_transport(spec);
        case FamilySpec::System::heat: return sample_heat(spec);
    }
    throw std::invalid_argument("sample: unknown system");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(part);
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

}  // namespace

PointCloud load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("load_csv: empty file");
    header = trim(header);
    const std::string magic = "# liesym v1";
    if (header.rfind(magic, 0) != 0) {
        throw std::runtime_error("load_csv: malformed header (expected '" + magic + "...')");
    }

    PointCloud cloud;
    int d = -1, m = -1, p = -1, level = -1, intrinsic = -1;
    for (const auto& field : split(header.substr(magic.size()), ';')) {
        const std::string kv = trim(field);
        if (kv.empty()) continue;
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("load_csv: malformed header field '" + kv + "'");
        }
        const std::string key = trim(kv.substr(0, eq));
        const std::string val = trim(kv.substr(eq + 1));
        try {
            if (key == "d") d = std::stoi(val);
            else if (key == "m") m = std::stoi(val);
            else if (key == "p") p = std::stoi(val);
            else if (key == "level") level = std::stoi(val);
            else if (key == "intrinsic_d") intrinsic = std::stoi(val);
            else if (key == "seed") cloud.seed = std::stoull(val);
            else throw std::runtime_error("load_csv: unknown header key '" + key + "'");
        } catch (const std::runtime_error&) {
            throw;
        } catch (...) {
            throw std::runtime_error("load_csv: malformed header value '" + kv + "'");
        }
    }
    if (d < 1 || m < 1 || p < 0 || level < 0) {
        throw std::runtime_error("load_csv: header must declare d, m, p, level");
    }
    cloud.layout = JetLayout{d, m, p};
    cloud.level = level;
    cloud.intrinsic_d = intrinsic > 0 ? intrinsic : d;

    std::string role_line;
    if (!std::getline(in, role_line)) throw std::runtime_error("load_csv: missing role line");
    {
        // Split on commas outside parentheses: Jet tokens embed commas.
        std::string current;
        int depth = 0;
        auto flush = [&]() {
            const std::string tok = trim(current);
            if (!tok.empty()) cloud.roles.push_back(ColumnRole::parse(tok));
            current.clear();
        };
        for (char ch : trim(role_line)) {
            if (ch == '(') ++depth;
            if (ch == ')') --depth;
            if (ch == ',' && depth == 0) {
                flush();
            } else {
                current += ch;
            }
        }
        flush();
    }

    const std::size_t Dcols = cloud.roles.size();
    std::vector<double> values;
    std::string line;
    long long rows = 0;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto parts = split(t, ',');
        if (parts.size() != Dcols) {
            throw std::runtime_error("load_csv: ragged row " + std::to_string(rows) +
                                     " (" + std::to_string(parts.size()) + " fields, expected " +
                                     std::to_string(Dcols) + ")");
        }
        for (const auto& part : parts) {
            const std::string v = trim(part);
            char* end = nullptr;
            const double x = std::strtod(v.c_str(), &end);
            if (end == v.c_str() || *end != '\0') {
                throw std::runtime_error("load_csv: bad numeric field '" + v + "' in row " +
                                         std::to_string(rows));
            }
            values.push_back(x);
        }
        ++rows;
    }
    cloud.data.resize(rows, static_cast<long long>(Dcols));
    for (long long r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < Dcols; ++c) {
            cloud.data(r, c) = values[r * Dcols + c];
        }
    }
    cloud.validate();
    return cloud;
}

void save_csv(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw std::runtime_error("save_csv: cannot open '" + path + "' for writing");
    out << "# liesym v1; d=" << cloud.layout.d << "; m=" << cloud.layout.m
        << "; p=" << cloud.layout.p << "; level=" << cloud.level;
    if (cloud.intrinsic_d != cloud.layout.d) out << "; intrinsic_d=" << cloud.intrinsic_d;
    if (cloud.seed) out << "; seed=" << *cloud.seed;
    out << "\n";
    for (std::size_t i = 0; i < cloud.roles.size(); ++i) {
        out << (i ? "," : "") << cloud.roles[i].token();
    }
    out << "\n";
    char buf[64];
    for (long long r = 0; r < cloud.N(); ++r) {
        for (long long c = 0; c < cloud.D(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", cloud.data(r, c));
            out << (c ? "," : "") << buf;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("save_csv: write failure on '" + path + "'");
}

}  // namespace liesym
