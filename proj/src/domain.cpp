#include "mixnl/domain.hpp"

#include "mixnl/errors.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <sstream>

namespace mixnl {

namespace {

constexpr double kEndpointTol = 1e-12;

std::string describe(const Interval& iv) {
    std::ostringstream os;
    os << '(' << iv.a << ", " << iv.b << ')';
    return os.str();
}

bool overlaps(const Interval& p, const Interval& q) noexcept {
    return std::max(p.a, q.a) < std::min(p.b, q.b) - kEndpointTol;
}

// Sizes of a one-sided graded partition of a segment of length `len`: the
// first element is at most h and sizes grow by a constant ratio <= kMaxGrading.
// Element sizes growing geometrically (ratio <= kMaxGrading) from h_lo and
// h_hi at the two ends up to h, uniform in between.
std::vector<double> ramped_sizes(double len, double h_lo, double h_hi, double h) {
    auto ramp = [&](double h0) {
        std::vector<double> r;
        for (double size = h0; size < h * (1.0 - 1e-12); size *= kMaxGrading) {
            r.push_back(size);
        }
        return r;
    };
    const auto left = ramp(h_lo);
    auto right = ramp(h_hi);
    const double ramps = std::accumulate(left.begin(), left.end(), 0.0) +
                         std::accumulate(right.begin(), right.end(), 0.0);
    if (left.empty() && right.empty()) {
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / h - 1e-9)));
        return std::vector<double>(n, len / static_cast<double>(n));
    }
    if (ramps >= len) {
        const double fine = std::min(h_lo, h_hi);
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / fine - 1e-9)));
        return std::vector<double>(n, len / static_cast<double>(n));
    }
    const double middle = len - ramps;
    const auto n_mid = static_cast<std::size_t>(std::max(1.0, std::ceil(middle / h - 1e-9)));
    std::vector<double> sizes = left;
    sizes.insert(sizes.end(), n_mid, middle / static_cast<double>(n_mid));
    std::reverse(right.begin(), right.end());
    sizes.insert(sizes.end(), right.begin(), right.end());
    return sizes;
}

std::vector<double> graded_sizes(double len, double h) {
    if (len <= h * (1.0 + 1e-12)) {
        return {len};
    }
    std::size_t n = 1;
    double reach = h;
    double size = h;
    while (reach < len) {
        size *= kMaxGrading;
        reach += size;
        ++n;
    }
    if (static_cast<double>(n) * h >= len) {
        const auto m = static_cast<std::size_t>(std::ceil(len / h - 1e-9));
        return std::vector<double>(m, len / static_cast<double>(m));
    }
    auto total = [&](double q) {
        double sum = 0.0;
        double term = h;
        for (std::size_t k = 0; k < n; ++k) {
            sum += term;
            term *= q;
        }
        return sum;
    };
    double lo = 1.0;
    double hi = kMaxGrading;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total(mid) < len ? lo : hi) = mid;
    }
    const double q = 0.5 * (lo + hi);
    std::vector<double> sizes(n);
    double term = h;
    for (auto& s : sizes) {
        s = term;
        term *= q;
    }
    // absorb the bisection residue so the segment closes exactly
    const double scale = len / total(q);
    for (auto& s : sizes) {
        s *= scale;
    }
    return sizes;
}

struct Segment {
    double lo;
    double hi;
    Region region;
};

Region classify_point(const DomainConfig& cfg, double x) {
    if (cfg.omega.contains_open(x)) {
        return Region::Omega;
    }
    for (const auto& n : cfg.neumann_set) {
        if (n.contains_open(x)) {
            return Region::Neumann;
        }
    }
    return Region::Dirichlet;
}

} // namespace

std::string_view to_string(NodeRole role) noexcept {
    switch (role) {
    case NodeRole::OmegaInterior: return "OmegaInterior";
    case NodeRole::OmegaBoundaryNeumann: return "OmegaBoundaryNeumann";
    case NodeRole::OmegaBoundaryDirichlet: return "OmegaBoundaryDirichlet";
    case NodeRole::NeumannSet: return "NeumannSet";
    case NodeRole::DirichletSet: return "DirichletSet";
    }
    return "?";
}

std::string_view to_string(Region region) noexcept {
    switch (region) {
    case Region::Omega: return "Omega";
    case Region::Neumann: return "Neumann";
    case Region::Dirichlet: return "Dirichlet";
    }
    return "?";
}

const DomainConfig& validate_config(const DomainConfig& cfg) {
    const double s = cfg.fractional_order;
    if (!(s > 0.0 && s < 1.0)) {
        throw OrderError("fractional order s must lie in (0,1), got " + std::to_string(s));
    }
    const double R = cfg.truncation_radius;
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw TruncationError("truncation radius must be positive and finite");
    }
    if (!(cfg.omega.a < cfg.omega.b)) {
        throw ConfigError("omega must be a nonempty interval, got " + describe(cfg.omega));
    }
    if (cfg.omega.a < -0.5 * R - kEndpointTol || cfg.omega.b > 0.5 * R + kEndpointTol) {
        throw TruncationError("omega " + describe(cfg.omega) + " is not inside B_{R/2} with R = " +
                              std::to_string(R));
    }
    const Interval omega_closure = cfg.omega;
    for (std::size_t i = 0; i < cfg.neumann_set.size(); ++i) {
        const auto& n = cfg.neumann_set[i];
        if (!(n.a < n.b)) {
            throw OverlapError("neumann interval " + describe(n) + " is empty");
        }
        if (n.a < -R - kEndpointTol || n.b > R + kEndpointTol) {
            throw TruncationError("neumann interval " + describe(n) + " is not inside B_R");
        }
        if (overlaps(n, omega_closure)) {
            throw OverlapError("neumann interval " + describe(n) + " intersects omega");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (overlaps(n, cfg.neumann_set[j])) {
                throw OverlapError("neumann intervals " + describe(n) + " and " +
                                   describe(cfg.neumann_set[j]) + " intersect");
            }
        }
    }
    if (cfg.pure_neumann) {
        auto sorted = cfg.neumann_set;
        std::sort(sorted.begin(), sorted.end(), [](auto& p, auto& q) { return p.a < q.a; });
        const double tol = 1e-9 * R;
        const bool ok = sorted.size() == 2 && std::abs(sorted[0].a + R) <= tol &&
                        std::abs(sorted[0].b - cfg.omega.a) <= tol &&
                        std::abs(sorted[1].a - cfg.omega.b) <= tol &&
                        std::abs(sorted[1].b - R) <= tol;
        if (!ok) {
            throw ConfigError("pure_neumann requires neumann_set = (-R, omega.a) U (omega.b, R)");
        }
    }
    return cfg;
}

Mesh1D build_mesh(const DomainConfig& cfg, double target_h) {
    validate_config(cfg);
    if (!(target_h > 0.0)) {
        throw ConfigError("mesh size h must be positive");
    }
    const double R = cfg.truncation_radius;

    if (cfg.omega.length() < 0.1 * target_h) {
        throw DegenerateRegion("omega is shorter than h/10");
    }
    for (const auto& n : cfg.neumann_set) {
        if (n.length() < 0.1 * target_h) {
            throw DegenerateRegion("neumann interval " + describe(n) + " is shorter than h/10");
        }
    }

    std::vector<double> breaks{-R, R, cfg.omega.a, cfg.omega.b};
    for (const auto& n : cfg.neumann_set) {
        breaks.push_back(n.a);
        breaks.push_back(n.b);
    }
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> unique_breaks;
    for (double x : breaks) {
        if (unique_breaks.empty() || x - unique_breaks.back() > kEndpointTol) {
            unique_breaks.push_back(x);
        }
    }

    std::vector<Segment> segments;
    for (std::size_t i = 0; i + 1 < unique_breaks.size(); ++i) {
        const double lo = unique_breaks[i];
        const double hi = unique_breaks[i + 1];
        segments.push_back({lo, hi, classify_point(cfg, 0.5 * (lo + hi))});
    }

    Mesh1D mesh;
    mesh.config = cfg;
    mesh.target_h = target_h;
    mesh.nodes.push_back(-R);

    auto append = [&](const std::vector<double>& sizes, Region region, double hi) {
        double x = mesh.nodes.back();
        for (std::size_t k = 0; k < sizes.size(); ++k) {
            x = (k + 1 == sizes.size()) ? hi : x + sizes[k];
            mesh.nodes.push_back(x);
            mesh.element_region.push_back(region);
        }
    };

    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        const double len = seg.hi - seg.lo;
        if (seg.region != Region::Dirichlet) {
            // A Dirichlet gap shorter than a few elements is invisible to
            // neighbouring hat functions of size h; refine towards it.
            auto start = [&](std::size_t j) {
                if (seg.region != Region::Neumann || j >= segments.size() ||
                    segments[j].region != Region::Dirichlet) {
                    return target_h;
                }
                const double gap = segments[j].hi - segments[j].lo;
                return std::min(target_h, gap / kGapResolution);
            };
            const double h_lo = i > 0 ? start(i - 1) : target_h;
            const double h_hi = start(i + 1);
            append(ramped_sizes(len, h_lo, h_hi, target_h), seg.region, seg.hi);
            continue;
        }
        const bool fine_lo = i > 0 && segments[i - 1].region != Region::Dirichlet;
        const bool fine_hi = i + 1 < segments.size() && segments[i + 1].region != Region::Dirichlet;
        std::vector<double> sizes;
        if (fine_lo && fine_hi) {
            sizes = graded_sizes(0.5 * len, target_h);
            auto mirrored = sizes;
            std::reverse(mirrored.begin(), mirrored.end());
            sizes.insert(sizes.end(), mirrored.begin(), mirrored.end());
        } else if (fine_lo) {
            sizes = graded_sizes(len, target_h);
        } else if (fine_hi) {
            sizes = graded_sizes(len, target_h);
            std::reverse(sizes.begin(), sizes.end());
        } else {
            const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / target_h - 1e-9)));
            sizes.assign(n, len / static_cast<double>(n));
        }
        append(sizes, Region::Dirichlet, seg.hi);
    }

    const std::size_t nn = mesh.nodes.size();
    const std::size_t ne = mesh.element_region.size();
    mesh.node_role.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        const Region left = i > 0 ? mesh.element_region[i - 1] : Region::Dirichlet;
        const Region right = i < ne ? mesh.element_region[i] : Region::Dirichlet;
        const bool outer_left = i == 0;
        const bool outer_right = i + 1 == nn;
        NodeRole role;
        if (left == Region::Omega && right == Region::Omega) {
            role = NodeRole::OmegaInterior;
        } else if (left == Region::Omega || right == Region::Omega) {
            const Region outside = left == Region::Omega ? right : left;
            role = outside == Region::Neumann ? NodeRole::OmegaBoundaryNeumann
                                              : NodeRole::OmegaBoundaryDirichlet;
        } else if ((outer_left || outer_right) && (left == Region::Neumann || right == Region::Neumann)) {
            role = cfg.far_field_dropped() ? NodeRole::NeumannSet : NodeRole::DirichletSet;
        } else if (left == Region::Neumann && right == Region::Neumann) {
            role = NodeRole::NeumannSet;
        } else {
            role = NodeRole::DirichletSet;
        }
        mesh.node_role[i] = role;
    }

    mesh.free_dof.assign(nn, -1);
    for (std::size_t i = 0; i < nn; ++i) {
        if (!is_constrained(mesh.node_role[i])) {
            mesh.free_dof[i] = static_cast<int>(mesh.dof_node.size());
            mesh.dof_node.push_back(i);
        }
    }
    return mesh;
}

std::size_t free_dof_count(const Mesh1D& mesh) noexcept { return mesh.dof_node.size(); }

} // namespace mixnl
