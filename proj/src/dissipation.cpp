#include "mixnl/dissipation.hpp"

#include "mixnl/assembly.hpp"
#include "mixnl/errors.hpp"
#include "mixnl/quadrature.hpp"
#include "mixnl/spectral.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace mixnl {

namespace {

constexpr double kTouchTol = 1e-12;

void skip_spaces(std::string_view text, std::size_t& pos) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
    }
}

double read_number(std::string_view text, std::size_t& pos) {
    skip_spaces(text, pos);
    const std::string tail(text.substr(pos));
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(tail, &used);
    } catch (const std::exception&) {
        throw ScheduleError("malformed endpoint formula '" + std::string(text) + "'");
    }
    pos += used;
    return value;
}

bool consume(std::string_view text, std::size_t& pos, std::string_view token) {
    skip_spaces(text, pos);
    if (text.substr(pos, token.size()) == token) {
        pos += token.size();
        return true;
    }
    return false;
}

// Dirichlet intervals must keep clear of the closure of Omega and each other.
void check_dirichlet_sets(const DissipationSchedule& sched, const std::vector<Interval>& sets, int k) {
    const double R = sched.truncation_radius;
    const auto where = " at step " + std::to_string(k);
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto& d = sets[i];
        if (!(d.a < d.b)) {
            throw ScheduleError("empty Dirichlet interval" + where);
        }
        if (d.a < -R || d.b > R) {
            throw ScheduleError("Dirichlet interval leaves B_R" + where);
        }
        if (std::max(d.a, sched.omega.a) < std::min(d.b, sched.omega.b) + kTouchTol) {
            // overlap or touching the closure of Omega
            const double dist = d.a >= sched.omega.b ? d.a - sched.omega.b : sched.omega.a - d.b;
            if (!(dist > kTouchTol)) {
                throw ScheduleError("Dirichlet interval touches the closure of Omega" + where);
            }
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (std::max(d.a, sets[j].a) < std::min(d.b, sets[j].b)) {
                throw ScheduleError("Dirichlet intervals overlap" + where);
            }
        }
    }
}

double distance_to(const Interval& d, const Interval& omega) {
    if (d.a >= omega.b) return d.a - omega.b;
    if (d.b <= omega.a) return omega.a - d.b;
    return 0.0;
}

// Open gaps of (-R, R) left after removing the given closed intervals.
std::vector<Interval> complement_in_ball(std::vector<Interval> removed, double R) {
    std::sort(removed.begin(), removed.end(), [](auto& p, auto& q) { return p.a < q.a; });
    std::vector<Interval> gaps;
    double cursor = -R;
    for (const auto& iv : removed) {
        if (iv.a > cursor + kTouchTol) {
            gaps.push_back({cursor, iv.a});
        }
        cursor = std::max(cursor, iv.b);
    }
    if (R > cursor + kTouchTol) {
        gaps.push_back({cursor, R});
    }
    return gaps;
}

// Integral over y in [a, b] of |x - y|^{-(1+2s)} for x outside [a, b].
double inner_integral(double x, double a, double b, double s) {
    if (x >= b) {
        return (std::pow(x - b, -2.0 * s) - std::pow(x - a, -2.0 * s)) / (2.0 * s);
    }
    return (std::pow(a - x, -2.0 * s) - std::pow(b - x, -2.0 * s)) / (2.0 * s);
}

} // namespace

double EndpointFormula::eval(int k) const {
    double value = constant + inverse_k / static_cast<double>(k);
    for (const auto& g : geometric) {
        value += g.coef * std::pow(g.base, -static_cast<double>(k));
    }
    return value;
}

std::string EndpointFormula::str() const {
    std::ostringstream os;
    os.precision(17);
    os << constant;
    for (const auto& g : geometric) {
        os << (g.coef < 0 ? " - " : " + ") << std::abs(g.coef) << '*' << g.base << "^-k";
    }
    if (inverse_k != 0.0) {
        os << (inverse_k < 0 ? " - " : " + ") << std::abs(inverse_k) << "/k";
    }
    return os.str();
}

EndpointFormula EndpointFormula::parse(std::string_view text) {
    EndpointFormula f;
    std::size_t pos = 0;
    bool first = true;
    while (true) {
        skip_spaces(text, pos);
        if (pos >= text.size()) {
            break;
        }
        double sign = 1.0;
        if (consume(text, pos, "+")) {
            sign = 1.0;
        } else if (consume(text, pos, "-")) {
            sign = -1.0;
        } else if (!first) {
            throw ScheduleError("expected '+' or '-' in endpoint formula '" + std::string(text) + "'");
        }
        first = false;
        skip_spaces(text, pos);
        // bare "q^-k" or "/k" forms have an implicit coefficient of one
        double coef = 1.0;
        const bool has_number = pos < text.size() &&
                                (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.');
        std::size_t mark = pos;
        double number = has_number ? read_number(text, pos) : 1.0;
        if (consume(text, pos, "^-k")) {
            f.geometric.push_back({sign, number});
            continue;
        }
        if (consume(text, pos, "*")) {
            coef = number;
            mark = pos;
            const double base = read_number(text, pos);
            if (!consume(text, pos, "^-k")) {
                throw ScheduleError("expected '^-k' after '" + std::string(text.substr(mark, pos - mark)) +
                                    "' in endpoint formula");
            }
            f.geometric.push_back({sign * coef, base});
            continue;
        }
        if (consume(text, pos, "/k")) {
            f.inverse_k += sign * number;
            continue;
        }
        if (!has_number) {
            throw ScheduleError("malformed endpoint formula '" + std::string(text) + "'");
        }
        f.constant += sign * number;
    }
    if (first) {
        throw ScheduleError("empty endpoint formula");
    }
    return f;
}

std::string_view to_string(ScheduleMode mode) noexcept {
    switch (mode) {
    case ScheduleMode::NeumannShrink: return "NeumannShrink";
    case ScheduleMode::DirichletShrinkApproaching: return "DirichletShrinkApproaching";
    case ScheduleMode::DirichletShrinkSeparated: return "DirichletShrinkSeparated";
    }
    return "?";
}

ScheduleMode parse_schedule_mode(std::string_view text) {
    for (auto mode : {ScheduleMode::NeumannShrink, ScheduleMode::DirichletShrinkApproaching,
                      ScheduleMode::DirichletShrinkSeparated}) {
        if (text == to_string(mode)) {
            return mode;
        }
    }
    throw ScheduleError("unknown schedule mode '" + std::string(text) + "'");
}

DissipationSchedule neumann_shrink_schedule(double s) {
    DissipationSchedule sched;
    sched.s = s;
    sched.mode = ScheduleMode::NeumannShrink;
    sched.sets = {
        {EndpointFormula::parse("1"), EndpointFormula::parse("1 + 2^-k")},
        {EndpointFormula::parse("-2^-k"), EndpointFormula::parse("0")},
    };
    return sched;
}

DissipationSchedule dirichlet_approaching_schedule(double s) {
    DissipationSchedule sched;
    sched.s = s;
    sched.mode = ScheduleMode::DirichletShrinkApproaching;
    sched.sets = {{EndpointFormula::parse("1 + 2^-k"), EndpointFormula::parse("1 + 2^-k + 4*4^-k")}};
    return sched;
}

DissipationSchedule dirichlet_separated_schedule(double s, double delta) {
    DissipationSchedule sched;
    sched.s = s;
    sched.mode = ScheduleMode::DirichletShrinkSeparated;
    sched.separation = delta;
    EndpointFormula lo;
    lo.constant = 1.0 + delta;
    EndpointFormula hi = lo;
    hi.geometric.push_back({1.0, 2.0});
    sched.sets = {{lo, hi}};
    return sched;
}

DomainConfig generate_config(const DissipationSchedule& sched, int k) {
    if (k < 1 || k > sched.k_max) {
        throw ScheduleError("step " + std::to_string(k) + " outside 1.." + std::to_string(sched.k_max));
    }
    DomainConfig cfg;
    cfg.omega = sched.omega;
    cfg.truncation_radius = sched.truncation_radius;
    cfg.fractional_order = sched.s;

    std::vector<Interval> sets;
    for (const auto& f : sched.sets) {
        sets.push_back(f.eval(k));
    }

    if (sched.mode == ScheduleMode::NeumannShrink) {
        cfg.neumann_set = sets;
    } else {
        if (sched.mode == ScheduleMode::DirichletShrinkApproaching && !(sched.s < 0.5)) {
            throw ScheduleError("approaching Dirichlet sets require s < 1/2");
        }
        check_dirichlet_sets(sched, sets, k);
        if (sched.mode == ScheduleMode::DirichletShrinkSeparated) {
            for (const auto& d : sets) {
                if (distance_to(d, sched.omega) < sched.separation - kTouchTol) {
                    throw ScheduleError("Dirichlet interval closer than the separation at step " +
                                        std::to_string(k));
                }
            }
        }
        auto removed = sets;
        removed.push_back(sched.omega);
        cfg.far_field_neumann = true;
        cfg.neumann_set = complement_in_ball(removed, sched.truncation_radius);
    }

    try {
        validate_config(cfg);
    } catch (const ConfigError& err) {
        throw ScheduleError("step " + std::to_string(k) + ": " + err.what());
    }
    return cfg;
}

std::vector<Interval> dirichlet_intervals(const DomainConfig& cfg) {
    if (cfg.pure_neumann) {
        return {};
    }
    auto removed = cfg.neumann_set;
    removed.push_back(cfg.omega);
    return complement_in_ball(removed, cfg.truncation_radius);
}

double integral_condition(const DomainConfig& cfg) {
    validate_config(cfg);
    const double s = cfg.fractional_order;
    const double a = cfg.omega.a;
    const double b = cfg.omega.b;
    double total = 0.0;
    for (const auto& d : dirichlet_intervals(cfg)) {
        const bool touches_right = std::abs(d.a - b) <= kTouchTol;
        const bool touches_left = std::abs(d.b - a) <= kTouchTol;
        if ((touches_left || touches_right) && s >= 0.5) {
            return std::numeric_limits<double>::infinity();
        }
        auto f = [&](double x) { return inner_integral(x, a, b, s); };
        if (touches_right || touches_left) {
            // x = edge +- t^m removes the (x - edge)^{-2s} endpoint singularity
            const double m = 1.0 / (1.0 - 2.0 * s);
            const double edge = touches_right ? b : a;
            const double len = d.length();
            const double t_max = std::pow(len, 1.0 / m);
            auto g = [&](double t) {
                if (t <= 0.0) {
                    return m / (2.0 * s);
                }
                const double x = touches_right ? edge + std::pow(t, m) : edge - std::pow(t, m);
                return f(x) * m * std::pow(t, m - 1.0);
            };
            total += quad::adaptive(g, 0.0, t_max, 1e-12);
        } else {
            total += quad::adaptive(f, d.a, d.b, 1e-12);
        }
    }
    if (!cfg.far_field_dropped()) {
        const double R = cfg.truncation_radius;
        auto tail = [&](double x) {
            return (std::pow(R - x, -2.0 * s) + std::pow(R + x, -2.0 * s)) / (2.0 * s);
        };
        total += quad::adaptive(tail, a, b, 1e-12);
    }
    return total;
}

ConvergenceTable run_schedule(const DissipationSchedule& sched, double mesh_h, double eig_tol) {
    ConvergenceTable table;
    table.mode = sched.mode;
    const FracKernel kernel = FracKernel::make(sched.s);
    SolveOptions opts;
    opts.tol = eig_tol;

    auto principal = [&](const DomainConfig& cfg, int k) {
        auto mesh = std::make_shared<const Mesh1D>(build_mesh(cfg, mesh_h));
        const AssembledSystem sys = assemble(mesh, kernel);
        try {
            return solve_smallest(sys, 1, opts).pairs.front();
        } catch (const SolverError& err) {
            throw SolverError("step " + std::to_string(k) + ": " + err.what());
        }
    };

    if (sched.mode == ScheduleMode::NeumannShrink) {
        DomainConfig full;
        full.omega = sched.omega;
        full.truncation_radius = sched.truncation_radius;
        full.fractional_order = sched.s;
        table.target = principal(full, 0).lambda;
    }

    for (int k = 1; k <= sched.k_max; ++k) {
        const DomainConfig cfg = generate_config(sched, k);
        const EigenPair pair = principal(cfg, k);
        ConvergenceRow row;
        row.k = k;
        if (sched.mode == ScheduleMode::NeumannShrink) {
            for (const auto& n : cfg.neumann_set) row.set_measure += n.length();
        } else {
            for (const auto& f : sched.sets) row.set_measure += f.eval(k).length();
        }
        row.lambda1 = pair.lambda;
        row.target = table.target;
        if (table.target != 0.0) {
            row.rel_gap = std::abs(row.lambda1 - table.target) / std::abs(table.target);
        } else {
            const double first = table.rows.empty() ? row.lambda1 : table.rows.front().lambda1;
            row.rel_gap = std::abs(row.lambda1) / std::abs(first);
        }
        row.linf_norm = pair.vector.cwiseAbs().maxCoeff();
        row.integral_condition = integral_condition(cfg);
        row.residual = pair.residual;
        table.rows.push_back(row);
    }
    return table;
}

} // namespace mixnl
