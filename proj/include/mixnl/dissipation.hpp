#pragma once

#include "mixnl/domain.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mixnl {

/// Interval endpoint as a function of the step k >= 1:
/// constant + sum_i coef_i * base_i^{-k} + inverse_k / k.
struct EndpointFormula {
    struct Geometric {
        double coef;
        double base;
        friend bool operator==(const Geometric&, const Geometric&) = default;
    };

    double constant = 0.0;
    std::vector<Geometric> geometric;
    double inverse_k = 0.0;

    double eval(int k) const;
    std::string str() const;

    /// Parses sums of terms such as "1 + 0.5*2^-k - 3/k + 4^-k".
    static EndpointFormula parse(std::string_view text);

    friend bool operator==(const EndpointFormula&, const EndpointFormula&) = default;
};

struct IntervalFormula {
    EndpointFormula lo;
    EndpointFormula hi;

    Interval eval(int k) const { return {lo.eval(k), hi.eval(k)}; }
    friend bool operator==(const IntervalFormula&, const IntervalFormula&) = default;
};

enum class ScheduleMode { NeumannShrink, DirichletShrinkApproaching, DirichletShrinkSeparated };

std::string_view to_string(ScheduleMode mode) noexcept;
ScheduleMode parse_schedule_mode(std::string_view text);

/// A sequence of boundary-set configurations indexed by k = 1..k_max.
///
/// NeumannShrink: `sets` are the Neumann intervals; the rest of the line is
/// Dirichlet (including the far field).
/// Dirichlet modes: `sets` are the Dirichlet intervals inside B_R; every
/// other point of B_R outside Omega is Neumann and the far field is dropped,
/// so the sets dissipate in every ball.
struct DissipationSchedule {
    Interval omega{0.0, 1.0};
    double truncation_radius = 4.0;
    double s = 0.5;
    ScheduleMode mode = ScheduleMode::NeumannShrink;
    int k_max = 5;
    std::vector<IntervalFormula> sets;
    double separation = 0.0; // minimum dist(D_k, Omega) for DirichletShrinkSeparated

    friend bool operator==(const DissipationSchedule&, const DissipationSchedule&) = default;
};

// Default schedules: Omega = (0,1), R = 4.
DissipationSchedule neumann_shrink_schedule(double s = 0.5);
DissipationSchedule dirichlet_approaching_schedule(double s = 0.25);
DissipationSchedule dirichlet_separated_schedule(double s = 0.75, double delta = 1.0);

DomainConfig generate_config(const DissipationSchedule& sched, int k);

// Dirichlet intervals of step k inside B_R (the listed sets for Dirichlet
// modes, the complement of Omega and the Neumann sets otherwise).
std::vector<Interval> dirichlet_intervals(const DomainConfig& cfg);

struct ConvergenceRow {
    int k = 0;
    double set_measure = 0.0;
    double lambda1 = 0.0;
    double target = 0.0;
    double rel_gap = 0.0;
    double linf_norm = 0.0;
    double integral_condition = 0.0;
    double residual = 0.0;
};

/// Per-step results. target is the full-Dirichlet lambda_1 on the same mesh
/// size for NeumannShrink and 0 for the Dirichlet modes. rel_gap is
/// |lambda1 - target| / target, or lambda1 / lambda1(k = 1) when the target is 0.
struct ConvergenceTable {
    ScheduleMode mode = ScheduleMode::NeumannShrink;
    double target = 0.0;
    std::vector<ConvergenceRow> rows;
};

ConvergenceTable run_schedule(const DissipationSchedule& sched, double mesh_h, double eig_tol = 1e-10);

/// Integral of |x - y|^{-(1+2s)} over x in D, y in Omega, where D is the
/// Dirichlet set of the configuration (its part inside B_R plus the far field
/// when the far field is Dirichlet). +inf when the value diverges (D touching
/// Omega with s >= 1/2).
double integral_condition(const DomainConfig& cfg);

} // namespace mixnl
