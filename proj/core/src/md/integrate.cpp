#include "dsea/md/integrate.hpp"

#include "dsea/common/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace dsea::md {

void update_velocities(SliceData& slice, double dt) {
    for (auto& m : slice.molecules) m.v += (m.force_new + m.force_old) * 0.5 * dt;
}

double kinetic_energy(const SliceData& slice) {
    double ke = 0;
    for (std::size_t c = 0; c < slice.cell_count(); ++c)
        for (auto i : slice.cell(c)) ke += 0.5 * dot(slice.molecules[i].v, slice.molecules[i].v);
    return ke;
}

double kinetic_temperature(double kinetic, std::size_t molecules) {
    return 2.0 * kinetic / (3.0 * static_cast<double>(molecules));
}

double thermostat_scale(const ThermoSample& sample, double target_temperature) {
    if (sample.molecules == 0 || !(sample.kinetic > 0))
        throw PhysicsError("thermostat: degenerate state with zero kinetic energy");
    return std::sqrt(target_temperature / kinetic_temperature(sample.kinetic, sample.molecules));
}

void apply_boundaries(Molecule& m, const Geometry& g) {
    const double b = g.box_length;
    if (m.r.x < 0) {
        m.r.x = -m.r.x;
        m.v.x = -m.v.x;
    } else if (m.r.x > b) {
        m.r.x = 2.0 * b - m.r.x;
        m.v.x = -m.v.x;
    }
    if (!(m.r.x >= 0 && m.r.x <= b))
        throw PhysicsError(fmt::format("molecule left the box along x (x={}); timestep too large", m.r.x));
    for (double* c : {&m.r.y, &m.r.z}) {
        *c -= b * std::floor(*c / b);
        if (*c >= b) *c -= b;  // rounding can land exactly on b
        if (!(*c >= 0 && *c < b)) throw PhysicsError(fmt::format("non-finite coordinate {}", *c));
    }
}

namespace {

/// First time in [0, dt] at which u0 + w t + f t^2 / 2 reaches zero.
double wall_contact_time(double u0, double w, double f, double dt) {
    if (u0 <= 0) return 0;
    const double a = 0.5 * f;
    if (a == 0) return std::clamp(-u0 / w, 0.0, dt);
    const double disc = w * w - 4.0 * a * u0;
    if (disc < 0) return dt;
    const double q = -0.5 * (w + std::copysign(std::sqrt(disc), w));
    double t = dt;
    for (double root : {q / a, q != 0 ? u0 / q : dt})
        if (root >= 0 && root < t) t = root;
    return t;
}

/// Specular bounce resolved at the contact time inside the step. `u` is the
/// distance from the wall (positive inside), `w` and `f` velocity and force
/// along the inward normal. The force is held constant over the step, as in
/// the position update, so the state after the step is exact for a uniform
/// field. The stored velocity is chosen so that the next half-kick with the
/// unreflected F_old lands on the post-bounce velocity.
void bounce(double u0, double& u, double& w, double f, double dt) {
    const double t = wall_contact_time(u0, w, f, dt);
    const double w_contact = w + f * t;
    const double rest = dt - t;
    u = -w_contact * rest + 0.5 * f * rest * rest;
    if (u < 0) u = -u;
    w = -w - 2.0 * f * t;
}

} // namespace

MigrationCounts integrate_positions_and_migrate(const SliceData& centre, const Geometry& g, double dt,
                                                double lambda, const MigrationTargets& targets) {
    const double half_dt2 = 0.5 * dt * dt;
    MigrationCounts counts;
    for (std::size_t c = 0; c < centre.cell_count(); ++c) {
        for (auto i : centre.cell(c)) {
            Molecule m = centre.molecules[i];
            m.v *= lambda;
            const double x0 = m.r.x;
            m.r += m.v * dt + m.force_new * half_dt2;
            if (m.r.x < 0) {
                bounce(x0, m.r.x, m.v.x, m.force_new.x, dt);
            } else if (m.r.x > g.box_length) {
                double u = g.box_length - m.r.x, w = -m.v.x;
                bounce(g.box_length - x0, u, w, -m.force_new.x, dt);
                m.r.x = g.box_length - u;
                m.v.x = -w;
            }
            apply_boundaries(m, g);
            const std::size_t dest = slice_of(m.r.x, g);
            if (dest == centre.index) {
                targets.centre->push_back(m);
                ++counts.centre;
            } else if (dest + 1 == centre.index && targets.left != nullptr) {
                targets.left->push_back(m);
                ++counts.left;
            } else if (dest == centre.index + 1 && targets.right != nullptr) {
                targets.right->push_back(m);
                ++counts.right;
            } else {
                throw PhysicsError(fmt::format("instability: molecule moved from slice {} to slice {} in one step "
                                               "(x={}); timestep too large",
                                               centre.index, dest, m.r.x));
            }
        }
    }
    return counts;
}

} // namespace dsea::md
