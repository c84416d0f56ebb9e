#include "dsea/common/error.hpp"
#include "dsea/md/forces.hpp"
#include "dsea/md/integrate.hpp"
#include "dsea/md/lattice.hpp"
#include "dsea/md/md_kernel.hpp"
#include "dsea/md/thermo.hpp"
#include "dsea/oracle/reference.hpp"
#include "dsea/stream/pipeline.hpp"
#include "md_fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

using namespace dsea;
using namespace dsea::md;

namespace {

Geometry ref_geometry() { return build_domain(fixtures::reference_params()); }

// Empty slices for the reference geometry, with the given molecules placed.
std::vector<SliceData> place(const Geometry& g, std::vector<Molecule> mols) {
    std::vector<std::vector<Molecule>> per(g.cells_per_edge);
    for (auto& m : mols) per[slice_of(m.r.x, g) - 1].push_back(m);
    std::vector<SliceData> out;
    for (std::size_t i = 0; i < per.size(); ++i) out.push_back(make_slice(i + 1, std::move(per[i]), g));
    return out;
}

Molecule at(double x, double y, double z) {
    Molecule m;
    m.r = {x, y, z};
    return m;
}

// Forces on every slice; returns the domain sample.
ThermoSample all_forces(std::vector<SliceData>& s, const Geometry& g, const SimParams& p) {
    ThermoSample total;
    for (std::size_t i = 0; i < s.size(); ++i)
        total += compute_forces(s[i], i > 0 ? &s[i - 1] : nullptr, i + 1 < s.size() ? &s[i + 1] : nullptr, g, p);
    return total;
}

} // namespace

TEST(BuildDomain, Examples) {
    EXPECT_EQ(box_length(2, 0.5), 4.0);
    SimParams p2 = fixtures::reference_params();
    p2.lattice_cells = 2;
    EXPECT_THROW(build_domain(p2), ConfigError);  // N_xyz = 1

    const auto g = ref_geometry();
    EXPECT_EQ(g.molecules, 500u);
    EXPECT_DOUBLE_EQ(g.box_length, 10.0);
    EXPECT_EQ(g.cells_per_edge, 4u);
    EXPECT_DOUBLE_EQ(g.cell_length, 2.5);

    const auto grid = cell_grid(10.1, 2.5);
    EXPECT_EQ(grid.cells_per_edge, 4u);
    EXPECT_DOUBLE_EQ(grid.cell_length, 2.525);
    EXPECT_GT(grid.cell_length, 2.5);
}

TEST(BuildDomain, DiagnosticNamesBound) {
    SimParams p = fixtures::reference_params();
    p.lattice_cells = 3;  // b = 6, N_xyz = 2
    try {
        build_domain(p);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("N_xyz"), std::string::npos);
    }
    p.lattice_cells = 0;
    EXPECT_THROW(build_domain(p), ConfigError);
}

TEST(SimParams, ShiftMakesPairEnergyVanishAtCutoff) {
    SimParams p;
    const double s6 = std::pow(1 / 2.5, 6);
    EXPECT_DOUBLE_EQ(p.u_shift(), s6 - s6 * s6);
}

TEST(Fcc, UnitCellBasis) {
    const auto r = fcc_positions(1, 2.0);
    ASSERT_EQ(r.size(), 4u);
    EXPECT_EQ(r[0], (Vec3{0, 0, 0}));
    EXPECT_EQ(r[1], (Vec3{1, 1, 0}));
    EXPECT_EQ(r[2], (Vec3{1, 0, 1}));
    EXPECT_EQ(r[3], (Vec3{0, 1, 1}));
}

TEST(Fcc, InitialState) {
    const auto p = fixtures::reference_params();
    const auto g = build_domain(p);
    const auto slices = generate_fcc(p, g, 42);
    ASSERT_EQ(slices.size(), 4u);
    Vec3 momentum;
    double ke = 0;
    std::size_t n = 0;
    for (const auto& s : slices) {
        EXPECT_NO_THROW(check_slice(s, g));
        for (const auto& m : s.molecules) {
            momentum += m.v;
            ke += 0.5 * dot(m.v, m.v);
            EXPECT_EQ(m.force_new, Vec3{});
            EXPECT_EQ(m.force_old, Vec3{});
        }
        n += s.molecules.size();
    }
    EXPECT_EQ(n, 500u);
    EXPECT_LT(std::abs(momentum.x), 1e-12);
    EXPECT_LT(std::abs(momentum.y), 1e-12);
    EXPECT_LT(std::abs(momentum.z), 1e-12);
    EXPECT_NEAR(kinetic_temperature(ke, n), 1.5, 0.05 * 1.5);
}

TEST(Fcc, DeterministicPerSeed) {
    const auto p = fixtures::reference_params();
    const auto g = build_domain(p);
    EXPECT_EQ(generate_fcc(p, g, 7), generate_fcc(p, g, 7));
    EXPECT_NE(generate_fcc(p, g, 7), generate_fcc(p, g, 8));
}

TEST(Forces, PairAtSigmaIsRepulsive24) {
    const auto g = ref_geometry();
    const auto p = fixtures::reference_params();
    auto s = place(g, {at(3.0, 5, 5), at(4.0, 5, 5)});
    const auto sample = all_forces(s, g, p);
    const auto& mols = s[1].molecules;
    ASSERT_EQ(mols.size(), 2u);
    const auto& a = mols[0].r.x < mols[1].r.x ? mols[0] : mols[1];
    const auto& b = mols[0].r.x < mols[1].r.x ? mols[1] : mols[0];
    EXPECT_DOUBLE_EQ(a.force_new.x, -24.0);
    EXPECT_DOUBLE_EQ(b.force_new.x, 24.0);
    EXPECT_EQ(a.force_new.y, 0.0);
    EXPECT_DOUBLE_EQ(sample.virial, 1.0);
    EXPECT_DOUBLE_EQ(sample.potential, 4.0 * p.u_shift());
}

TEST(Forces, PairAcrossSliceBoundaryAndPeriodicFace) {
    const auto g = ref_geometry();
    const auto p = fixtures::reference_params();
    // x: slices 1 and 2; y: across the periodic face
    auto s = place(g, {at(2.0, 0.3, 5), at(3.0, 9.7, 5)});
    all_forces(s, g, p);
    const auto& a = s[0].molecules.at(0);
    const auto& b = s[1].molecules.at(0);
    const auto bf = oracle::brute_forces(std::vector{a, b}, g, p);
    EXPECT_NEAR(a.force_new.x, bf.forces[0].x, 1e-12);
    EXPECT_NEAR(a.force_new.y, bf.forces[0].y, 1e-12);
    EXPECT_NEAR(b.force_new.x, bf.forces[1].x, 1e-12);
    // r = 1.166 is past the minimum: the image of b at y = -0.3 pulls a down
    EXPECT_LT(a.force_new.y, 0.0);
    EXPECT_GT(a.force_new.x, 0.0);
}

TEST(Forces, ZeroAtPotentialMinimum) {
    const auto g = ref_geometry();
    const auto p = fixtures::reference_params();
    auto s = place(g, {at(5.5, 5, 5), at(5.5 + std::pow(2.0, 1.0 / 6.0), 5, 5)});
    all_forces(s, g, p);
    for (const auto& sl : s)
        for (const auto& m : sl.molecules) EXPECT_NEAR(m.force_new.x, 0.0, 1e-12);
}

TEST(Forces, CutoffBoundary) {
    const auto g = ref_geometry();
    const auto p = fixtures::reference_params();
    auto at_rc = place(g, {at(5.1, 5, 5), at(5.1, 5, 7.5)});
    const auto s1 = all_forces(at_rc, g, p);
    EXPECT_NEAR(s1.potential, 0.0, 1e-15);

    auto beyond = place(g, {at(5.1, 5, 5), at(5.1, 5, 7.5 + 1e-9)});
    const auto s2 = all_forces(beyond, g, p);
    EXPECT_EQ(s2.potential, 0.0);
    EXPECT_EQ(s2.virial, 0.0);
    for (const auto& sl : beyond)
        for (const auto& m : sl.molecules) EXPECT_EQ(m.force_new, Vec3{});
}

TEST(Forces, KeepsPreviousForceAsOld) {
    const auto g = ref_geometry();
    const auto p = fixtures::reference_params();
    auto s = place(g, {at(3.0, 5, 5), at(4.0, 5, 5)});
    all_forces(s, g, p);
    const auto first = s[1].molecules;
    all_forces(s, g, p);
    for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(s[1].molecules[i].force_old, first[i].force_new);
}

TEST(Forces, OverlapRaisesPhysicsError) {
    const auto g = ref_geometry();
    const auto p = fixtures::reference_params();
    auto s = place(g, {at(3.0, 5, 5), at(3.0, 5, 5 + 1e-8)});
    EXPECT_THROW(all_forces(s, g, p), PhysicsError);
}

TEST(Forces, NewtonThirdLaw) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto sys = fixtures::random_system(300, seed);
        all_forces(sys.slices, sys.geometry, sys.params);
        Vec3 sum;
        for (const auto& s : sys.slices)
            for (const auto& m : s.molecules) sum += m.force_new;
        EXPECT_LT(std::abs(sum.x), 1e-9);
        EXPECT_LT(std::abs(sum.y), 1e-9);
        EXPECT_LT(std::abs(sum.z), 1e-9);
    }
}

TEST(Forces, ForceScaleMultipliesForcesOnly) {
    auto sys = fixtures::random_system(100, 3);
    auto scaled = sys;
    scaled.params.force_scale = 1.5;
    const auto a = all_forces(sys.slices, sys.geometry, sys.params);
    const auto b = all_forces(scaled.slices, scaled.geometry, scaled.params);
    EXPECT_EQ(a.potential, b.potential);
    EXPECT_DOUBLE_EQ(scaled.slices[1].molecules[0].force_new.x, 1.5 * sys.slices[1].molecules[0].force_new.x);
}

TEST(Velocities, Examples) {
    SliceData s;
    Molecule m;
    s.molecules = {m};
    update_velocities(s, 0.002);
    EXPECT_EQ(s.molecules[0].v, Vec3{});

    s.molecules[0].force_new = {1, 0, 0};
    s.molecules[0].force_old = {1, 0, 0};
    update_velocities(s, 0.002);
    EXPECT_DOUBLE_EQ(s.molecules[0].v.x, 0.002);
}

TEST(Velocities, MomentumChangeIsImpulse) {
    auto sys = fixtures::random_system(200, 9);
    all_forces(sys.slices, sys.geometry, sys.params);
    all_forces(sys.slices, sys.geometry, sys.params);
    Vec3 before, impulse, after;
    for (auto& s : sys.slices) {
        for (const auto& m : s.molecules) {
            before += m.v;
            impulse += (m.force_new + m.force_old) * (0.5 * 0.01);
        }
        update_velocities(s, 0.01);
        for (const auto& m : s.molecules) after += m.v;
    }
    EXPECT_NEAR(after.x - before.x, impulse.x, 1e-10);
    EXPECT_NEAR(after.y - before.y, impulse.y, 1e-10);
}

TEST(Thermostat, ScaleExamples) {
    ThermoSample s;
    s.molecules = 100;
    s.kinetic = 1.5 * 1.5 * 100;  // T = 2 KE / 3N = 1.5
    EXPECT_DOUBLE_EQ(thermostat_scale(s, 1.5), 1.0);
    s.kinetic *= 4;
    EXPECT_DOUBLE_EQ(thermostat_scale(s, 1.5), 0.5);
    s.kinetic = 0;
    EXPECT_THROW(thermostat_scale(s, 1.5), PhysicsError);
}

TEST(Thermostat, RescaledTemperatureIsTarget) {
    auto sys = fixtures::random_system(200, 5);
    for (auto& s : sys.slices) {
        ThermoSample t;
        t.kinetic = kinetic_energy(s);
        t.molecules = s.molecules.size();
        const double lambda = thermostat_scale(t, 1.5);
        for (auto& m : s.molecules) m.v = m.v * lambda;
        EXPECT_NEAR(kinetic_temperature(kinetic_energy(s), t.molecules), 1.5, 1e-13);
    }
}

namespace {

// Runs the position update of one slice of the reference geometry and
// returns where its molecules went.
struct Moved {
    std::vector<Molecule> left, centre, right;
};

Moved move(const Geometry& g, std::size_t slice, std::vector<Molecule> mols, double dt, double lambda = 1.0) {
    const auto s = make_slice(slice, std::move(mols), g);
    Moved out;
    integrate_positions_and_migrate(s, g, dt, lambda,
                                    {slice > 1 ? &out.left : nullptr, &out.centre,
                                     slice < g.cells_per_edge ? &out.right : nullptr});
    return out;
}

} // namespace

TEST(Migration, AtRestStays) {
    const auto g = ref_geometry();
    auto r = move(g, 2, {at(3.3, 4, 4)}, 0.01);
    ASSERT_EQ(r.centre.size(), 1u);
    EXPECT_EQ(r.centre[0].r, (Vec3{3.3, 4, 4}));
    EXPECT_TRUE(r.left.empty());
    EXPECT_TRUE(r.right.empty());
}

TEST(Migration, CrossesIntoRightSlice) {
    const auto g = ref_geometry();
    auto m = at(4.999, 4, 4);
    m.v = {1, 0, 0};
    auto r = move(g, 2, {m}, 0.01);
    ASSERT_EQ(r.right.size(), 1u);
    EXPECT_NEAR(r.right[0].r.x, 5.009, 1e-12);
}

TEST(Migration, MirrorReflectsAtLowWall) {
    const auto g = ref_geometry();
    auto m = at(0.05, 4, 4);
    m.v = {-15, 0, 0};
    auto r = move(g, 1, {m}, 0.01);  // x -> -0.1
    ASSERT_EQ(r.centre.size(), 1u);
    EXPECT_NEAR(r.centre[0].r.x, 0.1, 1e-12);
    EXPECT_DOUBLE_EQ(r.centre[0].v.x, 15.0);
}

TEST(Migration, MirrorReflectsAtHighWall) {
    const auto g = ref_geometry();
    auto m = at(9.95, 4, 4);
    m.v = {15, 0, 0};
    auto r = move(g, 4, {m}, 0.01);
    ASSERT_EQ(r.centre.size(), 1u);
    EXPECT_NEAR(r.centre[0].r.x, 9.9, 1e-12);
    EXPECT_DOUBLE_EQ(r.centre[0].v.x, -15.0);
}

TEST(Migration, BounceUnderUniformForceIsExact) {
    // the bounce is resolved at the contact time, so a uniform field gives
    // the exact wall trajectory and the next half-kick lands on it
    const auto g = ref_geometry();
    const double dt = 0.01, x0 = 0.05, v0 = -15, f = 100;
    auto m = at(x0, 4, 4);
    m.v = {v0, 0, 0};
    m.force_new = {f, 0, 0};
    auto r = move(g, 1, {m}, dt);
    ASSERT_EQ(r.centre.size(), 1u);

    const double tau = (-v0 - std::sqrt(v0 * v0 - 2 * f * x0)) / f;
    const double rest = dt - tau;
    const double v_after = -(v0 + f * tau);
    const double x_end = v_after * rest + 0.5 * f * rest * rest;
    const double v_end = v_after + f * rest;
    EXPECT_NEAR(r.centre[0].r.x, x_end, 1e-14);
    EXPECT_NEAR(r.centre[0].v.x + f * dt, v_end, 1e-12);

    // mirror image at the high wall
    auto h = at(g.box_length - x0, 4, 4);
    h.v = {-v0, 0, 0};
    h.force_new = {-f, 0, 0};
    auto rh = move(g, 4, {h}, dt);
    ASSERT_EQ(rh.centre.size(), 1u);
    EXPECT_NEAR(rh.centre[0].r.x, g.box_length - x_end, 1e-12);
    EXPECT_NEAR(rh.centre[0].v.x - f * dt, -v_end, 1e-12);
}

TEST(Migration, PeriodicWrapInYZ) {
    const auto g = ref_geometry();
    auto m = at(3.0, 9.99, 0.01);
    m.v = {0, 2, -2};
    auto r = move(g, 2, {m}, 0.01);
    ASSERT_EQ(r.centre.size(), 1u);
    EXPECT_NEAR(r.centre[0].r.y, 0.01, 1e-12);
    EXPECT_NEAR(r.centre[0].r.z, 9.99, 1e-12);
}

TEST(Migration, ScalesVelocityAndUsesForce) {
    const auto g = ref_geometry();
    auto m = at(3.0, 4, 4);
    m.v = {2, 0, 0};
    m.force_new = {0, 100, 0};
    auto r = move(g, 2, {m}, 0.01, 0.5);
    ASSERT_EQ(r.centre.size(), 1u);
    EXPECT_DOUBLE_EQ(r.centre[0].v.x, 1.0);
    EXPECT_NEAR(r.centre[0].r.x, 3.01, 1e-12);
    EXPECT_NEAR(r.centre[0].r.y, 4.005, 1e-12);
}

TEST(Migration, SkippingASliceIsInstability) {
    const auto g = ref_geometry();
    auto m = at(3.0, 4, 4);
    m.v = {600, 0, 0};  // 6 sigma in one step: slice 2 to slice 4
    EXPECT_THROW(move(g, 2, {m}, 0.01), PhysicsError);
}

TEST(Pressure, IdealGasAndSinglePair) {
    ThermoSample s;
    s.molecules = 100;
    s.kinetic = 1.5 * 1.5 * 100;
    EXPECT_DOUBLE_EQ(pressure(s, 1000.0), 0.1 * 1.5);
    s.virial = 1.0;
    EXPECT_DOUBLE_EQ(pressure(s, 1000.0), 0.1 * 1.5 + 24.0 / 3000.0);
}

TEST(SliceFormat, RoundTrip) {
    const auto sys = fixtures::random_system(200, 11);
    for (const auto& s : sys.slices) {
        const auto bytes = encode_slice(s);
        EXPECT_EQ(decode_slice(bytes), s);
        EXPECT_EQ(bytes.size(), 1 + 24 + s.molecules.size() * 96 + s.cell_count() * 4 + s.molecules.size() * 4);
    }
}

TEST(SliceFormat, HeaderLayoutLittleEndian) {
    const auto g = ref_geometry();
    const auto s = make_slice(3, {at(6, 1, 1)}, g);
    const auto bytes = encode_slice(s);
    EXPECT_EQ(bytes[0], std::byte{1});
    EXPECT_EQ(bytes[1], std::byte{3});
    for (int i = 2; i <= 8; ++i) EXPECT_EQ(bytes[i], std::byte{0});
    EXPECT_EQ(bytes[9], std::byte{4});
    EXPECT_EQ(bytes[17], std::byte{1});
    double x = 0;
    std::memcpy(&x, bytes.data() + 25, 8);
    EXPECT_EQ(x, 6.0);
}

TEST(SliceFormat, RejectsDamage) {
    const auto sys = fixtures::random_system(100, 2);
    const auto bytes = encode_slice(sys.slices[1]);
    auto truncated = bytes;
    truncated.pop_back();
    EXPECT_THROW(decode_slice(truncated), FormatError);
    auto version = bytes;
    version[0] = std::byte{9};
    EXPECT_THROW(decode_slice(version), FormatError);
    auto trailing = bytes;
    trailing.push_back(std::byte{0});
    EXPECT_THROW(decode_slice(trailing), FormatError);
    auto count = bytes;
    count[17] = std::byte{0xff};
    EXPECT_THROW(decode_slice(count), FormatError);
}

TEST(SliceData, BinningIsStableAndConsistent) {
    const auto g = ref_geometry();
    // two molecules in the same cell keep their insertion order
    auto s = make_slice(2, {at(3, 9, 9), at(3, 1, 1), at(3.5, 9.1, 9.1), at(3, 1.1, 1.1)}, g);
    EXPECT_NO_THROW(check_slice(s, g));
    EXPECT_EQ(s.molecules[0].r, (Vec3{3, 1, 1}));
    EXPECT_EQ(s.molecules[1].r, (Vec3{3, 1.1, 1.1}));
    EXPECT_EQ(s.molecules[2].r, (Vec3{3, 9, 9}));
    EXPECT_EQ(s.molecules[3].r, (Vec3{3.5, 9.1, 9.1}));
    std::uint32_t sum = 0;
    for (auto c : s.cell_counts) sum += c;
    EXPECT_EQ(sum, 4u);

    auto broken = s;
    broken.molecules[0].r.y = 9.5;
    EXPECT_THROW(check_slice(broken, g), FormatError);
}

TEST(SliceData, RawRecordsRoundTrip) {
    const auto sys = fixtures::random_system(50, 4);
    stream::Payload raw;
    append_molecules(raw, sys.slices[0].molecules);
    append_molecules(raw, sys.slices[1].molecules);
    auto back = read_molecules(raw);
    ASSERT_EQ(back.size(), sys.slices[0].molecules.size() + sys.slices[1].molecules.size());
    EXPECT_EQ(back.front(), sys.slices[0].molecules.front());
    EXPECT_EQ(back.back(), sys.slices[1].molecules.back());
}

TEST(ThermoRecorder, SumsInSliceOrderAndRejectsDuplicates) {
    ThermoRecorder rec;
    rec.record(3, 2, {1, 2, 3, 4});
    rec.record(3, 1, {10, 20, 30, 40});
    rec.record(4, 1, {0, 0, 1, 1});
    EXPECT_EQ(rec.steps(), (std::vector<std::uint64_t>{3, 4}));
    const auto t = rec.total(3);
    EXPECT_EQ(t.potential, 11);
    EXPECT_EQ(t.molecules, 44u);
    EXPECT_EQ(rec.slices(3).front().slice, 1u);
    EXPECT_THROW(rec.record(3, 2, {}), std::logic_error);
}

TEST(Dynamics, MigrationConservesMolecules) {
    const auto p = fixtures::reference_params(false);
    const auto g = build_domain(p);
    auto s = generate_fcc(p, g, 3);
    for (int k = 0; k < 20; ++k) {
        s = oracle::reference_trajectory(std::move(s), 5, g, p);
        std::size_t n = 0;
        for (const auto& sl : s) {
            EXPECT_NO_THROW(check_slice(sl, g));
            n += sl.molecules.size();
        }
        ASSERT_EQ(n, 500u);
    }
}

TEST(Dynamics, ShortRunConservesEnergy) {
    const auto p = fixtures::reference_params(false);
    const auto g = build_domain(p);
    ThermoRecorder rec;
    oracle::reference_trajectory(generate_fcc(p, g, 5), 200, g, p, &rec);
    const auto e0 = rec.total(0).potential + rec.total(0).kinetic;
    for (auto step : rec.steps()) {
        const auto t = rec.total(step);
        EXPECT_LT(std::abs((t.potential + t.kinetic - e0) / e0), 1e-3) << step;
    }
}

TEST(MdKernel, TwoDeviceRingEqualsTwoSequentialSteps) {
    auto p = fixtures::reference_params();
    const auto g = build_domain(p);
    const auto initial = generate_fcc(p, g, 21);
    MdKernel kernel(g, p);
    stream::PipelineConfig cfg{2, 1, g.num_slices(), 4, 1};
    cfg.allow_idle_devices = true;
    auto r = stream::run_super_cycles(cfg, kernel, to_envelopes(initial, 0), stream::ExecutionMode::deterministic);
    const auto streamed = from_envelopes(r.slices);
    const auto reference = oracle::reference_trajectory(initial, 2, g, p);
    EXPECT_EQ(streamed, reference);
    for (const auto& e : r.slices) EXPECT_EQ(e.timestep, 2u);
}
