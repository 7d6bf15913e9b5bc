#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "entverdict/simulate.hpp"
#include "entverdict/tomography.hpp"
#include "support/generators.hpp"

using namespace entverdict;
using Catch::Matchers::WithinAbs;

namespace {

DensityMatrix bell_state() { return x_state_to_density({0.5, 0.0, 0.0, 0.5, 0.5}); }

std::vector<std::pair<MeasurementSetting, double>> exact_probability_records(
    const DensityMatrix& rho) {
    std::vector<std::pair<MeasurementSetting, double>> out;
    for (const auto& s : standard_settings_16()) out.emplace_back(s, predicted_probability(rho, s));
    return out;
}

}  // namespace

TEST_CASE("polarization labels round trip and pair up") {
    const PolLabel all[] = {PolLabel::H, PolLabel::V, PolLabel::D,
                            PolLabel::A, PolLabel::R, PolLabel::L};
    for (PolLabel l : all) {
        const auto parsed = parse_pol_label(to_string(l));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == l);
        CHECK(complement(complement(l)) == l);
        CHECK(complement(l) != l);
    }
    CHECK(complement(PolLabel::H) == PolLabel::V);
    CHECK(complement(PolLabel::D) == PolLabel::A);
    CHECK(complement(PolLabel::R) == PolLabel::L);
    CHECK_FALSE(parse_pol_label("Q").has_value());
    CHECK_FALSE(parse_pol_label("").has_value());
    CHECK_FALSE(parse_pol_label("HH").has_value());
}

TEST_CASE("projectors are normalized, idempotent, and complement-orthogonal") {
    const PolLabel all[] = {PolLabel::H, PolLabel::V, PolLabel::D,
                            PolLabel::A, PolLabel::R, PolLabel::L};
    for (PolLabel l : all) {
        const Projector p = projector(l);
        const double norm =
            std::norm(p.ket[0]) + std::norm(p.ket[1]);
        CHECK_THAT(norm, WithinAbs(1.0, 1e-15));

        const Mat2 pr = ketbra(p.ket);
        CHECK(max_entry_distance(pr * pr, pr) < 1e-15);

        const Projector q = projector(complement(l));
        const Complex overlap =
            std::conj(p.ket[0]) * q.ket[0] + std::conj(p.ket[1]) * q.ket[1];
        CHECK_THAT(std::abs(overlap), WithinAbs(0.0, 1e-15));
    }
}

TEST_CASE("standard_settings_16 is the row-major H,V,D,R grid") {
    const auto settings = standard_settings_16();
    REQUIRE(settings.size() == 16);
    CHECK(settings.front() == MeasurementSetting{PolLabel::H, PolLabel::H});
    CHECK(settings[1] == MeasurementSetting{PolLabel::H, PolLabel::V});
    CHECK(settings[4] == MeasurementSetting{PolLabel::V, PolLabel::H});
    CHECK(settings.back() == MeasurementSetting{PolLabel::R, PolLabel::R});

    std::set<MeasurementSetting> unique(settings.begin(), settings.end());
    CHECK(unique.size() == 16);

    const double cond = reconstruction_condition(settings);
    CHECK_THAT(cond, WithinAbs(108.240761336233, 1e-6));
}

TEST_CASE("predicted_probability pins the Born-rule fixtures") {
    const DensityMatrix bell = bell_state();
    CHECK_THAT(predicted_probability(bell, {PolLabel::H, PolLabel::H}), WithinAbs(0.5, 1e-15));
    CHECK_THAT(predicted_probability(bell, {PolLabel::H, PolLabel::V}), WithinAbs(0.0, 1e-15));
    CHECK_THAT(predicted_probability(bell, {PolLabel::D, PolLabel::D}), WithinAbs(0.5, 1e-15));
    CHECK_THAT(predicted_probability(bell, {PolLabel::D, PolLabel::A}), WithinAbs(0.0, 1e-15));
    CHECK_THAT(predicted_probability(bell, {PolLabel::R, PolLabel::R}), WithinAbs(0.0, 1e-15));
    CHECK_THAT(predicted_probability(bell, {PolLabel::R, PolLabel::L}), WithinAbs(0.5, 1e-15));

    const DensityMatrix mixed = validate_density(0.25 * identity4());
    for (const auto& s : standard_settings_16())
        CHECK_THAT(predicted_probability(mixed, s), WithinAbs(0.25, 1e-15));
}

TEST_CASE("probabilities sum to the single-side marginals") {
    const PolLabel all[] = {PolLabel::H, PolLabel::V, PolLabel::D,
                            PolLabel::A, PolLabel::R, PolLabel::L};
    for (std::uint64_t seed = 40; seed < 60; ++seed) {
        const DensityMatrix rho = random_density_matrix(seed);
        for (PolLabel a : all) {
            const double sum = predicted_probability(rho, {a, PolLabel::H}) +
                               predicted_probability(rho, {a, PolLabel::V});
            const Mat4 op = kron(ketbra(projector(a).ket), identity2());
            CHECK_THAT(sum, WithinAbs((op * rho.matrix()).trace().real(), 1e-12));

            const double sum2 = predicted_probability(rho, {PolLabel::H, a}) +
                                predicted_probability(rho, {PolLabel::V, a});
            const Mat4 op2 = kron(identity2(), ketbra(projector(a).ket));
            CHECK_THAT(sum2, WithinAbs((op2 * rho.matrix()).trace().real(), 1e-12));
        }
    }
}

TEST_CASE("linear_reconstruct inverts noise-free counts") {
    const DensityMatrix bell = bell_state();
    SimulationPlan plan{bell, standard_settings_16(), 1000000, 0};
    const Mat4 rebuilt = linear_reconstruct(ideal_counts(plan));
    CHECK(trace_distance(rebuilt, bell.matrix()) <= 1e-10);

    const DensityMatrix mixed = validate_density(0.25 * identity4());
    SimulationPlan flat{mixed, standard_settings_16(), 1000000, 0};
    CHECK(trace_distance(linear_reconstruct(ideal_counts(flat)), mixed.matrix()) <= 1e-10);
}

TEST_CASE("linear_reconstruct_real inverts exact probabilities") {
    for (std::uint64_t seed = 100; seed < 200; ++seed) {
        const DensityMatrix rho = random_density_matrix(seed);
        const Mat4 rebuilt = linear_reconstruct_real(exact_probability_records(rho));
        CHECK(trace_distance(rebuilt, rho.matrix()) <= 1e-10);
    }
}

TEST_CASE("rounding to integer counts costs less than 2e-3 at a million per setting") {
    for (std::uint64_t seed = 300; seed < 330; ++seed) {
        const DensityMatrix rho = random_density_matrix(seed);
        SimulationPlan plan{rho, standard_settings_16(), 1000000, 0};
        CHECK(trace_distance(linear_reconstruct(ideal_counts(plan)), rho.matrix()) <= 2e-3);
    }
}

TEST_CASE("reconstruction rejects defective inputs") {
    auto records = exact_probability_records(bell_state());

    auto incomplete = records;
    incomplete.pop_back();  // (R,R)
    try {
        linear_reconstruct_real(incomplete);
        FAIL("missing setting accepted");
    } catch (const IncompleteSettings& e) {
        REQUIRE(e.missing.size() == 1);
        CHECK(e.missing.front() == MeasurementSetting{PolLabel::R, PolLabel::R});
    }

    auto duplicated = records;
    duplicated.push_back(records.front());
    CHECK_THROWS_AS(linear_reconstruct_real(duplicated), InvalidArgument);

    auto negative = records;
    negative[3].second = -1.0;
    CHECK_THROWS_AS(linear_reconstruct_real(negative), InvalidArgument);

    auto zeroed = records;
    for (auto& [setting, count] : zeroed) count = 0.0;
    CHECK_THROWS_AS(linear_reconstruct_real(zeroed), ZeroCounts);

    // Positive counts only outside the complete H/V quadruple: nothing to
    // normalize against.
    auto dark_basis = records;
    for (auto& [setting, count] : dark_basis) {
        const bool hv = (setting.first == PolLabel::H || setting.first == PolLabel::V) &&
                        (setting.second == PolLabel::H || setting.second == PolLabel::V);
        count = hv ? 0.0 : 100.0;
    }
    CHECK_THROWS_AS(linear_reconstruct_real(dark_basis), ZeroCounts);

    // Four settings cannot pin down sixteen Pauli components.
    const std::vector<MeasurementSetting> hv_only = {
        {PolLabel::H, PolLabel::H}, {PolLabel::H, PolLabel::V},
        {PolLabel::V, PolLabel::H}, {PolLabel::V, PolLabel::V}};
    std::vector<std::pair<MeasurementSetting, double>> hv_records;
    for (const auto& s : hv_only) hv_records.emplace_back(s, predicted_probability(bell_state(), s));
    CHECK_THROWS_AS(linear_reconstruct_real(hv_records, hv_only), SingularSystem);
}

TEST_CASE("per-quadruple normalization cancels brightness drift") {
    const DensityMatrix rho = random_density_matrix(1234);
    auto records = exact_probability_records(rho);
    // Scale every record by a common brightness; the reconstruction ignores it.
    for (auto& [setting, count] : records) count *= 3.7e4;
    CHECK(trace_distance(linear_reconstruct_real(records), rho.matrix()) <= 1e-10);
}

TEST_CASE("project_to_physical clips and renormalizes the spectrum") {
    const Mat4 dented = Mat4::diagonal({0.6, 0.6, 0.0, -0.2});
    const DensityMatrix fixed = project_to_physical(dented);
    CHECK(max_entry_distance(fixed.matrix(), Mat4::diagonal({0.5, 0.5, 0.0, 0.0})) <= 1e-12);

    for (std::uint64_t seed = 700; seed < 750; ++seed) {
        const DensityMatrix rho = random_density_matrix(seed);
        const DensityMatrix same = project_to_physical(rho.matrix());
        CHECK(max_entry_distance(same.matrix(), rho.matrix()) <= 1e-12);
    }
}

TEST_CASE("project_to_physical stays close to a lightly noised state") {
    Xoshiro256StarStar rng(31);
    const DensityMatrix bell = bell_state();
    for (int draw = 0; draw < 50; ++draw) {
        Mat4 noise = testgen::random_hermitian4(rng);
        double biggest = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) biggest = std::max(biggest, std::abs(noise(i, j)));
        noise = (1e-3 / biggest) * noise;
        const Mat4 noisy = bell.matrix() + noise;

        const DensityMatrix projected = project_to_physical(noisy);
        CHECK(trace_distance(projected.matrix(), bell.matrix()) <= 5e-3);

        const DensityMatrix again = project_to_physical(projected.matrix());
        CHECK(max_entry_distance(again.matrix(), projected.matrix()) <= 1e-12);
    }
}

TEST_CASE("project_to_physical rejects what it cannot repair") {
    Mat4 skew;
    skew(0, 1) = Complex(0.5, 0.0);
    skew(0, 0) = 1.0;
    CHECK_THROWS_AS(project_to_physical(skew), NotHermitian);

    CHECK_THROWS_AS(project_to_physical(0.3 * identity4()), BadTrace);

    Mat4 poisoned = 0.25 * identity4();
    poisoned(1, 1) = Complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(project_to_physical(poisoned), InvalidArgument);
}

TEST_CASE("sampled counts reconstruct the state to statistical accuracy") {
    const DensityMatrix bell = bell_state();
    SimulationPlan plan{bell, standard_settings_16(), 10000, 2026};
    const Mat4 rebuilt = linear_reconstruct(sample_counts(plan));
    const DensityMatrix physical = project_to_physical(rebuilt);
    CHECK(trace_distance(physical.matrix(), bell.matrix()) < 0.05);
}
