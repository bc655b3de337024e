#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "magnoise/constants.hpp"
#include "magnoise/quadrature.hpp"
#include "magnoise/spectra.hpp"

using namespace magnoise;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("load_psd converts hertz columns to angular frequency") {
    const auto path = write_temp("psd_hz.csv", "# comment\n100,1e-6\n200,2e-6\n");
    const auto sd = load_psd(path.string(), DensityKind::Voltage, FrequencyUnit::Hertz);
    const auto& tab = sd.as_tabulated();
    REQUIRE(tab.omega.size() == 2);
    CHECK(tab.omega[0] == doctest::Approx(628.3185307).epsilon(1e-9));
    CHECK(tab.omega[1] == doctest::Approx(1256.6370614).epsilon(1e-9));
    CHECK(tab.amplitude[0] == 1e-6);
    CHECK(tab.amplitude[1] == 2e-6);
    CHECK(sd.kind() == DensityKind::Voltage);
}

TEST_CASE("load_psd keeps rad/s columns as-is") {
    const auto path = write_temp("psd_rad.csv", "100,1e-6\n200,2e-6\n");
    const auto sd =
        load_psd(path.string(), DensityKind::Voltage, FrequencyUnit::RadiansPerSecond);
    CHECK(sd.as_tabulated().omega[0] == 100.0);
    CHECK(sd.as_tabulated().omega[1] == 200.0);
}

TEST_CASE("load_psd rejects bad input") {
    const auto negative = write_temp("psd_neg.csv", "100,1e-6\n200,-1e-6\n");
    CHECK_THROWS_AS(load_psd(negative.string(), DensityKind::Voltage, FrequencyUnit::Hertz),
                    ValidationError);

    const auto nonmono = write_temp("psd_mono.csv", "100,1e-6\n90,1e-6\n");
    CHECK_THROWS_AS(load_psd(nonmono.string(), DensityKind::Voltage, FrequencyUnit::Hertz),
                    ValidationError);

    const auto empty = write_temp("psd_empty.csv", "# nothing here\n");
    CHECK_THROWS_AS(load_psd(empty.string(), DensityKind::Voltage, FrequencyUnit::Hertz),
                    ValidationError);

    const auto garbled = write_temp("psd_garbled.csv", "100,1e-6\nfoo,bar\n");
    try {
        load_psd(garbled.string(), DensityKind::Voltage, FrequencyUnit::Hertz);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("save_psd emission round-trips through load_psd") {
    const auto sd = SpectralDensity::tabulated(DensityKind::Field, {10.0, 100.0, 1000.0},
                                               {1e-12, 3e-12, 2e-13});
    const auto path = (fs::temp_directory_path() / "psd_roundtrip.csv").string();
    save_psd(sd, path, FrequencyUnit::Hertz);
    const auto back = load_psd(path, DensityKind::Field, FrequencyUnit::Hertz);
    const auto& a = sd.as_tabulated();
    const auto& b = back.as_tabulated();
    for (std::size_t i = 0; i < a.omega.size(); ++i) {
        CHECK(b.omega[i] == doctest::Approx(a.omega[i]).epsilon(1e-9));
        CHECK(b.amplitude[i] == doctest::Approx(a.amplitude[i]).epsilon(1e-9));
    }
}

TEST_CASE("voltage_to_field divides by eta*omega point-wise") {
    const double w = constants::two_pi * 100.0;
    const auto sv = SpectralDensity::tabulated(DensityKind::Voltage, {w}, {1e-6});
    const auto sb = voltage_to_field(sv, CouplingEta::scalar(10.0));
    CHECK(sb.kind() == DensityKind::Field);
    CHECK(sb.as_tabulated().amplitude[0] == doctest::Approx(1.5915494e-10).epsilon(1e-6));

    const auto zero = SpectralDensity::tabulated(DensityKind::Voltage, {w, 2 * w}, {0.0, 0.0});
    const auto zero_b = voltage_to_field(zero, CouplingEta::scalar(10.0));
    CHECK(zero_b.as_tabulated().amplitude[0] == 0.0);
    CHECK(zero_b.as_tabulated().amplitude[1] == 0.0);
}

TEST_CASE("tabulated eta divides point-wise against the scalar-eta oracle") {
    const double w1 = 100.0, w2 = 400.0;
    const auto sv = SpectralDensity::tabulated(DensityKind::Voltage, {w1, w2}, {3e-6, 5e-6});
    const auto unit = voltage_to_field(sv, CouplingEta::scalar(1.0));
    const auto tab = voltage_to_field(sv, CouplingEta::tabulated({w1, w2}, {2.0, 4.0}));
    CHECK(tab.as_tabulated().amplitude[0] ==
          doctest::Approx(unit.as_tabulated().amplitude[0] / 2.0).epsilon(1e-12));
    CHECK(tab.as_tabulated().amplitude[1] ==
          doctest::Approx(unit.as_tabulated().amplitude[1] / 4.0).epsilon(1e-12));
}

TEST_CASE("field_to_frequency applies |gamma|") {
    const auto spin = SpinSpecies::electron(4.46);
    CHECK(std::abs(spin.gamma) / constants::two_pi == doctest::Approx(2.802e10).epsilon(1e-3));

    const auto sb = SpectralDensity::tabulated(DensityKind::Field, {100.0}, {1e-12});
    const auto sbeta = field_to_frequency(sb, spin);
    CHECK(sbeta.kind() == DensityKind::Frequency);
    CHECK(sbeta.as_tabulated().amplitude[0] == doctest::Approx(0.176086).epsilon(1e-4));

    const auto nuc = SpinSpecies::nuclear(4.46);
    const auto sn = field_to_frequency(sb, nuc);
    CHECK(sn.as_tabulated().amplitude[0] ==
          doctest::Approx(sbeta.as_tabulated().amplitude[0] / 1836.15).epsilon(1e-4));

    const auto zero = SpectralDensity::tabulated(DensityKind::Field, {100.0}, {0.0});
    CHECK(field_to_frequency(zero, spin).as_tabulated().amplitude[0] == 0.0);
}

TEST_CASE("conversion properties: round trip, homogeneity, grid preservation") {
    const auto spin = SpinSpecies::electron(4.46);
    const std::vector<double> grid{10.0, 55.0, 300.0, 1200.0, 9000.0};
    const std::vector<double> amps{1e-7, 5e-7, 2e-6, 7e-7, 1e-8};
    const auto sv = SpectralDensity::tabulated(DensityKind::Voltage, grid, amps);
    const auto sb = voltage_to_field(sv, CouplingEta::scalar(15.0));
    const auto sbeta = field_to_frequency(sb, spin);

    for (std::size_t i = 0; i < grid.size(); ++i) {
        // grid untouched by conversions
        CHECK(sb.as_tabulated().omega[i] == grid[i]);
        CHECK(sbeta.as_tabulated().omega[i] == grid[i]);
        // dividing back by |gamma| reproduces S_B exactly
        CHECK(sbeta.as_tabulated().amplitude[i] / std::abs(spin.gamma) ==
              doctest::Approx(sb.as_tabulated().amplitude[i]).epsilon(1e-15));
    }

    // scaling S_V by alpha scales S_B by alpha exactly
    const double alpha = 3.75;
    std::vector<double> scaled = amps;
    for (auto& a : scaled) a *= alpha;
    const auto sv2 = SpectralDensity::tabulated(DensityKind::Voltage, grid, scaled);
    const auto sb2 = voltage_to_field(sv2, CouplingEta::scalar(15.0));
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(sb2.as_tabulated().amplitude[i] ==
              doctest::Approx(alpha * sb.as_tabulated().amplitude[i]).epsilon(1e-15));
}

TEST_CASE("kind mismatches raise KindError") {
    const auto sb = SpectralDensity::tabulated(DensityKind::Field, {100.0}, {1e-12});
    CHECK_THROWS_AS(voltage_to_field(sb, CouplingEta::scalar(1.0)), KindError);
    const auto sv = SpectralDensity::tabulated(DensityKind::Voltage, {100.0}, {1e-6});
    CHECK_THROWS_AS(field_to_frequency(sv, SpinSpecies::electron(4.46)), KindError);
}

TEST_CASE("power-law conversions stay analytic with scalar eta") {
    const auto sv = SpectralDensity::power_law(DensityKind::Voltage, 2e-5, -1.0, 100.0, 5000.0);
    const auto sb = voltage_to_field(sv, CouplingEta::scalar(4.0));
    const auto& p = sb.as_power_law();
    CHECK(p.coefficient == doctest::Approx(5e-6));
    CHECK(p.exponent == doctest::Approx(-2.0));
    CHECK(sb.density_at(200.0) == doctest::Approx(sv.density_at(200.0) / (4.0 * 200.0)));

    CHECK_THROWS_AS(voltage_to_field(sv, CouplingEta::tabulated({100.0, 5000.0}, {2.0, 4.0})),
                    ValidationError);
}

TEST_CASE("density_at interpolates log-log and vanishes outside the support") {
    const auto sd =
        SpectralDensity::tabulated(DensityKind::Frequency, {100.0, 1000.0}, {1.0, 0.1});
    // exact power law through the two points: S ~ w^-1
    CHECK(sd.density_at(316.22776601683794) == doctest::Approx(1.0 / 3.1622776601683795));
    CHECK(sd.density_at(99.0) == 0.0);
    CHECK(sd.density_at(1001.0) == 0.0);
    CHECK(sd.density_at(100.0) == 1.0);
    CHECK(sd.density_at(1000.0) == 0.1);
}

TEST_CASE("integrate_square closed forms") {
    // white band: integral of c^2 over [w1, w2]
    const auto white = SpectralDensity::power_law(DensityKind::Frequency, 3.0, 0.0, 10.0, 50.0);
    CHECK(white.integrate_square() == doctest::Approx(9.0 * 40.0).epsilon(1e-12));

    // 1/omega: integral of a^2/w^2 = a^2 (1/w1 - 1/w2)
    const auto pink = SpectralDensity::power_law(DensityKind::Frequency, 2.0, -1.0, 10.0, 40.0);
    CHECK(pink.integrate_square() == doctest::Approx(4.0 * (0.1 - 0.025)).epsilon(1e-12));

    // tabulated version of the same power law matches on a shared cell
    const auto tab = SpectralDensity::tabulated(DensityKind::Frequency, {10.0, 40.0},
                                                 {2.0 / 10.0, 2.0 / 40.0});
    CHECK(tab.integrate_square() == doctest::Approx(pink.integrate_square()).epsilon(1e-12));

    // against the generic adaptive quadrature route
    const auto mixed = SpectralDensity::tabulated(
        DensityKind::Frequency, {10.0, 30.0, 100.0, 400.0}, {1.0, 0.0, 2.5, 0.7});
    const auto f = [&](double w) {
        const double s = mixed.density_at(w);
        return s * s;
    };
    const auto quad = integrate_adaptive(f, {10.0, 30.0, 100.0, 400.0}, 1e-12);
    CHECK(mixed.integrate_square() == doctest::Approx(quad.value).epsilon(1e-9));

    // divergent tail rejected, convergent tail allowed
    const auto slow = SpectralDensity::power_law(DensityKind::Frequency, 1.0, -0.4, 10.0,
                                                 std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(slow.integrate_square(), ValidationError);
    const auto fast = SpectralDensity::power_law(DensityKind::Frequency, 1.0, -1.0, 10.0,
                                                 std::numeric_limits<double>::infinity());
    CHECK(fast.integrate_square() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("tone sets carry amplitudes, not densities") {
    const auto ts = SpectralDensity::tones(DensityKind::Field, {{500.0, 2e-9}, {100.0, 1e-9}});
    CHECK(ts.density_at(100.0) == 0.0);
    // sorted by frequency on construction
    CHECK(ts.as_tone_set().tones[0].omega == 100.0);
    // conversions rescale tone amplitudes point-wise
    const auto spin = SpinSpecies::electron(4.46);
    const auto tf = field_to_frequency(ts, spin);
    CHECK(tf.as_tone_set().tones[0].amplitude ==
          doctest::Approx(std::abs(spin.gamma) * 1e-9));
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(SpectralDensity::tabulated(DensityKind::Voltage, {}, {}), ValidationError);
    CHECK_THROWS_AS(SpectralDensity::tabulated(DensityKind::Voltage, {0.0}, {1.0}),
                    ValidationError);
    CHECK_THROWS_AS(SpectralDensity::tabulated(DensityKind::Voltage, {1.0, 1.0}, {1.0, 1.0}),
                    ValidationError);
    CHECK_THROWS_AS(CouplingEta::scalar(0.0), ValidationError);
    CHECK_THROWS_AS(CouplingEta::scalar(-2.0), ValidationError);
    CHECK_THROWS_AS(SpinSpecies(0.0, 4.46), ValidationError);
    CHECK_THROWS_AS(SpinSpecies(1e10, 0.0), ValidationError);
    CHECK_THROWS_AS(SpinSpecies(1e10, 1.0, -1e11), ValidationError);
}

TEST_CASE("coupling eta interpolates linearly in log omega and clamps") {
    const auto eta = CouplingEta::tabulated({100.0, 10000.0}, {10.0, 30.0});
    CHECK(eta.at(100.0) == 10.0);
    CHECK(eta.at(10000.0) == 30.0);
    CHECK(eta.at(1000.0) == doctest::Approx(20.0)); // geometric midpoint in omega
    CHECK(eta.at(1.0) == 10.0);
    CHECK(eta.at(1e6) == 30.0);
}
