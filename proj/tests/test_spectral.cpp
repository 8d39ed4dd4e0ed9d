#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vlcsim/errors.hpp"
#include "vlcsim/spectral.hpp"

using namespace vlcsim;

namespace {

// Test-local high-resolution integrator, independent of SpectralCurve.
double psd_integral_fine(const LedColorParams& p, double lo, double hi, double step) {
    const int n = static_cast<int>(std::round((hi - lo) / step));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = lo + i * step, b = a + step;
        acc += 0.5 * (led_psd_value(p, a) + led_psd_value(p, b)) * step;
    }
    return acc;
}

} // namespace

TEST_CASE("peak-normalized PSD value") {
    const auto leds = default_led_params();
    CHECK(led_psd_value(leds[0], 632.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(led_psd_value(leds[1], 517.7) == doctest::Approx(1.0).epsilon(1e-12));
    // one right-half-width above the red peak: g = e^-1, k1 = 2, k2 = 6
    CHECK(led_psd_value(leds[0], 632.5 + 14.74) == doctest::Approx(0.12428).epsilon(1e-4));
    CHECK_THROWS_AS(led_psd_value(leds[0], 379.9), DomainError);
    CHECK_THROWS_AS(led_psd_value(leds[0], 780.1), DomainError);
}

TEST_CASE("PSD continuous at the peak") {
    for (const auto& p : default_led_params()) {
        const double below = led_psd_value(p, std::nextafter(p.peak_nm, 0.0));
        const double above = led_psd_value(p, std::nextafter(p.peak_nm, 1000.0));
        CHECK(below == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(above == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("normalized PSD integrates to one and keeps its shape") {
    const auto leds = default_led_params();
    for (const auto& p : leds) {
        const SpectralCurve c = normalized_psd(p);
        CHECK(c.integral() == doctest::Approx(1.0).epsilon(1e-9));
        // argmax at the grid point nearest the peak
        int argmax = 0;
        for (int i = 1; i < kGridSamples; ++i)
            if (c.samples[i] > c.samples[argmax]) argmax = i;
        CHECK(c.wavelength_at(argmax) == doctest::Approx(p.peak_nm).epsilon(1e-2));
        for (double v : c.samples) CHECK(v >= 0.0);
    }
    const SpectralCurve blue = normalized_psd(leds[2]);
    CHECK(blue.samples[453 - 380] > blue.samples[500 - 380]);
}

TEST_CASE("received power matrix basics") {
    const auto leds = default_led_params();
    std::array<SpectralCurve, 3> psds;
    for (int i = 0; i < 3; ++i) psds[i] = normalized_psd(leds[i]);
    const FilterBank fb = default_filter_bank();

    const PowerMatrix zero =
        received_power_matrix(psds, fb, {0.0, 0.0, 0.0}, 3.132e-4, 1.0);
    CHECK(zero.sum() == 0.0);

    const PowerMatrix m1 = received_power_matrix(psds, fb, {1.0, 1.0, 1.0}, 3.132e-4, 1.0);
    const PowerMatrix m2 = received_power_matrix(psds, fb, {1.0, 1.0, 1.0}, 6.264e-4, 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(m2.p[i][j] == doctest::Approx(2.0 * m1.p[i][j]).epsilon(1e-12));

    // the green PSD (right width 45.21 nm) spills above 590 nm
    CHECK(m1.p[1][0] > 0.0);

    // full-power diagonal dominance within each receiver column
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            if (i != j) CHECK(m1.p[j][j] > m1.p[i][j]);

    // conservation: total received power cannot exceed P_led * h
    CHECK(m1.sum() <= 3.132e-4 * 1.0 + 1e-15);

    CHECK_THROWS_AS(received_power_matrix(psds, fb, {-0.1, 0.5, 0.6}, 1e-4, 1.0),
                    DomainError);
}

TEST_CASE("received power matrix is additive in the symbol") {
    const auto leds = default_led_params();
    std::array<SpectralCurve, 3> psds;
    for (int i = 0; i < 3; ++i) psds[i] = normalized_psd(leds[i]);
    const FilterBank fb = default_filter_bank();
    const std::array<double, 3> sa{0.3, 0.5, 0.1}, sb{0.2, 0.1, 0.6};
    std::array<double, 3> ssum{};
    for (int i = 0; i < 3; ++i) ssum[i] = sa[i] + sb[i];
    const PowerMatrix ma = received_power_matrix(psds, fb, sa, 1e-4, 1.0);
    const PowerMatrix mb = received_power_matrix(psds, fb, sb, 1e-4, 1.0);
    const PowerMatrix ms = received_power_matrix(psds, fb, ssum, 1e-4, 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(ms.p[i][j] ==
                  doctest::Approx(ma.p[i][j] + mb.p[i][j]).epsilon(1e-12));
}

TEST_CASE("grid refinement changes band integrals by less than 0.1%") {
    const auto leds = default_led_params();
    const FilterBank fb = default_filter_bank();
    for (const auto& p : leds) {
        const SpectralCurve c = normalized_psd(p);
        const double norm_fine = psd_integral_fine(p, kGridStartNm, kGridEndNm, 0.5);
        for (const auto& band : fb.bands) {
            const double coarse = c.band_integral(band.low_nm, band.high_nm);
            const double fine =
                psd_integral_fine(p, band.low_nm, band.high_nm, 0.5) / norm_fine;
            if (fine > 1e-6)
                CHECK(std::abs(coarse - fine) / fine < 1e-3);
        }
    }
}

TEST_CASE("composite power components") {
    const auto leds = default_led_params();
    std::array<SpectralCurve, 3> psds;
    for (int i = 0; i < 3; ++i) psds[i] = normalized_psd(leds[i]);
    const FilterBank fb = default_filter_bank();
    const std::array<double, 3> s1{1.0, 0.0, 0.0}, s2{0.0, 1.0, 0.0};

    auto [a0, b0] = composite_power_components(psds, fb, s1, s2, 0.0, 1e-4, 1.0);
    CHECK(a0.sum() == 0.0);
    auto [a1, b1] = composite_power_components(psds, fb, s1, s2, 1.0, 1e-4, 1.0);
    CHECK(b1.sum() == 0.0);

    auto [ae, be] = composite_power_components(psds, fb, s1, s1, 0.2, 1e-4, 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(be.p[i][j] == doctest::Approx(4.0 * ae.p[i][j]).epsilon(1e-12));

    // components sum to the matrix of the superposed symbol
    const double rho = 0.3;
    auto [ca, cb] = composite_power_components(psds, fb, s1, s2, rho, 1e-4, 1.0);
    std::array<double, 3> mix{};
    for (int i = 0; i < 3; ++i) mix[i] = s1[i] * rho + s2[i] * (1.0 - rho);
    const PowerMatrix whole = received_power_matrix(psds, fb, mix, 1e-4, 1.0);
    PowerMatrix parts = ca;
    parts += cb;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(parts.p[i][j] == doctest::Approx(whole.p[i][j]).epsilon(1e-12));

    CHECK_THROWS_AS(composite_power_components(psds, fb, s1, s2, 1.1, 1e-4, 1.0),
                    DomainError);
}
