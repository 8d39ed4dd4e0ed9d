#pragma once

// RGB LED spectral model.
//
// The LED power spectral density follows the asymmetric double-exponential
// "H model": g(lambda) = exp(-(lambda-peak)^2 / width^2) with separate
// left/right widths, shaped as (g + k1*g^k2)/(1+k1).  Received optical
// power is obtained by integrating the unit-normalized PSD against ideal
// rectangular receiver filters on a fixed 1 nm wavelength grid.

#include <array>
#include <vector>

namespace vlcsim {

inline constexpr double kGridStartNm = 380.0;
inline constexpr double kGridEndNm = 780.0;
inline constexpr double kGridStepNm = 1.0;
inline constexpr int kGridSamples = 401;

struct LedColorParams {
    double peak_nm;        // lambda_p
    double left_width_nm;  // spectral half-width below the peak
    double right_width_nm; // spectral half-width above the peak
    double shape_k1;
    double shape_k2;
};

// OSRAM LZ4-00MA00 H-model parameters, red/green/blue.
std::array<LedColorParams, 3> default_led_params();

struct SpectralCurve {
    double grid_start = kGridStartNm;
    double grid_step = kGridStepNm;
    std::vector<double> samples;

    double wavelength_at(int i) const { return grid_start + grid_step * i; }
    // Trapezoidal integral over the full grid.
    double integral() const;
    // Trapezoidal integral restricted to [lo, hi] (band edges must lie on the grid).
    double band_integral(double lo_nm, double hi_nm) const;
};

struct FilterBand {
    double low_nm;
    double high_nm;
    double gain;
};

struct FilterBank {
    std::array<FilterBand, 3> bands; // indexed by receiver color R,G,B
};

// Ideal rectangular filters: R [590,700], G [485,590], B [380,485], gain 1.
FilterBank default_filter_bank();

// p[i][j]: transmitter color i, receiver filter j, in watts.
struct PowerMatrix {
    std::array<std::array<double, 3>, 3> p{};

    double sum() const;
    double trace() const;
    double offdiag_sum() const;
    PowerMatrix& operator+=(const PowerMatrix& o);
    PowerMatrix scaled(double f) const;
};

// Peak-normalized PSD value at a wavelength; value in (0, 1].
double led_psd_value(const LedColorParams& params, double lambda_nm);

// PSD sampled on the 1 nm grid, scaled so the trapezoidal integral is 1.
SpectralCurve normalized_psd(const LedColorParams& params);

// Received-power matrix for one superposed symbol S at channel gain h:
//   p[i][j] = (1/3) * P_led * S_i * h * Integral_band_j PSD_i(l) F_j(l) dl
PowerMatrix received_power_matrix(const std::array<SpectralCurve, 3>& psds,
                                  const FilterBank& filters,
                                  const std::array<double, 3>& symbol,
                                  double gain, double p_led);

// Per-source component matrices of the NOMA superposition: source 1 carries
// rho, source 2 carries 1-rho.  Their sum equals received_power_matrix of
// the superposed symbol.
std::pair<PowerMatrix, PowerMatrix>
composite_power_components(const std::array<SpectralCurve, 3>& psds,
                           const FilterBank& filters,
                           const std::array<double, 3>& symbol1,
                           const std::array<double, 3>& symbol2,
                           double rho, double gain, double p_led);

} // namespace vlcsim
