#include "vlcsim/spectral.hpp"

#include <cmath>
#include <string>

#include "vlcsim/errors.hpp"

namespace vlcsim {

std::array<LedColorParams, 3> default_led_params() {
    // LZ4-00MA00 red / green / blue
    return {{
        {632.5, 23.84, 14.74, 2.0, 6.0},
        {517.7, 29.38, 45.21, 2.0, 3.0},
        {453.0, 18.99, 25.50, 2.0, 5.0},
    }};
}

FilterBank default_filter_bank() {
    return FilterBank{{{{590.0, 700.0, 1.0}, {485.0, 590.0, 1.0}, {380.0, 485.0, 1.0}}}};
}

double SpectralCurve::integral() const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        acc += 0.5 * (samples[i] + samples[i + 1]) * grid_step;
    return acc;
}

double SpectralCurve::band_integral(double lo_nm, double hi_nm) const {
    if (hi_nm <= lo_nm) return 0.0;
    auto index_of = [&](double nm) {
        double fi = (nm - grid_start) / grid_step;
        long i = std::lround(fi);
        if (i < 0) i = 0;
        long last = static_cast<long>(samples.size()) - 1;
        if (i > last) i = last;
        return static_cast<std::size_t>(i);
    };
    std::size_t lo = index_of(lo_nm), hi = index_of(hi_nm);
    double acc = 0.0;
    for (std::size_t i = lo; i + 1 <= hi; ++i)
        acc += 0.5 * (samples[i] + samples[i + 1]) * grid_step;
    return acc;
}

double PowerMatrix::sum() const {
    double s = 0.0;
    for (const auto& row : p)
        for (double v : row) s += v;
    return s;
}

double PowerMatrix::trace() const { return p[0][0] + p[1][1] + p[2][2]; }

double PowerMatrix::offdiag_sum() const { return sum() - trace(); }

PowerMatrix& PowerMatrix::operator+=(const PowerMatrix& o) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) p[i][j] += o.p[i][j];
    return *this;
}

PowerMatrix PowerMatrix::scaled(double f) const {
    PowerMatrix out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out.p[i][j] = p[i][j] * f;
    return out;
}

double led_psd_value(const LedColorParams& params, double lambda_nm) {
    if (lambda_nm < kGridStartNm || lambda_nm > kGridEndNm)
        throw DomainError("wavelength outside [380, 780] nm: " + std::to_string(lambda_nm));
    const double width =
        lambda_nm < params.peak_nm ? params.left_width_nm : params.right_width_nm;
    const double d = (lambda_nm - params.peak_nm) / width;
    const double g = std::exp(-d * d);
    return (g + params.shape_k1 * std::pow(g, params.shape_k2)) / (1.0 + params.shape_k1);
}

SpectralCurve normalized_psd(const LedColorParams& params) {
    SpectralCurve curve;
    curve.samples.resize(kGridSamples);
    for (int i = 0; i < kGridSamples; ++i)
        curve.samples[i] = led_psd_value(params, curve.wavelength_at(i));
    const double area = curve.integral();
    for (double& v : curve.samples) v /= area;
    return curve;
}

PowerMatrix received_power_matrix(const std::array<SpectralCurve, 3>& psds,
                                  const FilterBank& filters,
                                  const std::array<double, 3>& symbol,
                                  double gain, double p_led) {
    for (double s : symbol)
        if (s < 0.0) throw DomainError("negative symbol component");
    PowerMatrix out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const FilterBand& b = filters.bands[j];
            // The filter selects the band, so the integral runs over the
            // receiver band regardless of the transmitter color.
            const double frac = psds[i].band_integral(b.low_nm, b.high_nm) * b.gain;
            out.p[i][j] = (1.0 / 3.0) * p_led * frac * symbol[i] * gain;
        }
    }
    return out;
}

std::pair<PowerMatrix, PowerMatrix>
composite_power_components(const std::array<SpectralCurve, 3>& psds,
                           const FilterBank& filters,
                           const std::array<double, 3>& symbol1,
                           const std::array<double, 3>& symbol2,
                           double rho, double gain, double p_led) {
    if (rho < 0.0 || rho > 1.0) throw DomainError("allocation coefficient outside [0, 1]");
    std::array<double, 3> s1{}, s2{};
    for (int i = 0; i < 3; ++i) {
        s1[i] = symbol1[i] * rho;
        s2[i] = symbol2[i] * (1.0 - rho);
    }
    return {received_power_matrix(psds, filters, s1, gain, p_led),
            received_power_matrix(psds, filters, s2, gain, p_led)};
}

} // namespace vlcsim
