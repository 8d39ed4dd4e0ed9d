#include "vlcsim/illumination.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vlcsim/errors.hpp"

namespace vlcsim {

namespace {

std::vector<std::vector<double>> read_table(const std::string& path, std::size_t cols) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data table: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::vector<double> row;
        double v;
        while (ss >> v) row.push_back(v);
        if (row.size() != cols)
            throw FormatError(path + ": expected " + std::to_string(cols) +
                              " columns, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.size() != static_cast<std::size_t>(kGridSamples))
        throw FormatError(path + ": expected " + std::to_string(kGridSamples) + " rows");
    return rows;
}

double trapz(const std::vector<double>& y, double step = kGridStepNm) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) acc += 0.5 * (y[i] + y[i + 1]) * step;
    return acc;
}

} // namespace

CieDataset CieDataset::load(const std::string& data_dir) {
    CieDataset d;
    const auto cmf = read_table(data_dir + "/cie_xyz_1931_2deg_1nm.txt", 4);
    const auto tcs = read_table(data_dir + "/cie_tcs_1nm.txt", 9);
    const auto day = read_table(data_dir + "/cie_daylight_1nm.txt", 4);
    d.xbar.resize(kGridSamples);
    d.ybar.resize(kGridSamples);
    d.zbar.resize(kGridSamples);
    for (auto& t : d.tcs) t.resize(kGridSamples);
    d.day_s0.resize(kGridSamples);
    d.day_s1.resize(kGridSamples);
    d.day_s2.resize(kGridSamples);
    for (int i = 0; i < kGridSamples; ++i) {
        const double lam = kGridStartNm + i * kGridStepNm;
        if (std::abs(cmf[i][0] - lam) > 1e-9 || std::abs(tcs[i][0] - lam) > 1e-9 ||
            std::abs(day[i][0] - lam) > 1e-9)
            throw FormatError("data tables must share the 380..780 nm 1 nm grid");
        d.xbar[i] = cmf[i][1];
        d.ybar[i] = cmf[i][2];
        d.zbar[i] = cmf[i][3];
        for (int k = 0; k < 8; ++k) d.tcs[k][i] = tcs[i][k + 1];
        d.day_s0[i] = day[i][1];
        d.day_s1[i] = day[i][2];
        d.day_s2[i] = day[i][3];
    }
    return d;
}

XyzTristimulus tristimulus(const CieDataset& cie, const SpectralCurve& curve) {
    if (curve.samples.size() != static_cast<std::size_t>(kGridSamples))
        throw DomainError("spectral curve is not on the standard grid");
    std::vector<double> ix(kGridSamples), iy(kGridSamples), iz(kGridSamples);
    for (int i = 0; i < kGridSamples; ++i) {
        ix[i] = curve.samples[i] * cie.xbar[i];
        iy[i] = curve.samples[i] * cie.ybar[i];
        iz[i] = curve.samples[i] * cie.zbar[i];
    }
    return {trapz(ix), trapz(iy), trapz(iz)};
}

Chromaticity chromaticity_of(const XyzTristimulus& t) {
    const double s = t.X + t.Y + t.Z;
    const double du = t.X + 15.0 * t.Y + 3.0 * t.Z;
    return {t.X / s, t.Y / s, 4.0 * t.X / du, 6.0 * t.Y / du};
}

SpectralCurve planck_spd(double temperature_k) {
    if (temperature_k <= 0.0) throw DomainError("temperature must be positive");
    SpectralCurve c;
    c.samples.resize(kGridSamples);
    const double c1 = 3.741771852e-16; // 2*pi*h*c^2, W m^2
    const double c2 = 1.438776877e-2;  // h*c/k_B, m K
    for (int i = 0; i < kGridSamples; ++i) {
        const double lm = c.wavelength_at(i) * 1e-9;
        c.samples[i] = c1 / std::pow(lm, 5) / std::expm1(c2 / (lm * temperature_k));
    }
    return c;
}

SpectralCurve daylight_spd(const CieDataset& cie, double temperature_k) {
    if (temperature_k < 4000.0 || temperature_k > 25000.0)
        throw DomainError("daylight phase defined on [4000, 25000] K");
    const double t = temperature_k;
    double xd;
    if (t <= 7000.0)
        xd = -4.6070e9 / (t * t * t) + 2.9678e6 / (t * t) + 0.09911e3 / t + 0.244063;
    else
        xd = -2.0064e9 / (t * t * t) + 1.9018e6 / (t * t) + 0.24748e3 / t + 0.237040;
    const double yd = -3.000 * xd * xd + 2.870 * xd - 0.275;
    const double m = 0.0241 + 0.2562 * xd - 0.7341 * yd;
    const double m1 = (-1.3515 - 1.7703 * xd + 5.9114 * yd) / m;
    const double m2 = (0.0300 - 31.4424 * xd + 30.0717 * yd) / m;
    SpectralCurve c;
    c.samples.resize(kGridSamples);
    for (int i = 0; i < kGridSamples; ++i)
        c.samples[i] = cie.day_s0[i] + m1 * cie.day_s1[i] + m2 * cie.day_s2[i];
    return c;
}

std::array<double, 3> transmitted_symbol_power(double rho,
                                               const CskConstellation& constellation) {
    if (rho < 0.0 || rho > 1.0) throw DomainError("allocation coefficient outside [0, 1]");
    std::array<double, 3> tsp{0.0, 0.0, 0.0};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int i = 0; i < 3; ++i) {
                const double v = constellation.symbols[a][i] * rho +
                                 constellation.symbols[b][i] * (1.0 - rho);
                tsp[i] += v * v;
            }
    for (double& v : tsp) v /= 16.0;
    return tsp;
}

SpectralCurve altered_psd(const std::array<SpectralCurve, 3>& psds,
                          const std::array<double, 3>& tsp, double p_led) {
    SpectralCurve out;
    out.samples.assign(kGridSamples, 0.0);
    for (int i = 0; i < 3; ++i) {
        const double share = p_led / 3.0;
        for (int k = 0; k < kGridSamples; ++k)
            out.samples[k] += psds[i].samples[k] * share * tsp[i];
    }
    return out;
}

double luminous_flux(const CieDataset& cie, const SpectralCurve& curve) {
    std::vector<double> y(kGridSamples);
    for (int i = 0; i < kGridSamples; ++i) y[i] = curve.samples[i] * cie.ybar[i];
    return CieDataset::luminous_efficacy_lm_per_w * trapz(y);
}

namespace {

double uv_dist2(const Chromaticity& a, const Chromaticity& b) {
    const double du = a.u - b.u, dv = a.v - b.v;
    return du * du + dv * dv;
}

} // namespace

double cct(const CieDataset& cie, const SpectralCurve& curve, double* duv_out) {
    const Chromaticity target = chromaticity_of(tristimulus(cie, curve));
    double best_t = 1000.0, best_d = 1e300;
    for (double t = 1000.0; t <= 25000.0; t += 1.0) {
        const Chromaticity p = chromaticity_of(tristimulus(cie, planck_spd(t)));
        const double d = uv_dist2(target, p);
        if (d < best_d) {
            best_d = d;
            best_t = t;
        }
    }
    // local refinement around the 1 K winner
    for (double step = 0.5; step > 0.01; step *= 0.5) {
        for (const double t : {best_t - step, best_t + step}) {
            if (t < 1000.0 || t > 25000.0) continue;
            const Chromaticity p = chromaticity_of(tristimulus(cie, planck_spd(t)));
            const double d = uv_dist2(target, p);
            if (d < best_d) {
                best_d = d;
                best_t = t;
            }
        }
    }
    if (duv_out) *duv_out = std::sqrt(best_d);
    return best_t;
}

double cri(const CieDataset& cie, const SpectralCurve& curve) {
    double duv = 0.0;
    const double t = cct(cie, curve, &duv);
    const SpectralCurve ref = t < 5000.0 ? planck_spd(t) : daylight_spd(cie, t);

    auto sample_xyz = [&](const SpectralCurve& src, int k) {
        std::vector<double> ix(kGridSamples), iy(kGridSamples), iz(kGridSamples);
        for (int i = 0; i < kGridSamples; ++i) {
            const double s = src.samples[i] * cie.tcs[k][i];
            ix[i] = s * cie.xbar[i];
            iy[i] = s * cie.ybar[i];
            iz[i] = s * cie.zbar[i];
        }
        return XyzTristimulus{trapz(ix), trapz(iy), trapz(iz)};
    };
    auto cd_terms = [](const Chromaticity& c) {
        const double cc = (4.0 - c.u - 10.0 * c.v) / c.v;
        const double dd = (1.708 * c.v + 0.404 - 1.481 * c.u) / c.v;
        return std::pair<double, double>{cc, dd};
    };

    const XyzTristimulus test_w = tristimulus(cie, curve);
    const XyzTristimulus ref_w = tristimulus(cie, ref);
    const Chromaticity ct = chromaticity_of(test_w);
    const Chromaticity cr = chromaticity_of(ref_w);
    const auto [ct_c, ct_d] = cd_terms(ct);
    const auto [cr_c, cr_d] = cd_terms(cr);

    double sum_r = 0.0;
    for (int k = 0; k < 8; ++k) {
        const XyzTristimulus xt = sample_xyz(curve, k);
        const XyzTristimulus xr = sample_xyz(ref, k);
        const Chromaticity st = chromaticity_of(xt);
        const Chromaticity sr = chromaticity_of(xr);

        // von Kries adaptation of the test-sample chromaticity to the reference white
        const auto [sc, sd] = cd_terms(st);
        const double den = 16.518 + 1.481 * (cr_c / ct_c) * sc - (cr_d / ct_d) * sd;
        const double u_adapted =
            (10.872 + 0.404 * (cr_c / ct_c) * sc - 4.0 * (cr_d / ct_d) * sd) / den;
        const double v_adapted = 5.520 / den;

        const double y_t = 100.0 * xt.Y / test_w.Y;
        const double y_r = 100.0 * xr.Y / ref_w.Y;
        const double w_t = 25.0 * std::cbrt(y_t) - 17.0;
        const double w_r = 25.0 * std::cbrt(y_r) - 17.0;
        const double u_ref_white = cr.u, v_ref_white = cr.v;
        const double ustar_t = 13.0 * w_t * (u_adapted - u_ref_white);
        const double vstar_t = 13.0 * w_t * (v_adapted - v_ref_white);
        const double ustar_r = 13.0 * w_r * (sr.u - u_ref_white);
        const double vstar_r = 13.0 * w_r * (sr.v - v_ref_white);

        const double de = std::sqrt((ustar_r - ustar_t) * (ustar_r - ustar_t) +
                                    (vstar_r - vstar_t) * (vstar_r - vstar_t) +
                                    (w_r - w_t) * (w_r - w_t));
        sum_r += 100.0 - 4.6 * de;
    }
    return sum_r / 8.0;
}

IlluminationComparison illumination_compare(const CieDataset& cie,
                                            const std::array<SpectralCurve, 3>& psds,
                                            const CskConstellation& constellation,
                                            double rho, double p_led) {
    auto report_of = [&](const std::array<double, 3>& tsp) {
        const SpectralCurve spd = altered_psd(psds, tsp, p_led);
        IlluminationReport rep;
        double duv = 0.0;
        rep.cct_k = cct(cie, spd, &duv);
        rep.out_of_gamut = duv > 0.05;
        rep.cri_ra = cri(cie, spd);
        rep.luminous_flux_lm = luminous_flux(cie, spd);
        return rep;
    };
    IlluminationComparison cmp;
    cmp.no_comm = report_of({1.0, 1.0, 1.0});
    cmp.csk_only = report_of(transmitted_symbol_power(1.0, constellation));
    cmp.noma_csk = report_of(transmitted_symbol_power(rho, constellation));
    return cmp;
}

} // namespace vlcsim
