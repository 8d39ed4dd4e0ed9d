#pragma once

// Photometric and colorimetric analysis of the communication-altered LED
// spectrum: luminous flux, correlated color temperature (CIE 1960 locus
// search) and the CIE 13.3 general color rendering index over the eight
// standard test color samples.

#include <array>
#include <string>
#include <vector>

#include "vlcsim/link.hpp"
#include "vlcsim/spectral.hpp"

namespace vlcsim {

struct CieDataset {
    // All tables sampled on the common [380, 780] nm grid at 1 nm.
    std::vector<double> xbar, ybar, zbar;       // CIE 1931 2-deg observer
    std::array<std::vector<double>, 8> tcs;     // test color sample reflectances
    std::vector<double> day_s0, day_s1, day_s2; // daylight components

    static constexpr double luminous_efficacy_lm_per_w = 683.0;

    // Loads cie_xyz_1931_2deg_1nm.txt, cie_tcs_1nm.txt, cie_daylight_1nm.txt.
    static CieDataset load(const std::string& data_dir);
};

struct Chromaticity {
    double x, y; // CIE 1931
    double u, v; // CIE 1960
};

struct IlluminationReport {
    double cri_ra;
    double cct_k;
    double luminous_flux_lm;
    bool out_of_gamut = false; // chromaticity farther than Duv 0.05 off the locus
};

struct XyzTristimulus {
    double X, Y, Z;
};

XyzTristimulus tristimulus(const CieDataset& cie, const SpectralCurve& curve);
Chromaticity chromaticity_of(const XyzTristimulus& t);

// Blackbody spectral radiance on the standard grid (relative units).
SpectralCurve planck_spd(double temperature_k);

// CIE daylight-phase spectrum for a correlated color temperature >= 4000 K.
SpectralCurve daylight_spd(const CieDataset& cie, double temperature_k);

// Per-color mean squared amplitude of the superposed symbol process,
// enumerated exactly over all 16 independent equiprobable symbol pairs.
// rho = 1 degenerates to the single-user constellation.
std::array<double, 3> transmitted_symbol_power(double rho,
                                               const CskConstellation& constellation);

// PSD_a(l) = sum_i PSD_i(l) * share_i * TSP_i with share_i = P_led/3.
SpectralCurve altered_psd(const std::array<SpectralCurve, 3>& psds,
                          const std::array<double, 3>& tsp, double p_led);

// 683 * Integral V(l) Phi(l) dl, V = ybar.
double luminous_flux(const CieDataset& cie, const SpectralCurve& curve);

// Planckian temperature minimizing CIE 1960 uv distance; 1 K scan over
// [1000, 25000] K with local refinement.  Sets *duv_out if given.
double cct(const CieDataset& cie, const SpectralCurve& curve, double* duv_out = nullptr);

// CIE 13.3 general color rendering index Ra (mean of R1..R8).  Reference is
// the Planckian radiator below 5000 K and the daylight phase at or above.
double cri(const CieDataset& cie, const SpectralCurve& curve);

struct IlluminationComparison {
    IlluminationReport no_comm;
    IlluminationReport csk_only;
    IlluminationReport noma_csk;
};

// The three-way comparison: constant full drive, single-user CSK, and
// NOMA-CSK at the given allocation coefficient.
IlluminationComparison illumination_compare(const CieDataset& cie,
                                            const std::array<SpectralCurve, 3>& psds,
                                            const CskConstellation& constellation,
                                            double rho, double p_led);

} // namespace vlcsim
