// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "vdrt/special.hpp"
#include "vdrt/vec3.hpp"

namespace vdrt {

// Smallest order commonly quoted for convergence.
inline int series_order_min(double kR) {
    return static_cast<int>(std::ceil(kR + 4 * std::cbrt(kR) + 2));
}
// Order actually used: wide enough that the boundary condition holds to ~1e-12.
inline int series_order(double kR) {
    return static_cast<int>(std::ceil(kR + 8 * std::cbrt(kR) + 10));
}

// Infinite PEC circular cylinder along z, plane wave E_inc = p e^{jkx} (travelling -x).
// TM: p = z, the series gives E_z. TE: p = y, the series gives eta*H_z.
class CylinderSeries {
public:
    enum class Pol { TM, TE };
    CylinderSeries(double radius, double k, Pol pol, int extra_terms = 0);

    struct Fields {
        cplx scattered;  // E_z (TM) or eta*H_z (TE)
        cplx incident;
        cplx total() const { return scattered + incident; }
        cplx E_rho, E_phi;  // scattered transverse E (TE only)
    };
    Fields at(double rho, double phi) const;

    int order() const { return N_; }
    double radius() const { return a_; }
    double k() const { return k_; }
    Pol pol() const { return pol_; }

private:
    double a_, k_;
    Pol pol_;
    int N_;
    std::vector<cplx> c_;  // j^n * boundary ratio, n = 0..N
};

// Mie series for a PEC sphere at the origin. The scene plane wave travels along -x
// with E along y (HH) or z (VV).
class MieSeries {
public:
    enum class Pol { HH, VV };
    MieSeries(double radius, double k, Pol pol, int extra_terms = 0);

    struct Fields {
        CVec3 Es, Hs;  // scattered E and eta*H in scene coordinates
        CVec3 Ei, Hi;  // incident
    };
    Fields at(const Vec3& r) const;

    // Monostatic backscatter efficiency sigma / (pi R^2).
    double backscatter_efficiency() const;

    int order() const { return N_; }
    double radius() const { return a_; }
    Pol pol() const { return pol_; }

private:
    double a_, k_;
    Pol pol_;
    int N_;
    std::vector<cplx> an_, bn_;
    Vec3 ex_, ey_, ez_;  // Mie frame axes in scene coordinates
};

// Relative change when the truncation order grows by `extra` terms, maximised over `pts`.
double cylinder_certificate(double radius, double k, CylinderSeries::Pol pol,
                            const std::vector<std::pair<double, double>>& pts, int extra = 10);
double mie_certificate(double radius, double k, MieSeries::Pol pol, const std::vector<Vec3>& pts,
                       int extra = 10);

inline constexpr double kDbFloor = -999.0;
inline constexpr double kDbUnderflow = -200.0;

inline double to_db(cplx v) {
    double a = std::abs(v);
    return a > 0 ? 20 * std::log10(a) : kDbFloor;
}

struct Region {
    std::string name;
    double lo_deg = 0, hi_deg = 0;
    bool total = false;  // compare total field instead of the scattered field
};

struct RmseResult {
    double rmse_db = 0;
    int used = 0;
    int excluded = 0;
};

// RMSE of dB differences over the angles inside the region. Points at or below the
// underflow level in either sweep are skipped and counted. Throws if nothing remains.
RmseResult rmse_db(const std::vector<double>& angles_deg, const std::vector<double>& test_db,
                   const std::vector<double>& ref_db, const Region& region);

}  // namespace vdrt
