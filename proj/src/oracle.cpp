// SPDX-License-Identifier: Apache-2.0
#include "vdrt/oracle.hpp"

#include <algorithm>
#include <stdexcept>

#include "vdrt/special.hpp"

namespace vdrt {

namespace {

cplx jpow(int n) {
    static const cplx t[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return t[((n % 4) + 4) % 4];
}

double rel_change(cplx a, cplx b) {
    double s = std::max(std::abs(a), 1e-300);
    return std::abs(a - b) / s;
}

}  // namespace

CylinderSeries::CylinderSeries(double radius, double k, Pol pol, int extra)
    : a_(radius), k_(k), pol_(pol) {
    if (radius <= 0 || k <= 0) throw DomainError("cylinder series needs radius > 0 and k > 0");
    N_ = series_order(k * radius) + extra;
    std::vector<double> J, Y;
    bessel_jy(N_ + 1, k * radius, J, Y);
    c_.resize(N_ + 1);
    for (int n = 0; n <= N_; ++n) {
        cplx r;
        if (pol == Pol::TM) {
            r = -J[n] / cplx(J[n], -Y[n]);
        } else {
            double jd = n == 0 ? -J[1] : 0.5 * (J[n - 1] - J[n + 1]);
            double yd = n == 0 ? -Y[1] : 0.5 * (Y[n - 1] - Y[n + 1]);
            r = jd / cplx(jd, -yd);
        }
        c_[n] = jpow(n) * r;
    }
}

CylinderSeries::Fields CylinderSeries::at(double rho, double phi) const {
    if (rho < a_ * (1 - 1e-12)) throw DomainError("observation inside the cylinder");
    double x = k_ * rho;
    std::vector<double> J, Y;
    bessel_jy(N_ + 1, x, J, Y);
    Fields f;
    cplx dphi = 0, drho = 0;
    for (int n = 0; n <= N_; ++n) {
        double eps = n == 0 ? 1.0 : 2.0;
        cplx H(J[n], -Y[n]);
        f.scattered += eps * c_[n] * H * std::cos(n * phi);
        if (pol_ == Pol::TE) {
            double jd = n == 0 ? -J[1] : 0.5 * (J[n - 1] - J[n + 1]);
            double yd = n == 0 ? -Y[1] : 0.5 * (Y[n - 1] - Y[n + 1]);
            dphi += -eps * n * c_[n] * H * std::sin(n * phi);
            drho += eps * c_[n] * cplx(jd, -yd) * std::cos(n * phi);
        }
    }
    cplx inc = std::polar(1.0, k_ * rho * std::cos(phi));
    f.incident = pol_ == Pol::TM ? inc : -inc;
    if (pol_ == Pol::TE) {
        f.E_rho = dphi / (kJ * x);
        f.E_phi = kJ * drho;
    }
    return f;
}

MieSeries::MieSeries(double radius, double k, Pol pol, int extra) : a_(radius), k_(k), pol_(pol) {
    if (radius <= 0 || k <= 0) throw DomainError("Mie series needs radius > 0 and k > 0");
    N_ = series_order(k * radius) + extra;
    double x = k * radius;
    std::vector<double> j, y;
    spherical_jy(N_ + 1, x, j, y);
    an_.resize(N_ + 1);
    bn_.resize(N_ + 1);
    for (int n = 1; n <= N_; ++n) {
        cplx h(j[n], y[n]), hm(j[n - 1], y[n - 1]);
        double psi = x * j[n], dpsi = x * j[n - 1] - n * j[n];
        cplx xi = x * h, dxi = x * hm - double(n) * h;
        an_[n] = dpsi / dxi;
        bn_[n] = psi / xi;
    }
    ez_ = {-1, 0, 0};
    if (pol == Pol::HH) {
        ex_ = {0, 1, 0};
        ey_ = {0, 0, -1};
    } else {
        ex_ = {0, 0, 1};
        ey_ = {0, 1, 0};
    }
}

MieSeries::Fields MieSeries::at(const Vec3& p) const {
    double X = dot(p, ex_), Y = dot(p, ey_), Z = dot(p, ez_);
    double r = std::sqrt(X * X + Y * Y + Z * Z);
    if (r < a_ * (1 - 1e-12)) throw DomainError("observation inside the sphere");
    double ct = Z / r, st = std::sqrt(std::max(0.0, 1 - ct * ct));
    double ph = std::atan2(Y, X);
    double cp = std::cos(ph), sp = std::sin(ph);
    double rho = k_ * r;
    std::vector<double> j, y;
    spherical_jy(N_ + 1, rho, j, y);

    // e^{-i w t} convention here, conjugated on return
    cplx Er, Et, Ep, Hr, Ht, Hp;
    double pim1 = 0, pin = 1;
    for (int n = 1; n <= N_; ++n) {
        if (n > 1) {
            double pn = ((2.0 * n - 1) / (n - 1)) * ct * pin - (double(n) / (n - 1)) * pim1;
            pim1 = pin;
            pin = pn;
        }
        double pi_n = pin, pi_nm1 = n == 1 ? 0.0 : pim1;
        double tau = n * ct * pi_n - (n + 1) * pi_nm1;
        cplx h(j[n], y[n]), hm(j[n - 1], y[n - 1]);
        cplx dh = hm - double(n) / rho * h;  // [rho h_n]' / rho
        cplx En = jpow(n) * (2.0 * n + 1) / (double(n) * (n + 1));
        double nn1 = double(n) * (n + 1);
        // M_o1n, M_e1n, N_o1n, N_e1n components (r, theta, phi)
        cplx Mo_t = cp * pi_n * h, Mo_p = -sp * tau * h;
        cplx Me_t = -sp * pi_n * h, Me_p = -cp * tau * h;
        cplx No_r = sp * nn1 * st * pi_n * h / rho, No_t = sp * tau * dh, No_p = cp * pi_n * dh;
        cplx Ne_r = cp * nn1 * st * pi_n * h / rho, Ne_t = cp * tau * dh, Ne_p = -sp * pi_n * dh;
        cplx ia = cplx(0, 1) * an_[n], ib = cplx(0, 1) * bn_[n];
        Er += En * (ia * Ne_r);
        Et += En * (ia * Ne_t - bn_[n] * Mo_t);
        Ep += En * (ia * Ne_p - bn_[n] * Mo_p);
        Hr += En * (ib * No_r);
        Ht += En * (ib * No_t + an_[n] * Me_t);
        Hp += En * (ib * No_p + an_[n] * Me_p);
    }
    Vec3 er{st * cp, st * sp, ct}, et{ct * cp, ct * sp, -st}, ep{-sp, cp, 0};
    auto to_scene = [&](cplx a, cplx b, cplx c) {
        Vec3 ur = er, ut = et, up = ep;
        CVec3 v = CVec3(ur) * std::conj(a) + CVec3(ut) * std::conj(b) + CVec3(up) * std::conj(c);
        return CVec3(ex_) * v.x + CVec3(ey_) * v.y + CVec3(ez_) * v.z;
    };
    Fields f;
    f.Es = to_scene(Er, Et, Ep);
    f.Hs = to_scene(Hr, Ht, Hp);
    cplx ph_in = std::polar(1.0, -k_ * Z);
    f.Ei = CVec3(ex_) * ph_in;
    f.Hi = CVec3(ey_) * ph_in;
    return f;
}

double MieSeries::backscatter_efficiency() const {
    cplx s;
    for (int n = 1; n <= N_; ++n) s += (2.0 * n + 1) * (n % 2 ? -1.0 : 1.0) * (an_[n] - bn_[n]);
    double x = k_ * a_;
    return std::norm(s) / (x * x);
}

double cylinder_certificate(double radius, double k, CylinderSeries::Pol pol,
                            const std::vector<std::pair<double, double>>& pts, int extra) {
    CylinderSeries a(radius, k, pol), b(radius, k, pol, extra);
    double worst = 0;
    for (auto [rho, phi] : pts) worst = std::max(worst, rel_change(b.at(rho, phi).scattered, a.at(rho, phi).scattered));
    return worst;
}

double mie_certificate(double radius, double k, MieSeries::Pol pol, const std::vector<Vec3>& pts,
                       int extra) {
    MieSeries a(radius, k, pol), b(radius, k, pol, extra);
    double worst = 0;
    for (const Vec3& p : pts) {
        auto fa = a.at(p), fb = b.at(p);
        double d = cnorm(fa.Es - fb.Es) / std::max(cnorm(fb.Es), 1e-300);
        worst = std::max(worst, d);
    }
    return worst;
}

RmseResult rmse_db(const std::vector<double>& ang, const std::vector<double>& t,
                   const std::vector<double>& r, const Region& reg) {
    if (ang.size() != t.size() || ang.size() != r.size())
        throw std::invalid_argument("rmse_db: sweeps have different lengths");
    RmseResult out;
    double acc = 0;
    for (size_t i = 0; i < ang.size(); ++i) {
        if (ang[i] < reg.lo_deg - 1e-9 || ang[i] > reg.hi_deg + 1e-9) continue;
        if (t[i] <= kDbUnderflow || r[i] <= kDbUnderflow) {
            ++out.excluded;
            continue;
        }
        double d = t[i] - r[i];
        acc += d * d;
        ++out.used;
    }
    if (out.used == 0) throw DomainError("rmse_db: region '" + reg.name + "' is empty");
    out.rmse_db = std::sqrt(acc / out.used);
    return out;
}

}  // namespace vdrt
