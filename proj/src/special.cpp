// SPDX-License-Identifier: Apache-2.0
#include "vdrt/special.hpp"

#include <algorithm>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <limits>

namespace vdrt {

namespace {

const cplx kEmPi4 = std::polar(1.0, -kPi / 4);  // e^{-j pi/4}

}  // namespace

cplx fresnel_transition_series(double x) {
    if (x < 0) throw DomainError("fresnel_transition: negative argument");
    if (x == 0) return 0.0;
    double v = std::sqrt(x);
    // int_0^v e^{-j t^2} dt = sum (-j)^k v^{2k+1} / (k! (2k+1))
    cplx term = v, sum = v;
    const cplx mj{0, -1};
    for (int k = 1; k < 200; ++k) {
        term *= mj * x / double(k);
        cplx add = term / double(2 * k + 1);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    cplx U = 0.5 * std::sqrt(kPi) * kEmPi4 - sum;
    return 2.0 * kJ * v * std::polar(1.0, x) * U;
}

cplx fresnel_transition_cf(double x, int depth) {
    if (x < 0) throw DomainError("fresnel_transition: negative argument");
    if (x == 0) return 0.0;
    // sqrt(pi) e^{z^2} erfc(z) = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), z = e^{j pi/4} sqrt(x)
    cplx z = std::polar(std::sqrt(x), kPi / 4);
    cplx t = z;
    for (int k = depth; k >= 1; --k) t = z + (0.5 * k) / t;
    cplx K = 1.0 / t;
    return kJ * std::sqrt(x) * kEmPi4 * K;
}

cplx fresnel_transition(double x) {
    if (!(x >= 0)) throw DomainError("fresnel_transition: argument must be >= 0");
    if (x < kFresnelSeam) return fresnel_transition_series(x);
    return fresnel_transition_cf(x, x < 20 ? 80 : 40);
}

cplx fresnel_transition_deriv(double x) {
    if (!(x > 0)) throw DomainError("fresnel_transition_deriv: argument must be > 0");
    cplx F = fresnel_transition(x);
    return F * (0.5 / x + kJ) - kJ;
}

cplx gfi_G(double x, double y) {
    if (!(x > 0) || !(y >= 0)) throw DomainError("gfi_G: need x > 0, y >= 0");
    // rotate the path to t = y + e^{-j pi/4} u where the integrand decays
    const double x2 = x * x;
    auto f = [&](double u, bool im) {
        cplx t = y + kEmPi4 * u;
        cplx t2 = t * t;
        cplx val = std::exp(-kJ * x2 * t2) / (1.0 + t2);
        return im ? val.imag() : val.real();
    };
    boost::math::quadrature::exp_sinh<double> q;
    double tol = std::sqrt(std::numeric_limits<double>::epsilon()) * 1e-3;
    double re = q.integrate([&](double u) { return f(u, false); }, tol);
    double im = q.integrate([&](double u) { return f(u, true); }, tol);
    return kEmPi4 / kPi * cplx(re, im);
}

cplx gfi(double c, double b) {
    if (!(c >= 0) || !(b >= 0)) throw DomainError("gfi: arguments must be >= 0");
    return fresnel_transition(c) * fresnel_transition(b);
}

cplx gfi_half(double c, double b) {
    if (!(c > 0) || !(b >= 0)) throw DomainError("gfi_half: need c > 0, b >= 0");
    if (b == 0) return 0.0;
    double xi = std::sqrt(c), eta = std::sqrt(b);
    return 2.0 * kPi * kJ * xi * eta * std::exp(kJ * b) * gfi_G(xi, eta / xi);
}

cplx gfi_share_exact(double c, double b) {
    if (b <= 0) return 1.0;
    if (c <= 0) return 0.0;
    return gfi_half(c, b) / (fresnel_transition(c) * fresnel_transition(b));
}

namespace {

// share table over ln c, ln b in [kLo, kHi]; symmetric fill through s(c,b) + s(b,c) = 1
constexpr double kShareLo = -14.0, kShareHi = 14.0, kShareStep = 0.2;
constexpr int kShareN = static_cast<int>((kShareHi - kShareLo) / kShareStep + 0.5) + 1;

const std::vector<cplx>& share_table() {
    static const std::vector<cplx> tab = [] {
        std::vector<cplx> t(kShareN * kShareN);
        for (int i = 0; i < kShareN; ++i) {
            double c = std::exp(kShareLo + i * kShareStep);
            t[i * kShareN + i] = 0.5;
            for (int j = i + 1; j < kShareN; ++j) {
                double b = std::exp(kShareLo + j * kShareStep);
                cplx v = gfi_share_exact(c, b);
                t[i * kShareN + j] = v;
                t[j * kShareN + i] = 1.0 - v;
            }
        }
        return t;
    }();
    return tab;
}

// Catmull-Rom weights for fractional offset f in [0, 1)
void cr_weights(double f, double w[4]) {
    double f2 = f * f, f3 = f2 * f;
    w[0] = -0.5 * f3 + f2 - 0.5 * f;
    w[1] = 1.5 * f3 - 2.5 * f2 + 1.0;
    w[2] = -1.5 * f3 + 2.0 * f2 + 0.5 * f;
    w[3] = 0.5 * f3 - 0.5 * f2;
}

}  // namespace

cplx gfi_share(double c, double b) {
    if (b <= 0) return 1.0;
    if (c <= 0) return 0.0;
    const auto& t = share_table();
    auto coord = [](double v, int& i0, double& f) {
        double x = (std::clamp(std::log(v), kShareLo, kShareHi) - kShareLo) / kShareStep;
        i0 = std::min(static_cast<int>(x), kShareN - 2);
        f = x - i0;
    };
    int i0, j0;
    double fi, fj, wi[4], wj[4];
    coord(c, i0, fi);
    coord(b, j0, fj);
    cr_weights(fi, wi);
    cr_weights(fj, wj);
    cplx acc;
    for (int a = 0; a < 4; ++a) {
        int ii = std::clamp(i0 - 1 + a, 0, kShareN - 1);
        for (int d = 0; d < 4; ++d) {
            int jj = std::clamp(j0 - 1 + d, 0, kShareN - 1);
            acc += wi[a] * wj[d] * t[ii * kShareN + jj];
        }
    }
    return acc;
}

cplx gfi_quadrature(double c, double b) {
    if (!(c >= 0) || !(b >= 0)) throw DomainError("gfi: arguments must be >= 0");
    if (c == 0 || b == 0) return 0.0;
    double xi = std::sqrt(c), eta = std::sqrt(b);
    cplx split = std::exp(-kJ * c) * gfi_G(xi, eta / xi) + std::exp(-kJ * b) * gfi_G(eta, xi / eta);
    return 2.0 * kPi * kJ * xi * eta * std::exp(kJ * (b + c)) * split;
}

void bessel_jy(int nmax, double x, std::vector<double>& J, std::vector<double>& Y) {
    if (!(x > 0)) throw DomainError("bessel_jy: x must be > 0");
    J.assign(nmax + 2, 0.0);
    Y.assign(nmax + 2, 0.0);
    Y[0] = std::cyl_neumann(0.0, x);
    Y[1] = std::cyl_neumann(1.0, x);
    for (int n = 1; n <= nmax; ++n) Y[n + 1] = 2.0 * n / x * Y[n] - Y[n - 1];

    // Miller downward recurrence, normalized with the Wronskian J1 Y0 - J0 Y1 = 2/(pi x)
    int top = std::max(nmax, static_cast<int>(x)) + 30 + static_cast<int>(std::sqrt(40.0 * std::max(nmax, static_cast<int>(x))));
    std::vector<double> r(top + 2, 0.0);
    r[top + 1] = 0.0;
    r[top] = 1e-300;
    for (int n = top; n >= 1; --n) {
        r[n - 1] = 2.0 * n / x * r[n] - r[n + 1];
        if (std::abs(r[n - 1]) > 1e250) {
            for (int k = n - 1; k <= top + 1; ++k) r[k] *= 1e-250;
        }
    }
    double w = r[1] * Y[0] - r[0] * Y[1];
    double scale = 2.0 / (kPi * x) / w;
    for (int n = 0; n <= nmax + 1; ++n) J[n] = r[n] * scale;
}

void spherical_jy(int nmax, double x, std::vector<double>& j, std::vector<double>& y) {
    if (!(x > 0)) throw DomainError("spherical_jy: x must be > 0");
    j.assign(nmax + 2, 0.0);
    y.assign(nmax + 2, 0.0);
    y[0] = -std::cos(x) / x;
    y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
    for (int n = 1; n <= nmax; ++n) y[n + 1] = (2.0 * n + 1.0) / x * y[n] - y[n - 1];

    // downward recurrence normalized by the cross product j_{n+1} y_n - j_n y_{n+1} = 1/x^2
    int top = std::max(nmax, static_cast<int>(x)) + 30 + static_cast<int>(std::sqrt(40.0 * std::max(nmax, static_cast<int>(x))));
    std::vector<double> r(top + 2, 0.0);
    r[top] = 1e-300;
    for (int n = top; n >= 1; --n) {
        r[n - 1] = (2.0 * n + 1.0) / x * r[n] - r[n + 1];
        if (std::abs(r[n - 1]) > 1e250) {
            for (int k = n - 1; k <= top + 1; ++k) r[k] *= 1e-250;
        }
    }
    double w = r[1] * y[0] - r[0] * y[1];
    double scale = 1.0 / (x * x) / w;
    for (int n = 0; n <= nmax + 1; ++n) j[n] = r[n] * scale;
}

}  // namespace vdrt
