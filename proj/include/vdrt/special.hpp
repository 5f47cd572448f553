// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <vector>

#include "vdrt/vec3.hpp"

namespace vdrt {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// UTD transition function F(x) = 2j sqrt(x) e^{jx} int_{sqrt x}^inf e^{-j t^2} dt, x >= 0.
cplx fresnel_transition(double x);
// The two evaluation branches, exposed for seam checks.
cplx fresnel_transition_series(double x);
cplx fresnel_transition_cf(double x, int depth = 80);
inline constexpr double kFresnelSeam = 4.0;
// dF/dx
cplx fresnel_transition_deriv(double x);

// G(x, y) = e^{jx^2}/pi int_y^inf e^{-jx^2(1+t^2)}/(1+t^2) dt, x > 0, y >= 0.
cplx gfi_G(double x, double y);

// Two-argument vertex transition. The quarter-plane split of the double Fresnel
// integral gives T(c, b) = F(c) F(b); gfi() uses that product, gfi_quadrature()
// evaluates the split through gfi_G.
cplx gfi(double c, double b);
cplx gfi_quadrature(double c, double b);

// One half of that split: the part owned by the edge with argument c at a corner with
// endpoint argument b. gfi_half(c, b) + gfi_half(b, c) = gfi(c, b).
cplx gfi_half(double c, double b);
// gfi_half(c, b) / gfi(c, b): by quadrature, and from a log-spaced bicubic table.
cplx gfi_share_exact(double c, double b);
cplx gfi_share(double c, double b);

// Integer-order J_n, Y_n for n = 0..nmax at x > 0.
void bessel_jy(int nmax, double x, std::vector<double>& J, std::vector<double>& Y);
// Spherical j_n, y_n for n = 0..nmax at x > 0.
void spherical_jy(int nmax, double x, std::vector<double>& j, std::vector<double>& y);

}  // namespace vdrt
