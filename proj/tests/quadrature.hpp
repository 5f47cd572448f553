// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <limits>

#include "vdrt/vec3.hpp"

namespace vdrt::test {

// F(x) by adaptive quadrature of its defining integral, taken along the ray
// t = sqrt(x) + s e^{-j pi/4}, s >= 0, where the integrand decays like e^{-s^2}.
inline cplx fresnel_transition_quadrature(double x) {
    using boost::math::quadrature::gauss_kronrod;
    const double rx = std::sqrt(x);
    const cplx w = std::polar(1.0, -kPi / 4);
    auto f = [&](double s) { return std::exp(-s * s - 2 * rx * s * std::conj(w)); };
    const double inf = std::numeric_limits<double>::infinity();
    double re = gauss_kronrod<double, 61>::integrate([&](double s) { return f(s).real(); }, 0, inf, 20, 1e-15);
    double im = gauss_kronrod<double, 61>::integrate([&](double s) { return f(s).imag(); }, 0, inf, 20, 1e-15);
    return kJ * 2.0 * rx * w * cplx(re, im);
}

}  // namespace vdrt::test
