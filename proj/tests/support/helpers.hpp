#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "rfkit/network.hpp"

namespace testsupport {

using rfkit::Complex;

inline double u01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

inline Complex random_unit_disc(std::mt19937_64& rng, double max_mag) {
    double mag = max_mag * std::sqrt(u01(rng));
    double phase = 2.0 * M_PI * u01(rng);
    return std::polar(mag, phase);
}

// Random n-port scattering matrix with all singular values <= max_sigma,
// i.e. strictly passive by construction.
inline rfkit::CMatrix random_passive_matrix(std::mt19937_64& rng, std::size_t n,
                                            double max_sigma = 0.9) {
    rfkit::CMatrix raw(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                Complex(2.0 * u01(rng) - 1.0, 2.0 * u01(rng) - 1.0);
    Eigen::JacobiSVD<rfkit::CMatrix> svd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd sigma = svd.singularValues();
    double top = sigma.maxCoeff();
    double scale = top > 0 ? max_sigma * u01(rng) / top : 0.0;
    return svd.matrixU() * (sigma * scale).asDiagonal() * svd.matrixV().adjoint();
}

// One-port record whose return-loss trace in dB equals the given values;
// phases are zero, which extract_bands ignores anyway.
inline rfkit::NetworkRecord record_from_db(const std::vector<double>& freqs_hz,
                                           const std::vector<double>& db_values,
                                           double z0 = 50.0) {
    std::vector<rfkit::ScatteringMatrix> mats;
    for (double db : db_values) {
        rfkit::CMatrix m(1, 1);
        m(0, 0) = std::isinf(db) && db < 0 ? 0.0 : std::pow(10.0, db / 20.0);
        mats.emplace_back(m);
    }
    return {rfkit::FrequencySweep(freqs_hz), std::move(mats), {z0}, {}};
}

// Closed-form one-port impedance combinators, the oracle for MNA solves.
using ImpedanceFn = std::function<Complex(double)>;

inline ImpedanceFn z_res(double r) {
    return [r](double) { return Complex(r, 0.0); };
}
inline ImpedanceFn z_ind(double l) {
    return [l](double f) { return Complex(0.0, 2.0 * M_PI * f * l); };
}
inline ImpedanceFn z_cap(double c) {
    return [c](double f) { return Complex(0.0, -1.0 / (2.0 * M_PI * f * c)); };
}
inline ImpedanceFn z_series(ImpedanceFn a, ImpedanceFn b) {
    return [a = std::move(a), b = std::move(b)](double f) { return a(f) + b(f); };
}
inline ImpedanceFn z_parallel(ImpedanceFn a, ImpedanceFn b) {
    return [a = std::move(a), b = std::move(b)](double f) {
        Complex za = a(f), zb = b(f);
        return za * zb / (za + zb);
    };
}
inline Complex s11_of(const ImpedanceFn& z, double f, double z0 = 50.0) {
    return (z(f) - z0) / (z(f) + z0);
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i)
        pts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return pts;
}

}  // namespace testsupport
