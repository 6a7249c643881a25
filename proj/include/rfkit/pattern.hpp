#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rfkit/errors.hpp"

namespace rfkit {

using Complex = std::complex<double>;

// Far-field samples on a complete rectangular (theta, phi) grid. Payload is
// either realized gain (linear power ratio) or a complex (E_theta, E_phi)
// field pair per node. Boresight is +z; theta is measured from it.
// Matrices are indexed (theta row, phi column).
class FarFieldGrid {
public:
    static FarFieldGrid from_gain(std::vector<double> theta_deg, std::vector<double> phi_deg,
                                  Eigen::MatrixXd gain_linear);
    static FarFieldGrid from_fields(std::vector<double> theta_deg, std::vector<double> phi_deg,
                                    Eigen::MatrixXcd e_theta, Eigen::MatrixXcd e_phi);

    bool has_fields() const { return has_fields_; }
    const std::vector<double>& theta_deg() const { return theta_deg_; }
    const std::vector<double>& phi_deg() const { return phi_deg_; }
    const Eigen::MatrixXd& gain() const;
    const Eigen::MatrixXcd& e_theta() const;
    const Eigen::MatrixXcd& e_phi() const;

    // Radiation intensity per node: the gain value directly, or
    // |E_theta|^2 + |E_phi|^2 for field payloads.
    Eigen::MatrixXd intensity() const;

    bool same_grid(const FarFieldGrid& other) const;
    bool covers_rear() const;   // any node with theta > 90
    bool covers_front() const;  // any node with theta < 90

private:
    FarFieldGrid() = default;

    std::vector<double> theta_deg_;
    std::vector<double> phi_deg_;
    bool has_fields_ = false;
    Eigen::MatrixXd gain_;
    Eigen::MatrixXcd e_theta_, e_phi_;
};

// Quadrature weight per node for integrals over the covered solid angle:
// trapezoid in theta times sin(theta), periodic trapezoid in phi. Phi weights
// always sum to 2*pi (a single phi cut integrates as a body of revolution).
Eigen::MatrixXd solid_angle_weights(const FarFieldGrid& grid);

// Solid angle covered by the grid plus the analytic measure of the polar
// caps it omits; equals the quadrature's own measure of the full sphere.
double sphere_measure(const FarFieldGrid& grid);

struct Directivity {
    double linear;
    double dbi;
};

// D = U_max * (sphere measure) / integral of U. Normalizing by the
// quadrature's sphere measure rather than 4*pi cancels the shared
// discretization error, so an isotropic grid gives exactly 1 and D >= 1
// holds for every grid.
Directivity directivity(const FarFieldGrid& grid);

struct PeakGain {
    double dbi;
    double theta_deg;
    double phi_deg;
};

// Maximum gain node; ties broken by smallest theta, then smallest phi.
// Requires a gain payload.
PeakGain peak_gain(const FarFieldGrid& grid);

struct EfficiencyRatio {
    double value;    // 10^((gain_dbi - directivity_dbi)/10)
    bool flagged;    // true when > 1 (data-quality problem, value not clamped)
};

EfficiencyRatio efficiency_ratio(double gain_peak_dbi, double directivity_dbi);

// One polar trace through phi and phi+180: angles in [-180, 180] where
// positive angles walk down the phi half-plane and negative angles the
// phi+180 one. Values in dB (dBi for gain payloads).
struct PlaneCut {
    double phi_deg;
    std::vector<double> angle_deg;
    std::vector<double> value_db;
};

PlaneCut plane_cut(const FarFieldGrid& grid, double phi_deg);

// Maximum gain over the rear hemisphere (theta > 90). Errors when the grid
// has no rear coverage.
double back_lobe_level_dbi(const FarFieldGrid& grid);

double front_to_back_db(const FarFieldGrid& grid);

}  // namespace rfkit
