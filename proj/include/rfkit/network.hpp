#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rfkit/errors.hpp"

namespace rfkit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// Frequency axis in Hz, strictly ascending, all finite and positive.
class FrequencySweep {
public:
    explicit FrequencySweep(std::vector<double> points_hz);

    const std::vector<double>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }

    bool operator==(const FrequencySweep& other) const { return points_ == other.points_; }

private:
    std::vector<double> points_;
};

// n-port scattering matrix at a single frequency. Entries must be finite;
// passivity is a diagnostic, not a construction requirement (measured data
// routinely violates it by rounding).
class ScatteringMatrix {
public:
    explicit ScatteringMatrix(CMatrix entries);

    std::size_t order() const { return static_cast<std::size_t>(entries_.rows()); }
    const CMatrix& entries() const { return entries_; }
    Complex operator()(std::size_t row, std::size_t col) const { return entries_(row, col); }

    double max_singular_value() const;
    bool is_passive(double tol = 1e-9) const { return max_singular_value() <= 1.0 + tol; }

private:
    CMatrix entries_;
};

// A frequency sweep of scattering matrices with per-port reference
// impedances and free-form provenance metadata. The toolkit's common
// currency for S-parameter data.
class NetworkRecord {
public:
    NetworkRecord(FrequencySweep sweep, std::vector<ScatteringMatrix> matrices,
                  std::vector<double> z_ref,
                  std::map<std::string, std::string> metadata = {});

    const FrequencySweep& sweep() const { return sweep_; }
    const std::vector<ScatteringMatrix>& matrices() const { return matrices_; }
    const ScatteringMatrix& at(std::size_t i) const { return matrices_[i]; }
    const std::vector<double>& z_ref() const { return z_ref_; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }
    std::size_t order() const { return matrices_.front().order(); }
    std::size_t points() const { return sweep_.size(); }

    // Per-frequency trace of one matrix entry.
    std::vector<Complex> entry_trace(std::size_t row, std::size_t col) const;

private:
    FrequencySweep sweep_;
    std::vector<ScatteringMatrix> matrices_;
    std::vector<double> z_ref_;
    std::map<std::string, std::string> metadata_;
};

// Disjoint, sorted list of (f_lo, f_hi) frequency bands in Hz.
class BandList {
public:
    BandList() = default;
    explicit BandList(std::vector<std::pair<double, double>> bands);

    const std::vector<std::pair<double, double>>& bands() const { return bands_; }
    std::size_t size() const { return bands_.size(); }
    bool empty() const { return bands_.empty(); }
    bool contains(double freq_hz) const;

private:
    std::vector<std::pair<double, double>> bands_;
};

// (1 + g) / (1 - g) for a reflection magnitude g in [0, 1).
// Throws a ValidationError outside that domain (total reflection is unbounded).
double vswr(double gamma_mag);

// 20*log10(|s11|), signed. |s11| = 0 returns -infinity.
double return_loss_db(Complex s11);

// Magnitude of z in dB; -infinity for zero. Shared by several modules.
double db20(Complex z);

// Maximal contiguous intervals where 20*log10(|S_pp|) < threshold_db.
// Interval endpoints are located by linear interpolation of the dB trace
// between adjacent samples. A trace that never dips below the threshold
// yields an empty list.
BandList extract_bands(const NetworkRecord& record, std::size_t port,
                       double threshold_db = -10.0);

// Z = Z0^(1/2) (I + S)(I - S)^(-1) Z0^(1/2), Z0 = diag(z_ref).
// Throws NumericalError with a condition estimate when (I - S) is singular.
CMatrix s_to_z(const ScatteringMatrix& s, const std::vector<double>& z_ref);

// Inverse of s_to_z: S = Z0^(-1/2) (Z - Z0)(Z + Z0)^(-1) Z0^(1/2).
ScatteringMatrix z_to_s(const CMatrix& z, const std::vector<double>& z_ref);

// Cascade of two 2-port networks: per-frequency S -> ABCD, matrix product,
// ABCD -> S. Requires identical sweeps and reference impedances.
NetworkRecord cascade_2port(const NetworkRecord& a, const NetworkRecord& b);

// Component-wise linear interpolation (on Re/Im) onto a new sweep.
// The new sweep must lie within the old sweep's span; extrapolation throws.
NetworkRecord resample(const NetworkRecord& record, const FrequencySweep& new_sweep);

}  // namespace rfkit
