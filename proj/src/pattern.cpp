#include "rfkit/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rfkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

void check_axis(const std::vector<double>& vals, double lo, double hi, bool hi_open,
                const char* name) {
    if (vals.empty())
        throw ValidationError(std::string(name) + " axis is empty");
    double prev = -std::numeric_limits<double>::infinity();
    for (double v : vals) {
        if (!std::isfinite(v) || v < lo || (hi_open ? v >= hi : v > hi))
            throw ValidationError(std::string(name) + " samples must lie in [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) +
                                  (hi_open ? ")" : "]"));
        if (v <= prev)
            throw ValidationError(std::string(name) + " samples must be strictly ascending");
        prev = v;
    }
}

double db10(double linear) {
    if (linear == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(linear);
}

}  // namespace

FarFieldGrid FarFieldGrid::from_gain(std::vector<double> theta_deg, std::vector<double> phi_deg,
                                     Eigen::MatrixXd gain_linear) {
    check_axis(theta_deg, 0.0, 180.0, false, "theta");
    check_axis(phi_deg, 0.0, 360.0, true, "phi");
    if (theta_deg.size() < 2)
        throw ValidationError("grid needs at least two theta samples");
    if (gain_linear.rows() != static_cast<Eigen::Index>(theta_deg.size()) ||
        gain_linear.cols() != static_cast<Eigen::Index>(phi_deg.size()))
        throw ValidationError("gain matrix shape does not match the grid axes");
    for (Eigen::Index i = 0; i < gain_linear.size(); ++i) {
        double v = gain_linear.data()[i];
        if (!std::isfinite(v) || v < 0.0)
            throw ValidationError("gain values must be finite and nonnegative");
    }
    FarFieldGrid g;
    g.theta_deg_ = std::move(theta_deg);
    g.phi_deg_ = std::move(phi_deg);
    g.gain_ = std::move(gain_linear);
    return g;
}

FarFieldGrid FarFieldGrid::from_fields(std::vector<double> theta_deg, std::vector<double> phi_deg,
                                       Eigen::MatrixXcd e_theta, Eigen::MatrixXcd e_phi) {
    check_axis(theta_deg, 0.0, 180.0, false, "theta");
    check_axis(phi_deg, 0.0, 360.0, true, "phi");
    if (theta_deg.size() < 2)
        throw ValidationError("grid needs at least two theta samples");
    auto rows = static_cast<Eigen::Index>(theta_deg.size());
    auto cols = static_cast<Eigen::Index>(phi_deg.size());
    if (e_theta.rows() != rows || e_theta.cols() != cols || e_phi.rows() != rows ||
        e_phi.cols() != cols)
        throw ValidationError("field matrix shape does not match the grid axes");
    auto all_finite = [](const Eigen::MatrixXcd& m) {
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            Complex v = m.data()[i];
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        }
        return true;
    };
    if (!all_finite(e_theta) || !all_finite(e_phi))
        throw ValidationError("field values must be finite");
    FarFieldGrid g;
    g.theta_deg_ = std::move(theta_deg);
    g.phi_deg_ = std::move(phi_deg);
    g.has_fields_ = true;
    g.e_theta_ = std::move(e_theta);
    g.e_phi_ = std::move(e_phi);
    return g;
}

const Eigen::MatrixXd& FarFieldGrid::gain() const {
    if (has_fields_)
        throw ValidationError("grid holds complex fields, not gain");
    return gain_;
}

const Eigen::MatrixXcd& FarFieldGrid::e_theta() const {
    if (!has_fields_)
        throw ValidationError("grid holds gain, not complex fields");
    return e_theta_;
}

const Eigen::MatrixXcd& FarFieldGrid::e_phi() const {
    if (!has_fields_)
        throw ValidationError("grid holds gain, not complex fields");
    return e_phi_;
}

Eigen::MatrixXd FarFieldGrid::intensity() const {
    if (!has_fields_) return gain_;
    return e_theta_.cwiseAbs2() + e_phi_.cwiseAbs2();
}

bool FarFieldGrid::same_grid(const FarFieldGrid& other) const {
    return theta_deg_ == other.theta_deg_ && phi_deg_ == other.phi_deg_;
}

bool FarFieldGrid::covers_rear() const {
    return theta_deg_.back() > 90.0;
}

bool FarFieldGrid::covers_front() const {
    return theta_deg_.front() < 90.0;
}

Eigen::MatrixXd solid_angle_weights(const FarFieldGrid& grid) {
    const auto& th = grid.theta_deg();
    const auto& ph = grid.phi_deg();
    std::size_t nt = th.size(), np = ph.size();

    std::vector<double> wt(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        double lo = i == 0 ? th[0] : th[i - 1];
        double hi = i + 1 == nt ? th[nt - 1] : th[i + 1];
        wt[i] = 0.5 * (hi - lo) * kDegToRad * std::sin(th[i] * kDegToRad);
    }

    // Periodic trapezoid: the gap after the last sample wraps to the first.
    std::vector<double> wp(np);
    if (np == 1) {
        wp[0] = 2.0 * kPi;
    } else {
        for (std::size_t j = 0; j < np; ++j) {
            double gap_prev = j == 0 ? ph[0] + 360.0 - ph[np - 1] : ph[j] - ph[j - 1];
            double gap_next = j + 1 == np ? ph[0] + 360.0 - ph[np - 1] : ph[j + 1] - ph[j];
            wp[j] = 0.5 * (gap_prev + gap_next) * kDegToRad;
        }
    }

    Eigen::MatrixXd w(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(np));
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < np; ++j)
            w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = wt[i] * wp[j];
    return w;
}

double sphere_measure(const FarFieldGrid& grid) {
    Eigen::MatrixXd w = solid_angle_weights(grid);
    double covered = w.sum();
    double cap_top = 2.0 * kPi * (1.0 - std::cos(grid.theta_deg().front() * kDegToRad));
    double cap_bottom = 2.0 * kPi * (1.0 + std::cos(grid.theta_deg().back() * kDegToRad));
    return covered + cap_top + cap_bottom;
}

Directivity directivity(const FarFieldGrid& grid) {
    Eigen::MatrixXd u = grid.intensity();
    Eigen::MatrixXd w = solid_angle_weights(grid);
    double power = (u.array() * w.array()).sum();
    double u_max = u.maxCoeff();
    if (!(power > 0.0) || !(u_max > 0.0))
        throw ValidationError("pattern has zero integrated power over the grid");
    double d = u_max * sphere_measure(grid) / power;
    return {d, db10(d)};
}

PeakGain peak_gain(const FarFieldGrid& grid) {
    const Eigen::MatrixXd& g = grid.gain();
    double best = -1.0;
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            if (g(i, j) > best) {
                best = g(i, j);
                bi = i;
                bj = j;
            }
    return {db10(best), grid.theta_deg()[static_cast<std::size_t>(bi)],
            grid.phi_deg()[static_cast<std::size_t>(bj)]};
}

EfficiencyRatio efficiency_ratio(double gain_peak_dbi, double directivity_dbi) {
    double value = std::pow(10.0, (gain_peak_dbi - directivity_dbi) / 10.0);
    return {value, value > 1.0};
}

PlaneCut plane_cut(const FarFieldGrid& grid, double phi_deg) {
    double main_phi = std::fmod(phi_deg, 360.0);
    if (main_phi < 0.0) main_phi += 360.0;
    double opp_phi = std::fmod(main_phi + 180.0, 360.0);

    auto find_col = [&](double target) {
        const auto& ph = grid.phi_deg();
        for (std::size_t j = 0; j < ph.size(); ++j)
            if (std::abs(ph[j] - target) < 1e-9) return j;
        std::ostringstream os;
        os << "phi plane " << target << " is not on the grid";
        throw ValidationError(os.str());
    };
    std::size_t col_main = find_col(main_phi);
    std::size_t col_opp = find_col(opp_phi);

    Eigen::MatrixXd u = grid.intensity();
    const auto& th = grid.theta_deg();

    PlaneCut cut;
    cut.phi_deg = main_phi;
    for (std::size_t k = th.size(); k-- > 0;) {
        if (th[k] == 0.0) continue;  // the pole belongs to the positive half
        cut.angle_deg.push_back(-th[k]);
        cut.value_db.push_back(
            db10(u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(col_opp))));
    }
    for (std::size_t k = 0; k < th.size(); ++k) {
        cut.angle_deg.push_back(th[k]);
        cut.value_db.push_back(
            db10(u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(col_main))));
    }
    return cut;
}

double back_lobe_level_dbi(const FarFieldGrid& grid) {
    const Eigen::MatrixXd& g = grid.gain();
    const auto& th = grid.theta_deg();
    double best = -1.0;
    bool any = false;
    for (std::size_t i = 0; i < th.size(); ++i) {
        if (th[i] <= 90.0) continue;
        any = true;
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            best = std::max(best, g(static_cast<Eigen::Index>(i), j));
    }
    if (!any)
        throw ValidationError("grid has no rear-hemisphere (theta > 90) samples");
    return db10(best);
}

double front_to_back_db(const FarFieldGrid& grid) {
    return peak_gain(grid).dbi - back_lobe_level_dbi(grid);
}

}  // namespace rfkit
