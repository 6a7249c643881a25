#include "rfkit/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rfkit {

namespace {

bool finite(double x) { return std::isfinite(x); }
bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string freq_str(double f_hz) {
    std::ostringstream os;
    os.precision(12);
    os << f_hz * 1e-9 << " GHz";
    return os.str();
}

void check_z_ref(const std::vector<double>& z_ref, std::size_t order) {
    if (z_ref.size() != order)
        throw ValidationError("reference impedance count does not match port count");
    for (double z : z_ref) {
        if (!finite(z) || z <= 0.0)
            throw ValidationError("reference impedances must be finite and positive");
    }
}

Eigen::VectorXd sqrt_vec(const std::vector<double>& z_ref) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(z_ref.size()));
    for (std::size_t i = 0; i < z_ref.size(); ++i) v[static_cast<Eigen::Index>(i)] = std::sqrt(z_ref[i]);
    return v;
}

// Solve M X = B via LU, throwing when M is singular or numerically so.
CMatrix lu_solve_checked(const CMatrix& m, const CMatrix& b, const char* what) {
    Eigen::PartialPivLU<CMatrix> lu(m);
    double rcond = lu.rcond();
    if (!(rcond > 1e-15)) {
        double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
        throw NumericalError(std::string(what) + ": matrix is singular to working precision", cond);
    }
    return lu.solve(b);
}

}  // namespace

FrequencySweep::FrequencySweep(std::vector<double> points_hz) : points_(std::move(points_hz)) {
    if (points_.empty())
        throw ValidationError("frequency sweep needs at least one point");
    double prev = 0.0;
    for (double f : points_) {
        if (!finite(f) || f <= 0.0)
            throw ValidationError("sweep frequencies must be finite and positive");
        if (f <= prev)
            throw ValidationError("sweep frequencies must be strictly ascending");
        prev = f;
    }
}

ScatteringMatrix::ScatteringMatrix(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
        throw ValidationError("scattering matrix must be square and non-empty");
    for (Eigen::Index r = 0; r < entries_.rows(); ++r)
        for (Eigen::Index c = 0; c < entries_.cols(); ++c)
            if (!finite(entries_(r, c)))
                throw ValidationError("scattering matrix entries must be finite");
}

double ScatteringMatrix::max_singular_value() const {
    Eigen::JacobiSVD<CMatrix> svd(entries_);
    return svd.singularValues()(0);
}

NetworkRecord::NetworkRecord(FrequencySweep sweep, std::vector<ScatteringMatrix> matrices,
                             std::vector<double> z_ref,
                             std::map<std::string, std::string> metadata)
    : sweep_(std::move(sweep)),
      matrices_(std::move(matrices)),
      z_ref_(std::move(z_ref)),
      metadata_(std::move(metadata)) {
    if (matrices_.size() != sweep_.size())
        throw ValidationError("matrix count does not match sweep point count");
    std::size_t order = matrices_.front().order();
    for (const auto& m : matrices_)
        if (m.order() != order)
            throw ValidationError("all matrices in a record must share one port count");
    check_z_ref(z_ref_, order);
}

std::vector<Complex> NetworkRecord::entry_trace(std::size_t row, std::size_t col) const {
    if (row >= order() || col >= order())
        throw ValidationError("entry index out of range for this record");
    std::vector<Complex> trace;
    trace.reserve(points());
    for (const auto& m : matrices_) trace.push_back(m(row, col));
    return trace;
}

BandList::BandList(std::vector<std::pair<double, double>> bands) : bands_(std::move(bands)) {
    double prev_hi = -std::numeric_limits<double>::infinity();
    for (const auto& [lo, hi] : bands_) {
        if (!finite(lo) || !finite(hi) || lo > hi)
            throw ValidationError("band edges must be finite with lo <= hi");
        if (lo < prev_hi)
            throw ValidationError("bands must be sorted and non-overlapping");
        prev_hi = hi;
    }
}

bool BandList::contains(double freq_hz) const {
    for (const auto& [lo, hi] : bands_)
        if (lo <= freq_hz && freq_hz <= hi) return true;
    return false;
}

double vswr(double gamma_mag) {
    if (!finite(gamma_mag) || gamma_mag < 0.0 || gamma_mag >= 1.0)
        throw ValidationError("reflection magnitude must lie in [0, 1)");
    return (1.0 + gamma_mag) / (1.0 - gamma_mag);
}

double db20(Complex z) {
    double mag = std::abs(z);
    if (mag == 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(mag);
}

double return_loss_db(Complex s11) { return db20(s11); }

BandList extract_bands(const NetworkRecord& record, std::size_t port, double threshold_db) {
    if (port >= record.order())
        throw ValidationError("port index out of range");
    if (!finite(threshold_db))
        throw ValidationError("band threshold must be finite");

    const auto& f = record.sweep().points();
    std::vector<double> level(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        double db = db20(record.at(i)(port, port));
        // A hard zero gives -inf dB; clamp so edge interpolation stays finite.
        level[i] = std::max(db, -400.0);
    }

    std::vector<std::pair<double, double>> bands;
    bool inside = level[0] < threshold_db;
    double lo = inside ? f[0] : 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        bool below = level[i] < threshold_db;
        if (below == inside) continue;
        double cross = f[i - 1] + (threshold_db - level[i - 1]) * (f[i] - f[i - 1]) /
                                      (level[i] - level[i - 1]);
        if (below) {
            lo = cross;
        } else {
            bands.emplace_back(lo, cross);
        }
        inside = below;
    }
    if (inside) bands.emplace_back(lo, f.back());
    return BandList(std::move(bands));
}

CMatrix s_to_z(const ScatteringMatrix& s, const std::vector<double>& z_ref) {
    std::size_t n = s.order();
    check_z_ref(z_ref, n);
    Eigen::VectorXd rz = sqrt_vec(z_ref);
    CMatrix id = CMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    // Z = Z0^(1/2) (I + S)(I - S)^(-1) Z0^(1/2)
    CMatrix inv = lu_solve_checked(id - s.entries(), id, "s_to_z");
    CMatrix z = (id + s.entries()) * inv;
    return rz.asDiagonal() * z * rz.asDiagonal();
}

ScatteringMatrix z_to_s(const CMatrix& z, const std::vector<double>& z_ref) {
    if (z.rows() < 1 || z.rows() != z.cols())
        throw ValidationError("impedance matrix must be square and non-empty");
    std::size_t n = static_cast<std::size_t>(z.rows());
    check_z_ref(z_ref, n);
    Eigen::VectorXd rz = sqrt_vec(z_ref);
    CMatrix zn = rz.cwiseInverse().asDiagonal() * z * rz.cwiseInverse().asDiagonal();
    CMatrix id = CMatrix::Identity(z.rows(), z.cols());
    // S = (Zn - I)(Zn + I)^(-1) with Zn the impedance normalized per port
    CMatrix inv = lu_solve_checked((zn + id).transpose(), (zn - id).transpose(), "z_to_s");
    return ScatteringMatrix(inv.transpose());
}

namespace {

struct Abcd {
    Complex a, b, c, d;
};

Abcd s_to_abcd(const ScatteringMatrix& s, double z01, double z02, double f_hz) {
    Complex s11 = s(0, 0), s12 = s(0, 1), s21 = s(1, 0), s22 = s(1, 1);
    if (std::abs(s21) == 0.0)
        throw NumericalError("cascade is undefined without transmission (s21 = 0 at " +
                             freq_str(f_hz) + ")");
    double r1 = std::sqrt(z01), r2 = std::sqrt(z02);
    Complex den = 2.0 * s21;
    Abcd m;
    m.a = ((1.0 + s11) * (1.0 - s22) + s12 * s21) * (r1 / r2) / den;
    m.b = ((1.0 + s11) * (1.0 + s22) - s12 * s21) * (r1 * r2) / den;
    m.c = ((1.0 - s11) * (1.0 - s22) - s12 * s21) / (r1 * r2) / den;
    m.d = ((1.0 - s11) * (1.0 + s22) + s12 * s21) * (r2 / r1) / den;
    return m;
}

ScatteringMatrix abcd_to_s(const Abcd& m, double z01, double z02, double f_hz) {
    Complex den = m.a * z02 + m.b + m.c * z01 * z02 + m.d * z01;
    if (std::abs(den) == 0.0)
        throw NumericalError("cascade produced a degenerate network at " + freq_str(f_hz));
    double rr = std::sqrt(z01 * z02);
    CMatrix s(2, 2);
    s(0, 0) = (m.a * z02 + m.b - m.c * z01 * z02 - m.d * z01) / den;
    s(1, 0) = 2.0 * rr / den;
    s(0, 1) = 2.0 * (m.a * m.d - m.b * m.c) * rr / den;
    s(1, 1) = (-m.a * z02 + m.b - m.c * z01 * z02 + m.d * z01) / den;
    return ScatteringMatrix(std::move(s));
}

}  // namespace

NetworkRecord cascade_2port(const NetworkRecord& a, const NetworkRecord& b) {
    if (a.order() != 2 || b.order() != 2)
        throw ValidationError("cascade is defined for 2-port networks only");
    if (!(a.sweep() == b.sweep()))
        throw ValidationError("cascade requires identical frequency sweeps");
    if (a.z_ref()[1] != b.z_ref()[0])
        throw ValidationError("cascade requires matching impedance at the joined ports");

    std::vector<ScatteringMatrix> out;
    out.reserve(a.points());
    for (std::size_t i = 0; i < a.points(); ++i) {
        double f = a.sweep()[i];
        Abcd ma = s_to_abcd(a.at(i), a.z_ref()[0], a.z_ref()[1], f);
        Abcd mb = s_to_abcd(b.at(i), b.z_ref()[0], b.z_ref()[1], f);
        Abcd prod{ma.a * mb.a + ma.b * mb.c, ma.a * mb.b + ma.b * mb.d,
                  ma.c * mb.a + ma.d * mb.c, ma.c * mb.b + ma.d * mb.d};
        out.push_back(abcd_to_s(prod, a.z_ref()[0], b.z_ref()[1], f));
    }
    return NetworkRecord(a.sweep(), std::move(out), {a.z_ref()[0], b.z_ref()[1]}, a.metadata());
}

NetworkRecord resample(const NetworkRecord& record, const FrequencySweep& new_sweep) {
    const auto& f = record.sweep().points();
    if (new_sweep.front() < f.front() || new_sweep.back() > f.back())
        throw ValidationError("resample target extends beyond the measured span");

    Eigen::Index n = static_cast<Eigen::Index>(record.order());
    std::vector<ScatteringMatrix> out;
    out.reserve(new_sweep.size());
    for (double fq : new_sweep.points()) {
        auto hi = std::lower_bound(f.begin(), f.end(), fq);
        std::size_t i1 = static_cast<std::size_t>(hi - f.begin());
        if (i1 < f.size() && f[i1] == fq) {
            out.push_back(record.at(i1));
            continue;
        }
        // The span check above guarantees f[i1-1] < fq < f[i1] here.
        std::size_t i0 = i1 - 1;
        double t = (fq - f[i0]) / (f[i1] - f[i0]);
        CMatrix m(n, n);
        m = record.at(i0).entries() + t * (record.at(i1).entries() - record.at(i0).entries());
        out.push_back(ScatteringMatrix(std::move(m)));
    }
    return NetworkRecord(new_sweep, std::move(out), record.z_ref(), record.metadata());
}

}  // namespace rfkit
