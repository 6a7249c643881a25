#include "rfkit/mimo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rfkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string at_freq(double f_hz) {
    std::ostringstream os;
    os.precision(12);
    os << f_hz * 1e-9 << " GHz";
    return os.str();
}

void check_pair(const NetworkRecord& record, std::size_t i, std::size_t j) {
    if (record.order() < 2)
        throw ValidationError("pairwise metrics need a record with at least two ports");
    if (i == j)
        throw ValidationError("port pair must name two distinct ports");
    if (i >= record.order() || j >= record.order())
        throw ValidationError("port index out of range");
}

// Interval intersection length of [lo, hi] with the bands.
double overlap_measure(const BandList& bands, double lo, double hi) {
    double total = 0.0;
    for (const auto& [blo, bhi] : bands.bands())
        total += std::max(0.0, std::min(hi, bhi) - std::max(lo, blo));
    return total;
}

}  // namespace

EccTrace ecc_from_sparams(const NetworkRecord& record, std::size_t i, std::size_t j) {
    check_pair(record, i, j);
    EccTrace out{record.sweep(), {}, {}};
    out.values.reserve(record.points());
    for (std::size_t k = 0; k < record.points(); ++k) {
        const ScatteringMatrix& s = record.at(k);
        Complex a = s(i, i), b = s(i, j), c = s(j, i), d = s(j, j);
        double num = std::norm(std::conj(a) * b + std::conj(c) * d);
        double den = (1.0 - (std::norm(a) + std::norm(c))) * (1.0 - (std::norm(d) + std::norm(b)));
        if (den <= 1e-12) {
            out.values.push_back(kNan);
            out.warnings.push_back("ecc undefined at " + at_freq(record.sweep()[k]) +
                                   ": near-lossless port pair (denominator " +
                                   std::to_string(den) + ")");
            continue;
        }
        double ecc = num / den;
        if (ecc > 1.0)
            out.warnings.push_back("ecc above 1 at " + at_freq(record.sweep()[k]) +
                                   " (non-passive data?)");
        out.values.push_back(ecc);
    }
    return out;
}

double diversity_gain_db(double ecc) {
    if (std::isnan(ecc)) return kNan;
    if (ecc < 0.0 || ecc > 1.0) return kNan;
    if (ecc == 1.0) return -kInf;
    return 10.0 * std::log10(10.0 * std::sqrt(1.0 - ecc * ecc));
}

DiversityTrace diversity_gain(const EccTrace& ecc) {
    DiversityTrace out{ecc.sweep, {}};
    out.db.reserve(ecc.values.size());
    for (double v : ecc.values) out.db.push_back(diversity_gain_db(v));
    return out;
}

double ecc_from_farfield(const FarFieldGrid& pat_i, const FarFieldGrid& pat_j) {
    if (!pat_i.has_fields() || !pat_j.has_fields())
        throw ValidationError("far-field ecc needs complex field payloads");
    if (!pat_i.same_grid(pat_j))
        throw ValidationError("far-field ecc needs both patterns on the same grid");

    Eigen::MatrixXd w = solid_angle_weights(pat_i);
    Complex cross = ((pat_i.e_theta().array() * pat_j.e_theta().array().conjugate() +
                      pat_i.e_phi().array() * pat_j.e_phi().array().conjugate()) *
                     w.array())
                        .sum();
    double power_i = ((pat_i.e_theta().array().abs2() + pat_i.e_phi().array().abs2()) * w.array())
                         .sum();
    double power_j = ((pat_j.e_theta().array().abs2() + pat_j.e_phi().array().abs2()) * w.array())
                         .sum();
    if (!(power_i > 0.0) || !(power_j > 0.0))
        throw ValidationError("far-field ecc undefined for a zero-power pattern");
    return std::norm(cross) / (power_i * power_j);
}

IsolationTrace isolation_db(const NetworkRecord& record, std::size_t i, std::size_t j) {
    check_pair(record, i, j);
    IsolationTrace out{record.sweep(), {}};
    out.db.reserve(record.points());
    for (std::size_t k = 0; k < record.points(); ++k) out.db.push_back(db20(record.at(k)(i, j)));
    return out;
}

double band_worst_db(const IsolationTrace& trace, const BandList& bands) {
    double worst = -kInf;
    for (std::size_t k = 0; k < trace.db.size(); ++k)
        if (bands.contains(trace.sweep[k])) worst = std::max(worst, trace.db[k]);
    return worst;
}

std::vector<std::pair<std::size_t, std::size_t>> all_port_pairs(std::size_t order) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < order; ++i)
        for (std::size_t j = i + 1; j < order; ++j) pairs.emplace_back(i, j);
    return pairs;
}

std::vector<BandSummary> mimo_band_summary(const NetworkRecord& record, const BandList& bands,
                                           std::vector<std::pair<std::size_t, std::size_t>> pairs,
                                           double threshold_db) {
    if (pairs.empty() && record.order() >= 2) pairs = all_port_pairs(record.order());
    for (const auto& [i, j] : pairs) check_pair(record, i, j);

    // Computed once per port / pair, then rolled up per band
    std::vector<BandList> port_bands;
    for (std::size_t p = 0; p < record.order(); ++p)
        port_bands.push_back(extract_bands(record, p, threshold_db));

    std::vector<EccTrace> eccs;
    std::vector<IsolationTrace> isolations;
    for (const auto& [i, j] : pairs) {
        eccs.push_back(ecc_from_sparams(record, i, j));
        isolations.push_back(isolation_db(record, i, j));
    }

    std::vector<BandSummary> out;
    for (const auto& band : bands.bands()) {
        BandSummary row;
        row.band_hz = band;
        double width = band.second - band.first;
        for (std::size_t p = 0; p < record.order(); ++p) {
            double covered = overlap_measure(port_bands[p], band.first, band.second);
            row.coverage.push_back(width > 0.0 ? covered / width
                                               : (port_bands[p].contains(band.first) ? 1.0 : 0.0));
        }
        BandList one({band});
        for (std::size_t q = 0; q < pairs.size(); ++q) {
            PairSummary ps{pairs[q].first, pairs[q].second, band_worst_db(isolations[q], one),
                           kNan, kNan};
            bool any = false;
            for (std::size_t k = 0; k < record.points(); ++k) {
                if (!one.contains(record.sweep()[k])) continue;
                double e = eccs[q].values[k];
                if (std::isnan(e)) continue;
                if (!any) {
                    ps.max_ecc = e;
                    any = true;
                } else {
                    ps.max_ecc = std::max(ps.max_ecc, e);
                }
            }
            if (any) ps.min_dg_db = diversity_gain_db(ps.max_ecc);
            row.pairs.push_back(ps);
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace rfkit
