#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rfkit/network.hpp"
#include "rfkit/pattern.hpp"

namespace rfkit {

// Envelope correlation per frequency. NaN marks frequencies where the
// formula's denominator vanishes (near-lossless pair); values above 1 are
// kept as-is and reported through warnings, never clamped.
struct EccTrace {
    FrequencySweep sweep;
    std::vector<double> values;
    std::vector<std::string> warnings;
};

// Diversity gain in dB per frequency. -inf where ecc = 1; NaN propagated.
struct DiversityTrace {
    FrequencySweep sweep;
    std::vector<double> db;
};

// Envelope correlation between ports i and j from S-parameters:
// with a=S_ii, b=S_ij, c=S_ji, d=S_jj,
//   ecc = |a*.b + c*.d|^2 / [(1-(|a|^2+|c|^2)) . (1-(|d|^2+|b|^2))]
// Symmetric under swapping i and j and invariant under a common phase
// rotation of all four entries.
EccTrace ecc_from_sparams(const NetworkRecord& record, std::size_t i, std::size_t j);

// dg = 10*log10(10*sqrt(1 - ecc^2))
DiversityTrace diversity_gain(const EccTrace& ecc);
double diversity_gain_db(double ecc);

// Envelope correlation from far fields (both grids must carry complex
// fields on identical axes):
//   |integral(Eti.Etj* + Epi.Epj*)|^2 / (integral |Ei|^2 . integral |Ej|^2)
// with the sin(theta)-weighted trapezoidal quadrature from pattern.hpp.
double ecc_from_farfield(const FarFieldGrid& pat_i, const FarFieldGrid& pat_j);

struct IsolationTrace {
    FrequencySweep sweep;
    std::vector<double> db;  // 20*log10|S_ij|, -inf where S_ij = 0
};

IsolationTrace isolation_db(const NetworkRecord& record, std::size_t i, std::size_t j);

// Worst (least negative) isolation over the sampled frequencies inside the
// given bands; -inf when no sample falls inside.
double band_worst_db(const IsolationTrace& trace, const BandList& bands);

struct PairSummary {
    std::size_t port_i, port_j;     // 0-based
    double worst_isolation_db;
    double max_ecc;                 // NaN if undefined across the whole band
    double min_dg_db;
};

struct BandSummary {
    std::pair<double, double> band_hz;
    std::vector<double> coverage;   // per port: fraction of the band where
                                    // |S_pp| dB stays below the threshold
    std::vector<PairSummary> pairs;
};

// Per-band rollup of the matching criterion, isolation, ECC and DG for the
// given port pairs. An empty pair list means all unordered pairs.
std::vector<BandSummary> mimo_band_summary(
    const NetworkRecord& record, const BandList& bands,
    std::vector<std::pair<std::size_t, std::size_t>> pairs = {}, double threshold_db = -10.0);

std::vector<std::pair<std::size_t, std::size_t>> all_port_pairs(std::size_t order);

}  // namespace rfkit
