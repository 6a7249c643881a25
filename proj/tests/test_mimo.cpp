#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>

#include "rfkit/errors.hpp"
#include "rfkit/mimo.hpp"
#include "support/helpers.hpp"

using namespace rfkit;
using namespace testsupport;

namespace {

NetworkRecord record_of(const std::vector<CMatrix>& mats, std::vector<double> freqs = {}) {
    if (freqs.empty())
        for (std::size_t k = 0; k < mats.size(); ++k) freqs.push_back(1e9 * (k + 1));
    std::vector<ScatteringMatrix> s;
    for (const auto& m : mats) s.emplace_back(m);
    std::vector<double> z_ref(static_cast<std::size_t>(mats.front().rows()), 50.0);
    return NetworkRecord(FrequencySweep(std::move(freqs)), std::move(s), std::move(z_ref));
}

CMatrix two_port(Complex a, Complex b, Complex c, Complex d) {
    CMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

// theta x phi grid of E_theta = f(theta, phi), E_phi = g(theta, phi)
FarFieldGrid fields_on(const std::vector<double>& theta, const std::vector<double>& phi,
                       const std::function<Complex(double, double)>& e_theta,
                       const std::function<Complex(double, double)>& e_phi) {
    Eigen::MatrixXcd et(theta.size(), phi.size()), ep(theta.size(), phi.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
        for (std::size_t j = 0; j < phi.size(); ++j) {
            double t = theta[i] * M_PI / 180.0, p = phi[j] * M_PI / 180.0;
            et(i, j) = e_theta(t, p);
            ep(i, j) = e_phi(t, p);
        }
    return FarFieldGrid::from_fields(theta, phi, std::move(et), std::move(ep));
}

std::vector<double> degrees(double lo, double hi, double step) {
    std::vector<double> v;
    for (double d = lo; d <= hi + 1e-9; d += step) v.push_back(d);
    return v;
}

}  // namespace

TEST_CASE("scattering ECC matches a hand-evaluated case") {
    // a = 0.1, b = c = 0.05j, d = -0.1:
    //   conj(a) b + conj(c) d = 0.005j + 0.005j = 0.01j, num = 1e-4
    //   den = (1 - (0.01 + 0.0025))^2 = 0.97515625
    auto rec = record_of({two_port(0.1, Complex(0, 0.05), Complex(0, 0.05), -0.1)});
    auto trace = ecc_from_sparams(rec, 0, 1);
    double num = 1e-4;                    // |0.01j|^2
    double den = 0.9875 * 0.9875;         // (1 - (0.01 + 0.0025))^2
    CHECK(std::abs(trace.values[0] - num / den) < 1e-12);
    CHECK(std::abs(trace.values[0] - 1.0254777e-4) < 1e-9);
    CHECK(trace.warnings.empty());
}

TEST_CASE("uncoupled ports have zero envelope correlation") {
    auto zero = record_of({CMatrix::Zero(2, 2)});
    CHECK(ecc_from_sparams(zero, 0, 1).values[0] == 0.0);

    auto diagonal = record_of({two_port(0.7071, 0.0, 0.0, 0.7071)});
    CHECK(ecc_from_sparams(diagonal, 0, 1).values[0] == 0.0);
}

TEST_CASE("scattering ECC is symmetric in the pair and phase-invariant") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 2 + static_cast<std::size_t>(rng() % 3);
        auto m = random_passive_matrix(rng, n);
        auto rec = record_of({m});
        std::size_t i = rng() % n, j = (i + 1 + rng() % (n - 1)) % n;

        double fwd = ecc_from_sparams(rec, i, j).values[0];
        double rev = ecc_from_sparams(rec, j, i).values[0];
        CHECK(std::abs(fwd - rev) < 1e-14);

        double phase = 2.0 * M_PI * u01(rng);
        auto rotated = record_of({(m * std::polar(1.0, phase)).eval()});
        double rot = ecc_from_sparams(rotated, i, j).values[0];
        CHECK(std::abs(fwd - rot) < 1e-12);
    }
}

TEST_CASE("lossless pair makes the ECC denominator vanish") {
    auto thru = record_of({two_port(0.0, 1.0, 1.0, 0.0)});
    auto trace = ecc_from_sparams(thru, 0, 1);
    CHECK(std::isnan(trace.values[0]));
    CHECK(!trace.warnings.empty());
}

TEST_CASE("non-passive data can push ECC above one and is reported, not clamped") {
    auto bad = record_of({two_port(0.7, 0.65, 0.65, 0.7)});
    auto trace = ecc_from_sparams(bad, 0, 1);
    CHECK(trace.values[0] > 1.0);
    CHECK(std::abs(trace.values[0] - 0.8281 / 0.00765625) < 1e-9);
    CHECK(!trace.warnings.empty());
}

TEST_CASE("ECC pair indices are validated") {
    auto rec = record_of({CMatrix::Zero(2, 2)});
    CHECK_THROWS_AS(ecc_from_sparams(rec, 0, 0), ValidationError);
    CHECK_THROWS_AS(ecc_from_sparams(rec, 0, 2), ValidationError);
}

TEST_CASE("diversity gain anchors") {
    CHECK(diversity_gain_db(0.0) == 10.0);
    CHECK(std::abs(diversity_gain_db(0.5) - 9.375306) < 1e-4);
    CHECK(diversity_gain_db(0.001) < 10.0);
    CHECK(std::abs(diversity_gain_db(0.001) - 10.0) < 1e-5);
    CHECK(std::isinf(diversity_gain_db(1.0)));
    CHECK(diversity_gain_db(1.0) < 0.0);
    CHECK(std::isnan(diversity_gain_db(1.5)));
    CHECK(std::isnan(diversity_gain_db(std::nan(""))));
}

TEST_CASE("diversity gain decreases as correlation grows") {
    double prev = diversity_gain_db(0.0);
    for (int k = 1; k <= 100; ++k) {
        double ecc = 0.0099 * k;  // up to 0.99
        double dg = diversity_gain_db(ecc);
        CHECK(dg < prev);
        prev = dg;
    }
}

TEST_CASE("diversity trace maps an ECC trace pointwise") {
    auto rec = record_of({two_port(0.0, 0.0, 0.0, 0.0), two_port(0.1, Complex(0, 0.05),
                                                                 Complex(0, 0.05), -0.1)});
    auto trace = diversity_gain(ecc_from_sparams(rec, 0, 1));
    CHECK(trace.db[0] == 10.0);
    CHECK(trace.db[1] < 10.0);
    CHECK(trace.sweep.size() == 2);
}

TEST_CASE("far-field ECC of a pattern with itself is one") {
    auto theta = degrees(0.0, 180.0, 5.0);
    auto phi = degrees(0.0, 355.0, 5.0);
    auto pat = fields_on(theta, phi,
                         [](double t, double p) { return Complex(std::cos(t) + 0.3 * std::sin(p), 0.1); },
                         [](double t, double) { return Complex(0.2, 0.4 * std::sin(t)); });
    CHECK(std::abs(ecc_from_farfield(pat, pat) - 1.0) < 1e-12);
}

TEST_CASE("orthogonally polarized patterns decorrelate completely") {
    auto theta = degrees(0.0, 180.0, 5.0);
    auto phi = degrees(0.0, 355.0, 5.0);
    auto pol_theta = fields_on(theta, phi, [](double, double) { return Complex(1.0, 0.0); },
                               [](double, double) { return Complex(0.0, 0.0); });
    auto pol_phi = fields_on(theta, phi, [](double, double) { return Complex(0.0, 0.0); },
                             [](double, double) { return Complex(1.0, 0.0); });
    CHECK(ecc_from_farfield(pol_theta, pol_phi) <= 1e-15);
}

TEST_CASE("odd azimuthal overlap integrates to zero") {
    auto theta = degrees(0.0, 180.0, 3.0);
    auto phi = degrees(0.0, 357.0, 3.0);
    auto even = fields_on(theta, phi, [](double t, double) { return Complex(std::cos(t), 0.0); },
                          [](double, double) { return Complex(0.0, 0.0); });
    auto odd = fields_on(theta, phi,
                         [](double t, double p) { return Complex(std::cos(t) * std::cos(p), 0.0); },
                         [](double, double) { return Complex(0.0, 0.0); });
    CHECK(ecc_from_farfield(even, odd) <= 1e-12);
}

TEST_CASE("azimuthal trig-polynomial overlap is integrated exactly") {
    // E_i = cos(theta), E_j = cos(theta) (0.6 + 0.8 cos(phi)): the shared theta
    // factor cancels between numerator and denominators, and the periodic
    // trapezoid rule is exact for low-order trig polynomials, so
    //   ecc = (1.2 pi)^2 / (2 pi * 1.36 pi) = 9/17
    // on any theta grid with at least a handful of phi samples.
    for (double step : {10.0, 4.0}) {
        auto theta = degrees(0.0, 180.0, step);
        auto phi = degrees(0.0, 360.0 - step, step);
        auto pat_i = fields_on(theta, phi, [](double t, double) { return Complex(std::cos(t), 0.0); },
                               [](double, double) { return Complex(0.0, 0.0); });
        auto pat_j = fields_on(theta, phi,
                               [](double t, double p) {
                                   return Complex(std::cos(t) * (0.6 + 0.8 * std::cos(p)), 0.0);
                               },
                               [](double, double) { return Complex(0.0, 0.0); });
        CHECK(std::abs(ecc_from_farfield(pat_i, pat_j) - 9.0 / 17.0) < 1e-12);
    }
}

TEST_CASE("far-field ECC converges under grid refinement") {
    auto make_pair = [](double step) {
        auto theta = degrees(0.0, 90.0, step);
        auto phi = degrees(0.0, 360.0 - step, step);
        auto pat_i = fields_on(theta, phi,
                               [](double t, double p) {
                                   return Complex(std::cos(t) * (1.0 + 0.3 * std::sin(p)), 0.0);
                               },
                               [](double t, double) { return Complex(0.2 * std::sin(t), 0.0); });
        auto pat_j = fields_on(theta, phi,
                               [](double t, double p) {
                                   return Complex(std::cos(t) * std::cos(t) * (1.0 + 0.5 * std::cos(p)),
                                                  0.0);
                               },
                               [](double, double) { return Complex(0.1, 0.0); });
        return ecc_from_farfield(pat_i, pat_j);
    };
    CHECK(std::abs(make_pair(2.0) - make_pair(1.0)) < 1e-4);
}

TEST_CASE("far-field ECC validates its inputs") {
    auto theta = degrees(0.0, 90.0, 10.0);
    auto phi = degrees(0.0, 350.0, 10.0);
    auto pat = fields_on(theta, phi, [](double t, double) { return Complex(std::cos(t), 0.0); },
                         [](double, double) { return Complex(0.0, 0.0); });

    auto other_grid = fields_on(degrees(0.0, 90.0, 15.0), degrees(0.0, 345.0, 15.0),
                                [](double t, double) { return Complex(std::cos(t), 0.0); },
                                [](double, double) { return Complex(0.0, 0.0); });
    CHECK_THROWS_AS(ecc_from_farfield(pat, other_grid), ValidationError);

    auto dark = fields_on(theta, phi, [](double, double) { return Complex(0.0, 0.0); },
                          [](double, double) { return Complex(0.0, 0.0); });
    CHECK_THROWS_AS(ecc_from_farfield(pat, dark), ValidationError);

    Eigen::MatrixXd gain = Eigen::MatrixXd::Ones(theta.size(), phi.size());
    auto gain_only = FarFieldGrid::from_gain(theta, phi, gain);
    CHECK_THROWS_AS(ecc_from_farfield(pat, gain_only), ValidationError);
}

TEST_CASE("isolation trace is the coupling magnitude in dB") {
    auto rec = record_of({two_port(0.0, 0.01, 0.01, 0.0), two_port(0.0, 0.0, 0.0, 0.0)});
    auto trace = isolation_db(rec, 0, 1);
    CHECK(std::abs(trace.db[0] + 40.0) < 1e-12);
    CHECK(std::isinf(trace.db[1]));
    CHECK(trace.db[1] < 0.0);
}

TEST_CASE("band-worst isolation picks the least negative in-band sample") {
    std::vector<double> freqs;
    std::vector<CMatrix> mats;
    for (int k = 0; k <= 20; ++k) {
        double f = 2.0e9 + 0.1e9 * k;
        // |S21| peaks at 0.0178 at 3 GHz, small elsewhere
        double mag = 0.0178 * std::exp(-std::pow((f - 3e9) / 0.3e9, 2.0));
        freqs.push_back(f);
        mats.push_back(two_port(0.0, mag, mag, 0.0));
    }
    auto trace = isolation_db(record_of(mats, freqs), 0, 1);
    CHECK(std::abs(band_worst_db(trace, BandList({{2.5e9, 3.5e9}})) - (-34.993)) < 0.01);
    CHECK(std::isinf(band_worst_db(trace, BandList({{8e9, 9e9}}))));
}

TEST_CASE("band summary of an ideal decoupled four-port") {
    std::vector<double> freqs = linspace(2.6e9, 4.7e9, 22);
    std::vector<CMatrix> mats;
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        CMatrix m = CMatrix::Zero(4, 4);
        for (int p = 0; p < 4; ++p) m(p, p) = 0.01;  // -40 dB match everywhere
        mats.push_back(m);
    }
    auto rec = record_of(mats, freqs);
    auto summaries = mimo_band_summary(rec, BandList({{2.8e9, 4.5e9}}));
    REQUIRE(summaries.size() == 1);
    const auto& s = summaries[0];
    CHECK(s.band_hz.first == 2.8e9);
    CHECK(s.band_hz.second == 4.5e9);
    REQUIRE(s.coverage.size() == 4);
    for (double c : s.coverage) CHECK(c == 1.0);
    REQUIRE(s.pairs.size() == 6);
    for (const auto& p : s.pairs) {
        CHECK(std::isinf(p.worst_isolation_db));
        CHECK(p.max_ecc == 0.0);
        CHECK(p.min_dg_db == 10.0);
    }
}

TEST_CASE("band summary with no bands is empty") {
    auto rec = record_of({CMatrix::Zero(2, 2)});
    CHECK(mimo_band_summary(rec, BandList()).empty());
}

TEST_CASE("coverage counts the matched fraction of the band") {
    // |S11| = -20 dB over the first half of the band, -3 dB over the second
    std::vector<double> freqs = linspace(1e9, 2e9, 101);
    std::vector<CMatrix> mats;
    for (double f : freqs) {
        CMatrix m = CMatrix::Zero(2, 2);
        double mag = f <= 1.5e9 ? 0.1 : 0.7;
        m(0, 0) = mag;
        m(1, 1) = 0.1;
        mats.push_back(m);
    }
    auto rec = record_of(mats, freqs);
    auto summaries = mimo_band_summary(rec, BandList({{1e9, 2e9}}), {{0, 1}});
    REQUIRE(summaries.size() == 1);
    CHECK(std::abs(summaries[0].coverage[0] - 0.5) < 0.02);
    CHECK(summaries[0].coverage[1] == 1.0);
}

TEST_CASE("explicit pair list narrows the summary") {
    std::vector<double> freqs = {1e9, 2e9};
    std::vector<CMatrix> mats = {CMatrix::Zero(3, 3), CMatrix::Zero(3, 3)};
    auto rec = record_of(mats, freqs);
    auto summaries = mimo_band_summary(rec, BandList({{1e9, 2e9}}), {{0, 2}});
    REQUIRE(summaries.size() == 1);
    REQUIRE(summaries[0].pairs.size() == 1);
    CHECK(summaries[0].pairs[0].port_i == 0);
    CHECK(summaries[0].pairs[0].port_j == 2);
}

TEST_CASE("all_port_pairs enumerates unordered pairs in order") {
    auto pairs = all_port_pairs(4);
    REQUIRE(pairs.size() == 6);
    CHECK(pairs[0].first == 0);
    CHECK(pairs[0].second == 1);
    CHECK(pairs[5].first == 2);
    CHECK(pairs[5].second == 3);
    CHECK(all_port_pairs(1).empty());
}
