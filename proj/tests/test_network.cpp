#include "doctest.h"

#include <cmath>

#include "rfkit/errors.hpp"
#include "rfkit/network.hpp"
#include "support/helpers.hpp"

using namespace rfkit;
using testsupport::linspace;
using testsupport::record_from_db;

TEST_CASE("vswr maps reflection magnitude to standing-wave ratio") {
    CHECK(vswr(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(vswr(1.0 / 3.0) == doctest::Approx(2.0).epsilon(1e-12));
    // the -10 dB matching criterion corresponds to VSWR just under 2
    CHECK(vswr(std::pow(10.0, -10.0 / 20.0)) == doctest::Approx(1.9250).epsilon(1e-4));
    CHECK_THROWS_AS(vswr(-0.1), ValidationError);
    CHECK_THROWS_AS(vswr(1.0), ValidationError);
    CHECK_THROWS_AS(vswr(1.5), ValidationError);
}

TEST_CASE("return loss in dB with a -inf sentinel at zero") {
    CHECK(return_loss_db(Complex(0.1, 0.0)) == doctest::Approx(-20.0).epsilon(1e-12));
    CHECK(return_loss_db(Complex(0.0, 0.0)) == -std::numeric_limits<double>::infinity());
    CHECK(db20(Complex(0.0, 0.01)) == doctest::Approx(-40.0).epsilon(1e-12));
}

TEST_CASE("frequency sweeps must be positive, finite and ascending") {
    CHECK_NOTHROW(FrequencySweep({1e9}));
    CHECK_NOTHROW(FrequencySweep({1e9, 2e9, 3e9}));
    CHECK_THROWS_AS(FrequencySweep({}), ValidationError);
    CHECK_THROWS_AS(FrequencySweep({1e9, 1e9}), ValidationError);
    CHECK_THROWS_AS(FrequencySweep({2e9, 1e9}), ValidationError);
    CHECK_THROWS_AS(FrequencySweep({0.0, 1e9}), ValidationError);
    CHECK_THROWS_AS(FrequencySweep({-1e9, 1e9}), ValidationError);
}

TEST_CASE("scattering matrix passivity via largest singular value") {
    CMatrix half = CMatrix::Identity(2, 2) * Complex(0.5, 0.0);
    CHECK(ScatteringMatrix(half).is_passive());
    CMatrix hot = CMatrix::Identity(2, 2) * Complex(1.2, 0.0);
    CHECK_FALSE(ScatteringMatrix(hot).is_passive());
    CHECK(ScatteringMatrix(hot).max_singular_value() == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("band list rejects unordered or overlapping spans") {
    CHECK_NOTHROW(BandList({{1e9, 2e9}, {3e9, 4e9}}));
    CHECK_THROWS_AS(BandList({{2e9, 1e9}}), ValidationError);
    CHECK_THROWS_AS(BandList({{1e9, 2.5e9}, {2e9, 3e9}}), ValidationError);
    BandList bands({{1e9, 2e9}, {3e9, 4e9}});
    CHECK(bands.contains(1.5e9));
    CHECK_FALSE(bands.contains(2.5e9));
    CHECK(bands.contains(3e9));
}

TEST_CASE("band extraction interpolates the threshold crossings") {
    // V-shaped return loss: -5 dB at 1 GHz, -25 at 2, -5 at 3; the -10 dB
    // crossings sit at 1.25 and 2.75 GHz by straight-line interpolation.
    auto record = record_from_db({1e9, 2e9, 3e9}, {-5.0, -25.0, -5.0});
    BandList bands = extract_bands(record, 0, -10.0);
    REQUIRE(bands.size() == 1);
    CHECK(bands.bands()[0].first == doctest::Approx(1.25e9).epsilon(1e-12));
    CHECK(bands.bands()[0].second == doctest::Approx(2.75e9).epsilon(1e-12));
}

TEST_CASE("band extraction clips at the sweep edges") {
    auto record = record_from_db({1e9, 2e9, 3e9}, {-20.0, -15.0, -12.0});
    BandList bands = extract_bands(record, 0, -10.0);
    REQUIRE(bands.size() == 1);
    CHECK(bands.bands()[0].first == 1e9);
    CHECK(bands.bands()[0].second == 3e9);

    auto nothing = extract_bands(record_from_db({1e9, 2e9}, {-5.0, -7.0}), 0, -10.0);
    CHECK(nothing.empty());
}

TEST_CASE("band extraction tolerates perfect-match points") {
    double neg_inf = -std::numeric_limits<double>::infinity();
    auto record = record_from_db({1e9, 2e9, 3e9}, {-5.0, neg_inf, -5.0});
    BandList bands = extract_bands(record, 0, -10.0);
    REQUIRE(bands.size() == 1);
    // the -inf sample is floored at -400 dB for interpolation
    double f_lo = 1e9 + (-10.0 - -5.0) / (-400.0 - -5.0) * 1e9;
    CHECK(bands.bands()[0].first == doctest::Approx(f_lo).epsilon(1e-12));
}

TEST_CASE("impedance conversion round-trips and hits known anchors") {
    std::vector<double> z_ref = {50.0, 75.0};
    CMatrix zero = CMatrix::Zero(2, 2);
    CMatrix z = s_to_z(ScatteringMatrix(zero), z_ref);
    CHECK(std::abs(z(0, 0) - Complex(50.0, 0.0)) < 1e-9);
    CHECK(std::abs(z(1, 1) - Complex(75.0, 0.0)) < 1e-9);
    CHECK(std::abs(z(0, 1)) < 1e-9);

    ScatteringMatrix back = z_to_s(z, z_ref);
    CHECK(back.entries().cwiseAbs().maxCoeff() < 1e-12);

    CMatrix s(2, 2);
    s << Complex(0.2, 0.1), Complex(0.05, -0.3), Complex(-0.1, 0.02), Complex(0.0, 0.4);
    ScatteringMatrix round = z_to_s(s_to_z(ScatteringMatrix(s), z_ref), z_ref);
    CHECK((round.entries() - s).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("impedance conversion reports singular matrices") {
    CMatrix open = CMatrix::Identity(2, 2);
    try {
        s_to_z(ScatteringMatrix(open), {50.0, 50.0});
        FAIL("expected a numerical error");
    } catch (const NumericalError& e) {
        CHECK(e.condition_estimate() > 1e15);
    }
}

TEST_CASE("cascade through an ideal thru is the identity") {
    auto sweep = FrequencySweep({1e9, 2e9});
    CMatrix thru(2, 2);
    thru << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
    CMatrix x(2, 2);
    x << Complex(0.3, 0.1), Complex(0.6, -0.2), Complex(0.55, 0.25), Complex(-0.1, 0.05);
    NetworkRecord a(sweep, {ScatteringMatrix(thru), ScatteringMatrix(thru)}, {50, 50}, {});
    NetworkRecord b(sweep, {ScatteringMatrix(x), ScatteringMatrix(x)}, {50, 50}, {});
    NetworkRecord out = cascade_2port(a, b);
    for (std::size_t k = 0; k < 2; ++k)
        CHECK((out.at(k).entries() - x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cascade of matched attenuators multiplies their transmissions") {
    auto sweep = FrequencySweep({1e9});
    auto atten = [&](double t) {
        CMatrix m(2, 2);
        m << Complex(0, 0), Complex(t, 0), Complex(t, 0), Complex(0, 0);
        return NetworkRecord(sweep, {ScatteringMatrix(m)}, {50, 50}, {});
    };
    NetworkRecord out = cascade_2port(atten(0.5), atten(0.25));
    CHECK(std::abs(out.at(0)(1, 0) - Complex(0.125, 0.0)) < 1e-12);
    CHECK(std::abs(out.at(0)(0, 0)) < 1e-12);
    CHECK(std::abs(out.at(0)(1, 1)) < 1e-12);
}

TEST_CASE("cascade agrees with a transfer-matrix oracle") {
    auto sweep = FrequencySweep({1e9, 3e9});
    CMatrix sa(2, 2), sb(2, 2);
    sa << Complex(0.2, 0.05), Complex(0.7, 0.1), Complex(0.65, -0.2), Complex(-0.15, 0.1);
    sb << Complex(-0.1, 0.3), Complex(0.5, 0.4), Complex(0.45, 0.35), Complex(0.2, -0.1);
    NetworkRecord a(sweep, {ScatteringMatrix(sa), ScatteringMatrix(sa)}, {50, 50}, {});
    NetworkRecord b(sweep, {ScatteringMatrix(sb), ScatteringMatrix(sb)}, {50, 50}, {});
    NetworkRecord out = cascade_2port(a, b);

    // independent wave-cascade: T = [[1/S21, -S22/S21], [S11/S21, (S12 S21 - S11 S22)/S21]]
    auto to_t = [](const CMatrix& s) {
        CMatrix t(2, 2);
        t(0, 0) = 1.0 / s(1, 0);
        t(0, 1) = -s(1, 1) / s(1, 0);
        t(1, 0) = s(0, 0) / s(1, 0);
        t(1, 1) = (s(0, 1) * s(1, 0) - s(0, 0) * s(1, 1)) / s(1, 0);
        return t;
    };
    CMatrix t = to_t(sa) * to_t(sb);
    Complex s11 = t(1, 0) / t(0, 0);
    Complex s21 = 1.0 / t(0, 0);
    Complex s22 = -t(0, 1) / t(0, 0);
    Complex s12 = (t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0)) / t(0, 0);
    CHECK(std::abs(out.at(0)(0, 0) - s11) < 1e-12);
    CHECK(std::abs(out.at(0)(1, 0) - s21) < 1e-12);
    CHECK(std::abs(out.at(0)(0, 1) - s12) < 1e-12);
    CHECK(std::abs(out.at(0)(1, 1) - s22) < 1e-12);
}

TEST_CASE("cascade rejects mismatched junction impedances and dead links") {
    auto sweep = FrequencySweep({1e9});
    CMatrix thru(2, 2);
    thru << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
    NetworkRecord a(sweep, {ScatteringMatrix(thru)}, {50, 75}, {});
    NetworkRecord b(sweep, {ScatteringMatrix(thru)}, {50, 50}, {});
    CHECK_THROWS_AS(cascade_2port(a, b), ValidationError);

    CMatrix dead = CMatrix::Zero(2, 2);
    NetworkRecord c(sweep, {ScatteringMatrix(dead)}, {50, 50}, {});
    NetworkRecord d(sweep, {ScatteringMatrix(thru)}, {50, 50}, {});
    CHECK_THROWS_AS(cascade_2port(c, d), NumericalError);
}

TEST_CASE("resampling interpolates between grid points") {
    auto record = record_from_db({1e9, 2e9}, {-10.0, -20.0});
    NetworkRecord mid = resample(record, FrequencySweep({1.5e9}));
    double expected = (std::pow(10.0, -10.0 / 20.0) + std::pow(10.0, -20.0 / 20.0)) / 2.0;
    CHECK(std::abs(mid.at(0)(0, 0) - Complex(expected, 0.0)) < 1e-12);

    NetworkRecord hit = resample(record, FrequencySweep({2e9}));
    CHECK(hit.at(0)(0, 0) == record.at(1)(0, 0));

    CHECK_THROWS_AS(resample(record, FrequencySweep({0.5e9})), ValidationError);
    CHECK_THROWS_AS(resample(record, FrequencySweep({2.5e9})), ValidationError);
}

TEST_CASE("network record enforces consistent shapes") {
    auto sweep = FrequencySweep({1e9, 2e9});
    CMatrix one = CMatrix::Zero(1, 1);
    CHECK_THROWS_AS(NetworkRecord(sweep, {ScatteringMatrix(one)}, {50}, {}), ValidationError);
    CMatrix two = CMatrix::Zero(2, 2);
    CHECK_THROWS_AS(
        NetworkRecord(sweep, {ScatteringMatrix(one), ScatteringMatrix(two)}, {50}, {}),
        ValidationError);
    CHECK_THROWS_AS(
        NetworkRecord(sweep, {ScatteringMatrix(one), ScatteringMatrix(one)}, {50, 50}, {}),
        ValidationError);
}
