#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qoc/field.hpp"
#include "qoc/filters.hpp"

using namespace qoc;
using Catch::Approx;

namespace {

ControlField noise_field(const TimeGrid& tg, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ControlField f(tg, 1);
    for (int i = 0; i < tg.n_steps; ++i) f.at(i) = g(rng);
    return f;
}

double max_diff(const ControlField& a, const ControlField& b) {
    double m = 0.0;
    for (int j = 0; j < a.n_channels(); ++j)
        m = std::max(m, (a.channel(j) - b.channel(j)).cwiseAbs().maxCoeff());
    return m;
}

}  // namespace

TEST_CASE("identity filter is bit-transparent", "[filters]") {
    TimeGrid tg(20.0, 0.05);
    const ControlField f = noise_field(tg, 1);
    const ControlField out = apply_filter(FieldFilter::identity(), f);
    CHECK(max_diff(out, f) == 0.0);
}

TEST_CASE("gaussian pass suppresses out-of-band power", "[filters]") {
    TimeGrid tg(200.0, 0.05);
    // Two exactly-on-bin tones; keep only the lower one.
    const double dw = 2.0 * pi / 200.0;
    const double w1 = 16.0 * dw, w2 = 64.0 * dw;
    ControlField f = ControlField::from_function(tg, [&](double t) {
        return std::sin(w1 * t) + std::sin(w2 * t);
    });
    const ControlField out =
        apply_filter(FieldFilter::gaussian_pass(w1, 500.0), f);
    const FieldSpectrum sp = spectrum(out);
    const double kept = sp.band_power(w1 - 0.1, w1 + 0.1);
    const double rejected = sp.band_power(w2 - 0.5, w2 + 0.5);
    CHECK(kept > 0.9 * spectrum(f).band_power(w1 - 0.1, w1 + 0.1));
    CHECK(rejected < 1e-6 * kept);
}

TEST_CASE("gaussian stop is the exact complement of the pass", "[filters]") {
    TimeGrid tg(50.0, 0.05);
    const ControlField f = noise_field(tg, 2);
    const ControlField pass =
        apply_filter(FieldFilter::gaussian_pass(0.8, 200.0), f);
    const ControlField stop =
        apply_filter(FieldFilter::gaussian_stop(0.8, 200.0), f);
    ControlField sum = pass;
    sum.channel(0) += stop.channel(0);
    CHECK(max_diff(sum, f) < 1e-10);
}

TEST_CASE("band filter is an idempotent projection", "[filters][property]") {
    TimeGrid tg(100.0, 0.1);
    const ControlField f = noise_field(tg, 3);
    const FieldFilter band = FieldFilter::band(0.3, 1.2);
    const ControlField once = apply_filter(band, f);
    const ControlField twice = apply_filter(band, once);
    CHECK(max_diff(once, twice) < 1e-10);
    CHECK_THROWS_AS(FieldFilter::band(2.0, 1.0), Error);
}

TEST_CASE("frequency filters are linear", "[filters][property]") {
    TimeGrid tg(50.0, 0.05);
    const ControlField a = noise_field(tg, 4);
    const ControlField b = noise_field(tg, 5);
    const FieldFilter flt = FieldFilter::gaussian_pass({0.5, 1.5}, 100.0);
    ControlField combo = a;
    combo.channel(0) = 2.0 * a.channel(0) - 3.0 * b.channel(0);
    const ControlField lhs = apply_filter(flt, combo);
    const ControlField fa = apply_filter(flt, a);
    const ControlField fb = apply_filter(flt, b);
    ControlField rhs = fa;
    rhs.channel(0) = 2.0 * fa.channel(0) - 3.0 * fb.channel(0);
    CHECK(max_diff(lhs, rhs) < 1e-10);
}

TEST_CASE("spectral mask matches a direct DFT oracle", "[filters]") {
    // Single on-bin tone scaled by the mask value at its frequency.
    TimeGrid tg(100.0, 0.1);
    const double w0 = 12.0 * 2.0 * pi / 100.0;
    ControlField f = ControlField::from_function(
        tg, [&](double t) { return std::cos(w0 * t); });
    auto mask = [](double w) { return std::exp(-0.3 * w * w); };
    const ControlField out =
        apply_filter(FieldFilter::spectral_mask(mask), f);
    const double expect = mask(w0);
    for (int i = 0; i < tg.n_steps; ++i)
        CHECK(out(i, 0) == Approx(expect * std::cos(w0 * tg.t(i))).margin(1e-9));
}

TEST_CASE("odd masks are rejected", "[filters]") {
    TimeGrid tg(10.0, 0.1);
    const ControlField f = noise_field(tg, 6);
    const FieldFilter odd =
        FieldFilter::spectral_mask([](double w) { return w >= 0 ? 1.0 : 0.5; });
    CHECK_THROWS_AS(apply_filter(odd, f), Error);
}

TEST_CASE("envelope filter shapes in the time domain", "[filters]") {
    TimeGrid tg(10.0, 0.01);
    const ControlField f = ControlField::constant(tg, 1.0);
    const ControlField out = apply_filter(
        FieldFilter::envelope([](double t) { return std::sin(pi * t / 10.0); }),
        f);
    for (int i = 0; i < tg.n_steps; i += 37)
        CHECK(out(i, 0) == Approx(std::sin(pi * tg.t(i) / 10.0)).margin(1e-14));
    const FieldFilter neg = FieldFilter::envelope([](double) { return -1.0; });
    CHECK_THROWS_AS(apply_filter(neg, f), Error);
}

TEST_CASE("phase-only shaping keeps phases and imposes magnitudes",
          "[filters][property]") {
    TimeGrid tg(50.0, 0.05);
    const int n = tg.n_steps;
    const ControlField f = noise_field(tg, 7);
    auto amplitude = [](double w) { return std::exp(-2.0 * (std::abs(w) - 1.0) *
                                                    (std::abs(w) - 1.0)); };
    const ControlField out =
        apply_filter(FieldFilter::phase_only(amplitude), f);

    const FieldSpectrum before = spectrum(f);
    const FieldSpectrum after = spectrum(out);
    for (int m = 0; m < n; ++m) {
        // Magnitude fidelity: |eps(w)| equals the imposed dt-scaled amplitude.
        CHECK(std::abs(std::abs(after.values[m]) - amplitude(after.omega[m])) <
              1e-8);
        // Phase fidelity: the output bin is the imposed amplitude carried on
        // the input phase (meaningful only where the input is non-silent).
        if (std::abs(before.values[m]) > 1e-6) {
            const Complex pb = before.values[m] / std::abs(before.values[m]);
            CHECK(std::abs(after.values[m] - amplitude(after.omega[m]) * pb) <
                  1e-8);
        }
    }
    const FieldFilter bad = FieldFilter::phase_only([](double) { return -1.0; });
    CHECK_THROWS_AS(apply_filter(bad, f), Error);
}

TEST_CASE("chains compose left to right", "[filters]") {
    TimeGrid tg(50.0, 0.05);
    const ControlField f = noise_field(tg, 8);
    const FieldFilter g1 = FieldFilter::band(0.2, 1.5);
    const FieldFilter g2 =
        FieldFilter::envelope([](double t) { return t / 50.0; });
    const ControlField chained =
        apply_filter(FieldFilter::chain({g1, g2}), f);
    const ControlField manual = apply_filter(g2, apply_filter(g1, f));
    CHECK(max_diff(chained, manual) == 0.0);
    // Order matters: envelope-then-band differs from band-then-envelope.
    const ControlField reversed =
        apply_filter(FieldFilter::chain({g2, g1}), f);
    CHECK(max_diff(chained, reversed) > 1e-6);
}

TEST_CASE("filters treat each polarization channel independently", "[filters]") {
    TimeGrid tg(20.0, 0.05);
    ControlField f(tg, 2);
    f.channel(0) = noise_field(tg, 9).channel(0);
    f.channel(1) = noise_field(tg, 10).channel(0);
    const FieldFilter flt = FieldFilter::gaussian_pass(0.7, 50.0);
    const ControlField out = apply_filter(flt, f);
    ControlField only0(tg, 1), only1(tg, 1);
    only0.channel(0) = f.channel(0);
    only1.channel(0) = f.channel(1);
    CHECK((apply_filter(flt, only0).channel(0) - out.channel(0))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK((apply_filter(flt, only1).channel(0) - out.channel(1))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
}

TEST_CASE("filter parameter validation", "[filters]") {
    CHECK_THROWS_AS(FieldFilter::gaussian_pass(0.5, -1.0), Error);
    CHECK_THROWS_AS(FieldFilter::gaussian_stop(0.5, 0.0), Error);
}
