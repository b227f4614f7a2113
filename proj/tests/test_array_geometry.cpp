#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "isac/array_geometry.hpp"

using namespace isac;

namespace {
constexpr double kCarrier = 3.5e9;
const double kLambda = kSpeedOfLight / kCarrier;

double max_phase_error(const std::vector<std::complex<double>>& a,
                       const std::vector<std::complex<double>>& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(std::arg(a[i] * std::conj(b[i]))));
    return worst;
}
} // namespace

TEST_CASE("build_upa basics") {
    SUBCASE("single element degenerate case") {
        const ArrayGeometry g = build_upa(1, 1, 0.5, kCarrier);
        REQUIRE(g.size() == 1);
        CHECK(g.elements[0].norm() == doctest::Approx(0.0));
        CHECK(g.wavelength_m == doctest::Approx(0.0856549874).epsilon(1e-6));
    }

    SUBCASE("4x8 grid at half-wavelength spacing") {
        const ArrayGeometry g = build_upa(4, 8, 0.5, kCarrier);
        REQUIRE(g.size() == 32);
        CHECK((g.elements[1] - g.elements[0]).norm() == doctest::Approx(kLambda / 2).epsilon(1e-12));
        // phase center at the origin
        Vec3 mean;
        for (const Vec3& e : g.elements) mean = mean + e;
        CHECK(mean.norm() / 32.0 < 1e-15);
        CHECK(g.tx_mask == g.rx_mask);
        CHECK(std::all_of(g.tx_mask.begin(), g.tx_mask.end(), [](bool b) { return b; }));
    }

    SUBCASE("2x2 positions enumerated") {
        const ArrayGeometry g = build_upa(2, 2, 0.5, kCarrier);
        const double h = kLambda / 4.0;
        REQUIRE(g.size() == 4);
        CHECK(g.elements[0].x == doctest::Approx(-h));
        CHECK(g.elements[0].z == doctest::Approx(-h));
        CHECK(g.elements[1].x == doctest::Approx(+h));
        CHECK(g.elements[1].z == doctest::Approx(-h));
        CHECK(g.elements[2].x == doctest::Approx(-h));
        CHECK(g.elements[2].z == doctest::Approx(+h));
        CHECK(g.elements[3].x == doctest::Approx(+h));
        CHECK(g.elements[3].z == doctest::Approx(+h));
        // pairwise mirror symmetry about the origin
        for (const Vec3& e : g.elements) {
            const bool mirrored = std::any_of(g.elements.begin(), g.elements.end(), [&](const Vec3& o) {
                return (o + e).norm() < 1e-15;
            });
            CHECK(mirrored);
        }
    }

    SUBCASE("rejects bad arguments") {
        CHECK_THROWS_AS(build_upa(0, 8, 0.5, kCarrier), std::invalid_argument);
        CHECK_THROWS_AS(build_upa(4, 8, -0.5, kCarrier), std::invalid_argument);
        CHECK_THROWS_AS(build_upa(4, 8, 0.5, 0.0), std::invalid_argument);
    }
}

TEST_CASE("build_split_ula basics") {
    SUBCASE("16 elements split 8/8") {
        const ArrayGeometry g = build_split_ula(16, 0.5, kCarrier, 8);
        REQUIRE(g.size() == 16);
        CHECK(g.tx_indices().size() == 8);
        CHECK(g.rx_indices().size() == 8);
        for (std::size_t k = 0; k < 16; ++k) {
            CHECK(g.tx_mask[k] == (k < 8));
            CHECK(g.rx_mask[k] == (k >= 8));
        }
        CHECK(g.aperture_m() == doctest::Approx(15.0 * kLambda / 2.0).epsilon(1e-12));
        CHECK(g.aperture_m() == doctest::Approx(0.642).epsilon(1e-3));

        // Tx phase sub-center: mean of the first 8 element positions.
        Vec3 mean;
        for (std::size_t k = 0; k < 8; ++k) mean = mean + g.elements[k];
        mean = mean * (1.0 / 8.0);
        CHECK(mean.x == doctest::Approx(-2.0 * kLambda).epsilon(1e-12));
        CHECK(mean.y == doctest::Approx(0.0));
        CHECK(mean.z == doctest::Approx(0.0));
    }

    SUBCASE("two-element split sits at +/- lambda/4") {
        const ArrayGeometry g = build_split_ula(2, 0.5, kCarrier, 1);
        CHECK(g.elements[0].x == doctest::Approx(-kLambda / 4).epsilon(1e-12));
        CHECK(g.elements[1].x == doctest::Approx(+kLambda / 4).epsilon(1e-12));
    }

    SUBCASE("rejects bad tx split") {
        CHECK_THROWS_AS(build_split_ula(16, 0.5, kCarrier, 0), std::invalid_argument);
        CHECK_THROWS_AS(build_split_ula(16, 0.5, kCarrier, 16), std::invalid_argument);
    }
}

TEST_CASE("far_field_steering") {
    SUBCASE("boresight gives the all-ones vector") {
        const ArrayGeometry g = build_upa(4, 8, 0.5, kCarrier);
        const auto s = far_field_steering(g, {0.0, 0.0});
        for (const auto& v : s) {
            CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(std::abs(v.imag()) < 1e-14);
        }
    }

    SUBCASE("two-element ULA with 0.5 x-projection") {
        const ArrayGeometry g = build_split_ula(2, 0.5, kCarrier, 1);
        // elevation 0, azimuth 30 deg: u_x = sin(30 deg) = 0.5
        const auto s = far_field_steering(g, {0.0, 30.0});
        const double dphi = std::arg(s[1] * std::conj(s[0]));
        CHECK(dphi == doctest::Approx(kPi / 2).epsilon(1e-12));
    }

    SUBCASE("oracle: elementwise exponential of the geometric dot product") {
        const ArrayGeometry g = build_upa(4, 8, 0.5, kCarrier);
        const double el = 50.0 * kPi / 180.0, az = -20.0 * kPi / 180.0;
        const double ux = std::cos(el) * std::sin(az);
        const double uy = std::cos(el) * std::cos(az);
        const double uz = std::sin(el);
        const auto s = far_field_steering(g, {50.0, -20.0});
        REQUIRE(s.size() == 32);
        for (std::size_t k = 0; k < 32; ++k) {
            CHECK(std::abs(std::abs(s[k]) - 1.0) < 1e-12);
            const double phase =
                2.0 * kPi / kLambda *
                (g.elements[k].x * ux + g.elements[k].y * uy + g.elements[k].z * uz);
            CHECK(std::abs(s[k] - std::polar(1.0, phase)) < 1e-12);
        }
    }

    SUBCASE("angle negation conjugates; reversal conjugates on a centro-symmetric array") {
        const ArrayGeometry g = build_upa(4, 8, 0.5, kCarrier);
        const auto s = far_field_steering(g, {37.0, 61.0});
        const auto s_neg = far_field_steering(g, {-37.0, -61.0});
        for (std::size_t k = 0; k < s.size(); ++k) {
            CHECK(std::abs(s_neg[k] - std::conj(s[k])) < 1e-12);
            CHECK(std::abs(s[s.size() - 1 - k] - std::conj(s[k])) < 1e-12);
        }
    }

    SUBCASE("rejects out-of-range directions") {
        const ArrayGeometry g = build_upa(2, 2, 0.5, kCarrier);
        CHECK_THROWS_AS(far_field_steering(g, {91.0, 0.0}), std::invalid_argument);
        CHECK_THROWS_AS(far_field_steering(g, {0.0, 181.0}), std::invalid_argument);
    }
}

TEST_CASE("near_field_phases") {
    SUBCASE("mirror-symmetric point gives equal entries") {
        const ArrayGeometry g = build_split_ula(2, 0.5, kCarrier, 1);
        const auto s = near_field_phases(g, {{0.0, 3.0, 0.0}});
        CHECK(std::abs(s[0] - s[1]) < 1e-14);
    }

    SUBCASE("hand-evaluated two-distance differential") {
        const ArrayGeometry g = build_split_ula(2, 0.5, kCarrier, 1);
        const auto s = near_field_phases(g, {{0.0, 3.0, 0.0}});
        const double dk = std::sqrt(9.0 + kLambda * kLambda / 16.0);
        const double expected = 2.0 * kPi / kLambda * (3.0 - dk);
        CHECK(std::arg(s[1]) == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("oracle over the 16-element ULA at 3 m / 30 deg") {
        const ArrayGeometry g = build_split_ula(16, 0.5, kCarrier, 8);
        const Vec3 pt{3.0 * std::sin(kPi / 6), 3.0 * std::cos(kPi / 6), 0.0};
        const auto s = near_field_phases(g, {pt});
        REQUIRE(s.size() == 16);
        for (std::size_t k = 0; k < 16; ++k) {
            CHECK(std::abs(std::abs(s[k]) - 1.0) < 1e-12);
            const double dk = (pt - g.elements[k]).norm();
            const double phase = 2.0 * kPi / kLambda * (3.0 - dk);
            CHECK(std::abs(s[k] - std::polar(1.0, phase)) < 1e-12);
        }
    }

    SUBCASE("masked subset keeps element order") {
        const ArrayGeometry g = build_split_ula(16, 0.5, kCarrier, 8);
        const NearFieldPoint pt{{1.0, 2.0, 0.0}};
        const auto all = near_field_phases(g, pt);
        const auto rx = near_field_phases(g, pt, g.rx_indices());
        for (std::size_t i = 0; i < 8; ++i) CHECK(rx[i] == all[8 + i]);
    }

    SUBCASE("coincident point rejected") {
        const ArrayGeometry g = build_split_ula(2, 0.5, kCarrier, 1);
        CHECK_THROWS_AS(near_field_phases(g, {g.elements[0]}), std::invalid_argument);
        CHECK_THROWS_AS(near_field_phases(g, {{0.0, 0.0, 0.0}}), std::invalid_argument);
    }
}

TEST_CASE("near-field phases converge to the far-field steering vector") {
    const ArrayGeometry g = build_split_ula(16, 0.5, kCarrier, 8);
    const FarFieldDirection dir{0.0, 40.0};
    const auto far = far_field_steering(g, dir);
    const Vec3 u = direction_unit_vector(dir);

    double prev = 1e9;
    const double aperture = g.aperture_m();
    const double ranges[] = {5.0, 50.0, 500.0, 5e3, 5e4, 1e6 * aperture};
    double last = 0.0;
    for (double range : ranges) {
        const auto near = near_field_phases(g, {u * range});
        const double err = max_phase_error(near, far);
        CHECK(err < prev);
        prev = err;
        last = err;
    }
    CHECK(last < 1e-3);
}
