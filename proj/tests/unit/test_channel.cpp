// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "xlswipt/channel.hpp"
#include "xlswipt/errors.hpp"

using namespace xlswipt;
using xlswipt::test::user_at;

constexpr double kPi = std::numbers::pi;

TEST_CASE("radiation pattern") {
    CHECK(radiation_pattern(0.0, 1.0) == doctest::Approx(4.0));
    CHECK(radiation_pattern(kPi / 2, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(radiation_pattern(kPi / 3, 2.0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(radiation_pattern(2.0, 2.0) == 0.0);
    CHECK(radiation_pattern(-0.1, 2.0) == 0.0);
}

TEST_CASE("single element on boresight") {
    const auto g = build_array(1, 1, 1, 0.1, 0.025, 0.05, 0);
    const double r = 0.37;
    const auto ch = near_field_channel(g, 0, {0, 0, r}, 2.0);
    REQUIRE(ch.coefficients.size() == 1);
    const auto c = ch.coefficients[0];
    CHECK(std::abs(c) == doctest::Approx(0.1 * std::sqrt(6.0) / (4 * kPi * r)).epsilon(1e-12));
    const std::complex<double> expected = std::polar(1.0, -2 * kPi * r / 0.1);
    CHECK(std::abs(c / std::abs(c) - expected) < 1e-12);
}

TEST_CASE("behind the array gives a zero channel") {
    const auto g = build_array(1, 2, 2, 0.1, 0.025, 0.05, 0);
    const auto ch = near_field_channel(g, 0, {0.3, 0.0, -0.5}, 2.0);
    CHECK(ch.is_zero());
    CHECK_THROWS_AS(mrt_precoder(ch), ZeroChannel);
}

TEST_CASE("user on an element is degenerate") {
    const auto g = build_array(1, 1, 1, 0.1, 0.025, 0.05, 0);
    CHECK_THROWS_AS(near_field_channel(g, 0, {0, 0, 0}, 2.0), DegenerateDistance);
}

TEST_CASE("amplitude scales as one over distance") {
    const auto g = build_array(1, 4, 4, 0.1, 0.025, 0.05, 0);
    const Position3D dir{0.2, -0.1, 0.9};
    for (double r : {0.5, 1.3}) {
        const Position3D p1{dir.x * r, dir.y * r, dir.z * r};
        const Position3D p2{dir.x * 2 * r, dir.y * 2 * r, dir.z * 2 * r};
        const auto a = near_field_channel(g, 0, p1, 2.0);
        const auto b = near_field_channel(g, 0, p2, 2.0);
        CHECK(b.norm() == doctest::Approx(a.norm() / 2).epsilon(1e-12));
        // constant magnitude across the subarray
        for (const auto& c : a.coefficients) {
            CHECK(std::abs(c) == doctest::Approx(std::abs(a.coefficients[0])).epsilon(1e-12));
        }
    }
}

TEST_CASE("phase differences follow path lengths") {
    const auto g = build_array(1, 3, 2, 0.1, 0.025, 0.05, 0);
    const Position3D p{0.3, 0.2, 0.8};
    const auto ch = near_field_channel(g, 0, p, 2.0);
    const auto& e = g.element_positions[0];
    for (std::size_t i = 1; i < e.size(); ++i) {
        const double dd = distance(p, e[i]) - distance(p, e[0]);
        const auto ratio = ch.coefficients[i] / ch.coefficients[0];
        const auto expected = std::polar(1.0, -2 * kPi * dd / 0.1);
        CHECK(std::abs(ratio - expected) < 1e-10);
    }
}

TEST_CASE("mrt precoder") {
    ChannelVector g;
    g.coefficients = {{1, 0}, {0, 0}, {0, 0}};
    const auto w = mrt_precoder(g);
    CHECK(std::abs(w[0] - std::complex<double>(1, 0)) < 1e-15);
    CHECK(std::abs(w[1]) == 0.0);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    ChannelVector h;
    for (int i = 0; i < 8; ++i) {
        h.coefficients.emplace_back(n(rng), n(rng));
    }
    ChannelVector h3 = h;
    for (auto& c : h3.coefficients) {
        c *= 3.7;
    }
    const auto w1 = mrt_precoder(h);
    const auto w3 = mrt_precoder(h3);
    double norm = 0;
    for (std::size_t i = 0; i < w1.size(); ++i) {
        CHECK(std::abs(w1[i] - w3[i]) < 1e-14);
        norm += std::norm(w1[i]);
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));
    const auto own = beam_gain(h.coefficients, w1);
    CHECK(own.real() == doctest::Approx(h.norm()).epsilon(1e-12));
    CHECK(std::abs(own.imag()) < 1e-12);
}

namespace {

std::vector<User> three_users() {
    return {user_at(-0.3, 0.1, 0.9), user_at(0.4, -0.2, 1.1), user_at(0.05, 0.02, 0.15, Role::EH)};
}

}  // namespace

TEST_CASE("single subarray cross table collapses to direct") {
    const auto g = build_array(1, 4, 2, 0.1, 0.025, 0.05, 0);
    std::vector<User> users = three_users();
    const auto t = compute_gain_tables(g, users, 2.0, {1e-11, 1e-11});
    for (std::size_t j = 0; j < 3; ++j) {
        const auto c = t.cross(0, 0, 0, j);
        CHECK(c.real() == doctest::Approx(t.direct(0, 2, j)).epsilon(1e-12));
        CHECK(std::abs(c.imag()) <= 1e-12 * t.direct(0, 2, j) + 1e-300);
    }
}

TEST_CASE("masked pair zeroes its row and column") {
    const auto g = build_array(2, 2, 2, 0.1, 0.025, 0.05, 0);
    std::vector<User> users = three_users();
    users[1].visible = {true, false};
    const auto t = compute_gain_tables(g, users, 2.0, {1e-11, 1e-11});
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(t.direct(1, 1, j) == 0.0);
        CHECK(t.direct(1, j, 1) == 0.0);
    }
    CHECK(t.direct(0, 1, 1) > 0.0);
}

TEST_CASE("gain tables match raw inner products") {
    const auto g = build_array(2, 2, 2, 0.1, 0.025, 0.05, 0.02);
    std::vector<User> users = {user_at(-0.2, 0.3, 0.7), user_at(0.25, 0.1, 0.4, Role::EH)};
    const auto t = compute_gain_tables(g, users, 2.0, {2e-11});
    std::vector<std::vector<ChannelVector>> ch(2);
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t k = 0; k < 2; ++k) {
            ch[s].push_back(near_field_channel(g, s, users[k].position, 2.0, k));
        }
    }
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(t.norm_sq(s, k) == doctest::Approx(ch[s][k].norm() * ch[s][k].norm()).epsilon(1e-12));
            CHECK(t.direct(s, k, k) == doctest::Approx(t.norm_sq(s, k)).epsilon(1e-12));
            for (std::size_t j = 0; j < 2; ++j) {
                std::complex<double> c{};
                const double nj = ch[s][j].norm();
                for (std::size_t i = 0; i < 4; ++i) {
                    c += ch[s][k].coefficients[i] * std::conj(ch[s][j].coefficients[i] / nj);
                }
                CHECK(t.direct(s, k, j) == doctest::Approx(std::norm(c)).epsilon(1e-12));
                CHECK(t.direct(s, k, j) <= t.direct(s, k, k) * (1 + 1e-12));
            }
        }
    }
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t sp = 0; sp < 2; ++sp) {
            for (std::size_t j = 0; j < 2; ++j) {
                const auto a = t.cross(s, sp, 0, j);
                const auto b = t.cross(sp, s, 0, j);
                // Hermitian pair: the real parts agree
                CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-12));
                const auto expected = t.coupling(s, 1, j) * std::conj(t.coupling(sp, 1, j));
                CHECK(std::abs(a - expected) <= 1e-12 * std::abs(expected) + 1e-300);
            }
        }
    }
}
