// SPDX-License-Identifier: Apache-2.0

#include "xlswipt/channel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>

#include "xlswipt/errors.hpp"

namespace xlswipt {

namespace {
constexpr double kCoincident = 1e-12;
}

double ChannelVector::norm() const {
    double acc = 0.0;
    for (const auto& c : coefficients) {
        acc += std::norm(c);
    }
    return std::sqrt(acc);
}

bool ChannelVector::is_zero() const {
    for (const auto& c : coefficients) {
        if (c != cdouble{}) {
            return false;
        }
    }
    return true;
}

double radiation_pattern(double theta, double boresight_exponent) {
    if (!(theta >= 0.0) || theta > 0.5 * std::numbers::pi) {
        return 0.0;
    }
    // cos(pi/2) is not exactly zero in floating point.
    if (theta == 0.5 * std::numbers::pi) {
        return boresight_exponent == 0.0 ? 2.0 : 0.0;
    }
    return 2.0 * (boresight_exponent + 1.0) * std::pow(std::cos(theta), boresight_exponent);
}

ChannelVector near_field_channel(const ArrayGeometry& geom, std::size_t s, const Position3D& user,
                                 double boresight_exponent, std::size_t user_index) {
    const auto& center = geom.subarray_centers.at(s);
    const auto& elements = geom.element_positions.at(s);

    ChannelVector g;
    g.subarray = s;
    g.user = user_index;
    g.coefficients.assign(elements.size(), cdouble{});

    const double ref = distance(user, center);
    if (ref < kCoincident) {
        throw DegenerateDistance("user coincides with the center of subarray " + std::to_string(s));
    }
    const double theta = std::acos(std::clamp((user.z - center.z) / ref, -1.0, 1.0));
    const double pattern = radiation_pattern(theta, boresight_exponent);

    const double k0 = 2.0 * std::numbers::pi / geom.wavelength;
    const double amp = geom.wavelength / (4.0 * std::numbers::pi * ref) * std::sqrt(pattern);
    for (std::size_t n = 0; n < elements.size(); ++n) {
        const double d = distance(user, elements[n]);
        if (d < kCoincident) {
            throw DegenerateDistance("user coincides with element " + std::to_string(n) + " of subarray " +
                                     std::to_string(s));
        }
        if (amp > 0.0) {
            g.coefficients[n] = std::polar(amp, -k0 * d);
        }
    }
    return g;
}

std::vector<cdouble> mrt_precoder(const ChannelVector& g) {
    const double n = g.norm();
    if (!(n > 0.0)) {
        throw ZeroChannel("zero channel between subarray " + std::to_string(g.subarray) + " and user " +
                          std::to_string(g.user));
    }
    std::vector<cdouble> w(g.coefficients.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = g.coefficients[i] / n;
    }
    return w;
}

cdouble beam_gain(const std::vector<cdouble>& g, const std::vector<cdouble>& w) {
    cdouble acc{};
    for (std::size_t i = 0; i < g.size(); ++i) {
        acc += g[i] * std::conj(w[i]);
    }
    return acc;
}

GainTables compute_gain_tables(const ArrayGeometry& geom, const std::vector<User>& users,
                               double boresight_exponent, const std::vector<double>& noise_power) {
    const std::size_t S = geom.subarrays;
    const std::size_t K = users.size();
    std::size_t L = 0;
    while (L < K && users[L].role == Role::ID) {
        ++L;
    }
    for (std::size_t k = L; k < K; ++k) {
        if (users[k].role != Role::EH) {
            throw InvalidScenario("users must list all ID users before the EH users");
        }
    }
    if (noise_power.size() != L) {
        throw InvalidScenario("noise power must have one entry per ID user");
    }
    const std::size_t M = K - L;

    GainTables t;
    t.subarrays = S;
    t.id_users = L;
    t.eh_users = M;
    t.noise_power = noise_power;
    t.couplings.assign(S * K * K, cdouble{});
    t.directs.assign(S * K * K, 0.0);
    t.crosses.assign(S * S * M * K, cdouble{});
    t.channel_norm_sq.assign(S * K, 0.0);

    for (std::size_t s = 0; s < S; ++s) {
        std::vector<std::vector<cdouble>> g(K);
        std::vector<std::vector<cdouble>> w(K);
        for (std::size_t k = 0; k < K; ++k) {
            const auto& u = users[k];
            const bool masked = !u.visible.empty() && !u.visible.at(s);
            ChannelVector ch = near_field_channel(geom, s, u.position, boresight_exponent, k);
            if (masked || ch.is_zero()) {
                continue;
            }
            w[k] = mrt_precoder(ch);
            t.channel_norm_sq[s * K + k] = ch.norm() * ch.norm();
            g[k] = std::move(ch.coefficients);
        }
        for (std::size_t k = 0; k < K; ++k) {
            if (g[k].empty()) {
                continue;
            }
            for (std::size_t j = 0; j < K; ++j) {
                if (w[j].empty()) {
                    continue;
                }
                const cdouble c = beam_gain(g[k], w[j]);
                t.couplings[(s * K + k) * K + j] = c;
                t.directs[(s * K + k) * K + j] = std::norm(c);
            }
        }
    }
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t sp = 0; sp < S; ++sp) {
            for (std::size_t m = 0; m < M; ++m) {
                for (std::size_t j = 0; j < K; ++j) {
                    t.crosses[((s * S + sp) * M + m) * K + j] =
                        t.coupling(s, L + m, j) * std::conj(t.coupling(sp, L + m, j));
                }
            }
        }
    }
    return t;
}

void write_gain_tables(std::ostream& os, const GainTables& t) {
    const std::size_t S = t.subarrays;
    const std::size_t K = t.users();
    const std::size_t M = t.eh_users;
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << std::setprecision(17);

    os << "# direct " << S << ' ' << K << ' ' << K << '\n';
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t j = 0; j < K; ++j) {
                os << (j ? " " : "") << t.direct(s, k, j);
            }
            os << '\n';
        }
    }
    os << "# cross " << S << ' ' << S << ' ' << M << ' ' << K << " complex\n";
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t sp = 0; sp < S; ++sp) {
            for (std::size_t m = 0; m < M; ++m) {
                for (std::size_t j = 0; j < K; ++j) {
                    const cdouble v = t.cross(s, sp, m, j);
                    os << (j ? " " : "") << v.real() << ' ' << v.imag();
                }
                os << '\n';
            }
        }
    }
    os << "# noise " << t.id_users << '\n';
    for (std::size_t l = 0; l < t.id_users; ++l) {
        os << (l ? " " : "") << t.noise_power[l];
    }
    os << '\n';
    os.flags(flags);
    os.precision(prec);
}

}  // namespace xlswipt
