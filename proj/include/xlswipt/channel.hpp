// SPDX-License-Identifier: Apache-2.0
//
// Near-field free-space channels, MRT precoders and the scalar coupling
// tables every downstream computation works from.

#ifndef XLSWIPT_CHANNEL_HPP
#define XLSWIPT_CHANNEL_HPP

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "xlswipt/geometry.hpp"

namespace xlswipt {

using cdouble = std::complex<double>;

struct ChannelVector {
    std::vector<cdouble> coefficients;  // Ns entries, element order of ArrayGeometry
    std::size_t subarray = 0;
    std::size_t user = 0;

    double norm() const;
    bool is_zero() const;
};

/// Cosine element pattern: 2(b+1) cos^b(theta) on [0, pi/2], zero elsewhere.
double radiation_pattern(double theta, double boresight_exponent);

/// Spherical-wavefront channel from subarray `s` to `user`.
///
/// The amplitude and the pattern angle use the subarray center; the phase of
/// every entry uses the exact element-to-user distance. Users behind the
/// array plane get an all-zero vector.
///
/// Throws DegenerateDistance if the user coincides with an element or with
/// the subarray center.
ChannelVector near_field_channel(const ArrayGeometry& geom, std::size_t s, const Position3D& user,
                                 double boresight_exponent, std::size_t user_index = 0);

/// Unit-norm MRT precoder w = g / ||g||. Throws ZeroChannel for g = 0.
std::vector<cdouble> mrt_precoder(const ChannelVector& g);

/// g^T w^* for equally sized vectors.
cdouble beam_gain(const std::vector<cdouble>& g, const std::vector<cdouble>& w);

/// Scalar couplings between every (subarray, user, beam) triple.
///
/// Users are indexed 0..K-1 with the L ID users first; EH user m is user L+m.
/// `coupling(s, k, j)` is g_{s,k}^T w^*_{s,j}, the complex amplitude user k
/// receives from the beam subarray s points at user j. Pairs without a
/// usable channel (outside the pattern, or masked by the visibility region)
/// contribute zero both as receiver and as beam target.
struct GainTables {
    std::size_t subarrays = 0;
    std::size_t id_users = 0;
    std::size_t eh_users = 0;
    std::vector<cdouble> couplings;  // [S][K][K]
    std::vector<double> directs;     // [S][K][K], |coupling|^2
    std::vector<cdouble> crosses;    // [S][S][M][K], coupling(s,L+m,j) * conj(coupling(s',L+m,j))
    std::vector<double> channel_norm_sq;  // [S][K], ||g_{s,k}||^2
    std::vector<double> noise_power;      // [L], watts

    std::size_t users() const { return id_users + eh_users; }

    cdouble coupling(std::size_t s, std::size_t k, std::size_t j) const {
        return couplings[(s * users() + k) * users() + j];
    }
    double direct(std::size_t s, std::size_t k, std::size_t j) const {
        return directs[(s * users() + k) * users() + j];
    }
    cdouble cross(std::size_t s, std::size_t sp, std::size_t m, std::size_t j) const {
        return crosses[((s * subarrays + sp) * eh_users + m) * users() + j];
    }
    double norm_sq(std::size_t s, std::size_t k) const { return channel_norm_sq[s * users() + k]; }
};

/// Builds all channels and precoders and reduces them to GainTables.
///
/// `users` must list ID users before EH users. `noise_power` holds one entry
/// per ID user. O(S^2 K^2 + S K^2 Ns).
GainTables compute_gain_tables(const ArrayGeometry& geom, const std::vector<User>& users,
                               double boresight_exponent, const std::vector<double>& noise_power);

/// Row-major text dump: a `# name dims...` header line per table followed by
/// one line per innermost row. Complex values print as `re im` pairs.
void write_gain_tables(std::ostream& os, const GainTables& tables);

}  // namespace xlswipt

#endif  // XLSWIPT_CHANNEL_HPP
