// SPDX-License-Identifier: Apache-2.0
//
// Modular planar array layout and user placement.
//
// The array lies in the z = 0 plane. Subarrays are tiled along x; each one is
// an Nx x Ny grid of elements. Users are placed in front of the array (z > 0).

#ifndef XLSWIPT_GEOMETRY_HPP
#define XLSWIPT_GEOMETRY_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace xlswipt {

struct Position3D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Position3D operator+(Position3D a, Position3D b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Position3D operator-(Position3D a, Position3D b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend bool operator==(const Position3D&, const Position3D&) = default;
};

double distance(const Position3D& a, const Position3D& b);

struct ArrayGeometry {
    std::size_t subarrays = 0;         // S
    std::size_t elements_x = 0;        // Nx
    std::size_t elements_y = 0;        // Ny
    double wavelength = 0.0;           // meters
    double element_dimension = 0.0;    // largest element dimension D, meters
    double element_pitch = 0.0;        // meters
    double subarray_gap = 0.0;         // meters
    std::vector<std::vector<Position3D>> element_positions;  // [S][Ns], x-major
    std::vector<Position3D> subarray_centers;                // [S]

    std::size_t elements_per_subarray() const { return elements_x * elements_y; }
    std::size_t total_elements() const { return subarrays * elements_per_subarray(); }
};

/// Tiles `subarrays` Nx x Ny grids side by side along x, separated by `gap`,
/// with the whole array centered on the origin.
///
/// Throws InvalidGeometry for zero counts, non-positive wavelength or pitch,
/// negative element dimension or gap, or an element larger than its pitch.
ArrayGeometry build_array(std::size_t subarrays, std::size_t nx, std::size_t ny, double wavelength,
                          double element_dimension, double pitch, double gap);

/// 2 D^2 (S Ns) / lambda.
double fraunhofer_array_distance(const ArrayGeometry& geom);

enum class Role { ID, EH };

struct AngularBounds {
    double polar_min = 0.0;        // angle from +z, radians
    double polar_max = 1.0;
    double azimuth_min = 0.0;      // radians
    double azimuth_max = 6.283185307179586;
};

struct VisibilityRegionSpec {
    Role kind = Role::ID;
    Position3D center;
    double r_min = 0.0;
    double r_max = 0.0;
    AngularBounds angles;
    std::optional<std::vector<bool>> subarray_mask;  // length S when present
};

struct User {
    Position3D position;
    Role role = Role::ID;
    std::size_t region = 0;
    std::vector<bool> visible;  // empty means every subarray is visible
};

/// Uniform placement in the spherical-shell sector of each region. ID users
/// are spread round-robin over the ID regions, EH users over the EH regions;
/// the returned list holds the L ID users first, then the M EH users.
///
/// The radial caps are d_FA/10 for ID regions and d_FA/100 for EH regions.
/// Violations, missing regions for a requested role, or a mask of the wrong
/// length throw InvalidScenario.
std::vector<User> sample_users(const std::vector<VisibilityRegionSpec>& regions, std::size_t id_users,
                               std::size_t eh_users, std::size_t subarrays, double fraunhofer_distance,
                               std::uint64_t seed);

/// Radial cap for users of the given role.
double role_distance_cap(Role role, double fraunhofer_distance);

}  // namespace xlswipt

#endif  // XLSWIPT_GEOMETRY_HPP
