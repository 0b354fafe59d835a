// SPDX-License-Identifier: Apache-2.0

#include "xlswipt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "xlswipt/errors.hpp"

namespace xlswipt {

double distance(const Position3D& a, const Position3D& b) {
    const Position3D d = a - b;
    return std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
}

ArrayGeometry build_array(std::size_t subarrays, std::size_t nx, std::size_t ny, double wavelength,
                          double element_dimension, double pitch, double gap) {
    if (subarrays == 0 || nx == 0 || ny == 0) {
        throw InvalidGeometry("subarray and element counts must be at least 1");
    }
    if (!(wavelength > 0.0) || !(pitch > 0.0)) {
        throw InvalidGeometry("wavelength and element pitch must be positive");
    }
    if (!(element_dimension >= 0.0) || !(gap >= 0.0)) {
        throw InvalidGeometry("element dimension and subarray gap must be non-negative");
    }
    if (element_dimension > pitch) {
        throw InvalidGeometry("element dimension exceeds element pitch");
    }

    ArrayGeometry g;
    g.subarrays = subarrays;
    g.elements_x = nx;
    g.elements_y = ny;
    g.wavelength = wavelength;
    g.element_dimension = element_dimension;
    g.element_pitch = pitch;
    g.subarray_gap = gap;

    const double stride = static_cast<double>(nx) * pitch + gap;
    const double x_mid = 0.5 * static_cast<double>(subarrays - 1);
    const double ix_mid = 0.5 * static_cast<double>(nx - 1);
    const double iy_mid = 0.5 * static_cast<double>(ny - 1);

    g.element_positions.resize(subarrays);
    g.subarray_centers.resize(subarrays);
    for (std::size_t s = 0; s < subarrays; ++s) {
        const double cx = (static_cast<double>(s) - x_mid) * stride;
        auto& elems = g.element_positions[s];
        elems.reserve(nx * ny);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (std::size_t iy = 0; iy < ny; ++iy) {
                elems.push_back({cx + (static_cast<double>(ix) - ix_mid) * pitch,
                                 (static_cast<double>(iy) - iy_mid) * pitch, 0.0});
            }
        }
        Position3D sum;
        for (const auto& p : elems) {
            sum = sum + p;
        }
        const double n = static_cast<double>(elems.size());
        g.subarray_centers[s] = {sum.x / n, sum.y / n, 0.0};
    }
    return g;
}

double fraunhofer_array_distance(const ArrayGeometry& geom) {
    const double d = geom.element_dimension;
    return 2.0 * d * d * static_cast<double>(geom.total_elements()) / geom.wavelength;
}

double role_distance_cap(Role role, double fraunhofer_distance) {
    return role == Role::ID ? fraunhofer_distance / 10.0 : fraunhofer_distance / 100.0;
}

namespace {

const char* role_name(Role r) { return r == Role::ID ? "ID" : "EH"; }

void validate_region(const VisibilityRegionSpec& region, std::size_t index, std::size_t subarrays,
                     double fraunhofer_distance) {
    const std::string where = "region " + std::to_string(index) + " (" + role_name(region.kind) + ")";
    if (!(region.r_min > 0.0) || !(region.r_min < region.r_max)) {
        throw InvalidScenario(where + ": radial bounds must satisfy 0 < r_min < r_max");
    }
    const double cap = role_distance_cap(region.kind, fraunhofer_distance);
    if (region.r_max > cap * (1.0 + 1e-12)) {
        throw InvalidScenario(where + ": r_max " + std::to_string(region.r_max) + " m exceeds the " +
                              role_name(region.kind) + " cap " + std::to_string(cap) + " m");
    }
    const auto& a = region.angles;
    if (!(a.polar_min >= 0.0) || !(a.polar_min <= a.polar_max) ||
        !(a.polar_max < 0.5 * std::numbers::pi)) {
        throw InvalidScenario(where + ": polar bounds must lie in [0, pi/2)");
    }
    if (!(a.azimuth_min <= a.azimuth_max)) {
        throw InvalidScenario(where + ": azimuth bounds are inverted");
    }
    if (region.center.z < 0.0) {
        throw InvalidScenario(where + ": center lies behind the array plane");
    }
    if (region.subarray_mask) {
        const auto& mask = *region.subarray_mask;
        if (mask.size() != subarrays) {
            throw InvalidScenario(where + ": subarray mask length differs from S");
        }
        bool any = false;
        for (bool b : mask) {
            any = any || b;
        }
        if (!any) {
            throw InvalidScenario(where + ": subarray mask hides every subarray");
        }
    }
}

Position3D draw_in_region(const VisibilityRegionSpec& region, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r3min = region.r_min * region.r_min * region.r_min;
    const double r3max = region.r_max * region.r_max * region.r_max;
    const double r = std::cbrt(r3min + unit(rng) * (r3max - r3min));
    const double cmax = std::cos(region.angles.polar_min);
    const double cmin = std::cos(region.angles.polar_max);
    const double cos_t = cmax - unit(rng) * (cmax - cmin);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi =
        region.angles.azimuth_min + unit(rng) * (region.angles.azimuth_max - region.angles.azimuth_min);
    return region.center + Position3D{r * sin_t * std::cos(phi), r * sin_t * std::sin(phi), r * cos_t};
}

}  // namespace

std::vector<User> sample_users(const std::vector<VisibilityRegionSpec>& regions, std::size_t id_users,
                               std::size_t eh_users, std::size_t subarrays, double fraunhofer_distance,
                               std::uint64_t seed) {
    std::vector<std::size_t> id_regions;
    std::vector<std::size_t> eh_regions;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        validate_region(regions[i], i, subarrays, fraunhofer_distance);
        (regions[i].kind == Role::ID ? id_regions : eh_regions).push_back(i);
    }
    if (id_users > 0 && id_regions.empty()) {
        throw InvalidScenario("ID users requested but no ID visibility region given");
    }
    if (eh_users > 0 && eh_regions.empty()) {
        throw InvalidScenario("EH users requested but no EH visibility region given");
    }

    std::mt19937_64 rng(seed);
    std::vector<User> users;
    users.reserve(id_users + eh_users);
    auto place = [&](Role role, std::size_t count, const std::vector<std::size_t>& pool) {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t r = pool[i % pool.size()];
            User u;
            u.role = role;
            u.region = r;
            u.position = draw_in_region(regions[r], rng);
            if (regions[r].subarray_mask) {
                u.visible = *regions[r].subarray_mask;
            }
            users.push_back(std::move(u));
        }
    };
    place(Role::ID, id_users, id_regions);
    place(Role::EH, eh_users, eh_regions);
    return users;
}

}  // namespace xlswipt
