#ifndef ISOLAB_BILLIARDS_HPP
#define ISOLAB_BILLIARDS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "isolab/geometry.hpp"

namespace isolab {

struct Ray {
    Vec2 origin{0, 0};
    Vec2 direction{1, 0}; // unit
};

/// Classification of a chord line against the confocal conic family of the
/// base ellipse. mu > b^2 crosses the focal segment, mu < b^2 crosses the
/// major axis at or beyond the foci, mu = b^2 is the separatrix.
enum class CrossingClass { FocalCrossing, Outer, Separatrix };
const char* crossing_name(CrossingClass c);

double caustic_parameter(const EllipseSpec& e, const Vec2& p, const Vec2& q);
CrossingClass classify_mu(const EllipseSpec& e, double mu, double tol = 1e-9);

struct Bounce {
    double s = 0;      // boundary arc-length parameter of the hit
    Vec2 position{0, 0};
    Vec2 incoming{0, 0};
    Vec2 outgoing{0, 0};
    double mu = 0;     // caustic parameter of the incoming chord
    Zone zone = Zone::Arc;
};

struct Trajectory {
    std::vector<Bounce> bounces;
    bool abandoned = false; // grazing / corner-exclusion hit
};

/// First boundary hit of the ray strictly ahead, with specular reflection.
/// Throws GrazingOrCorner for near-tangent hits or corner-disk hits.
Bounce step(const Boundary& boundary, const EllipseSpec& base, const Ray& ray);

Trajectory trace(const Boundary& boundary, const EllipseSpec& base, const Ray& ray,
                 int n_bounces);

struct DichotomyReport {
    int n_traj = 0;
    int n_bounces = 0;
    std::uint64_t seed = 0;
    int violations = 0;       // trajectories visiting both an M and a B bump
    int abandoned = 0;        // corner/grazing, excluded from the verdict
    int visited_m_only = 0;
    int visited_b_only = 0;
    int visited_neither = 0;
    bool pass() const { return violations == 0; }
};

DichotomyReport dichotomy_check(const MushroomPair& pair, int n_traj, int n_bounces,
                                std::uint64_t seed);
DichotomyReport dichotomy_check_domain(const Boundary& boundary, const EllipseSpec& base,
                                       int n_traj, int n_bounces, std::uint64_t seed,
                                       bool serial_reference = false);

struct PeriodicOrbit {
    int n = 0;
    std::vector<double> params;    // canonical form, s_1 minimal
    std::vector<Vec2> vertices;
    double length = 0;
    double grad_residual = 0;      // sup norm of the length gradient
    CrossingClass crossing = CrossingClass::Outer;
};

struct SearchCaps {
    double l_max = 0;
    int n_max = 0;
    int n_starts = 0;
    std::uint64_t seed = 0;
    bool operator==(const SearchCaps&) const = default;
};

struct OrbitSearchResult {
    std::vector<PeriodicOrbit> orbits;
    int non_convergent = 0;
    int rejected = 0; // degenerate / exterior / corner / repetition
};

OrbitSearchResult find_orbits(const Boundary& boundary, const EllipseSpec& base, int n,
                              double l_max, int n_starts, std::uint64_t seed,
                              bool serial_reference = false);

/// Length gradient of the n-tuple of boundary parameters; used both by the
/// search and by the mirror-pairing acceptance check.
std::vector<double> length_gradient(const Boundary& boundary,
                                    const std::vector<double>& params);
double orbit_length(const Boundary& boundary, const std::vector<double>& params);

struct SpectrumEntry {
    double length = 0;
    int multiplicity = 0;
};

struct LengthSpectrum {
    std::vector<SpectrumEntry> entries;
    std::vector<PeriodicOrbit> orbits; // all distinct canonical orbits
    double cluster_tol = 1e-9;
    SearchCaps caps;
};

LengthSpectrum length_spectrum(const Boundary& boundary, const EllipseSpec& base,
                               const SearchCaps& caps);

struct SpectrumMatch {
    bool pass = false;
    double max_gap = 0;
    int unmatched_1 = 0;
    int unmatched_2 = 0;
};

SpectrumMatch compare_spectra(const LengthSpectrum& s1, const LengthSpectrum& s2,
                              double match_tol);

} // namespace isolab

#endif
