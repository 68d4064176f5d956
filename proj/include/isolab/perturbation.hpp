#ifndef ISOLAB_PERTURBATION_HPP
#define ISOLAB_PERTURBATION_HPP

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "isolab/billiards.hpp"
#include "isolab/geometry.hpp"
#include "isolab/spectral.hpp"

namespace isolab {

/// Nonpositive compactly supported profile f on the bottom segment; the
/// boundary point (x, 0) moves to (x, eps * f(x)).
struct PerturbationSpec {
    std::vector<BumpSpec> bumps; // f(x) = -sum depth * phi((x-center)/half_width)
    double epsilon = 0;          // amplitude used by certify / finite differences
    bool uniform_unit = false;   // validation mode: unit outward displacement of
                                 // the whole boundary (disk scaling-law check)

    double eval(double x) const;
};

PerturbationSpec reflect(const PerturbationSpec& f);

/// Interval J = (x1, x2) strictly inside the right half of the open focal
/// segment, paired with its mirror J~ = (-x2, -x1).
struct SegmentPair {
    double x1 = 0;
    double x2 = 0;
};

/// First-variation rate dlambda/deps = integral (dpsi/dnu)^2 f dsigma over
/// supp f; nonpositive for f <= 0 (the domain grows, the eigenvalue drops).
/// Quadrature: dedicated Gauss panels over supp f (>= 64 nodes per bump)
/// evaluated through the trace's eigenfunction handle.
double hadamard_rate(const BoundaryTrace& trace, const PerturbationSpec& f);

/// Normalized RMS defect of q(x) = (dpsi/dnu)^2(x, 0) against its mirror
/// over n_samples points of J; n_samples >= 16 required.
double evenness_defect(const BoundaryTrace& trace, const SegmentPair& seg,
                       int n_samples);

struct GroundStateOptions {
    MfsOptions mfs;
    int n_trace = 512;     // trace node density target
    double k_window = 0.04; // half-width of the k bracket around the grid estimate
    int n_scan = 20;
};

/// Lowest Dirichlet eigenpair: coarse finite-difference estimate to bracket
/// k, then the collocation solver inside the bracket.
EigenPair ground_state(std::shared_ptr<const Shape> shape,
                       const GroundStateOptions& opt = {});

/// d1 = rate of (Omega, f), d2 = rate of (Omega, reflect(f)); omega must
/// carry no focal bumps. d1 != d2 certifies first-order nonisospectrality.
std::pair<double, double> pair_rates(const DomainSpec& omega, const PerturbationSpec& f,
                                     const GroundStateOptions& opt = {});

struct FdRateReport {
    double hadamard = 0;           // first-variation prediction
    double lambda0 = 0;            // unperturbed eigenvalue
    std::vector<double> eps_list;
    std::vector<double> lambda;    // lambda0(eps)
    std::vector<double> slope;     // (lambda(eps) - lambda0) / eps
    double richardson = 0;         // extrapolated slope at eps = 0
    double rel_deviation = 0;      // |richardson - hadamard| / |hadamard|
    double observed_order = 0;     // convergence order of the slope sequence
    bool nonlinear = false;        // curvature dominates the slope estimate
};

FdRateReport fd_rate_check(const DomainSpec& omega, const PerturbationSpec& f,
                           std::vector<double> eps_list = {},
                           const GroundStateOptions& opt = {});

struct CertifyThresholds {
    double match_tol = 1e-8;   // length-spectrum agreement
    double safety_factor = 5;  // verdict margin over error bars
};

enum class VerdictStatus { Pass, Inconclusive };

struct Certificate {
    double epsilon = 0;
    std::uint64_t seed = 0;
    CertifyThresholds thresholds;
    SearchCaps caps;

    double lambda1 = 0, bar1 = 0;
    double lambda2 = 0, bar2 = 0;
    double d1 = 0, d2 = 0, rate_error = 0;
    double defect = 0; // evenness defect of the unperturbed trace
    SpectrumMatch match;
    double spectrum_max_gap = 0;

    bool lengths_match = false;
    bool spectra_differ = false;
    bool rates_differ = false;
    VerdictStatus status = VerdictStatus::Pass;
    std::vector<std::string> notes;
};

/// Full pipeline on the pair as given: length spectra compared, ground
/// eigenvalues split-tested against error bars, Hadamard rates on the
/// bump-free base split-tested against a resolution-based rate error.
/// eps is recorded and sets the amplitude of the rate-section profile.
Certificate certify(const MushroomPair& pair, double eps, const SearchCaps& caps,
                    const CertifyThresholds& thresholds, std::uint64_t seed,
                    const GroundStateOptions& opt = {});

struct ScanSample {
    BumpSpec bump;
    double d1 = 0, d2 = 0;
    double rel_diff = 0;
};

struct ScanReport {
    std::vector<ScanSample> samples;
    double threshold_rel = 0;
    double fraction = 0; // share of samples with rel_diff > threshold_rel
    std::uint64_t seed = 0;
};

/// Random admissible M bumps against a fixed ground-state trace of omega:
/// center uniform in the left focal half-zone, width and depth log-uniform.
ScanReport genericity_scan(const DomainSpec& omega, int n_samples, std::uint64_t seed,
                           double threshold_rel = 1e-3,
                           const GroundStateOptions& opt = {},
                           bool serial_reference = false);

} // namespace isolab

#endif
