#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "colwave/family.hpp"
#include "colwave/mollifier.hpp"

namespace colwave {

/// Stencil reaches outside the stored grid.
class StencilError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class UnsupportedScenario : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

/// Ordinary least squares y = slope*x + intercept; r2 = 1 when y is constant.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// |d^alpha u_eps| ~ exp(intercept) * eps^(-slope) near (t, x).
struct GrowthFit {
    double t = 0.0, x = 0.0;
    int order = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
    int n_points = 0;
    double log_range = 0.0;         ///< max - min of log magnitude
    bool degenerate = false;        ///< every magnitude sat at the floor
    bool super_polynomial = false;  ///< slope(last 4) > slope(first 4) + 1
};

/// samples: (eps, magnitude), any order; magnitudes are floored at `floor`.
GrowthFit fit_growth(std::vector<std::pair<double, double>> samples, double floor = 1e-300);

/// Max over nodes within `radius` of x of |d^alpha/dx^alpha u| at the snapshot
/// nearest to t. Fourth-order centered stencils at spacing max(dx, ell/8);
/// orders >= 1 difference the stored ux when present. radius <= 0 means 2*ell.
double local_derivative(const SolutionRecord& rec, double t, double x, int alpha, double radius = 0.0,
                        const std::string& field = "u");

/// Spatial derivative of order alpha at every node of a snapshot; NaN where
/// the stencil does not fit.
std::vector<double> derivative_row(const SolutionRecord& rec, std::size_t snap, int alpha,
                                   const std::string& field = "u");

/// Piecewise-linear curve in the (t, x) plane.
struct RaySegment {
    std::string label;
    std::vector<std::array<double, 2>> vertices;  ///< (t, x)
    /// false for a candidate ray that the theory excludes for this scenario
    bool predicted = true;

    double t_lo() const { return vertices.front()[0]; }
    double t_hi() const { return vertices.back()[0]; }
    /// Euclidean distance in the (t, x) plane.
    double distance(double t, double x) const;
    /// Points spaced by about `spacing` in arc length.
    std::vector<std::array<double, 2>> sample(double spacing) const;
};

enum class GeometryKind { x_jump, t_jump, radial_odd, radial_even };

/// What the predictor needs to know about a scenario.
struct GeometryInput {
    GeometryKind kind = GeometryKind::x_jump;
    double c0 = 1.0;  ///< speed before the jump (x < jump for x_jump, t < jump for t_jump)
    double c1 = 2.0;
    double x0 = -1.0;  ///< x_jump: position of the delta-like datum, left of the interface at 0
    double t_jump = 1.0;
    ScaleKind scale = ScaleKind::standard;
    double t_end = 1.0;
    /// t_jump: which characteristic families carry singular data
    /// (v = u1 - c u0' moves right, w = u1 + c u0' moves left).
    bool right_moving = true;
    bool left_moving = true;
};

/// sqrt(c0/c1) + sqrt(c1/c0).
double jump_condition_value(double c0, double c1);
bool reflected_ray_predicted(double c0, double c1, ScaleKind scale);

/// Predicted singular support as labelled segments. Radial kinds are in (t, |x|).
std::vector<RaySegment> predict_singsupp(const GeometryInput& in);
/// Every ray the geometry could carry, with `predicted` set per the theory;
/// the excluded ones are still measured by classify.
std::vector<RaySegment> candidate_rays(const GeometryInput& in);

struct DetectorConfig {
    int alpha_max = 2;
    double theta = 0.5;
    double r2_min = 0.98;
    /// Magnitudes below noise_rel times the field-wide max of that order count as zero.
    double noise_rel = 1e-9;
    double rho_tube = 0.4;
    /// Lattice probes cover [t_min, t_max] x [x_min, x_max].
    double t_min = 0.2, t_max = 1.0, x_min = -1.0, x_max = 1.0;
    double lattice_dt = 0.1, lattice_dx = 0.1, lattice_radius = 0.05;
    /// Ray probes: spacing along each ray, K radius, and the clearance kept from other rays.
    double ray_spacing = 0.1;
    double ray_radius = 0.2;
    double ray_clearance = 0.6;
    /// Ray probes closer than this to a listed point (e.g. a ray crossing) are skipped.
    std::vector<std::array<double, 2>> exclude_points;
    double exclude_radius = 0.3;
    std::string field = "u";
};

struct PointVerdict {
    int alpha_ref = -1;  ///< -1: no clean fit
    double excess = 0.0;
    bool defined = false;
    bool flagged = false;
};

/// Slope excess of the highest order over the lowest clean order.
PointVerdict classify_point(const std::vector<std::optional<GrowthFit>>& fits, double theta,
                            double r2_min = 0.98);

struct ProbeResult {
    double t = 0.0, x = 0.0, radius = 0.0;
    int ray = -1;  ///< index of the ray a ray probe belongs to
    std::vector<std::optional<GrowthFit>> fits;  ///< order 0..alpha_max; empty when too few samples
    PointVerdict verdict;
    double ray_distance = 0.0;  ///< to the nearest predicted ray
    bool in_tube = false;
};

struct RayStats {
    std::string label;
    int probes = 0;
    int flagged = 0;
    bool predicted = true;
    double min_excess = 0.0, max_excess = 0.0, mean_excess = 0.0;
    double recall() const { return probes ? static_cast<double>(flagged) / probes : 0.0; }
};

struct SingSuppReport {
    std::vector<RaySegment> predicted;
    std::vector<ProbeResult> lattice;
    std::vector<ProbeResult> ray_probes;
    std::vector<RayStats> rays;
    double precision = 1.0;  ///< flagged lattice probes inside tubes / flagged lattice probes
    double recall = 1.0;     ///< flagged probes / probes along predicted rays
    int flagged_outside = 0;
    double max_excess_outside = 0.0;
};

/// Samples the family at lattice and ray probes, fits growth per order and
/// classifies. Tubes, precision and recall use the predicted rays; probes
/// along non-predicted rays are reported in their RayStats only.
SingSuppReport classify(const SolutionFamily& fam, const std::vector<RaySegment>& rays,
                        const DetectorConfig& cfg);

}  // namespace colwave
