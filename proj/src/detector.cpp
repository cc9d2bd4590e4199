#include "colwave/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace colwave {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit needs at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit needs distinct abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        sse += r * r;
    }
    f.r2 = syy > 0.0 ? std::max(0.0, 1.0 - sse / syy) : 1.0;
    return f;
}

GrowthFit fit_growth(std::vector<std::pair<double, double>> samples, double floor) {
    if (samples.size() < 4) throw std::invalid_argument("fit_growth needs at least 4 samples");
    std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> lx, ly;
    bool all_floor = true;
    for (const auto& [eps, mag] : samples) {
        if (!(eps > 0.0)) throw std::invalid_argument("fit_growth needs positive eps");
        const double m = std::max(std::abs(mag), floor);
        if (m > floor) all_floor = false;
        lx.push_back(std::log(1.0 / eps));
        ly.push_back(std::log(m));
    }
    const auto f = linear_fit(lx, ly);
    GrowthFit g;
    g.slope = f.slope;
    g.intercept = f.intercept;
    g.r2 = f.r2;
    g.n_points = static_cast<int>(samples.size());
    g.degenerate = all_floor;
    const auto [lo, hi] = std::minmax_element(ly.begin(), ly.end());
    g.log_range = *hi - *lo;
    if (samples.size() >= 8) {
        const std::size_t n = lx.size();
        const auto first = linear_fit({lx.begin(), lx.begin() + 4}, {ly.begin(), ly.begin() + 4});
        const auto last = linear_fit({lx.begin() + (n - 4), lx.end()}, {ly.begin() + (n - 4), ly.end()});
        g.super_polynomial = last.slope > first.slope + 1.0;
    }
    return g;
}

namespace {

int stride_for(const SolutionRecord& rec) {
    const double ell = rec.ell > 0.0 ? rec.ell : rec.h;
    return std::max(1, static_cast<int>(std::lround(ell / (8.0 * rec.grid.dx()))));
}

/// Centered fourth-order difference of the given order at node i, spacing m*dx.
double centered(const std::vector<double>& f, int i, int order, int m, double H) {
    auto at = [&](int k) { return f[i + k * m]; };
    switch (order) {
        case 0: return f[i];
        case 1: return (at(-2) - 8 * at(-1) + 8 * at(1) - at(2)) / (12 * H);
        case 2: return (-at(-2) + 16 * at(-1) - 30 * at(0) + 16 * at(1) - at(2)) / (12 * H * H);
        case 3: return (at(-3) - 8 * at(-2) + 13 * at(-1) - 13 * at(1) + 8 * at(2) - at(3)) / (8 * H * H * H);
        default: throw std::invalid_argument("derivative order above 3 needs a stored ux field");
    }
}

int half_width(int order) { return order == 0 ? 0 : (order <= 2 ? 2 : 3); }

}  // namespace

std::vector<double> derivative_row(const SolutionRecord& rec, std::size_t snap, int alpha,
                                   const std::string& field) {
    if (alpha < 0) throw std::invalid_argument("derivative order must be non-negative");
    std::string src = field;
    int order = alpha;
    if (alpha >= 1 && field == "u" && rec.has("ux")) {
        src = "ux";
        order = alpha - 1;
    }
    if (order > 3) throw std::invalid_argument("derivative order above 3 needs a stored ux field");
    const auto& f = rec.field(snap, src);
    const int m = stride_for(rec);
    const double H = m * rec.grid.dx();
    const int n = static_cast<int>(f.size());
    const int w = half_width(order) * m;
    std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
    for (int i = w; i + w < n; ++i) out[i] = centered(f, i, order, m, H);
    return out;
}

double local_derivative(const SolutionRecord& rec, double t, double x, int alpha, double radius,
                        const std::string& field) {
    const double ell = rec.ell > 0.0 ? rec.ell : rec.h;
    if (radius <= 0.0) radius = 2.0 * ell;
    const auto s = rec.snapshot_near(t);
    const auto row = derivative_row(rec, s, alpha, field);
    const auto& g = rec.grid;
    const int lo = static_cast<int>(std::ceil((x - radius - g.x_min) / g.dx() - 1e-9));
    const int hi = static_cast<int>(std::floor((x + radius - g.x_min) / g.dx() + 1e-9));
    if (lo < 0 || hi >= g.nodes()) throw StencilError("neighborhood leaves the grid");
    double best = 0.0;
    for (int i = lo; i <= hi; ++i) {
        if (std::isnan(row[i])) throw StencilError("derivative stencil leaves the grid");
        best = std::max(best, std::abs(row[i]));
    }
    return best;
}

double RaySegment::distance(double t, double x) const {
    double best = std::numeric_limits<double>::infinity();
    if (vertices.size() == 1) return std::hypot(t - vertices[0][0], x - vertices[0][1]);
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
        const auto& a = vertices[k];
        const auto& b = vertices[k + 1];
        const double dt = b[0] - a[0], dx = b[1] - a[1];
        const double L2 = dt * dt + dx * dx;
        double s = L2 > 0.0 ? ((t - a[0]) * dt + (x - a[1]) * dx) / L2 : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        best = std::min(best, std::hypot(t - (a[0] + s * dt), x - (a[1] + s * dx)));
    }
    return best;
}

std::vector<std::array<double, 2>> RaySegment::sample(double spacing) const {
    std::vector<std::array<double, 2>> out;
    if (vertices.empty()) return out;
    out.push_back(vertices.front());
    double carry = 0.0;
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
        const auto& a = vertices[k];
        const auto& b = vertices[k + 1];
        const double L = std::hypot(b[0] - a[0], b[1] - a[1]);
        double s = spacing - carry;
        while (s <= L) {
            out.push_back({a[0] + (b[0] - a[0]) * s / L, a[1] + (b[1] - a[1]) * s / L});
            s += spacing;
        }
        carry = L - (s - spacing);
    }
    return out;
}

double jump_condition_value(double c0, double c1) { return std::sqrt(c0 / c1) + std::sqrt(c1 / c0); }

bool reflected_ray_predicted(double c0, double c1, ScaleKind scale) {
    const double v = jump_condition_value(c0, c1);
    return scale == ScaleKind::standard && v > 2.0 && v < 4.0;
}

std::vector<RaySegment> candidate_rays(const GeometryInput& in) {
    if (!(in.c0 > 0.0 && in.c1 > 0.0 && in.t_end > 0.0)) throw UnsupportedScenario("predictor needs positive speeds and t_end");
    std::vector<RaySegment> rays;
    const double T = in.t_end;
    switch (in.kind) {
        case GeometryKind::x_jump: {
            if (!(in.x0 < 0.0)) throw UnsupportedScenario("x_jump prediction needs the datum left of the interface");
            const double th = -in.x0 / in.c0;
            rays.push_back({"Gamma1", {{0.0, in.x0}, {T, in.x0 - in.c0 * T}}});
            const double t2 = std::min(th, T);
            rays.push_back({"Gamma2", {{0.0, in.x0}, {t2, in.x0 + in.c0 * t2}}});
            if (T > th) {
                rays.push_back({"Gamma3", {{th, 0.0}, {T, -in.c0 * (T - th)}},
                                reflected_ray_predicted(in.c0, in.c1, in.scale)});
                rays.push_back({"Gamma4", {{th, 0.0}, {T, in.c1 * (T - th)}}});
            }
            break;
        }
        case GeometryKind::t_jump:
        case GeometryKind::radial_odd:
        case GeometryKind::radial_even: {
            const double tj = in.t_jump;
            auto Tof = [&](double t) { return t <= tj ? in.c0 * t : in.c0 * tj + in.c1 * (t - tj); };
            const bool refract = in.scale == ScaleKind::standard && in.c0 != in.c1;
            const bool radial = in.kind != GeometryKind::t_jump;
            auto transmitted = [&](double sign, const std::string& label) {
                RaySegment r{label, {{0.0, 0.0}}, true};
                if (T > tj) r.vertices.push_back({tj, sign * Tof(tj)});
                r.vertices.push_back({T, sign * Tof(T)});
                return r;
            };
            auto refracted = [&](double sign, const std::string& label) {
                RaySegment r{label, {{tj, sign * Tof(tj)}}, refract};
                const double T1 = Tof(tj);
                auto xr = [&](double t) { return sign * (2.0 * T1 - Tof(t)); };
                if (radial) {
                    const double tz = tj + T1 / in.c1;  // where 2T(1) - T(t) = 0
                    if (tz < T) r.vertices.push_back({tz, 0.0});
                    r.vertices.push_back({T, std::abs(xr(T))});
                } else {
                    r.vertices.push_back({T, xr(T)});
                }
                return r;
            };
            if (radial) {
                rays.push_back(transmitted(1.0, "transmitted"));
                if (T > tj && in.c0 != in.c1) rays.push_back(refracted(1.0, "refracted"));
                if (in.kind == GeometryKind::radial_even && T > tj)
                    rays.push_back({"t_jump_disk", {{tj, 0.0}, {tj, Tof(tj)}}, refract});
            } else {
                auto plus = transmitted(1.0, "transmitted+");
                plus.predicted = in.right_moving;
                auto minus = transmitted(-1.0, "transmitted-");
                minus.predicted = in.left_moving;
                rays.push_back(plus);
                rays.push_back(minus);
                if (T > tj && in.c0 != in.c1) {
                    // the ray reaching +T(t_jump) spawns a refracted ray moving back from there
                    auto rp = refracted(1.0, "refracted+");
                    rp.predicted = refract && in.right_moving;
                    auto rm = refracted(-1.0, "refracted-");
                    rm.predicted = refract && in.left_moving;
                    rays.push_back(rp);
                    rays.push_back(rm);
                }
            }
            break;
        }
    }
    return rays;
}

std::vector<RaySegment> predict_singsupp(const GeometryInput& in) {
    std::vector<RaySegment> out;
    for (auto& r : candidate_rays(in))
        if (r.predicted) out.push_back(std::move(r));
    return out;
}

PointVerdict classify_point(const std::vector<std::optional<GrowthFit>>& fits, double theta, double r2_min) {
    PointVerdict v;
    if (fits.size() < 2 || !fits.back()) return v;
    const int top = static_cast<int>(fits.size()) - 1;
    for (int a = 0; a < top; ++a) {
        const auto& f = fits[a];
        if (f && (f->r2 >= r2_min || f->log_range < 0.05)) {
            v.alpha_ref = a;
            break;
        }
    }
    if (v.alpha_ref < 0) return v;
    v.defined = true;
    v.excess = fits[top]->slope - fits[v.alpha_ref]->slope;
    v.flagged = v.excess >= theta;
    return v;
}

namespace {

struct ProbeSpec {
    double t, x, r;
    int ray;
};

}  // namespace

SingSuppReport classify(const SolutionFamily& fam, const std::vector<RaySegment>& rays,
                        const DetectorConfig& cfg) {
    if (cfg.alpha_max < 2) throw std::invalid_argument("classify needs alpha_max >= 2");
    SingSuppReport rep;
    rep.predicted = rays;

    auto nearest_ray = [&](double t, double x, int skip, bool predicted_only) {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < rays.size(); ++k) {
            if (static_cast<int>(k) == skip || (predicted_only && !rays[k].predicted)) continue;
            d = std::min(d, rays[k].distance(t, x));
        }
        return d;
    };

    std::vector<ProbeSpec> probes;
    for (double t = cfg.t_min; t <= cfg.t_max + 1e-9; t += cfg.lattice_dt)
        for (double x = cfg.x_min; x <= cfg.x_max + 1e-9; x += cfg.lattice_dx)
            probes.push_back({t, x, cfg.lattice_radius, -1});
    const std::size_t n_lattice = probes.size();
    for (std::size_t k = 0; k < rays.size(); ++k) {
        for (const auto& p : rays[k].sample(cfg.ray_spacing)) {
            if (p[0] < cfg.t_min - 1e-9 || p[0] > cfg.t_max + 1e-9) continue;
            if (p[1] < cfg.x_min - 1e-9 || p[1] > cfg.x_max + 1e-9) continue;
            if (nearest_ray(p[0], p[1], static_cast<int>(k), false) < cfg.ray_clearance) continue;
            bool excluded = false;
            for (const auto& e : cfg.exclude_points)
                excluded = excluded || std::hypot(p[0] - e[0], p[1] - e[1]) < cfg.exclude_radius;
            if (excluded) continue;
            probes.push_back({p[0], p[1], cfg.ray_radius, static_cast<int>(k)});
        }
    }

    const int A = cfg.alpha_max + 1;
    const std::size_t R = fam.records.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    // mags[probe][alpha][record]
    std::vector<std::vector<std::vector<double>>> mags(probes.size(), std::vector<std::vector<double>>(A, std::vector<double>(R, nan)));

    for (std::size_t r = 0; r < R; ++r) {
        const auto& rec = fam.records[r];
        const auto& g = rec.grid;
        const std::size_t S = rec.snaps.size();
        std::vector<std::vector<std::vector<double>>> rows(S, std::vector<std::vector<double>>(A));
        std::vector<double> gmax(A, 0.0);
        for (std::size_t s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                rows[s][a] = derivative_row(rec, s, a, cfg.field);
                for (double v : rows[s][a])
                    if (!std::isnan(v)) gmax[a] = std::max(gmax[a], std::abs(v));
            }
        for (std::size_t p = 0; p < probes.size(); ++p) {
            const auto& pr = probes[p];
            std::vector<std::size_t> snaps;
            for (std::size_t s = 0; s < S; ++s)
                if (std::abs(rec.snaps[s].t - pr.t) <= pr.r + 1e-12) snaps.push_back(s);
            if (snaps.empty()) snaps.push_back(rec.snapshot_near(pr.t));
            const int lo = std::max(0, static_cast<int>(std::ceil((pr.x - pr.r - g.x_min) / g.dx() - 1e-9)));
            const int hi = std::min(g.nodes() - 1, static_cast<int>(std::floor((pr.x + pr.r - g.x_min) / g.dx() + 1e-9)));
            for (int a = 0; a < A; ++a) {
                double best = -1.0;
                for (auto s : snaps)
                    for (int i = lo; i <= hi; ++i) {
                        const double v = rows[s][a][i];
                        if (!std::isnan(v)) best = std::max(best, std::abs(v));
                    }
                if (best >= 0.0 && best > cfg.noise_rel * gmax[a] && best > 0.0) mags[p][a][r] = best;
            }
        }
    }

    for (std::size_t p = 0; p < probes.size(); ++p) {
        ProbeResult res;
        res.t = probes[p].t;
        res.x = probes[p].x;
        res.radius = probes[p].r;
        res.ray = probes[p].ray;
        res.fits.resize(A);
        for (int a = 0; a < A; ++a) {
            std::vector<std::pair<double, double>> smp;
            for (std::size_t r = 0; r < R; ++r)
                if (!std::isnan(mags[p][a][r])) smp.push_back({fam.records[r].eps, mags[p][a][r]});
            if (smp.size() >= 4) {
                auto f = fit_growth(smp);
                f.t = res.t;
                f.x = res.x;
                f.order = a;
                res.fits[a] = f;
            }
        }
        res.verdict = classify_point(res.fits, cfg.theta, cfg.r2_min);
        res.ray_distance = nearest_ray(res.t, res.x, -1, true);
        res.in_tube = res.ray_distance <= cfg.rho_tube;
        if (p < n_lattice) rep.lattice.push_back(std::move(res));
        else rep.ray_probes.push_back(std::move(res));
    }

    int flagged = 0, flagged_in = 0;
    for (const auto& pr : rep.lattice) {
        if (!pr.verdict.flagged) {
            if (!pr.in_tube && pr.verdict.defined)
                rep.max_excess_outside = std::max(rep.max_excess_outside, pr.verdict.excess);
            continue;
        }
        ++flagged;
        if (pr.in_tube) ++flagged_in;
        else {
            ++rep.flagged_outside;
            rep.max_excess_outside = std::max(rep.max_excess_outside, pr.verdict.excess);
        }
    }
    rep.precision = flagged ? static_cast<double>(flagged_in) / flagged : 1.0;

    rep.rays.resize(rays.size());
    int rp = 0, rf = 0;
    for (std::size_t k = 0; k < rays.size(); ++k) {
        auto& st = rep.rays[k];
        st.label = rays[k].label;
        st.predicted = rays[k].predicted;
        st.min_excess = std::numeric_limits<double>::infinity();
        st.max_excess = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (const auto& pr : rep.ray_probes) {
            if (pr.ray != static_cast<int>(k)) continue;
            ++st.probes;
            const double e = pr.verdict.defined ? pr.verdict.excess : 0.0;
            st.min_excess = std::min(st.min_excess, e);
            st.max_excess = std::max(st.max_excess, e);
            sum += e;
            if (pr.verdict.flagged) ++st.flagged;
        }
        if (st.probes) st.mean_excess = sum / st.probes;
        else st.min_excess = st.max_excess = 0.0;
        if (!st.predicted) continue;
        rp += st.probes;
        rf += st.flagged;
    }
    rep.recall = rp ? static_cast<double>(rf) / rp : 1.0;
    return rep;
}

}  // namespace colwave
