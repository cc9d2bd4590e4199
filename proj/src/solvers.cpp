#include "colwave/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "colwave/parallel.hpp"
#include "gauss.hpp"

namespace colwave {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("COLWAVE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

namespace {

double resolve_ell(const SolveOptions& opt, double h) { return opt.ell > 0.0 ? opt.ell : h; }

void check_resolution(const Grid1D& g, double ell, const SolveOptions& opt) {
    if (!opt.enforce_resolution) return;
    if (g.dx() > ell / 16.0 * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "resolution contract violated: dx = " << g.dx() << " > ell/16 = " << ell / 16.0;
        throw ResolutionError(os.str());
    }
}

/// Assigns each requested output time to the nearest solver step.
class SnapshotPicker {
public:
    explicit SnapshotPicker(std::vector<double> times) : req_(std::move(times)) {
        std::sort(req_.begin(), req_.end());
    }

    /// emit(bool take_new) is called once per distinct step chosen.
    template <class Emit>
    void initial(double t0, Emit&& emit) {
        bool any = false;
        while (next_ < req_.size() && req_[next_] <= t0) {
            any = true;
            ++next_;
        }
        if (any) {
            emit();
            last_step_ = 0;
        }
    }

    template <class EmitOld, class EmitNew>
    void step(long n_old, double t_old, double t_new, EmitOld&& emit_old, EmitNew&& emit_new) {
        while (next_ < req_.size() && req_[next_] <= t_new) {
            const double r = req_[next_++];
            const bool use_new = (r - t_old) >= (t_new - r);
            const long s = use_new ? n_old + 1 : n_old;
            if (s == last_step_) continue;
            if (use_new) emit_new();
            else emit_old();
            last_step_ = s;
        }
    }

    template <class Emit>
    void finish(long n_last, Emit&& emit) {
        if (next_ < req_.size() && last_step_ != n_last) emit();
        next_ = req_.size();
    }

private:
    std::vector<double> req_;
    std::size_t next_ = 0;
    long last_step_ = -1;
};

/// u_{n+1} = u_n + integral of g over one uniform step; Adams-Moulton of
/// order four once three past values exist, trapezoidal before.
struct QuadratureHistory {
    std::vector<double> g1, g2;  // g at steps n-1, n-2
    int filled = 0;

    explicit QuadratureHistory(std::size_t n) : g1(n, 0.0), g2(n, 0.0) {}

    double increment(std::size_t i, double dt, double g_new, double g_now) const {
        if (filled < 2) return 0.5 * dt * (g_new + g_now);
        return dt / 24.0 * (9.0 * g_new + 19.0 * g_now - 5.0 * g1[i] + g2[i]);
    }

    void push(const std::vector<double>& g_now) {
        std::swap(g1, g2);
        g1 = g_now;
        filled = std::min(filled + 1, 2);
    }
};

/// Spatial pairing at time t on nodes x with values u.
double pair_at(const TestFunction& psi, double t, const std::vector<double>& x,
               const std::vector<double>& u) {
    const double tf = psi.t_factor(t);
    if (tf == 0.0) return 0.0;
    double s = 0.0;
    // nodes are sorted; start at the last node left of the support
    const auto first = std::lower_bound(x.begin(), x.end(), psi.x_lo());
    const std::size_t i0 = std::max<std::size_t>(1, static_cast<std::size_t>(first - x.begin()));
    for (std::size_t i = i0; i < x.size() && x[i - 1] < psi.x_hi(); ++i) {
        if (x[i] <= psi.x_lo()) continue;
        s += 0.5 * (x[i] - x[i - 1]) * (u[i] * psi.x_factor(x[i]) + u[i - 1] * psi.x_factor(x[i - 1]));
    }
    return tf * s;
}

SolutionRecord make_record(double eps, double h, double ell, const Grid1D& g,
                           std::vector<std::string> names) {
    SolutionRecord r;
    r.eps = eps;
    r.h = h;
    r.ell = ell;
    r.grid = g;
    r.field_names = std::move(names);
    return r;
}

std::vector<double> grid_nodes(const Grid1D& g) {
    std::vector<double> x(g.nodes());
    for (int i = 0; i < g.nodes(); ++i) x[i] = g.x(i);
    return x;
}

}  // namespace

SolutionRecord solve_transport(const CharCurve& cc, const Profile& u0, const Grid1D& grid,
                               const SolveOptions& opt) {
    grid.validate();
    const auto coeff = cc.coeff_ptr();
    const double h = coeff ? coeff->h() : cc.eps();
    SolutionRecord rec = make_record(cc.eps(), h, resolve_ell(opt, h), grid, {"u", "ut", "ux"});
    rec.coeff = coeff;
    const auto x = grid_nodes(grid);
    auto fields_at = [&](double t) {
        Snapshot s;
        s.t = t;
        s.fields.assign(3, std::vector<double>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double g = cc.gamma(t, x[i], 0.0);
            const double ux = u0.df(g) * cc.gamma_dx(t, x[i], 0.0);
            s.fields[0][i] = u0.f(g);
            s.fields[2][i] = ux;
            s.fields[1][i] = -cc.speed(t, x[i]) * ux;
        }
        return s;
    };
    std::vector<double> times = opt.output_times;
    std::sort(times.begin(), times.end());
    for (double t : times) rec.snaps.push_back(fields_at(t));

    const auto& rule = detail::GaussRule<48>::get();
    for (const auto& psi : opt.pairings) {
        const double lo = std::max(0.0, psi.t_lo()), hi = std::min(grid.t_end, psi.t_hi());
        double total = 0.0;
        if (hi > lo) {
            total = rule.integrate(
                [&](double t) {
                    std::vector<double> u(x.size(), 0.0);
                    for (std::size_t i = 0; i < x.size(); ++i)
                        if (x[i] >= psi.x_lo() - grid.dx() && x[i] <= psi.x_hi() + grid.dx())
                            u[i] = u0.f(cc.gamma(t, x[i], 0.0));
                    return pair_at(psi, t, x, u);
                },
                lo, hi);
        }
        rec.pairings.push_back(total);
    }
    return rec;
}

SolutionRecord solve_system(const SystemSpec& spec, const Grid1D& grid, const SolveOptions& opt) {
    grid.validate();
    const std::size_t m = spec.size();
    if (m == 0 || spec.directions.size() != m || spec.data.size() != m)
        throw std::invalid_argument("system spec needs speeds, directions and data for every component");
    double b1 = 0.0, h = 0.0, eps = 0.0;
    for (const auto& c : spec.speeds) {
        b1 = std::max(b1, c->upper());
        h = std::max(h, c->h());
        eps = c->eps();
    }
    // Second-order upwind differences with Heun are stable up to unit-half Courant number.
    constexpr double kStableCourant = 0.5;
    if (grid.cfl > kStableCourant) {
        std::ostringstream os;
        os << "CFL violation: cfl = " << grid.cfl << " exceeds " << kStableCourant
           << " for second-order upwind with Heun stepping";
        throw NumericalFailure(os.str());
    }
    const double ell = resolve_ell(opt, h);
    check_resolution(grid, ell, opt);

    const int n = grid.nodes();
    const double dx = grid.dx();
    const double dt = grid.cfl * dx / b1;
    const auto x = grid_nodes(grid);

    std::vector<std::vector<double>> a(m, std::vector<double>(n));
    for (std::size_t k = 0; k < m; ++k)
        for (int i = 0; i < n; ++i) a[k][i] = spec.directions[k] * spec.speeds[k]->eval(x[i]);

    std::vector<std::vector<double>> q(m, std::vector<double>(n));
    for (std::size_t k = 0; k < m; ++k)
        for (int i = 0; i < n; ++i) q[k][i] = spec.data[k].f(x[i]);

    std::vector<double> A(m * m);
    auto rhs = [&](double t, const std::vector<std::vector<double>>& s,
                   std::vector<std::vector<double>>& out) {
        auto at = [&](std::size_t k, int i) { return (i < 0 || i >= n) ? 0.0 : s[k][i]; };
        for (int i = 0; i < n; ++i) {
            spec.coupling(t, x[i], A.data());
            for (std::size_t k = 0; k < m; ++k) {
                const double ak = a[k][i];
                double d;
                if (ak >= 0.0) d = (3.0 * at(k, i) - 4.0 * at(k, i - 1) + at(k, i - 2)) / (2.0 * dx);
                else d = (-3.0 * at(k, i) + 4.0 * at(k, i + 1) - at(k, i + 2)) / (2.0 * dx);
                double src = 0.0;
                for (std::size_t j = 0; j < m; ++j) src += A[k * m + j] * s[j][i];
                out[k][i] = -ak * d + src;
            }
        }
    };

    std::vector<std::string> names;
    for (std::size_t k = 0; k < m; ++k) names.push_back("q" + std::to_string(k));
    SolutionRecord rec = make_record(eps, h, ell, grid, names);
    rec.coeff = spec.speeds.front();

    SnapshotPicker picker(opt.output_times);
    auto emit = [&](const std::vector<std::vector<double>>& s, double t) {
        Snapshot snap;
        snap.t = t;
        snap.fields = s;
        rec.snaps.push_back(std::move(snap));
    };
    picker.initial(0.0, [&] { emit(q, 0.0); });

    std::vector<std::vector<double>> k1(m, std::vector<double>(n)), k2 = k1, qs = q, qn = q;
    const long steps = static_cast<long>(std::ceil(grid.t_end / dt - 1e-9));
    double t = 0.0;
    for (long s = 0; s < steps; ++s) {
        rhs(t, q, k1);
        for (std::size_t k = 0; k < m; ++k)
            for (int i = 0; i < n; ++i) qs[k][i] = q[k][i] + dt * k1[k][i];
        rhs(t + dt, qs, k2);
        for (std::size_t k = 0; k < m; ++k)
            for (int i = 0; i < n; ++i) {
                qn[k][i] = q[k][i] + 0.5 * dt * (k1[k][i] + k2[k][i]);
                if (!std::isfinite(qn[k][i])) throw NumericalFailure("non-finite value in system solver");
            }
        const double tn = t + dt;
        picker.step(s, t, tn, [&] { emit(q, t); }, [&] { emit(qn, tn); });
        std::swap(q, qn);
        t = tn;
    }
    picker.finish(steps, [&] { emit(q, t); });
    return rec;
}

SolutionRecord solve_wave_x(std::shared_ptr<const RegularizedCoeff> coeff, const Profile& u0,
                            const Profile& u1, const Grid1D& grid, const SolveOptions& opt) {
    grid.validate();
    if (coeff->base().variable != Variable::space)
        throw std::invalid_argument("solve_wave_x needs a space-dependent coefficient");
    const double ell = resolve_ell(opt, coeff->h());
    check_resolution(grid, ell, opt);

    const auto C = make_antideriv(coeff);
    const double b1 = coeff->upper();
    const double xi_lo = C->eval(grid.x_min), xi_hi = C->eval(grid.x_max);
    const long N = static_cast<long>(std::ceil((xi_hi - xi_lo) / (grid.dx() / b1) - 1e-9));
    const double dxi = (xi_hi - xi_lo) / N;
    const long n = N + 1;

    std::vector<double> xs(n), c(n), sc(n), L(n, 0.0);
    const double sigma = opt.form == WaveForm::conservative ? 1.0 : -1.0;
    for (long i = 0; i < n; ++i) {
        xs[i] = (i == 0) ? grid.x_min : (i == N ? grid.x_max : C->invert(xi_lo + i * dxi));
        c[i] = coeff->eval(xs[i]);
        sc[i] = std::pow(c[i], 0.5 * sigma);
    }
    for (long i = 0; i + 1 < n; ++i) L[i] = 0.5 * std::log(c[i + 1] / c[i]);

    std::vector<double> V(n), W(n), u(n), ut(n);
    for (long i = 0; i < n; ++i) {
        const double a = u1.f(xs[i]), b = c[i] * u0.df(xs[i]);
        V[i] = (a - b) * sc[i];
        W[i] = (a + b) * sc[i];
        u[i] = u0.f(xs[i]);
        ut[i] = a;
    }

    // Resampling onto the uniform output grid: 6-point Lagrange in the xi index.
    const auto xo = grid_nodes(grid);
    const int no = grid.nodes();
    std::vector<long> base(no);
    std::vector<std::array<double, 6>> wts(no);
    std::vector<double> co(no);
    for (int k = 0; k < no; ++k) {
        const double q = std::clamp((C->eval(xo[k]) - xi_lo) / dxi, 0.0, static_cast<double>(N));
        long j0 = static_cast<long>(std::floor(q)) - 2;
        j0 = std::clamp(j0, 0L, std::max(0L, N - 5));
        base[k] = j0;
        for (int a = 0; a < 6; ++a) {
            double w = 1.0;
            for (int b = 0; b < 6; ++b)
                if (b != a) w *= (q - (j0 + b)) / static_cast<double>(a - b);
            wts[k][a] = w;
        }
        co[k] = coeff->eval(xo[k]);
    }

    SolutionRecord rec = make_record(coeff->eps(), coeff->h(), ell, grid, {"u", "ut", "ux"});
    rec.coeff = coeff;
    auto emit = [&](const std::vector<double>& Vs, const std::vector<double>& Ws,
                    const std::vector<double>& us, double t) {
        Snapshot s;
        s.t = t;
        s.fields.assign(3, std::vector<double>(no));
        for (int k = 0; k < no; ++k) {
            double vv = 0.0, ww = 0.0, uu = 0.0;
            for (int a = 0; a < 6; ++a) {
                const long j = base[k] + a;
                vv += wts[k][a] * Vs[j] / sc[j];
                ww += wts[k][a] * Ws[j] / sc[j];
                uu += wts[k][a] * us[j];
            }
            s.fields[0][k] = uu;
            s.fields[1][k] = 0.5 * (vv + ww);
            s.fields[2][k] = (ww - vv) / (2.0 * co[k]);
        }
        rec.snaps.push_back(std::move(s));
    };

    std::vector<double> pair_acc(opt.pairings.size(), 0.0), pair_prev(opt.pairings.size(), 0.0);
    for (std::size_t p = 0; p < opt.pairings.size(); ++p) pair_prev[p] = pair_at(opt.pairings[p], 0.0, xs, u);

    SnapshotPicker picker(opt.output_times);
    picker.initial(0.0, [&] { emit(V, W, u, 0.0); });

    std::vector<double> Vn(n), Wn(n), un(n), utn(n);
    QuadratureHistory hist(n);
    const long steps = static_cast<long>(std::ceil(grid.t_end / dxi - 1e-9));
    const double dt = dxi;
    double t = 0.0;
    for (long s = 0; s < steps; ++s) {
        for (long i = 0; i < n; ++i) {
            const bool left = i > 0, right = i + 1 < n;
            const double Lv = left ? L[i - 1] : 0.0;
            const double Lw = right ? L[i] : 0.0;
            const double a = (left ? V[i - 1] + sigma * 0.5 * Lv * W[i - 1] : 0.0);
            const double b = (right ? W[i + 1] - sigma * 0.5 * Lw * V[i + 1] : 0.0);
            const double wn = (b - sigma * 0.5 * Lw * a) / (1.0 + 0.25 * Lv * Lw);
            Wn[i] = wn;
            Vn[i] = a + sigma * 0.5 * Lv * wn;
            utn[i] = 0.5 * (Vn[i] + Wn[i]) / sc[i];
            un[i] = u[i] + hist.increment(i, dt, utn[i], ut[i]);
        }
        hist.push(ut);
        const double tn = t + dt;
        for (std::size_t p = 0; p < opt.pairings.size(); ++p) {
            const double gp = pair_at(opt.pairings[p], tn, xs, un);
            pair_acc[p] += 0.5 * dt * (pair_prev[p] + gp);
            pair_prev[p] = gp;
        }
        picker.step(s, t, tn, [&] { emit(V, W, u, t); }, [&] { emit(Vn, Wn, un, tn); });
        std::swap(V, Vn);
        std::swap(W, Wn);
        std::swap(u, un);
        std::swap(ut, utn);
        t = tn;
    }
    picker.finish(steps, [&] { emit(V, W, u, t); });
    rec.pairings = pair_acc;
    return rec;
}

SolutionRecord solve_wave_t(std::shared_ptr<const RegularizedCoeff> coeff, const Profile& u0,
                            const Profile& u1, const Grid1D& grid, const SolveOptions& opt) {
    grid.validate();
    if (coeff->base().variable != Variable::time)
        throw std::invalid_argument("solve_wave_t needs a time-dependent coefficient");
    const double ell = resolve_ell(opt, coeff->h());
    check_resolution(grid, ell, opt);

    const auto T = make_time_integral(coeff);
    const int n = grid.nodes();
    const double dx = grid.dx();
    const auto x = grid_nodes(grid);

    double c_old = coeff->eval(0.0);
    std::vector<double> v(n), w(n), u(n), ut(n);
    for (int i = 0; i < n; ++i) {
        const double a = u1.f(x[i]), b = c_old * u0.df(x[i]);
        v[i] = a - b;
        w[i] = a + b;
        u[i] = u0.f(x[i]);
        ut[i] = a;
    }

    SolutionRecord rec = make_record(coeff->eps(), coeff->h(), ell, grid, {"u", "ut", "ux"});
    rec.coeff = coeff;
    auto emit = [&](const std::vector<double>& vs, const std::vector<double>& ws,
                    const std::vector<double>& us, double t, double ct) {
        Snapshot s;
        s.t = t;
        s.fields.assign(3, std::vector<double>(n));
        for (int i = 0; i < n; ++i) {
            s.fields[0][i] = us[i];
            s.fields[1][i] = 0.5 * (vs[i] + ws[i]);
            s.fields[2][i] = (ws[i] - vs[i]) / (2.0 * ct);
        }
        rec.snaps.push_back(std::move(s));
    };

    std::vector<double> pair_acc(opt.pairings.size(), 0.0), pair_prev(opt.pairings.size(), 0.0);
    for (std::size_t p = 0; p < opt.pairings.size(); ++p) pair_prev[p] = pair_at(opt.pairings[p], 0.0, x, u);

    SnapshotPicker picker(opt.output_times);
    picker.initial(0.0, [&] { emit(v, w, u, 0.0, c_old); });

    // u is integrated in T = T_eps(t), where steps are uniform: du/dT = ut / c.
    std::vector<double> vn(n), wn(n), un(n), utn(n), g(n), gn(n);
    for (int i = 0; i < n; ++i) g[i] = ut[i] / c_old;
    QuadratureHistory hist(n);
    const long steps = static_cast<long>(std::ceil(T->eval(grid.t_end) / dx - 1e-9));
    double t = 0.0;
    for (long s = 0; s < steps; ++s) {
        const double tn = T->invert((s + 1) * dx);
        const double c_new = coeff->eval(tn);
        const double M = 0.5 * std::log(c_new / c_old);
        const double so = 1.0 / std::sqrt(c_old), sn = std::sqrt(c_new);
        for (int i = 0; i < n; ++i) {
            const double vl = i > 0 ? v[i - 1] * so : 0.0, wl = i > 0 ? w[i - 1] * so : 0.0;
            const double vr = i + 1 < n ? v[i + 1] * so : 0.0, wr = i + 1 < n ? w[i + 1] * so : 0.0;
            const double a = vl - 0.5 * M * wl;
            const double b = wr - 0.5 * M * vr;
            const double wt = (b - 0.5 * M * a) / (1.0 - 0.25 * M * M);
            const double vt = a - 0.5 * M * wt;
            vn[i] = vt * sn;
            wn[i] = wt * sn;
            utn[i] = 0.5 * (vn[i] + wn[i]);
            gn[i] = utn[i] / c_new;
            un[i] = u[i] + hist.increment(i, dx, gn[i], g[i]);
        }
        hist.push(g);
        std::swap(g, gn);
        for (std::size_t p = 0; p < opt.pairings.size(); ++p) {
            const double gp = pair_at(opt.pairings[p], tn, x, un);
            pair_acc[p] += 0.5 * (tn - t) * (pair_prev[p] + gp);
            pair_prev[p] = gp;
        }
        const double c_prev = c_old;
        picker.step(s, t, tn, [&] { emit(v, w, u, t, c_prev); }, [&] { emit(vn, wn, un, tn, c_new); });
        std::swap(v, vn);
        std::swap(w, wn);
        std::swap(u, un);
        std::swap(ut, utn);
        t = tn;
        c_old = c_new;
    }
    picker.finish(steps, [&] { emit(v, w, u, t, c_old); });
    rec.pairings = pair_acc;
    return rec;
}

SolutionFamily run_ladder(const std::vector<double>& eps, int threads,
                          const std::function<SolutionRecord(double)>& job,
                          const std::string& scenario_id, const std::string& solver_id) {
    SolutionFamily fam;
    fam.scenario_id = scenario_id;
    fam.solver_id = solver_id;
    fam.records = parallel_map<SolutionRecord>(eps.size(), resolve_threads(threads),
                                               [&](std::size_t k) { return job(eps[k]); });
    return fam;
}

}  // namespace colwave
