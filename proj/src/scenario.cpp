#include "colwave/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "colwave/radial.hpp"
#include "gauss.hpp"

namespace colwave {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

struct Ctx {
    int line;
    std::string key;

    [[noreturn]] void fail(const std::string& msg) const { throw ScenarioError(line, key, msg); }

    double number(const std::string& s) const {
        const std::string t = trim(s);
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) fail("not a number: '" + t + "'");
        return v;
    }
    int integer(const std::string& s) const {
        const double v = number(s);
        if (v != std::floor(v) || std::abs(v) > 1e9) fail("not an integer: '" + trim(s) + "'");
        return static_cast<int>(v);
    }
    std::vector<double> numbers(const std::string& s) const {
        std::vector<double> out;
        for (const auto& p : split(s, ',')) out.push_back(number(p));
        if (out.empty()) fail("empty list");
        return out;
    }
    bool boolean(const std::string& s) const {
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        fail("not a boolean: '" + s + "'");
    }
};

Problem parse_problem(const Ctx& c, const std::string& v) {
    static const std::pair<const char*, Problem> names[] = {
        {"transport", Problem::transport},
        {"wave_x", Problem::wave_x},
        {"wave_t", Problem::wave_t},
        {"system", Problem::system},
        {"radial_odd", Problem::radial_odd},
        {"radial_even_abel", Problem::radial_even_abel},
        {"tanh_example_2", Problem::tanh_example_2},
        {"tanh_example_3", Problem::tanh_example_3},
        {"corner_3_6", Problem::corner_3_6},
    };
    for (const auto& [n, p] : names)
        if (v == n) return p;
    c.fail("unknown problem kind '" + v + "'");
}

Mollifier parse_mollifier(const Ctx& c, const std::string& v) {
    if (v == "bump") return Mollifier::bump();
    if (v == "polynomial") return Mollifier::polynomial(2);
    if (v.rfind("polynomial:", 0) == 0) {
        const int n = c.integer(v.substr(11));
        if (n < 1 || n > 12) c.fail("polynomial degree must lie in 1..12");
        return Mollifier::polynomial(n);
    }
    c.fail("unknown mollifier '" + v + "'");
}

ScaleFn parse_scale(const Ctx& c, const std::string& v) {
    if (v == "standard") return ScaleFn::standard();
    if (v == "logarithmic") return ScaleFn::logarithmic();
    if (v.rfind("slow:", 0) == 0) {
        const double p = c.number(v.substr(5));
        if (!(p > 1.0)) c.fail("slow-scale exponent must exceed 1");
        return ScaleFn::slow(p);
    }
    c.fail("unknown scale '" + v + "'");
}

DataSpec parse_data(const Ctx& c, const std::string& v) {
    DataSpec d;
    const auto colon = v.find(':');
    d.kind = trim(v.substr(0, colon));
    if (colon != std::string::npos) d.args = c.numbers(v.substr(colon + 1));
    auto want = [&](std::size_t lo, std::size_t hi) {
        if (d.args.size() < lo || d.args.size() > hi) c.fail("wrong number of arguments for data kind '" + d.kind + "'");
    };
    if (d.kind == "zero" || d.kind == "odd_gaussian" || d.kind == "linear") want(0, 0);
    else if (d.kind == "delta" || d.kind == "step") want(1, 1);
    else if (d.kind == "delta_prime") want(2, 2);
    else if (d.kind == "gaussian") {
        want(2, 3);
        if (!(d.args[1] > 0.0)) c.fail("gaussian width must be positive");
    } else if (d.kind == "polynomial") want(1, 16);
    else c.fail("unknown data kind '" + d.kind + "'");
    return d;
}

Analyses parse_analyses(const Ctx& c, const std::string& v) {
    Analyses a;
    for (const auto& w : split(v, ',')) {
        if (w == "detect") a.detect = true;
        else if (w == "energy") a.energy = true;
        else if (w == "associate") a.associate = true;
        else if (w == "oracle_compare") a.oracle_compare = true;
        else if (!w.empty()) c.fail("unknown analysis '" + w + "'");
    }
    return a;
}

bool has_jump(const Scenario& sc) { return sc.coefficient.breakpoints.size() == 1; }

bool is_radial(Problem p) { return p == Problem::radial_odd || p == Problem::radial_even_abel; }

bool is_tanh(Problem p) { return p == Problem::tanh_example_2 || p == Problem::tanh_example_3; }

}  // namespace

ScenarioError::ScenarioError(int line, std::string field, const std::string& msg)
    : std::invalid_argument((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                            (field.empty() ? std::string() : field + ": ") + msg),
      line_(line),
      field_(std::move(field)) {}

std::string to_string(Problem p) {
    switch (p) {
        case Problem::transport: return "transport";
        case Problem::wave_x: return "wave_x";
        case Problem::wave_t: return "wave_t";
        case Problem::system: return "system";
        case Problem::radial_odd: return "radial_odd";
        case Problem::radial_even_abel: return "radial_even_abel";
        case Problem::tanh_example_2: return "tanh_example_2";
        case Problem::tanh_example_3: return "tanh_example_3";
        case Problem::corner_3_6: return "corner_3_6";
    }
    return "?";
}

std::string DataSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << kind;
    for (std::size_t i = 0; i < args.size(); ++i) os << (i ? "," : ":") << args[i];
    return os.str();
}

Profile DataSpec::build(const Mollifier& m, double eps) const {
    if (kind == "zero") return Profile::zero();
    if (kind == "delta") return Profile::delta_like(m, eps, args[0]);
    if (kind == "step") return Profile::step(m, eps, args[0]);
    if (kind == "gaussian") return Profile::gaussian(args[0], args[1], args.size() > 2 ? args[2] : 1.0);
    if (kind == "polynomial") return Profile::polynomial(args);
    if (kind == "linear") return Profile::polynomial({0.0, 1.0});
    if (kind == "odd_gaussian") return Profile::odd_gaussian();
    if (kind == "delta_prime") {
        const double x0 = args[0], s = args[1];
        Profile p;
        p.f = [m, eps, x0, s](double x) { return s * m.scaled_deriv(x - x0, eps, 1); };
        p.df = [m, eps, x0, s](double x) { return s * m.scaled_deriv(x - x0, eps, 2); };
        p.support_lo = x0 - eps;
        p.support_hi = x0 + eps;
        p.label = describe();
        return p;
    }
    throw std::invalid_argument("unknown data kind " + kind);
}

double Scenario::ell(double eps) const {
    if (is_tanh(problem)) return eps;
    double l = scale.eval(eps);
    if (u0.eps_scaled() || u1.eps_scaled() || u0.kind == "delta_prime" || u1.kind == "delta_prime")
        l = std::min(l, eps);
    return l;
}

Grid1D Scenario::grid_for(double eps) const {
    if (fixed_nx) return grid;
    Grid1D g = grid.with_spacing(ell(eps) / cells_per_ell);
    if (g.nx % 2) ++g.nx;  // symmetric windows keep a node at 0
    return g;
}

std::vector<double> Scenario::output_times() const {
    std::vector<double> t;
    const int n = static_cast<int>(std::floor(grid.t_end / output_dt + 1e-9));
    for (int k = 0; k <= n; ++k) t.push_back(k * output_dt);
    if (grid.t_end - t.back() > 1e-9) t.push_back(grid.t_end);
    for (double c : corner_times)
        if (problem == Problem::corner_3_6 && c <= grid.t_end) t.push_back(c);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), t.end());
    return t;
}

GeometryInput Scenario::geometry() const {
    if (!has_jump(*this) || coefficient.values.size() != 2)
        throw UnsupportedScenario("geometry needs a coefficient with a single jump");
    GeometryInput g;
    g.c0 = coefficient.values[0];
    g.c1 = coefficient.values[1];
    g.scale = scale.kind;
    g.t_end = grid.t_end;
    g.right_moving = right_moving;
    g.left_moving = left_moving;
    switch (problem) {
        case Problem::wave_x:
            if (coefficient.breakpoints[0] != 0.0 || u1.kind != "delta" || u0.kind != "zero")
                throw UnsupportedScenario("x-jump geometry needs the interface at 0 and data u0 = zero, u1 = delta:x0");
            g.kind = GeometryKind::x_jump;
            g.x0 = u1.args[0];
            break;
        case Problem::wave_t: g.kind = GeometryKind::t_jump; break;
        case Problem::radial_odd: g.kind = GeometryKind::radial_odd; break;
        case Problem::radial_even_abel: g.kind = GeometryKind::radial_even; break;
        default: throw UnsupportedScenario("no singular-support prediction for problem " + to_string(problem));
    }
    if (g.kind != GeometryKind::x_jump) g.t_jump = coefficient.breakpoints[0];
    return g;
}

Scenario parse_scenario(const std::string& text) {
    Scenario sc;
    sc.grid = Grid1D{};
    std::set<std::string> seen;
    bool have_problem = false, have_nx = false, have_cpl = false;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ScenarioError(line, "", "expected key = value");
        const Ctx c{line, trim(s.substr(0, eq))};
        const std::string v = trim(s.substr(eq + 1));
        const std::string& k = c.key;
        if (k.empty()) c.fail("empty key");
        if (v.empty()) c.fail("empty value");
        if (!seen.insert(k).second) c.fail("duplicate field");

        if (k == "id") sc.id = v;
        else if (k == "problem") {
            sc.problem = parse_problem(c, v);
            have_problem = true;
        } else if (k == "form") {
            if (v == "nonconservative") sc.form = WaveForm::nonconservative;
            else if (v == "conservative") sc.form = WaveForm::conservative;
            else c.fail("unknown form '" + v + "'");
        } else if (k == "coefficient.values") sc.coefficient.values = c.numbers(v);
        else if (k == "coefficient.breakpoints") sc.coefficient.breakpoints = c.numbers(v);
        else if (k == "coefficient.jump_at") sc.coefficient.breakpoints = {c.number(v)};
        else if (k == "coefficient.variable") {
            if (v == "space") sc.coefficient.variable = Variable::space;
            else if (v == "time") sc.coefficient.variable = Variable::time;
            else c.fail("unknown variable '" + v + "'");
        } else if (k == "mollifier") sc.mollifier = parse_mollifier(c, v);
        else if (k == "data.mollifier") sc.data_mollifier = parse_mollifier(c, v);
        else if (k == "scale") sc.scale = parse_scale(c, v);
        else if (k == "data.u0") sc.u0 = parse_data(c, v);
        else if (k == "data.u1") sc.u1 = parse_data(c, v);
        else if (k == "ladder.eps0") sc.ladder.eps0 = c.number(v);
        else if (k == "ladder.ratio") sc.ladder.ratio = c.number(v);
        else if (k == "ladder.count") sc.ladder.count = c.integer(v);
        else if (k == "grid.x_min") sc.grid.x_min = c.number(v);
        else if (k == "grid.x_max") sc.grid.x_max = c.number(v);
        else if (k == "grid.t_end") sc.grid.t_end = c.number(v);
        else if (k == "grid.cfl") sc.grid.cfl = c.number(v);
        else if (k == "grid.nx") {
            sc.grid.nx = c.integer(v);
            sc.fixed_nx = true;
            have_nx = true;
        } else if (k == "grid.cells_per_ell") {
            sc.cells_per_ell = c.number(v);
            if (!(sc.cells_per_ell > 0.0)) c.fail("must be positive");
            have_cpl = true;
        } else if (k == "output.dt") {
            sc.output_dt = c.number(v);
            if (!(sc.output_dt > 0.0)) c.fail("must be positive");
        } else if (k == "analyses") sc.analyses = parse_analyses(c, v);
        else if (k == "detect.alpha_max") sc.detect.alpha_max = c.integer(v);
        else if (k == "detect.theta") sc.detect.theta = c.number(v);
        else if (k == "detect.r2_min") sc.detect.r2_min = c.number(v);
        else if (k == "detect.noise_rel") sc.detect.noise_rel = c.number(v);
        else if (k == "detect.rho_tube") {
            sc.detect.rho_tube = c.number(v);
            sc.rho_tube_set = true;
        } else if (k == "detect.t_min") sc.detect.t_min = c.number(v);
        else if (k == "detect.t_max") sc.detect.t_max = c.number(v);
        else if (k == "detect.x_min") sc.detect.x_min = c.number(v);
        else if (k == "detect.x_max") sc.detect.x_max = c.number(v);
        else if (k == "detect.lattice_dt") sc.detect.lattice_dt = c.number(v);
        else if (k == "detect.lattice_dx") sc.detect.lattice_dx = c.number(v);
        else if (k == "detect.lattice_radius") sc.detect.lattice_radius = c.number(v);
        else if (k == "detect.ray_spacing") sc.detect.ray_spacing = c.number(v);
        else if (k == "detect.ray_radius") sc.detect.ray_radius = c.number(v);
        else if (k == "detect.ray_clearance") sc.detect.ray_clearance = c.number(v);
        else if (k == "detect.exclude_radius") sc.detect.exclude_radius = c.number(v);
        else if (k == "detect.field") sc.detect.field = v;
        else if (k == "geometry.right_moving") sc.right_moving = c.boolean(v);
        else if (k == "geometry.left_moving") sc.left_moving = c.boolean(v);
        else if (k == "associate.psi") {
            int id = 0;
            for (const auto& item : split(v, ';')) {
                if (item.empty()) continue;
                const auto a = c.numbers(item);
                if (a.size() != 4) c.fail("each test function needs tc,xc,rt,rx");
                if (!(a[2] > 0.0 && a[3] > 0.0)) c.fail("test function radii must be positive");
                sc.psis.push_back({a[0], a[1], a[2], a[3], id++});
            }
        } else if (k == "radial.d") sc.dimension = c.integer(v);
        else if (k == "corner.times") sc.corner_times = c.numbers(v);
        else c.fail("unknown field");
    }
    if (sc.id.empty()) throw ScenarioError(0, "id", "missing required field");
    if (!have_problem) throw ScenarioError(0, "problem", "missing required field");
    if (have_nx && have_cpl) throw ScenarioError(0, "grid.nx", "give either grid.nx or grid.cells_per_ell");
    if (sc.coefficient.values.empty()) sc.coefficient.values = {1.0};
    if (sc.problem == Problem::corner_3_6 && sc.u0.kind == "zero") sc.u0.kind = "linear";
    return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ScenarioError(0, "", "cannot read scenario file " + file.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_scenario(os.str());
}

void validate_scenario(const Scenario& sc) {
    auto wrap = [](const std::string& field, auto&& f) {
        try {
            f();
        } catch (const ResolutionError&) {
            throw;
        } catch (const ScenarioError&) {
            throw;
        } catch (const std::exception& e) {
            throw ScenarioError(0, field, e.what());
        }
    };
    wrap("coefficient", [&] { sc.coefficient.validate(); });
    wrap("ladder", [&] { sc.ladder.validate(); });
    wrap("grid", [&] { sc.grid.validate(); });

    const auto var = sc.coefficient.variable;
    switch (sc.problem) {
        case Problem::wave_x:
        case Problem::corner_3_6:
            if (var != Variable::space) throw ScenarioError(0, "coefficient.variable", "problem needs a space-dependent coefficient");
            break;
        case Problem::wave_t:
        case Problem::radial_odd:
        case Problem::radial_even_abel:
            if (var != Variable::time) throw ScenarioError(0, "coefficient.variable", "problem needs a time-dependent coefficient");
            break;
        case Problem::system:
            if (var != Variable::space) throw ScenarioError(0, "coefficient.variable", "system speeds are space-dependent");
            break;
        default: break;
    }
    if (sc.form == WaveForm::conservative && sc.problem != Problem::wave_x)
        throw ScenarioError(0, "form", "the conservative form is implemented for wave_x only");
    if (is_radial(sc.problem)) {
        if (sc.u0.kind != "zero") throw ScenarioError(0, "data.u0", "radial problems need u0 = zero");
        if (sc.u1.kind == "delta" && sc.u1.args[0] != 0.0)
            throw ScenarioError(0, "data.u1", "radial data must be centred at the origin");
        if (sc.u1.kind == "delta_prime" || sc.u1.kind == "step" || sc.u1.kind == "polynomial" ||
            sc.u1.kind == "linear" || sc.u1.kind == "odd_gaussian")
            throw ScenarioError(0, "data.u1", "radial data must be a decaying even profile (delta or gaussian)");
        if (std::abs(sc.grid.x_min + sc.grid.x_max) > 1e-12)
            throw ScenarioError(0, "grid.x_min", "radial problems need a window symmetric about 0");
        if (sc.problem == Problem::radial_odd && (sc.dimension < 3 || sc.dimension % 2 == 0))
            throw ScenarioError(0, "radial.d", "radial_odd needs odd d >= 3");
        if (sc.problem == Problem::radial_even_abel && sc.dimension != 2)
            throw ScenarioError(0, "radial.d", "radial_even_abel supports d = 2");
    }
    if (is_tanh(sc.problem) && sc.u0.eps_scaled())
        throw ScenarioError(0, "data.u0", "the tanh examples take classical data");
    if (sc.u0.kind == "delta_prime" || sc.u1.kind == "delta_prime")
        if (sc.data_mollifier.max_order() < 2)
            throw ScenarioError(0, "data.mollifier", "delta_prime data needs a kernel with two derivatives");
    if (sc.detect.alpha_max < 2 || sc.detect.alpha_max > 3)
        throw ScenarioError(0, "detect.alpha_max", "must be 2 or 3");
    if (sc.analyses.detect) wrap("analyses", [&] { (void)sc.geometry(); });
    if (sc.analyses.energy && (sc.problem != Problem::wave_x && sc.problem != Problem::wave_t))
        throw ScenarioError(0, "analyses", "energy needs a wave_x or wave_t problem");
    if (sc.analyses.associate && sc.psis.empty())
        throw ScenarioError(0, "associate.psi", "association needs at least one test function");

    for (double eps : sc.ladder.values()) {
        const Grid1D g = sc.grid_for(eps);
        const double ell = sc.ell(eps);
        if (g.dx() > ell / 16.0 * (1.0 + 1e-9)) {
            std::ostringstream os;
            os << "resolution contract violated: eps = " << eps << " needs dx <= " << ell / 16.0 << ", grid gives "
               << g.dx();
            throw ResolutionError(os.str());
        }
    }
}

std::filesystem::path scenario_dir() {
    if (const char* env = std::getenv("COLWAVE_SCENARIO_DIR")) return env;
#ifdef COLWAVE_SCENARIO_DIR
    return COLWAVE_SCENARIO_DIR;
#else
    return "scenarios";
#endif
}

std::vector<std::filesystem::path> bundled_scenarios() {
    std::vector<std::filesystem::path> out;
    const auto dir = scenario_dir();
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".scn") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

double RunResult::metric(const std::string& name) const {
    for (const auto& [k, v] : metrics)
        if (k == name) return v;
    throw std::out_of_range("no metric " + name);
}

bool RunResult::has_metric(const std::string& name) const {
    return std::any_of(metrics.begin(), metrics.end(), [&](const auto& m) { return m.first == name; });
}

SolutionRecord solve_member(const Scenario& sc, double eps) {
    SolveOptions opt;
    opt.output_times = sc.output_times();
    opt.form = sc.form;
    opt.pairings = sc.psis;
    opt.ell = sc.ell(eps);
    const Grid1D grid = sc.grid_for(eps);
    const Profile u0 = sc.u0.build(sc.data_mollifier, eps);
    const Profile u1 = sc.u1.build(sc.data_mollifier, eps);

    if (sc.problem == Problem::tanh_example_2)
        return solve_transport(CharCurve::tanh_minus(eps), u0, grid, opt);
    if (sc.problem == Problem::tanh_example_3)
        return solve_transport(CharCurve::tanh_plus(eps), u0, grid, opt);

    auto coeff = std::make_shared<const RegularizedCoeff>(sc.coefficient, sc.mollifier, sc.scale, eps);
    switch (sc.problem) {
        case Problem::transport:
        case Problem::corner_3_6: {
            const auto cc = sc.coefficient.variable == Variable::space
                                ? CharCurve::x_dependent(make_antideriv(coeff))
                                : CharCurve::t_dependent(make_time_integral(coeff), 1);
            return solve_transport(cc, u0, grid, opt);
        }
        case Problem::wave_x: return solve_wave_x(coeff, u0, u1, grid, opt);
        case Problem::wave_t: return solve_wave_t(coeff, u0, u1, grid, opt);
        case Problem::system: {
            SystemSpec spec;
            spec.speeds = {coeff, coeff};
            spec.directions = {1.0, -1.0};
            spec.coupling = [](double, double, double* a) { a[0] = a[1] = a[2] = a[3] = 0.0; };
            spec.data = {u0, u1};
            return solve_system(spec, grid, opt);
        }
        case Problem::radial_odd:
        case Problem::radial_even_abel: {
            const double support = std::min(u1.support_hi, grid.x_max);
            auto g = [u1](double r) { return u1.f(r); };
            if (sc.problem == Problem::radial_odd) return solve_radial_odd(coeff, sc.dimension, g, support, grid, opt);
            return solve_radial_even(coeff, sc.dimension, g, support, grid, opt);
        }
        default: break;
    }
    throw UnsupportedScenario("unhandled problem " + to_string(sc.problem));
}

namespace {

/// Linear interpolation of a snapshot field at x.
double field_at(const SolutionRecord& rec, std::size_t snap, const std::string& name, double x) {
    const auto& f = rec.field(snap, name);
    const auto& g = rec.grid;
    const double q = (x - g.x_min) / g.dx();
    const int i = std::clamp(static_cast<int>(std::floor(q)), 0, g.nx - 1);
    const double s = q - i;
    return (1.0 - s) * f[i] + s * f[i + 1];
}

/// Default probe exclusions: every ray vertex before the final time.
std::vector<std::array<double, 2>> split_points(const std::vector<RaySegment>& rays, double t_end) {
    std::vector<std::array<double, 2>> pts;
    for (const auto& r : rays)
        for (const auto& v : r.vertices)
            if (v[0] < t_end - 1e-9) pts.push_back(v);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

void detection_metrics(RunResult& res) {
    const auto& d = *res.detection;
    auto& m = res.metrics;
    m.push_back({"detect.precision", d.precision});
    m.push_back({"detect.recall", d.recall});
    m.push_back({"detect.flagged_outside", d.flagged_outside});
    m.push_back({"detect.max_excess_outside", d.max_excess_outside});
    for (const auto& st : d.rays) {
        const std::string p = "ray." + st.label + ".";
        m.push_back({p + "predicted", st.predicted ? 1.0 : 0.0});
        m.push_back({p + "probes", st.probes});
        m.push_back({p + "recall", st.recall()});
        m.push_back({p + "min_excess", st.min_excess});
        m.push_back({p + "mean_excess", st.mean_excess});
        m.push_back({p + "max_excess", st.max_excess});
    }
}

void energy_analysis(const Scenario& sc, RunResult& res) {
    const EnergyForm form = sc.problem == Problem::wave_t
                                ? EnergyForm::nonconservative_t
                                : (sc.form == WaveForm::conservative ? EnergyForm::conservative_x
                                                                     : EnergyForm::nonconservative_x);
    res.energy = energy_traces(res.family, form);
    const auto& fin = res.energy.back();
    res.metrics.push_back({"energy.drift_finest", fin.max_relative_drift()});
    double worst = 0.0;
    for (const auto& tr : res.energy) worst = std::max(worst, tr.max_relative_drift());
    res.metrics.push_back({"energy.drift_max", worst});

    if (form == EnergyForm::nonconservative_t) {
        // E(t)/E(0) must stay within the Gronwall factor
        double ratio = 0.0;
        for (std::size_t r = 0; r < res.energy.size(); ++r) {
            const auto& tr = res.energy[r];
            const auto& c = *res.family.records[r].coeff;
            for (std::size_t k = 0; k < tr.E.size(); ++k) {
                const double g = gronwall_factor(c, tr.times[k]);
                ratio = std::max({ratio, tr.E[k] / (tr.E.front() * g), tr.E.front() / (tr.E[k] * g)});
            }
        }
        res.metrics.push_back({"energy.gronwall_ratio_max", ratio});
        res.metrics.push_back({"energy.gronwall_uniform", gronwall_factor_uniform(*res.family.records.back().coeff)});
        return;
    }
    if (sc.fixed_nx) return;
    // same finest eps on a grid twice as fine
    Scenario fine = sc;
    fine.cells_per_ell *= 2.0;
    fine.psis.clear();
    const double eps = res.family.records.back().eps;
    const auto tr = energy_trace(solve_member(fine, eps), form);
    const double d_fine = tr.max_relative_drift();
    res.metrics.push_back({"energy.drift_refined", d_fine});
    res.metrics.push_back({"energy.refinement_ratio", d_fine > 0.0 ? fin.max_relative_drift() / d_fine : 0.0});
}

/// Distributional limit used by the association check, when one is known.
std::optional<std::function<double(const TestFunction&)>> association_oracle(const Scenario& sc) {
    if (sc.problem == Problem::wave_x && sc.u0.kind == "zero" && sc.u1.kind == "delta" && has_jump(sc) &&
        sc.coefficient.breakpoints[0] == 0.0 && sc.form == WaveForm::nonconservative) {
        const double cm = sc.coefficient.values[0], cp = sc.coefficient.values[1], x0 = sc.u1.args[0];
        return [=](const TestFunction& psi) { return delta_oracle_pairing(cm, cp, psi, x0); };
    }
    if (is_tanh(sc.problem)) {
        const Profile u0 = sc.u0.build(sc.data_mollifier, 1.0);
        const bool ex3 = sc.problem == Problem::tanh_example_3;
        return [u0, ex3](const TestFunction& psi) {
            auto lim = [&](double t, double x) {
                if (ex3) {
                    if (x > t) return u0.f(x - t);
                    if (x < -t) return u0.f(x + t);
                    return u0.f(0.0);
                }
                return x > 0.0 ? u0.f(x + t) : u0.f(x - t);
            };
            auto br = [ex3](double t) {
                return ex3 ? std::vector<double>{-t, t} : std::vector<double>{0.0};
            };
            return pairing_2d(lim, psi, br);
        };
    }
    if (sc.problem == Problem::wave_t && has_jump(sc) && !sc.u0.eps_scaled() && !sc.u1.eps_scaled() &&
        sc.u0.kind != "delta_prime" && sc.u1.kind != "delta_prime") {
        const Profile u0 = sc.u0.build(sc.data_mollifier, 1.0), u1 = sc.u1.build(sc.data_mollifier, 1.0);
        const double c0 = sc.coefficient.values[0], c1 = sc.coefficient.values[1], tj = sc.coefficient.breakpoints[0];
        return [=](const TestFunction& psi) {
            return pairing_2d([&](double t, double x) { return piecewise_t_solution(c0, c1, tj, u0, u1, t, x); }, psi,
                              {}, {tj});
        };
    }
    return std::nullopt;
}

void oracle_x_jump(const Scenario& sc, RunResult& res) {
    const auto geo = sc.geometry();
    const double cm = geo.c0, cp = geo.c1, x0 = geo.x0, T = sc.grid.t_end;
    const double th = -x0 / cm;
    if (T < th + 0.5) {
        res.notes.push_back("oracle_compare: t_end too small for the plateau above the crossing");
        return;
    }
    const auto& rec = res.family.records.back();
    const std::size_t s_end = rec.snapshot_near(T), s_in = rec.snapshot_near(0.5 * th);
    const double t_end = rec.snaps[s_end].t, t_in = rec.snaps[s_in].t;
    // sample points halfway between neighbouring rays
    const double x_plateau = 0.5 * cp * (t_end - th);
    const double x_left = 0.5 * ((x0 - cm * t_end) + (-cm * (t_end - th)));
    const double x_out = cp * (t_end - th) + 0.5 * (sc.grid.x_max - cp * (t_end - th));
    // incident jump across the right-moving ray before it reaches the interface
    const double x_inc_in = x0, x_inc_out = 0.5 * (x0 + cm * t_in);
    auto u = [&](std::size_t s, double x) { return field_at(rec, s, "u", x); };

    const double plateau = u(s_end, x_plateau);
    const double incident = u(s_in, x_inc_in) - u(s_in, x_inc_out);
    const double reflected = plateau - u(s_end, x_left);
    const double transmitted = plateau - u(s_end, x_out);
    auto& m = res.metrics;
    m.push_back({"oracle.plateau", plateau});
    m.push_back({"oracle.plateau_expected", delta_solution_eval(cm, cp, t_end, x_plateau, x0)});
    m.push_back({"oracle.plateau_formula", cp / (cm * (cp + cm))});
    m.push_back({"oracle.incident_jump", incident});
    m.push_back({"oracle.ratio_reflected", reflected / incident});
    m.push_back({"oracle.ratio_reflected_formula", (cp - cm) / (cp + cm)});
    m.push_back({"oracle.ratio_transmitted", transmitted / incident});
    m.push_back({"oracle.ratio_transmitted_formula", 2.0 * cp / (cp + cm)});
    double linf = 0.0;
    // agreement away from the rays, finest member
    const auto rays = predict_singsupp(geo);
    for (std::size_t s = 0; s < rec.snaps.size(); ++s) {
        const double t = rec.snaps[s].t;
        if (t < 0.2) continue;
        const auto& f = rec.field(s, "u");
        for (int i = 0; i < rec.grid.nodes(); ++i) {
            const double x = rec.grid.x(i);
            bool near = false;
            for (const auto& r : rays) near = near || r.distance(t, x) < 8.0 * rec.ell;
            if (near || std::abs(x) < 8.0 * rec.ell) continue;
            linf = std::max(linf, std::abs(f[i] - delta_solution_eval(cm, cp, t, x, x0)));
        }
    }
    m.push_back({"oracle.linf_off_rays", linf});
}

void oracle_t_jump(const Scenario& sc, RunResult& res) {
    const double c0 = sc.coefficient.values[0], c1 = sc.coefficient.values[1], tj = sc.coefficient.breakpoints[0];
    const auto& rec = res.family.records.back();
    const std::size_t s = rec.snapshot_near(sc.grid.t_end);
    const double t = rec.snaps[s].t;
    if (t <= tj) return;
    const Profile u0 = sc.u0.build(sc.data_mollifier, rec.eps), u1 = sc.u1.build(sc.data_mollifier, rec.eps);
    // plateau points between the refracted and transmitted rays and around the origin
    const double T1 = c0 * tj, Tt = T1 + c1 * (t - tj), R = std::abs(2.0 * T1 - Tt);
    std::vector<double> xs{0.5 * (R + Tt), -0.5 * (R + Tt)};
    // With eps-scaled u0 the origin keeps an O(dx^2 / h^3) residue of the initial
    // pulse from the time quadrature of u, so it is only sampled for u1 data.
    if (R > 0.4 && !sc.u0.eps_scaled()) xs.push_back(0.0);
    double worst = 0.0, scale = 0.0;
    for (double x : xs) {
        if (x < rec.grid.x_min || x > rec.grid.x_max) continue;
        const double ref = piecewise_t_solution(c0, c1, tj, u0, u1, t, x);
        const double got = field_at(rec, s, "u", x);
        scale = std::max(scale, std::abs(ref));
        worst = std::max(worst, std::abs(got - ref));
    }
    res.metrics.push_back({"oracle.t_plateau_abs_err", worst});
    res.metrics.push_back({"oracle.t_plateau_rel_err", scale > 0.0 ? worst / scale : worst});
}

void radial_support(const Scenario& sc, RunResult& res) {
    // numerical support against the predicted set, every member, tube 4 h(eps0)
    const double tube = 4.0 * sc.scale.eval(res.family.records.front().eps);
    std::vector<RaySegment> rays;
    for (const auto& r : res.rays)
        if (r.predicted) rays.push_back(r);
    double worst = 0.0;
    int outside = 0;
    for (const auto& rec : res.family.records)
        for (std::size_t s = 0; s < rec.snaps.size(); ++s) {
            const double t = rec.snaps[s].t;
            const auto& u = rec.field(s, "u");
            for (int i = 0; i < rec.grid.nodes(); ++i) {
                if (std::abs(u[i]) <= 1e-8) continue;
                double d = std::numeric_limits<double>::infinity();
                for (const auto& r : rays) d = std::min(d, r.distance(t, std::abs(rec.grid.x(i))));
                if (d > tube) {
                    ++outside;
                    worst = std::max(worst, d);
                }
            }
        }
    res.metrics.push_back({"radial.support_tube", tube});
    res.metrics.push_back({"radial.support_outside", outside});
    res.metrics.push_back({"radial.support_max_distance", worst});
}

/// d = 3, constant c: u(t, r) = (1/(2 c r)) integral over [|r - ct|, r + ct] of s g(s) ds.
void radial_exact_d3(const Scenario& sc, RunResult& res) {
    const double c = sc.coefficient.values[0];
    const auto& rec = res.family.records.back();
    const Profile g = sc.u1.build(sc.data_mollifier, rec.eps);
    const double support = std::min(g.support_hi, rec.grid.x_max);
    const auto& rule = detail::GaussRule<16>::get();
    auto exact = [&](double t, double r) {
        const double lo = std::abs(r - c * t), hi = std::min(r + c * t, support);
        if (hi <= lo) return 0.0;
        const int panels = 16;
        double s = 0.0;
        for (int p = 0; p < panels; ++p)
            s += rule.integrate([&](double q) { return q * g.f(q); }, lo + (hi - lo) * p / panels,
                                lo + (hi - lo) * (p + 1) / panels);
        return s / (2.0 * c * r);
    };
    double linf = 0.0, peak = 0.0;
    for (std::size_t s = 0; s < rec.snaps.size(); ++s) {
        const double t = rec.snaps[s].t;
        const auto& u = rec.field(s, "u");
        for (int i = 0; i < rec.grid.nodes(); ++i) {
            const double r = std::abs(rec.grid.x(i));
            if (r < 0.1 || r > rec.grid.x_max - c * t - 0.1) continue;
            const double e = exact(t, r);
            peak = std::max(peak, std::abs(e));
            linf = std::max(linf, std::abs(u[i] - e));
        }
    }
    res.metrics.push_back({"radial.exact_linf", linf});
    res.metrics.push_back({"radial.exact_peak", peak});
}

/// d = 2, constant c, data concentrated at the origin: inside the disk
/// u is close to m / (2 pi sqrt(c^2 t^2 - r^2)), so u(t, ct/2) / u(t, 0) -> 2/sqrt(3).
void radial_even_interior(const Scenario& sc, RunResult& res) {
    const double c = sc.coefficient.values[0];
    const auto& rec = res.family.records.back();
    const std::size_t s = rec.snapshot_near(sc.grid.t_end);
    const double t = rec.snaps[s].t;
    const double u0 = field_at(rec, s, "u", 0.0), uh = field_at(rec, s, "u", 0.5 * c * t);
    res.metrics.push_back({"radial.interior_center", u0});
    res.metrics.push_back({"radial.interior_ratio", u0 != 0.0 ? uh / u0 : 0.0});
    res.metrics.push_back({"radial.interior_ratio_expected", 2.0 / std::sqrt(3.0)});
}

void oracle_radial(const Scenario& sc, RunResult& res) {
    const bool constant = sc.coefficient.values.size() == 1;
    if (sc.problem == Problem::radial_even_abel) {
        if (constant) radial_even_interior(sc, res);
        else res.notes.push_back("oracle_compare: even-d comparison needs a constant coefficient");
        return;
    }
    if (!res.rays.empty()) radial_support(sc, res);
    if (constant && sc.dimension == 3) radial_exact_d3(sc, res);
}

void corner_metrics(const Scenario& sc, RunResult& res) {
    const double a = sc.mollifier.eval(0.0);
    const double cm = sc.coefficient.values[0], cp = sc.coefficient.values[1];
    const double c_mid = 0.5 * (cm + cp);
    double worst = 0.0, worst_ux = 0.0;
    for (const auto& rec : res.family.records) {
        const auto cc = CharCurve::x_dependent(make_antideriv(rec.coeff));
        const double h = rec.h;
        // c(gamma) = cm once the backward characteristic has left the layer
        const double g1 = cm / c_mid;
        const double g2 = -cm * (cp - cm) * a / h / (c_mid * c_mid);
        const double g3 = cm * std::pow((cp - cm) * a / h, 2) * 2.0 / std::pow(c_mid, 3) -
                          cm * (cp - cm) * sc.mollifier.deriv(0.0, 1) / (h * h) / (c_mid * c_mid);
        for (double t : sc.corner_times) {
            if (t > sc.grid.t_end + 1e-12) continue;
            const auto P = cc.partials(t, 0.0);
            const double exact[3] = {g1, g2, g3};
            for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(P.dx[k] - exact[k]) / std::abs(exact[k]));
            if (sc.u0.kind == "linear") {
                const std::size_t s = rec.snapshot_near(t);
                if (std::abs(rec.snaps[s].t - t) < 1e-12)
                    worst_ux = std::max(worst_ux, std::abs(field_at(rec, s, "ux", 0.0) - g1) / g1);
            }
        }
    }
    res.metrics.push_back({"corner.max_rel_err", worst});
    if (sc.u0.kind == "linear") res.metrics.push_back({"corner.transport_ux_rel_err", worst_ux});
}

void tanh2_metrics(const Scenario& sc, RunResult& res) {
    const double t = std::min(0.5, sc.grid.t_end);
    std::vector<double> inv, lg;
    std::vector<std::pair<double, double>> smp;
    for (const auto& rec : res.family.records) {
        const std::size_t s = rec.snapshot_near(t);
        const double v = std::abs(field_at(rec, s, "ux", 0.0));
        inv.push_back(1.0 / rec.eps);
        lg.push_back(std::log(v));
        smp.push_back({rec.eps, v});
    }
    const auto f = linear_fit(inv, lg);
    const auto g = fit_growth(smp);
    res.metrics.push_back({"ex2.t", t});
    res.metrics.push_back({"ex2.slope_in_inv_eps", f.slope});
    res.metrics.push_back({"ex2.r2", f.r2});
    res.metrics.push_back({"ex2.super_polynomial", g.super_polynomial ? 1.0 : 0.0});
}

void tanh3_metrics(const Scenario& sc, RunResult& res) {
    // max over the window of |d^alpha u| per member, fitted against eps
    const int A = 3;
    std::vector<std::vector<std::pair<double, double>>> smp(A);
    std::vector<double> K(A, 0.0);
    for (const auto& rec : res.family.records) {
        std::vector<double> best(A, 0.0);
        for (std::size_t s = 0; s < rec.snaps.size(); ++s) {
            if (rec.snaps[s].t < 0.05) continue;
            for (int a = 0; a < A; ++a) {
                const auto row = derivative_row(rec, s, a);
                for (double v : row)
                    if (!std::isnan(v)) best[a] = std::max(best[a], std::abs(v));
            }
        }
        for (int a = 0; a < A; ++a) {
            smp[a].push_back({rec.eps, best[a]});
            K[a] = std::max(K[a], best[a] * std::pow(rec.eps, a));
        }
    }
    double excess = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) {
        const auto g = fit_growth(smp[a]);
        res.metrics.push_back({"ex3.slope_order" + std::to_string(a), g.slope});
        res.metrics.push_back({"ex3.K_order" + std::to_string(a), K[a]});
        excess = std::max(excess, g.slope - a);
    }
    res.metrics.push_back({"ex3.max_slope_minus_order", excess});
    (void)sc;
}

}  // namespace

RunResult run_scenario(const Scenario& sc_in, const RunOptions& opt) {
    Scenario sc = sc_in;
    if (opt.ladder_override) sc.ladder = *opt.ladder_override;
    validate_scenario(sc);

    RunResult res;
    res.scenario = sc;
    const auto eps = sc.ladder.values();
    std::string solver = to_string(sc.problem);
    if (sc.problem == Problem::wave_x) solver += sc.form == WaveForm::conservative ? "/conservative" : "/nonconservative";
    res.family = run_ladder(eps, opt.threads, [&](double e) { return solve_member(sc, e); }, sc.id, solver);

    try {
        res.rays = candidate_rays(sc.geometry());
    } catch (const UnsupportedScenario&) {
    }

    if (sc.analyses.detect) {
        DetectorConfig cfg = sc.detect;
        if (!sc.rho_tube_set) cfg.rho_tube = 4.0 * sc.ell(eps.front());
        if (cfg.exclude_points.empty()) cfg.exclude_points = split_points(res.rays, sc.grid.t_end);
        if (is_radial(sc.problem) && cfg.x_min < 0.0) {
            cfg.x_min = 0.0;
            res.notes.push_back("detect: radial lattice restricted to x >= 0");
        }
        res.detection = classify(res.family, res.rays, cfg);
        res.metrics.push_back({"detect.rho_tube", cfg.rho_tube});
        detection_metrics(res);
    }
    if (sc.analyses.energy) energy_analysis(sc, res);
    if (sc.analyses.associate) {
        const auto oracle = association_oracle(sc);
        if (!oracle) {
            res.notes.push_back("associate: no distributional limit available for this scenario");
        } else {
            for (std::size_t j = 0; j < sc.psis.size(); ++j) {
                const double ref = (*oracle)(sc.psis[j]);
                res.oracle_pairings.push_back(ref);
                res.association.push_back(associate_check(res.family, j, ref, sc.psis[j]));
                const auto& a = res.association.back();
                const std::string p = "associate.psi" + std::to_string(j) + ".";
                res.metrics.push_back({p + "final_error", a.final_error});
                res.metrics.push_back({p + "tol", a.tol});
                res.metrics.push_back({p + "pass", a.pass ? 1.0 : 0.0});
            }
        }
    }
    if (sc.analyses.oracle_compare) {
        switch (sc.problem) {
            case Problem::wave_x: oracle_x_jump(sc, res); break;
            case Problem::wave_t: oracle_t_jump(sc, res); break;
            case Problem::radial_odd:
            case Problem::radial_even_abel: oracle_radial(sc, res); break;
            case Problem::corner_3_6: corner_metrics(sc, res); break;
            case Problem::tanh_example_2: tanh2_metrics(sc, res); break;
            case Problem::tanh_example_3: tanh3_metrics(sc, res); break;
            default: res.notes.push_back("oracle_compare: nothing to compare for " + to_string(sc.problem));
        }
    }
    return res;
}

}  // namespace colwave
