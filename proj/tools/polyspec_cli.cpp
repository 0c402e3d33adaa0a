// polyspec: command-line front end.
// Exit codes: 0 all requested certifications pass, 2 a certification failed,
// 1 usage or solver error.
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <polyspec/polyspec.hpp>

namespace ps = polyspec;
using json = nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_uncertified = 2;

ps::LevelRange parse_levels(const std::string &text)
{
    ps::LevelRange l;
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            l.last = std::stoi(text);
            l.first = std::min(3, l.last);
        } else {
            l.first = std::stoi(text.substr(0, colon));
            l.last = std::stoi(text.substr(colon + 1));
        }
    } catch (const std::logic_error &) {
        throw std::invalid_argument("bad level range '" + text + "' (expected a:b or L)");
    }
    l.validate();
    return l;
}

/// A number or "pi", "pi/K", "X*pi/K".
double parse_angle(std::string text)
{
    double scale = 1.0;
    if (const auto star = text.find('*'); star != std::string::npos) {
        scale = std::stod(text.substr(0, star));
        text = text.substr(star + 1);
    }
    if (text.rfind("pi", 0) == 0) {
        double v = ps::pi;
        if (text.size() > 2) {
            if (text[2] != '/') throw std::invalid_argument("bad angle '" + text + "'");
            v /= std::stod(text.substr(3));
        }
        return scale * v;
    }
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("bad angle '" + text + "'");
    return scale * v;
}

std::vector<double> parse_alpha_grid(const std::string &text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() == 1) return {parse_angle(parts[0])};
    if (parts.size() != 3) throw std::invalid_argument("alpha grid must be a:b:step");
    const double a = parse_angle(parts[0]), b = parse_angle(parts[1]), step = parse_angle(parts[2]);
    if (!(step > 0.0) || b < a) throw std::invalid_argument("alpha grid needs a <= b and step > 0");
    std::vector<double> out;
    const auto count = static_cast<int>(std::floor((b - a) / step + 1e-9));
    for (int i = 0; i <= count; ++i) out.push_back(a + i * step);
    return out;
}

std::string levels_text(const ps::LevelRange &l) { return std::to_string(l.first) + ":" + std::to_string(l.last); }

json series_json(const ps::ConvergenceSeries &s)
{
    json levels = json::array();
    for (const auto &l : s.levels)
        levels.push_back({{"level", l.level}, {"h_max", l.h_max}, {"eigenvalue", l.eigenvalue}, {"residual", l.residual}, {"iterations", l.iterations}});
    json j{{"levels", levels}, {"extrapolated", s.extrapolated}, {"error_estimate", s.error_estimate}};
    if (auto p = s.observed_order()) j["observed_order"] = *p;
    return j;
}

void print_series(std::ostream &os, const ps::ConvergenceSeries &s)
{
    os << "level  h_max           eigenvalue          residual   iterations\n";
    for (const auto &l : s.levels)
        os << std::setw(5) << l.level << "  " << std::setw(14) << l.h_max << "  " << std::setw(18) << l.eigenvalue << "  " << std::setw(9)
           << l.residual << "  " << l.iterations << '\n';
    os << "extrapolated " << s.extrapolated << " +- " << s.error_estimate;
    if (auto p = s.observed_order()) os << "  (observed order " << *p << ")";
    os << '\n';
}

std::ofstream open_output(const std::string &path)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17);
    return f;
}

struct Run {
    std::string subcommand;
    json config;
    json results;
    std::vector<std::string> outputs;
};

void write_manifest(const Run &run, const std::vector<std::string> &argv, double seconds, int code, const std::string &fallback)
{
    const std::string path = (run.outputs.empty() ? fallback : run.outputs.front()) + ".manifest.json";
    json m{{"subcommand", run.subcommand},
           {"argv", argv},
           {"config", run.config},
           {"outputs", run.outputs},
           {"results", run.results},
           {"exit_code", code},
           {"wall_time_seconds", seconds},
           {"versions",
            {{"polyspec", ps::version},
             {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION)},
             {"compiler", __VERSION__},
             {"cplusplus", __cplusplus}}}};
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write manifest " + path);
    f << m.dump(2) << '\n';
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Dirichlet eigenvalues of regular polygons and inequality certification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ps::version));

    double r = 1.0, tol = 1e-10;
    std::string levels_arg = "3:6";
    unsigned threads = 0;
    std::string manifest_dir = ".";
    auto common = [&](CLI::App *sub) {
        sub->add_option("--r", r, "circumradius")->check(CLI::PositiveNumber);
        sub->add_option("--levels", levels_arg, "refinement levels a:b (or L for 3:L)");
        sub->add_option("--tol", tol, "inverse-iteration residual tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--threads", threads, "worker threads (0 = available parallelism)");
        sub->add_option("--manifest-dir", manifest_dir, "where the manifest goes when no output file is given");
    };

    auto *eig = app.add_subcommand("eig", "eigenvalue convergence series of a polygon or the mixed triangle");
    std::string shape = "polygon", alpha_arg = "pi/4", eig_out;
    int n = 4;
    eig->add_option("--shape", shape, "polygon or triangle")->check(CLI::IsMember({"polygon", "triangle"}));
    eig->add_option("--n", n, "number of polygon sides")->check(CLI::Range(3, 1 << 20));
    eig->add_option("--alpha", alpha_arg, "triangle angle (number, pi/K or X*pi/K)");
    eig->add_option("--out", eig_out, "write the series as CSV");
    common(eig);

    auto *reduce = app.add_subcommand("reduce", "polygon versus reduced triangle eigenvalue");
    reduce->add_option("--n", n, "number of polygon sides")->required()->check(CLI::Range(3, 1 << 20));
    common(reduce);

    auto *dissect = app.add_subcommand("dissect", "dissection of P_N into a subset of P_{N+1}");
    std::string pieces_out = "pieces.txt", mesh_out;
    bool no_sandwich = false;
    double delta_scale = 1.0;
    dissect->add_option("--n", n, "number of polygon sides")->required()->check(CLI::Range(3, 1 << 20));
    dissect->add_option("--out", pieces_out, "piece dump");
    dissect->add_option("--mesh-out", mesh_out, "mesh of D at the finest level");
    dissect->add_option("--delta-scale", delta_scale, "multiply the cut angle (negative control)")->check(CLI::PositiveNumber);
    dissect->add_flag("--no-sandwich", no_sandwich, "skip the eigenvalue comparison");
    common(dissect);

    auto *deriv = app.add_subcommand("derivative", "shape derivative in the triangle angle");
    std::string grid_arg = "pi/16:pi/3:pi/48", deriv_csv = "derivative.csv", fd_levels_arg;
    int samples = 256;
    deriv->add_option("--alpha-grid", grid_arg, "a:b:step (angles as number, pi/K or X*pi/K)");
    deriv->add_option("--fd-levels", fd_levels_arg, "levels for the finite-difference solves (default: --levels)");
    deriv->add_option("--samples", samples, "hypotenuse trace samples")->check(CLI::Range(64, 1 << 20));
    deriv->add_option("--csv", deriv_csv, "output CSV");
    common(deriv);

    auto *verify = app.add_subcommand("verify", "inequality suite over a range of N");
    int n_min = 3, n_max = 12;
    std::string csv_out = "suite.csv", md_out;
    verify->add_option("--n-min", n_min)->check(CLI::Range(3, 1 << 20));
    verify->add_option("--n-max", n_max)->check(CLI::Range(4, 1 << 20));
    verify->add_option("--csv", csv_out, "suite CSV");
    verify->add_option("--report", md_out, "Markdown report (default: CSV path with .md)");
    common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::string> args(argv, argv + argc);
    Run run;
    int code = exit_ok;
    std::cout << std::setprecision(12);
    try {
        const auto levels = parse_levels(levels_arg);
        ps::SolverOptions opt;
        opt.tol = tol;
        opt.threads = ps::resolve_threads(threads);
        run.config = {{"r", r}, {"levels", levels_text(levels)}, {"tol", tol}, {"threads", opt.threads}};

        if (eig->parsed()) {
            run.subcommand = "eig";
            run.config["shape"] = shape;
            ps::ConvergenceSeries s;
            if (shape == "polygon") {
                run.config["n"] = n;
                s = ps::solve_polygon(ps::RegularPolygonSpec{n, r}, levels, opt);
            } else {
                const double a = parse_angle(alpha_arg);
                run.config["alpha"] = a;
                s = ps::solve_triangle({a, r}, levels, opt);
            }
            print_series(std::cout, s);
            run.results = series_json(s);
            if (!eig_out.empty()) {
                auto f = open_output(eig_out);
                f << "level,h_max,eigenvalue,residual,iterations\n";
                for (const auto &l : s.levels) f << l.level << ',' << l.h_max << ',' << l.eigenvalue << ',' << l.residual << ',' << l.iterations << '\n';
                f << "extrapolated," << s.extrapolated << ",error_estimate," << s.error_estimate << '\n';
                run.outputs.push_back(eig_out);
            }
        } else if (reduce->parsed()) {
            run.subcommand = "reduce";
            run.config["n"] = n;
            const auto rep = ps::verify_reduction(n, r, levels, opt);
            std::cout << "polygon  lambda = " << rep.lambda_polygon.extrapolated << " +- " << rep.lambda_polygon.error_estimate << '\n'
                      << "triangle mu     = " << rep.mu_triangle.extrapolated << " +- " << rep.mu_triangle.error_estimate << '\n'
                      << "relative gap    = " << rep.relative_gap << (rep.certified ? "  certified" : "  NOT certified") << '\n';
            run.results = {{"polygon", series_json(rep.lambda_polygon)}, {"triangle", series_json(rep.mu_triangle)},
                           {"relative_gap", rep.relative_gap}, {"certified", rep.certified}};
            if (!rep.certified) code = exit_uncertified;
        } else if (dissect->parsed()) {
            run.subcommand = "dissect";
            run.config.update({{"n", n}, {"delta_scale", delta_scale}, {"sandwich", !no_sandwich}});
            const auto d = ps::build_dissection(n, r, delta_scale);
            const auto &c = d.certificates;
            {
                auto f = open_output(pieces_out);
                ps::write_dissection(f, d);
                run.outputs.push_back(pieces_out);
            }
            if (!mesh_out.empty()) {
                auto f = open_output(mesh_out);
                ps::write_mesh(f, ps::mesh_polygon(d.assembled, ps::Vec2::Zero(), levels.last));
                run.outputs.push_back(mesh_out);
            }
            std::cout << "delta                 " << d.delta << (d.first_order_failed ? "  (reversed triangle order)" : "") << '\n'
                      << "area match            " << c.area_match << '\n'
                      << "disjoint interiors    " << (c.disjointness ? "yes" : "no") << '\n'
                      << "containment margin    " << c.containment_margin << '\n'
                      << "vertex contacts       " << c.vertex_contacts << ", clearance elsewhere " << c.clearance_off_contacts << '\n'
                      << "area(P_N+1) - area(D) " << c.strict_area_gap << '\n'
                      << "cut matching          " << c.cut_matching << '\n';
            for (const auto &msg : c.failures) std::cout << "FAILED: " << msg << '\n';
            run.results = {{"area_match", c.area_match},   {"disjointness", c.disjointness},         {"containment_margin", c.containment_margin},
                           {"cut_matching", c.cut_matching}, {"strict_area_gap", c.strict_area_gap}, {"vertex_contacts", c.vertex_contacts},
                           {"failures", c.failures},        {"first_order_failed", d.first_order_failed}};
            bool ok = c.all_pass();
            if (ok && !no_sandwich) {
                const auto s = ps::eigen_sandwich(d, levels, opt);
                std::cout << "lambda(P_N+1) " << s.lambda_next.extrapolated << " +- " << s.lambda_next.error_estimate << '\n'
                          << "lambda(D)     " << s.lambda_d.extrapolated << " +- " << s.lambda_d.error_estimate << '\n'
                          << "lambda(P_N)   " << s.lambda_n.extrapolated << " +- " << s.lambda_n.error_estimate << '\n'
                          << "sandwich      " << (s.certified() ? "certified" : "NOT certified") << '\n';
                run.results["sandwich"] = {{"lambda_next", series_json(s.lambda_next)}, {"lambda_d", series_json(s.lambda_d)},
                                           {"lambda_n", series_json(s.lambda_n)},       {"certified", s.certified()}};
                ok = s.certified();
            }
            if (!ok) code = exit_uncertified;
        } else if (deriv->parsed()) {
            run.subcommand = "derivative";
            const auto grid = parse_alpha_grid(grid_arg);
            ps::DerivativeOptions dopt;
            dopt.levels = levels;
            if (!fd_levels_arg.empty()) dopt.fd_levels = parse_levels(fd_levels_arg);
            dopt.samples = samples;
            dopt.solver = opt;
            dopt.solver.threads = 1;
            run.config.update({{"alpha_grid", grid}, {"samples", samples}, {"fd_levels", levels_text(dopt.fd_levels.value_or(levels))}});
            const auto reports = ps::parallel_map<ps::DerivativeReport>(grid.size(), opt.threads, [&](std::size_t i) { return ps::shape_derivative(grid[i], r, dopt); });
            auto f = open_output(deriv_csv);
            f << std::setprecision(12) << "alpha,mu,dmu_formula,dmu_fd,lower_bound_stmt,discrepancy\n";
            bool ok = true;
            for (const auto &rep : reports) {
                f << rep.alpha << ',' << rep.mu << ',' << rep.dmu_formula << ',' << rep.dmu_fd << ',' << rep.lower_bound_stmt << ','
                  << rep.relative_discrepancy << '\n';
                const bool row_ok = rep.lower_bound_ok && rep.dmu_formula > 0.0 && rep.dmu_fd > 0.0;
                std::cout << "alpha " << rep.alpha << "  dmu formula " << rep.dmu_formula << "  fd " << rep.dmu_fd << "  bound " << rep.lower_bound_stmt
                          << "  discrepancy " << rep.relative_discrepancy << (row_ok ? "" : "  FAILED") << '\n';
                if (rep.fit_residual > 1e-2) std::cerr << "warning: trace fit residual " << rep.fit_residual << " at alpha " << rep.alpha << '\n';
                ok = ok && row_ok;
            }
            run.outputs.push_back(deriv_csv);
            run.results["all_bounds_hold"] = ok;
            if (!ok) code = exit_uncertified;
        } else if (verify->parsed()) {
            run.subcommand = "verify";
            if (n_max <= n_min) throw std::invalid_argument("--n-max must exceed --n-min");
            if (md_out.empty()) md_out = (csv_out.size() > 4 && csv_out.ends_with(".csv") ? csv_out.substr(0, csv_out.size() - 4) : csv_out) + ".md";
            run.config.update({{"n_min", n_min}, {"n_max", n_max}});
            const auto s = ps::run_suite(n_min, n_max, levels, tol, opt.threads);
            {
                auto f = open_output(csv_out);
                ps::write_suite_csv(f, s);
            }
            {
                auto f = open_output(md_out);
                ps::write_suite_markdown(f, s);
            }
            run.outputs = {csv_out, md_out};
            std::cout << s.summary.rows << " rows, " << s.summary.missing << " missing, theorems "
                      << (s.summary.theorems_certified ? "certified" : "NOT certified") << '\n';
            run.results = {{"rows", s.summary.rows}, {"missing", s.summary.missing}, {"theorems_certified", s.summary.theorems_certified},
                           {"af1_holds", s.summary.af1_holds}, {"af2_holds", s.summary.af2_holds}};
            if (!s.summary.theorems_certified) code = exit_uncertified;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        code = exit_usage;
    }

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        write_manifest(run, args, seconds, code, manifest_dir + "/" + (run.subcommand.empty() ? std::string("polyspec") : run.subcommand));
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return code;
}
