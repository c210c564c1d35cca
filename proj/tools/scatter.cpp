#include "scatter/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>

using namespace scatter;

namespace {

// 2 for bad input, 1 for everything else that stops a computation
int exit_code(const Error& e) { return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::IoError ? 2 : 1; }

struct Output {
    std::string path;
    std::unique_ptr<std::ofstream> file;
    std::ostream& stream()
    {
        if (path.empty() || path == "-") return std::cout;
        if (!file) file = std::make_unique<std::ofstream>(open_output(path));
        return *file;
    }
};

void grid_options(CLI::App* app, GridParams& g)
{
    app->add_option("--kmax", g.kmax, "momentum cutoff")->capture_default_str();
    app->add_option("--nk", g.nk, "momentum nodes on (-kmax, kmax)")->capture_default_str();
    app->add_option("--dx", g.dx, "spatial step")->capture_default_str();
    app->add_option("--xmax", g.xmax, "spatial window")->capture_default_str();
}

HalfLineModel load_model(const std::string& pot, const std::string& bc, const GridParams& g)
{
    auto V = read_potential(pot);
    auto bp = read_boundary(bc);
    if (V.n != bp.n()) throw Error(ErrorCode::ConfigError, "potential has n = " + std::to_string(V.n) + " but the boundary has n = " + std::to_string(bp.n()));
    SmatrixOptions so;
    so.check_plateau = false;
    return build_model(V, bp, g, so);
}

int sign_of(const std::string& s)
{
    if (s == "+" || s == "+1" || s == "plus") return +1;
    if (s == "-" || s == "-1" || s == "minus") return -1;
    throw Error(ErrorCode::ConfigError, "sign must be + or -");
}

void warn_bound_states(const PotentialSpec& V, const BoundaryPair& bp, const Field& y)
{
    auto dh = discrete_hamiltonian(V, bp, y.dx, y.m);
    auto ev = bound_states(dh);
    if (!ev.empty()) {
        std::cerr << "warning: " << ev.size() << " bound state(s) below 0 (lowest " << ev.front()
                  << "); the spectral route keeps only the absolutely continuous part\n";
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stationary scattering and wave operators for matrix Schroedinger operators on the half line"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    GridParams g;
    Output out;
    std::string pot, bc, input, form = "stationary", sign = "+", file;
    bool line_potential = false;
    int stride = 1;
    double t = 1.0, p = 1.0;
    int steps = 0, scales = 7;
    std::string method = "spectral";
    std::function<int()> action;

    auto with_output = [&](CLI::App* c) { c->add_option("-o,--output", out.path, "output file (default stdout)"); };

    // potential
    auto* potc = app.add_subcommand("potential", "inspect a potential file");
    potc->require_subcommand(1);
    auto* pval = potc->add_subcommand("validate", "check Hermiticity and cells, print norms");
    pval->add_option("file", pot)->required();
    pval->add_flag("--line", line_potential, "cells may sit on negative x");
    pval->callback([&] {
        action = [&] {
            auto V = read_potential(pot, !line_potential);
            auto d = validate_potential(V, !line_potential);
            std::cout << "n: " << V.n << "\ncells: " << V.cells.size() << "\nsupport: [" << V.support_left() << ", "
                      << V.support_bound() << ")\nhermiticity_defect: " << d.hermiticity_defect << "\nl1: " << d.l1
                      << "\nl1_1: " << d.l1_1 << "\n";
            return 0;
        };
    });
    auto* pmom = potc->add_subcommand("moments", "sigma(x) = int_x^inf |V| and sigma1(x) = int_x^inf y |V|");
    pmom->add_option("file", pot)->required();
    pmom->add_option("--xmax", g.xmax)->capture_default_str();
    pmom->add_option("--dx", g.dx)->capture_default_str();
    with_output(pmom);
    pmom->callback([&] {
        action = [&] {
            auto V = read_potential(pot);
            std::vector<double> xs;
            int cnt = int(std::lround(g.xmax / g.dx));
            for (int j = 0; j <= cnt; ++j) xs.push_back(j * g.dx);
            auto m = moments(V, xs);
            auto& os = out.stream();
            os << "x,sigma,sigma1\n";
            for (size_t j = 0; j < xs.size(); ++j)
                os << format_number(m.x[j]) << "," << format_number(m.sigma[j]) << "," << format_number(m.sigma1[j]) << "\n";
            return 0;
        };
    });

    // boundary
    auto* bcc = app.add_subcommand("bc", "inspect a boundary file");
    bcc->require_subcommand(1);
    auto* bval = bcc->add_subcommand("validate", "check the self-adjointness conditions");
    bval->add_option("file", bc)->required();
    bval->callback([&] {
        action = [&] {
            auto d = validate_boundary(read_boundary(bc));
            std::cout << "selfadjoint_defect: " << d.selfadjoint_defect << "\nmin_eig: " << d.min_eig << "\n";
            return 0;
        };
    });
    auto* bdiag = bcc->add_subcommand("diagonalize", "angles theta_j and their classification");
    bdiag->add_option("file", bc)->required();
    bdiag->callback([&] {
        action = [&] {
            auto df = diagonalize(read_boundary(bc));
            std::cout << "theta:";
            for (int j = 0; j < df.thetas.size(); ++j) std::cout << " " << format_number(df.thetas[j]);
            std::cout << "\ndirichlet: " << df.n_dirichlet << "\nneumann: " << df.n_neumann << "\nmixed: " << df.n_mixed
                      << "\ns_infinity_identity: " << (predicted_s_infinity_identity(df) ? "yes" : "no") << "\n";
            return 0;
        };
    });

    // stationary tables
    auto* jc = app.add_subcommand("jost", "Jost matrix J(k)");
    jc->add_option("potential", pot)->required();
    jc->add_option("bc", bc)->required();
    grid_options(jc, g);
    with_output(jc);
    jc->callback([&] {
        action = [&] {
            auto md = load_model(pot, bc, g);
            write_series_csv(out.stream(), "k", md.S.kgrid.values(), md.J.J, "J");
            return 0;
        };
    });

    auto* kc = app.add_subcommand("kernel", "Marchenko kernel K(x, y), y >= x");
    kc->add_option("potential", pot)->required();
    grid_options(kc, g);
    kc->add_option("--stride", stride, "keep every stride-th node in x and y")->capture_default_str();
    with_output(kc);
    kc->callback([&] {
        action = [&] {
            auto jt = solve_faddeev(read_potential(pot), KGrid(g.kmax, g.nk), g.dx);
            write_kernel_csv(out.stream(), marchenko_kernel(jt), stride);
            return 0;
        };
    });

    auto* sc = app.add_subcommand("smatrix", "scattering matrix S(k)");
    sc->add_option("potential", pot)->required();
    sc->add_option("bc", bc)->required();
    grid_options(sc, g);
    with_output(sc);
    sc->callback([&] {
        action = [&] {
            auto md = load_model(pot, bc, g);
            write_series_csv(out.stream(), "k", md.S.kgrid.values(), md.S.S, "S");
            return 0;
        };
    });

    auto* syc = app.add_subcommand("symbols", "F_s(y) and P+-(y) against S_inf");
    syc->add_option("potential", pot)->required();
    syc->add_option("bc", bc)->required();
    grid_options(syc, g);
    with_output(syc);
    syc->callback([&] {
        action = [&] {
            auto md = load_model(pot, bc, g);
            LineGrid yg{g.dx, int(std::lround(g.xmax / g.dx))};
            auto fs = fs_symbol(md.S, yg);
            auto ps = p_symbols(md.S, yg);
            std::vector<double> ys;
            for (int j = 0; j < yg.size(); ++j) ys.push_back(yg[j]);
            write_series_csv(out.stream(), "y", ys,
                             {{"Fs", &fs.values}, {"Pplus", &ps.plus.values}, {"Pminus", &ps.minus.values}});
            return 0;
        };
    });

    auto* ac = app.add_subcommand("asymptotics", "limits of S and the decay of S'");
    ac->add_option("potential", pot)->required();
    ac->add_option("bc", bc)->required();
    grid_options(ac, g);
    ac->callback([&] {
        action = [&] {
            auto md = load_model(pot, bc, g);
            s_limits(md.S, false);
            auto r = sdot_asymptotics(md.S);
            std::cout << "case: " << (md.S.exceptional ? "exceptional" : "generic")
                      << "\nj0_min_singular: " << md.S.j0_min_singular << "\nS0_minus_Sinf: " << opnorm(md.S.S0 - md.S.Sinf)
                      << "\nplateau_deviation: " << md.S.plateau_deviation;
            if (r.trivial) std::cout << "\nsdot: identically zero";
            else
                std::cout << "\nsdot_slope: " << r.slope << " on [" << r.fit_lo << ", " << r.fit_hi << "]"
                          << "\nsdot_max_below_0.5: " << r.low_max << "\nsdot_at_1: " << r.at_one;
            std::cout << "\nh1_norm: " << r.h1 << "\n";
            return 0;
        };
    });

    // time dependent and wave operators
    auto* ec = app.add_subcommand("evolve", "e^{-itH} applied to a field");
    ec->add_option("potential", pot)->required();
    ec->add_option("bc", bc)->required();
    ec->add_option("--t", t, "time")->capture_default_str();
    ec->add_option("--input", input, "field CSV on the half line")->required();
    ec->add_option("--method", method, "spectral or cn (Crank-Nicolson)")->capture_default_str();
    ec->add_option("--steps", steps, "Crank-Nicolson steps (default 2000 per unit time)");
    grid_options(ec, g);
    with_output(ec);
    ec->callback([&] {
        action = [&] {
            Field y = read_field_csv(input);
            if (y.domain != Domain::HalfLine) throw Error(ErrorCode::ConfigError, input + ": expected a half-line field");
            auto V = read_potential(pot);
            auto bp = read_boundary(bc);
            Field r;
            if (method == "cn") {
                int n = steps > 0 ? steps : std::max(1, int(std::ceil(2000 * std::abs(t))));
                r = evolve_cn(discrete_hamiltonian(V, bp, y.dx, y.m), y, t, n);
            } else if (method == "spectral") {
                warn_bound_states(V, bp, y);
                g.dx = y.dx;
                auto md = load_model(pot, bc, g);
                r = evolve_spectral(physical_solution(md.jost, md.S), y, t);
            } else {
                throw Error(ErrorCode::ConfigError, "method must be spectral or cn");
            }
            write_field_csv(out.stream(), r);
            return 0;
        };
    });

    auto* wc = app.add_subcommand("waveop", "W+- applied to a field");
    wc->add_option("potential", pot)->required();
    wc->add_option("bc", bc)->required();
    wc->add_option("--form", form, "stationary, thm31 or thm32")->capture_default_str();
    wc->add_option("--sign", sign, "+ or -")->capture_default_str();
    wc->add_option("--input", input, "field CSV on the half line")->required();
    grid_options(wc, g);
    with_output(wc);
    wc->callback([&] {
        action = [&] {
            Field y = read_field_csv(input);
            if (y.domain != Domain::HalfLine) throw Error(ErrorCode::ConfigError, input + ": expected a half-line field");
            auto f = parse_wave_form(form);
            int s = sign_of(sign);
            g.dx = y.dx;
            WaveOptions wo;
            wo.window = y.xmax();
            auto ctx = make_wave_context(load_model(pot, bc, g), wo);
            write_field_csv(out.stream(), wave_op(ctx, resize(y, ctx.m), s, f));
            return 0;
        };
    });

    auto* pc = app.add_subcommand("probe-lp", "L^p ratios of shrinking bumps pushed through W+");
    pc->add_option("potential", pot)->required();
    pc->add_option("bc", bc)->required();
    pc->add_option("--p", p)->capture_default_str();
    pc->add_option("--scales", scales)->capture_default_str();
    pc->add_option("--form", form, "stationary, thm31 or thm32")->capture_default_str();
    grid_options(pc, g);
    with_output(pc);
    pc->callback([&] {
        action = [&] {
            auto f = parse_wave_form(form);
            WaveOptions wo;
            wo.window = g.xmax;
            auto ctx = make_wave_context(load_model(pot, bc, g), wo);
            ProbeReport r;
            if (f == WaveForm::Stationary)
                r = lp_probe([&](const Field& y) { return wave_op(ctx, y, +1, f); }, ctx.dx, wo.window, p, scales);
            else
                r = lp_probe(f == WaveForm::Thm31 ? thm31_pipeline(ctx, +1) : thm32_pipeline(ctx, +1), ctx.dx, wo.window, p, scales);
            auto& os = out.stream();
            os << "scale,ratio,classification\n";
            for (const auto& row : r.rows)
                os << format_number(row.scale) << "," << format_number(row.ratio) << "," << r.classification << "\n";
            std::cerr << "growth " << r.growth << ", max/min " << r.spread << ": " << r.classification
                      << " (evidence from finitely many scales, not a proof)\n";
            return 0;
        };
    });

    // line problems
    auto* lc = app.add_subcommand("line", "line problems with a point interaction at 0");
    lc->require_subcommand(1);
    auto* ls = lc->add_subcommand("smatrix", "S_R(k) = [[Tl, R], [L, Tr]] through the fold");
    ls->add_option("file", file)->required();
    grid_options(ls, g);
    with_output(ls);
    ls->callback([&] {
        action = [&] {
            auto lp = read_line_problem(file);
            auto f = fold(lp);
            SmatrixOptions so;
            so.check_plateau = false;
            auto lt = line_smatrix_from_halfline(build_model(f.V, f.bp, g, so).S);
            write_series_csv(out.stream(), "k", lt.kgrid.values(), lt.SR, "SR");
            return 0;
        };
    });
    auto* lw = lc->add_subcommand("waveop", "W+-(H, H1) on a line field");
    lw->add_option("file", file)->required();
    lw->add_option("--form", form, "chained or thm59")->default_val("chained");
    lw->add_option("--sign", sign, "+ or -")->capture_default_str();
    lw->add_option("--input", input, "field CSV symmetric about 0")->required();
    grid_options(lw, g);
    with_output(lw);
    lw->callback([&] {
        action = [&] {
            auto lp = read_line_problem(file);
            auto f = parse_line_form(form);
            int s = sign_of(sign);
            Field y = read_field_csv(input);
            if (y.domain != Domain::Line || y.n() != lp.n)
                throw Error(ErrorCode::ConfigError, input + ": expected a line field with n = " + std::to_string(lp.n));
            g.dx = y.dx;
            WaveOptions wo;
            wo.window = y.xmax();
            auto ctx = make_line_context(lp, g, wo);
            Field yy = unfold_field(resize(fold_field(y), ctx.ctx.m));
            write_field_csv(out.stream(), line_wave_op(ctx, yy, s, f));
            return 0;
        };
    });
    std::string report_path;
    auto* lv = lc->add_subcommand("verify", "unitarity, oracle agreement and limit conditions");
    lv->add_option("file", file)->required();
    lv->add_option("--report", report_path, "CSV report path");
    grid_options(lv, g);
    lv->callback([&] {
        action = [&] {
            auto r = verify_line(read_line_problem(file), g);
            print_summary(std::cout, r);
            if (!report_path.empty()) {
                auto os = open_output(report_path);
                write_report_csv(os, r);
            }
            return r.pass() ? 0 : 1;
        };
    });

    // verify
    std::string scenario, config;
    std::vector<int> only;
    auto* vc = app.add_subcommand("verify", "run the acceptance suite, a builtin scenario or a config");
    vc->add_option("--scenario", scenario, "neumann-free, remark-3-3 or dirichlet-counterexample");
    vc->add_option("--config", config, "scenario config file");
    vc->add_option("--only", only, "criterion ids to run")->delimiter(',');
    vc->add_option("--report", report_path, "CSV report path (default report.csv in the output directory)");
    vc->callback([&] {
        action = [&] {
            if (!scenario.empty() && !config.empty()) throw Error(ErrorCode::ConfigError, "give --scenario or --config, not both");
            VerifyReport r;
            std::filesystem::path dir = ".";
            if (!config.empty()) {
                auto cfg = read_config(config);
                dir = cfg.output;
                r = verify_config(cfg);
            } else if (!scenario.empty()) {
                r = run_scenario(scenario);
            } else {
                r = run_acceptance(only);
            }
            print_summary(std::cout, r);
            auto path = report_path.empty() ? dir / "report.csv" : std::filesystem::path(report_path);
            auto os = open_output(path);
            write_report_csv(os, r);
            std::cout << (r.pass() ? "all checks pass" : "some checks fail") << "; report written to " << path.string() << "\n";
            return r.pass() ? 0 : 1;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        return action ? action() : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
