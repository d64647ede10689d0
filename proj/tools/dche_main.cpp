#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dche/connection.hpp"
#include "dche/global.hpp"
#include "dche/validation.hpp"

namespace {

using dche::complex;

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitNoRoot = 3;
constexpr int kExitUsage = 64;

complex parse_complex(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

std::string fmt_complex(const complex& z) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%+.17g %+.17g i", z.real(), z.imag());
    return buf;
}

nlohmann::json json_complex(const complex& z) { return {z.real(), z.imag()}; }

struct ParamInput {
    std::vector<std::string> dche, normal, jaffe_lay, radial;
    std::string energy;
    std::string json_file;

    dche::DcheParams resolve() const {
        int forms = 0;
        forms += !dche.empty();
        forms += !normal.empty();
        forms += !jaffe_lay.empty();
        forms += !radial.empty();
        forms += !json_file.empty();
        if (forms != 1)
            throw CLI::ValidationError(
                "exactly one of --dche/--normal/--jaffe-lay/--radial/--params is required");
        if (!dche.empty()) {
            dche::DcheParams p;
            for (int i = 0; i < 5; ++i)
                p.A[static_cast<std::size_t>(i)] =
                    parse_complex(dche[static_cast<std::size_t>(i)]);
            return dche::validate(p);
        }
        if (!normal.empty()) {
            dche::NormalFormParams b;
            for (int i = 0; i < 5; ++i)
                b.B[static_cast<std::size_t>(i)] =
                    parse_complex(normal[static_cast<std::size_t>(i)]);
            return dche::from_normal_form(b);
        }
        if (!jaffe_lay.empty()) {
            dche::JaffeLayParams j{parse_complex(jaffe_lay[0]), parse_complex(jaffe_lay[1]),
                                   parse_complex(jaffe_lay[2]), parse_complex(jaffe_lay[3])};
            return dche::from_jaffe_lay(j);
        }
        if (!radial.empty()) {
            dche::RadialProblem r;
            r.l = std::stoi(radial[0]);
            for (int i = 0; i < 4; ++i)
                r.v[static_cast<std::size_t>(i)] =
                    parse_complex(radial[static_cast<std::size_t>(i + 1)]);
            if (energy.empty()) throw CLI::ValidationError("--radial requires --energy");
            r.energy = parse_complex(energy);
            return dche::from_radial(r);
        }
        std::ifstream in(json_file);
        if (!in) throw CLI::ValidationError("cannot open " + json_file);
        std::stringstream ss;
        ss << in.rdbuf();
        return dche::validate(dche::params_from_json(ss.str()));
    }
};

dche::Tolerances profile_tolerances() {
    dche::Tolerances t;
    const char* profile = std::getenv("DCHE_TOL_PROFILE");
    if (!profile) return t;
    const std::string p = profile;
    if (p == "strict") {
        t.ode_rel = 1e-13;
        t.ode_abs = 1e-15;
        t.newton_tol = 1e-14;
        t.series_tail_tol = 1e-17;
        t.onray_angle_tol = 1e-13;
    } else if (p == "fast") {
        t.ode_rel = 1e-10;
        t.ode_abs = 1e-12;
        t.newton_tol = 1e-11;
        t.series_tail_tol = 1e-14;
        t.onray_angle_tol = 1e-10;
    } else if (p != "default") {
        throw CLI::ValidationError("DCHE_TOL_PROFILE must be default, strict or fast");
    }
    return t;
}

struct Output {
    std::string path;

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream out(path);
        if (!out) throw dche::Error("cannot open output file " + path);
        out << text;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"global solutions of the double confluent Heun equation\n"
                 "z^2 w'' + (A_-2 z^-2 + A_-1 z^-1 + A_0 + A_1 z + A_2 z^2) w = 0"};
    app.require_subcommand(1);

    ParamInput params;
    dche::Tolerances tol;
    try {
        tol = profile_tolerances();
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    double arg_z = 0.0;
    std::string format = "text";
    Output out;
    bool dump_coeffs = false;
    std::string nu1_hint_text;

    auto add_param_flags = [&](CLI::App* cmd) {
        cmd->add_option("--nu1-hint", nu1_hint_text,
                        "orient label 1 towards this index (re or re,im)");
        cmd->add_option("--dche", params.dche, "A_-2 A_-1 A_0 A_1 A_2 (complex as re or re,im)")
            ->expected(5);
        cmd->add_option("--normal", params.normal, "B_-2 B_-1 B_0 B_1 B_2 of the normal form")
            ->expected(5);
        cmd->add_option("--jaffe-lay", params.jaffe_lay,
                        "alpha beta gamma delta of the Jaffe-Lay form")
            ->expected(4);
        cmd->add_option("--radial", params.radial,
                        "l v_-2 v_-1 v_0 v_1 (potential strengths, A_0 net of l(l+1))")
            ->expected(5);
        cmd->add_option("--energy", params.energy, "A_2 value for --radial");
        cmd->add_option("--params", params.json_file, "JSON file {\"A\":[[re,im]x5]}");
        cmd->add_option("--arg-z", arg_z, "arg z in (-pi, pi] for the connection factors")
            ->check(CLI::Range(-dche::pi, dche::pi));
        cmd->add_option("--format", format, "text|json|csv")
            ->check(CLI::IsMember({"text", "json", "csv"}));
        cmd->add_option("--out", out.path, "output file (default stdout)");
        cmd->add_option("--tol-ode-rel", tol.ode_rel, "path integrator relative tolerance");
        cmd->add_option("--tol-ode-abs", tol.ode_abs, "path integrator absolute tolerance");
        cmd->add_option("--tol-newton", tol.newton_tol, "index iteration stop threshold");
        cmd->add_option("--tol-series-tail", tol.series_tail_tol, "series tail threshold");
        cmd->add_option("--tol-onray-angle", tol.onray_angle_tol,
                        "Stokes ray detection tolerance (radians)");
    };

    CLI::App* solve = app.add_subcommand("solve", "multiplicative (Floquet) solutions");
    add_param_flags(solve);
    solve->add_flag("--dump-coeffs", dump_coeffs, "include the Laurent coefficients");

    CLI::App* connect =
        app.add_subcommand("connect", "connection factors and the regular combination");
    add_param_flags(connect);
    std::vector<double> eval_points;
    connect->add_option("--eval", eval_points,
                        "positive abscissas for w_reg samples (csv format writes them)");

    CLI::App* bound = app.add_subcommand("bound-states", "scan A_2 for bound states");
    add_param_flags(bound);
    std::vector<double> scan;
    int grid = 32;
    bound->add_option("--scan", scan, "A_2 interval lo hi")->expected(2);
    bound->add_option("--grid", grid, "number of scan samples")->check(CLI::PositiveNumber);

    CLI::App* reproduce = app.add_subcommand("reproduce", "reproduce the reference tables");
    std::vector<std::string> table_ids = {"all"};
    std::string data_dir;
    reproduce->add_option("--tables", table_ids, "table ids (T2..T6) or 'all'");
    reproduce->add_option("--data-dir", data_dir, "directory holding tables/*.json");
    reproduce->add_option("--format", format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));
    reproduce->add_option("--out", out.path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        tol.check();

        std::optional<complex> nu1_hint;
        if (!nu1_hint_text.empty()) nu1_hint = parse_complex(nu1_hint_text);

        if (solve->parsed()) {
            const dche::DcheParams p = params.resolve();
            dche::SolvePairOptions opts;
            opts.nu1_hint = nu1_hint;
            const auto [w1, w2] = dche::solve_multiplicative_pair(p, tol, opts);
            if (format == "json") {
                nlohmann::json j;
                j["nu1"] = json_complex(w1.nu);
                j["nu2"] = json_complex(w2.nu);
                j["m_lo"] = w1.m_lo;
                j["n_hi"] = w1.n_hi;
                j["recurrence_residual"] = {w1.recurrence_residual, w2.recurrence_residual};
                if (dump_coeffs) {
                    j["w1"] = nlohmann::json::parse(dche::multiplicative_to_json(w1));
                    j["w2"] = nlohmann::json::parse(dche::multiplicative_to_json(w2));
                }
                out.write(j.dump(2) + "\n");
            } else {
                std::ostringstream os;
                os << "nu1 = " << fmt_complex(w1.nu) << "\n";
                os << "nu2 = " << fmt_complex(w2.nu) << "\n";
                os << "truncation: w1 n = -" << w1.m_lo << ".." << w1.n_hi << ", w2 n = -"
                   << w2.m_lo << ".." << w2.n_hi << "\n";
                char buf[128];
                std::snprintf(buf, sizeof(buf),
                              "recurrence residuals: %.3e, %.3e (relative to max |c|)\n",
                              w1.recurrence_residual / w1.max_abs_coeff(),
                              w2.recurrence_residual / w2.max_abs_coeff());
                os << buf;
                if (dump_coeffs) {
                    os << "w1 coefficients: " << dche::multiplicative_to_json(w1) << "\n";
                    os << "w2 coefficients: " << dche::multiplicative_to_json(w2) << "\n";
                }
                out.write(os.str());
            }
            return kExitOk;
        }

        if (connect->parsed()) {
            const dche::DcheParams p = params.resolve();
            const dche::GlobalSolution g =
                dche::solve_connection_problem(p, arg_z, tol, nu1_hint);
            const dche::RegularCombination rc = dche::regular_at_origin(g.table);
            if (format == "csv") {
                if (eval_points.empty())
                    throw CLI::ValidationError("csv format requires --eval points");
                const auto samples = dche::evaluate_global(rc, g.w1, g.w2, eval_points, tol);
                std::ostringstream os;
                dche::write_samples_csv(os, samples);
                out.write(os.str());
                return kExitOk;
            }
            if (format == "json") {
                nlohmann::json j =
                    nlohmann::json::parse(dche::connection_table_to_json(g.table));
                j["nu1"] = json_complex(g.w1.nu);
                j["nu2"] = json_complex(g.w2.nu);
                j["regular"] = {{"zeta1", json_complex(rc.zeta1)},
                                {"zeta2", json_complex(rc.zeta2)},
                                {"Treg3", json_complex(rc.t_reg3)},
                                {"Treg4", json_complex(rc.t_reg4)}};
                if (!eval_points.empty()) {
                    const auto samples = dche::evaluate_global(rc, g.w1, g.w2, eval_points, tol);
                    for (const auto& s : samples)
                        j["w_reg"].push_back(
                            {{"z", s.z}, {"w", json_complex(s.w)}, {"dw", json_complex(s.dw)}});
                }
                out.write(j.dump(2) + "\n");
            } else {
                std::ostringstream os;
                os << "nu1 = " << fmt_complex(g.w1.nu) << "\n";
                char buf[160];
                for (int jj = 1; jj <= 2; ++jj)
                    for (int tt = 3; tt <= 6; ++tt) {
                        const complex v = g.table.T(jj, tt);
                        const dche::WronskianResult& d = g.table.diagnostics(jj, tt);
                        std::snprintf(buf, sizeof(buf),
                                      "T%d,%d = %+.12e %+.12e i   (n=%d, spread=%.1e%s)\n", jj,
                                      tt, v.real(), v.imag(), d.n_used, d.consistency_err,
                                      d.onray ? ", on-ray" : "");
                        os << buf;
                    }
                os << "zeta1 = " << fmt_complex(rc.zeta1) << "\n";
                os << "zeta2 = " << fmt_complex(rc.zeta2) << "\n";
                os << "Treg,3 = " << fmt_complex(rc.t_reg3) << "\n";
                os << "Treg,4 = " << fmt_complex(rc.t_reg4) << "\n";
                if (!eval_points.empty()) {
                    const auto samples = dche::evaluate_global(rc, g.w1, g.w2, eval_points, tol);
                    std::ostringstream csv;
                    dche::write_samples_csv(csv, samples);
                    os << csv.str();
                }
                out.write(os.str());
            }
            return kExitOk;
        }

        if (bound->parsed()) {
            if (scan.size() != 2) throw CLI::ValidationError("--scan lo hi is required");
            const dche::DcheParams p = params.resolve();
            try {
                const auto roots = dche::bound_state_search(p, scan[0], scan[1], tol, grid);
                if (format == "json") {
                    nlohmann::json j = nlohmann::json::array();
                    for (const auto& r : roots)
                        j.push_back({{"A2", json_complex(r.a2)}, {"residual", r.residual}});
                    out.write(j.dump(2) + "\n");
                } else {
                    std::ostringstream os;
                    char buf[128];
                    for (const auto& r : roots) {
                        std::snprintf(buf, sizeof(buf),
                                      "A2 = %+.15g %+.3e i   |T4/T3| = %.3e\n", r.a2.real(),
                                      r.a2.imag(), r.residual);
                        os << buf;
                    }
                    out.write(os.str());
                }
            } catch (const dche::NoRootInInterval& e) {
                std::cerr << "no sign change: " << e.what() << "\n";
                return kExitNoRoot;
            }
            return kExitOk;
        }

        if (reproduce->parsed()) {
            std::vector<std::string> ids;
            for (const std::string& t : table_ids) {
                if (t == "all") {
                    ids = {"T2", "T3", "T4", "T5", "T6"};
                    break;
                }
                ids.push_back(t);
            }
            for (const std::string& id : ids)
                if (id != "T2" && id != "T3" && id != "T4" && id != "T5" && id != "T6") {
                    std::cerr << "unknown table id: " << id << "\n";
                    return kExitUsage;
                }
            const dche::validation::Report rep =
                dche::validation::reproduce_tables(ids, tol, data_dir);
            out.write(format == "json" ? rep.to_json() + "\n" : rep.text());
            return rep.all_pass() ? kExitOk : kExitNumeric;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const dche::DegenerateEquation& e) {
        std::cerr << "degenerate equation (A_2 A_-2 = 0): " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const dche::LogarithmicCase& e) {
        std::cerr << "logarithmic case: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const dche::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
