// hslab: numerical laboratory for the Hardy-Sobolev inequality and the
// stability of its extremal bubbles. JSON goes to stdout; scans write CSV
// through --out. Exit codes: 0 success, 2 validation error, 3 accuracy error.

#include "hslab/bubble.hpp"
#include "hslab/errors.hpp"
#include "hslab/experiments.hpp"
#include "hslab/functionals.hpp"
#include "hslab/interaction.hpp"
#include "hslab/manifold.hpp"
#include "hslab/parallel.hpp"
#include "hslab/serialize.hpp"
#include "hslab/spectral.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;

struct CommonOpts {
    int N = 3;
    double gamma = 0.1;
    double s = 0.5;
    bool reference_mode = false;
    int threads = 0;
    unsigned seed = 12345;
    std::string out;
    double tol = 0.0;      // quadrature relative tolerance override
    double t_window = 0.0; // extra half-width for automatically sized windows
    int grid_n = 0;        // eigensolver base grid override
};

void add_common(CLI::App* cmd, CommonOpts& o, bool math = true) {
    if (math) {
        cmd->add_option("--N", o.N, "dimension (>= 3)")->required();
        cmd->add_option("--gamma", o.gamma, "Hardy coefficient")->required();
        cmd->add_option("--s", o.s, "weight exponent in (0, 2)")->required();
        cmd->add_flag("--reference-mode", o.reference_mode,
                      "admit the classical boundary cases gamma=0 / s=0");
        cmd->add_option("--tol", o.tol, "quadrature relative tolerance (default 1e-10)");
        cmd->add_option("--t-window", o.t_window,
                        "widen automatically sized log-radius windows by this much");
    }
    cmd->add_option("--threads", o.threads, "worker cap (default: HSLAB_THREADS or all)");
    cmd->add_option("--seed", o.seed, "seed for randomized scans");
    cmd->add_option("--out", o.out,
                    "write CSV/JSON to this path ('auto' names it <command>_<N>_<gamma>_<s>)");
}

hslab::ProblemParams params_of(const CommonOpts& o) {
    hslab::ProblemParams p{o.N, o.gamma, o.s, o.reference_mode};
    p.validate();
    return p;
}

void apply_threads(const CommonOpts& o) {
    int k = o.threads;
    if (k == 0) {
        if (const char* env = std::getenv("HSLAB_THREADS")) k = std::atoi(env);
    }
    if (k > 0) hslab::parallel::set_max_threads(k);
    if (o.tol > 0.0) hslab::quadrature_defaults().rel_tol = o.tol;
    if (o.t_window > 0.0) hslab::quadrature_defaults().extra_half_width = o.t_window;
}

std::string resolve_out(const CommonOpts& o, const std::string& command, const char* ext) {
    if (o.out != "auto") return o.out;
    std::ostringstream os;
    os << command << "_" << o.N << "_" << o.gamma << "_" << o.s << ext;
    return os.str();
}

std::string config_comment(const std::string& command, const CommonOpts& o,
                           const std::string& extra = "") {
    std::ostringstream os;
    os << "hslab " << command << " N=" << o.N << " gamma=" << o.gamma << " s=" << o.s
       << " reference_mode=" << (o.reference_mode ? 1 : 0) << " seed=" << o.seed
       << " threads=" << o.threads;
    if (!extra.empty()) os << " " << extra;
    return os.str();
}

void emit(const json& j, const std::string& out_path) {
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw std::domain_error("cannot open '" + out_path + "' for writing");
        f << j.dump(2) << "\n";
    }
    std::cout << j.dump(2) << "\n";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::domain_error("cannot open '" + path + "' for writing");
    f << text;
}

hslab::RadialFunction load_input(const std::string& path, const hslab::ProblemParams& p,
                                 double lambda, double coeff, bool el_norm, double perturb,
                                 unsigned seed) {
    using namespace hslab;
    if (!path.empty()) return read_radial_csv_file(path);
    Bubble b{p, lambda, coeff,
             el_norm ? Normalization::euler_lagrange : Normalization::unit_gamma_norm};
    RadialFunction u = bubble_profile(b);
    if (perturb != 0.0) {
        RadialFunction v = random_orthogonal_perturbation(p, b.normalization, seed);
        const auto hints = u.decay_hints();
        u = RadialFunction::linear_combination(1.0, u, perturb, v);
        u.set_decay_hints(hints);
    }
    return u;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hslab: Hardy-Sobolev stability laboratory"};
    app.require_subcommand(1);

    CommonOpts o;

    // constant
    auto* c_const = app.add_subcommand("constant", "best constant mu and the EL constant C");
    add_common(c_const, o);

    // deficit
    auto* c_def = app.add_subcommand("deficit", "deficit report for a bubble or a CSV profile");
    std::string in_path;
    double lambda = 1.0, coeff = 1.0, perturb = 0.0;
    bool el_norm = false, bubble_flag = false;
    add_common(c_def, o);
    c_def->add_option("--input", in_path, "radial CSV profile");
    c_def->add_flag("--bubble", bubble_flag, "use a synthetic bubble input");
    c_def->add_option("--lambda", lambda, "bubble scale");
    c_def->add_option("--coeff", coeff, "bubble coefficient");
    c_def->add_flag("--el-norm", el_norm, "Euler-Lagrange normalization (default unit norm)");
    c_def->add_option("--perturb", perturb, "add this multiple of a seeded orthogonal bump");

    // distance
    auto* c_dist = app.add_subcommand("distance", "projection onto the bubble manifold");
    add_common(c_dist, o);
    c_dist->add_option("--input", in_path, "radial CSV profile");
    c_dist->add_flag("--bubble", bubble_flag, "use a synthetic bubble input");
    c_dist->add_option("--lambda", lambda, "bubble scale");
    c_dist->add_option("--coeff", coeff, "bubble coefficient");
    c_dist->add_flag("--el-norm", el_norm, "Euler-Lagrange normalization");
    c_dist->add_option("--perturb", perturb, "add this multiple of a seeded orthogonal bump");

    // spectrum
    auto* c_spec = app.add_subcommand("spectrum", "linearized-operator spectrum report");
    bool spec_el = false;
    int spec_grid_n = 0;
    double spec_t_half = 0.0;
    add_common(c_spec, o);
    c_spec->add_flag("--el-norm", spec_el, "report in the Euler-Lagrange normalization");
    c_spec->add_option("--grid-n", spec_grid_n, "eigensolver base grid size (>= 512)");
    c_spec->add_option("--t-half", spec_t_half, "eigensolver log-radius half window");

    // alpha-table
    auto* c_alpha = app.add_subcommand("alpha-table", "spectrum table over a parameter grid");
    std::vector<int> alpha_N{3, 4, 6};
    std::vector<double> alpha_gamma_rel{0.1, 0.5, 0.9};
    std::vector<double> alpha_s{0.5, 1.0, 1.5};
    add_common(c_alpha, o, false);
    c_alpha->add_option("--N-list", alpha_N, "dimensions");
    c_alpha->add_option("--gamma-rel-list", alpha_gamma_rel, "gamma as fractions of gamma_H");
    c_alpha->add_option("--s-list", alpha_s, "s values");

    // interaction-scan
    auto* c_int = app.add_subcommand("interaction-scan", "two-bubble interaction asymptotics");
    double theta = -1.0, eta = -1.0, lam_min = 1e-5, lam_max = 1e-2;
    int n_points = 24;
    add_common(c_int, o);
    c_int->add_option("--theta", theta, "first exponent (default 2*(s)-1)");
    c_int->add_option("--eta", eta, "second exponent (default 1)");
    c_int->add_option("--lambda-min", lam_min, "smallest scale");
    c_int->add_option("--lambda-max", lam_max, "largest scale");
    c_int->add_option("--points", n_points, "grid size (>= 8)");

    // stability-scan
    auto* c_stab = app.add_subcommand("stability-scan", "Bianchi-Egnell deficit/distance scan");
    std::string kind_str = "third_eigenfunction";
    std::vector<double> d_grid{0.04, 0.02, 0.01};
    add_common(c_stab, o);
    c_stab->add_option("--kind", kind_str,
                       "third_eigenfunction | random_orthogonal | manifold_tangent");
    c_stab->add_option("--d-grid", d_grid, "perturbation amplitudes in (0, 0.05]");

    // cfm-scan
    auto* c_cfm = app.add_subcommand("cfm-scan", "one-bubble quantitative stability scan");
    int family_size = 5;
    std::vector<double> cfm_d{0.04, 0.02, 0.01, 0.005};
    add_common(c_cfm, o);
    c_cfm->add_option("--family-size", family_size, "number of orthogonal perturbations");
    c_cfm->add_option("--d-grid", cfm_d, "perturbation amplitudes in (0, 0.05]");

    // fit-bubbles
    auto* c_fit = app.add_subcommand("fit-bubbles", "greedy multi-bubble fit");
    int nu = 2;
    std::vector<double> synth_lams{1.0, 1e-3};
    add_common(c_fit, o);
    c_fit->add_option("--input", in_path, "radial CSV profile");
    c_fit->add_option("--nu", nu, "number of bubbles to fit (1..4)");
    c_fit->add_option("--synthetic", synth_lams, "build the input as a sum of unit bubbles");
    c_fit->add_flag("--el-norm", el_norm, "Euler-Lagrange normalization for synthetic input");

    // export-bubble
    auto* c_exp = app.add_subcommand("export-bubble", "write a bubble profile as radial CSV");
    double rmin = 1e-5, rmax = 1e5;
    int grid_n = 2048;
    add_common(c_exp, o);
    c_exp->add_option("--lambda", lambda, "bubble scale");
    c_exp->add_option("--coeff", coeff, "bubble coefficient");
    c_exp->add_flag("--el-norm", el_norm, "Euler-Lagrange normalization");
    c_exp->add_option("--r-min", rmin, "grid start");
    c_exp->add_option("--r-max", rmax, "grid end");
    c_exp->add_option("--grid-n", grid_n, "grid size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the usage message
        return 2;
    }

    try {
        apply_threads(o);
        using namespace hslab;

        if (c_const->parsed()) {
            ProblemParams p = params_of(o);
            json j{{"params", p},
                   {"mu", best_constant(p)},
                   {"C_el", el_normalization_constant(p)},
                   {"gamma_H", p.gamma_hardy()}};
            emit(j, resolve_out(o, "constant", ".json"));
        } else if (c_def->parsed()) {
            ProblemParams p = params_of(o);
            RadialFunction u = load_input(in_path, p, lambda, coeff, el_norm, perturb, o.seed);
            json j = deficit(u, p);
            emit(j, resolve_out(o, "deficit", ".json"));
        } else if (c_dist->parsed()) {
            ProblemParams p = params_of(o);
            RadialFunction u = load_input(in_path, p, lambda, coeff, el_norm, perturb, o.seed);
            json j = project(u, p);
            emit(j, resolve_out(o, "distance", ".json"));
        } else if (c_spec->parsed()) {
            ProblemParams p = params_of(o);
            SpectrumReport rep = spectrum_report(
                p, spec_el ? Normalization::euler_lagrange : Normalization::unit_gamma_norm,
                spec_grid_n, spec_t_half);
            json j = rep;
            emit(j, resolve_out(o, "spectrum", ".json"));
        } else if (c_alpha->parsed()) {
            std::vector<ProblemParams> grid;
            for (int N : alpha_N)
                for (double gr : alpha_gamma_rel)
                    for (double s : alpha_s) {
                        ProblemParams p{N, gr * 0.25 * (N - 2.0) * (N - 2.0), s, false};
                        grid.push_back(p);
                    }
            auto rows = alpha_table(grid);
            const std::string csv = alpha_csv(rows, config_comment("alpha-table", o));
            if (!o.out.empty()) write_text(o.out, csv);
            json j = json::array();
            for (const auto& r : rows)
                j.push_back({{"params", r.params},
                             {"eta1", r.eta1},
                             {"eta2", r.eta2},
                             {"eta3", r.eta3},
                             {"alpha", r.alpha},
                             {"Lambda", r.Lambda},
                             {"kernel_dim", r.kernel_dim},
                             {"eta2_over_eta1", r.eta2_over_eta1},
                             {"ok", r.ok}});
            std::cout << j.dump(2) << "\n";
        } else if (c_int->parsed()) {
            ProblemParams p = params_of(o);
            const DerivedConstants d = derive(p);
            if (theta < 0.0 && eta < 0.0) {
                theta = d.two_star_s - 1.0;
                eta = 1.0;
            } else if (eta < 0.0) {
                eta = d.two_star_s - theta;
            } else if (theta < 0.0) {
                theta = d.two_star_s - eta;
            }
            InteractionScan scan = scan_and_fit(p, theta, eta, lam_min, lam_max, n_points);
            std::ostringstream extra;
            extra << "theta=" << theta << " eta=" << eta << " lambda_min=" << lam_min
                  << " lambda_max=" << lam_max << " points=" << n_points;
            const std::string out = resolve_out(o, "interaction-scan", ".csv");
            if (!out.empty())
                write_text(out, scan_csv(scan, config_comment("interaction-scan", o, extra.str())));
            json j = scan;
            std::cout << j.dump(2) << "\n";
        } else if (c_stab->parsed()) {
            ProblemParams p = params_of(o);
            PerturbationKind kind;
            if (kind_str == "third_eigenfunction")
                kind = PerturbationKind::third_eigenfunction;
            else if (kind_str == "random_orthogonal")
                kind = PerturbationKind::random_orthogonal;
            else if (kind_str == "manifold_tangent")
                kind = PerturbationKind::manifold_tangent;
            else
                throw std::domain_error("stability-scan: unknown --kind '" + kind_str + "'");
            StabilityScan scan = bianchi_egnell_scan(p, kind, d_grid, o.seed);
            const std::string out = resolve_out(o, "stability-scan", ".csv");
            if (!out.empty())
                write_text(out, stability_csv(scan, config_comment("stability-scan", o,
                                                                   "kind=" + kind_str)));
            json j = scan;
            std::cout << j.dump(2) << "\n";
        } else if (c_cfm->parsed()) {
            ProblemParams p = params_of(o);
            StabilityScan scan = cfm_scan(p, family_size, cfm_d, o.seed);
            const std::string out = resolve_out(o, "cfm-scan", ".csv");
            if (!out.empty())
                write_text(out, stability_csv(scan, config_comment("cfm-scan", o)));
            json j = scan;
            std::cout << j.dump(2) << "\n";
        } else if (c_fit->parsed()) {
            ProblemParams p = params_of(o);
            RadialFunction u;
            if (!in_path.empty()) {
                u = read_radial_csv_file(in_path);
            } else {
                const Normalization nn =
                    el_norm ? Normalization::euler_lagrange : Normalization::unit_gamma_norm;
                u = bubble_profile(Bubble{p, synth_lams.at(0), 1.0, nn});
                for (std::size_t i = 1; i < synth_lams.size(); ++i) {
                    RadialFunction v = bubble_profile(Bubble{p, synth_lams[i], 1.0, nn});
                    u = RadialFunction::linear_combination(1.0, u, 1.0, v);
                }
                const DerivedConstants d = derive(p);
                u.set_decay_hints(DecayHints{-d.beta_minus, -d.beta_plus});
            }
            MultiBubbleFit fit = greedy_multibubble_fit(u, p, nu);
            json bubbles = json::array();
            for (const auto& mp : fit.bubbles)
                bubbles.push_back({{"c", mp.bubble.coeff}, {"lambda", mp.bubble.lambda}});
            json j{{"params", p}, {"bubbles", bubbles}, {"residual_norm", fit.residual_norm}};
            emit(j, resolve_out(o, "fit-bubbles", ".json"));
        } else if (c_exp->parsed()) {
            ProblemParams p = params_of(o);
            const std::string out = resolve_out(o, "export-bubble", ".csv");
            if (out.empty()) throw std::domain_error("export-bubble: --out is required");
            Bubble b{p, lambda, coeff,
                     el_norm ? Normalization::euler_lagrange : Normalization::unit_gamma_norm};
            write_bubble_csv_file(out, b, log_grid(rmin, rmax, grid_n));
            json j{{"written", out}};
            std::cout << j.dump(2) << "\n";
        }
    } catch (const hslab::accuracy_error& e) {
        std::cerr << "accuracy error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
