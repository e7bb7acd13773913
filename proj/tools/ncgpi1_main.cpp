#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "ncgpi1/center.hpp"
#include "ncgpi1/connection.hpp"
#include "ncgpi1/fuzz.hpp"
#include "ncgpi1/io.hpp"
#include "ncgpi1/pseudoinverse.hpp"
#include "ncgpi1/report.hpp"
#include "ncgpi1/torus.hpp"
#include "ncgpi1/transport.hpp"

namespace {

using ncg::Json;
using ncg::Report;
using ncg::ReportCheck;

constexpr int exit_ok = 0;
constexpr int exit_check_failure = 1;
constexpr int exit_invalid_input = 2;
constexpr int exit_divergence = 3;

struct Output {
    std::string format = "json";
    std::string out_path;
};

Json read_input(const std::string& path) {
    if (path == "-") {
        Json j;
        try {
            std::cin >> j;
        } catch (const std::exception& e) {
            throw ncg::InvalidInput(std::string("cannot parse stdin JSON: ") + e.what());
        }
        return j;
    }
    return ncg::load_json_file(path);
}

std::string dirname_of(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

int emit(const Report& rep, const Output& o, double wall_seconds) {
    std::string text =
        o.format == "text" ? rep.to_text(wall_seconds) : rep.to_json_string();
    if (o.out_path.empty()) std::cout << text;
    else ncg::write_text_file(o.out_path, text);
    return rep.all_pass() ? exit_ok : exit_check_failure;
}

ReportCheck from_item(const ncg::CheckItem& it) {
    ReportCheck c;
    c.name = it.name;
    c.pass = it.pass;
    c.details = Json{{"margin", it.margin}};
    if (!it.witness.empty()) c.details["witness"] = it.witness;
    return c;
}

Report cmd_check(const Json& input) {
    Report rep;
    rep.command = "check";
    ncg::AlgebraPtr A = ncg::algebra_from_json(input);
    ncg::CheckReport cr = ncg::check_dga_axioms(A);
    for (const auto& it : cr.items) rep.checks.push_back(from_item(it));
    rep.payload["basis_size"] = A->size();
    rep.payload["max_degree"] = A->max_degree();
    rep.payload["graded_commutative"] = ncg::is_graded_commutative(A);
    return rep;
}

Report cmd_center(const Json& input) {
    Report rep;
    rep.command = "center";
    ncg::AlgebraPtr A = ncg::algebra_from_json(input);
    ncg::CenterBasis cb = ncg::graded_center(A);
    const double tol = A->mode() == ncg::ScalarMode::numeric ? A->tolerance() : 0.0;

    Json dims = Json::array();
    for (int d : cb.dimensions()) dims.push_back(d);
    rep.payload["dimensions"] = std::move(dims);
    Json tested = Json::array();
    for (int k = 0; k <= A->max_degree(); ++k) {
        auto it = cb.tested_generator_degree.find(k);
        tested.push_back(it == cb.tested_generator_degree.end() ? -1 : it->second);
    }
    rep.payload["tested_generator_degree"] = std::move(tested);
    Json basis = Json::array();
    for (const auto& [deg, elems] : cb.by_degree) {
        for (const auto& e : elems) {
            Json el;
            el["degree"] = deg;
            el["terms"] = ncg::io::terms_to_json(A, e.coords());
            basis.push_back(std::move(el));
        }
    }
    rep.payload["basis"] = std::move(basis);

    // closure: d(center) and center*center stay inside the span
    bool d_closed = true, mul_closed = true;
    for (const auto& z : cb.all()) {
        try {
            if (!ncg::lies_in_center_span(cb, ncg::apply_d(z), tol)) d_closed = false;
        } catch (const ncg::OutOfWindow&) {
        }
        for (const auto& w : cb.all()) {
            try {
                if (!ncg::lies_in_center_span(cb, ncg::mul(z, w), tol)) mul_closed = false;
            } catch (const ncg::OutOfWindow&) {
            }
        }
    }
    rep.checks.push_back({"center_closed_under_d", d_closed, Json()});
    rep.checks.push_back({"center_closed_under_mul", mul_closed, Json()});
    return rep;
}

ncg::FgpConnection load_connection(const Json& j, const std::string& base_dir) {
    return ncg::connection_from_json(j, base_dir);
}

Report cmd_curvature(const Json& input, const std::string& base_dir, double tol_flag) {
    Report rep;
    rep.command = "curvature";
    ncg::FgpConnection c = load_connection(input, base_dir);
    double tol = tol_flag > 0 ? tol_flag
                              : (c.owner()->mode() == ncg::ScalarMode::numeric
                                     ? c.owner()->tolerance()
                                     : 0.0);
    ncg::CheckReport conn = ncg::check_connection(c);
    for (const auto& it : conn.items) rep.checks.push_back(from_item(it));
    ncg::CurvatureForm r = ncg::curvature(c);
    rep.checks.push_back(from_item(r.bilinearity));
    double closed = ncg::matrix_residual(r.entries - ncg::curvature_closed_form(c));
    rep.checks.push_back({"closed_form_crosscheck", closed <= std::max(tol, 1e-9),
                          Json{{"residual", closed}}});
    rep.payload["curvature"] = ncg::matrix_to_json(c.owner(), r.entries);
    rep.payload["flat"] = r.is_zero(tol);
    return rep;
}

Report cmd_flat(const Json& input, const std::string& base_dir, double tol_flag) {
    Report rep;
    rep.command = "flat";
    ncg::FgpConnection c = load_connection(input, base_dir);
    double tol = tol_flag > 0 ? tol_flag
                              : (c.owner()->mode() == ncg::ScalarMode::numeric
                                     ? c.owner()->tolerance()
                                     : 0.0);
    bool flat = ncg::is_flat(c, tol);
    rep.payload["flat"] = flat;
    rep.payload["tolerance"] = tol;
    rep.checks.push_back({"connection_laws", ncg::check_connection(c).all_pass(), Json()});
    return rep;
}

ncg::FgpConnection rebind_connection(const Json& j, const ncg::AlgebraPtr& A,
                                     const std::string& base_dir) {
    // reuse the already-loaded algebra so both connections share one owner
    Json algebra_json = j.at("algebra").is_string()
                            ? ncg::load_json_file([&] {
                                  std::string p = j["algebra"].get<std::string>();
                                  if (!p.empty() && p[0] != '/') p = base_dir + "/" + p;
                                  return p;
                              }())
                            : j["algebra"];
    if (algebra_json != ncg::algebra_to_json(A))
        throw ncg::InvalidInput("connections must be over the same algebra");
    ncg::ElementMatrix p =
        ncg::matrix_from_json(j.at("module").at("projection"), A, "connection projection");
    ncg::FgpModule m = ncg::FgpModule::from_projection(A, std::move(p));
    ncg::ElementMatrix kappa = ncg::matrix_from_json(j.at("kappa"), A, "connection kappa");
    return ncg::FgpConnection::make(std::move(m), std::move(kappa));
}

Report cmd_tensor(const Json& in1, const Json& in2, const std::string& d1,
                  const std::string& d2) {
    Report rep;
    rep.command = "tensor";
    ncg::FgpConnection c1 = load_connection(in1, d1);
    ncg::FgpConnection c2 = rebind_connection(in2, c1.owner(), d2);
    ncg::FgpConnection g = ncg::tensor_connection(c1, c2);
    rep.payload["connection"] = ncg::connection_to_json(g);
    if (c1.owner()->max_degree() >= 2) {
        ncg::CurvatureForm rg = ncg::curvature(g);
        ncg::ElementMatrix law =
            ncg::kron(ncg::curvature(c1).entries, c2.module.projection) +
            ncg::kron(c1.module.projection, ncg::curvature(c2).entries);
        double res = ncg::matrix_residual(rg.entries - law);
        double tol = c1.owner()->mode() == ncg::ScalarMode::numeric
                         ? std::max(1e-10, c1.owner()->tolerance())
                         : 0.0;
        rep.checks.push_back(
            {"tensor_curvature_additivity", res <= tol, Json{{"residual", res}}});
    }
    return rep;
}

Report cmd_dual(const Json& input, const std::string& base_dir) {
    Report rep;
    rep.command = "dual";
    ncg::FgpConnection c = load_connection(input, base_dir);
    ncg::FgpConnection d = ncg::dual_connection(c);
    rep.payload["connection"] = ncg::connection_to_json(d);
    ncg::FgpConnection dd = ncg::dual_connection(d);
    double res = ncg::matrix_residual(
        dd.kappa - c.module.projection * c.kappa * c.module.projection);
    double tol = c.owner()->mode() == ncg::ScalarMode::numeric
                     ? std::max(1e-10, c.owner()->tolerance())
                     : 0.0;
    rep.checks.push_back({"double_dual_recovers", res <= tol, Json{{"residual", res}}});
    return rep;
}

Report cmd_pseudoinverse(const Json& input, double eps_rank) {
    Report rep;
    rep.command = "pseudoinverse";
    ncg::ScalarMatrixFile f = ncg::scalar_matrix_from_json(input);
    ncg::SplitData<ncg::Scalar> sd =
        ncg::pseudoinverse(f.matrix, eps_rank > 0 ? eps_rank : 1e-10);
    rep.payload["phi_plus"] = ncg::scalar_matrix_to_json(sd.phi_plus);
    rep.payload["rank"] = sd.rank;
    rep.payload["m"] = sd.m;
    rep.payload["accepted_margin"] = sd.accepted_margin;
    rep.payload["rejected_margin"] = sd.rejected_margin;
    double phin = ncg::entry_norm(f.matrix);
    rep.checks.push_back({"phi_phiplus_phi_recovers_phi",
                          sd.residual_phi <= 1e-8 * std::max(1.0, phin),
                          Json{{"residual", sd.residual_phi}}});
    rep.checks.push_back({"phiplus_phi_phiplus_recovers_phiplus",
                          sd.residual_plus <= 1e-8 * std::max(1.0, ncg::entry_norm(sd.phi_plus)),
                          Json{{"residual", sd.residual_plus}}});
    double tol = f.mode == ncg::ScalarMode::numeric ? 1e-10 : 0.0;
    ncg::Matrix<ncg::Scalar> ek2 = sd.e_ker * sd.e_ker - sd.e_ker;
    ncg::Matrix<ncg::Scalar> ei2 = sd.e_im * sd.e_im - sd.e_im;
    bool idem = true;
    for (std::size_t i = 0; i < ek2.rows(); ++i)
        for (std::size_t j = 0; j < ek2.cols(); ++j)
            idem = idem && ek2(i, j).is_zero(std::max(tol, 1e-8));
    for (std::size_t i = 0; i < ei2.rows(); ++i)
        for (std::size_t j = 0; j < ei2.cols(); ++j)
            idem = idem && ei2(i, j).is_zero(std::max(tol, 1e-8));
    rep.checks.push_back({"splitting_idempotents", idem, Json()});
    return rep;
}

Report cmd_transport(const Json& input) {
    Report rep;
    rep.command = "transport";
    ncg::TransportJob job = ncg::transport_job_from_json(input);
    ncg::TransportResult r = job.inverse_equation
                                 ? ncg::inverse_transport(job.omega, job.options)
                                 : ncg::path_ordered_exp(job.omega, job.options);
    rep.payload["alpha_at_1"] = ncg::cmatrix_to_json(r.alpha_at_1);
    rep.payload["residual"] = r.residual;
    rep.payload["invertibility_margin"] = r.min_abs_det;
    rep.payload["max_condition"] = r.max_condition;
    Json bound;
    bound["terms_used"] = r.terms_used;
    bound["max_ratio"] = r.term_bound_ratio;
    bound["allowed_ratio"] = 1.0 + job.options.bound_slack;
    rep.payload["bound_report"] = std::move(bound);
    if (r.agreement >= 0) rep.payload["method_agreement"] = r.agreement;
    if (job.options.method != ncg::TransportMethod::rk4)
        rep.checks.push_back({"picard_factorial_bound",
                              r.term_bound_ratio <= 1.0 + job.options.bound_slack,
                              Json{{"max_ratio", r.term_bound_ratio}}});
    rep.checks.push_back({"invertible_on_grid", r.min_abs_det > 0,
                          Json{{"min_abs_det", r.min_abs_det}}});
    return rep;
}

Report cmd_pi1(const Json& input) {
    Report rep;
    rep.command = "pi1";
    ncg::TorusPresentation T = ncg::torus_from_json(input);
    ncg::Pi1Descriptor d = ncg::pi1_descriptor(T);
    rep.payload["m"] = d.m;
    rep.payload["n_minus_m"] = d.n_minus_m;
    Json basis = Json::array();
    for (const auto& row : d.lattice.basis) {
        Json r = Json::array();
        for (const auto& x : row) r.push_back(x.str());
        basis.push_back(std::move(r));
    }
    rep.payload["lattice_basis"] = std::move(basis);
    Json completion = Json::array();
    for (const auto& row : d.lattice.completion) {
        Json r = Json::array();
        for (const auto& x : row) r.push_back(x.str());
        completion.push_back(std::move(r));
    }
    rep.payload["lattice_completion"] = std::move(completion);
    rep.payload["unimodular_extension"] = d.lattice.unimodular_extension;
    Json gamma = Json::array();
    for (const auto& f : d.gamma.invariant_factors) gamma.push_back(f.str());
    rep.payload["gamma_invariant_factors"] = std::move(gamma);
    rep.payload["gamma_torus_rank"] = d.gamma.torus_rank;
    rep.payload["gamma_text"] = d.gamma.text;
    rep.payload["descriptor_text"] = d.hull_text;
    rep.payload["generator_text"] = d.generator_text;

    bool verified = true;
    for (const auto& row : d.lattice.basis) {
        std::vector<long> r;
        for (const auto& x : row) r.push_back(static_cast<long>(x));
        verified = verified && T.lattice_contains(r);
    }
    rep.checks.push_back({"lattice_rows_satisfy_constraint", verified, Json()});
    return rep;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ncgpi1: truncated dga calculus, connections, pseudoinverse "
                 "splittings, interval transport and torus invariants"};
    app.require_subcommand(1);

    std::vector<std::string> inputs;
    Output out;
    double tol = -1.0;
    double eps_rank = -1.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string suite;
    std::size_t trials = 0;
    std::string jsonl_path;
    std::string config_path;

    auto add_common = [&](CLI::App* cmd, bool needs_input = true) {
        if (needs_input)
            cmd->add_option("--input", inputs, "input file (or - for stdin)")->required();
        cmd->add_option("--format", out.format, "json or text")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->add_option("--out", out.out_path, "write the report here");
        cmd->add_option("--tol", tol, "tolerance override");
    };

    CLI::App* c_check = app.add_subcommand("check", "run the dga axiom checks");
    add_common(c_check);
    CLI::App* c_center = app.add_subcommand("center", "graded center dimensions and basis");
    add_common(c_center);
    CLI::App* c_curv = app.add_subcommand("curvature", "curvature of a connection");
    add_common(c_curv);
    CLI::App* c_flat = app.add_subcommand("flat", "flatness of a connection");
    add_common(c_flat);
    CLI::App* c_tensor = app.add_subcommand("tensor", "tensor product of two connections");
    add_common(c_tensor);
    CLI::App* c_dual = app.add_subcommand("dual", "dual of a connection");
    add_common(c_dual);
    CLI::App* c_pinv = app.add_subcommand("pseudoinverse", "pseudoinverse of a matrix");
    add_common(c_pinv);
    c_pinv->add_option("--eps-rank", eps_rank, "rank decision epsilon");
    CLI::App* c_trans = app.add_subcommand("transport", "interval transport job");
    add_common(c_trans);
    CLI::App* c_pi1 = app.add_subcommand("pi1", "fundamental-group descriptor of a torus");
    add_common(c_pi1);
    CLI::App* c_fuzz = app.add_subcommand("fuzz", "randomized property suites");
    add_common(c_fuzz, false);
    c_fuzz->add_option("--suite", suite,
                       "axioms | curvature-laws | pseudoinverse | dm-inequality | torus-phases")
        ->required();
    c_fuzz->add_option("--seed", seed, "deterministic seed (required)")->required();
    c_fuzz->add_option("--trials", trials, "trial count override");
    c_fuzz->add_option("--jsonl", jsonl_path, "write per-trial JSON lines here");
    c_fuzz->add_option("--config", config_path, "fuzz config file");
    for (CLI::App* c : {c_check, c_center, c_curv, c_flat, c_tensor, c_dual, c_pinv, c_trans,
                        c_pi1}) {
        c->add_option("--seed", seed, "seed (echoed in the report)")
            ->each([&](const std::string&) { seed_set = true; });
    }

    CLI11_PARSE(app, argc, argv);

    auto t0 = std::chrono::steady_clock::now();
    try {
        Report rep;
        if (app.got_subcommand(c_fuzz)) {
            ncg::FuzzConfig cfg;
            cfg.seed = seed;
            cfg.trials = trials;
            if (!config_path.empty()) {
                Json cj = read_input(config_path);
                ncg::io::reject_unknown_keys(
                    cj, {"trials", "n_min", "n_max", "seed", "tolerance"}, "fuzz config");
                if (cj.contains("trials") && trials == 0)
                    cfg.trials = cj["trials"].get<std::size_t>();
                if (cj.contains("n_min")) cfg.n_min = cj["n_min"].get<std::size_t>();
                if (cj.contains("n_max")) cfg.n_max = cj["n_max"].get<std::size_t>();
                if (cj.contains("seed")) cfg.seed = cj["seed"].get<std::uint64_t>();
                if (cj.contains("tolerance")) cfg.tolerance = cj["tolerance"].get<double>();
            }
            ncg::FuzzOutcome fo = ncg::run_fuzz_suite(suite, cfg);
            if (!jsonl_path.empty()) ncg::write_text_file(jsonl_path, fo.jsonl);
            else std::cout << fo.jsonl;
            rep = std::move(fo.report);
        } else {
            if (!inputs.empty() && inputs[0] == "-" && inputs.size() == 1) {
                // stdin input
            }
            std::vector<Json> parsed;
            std::vector<std::string> dirs;
            for (const auto& p : inputs) {
                parsed.push_back(read_input(p));
                dirs.push_back(p == "-" ? std::string(".") : dirname_of(p));
            }
            if (app.got_subcommand(c_check)) rep = cmd_check(parsed.at(0));
            else if (app.got_subcommand(c_center)) rep = cmd_center(parsed.at(0));
            else if (app.got_subcommand(c_curv)) rep = cmd_curvature(parsed.at(0), dirs.at(0), tol);
            else if (app.got_subcommand(c_flat)) rep = cmd_flat(parsed.at(0), dirs.at(0), tol);
            else if (app.got_subcommand(c_tensor)) {
                if (parsed.size() != 2)
                    throw ncg::InvalidInput("tensor needs exactly two --input files");
                rep = cmd_tensor(parsed[0], parsed[1], dirs[0], dirs[1]);
            } else if (app.got_subcommand(c_dual)) rep = cmd_dual(parsed.at(0), dirs.at(0));
            else if (app.got_subcommand(c_pinv)) rep = cmd_pseudoinverse(parsed.at(0), eps_rank);
            else if (app.got_subcommand(c_trans)) rep = cmd_transport(parsed.at(0));
            else if (app.got_subcommand(c_pi1)) rep = cmd_pi1(parsed.at(0));
            if (seed_set) {
                rep.has_seed = true;
                rep.seed = seed;
            }
        }
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return emit(rep, out, wall);
    } catch (const ncg::DivergenceDetected& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return exit_divergence;
    } catch (const ncg::OutsideConvergenceRadius& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return exit_divergence;
    } catch (const ncg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid_input;
    }
}
