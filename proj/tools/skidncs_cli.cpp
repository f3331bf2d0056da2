// Batch front end: loads a scenario file, prints the derived models as CSV
// blocks, certifies the norm-bounded embedding, or runs a co-simulation
// and writes the trace.
//
// Exit codes: 0 success / certification pass, 1 certification fail,
// 2 input error (unreadable file, schema violation, inadmissible h).

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "skidncs/scenario_io.hpp"

namespace {

using namespace skidncs;

void print_matrix(const std::string& name, const Mat& m) {
    std::printf("matrix,%s,%d,%d\n", name.c_str(), m.rows(), m.cols());
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
            const double v = m(r, c) == 0.0 ? 0.0 : m(r, c);  // canonical zero
            std::printf("%s%.17g", c == 0 ? "" : ",", v);
        }
        std::printf("\n");
    }
}

void print_scalar(const std::string& name, double v) {
    std::printf("scalar,%s,%.17g\n", name.c_str(), v);
}

int cmd_linearize(const Scenario& sc) {
    const LinearErrorModel model = build_linear_model(sc.segment, sc.geometry);
    print_matrix("A", model.A);
    print_matrix("B", model.B);
    print_matrix("B_D", model.B_D);
    return 0;
}

int cmd_discretize(const Scenario& sc, double h) {
    const LiftedSystem sys{build_linear_model(sc.segment, sc.geometry), sc.bounds};
    const LiftedMatrices lm = lifted_matrices(sys, h);
    print_matrix("A_tilde", lm.A_tilde);
    print_matrix("B_tilde", lm.B_tilde);
    print_matrix("B_tilde_D", lm.B_tilde_D);
    return 0;
}

int cmd_embed(const Scenario& sc) {
    const LiftedSystem sys{build_linear_model(sc.segment, sc.geometry), sc.bounds};
    const NormBoundedModel nb = build_embedding(sys);
    print_matrix("A_nom", nb.A_nom);
    print_matrix("B_nom", nb.B_nom);
    print_matrix("B_D", nb.B_D);
    print_matrix("B_p", nb.B_p);
    print_matrix("C_q", nb.C_q);
    print_matrix("D_q", nb.D_q);
    print_scalar("h_nom", nb.h_nom);
    print_scalar("r1", nb.radii[0]);
    print_scalar("r2", nb.radii[1]);
    print_scalar("margin", nb.margin);
    return 0;
}

int cmd_validate(const Scenario& sc, int grid) {
    const LiftedSystem sys{build_linear_model(sc.segment, sc.geometry), sc.bounds};
    const NormBoundedModel nb = build_embedding(sys);
    const CertificationReport report = certify_embedding(nb, sys, grid);
    print_scalar("max_residual", report.max_residual);
    print_scalar("max_delta_norm", report.max_delta_norm);
    std::printf("scalar,grid_points,%d\n", report.grid_points);
    std::printf("scalar,channel_dim,%d\n", nb.channel_dim());
    std::printf("%s\n", report.passed ? "PASS" : "FAIL");
    return report.passed ? 0 : 1;
}

int cmd_simulate(const Scenario& sc, const std::string& out_path) {
    const SimTrace trace = run_scenario(sc);
    write_trace_csv(trace, out_path);
    std::printf("scalar,rows,%zu\n", trace.size());
    std::printf("scalar,final_div_lin,%.17g\n", trace.div_linear.back());
    std::printf("scalar,final_div_nb,%.17g\n", trace.div_norm_bounded.back());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tracked-robot networked-control model toolbox"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_flag("--help", "print help");

    std::string scenario_path;
    app.add_option("--scenario", scenario_path, "scenario JSON file")->required();

    auto* linearize = app.add_subcommand("linearize", "print the error-dynamics LTI model");
    auto* discretize =
        app.add_subcommand("discretize", "print the lifted matrices at a hold interval");
    discretize->set_help_flag("--help", "print help");
    double h = 0.0;
    discretize->add_option("--h", h, "hold interval Ts - tau (s)")->required();
    auto* embed = app.add_subcommand("embed", "print the norm-bounded embedding");
    auto* validate =
        app.add_subcommand("validate-embedding", "certify the embedding over an h grid");
    int grid = 1000;
    validate->add_option("--grid", grid, "number of h grid points");
    auto* simulate = app.add_subcommand("simulate", "co-simulate and write a CSV trace");
    std::string out_path;
    simulate->add_option("--out", out_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        const skidncs::Scenario sc = skidncs::load_scenario(scenario_path);
        if (linearize->parsed()) return cmd_linearize(sc);
        if (discretize->parsed()) return cmd_discretize(sc, h);
        if (embed->parsed()) return cmd_embed(sc);
        if (validate->parsed()) return cmd_validate(sc, grid);
        if (simulate->parsed()) return cmd_simulate(sc, out_path);
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
