// ocmflow command line: evolve a convex body's support function under the
// normalized anisotropic sigma_k flow until it solves c phi(h) sigma_k = f.
//
//   ocmflow run <config>          evolve to stationarity, write series/fields
//   ocmflow check <config>        hypothesis checks only
//   ocmflow export-mesh <field>   field dump -> Wavefront-style mesh
//   ocmflow validate              run the oracle cross-check suite

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ocmflow/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"normalized anisotropic sigma_k curvature flow solver"};
    app.require_subcommand(1);

    std::string run_config, check_config, field_path, mesh_out = "mesh.obj";

    CLI::App* run_cmd = app.add_subcommand("run", "evolve a configured problem");
    run_cmd->add_option("config", run_config, "config file")->required();

    CLI::App* check_cmd =
        app.add_subcommand("check", "check the phi and f hypotheses of a config");
    check_cmd->add_option("config", check_config, "config file")->required();

    CLI::App* mesh_cmd =
        app.add_subcommand("export-mesh", "convert a field dump to a mesh");
    mesh_cmd->add_option("field", field_path, "field dump file")->required();
    mesh_cmd->add_option("-o,--output", mesh_out, "output mesh path");

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "run the oracle cross-check suite");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return ocmflow::run_command(run_config, std::cout);
    if (check_cmd->parsed()) return ocmflow::check_command(check_config, std::cout);
    if (mesh_cmd->parsed())
        return ocmflow::export_mesh_command(field_path, mesh_out, std::cout);
    if (validate_cmd->parsed()) return ocmflow::validate_command(std::cout);
    return 1;
}
