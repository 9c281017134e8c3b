// Command-line front end: runs scenario files through the fixed-grid and
// moving-boundary models and writes trajectories, event logs, reports, grid
// sweeps, and network structure dumps.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tes/io.hpp"
#include "tes/scenario.hpp"
#include "tes/simulation.hpp"

namespace {

std::string joined(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

/// File prefix for one model's outputs: "<name>_" when it is the only model
/// in the run, "<name>_fg_"/"<name>_mb_" when both run.
std::string prefix_for(const tes::Scenario& sc, const std::string& label) {
  if (sc.model == tes::ModelSelect::Both) return sc.name + "_" + label + "_";
  return sc.name + "_";
}

void write_run_files(const tes::Scenario& sc, const tes::ModelRunResult& run,
                     const std::string& out_dir) {
  const std::string prefix = prefix_for(sc, run.model_label);
  tes::write_file(joined(out_dir, prefix + "trajectory.csv"),
                  [&](std::ostream& out) { tes::write_trajectory_csv(out, run.trajectory); });
  tes::write_file(joined(out_dir, prefix + "events.csv"),
                  [&](std::ostream& out) { tes::write_events_csv(out, run.events); });
}

void print_run_line(const tes::ModelRunResult& run) {
  std::string label = run.model_label;
  if (run.model_label == "fg") label += "(" + std::to_string(run.sections) + ")";
  std::printf("%-8s end %12.4f s  steps %8ld  t_comp %9.4f s  audit %.4f%%", label.c_str(),
              run.end_time, run.stats.total_steps(), run.stats.wall_time,
              100.0 * run.audit.residual_fraction);
  if (run.freeze_time) std::printf("  t_freeze %12.4f s", *run.freeze_time);
  std::printf("\n");
}

int cmd_simulate(const tes::Scenario& sc, const std::string& out_dir) {
  const std::vector<tes::ModelRunResult> runs = tes::run_scenario(sc);
  for (const tes::ModelRunResult& run : runs) {
    write_run_files(sc, run, out_dir);
    print_run_line(run);
  }
  const nlohmann::json report = tes::report_json(sc.name, runs);
  tes::write_file(joined(out_dir, sc.name + "_report.json"),
                  [&](std::ostream& out) { out << report.dump(2) << "\n"; });
  return 0;
}

int cmd_compare(tes::Scenario sc, const std::string& out_dir) {
  sc.model = tes::ModelSelect::Both;
  const tes::ComparisonResult cmp = tes::compare_models(sc);
  write_run_files(sc, cmp.fg, out_dir);
  write_run_files(sc, cmp.mb, out_dir);
  print_run_line(cmp.fg);
  print_run_line(cmp.mb);
  std::printf("delta_soc max %.6f  mean %.6f%s\n", cmp.delta.max, cmp.delta.mean,
              cmp.delta.truncated ? "  (overlap truncated)" : "");
  const nlohmann::json report = tes::report_json(sc.name, {cmp.fg, cmp.mb}, &cmp.delta);
  tes::write_file(joined(out_dir, sc.name + "_report.json"),
                  [&](std::ostream& out) { out << report.dump(2) << "\n"; });
  return 0;
}

int cmd_sweep(const tes::Scenario& sc, const std::string& out_dir,
              const std::vector<int>& sections, int reps, bool include_mb) {
  const std::vector<tes::SweepRow> rows = tes::sweep_grid(sc, sections, reps, include_mb);
  tes::write_file(joined(out_dir, sc.name + "_sweep.csv"),
                  [&](std::ostream& out) { tes::write_sweep_csv(out, rows); });
  std::printf("%-6s %10s %14s %12s %10s  %s\n", "model", "sections", "t_freeze_s", "t_comp_s",
              "n_steps", "status");
  for (const tes::SweepRow& r : rows) {
    std::printf("%-6s %10d %14.4f %12.5f %10.0f  %s\n", r.model_label.c_str(), r.sections,
                r.freeze_time.value_or(0.0), r.t_comp_mean, r.n_steps_mean, r.status.c_str());
  }
  return 0;
}

int cmd_dump_graph(const tes::Scenario& sc, const std::string& which, const std::string& out) {
  auto dump = [&](std::ostream& os) {
    if (which == "mb") {
      const tes::MbModel model = tes::build_moving_boundary_model(
          sc.geometry, sc.materials, sc.pcm, sc.mdot, sc.total_mass);
      tes::write_graph_csv(os, model.graph);
    } else {
      const tes::FgModel model = tes::build_fixed_grid_model(sc.geometry, sc.materials, sc.pcm,
                                                             sc.mdot, sc.fg_sections);
      tes::write_graph_csv(os, model.graph);
    }
  };
  if (out.empty()) dump(std::cout);
  else tes::write_file(out, dump);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-change thermal storage simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::string model_override;
  std::string dump_model = "fg";
  std::string dump_out;
  int fg_sections = 0;
  int reps = 1;
  bool no_mb = false;
  std::vector<int> sections;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "scenario file")->required();
    cmd->add_option("--out-dir", out_dir, "output directory (created if missing)");
    cmd->add_option("--fg-sections", fg_sections, "override the fixed-grid section count");
  };

  CLI::App* sim = app.add_subcommand("simulate", "run a scenario, write trajectory/events/report");
  add_common(sim);
  sim->add_option("--model", model_override, "override the model selection")
      ->check(CLI::IsMember({"fg", "mb", "both"}));

  CLI::App* cmp = app.add_subcommand("compare", "run both models and report the SOC deviation");
  add_common(cmp);

  CLI::App* swp = app.add_subcommand("sweep", "run the fixed grid over several section counts");
  add_common(swp);
  swp->add_option("--n", sections, "section counts")->required()->delimiter(',');
  swp->add_option("--reps", reps, "repetitions per cell for cost averaging");
  swp->add_flag("--no-mb", no_mb, "skip the moving-boundary row");

  CLI::App* dump = app.add_subcommand("dump-graph", "write the thermal network structure");
  add_common(dump);
  dump->add_option("--model", dump_model, "which model's network")
      ->check(CLI::IsMember({"fg", "mb"}));
  dump->add_option("--out", dump_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << tes::error_json("usage", e.what()) << "\n";
    return 2;
  }

  try {
    tes::Scenario sc = tes::load_scenario_file(scenario_path);
    if (fg_sections > 0) sc.fg_sections = fg_sections;
    if (model_override == "fg") sc.model = tes::ModelSelect::Fg;
    else if (model_override == "mb") sc.model = tes::ModelSelect::Mb;
    else if (model_override == "both") sc.model = tes::ModelSelect::Both;
    std::filesystem::create_directories(out_dir);

    if (sim->parsed()) return cmd_simulate(sc, out_dir);
    if (cmp->parsed()) return cmd_compare(sc, out_dir);
    if (swp->parsed()) return cmd_sweep(sc, out_dir, sections, reps, !no_mb);
    if (dump->parsed()) return cmd_dump_graph(sc, dump_model, dump_out);
    return 2;  // unreachable: a subcommand is required
  } catch (const tes::ScenarioError& e) {
    std::cerr << tes::error_json("scenario", e.what()) << "\n";
    return 1;
  } catch (const tes::SolverError& e) {
    std::cerr << tes::error_json("solver", e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << tes::error_json("runtime", e.what()) << "\n";
    return 1;
  }
}
