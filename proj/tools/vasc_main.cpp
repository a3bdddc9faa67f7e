/*! @brief Command-line surface for the reduced-order cardiovascular toolkit:
 *  0D network solves, trace periodicity audits, centerline-map construction,
 *  and initial-condition field generation. */

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vasc/centerline_map.hpp"
#include "vasc/init_field.hpp"
#include "vasc/io.hpp"
#include "vasc/network.hpp"
#include "vasc/periodicity.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitParse = 2;
constexpr int kExitTopology = 3;

struct Solve0dArgs {
  std::string network_file;
  std::string output_file;
  std::string inflow_file;
  std::string method = "auto"; // auto | rk4 | gen-alpha
  int cycles = 10;
  int steps_per_cycle = 1000;
  double rho_inf = 0.5;
  double p_init = 0.0;
  bool steady_ic = false;
};

/*! Synthesizes one monitor per inflow when the network file declares no
 *  OUTLET lines: pressure at the inflow node, flow through the first element
 *  incident to it. */
std::vector<vasc::OutletSpec> default_outlets(const vasc::NetworkSpec& spec) {
  std::vector<vasc::OutletSpec> outlets;
  for (std::size_t k = 0; k < spec.network.inflows.size(); ++k) {
    const int node = spec.network.inflows[k].node;
    int elem = -1;
    for (std::size_t e = 0; e < spec.network.elements.size(); ++e) {
      if (spec.network.elements[e].node_from == node ||
          spec.network.elements[e].node_to == node) {
        elem = static_cast<int>(e);
        break;
      }
    }
    if (elem < 0)
      throw std::runtime_error("no element attached to inflow node " +
                               std::to_string(node));
    outlets.push_back({"inlet" + std::to_string(k), node, elem});
  }
  return outlets;
}

int run_solve_0d(const Solve0dArgs& args) {
  vasc::NetworkSpec spec = vasc::read_network(args.network_file, args.inflow_file);
  const double period = spec.network.period();
  const double dt = period / args.steps_per_cycle;

  const auto rcr = vasc::detect_single_rcr(spec.network);
  std::string method = args.method;
  if (method == "auto") method = rcr ? "rk4" : "gen-alpha";
  if (method == "rk4" && !rcr)
    throw std::runtime_error(
        "--method rk4 requires a network that is a single RCR boundary "
        "condition; use gen-alpha");

  const std::vector<vasc::OutletSpec> outlets =
      spec.outlets.empty() ? default_outlets(spec) : spec.outlets;

  vasc::SolutionTrace trace;
  if (method == "rk4") {
    double p0 = args.p_init;
    if (args.steady_ic)
      p0 = spec.network.inflows[0].waveform.mean() *
           (rcr->r_proximal + rcr->r_distal);
    trace = vasc::simulate_rcr_rk4(*rcr, spec.network.inflows[0].waveform, p0,
                                   dt, args.cycles);
  } else {
    vasc::NetworkSimOptions options;
    options.rho_inf = args.rho_inf;
    if (args.steady_ic)
      options.initial_pressures = vasc::steady_state_pressures(spec.network);
    trace = vasc::simulate_network(spec.network, dt, args.cycles, options);
  }

  vasc::OutletTraceSet out;
  out.period = period;
  out.dt = dt;
  for (const auto& o : outlets) {
    vasc::OutletTrace t;
    t.id = o.id;
    if (method == "rk4") {
      // the RK4 trace carries exactly the inlet pressure and the inflow
      t.pressure = trace.node_pressure.at(0);
      t.flow = trace.element_flow.at(0);
    } else {
      t.pressure = trace.node_pressure.at(o.pressure_node);
      t.flow = trace.element_flow.at(o.flow_element);
    }
    out.outlets.push_back(std::move(t));
  }
  vasc::write_trace(args.output_file, out);
  std::cout << "solve-0d: " << method << ", " << args.cycles << " cycles, dt = "
            << vasc::format_full(dt) << ", wrote " << args.output_file << "\n";
  return kExitOk;
}

struct CheckArgs {
  std::string trace_file;
  std::string bc_file;
  std::string report_file;
  double epsilon = 0.01;
  double epsilon_0d = 1e-8;
  int steps_per_cycle = 1000;
};

int run_check_periodicity(const CheckArgs& args) {
  vasc::OutletTraceSet traces = vasc::read_trace(args.trace_file);
  const auto bcs = vasc::read_bc_file(args.bc_file);
  for (auto& outlet : traces.outlets) {
    bool found = false;
    for (const auto& [id, params] : bcs)
      if (id == outlet.id) {
        outlet.params = params;
        found = true;
        break;
      }
    if (!found)
      throw vasc::ParseError(args.bc_file + ": no boundary condition for outlet '" +
                             outlet.id + "'");
  }
  traces.validate();

  vasc::PredictOptions options;
  options.epsilon_0d = args.epsilon_0d;
  options.steps_per_cycle = args.steps_per_cycle;
  const vasc::ConvergenceReport report =
      vasc::check_convergence(traces, args.epsilon, options);

  for (std::size_t o = 0; o < report.outlets.size(); ++o) {
    const auto& e = report.outlets[o];
    std::printf("outlet %-12s eps_inf = %-12.6g eps_cyc = %-12.6g "
                "tau/T(fit) = %-10.4g P_inf = %.6g\n",
                e.id.c_str(), e.eps_asym_pressure.back(),
                e.eps_cyclic.empty() ? std::nan("") : e.eps_cyclic.back(),
                report.tau_over_T_fitted[o], report.predicted_mean[o]);
  }
  std::printf("mean tau/T = %.4g, predicted cycles to eps_inf <= %g: n_inf = %d\n",
              report.mean_outlet_tau_over_T, report.epsilon_target,
              report.cycles_to_target);
  if (report.prediction_provisional)
    std::printf("note: outlet flow not yet periodic; prediction is provisional\n");
  std::printf("%s\n", report.converged ? "PASS" : "FAIL");

  if (!args.report_file.empty()) vasc::write_report(args.report_file, report);
  return report.converged ? kExitOk : kExitNotConverged;
}

struct MapArgs {
  std::string centerline_file;
  std::string mesh_file;
  std::string output_file;
};

int run_map_centerline(const MapArgs& args) {
  const vasc::Centerline centerline = vasc::read_centerline(args.centerline_file);
  const vasc::VolumeMesh mesh = vasc::read_mesh(args.mesh_file);
  const vasc::NodeMap map = vasc::build_node_map(centerline, mesh);
  vasc::write_node_map(args.output_file, map);
  std::cout << "map-centerline: " << map.index.size() << " nodes assigned in "
            << map.layer_count << " layers, wrote " << args.output_file << "\n";
  return kExitOk;
}

struct GenInitArgs {
  std::string centerline_file;
  std::string mesh_file;
  std::string map_file;
  std::string output_file;
  std::string radial = "auto"; // auto | wall | area
};

int run_gen_init(const GenInitArgs& args) {
  const vasc::Centerline centerline = vasc::read_centerline(args.centerline_file);
  const vasc::VolumeMesh mesh = vasc::read_mesh(args.mesh_file);
  const vasc::NodeMap map = vasc::read_node_map(args.map_file);
  if (map.index.size() != mesh.nodes.size())
    throw std::runtime_error("node map covers " + std::to_string(map.index.size()) +
                             " nodes but the mesh has " +
                             std::to_string(mesh.nodes.size()));

  vasc::RadialMode mode = vasc::RadialMode::wall_distance;
  if (args.radial == "area" ||
      (args.radial == "auto" && mesh.wall_faces.empty()))
    mode = vasc::RadialMode::area_radius;
  else if (args.radial != "wall" && args.radial != "auto")
    throw std::runtime_error("unknown --radial mode '" + args.radial + "'");

  bool any_flow = false;
  for (const auto& n : centerline.nodes)
    if (n.flow != 0.0) any_flow = true;
  if (!any_flow)
    std::cerr << "warning: centerline solution carries no flow; "
                 "velocity field is zeroed\n";

  const vasc::InitialConditionField field =
      vasc::build_initial_conditions(mesh, map, centerline, mode);
  vasc::write_initial_condition(args.output_file, field.pressure, field.velocity);
  std::cout << "gen-init: wrote " << field.pressure.size() << " node values to "
            << args.output_file << "\n";
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order cardiovascular simulation toolkit"};
  app.require_subcommand(1);

  Solve0dArgs solve_args;
  auto* solve = app.add_subcommand("solve-0d", "Integrate a lumped 0D network");
  solve->add_option("network", solve_args.network_file, "network description file")
      ->required();
  solve->add_option("-o,--output", solve_args.output_file, "output trace file")
      ->required();
  solve->add_option("--inflow", solve_args.inflow_file,
                    "waveform file overriding the network's INFLOW files");
  solve->add_option("--method", solve_args.method, "auto | rk4 | gen-alpha")
      ->check(CLI::IsMember({"auto", "rk4", "gen-alpha"}));
  solve->add_option("--cycles", solve_args.cycles, "number of cardiac cycles")
      ->check(CLI::PositiveNumber);
  solve->add_option("--steps-per-cycle", solve_args.steps_per_cycle,
                    "time steps per cycle")
      ->check(CLI::PositiveNumber);
  solve->add_option("--rho-inf", solve_args.rho_inf,
                    "generalized-alpha spectral radius");
  solve->add_option("--p-init", solve_args.p_init, "initial pressure (rk4)");
  solve->add_flag("--steady-ic", solve_args.steady_ic,
                  "start from the steady state of the mean inflow");

  CheckArgs check_args;
  auto* check = app.add_subcommand("check-periodicity",
                                   "Audit a trace for periodic convergence");
  check->add_option("trace", check_args.trace_file, "trace file")->required();
  check->add_option("bc", check_args.bc_file, "boundary-condition file")
      ->required();
  check->add_option("--epsilon", check_args.epsilon, "convergence tolerance")
      ->check(CLI::Range(1e-12, 1.0));
  check->add_option("--report", check_args.report_file,
                    "write a machine-readable key = value report");
  check->add_option("--steps-per-cycle", check_args.steps_per_cycle,
                    "companion-model steps per cycle")
      ->check(CLI::PositiveNumber);

  MapArgs map_args;
  auto* mapc = app.add_subcommand("map-centerline",
                                  "Build the volume-to-centerline node map");
  mapc->add_option("centerline", map_args.centerline_file, "centerline file")
      ->required();
  mapc->add_option("mesh", map_args.mesh_file, "volume mesh file")->required();
  mapc->add_option("-o,--output", map_args.output_file, "map sidecar file")
      ->required();

  GenInitArgs gen_args;
  auto* gen = app.add_subcommand("gen-init",
                                 "Generate an initial-condition field");
  gen->add_option("centerline", gen_args.centerline_file,
                  "centerline solution file")
      ->required();
  gen->add_option("mesh", gen_args.mesh_file, "volume mesh file")->required();
  gen->add_option("map", gen_args.map_file, "node-map sidecar")->required();
  gen->add_option("-o,--output", gen_args.output_file,
                  "output initial-condition file")
      ->required();
  gen->add_option("--radial", gen_args.radial,
                  "radial coordinate mode: auto | wall | area");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve_0d(solve_args);
    if (check->parsed()) return run_check_periodicity(check_args);
    if (mapc->parsed()) return run_map_centerline(map_args);
    if (gen->parsed()) return run_gen_init(gen_args);
  } catch (const vasc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTopology;
  }
  return kExitOk;
}
