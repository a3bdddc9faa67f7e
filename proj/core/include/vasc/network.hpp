#ifndef VASC_NETWORK_HPP
#define VASC_NETWORK_HPP

#include <optional>
#include <string>
#include <vector>

#include "vasc/rcr.hpp"
#include "vasc/waveform.hpp"

namespace vasc {

enum class ElementKind { resistor, capacitor, inductor, diode };

struct LumpedElement {
  ElementKind kind = ElementKind::resistor;
  double value = 0.0; // resistance | capacitance | inductance; unused for diodes
  int node_from = -1;
  int node_to = -1;
};

struct InflowBc {
  int node = -1;
  PeriodicWaveform waveform;
};

struct GroundBc {
  int node = -1;
  double pressure = 0.0;
};

/*! @brief R/C/L/diode network with prescribed inflows and ground pressures. */
struct LumpedNetwork {
  int node_count = 0;
  std::vector<LumpedElement> elements;
  std::vector<InflowBc> inflows;
  std::vector<GroundBc> grounds;

  /*! Checks element values, node ids, connectivity, and that at least one
   *  ground and one inflow with a common period are present. */
  void validate() const;
  double period() const; // common inflow period
};

/*! Uniform-grid solution: per-node pressures and per-element flows. */
struct SolutionTrace {
  double dt = 0.0;
  double period = 0.0;
  int cycles = 0;
  std::vector<double> time;
  std::vector<std::vector<double>> node_pressure; // [node][step]
  std::vector<std::vector<double>> element_flow;  // [element][step]

  int steps_per_cycle() const;
};

/*! Diode law: flow passes only in the forward direction. */
inline double diode_flow(double q) { return q > 0.0 ? q : 0.0; }

/*! Explicit RK4 integration of the single-RCR inlet pressure ODE
 *  dP/dt + P/tau = Rp dQ/dt + (Rp + Rd) Q / tau
 *  with dQ/dt taken as the exact slope of the piecewise-linear inflow.
 *  dt must divide the inflow period to within 1e-9 relative. The trace has
 *  one pressure series (the inlet) and one flow series (the inflow). */
SolutionTrace simulate_rcr_rk4(const RcrParameters& params,
                               const PeriodicWaveform& inflow, double p_initial,
                               double dt, int n_cycles);

struct NetworkSimOptions {
  double rho_inf = 0.5;          // generalized-alpha spectral radius
  int max_diode_iterations = 50; // active-set iterations per step
  // initial node pressures (size node_count); zeros when empty
  std::vector<double> initial_pressures;
};

/*! Implicit generalized-alpha time integration of the network DAE assembled
 *  from the element laws (dP = RQ, Q = C d(dP)/dt, dP = L dQ/dt, diode)
 *  and nodal flow conservation. Diodes switch by per-step active-set
 *  iteration until the open/closed assignment is stable. */
SolutionTrace simulate_network(const LumpedNetwork& network, double dt,
                               int n_cycles, const NetworkSimOptions& options = {});

/*! Steady-state node pressures for mean inflows, with capacitors open and
 *  inductors short-circuited. Used for steady initial conditions. */
std::vector<double> steady_state_pressures(const LumpedNetwork& network);

struct PeriodicRunResult {
  std::vector<PeriodicWaveform> pressure_cycles; // one per monitored node
  std::vector<double> cycle_mean;                // last-cycle mean per node
  std::vector<CycleMeans> mean_history;          // per-cycle means per node
  int cycles_used = 0;
  double achieved_error = 0.0;
  bool converged = false;
};

struct PeriodicRunOptions {
  double epsilon = 1e-8;
  int max_cycles = 1000;
  double p_initial = 0.0;         // RCR variant only
  NetworkSimOptions network;      // network variant only
};

/*! Runs an RCR cycle by cycle until the state recurs and the cyclic error of
 *  the per-cycle mean drops below epsilon; returns the final cycle. */
PeriodicRunResult run_rcr_to_periodic(const RcrParameters& params,
                                      const PeriodicWaveform& inflow, double dt,
                                      const PeriodicRunOptions& options = {});

/*! Network variant; monitors every non-ground node pressure. */
PeriodicRunResult run_network_to_periodic(const LumpedNetwork& network,
                                          double dt,
                                          const PeriodicRunOptions& options = {});

/*! Recognizes a network that is exactly a single RCR boundary condition:
 *  inflow -> Rp -> mid, mid -> Rd -> ground, mid -> C -> ground. */
std::optional<RcrParameters> detect_single_rcr(const LumpedNetwork& network);

} // namespace vasc

#endif
