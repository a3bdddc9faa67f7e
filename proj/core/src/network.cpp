#include "vasc/network.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace vasc {

namespace {

long aligned_steps_per_cycle(double period, double dt) {
  const double ratio = period / dt;
  const long m = std::lround(ratio);
  if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio)
    throw std::invalid_argument("dt does not divide the cycle period (grid must align with cycle boundaries)");
  return m;
}

} // namespace

void LumpedNetwork::validate() const {
  if (node_count < 2)
    throw std::invalid_argument("LumpedNetwork: at least 2 nodes required");
  if (elements.empty())
    throw std::invalid_argument("LumpedNetwork: no elements");
  for (const auto& e : elements) {
    if (e.node_from < 0 || e.node_from >= node_count || e.node_to < 0 ||
        e.node_to >= node_count)
      throw std::invalid_argument("LumpedNetwork: element node id out of range");
    if (e.node_from == e.node_to)
      throw std::invalid_argument("LumpedNetwork: element nodes must be distinct");
    if (e.kind != ElementKind::diode && !(e.value > 0.0))
      throw std::invalid_argument("LumpedNetwork: element value must be > 0");
  }
  if (grounds.empty())
    throw std::invalid_argument("LumpedNetwork: at least one ground node required");
  for (const auto& g : grounds)
    if (g.node < 0 || g.node >= node_count)
      throw std::invalid_argument("LumpedNetwork: ground node id out of range");
  for (const auto& i : inflows)
    if (i.node < 0 || i.node >= node_count)
      throw std::invalid_argument("LumpedNetwork: inflow node id out of range");
  for (std::size_t i = 1; i < inflows.size(); ++i)
    if (std::abs(inflows[i].waveform.period() - inflows[0].waveform.period()) >
        1e-12 * inflows[0].waveform.period())
      throw std::invalid_argument("LumpedNetwork: inflow periods differ");

  // connectivity over element edges
  std::vector<int> parent(node_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& e : elements) parent[find(e.node_from)] = find(e.node_to);
  const int root = find(0);
  for (int n = 1; n < node_count; ++n)
    if (find(n) != root)
      throw std::invalid_argument("LumpedNetwork: graph is not connected");
}

double LumpedNetwork::period() const {
  if (inflows.empty())
    throw std::invalid_argument("LumpedNetwork: period requires an inflow");
  return inflows[0].waveform.period();
}

int SolutionTrace::steps_per_cycle() const {
  return static_cast<int>(aligned_steps_per_cycle(period, dt));
}

SolutionTrace simulate_rcr_rk4(const RcrParameters& params,
                               const PeriodicWaveform& inflow, double p_initial,
                               double dt, int n_cycles) {
  params.validate();
  if (n_cycles < 1)
    throw std::invalid_argument("simulate_rcr_rk4: n_cycles must be >= 1");
  const double T = inflow.period();
  const long m = aligned_steps_per_cycle(T, dt);
  const std::size_t n_steps = static_cast<std::size_t>(m) * n_cycles;

  const double tau = params.time_constant();
  const double rp = params.r_proximal;
  const double r_tot = params.r_proximal + params.r_distal;

  SolutionTrace trace;
  trace.dt = dt;
  trace.period = T;
  trace.cycles = n_cycles;
  trace.time.resize(n_steps + 1);
  trace.node_pressure.assign(1, std::vector<double>(n_steps + 1));
  trace.element_flow.assign(1, std::vector<double>(n_steps + 1));

  auto rhs = [&](double t, double p, double q_dot) {
    return -p / tau + rp * q_dot + r_tot * inflow.value(t) / tau;
  };

  double p = p_initial;
  trace.time[0] = 0.0;
  trace.node_pressure[0][0] = p;
  trace.element_flow[0][0] = inflow.value(0.0);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    // slope of the segment the step lies in; exact when waveform knots are a
    // subset of the grid, since the inflow is piecewise-linear
    const double q_dot = inflow.slope(t + 0.5 * dt);
    const double k1 = rhs(t, p, q_dot);
    const double k2 = rhs(t + 0.5 * dt, p + 0.5 * dt * k1, q_dot);
    const double k3 = rhs(t + 0.5 * dt, p + 0.5 * dt * k2, q_dot);
    const double k4 = rhs(t + dt, p + dt * k3, q_dot);
    p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(p))
      throw std::runtime_error("simulate_rcr_rk4: non-finite state at step " +
                               std::to_string(k + 1));
    trace.time[k + 1] = static_cast<double>(k + 1) * dt;
    trace.node_pressure[0][k + 1] = p;
    trace.element_flow[0][k + 1] = inflow.value(trace.time[k + 1]);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Generalized-alpha network integrator
// ---------------------------------------------------------------------------

namespace {

/*! Assembles and advances the network DAE
 *      E dy/dt + A y = b(t),   y = [node pressures; element flows].
 *  Rows: one law per element, one conservation (or ground) equation per node.
 *  Diodes contribute a short-circuit law when open and a zero-flow law when
 *  closed; the active set is iterated within each step. */
class NetworkIntegrator {
public:
  NetworkIntegrator(const LumpedNetwork& net, double dt,
                    const NetworkSimOptions& options)
      : net_(net), dt_(dt), opts_(options) {
    net_.validate();
    n_nodes_ = net_.node_count;
    n_elems_ = static_cast<int>(net_.elements.size());
    dim_ = n_nodes_ + n_elems_;

    const double rho = opts_.rho_inf;
    if (rho < 0.0 || rho > 1.0)
      throw std::invalid_argument("simulate_network: rho_inf must be in [0,1]");
    alpha_m_ = 0.5 * (3.0 - rho) / (1.0 + rho);
    alpha_f_ = 1.0 / (1.0 + rho);
    gamma_ = 0.5 + alpha_m_ - alpha_f_;

    is_ground_.assign(n_nodes_, false);
    ground_pressure_.assign(n_nodes_, 0.0);
    for (const auto& g : net_.grounds) {
      is_ground_[g.node] = true;
      ground_pressure_[g.node] = g.pressure;
    }
    inflow_at_.assign(n_nodes_, nullptr);
    for (const auto& in : net_.inflows) inflow_at_[in.node] = &in.waveform;

    diode_open_.clear();
    for (const auto& e : net_.elements)
      if (e.kind == ElementKind::diode) diode_open_.push_back(false);

    initialize_state();
  }

  void advance_cycle(long steps_per_cycle,
                     const std::function<void(long, const Eigen::VectorXd&)>& on_step) {
    for (long i = 0; i < steps_per_cycle; ++i) {
      step();
      on_step(i, y_);
    }
    local_time_ = 0.0; // fold; all inputs are T-periodic
  }

  const Eigen::VectorXd& state() const { return y_; }
  int n_nodes() const { return n_nodes_; }
  int n_elems() const { return n_elems_; }

private:
  int flow_index(int e) const { return n_nodes_ + e; }

  void assemble(Eigen::MatrixXd& E, Eigen::MatrixXd& A) const {
    E.setZero(dim_, dim_);
    A.setZero(dim_, dim_);
    int diode = 0;
    for (int e = 0; e < n_elems_; ++e) {
      const auto& el = net_.elements[e];
      const int row = e;
      const int f = el.node_from, t = el.node_to, q = flow_index(e);
      switch (el.kind) {
        case ElementKind::resistor:
          A(row, f) = 1.0;
          A(row, t) = -1.0;
          A(row, q) = -el.value;
          break;
        case ElementKind::capacitor:
          E(row, f) = el.value;
          E(row, t) = -el.value;
          A(row, q) = -1.0;
          break;
        case ElementKind::inductor:
          E(row, q) = -el.value;
          A(row, f) = 1.0;
          A(row, t) = -1.0;
          break;
        case ElementKind::diode:
          if (diode_open_[diode]) { // short circuit
            A(row, f) = 1.0;
            A(row, t) = -1.0;
          } else { // blocked
            A(row, q) = 1.0;
          }
          ++diode;
          break;
      }
    }
    for (int n = 0; n < n_nodes_; ++n) {
      const int row = n_elems_ + n;
      if (is_ground_[n]) {
        A(row, n) = 1.0;
      } else {
        for (int e = 0; e < n_elems_; ++e) {
          if (net_.elements[e].node_to == n) A(row, flow_index(e)) += 1.0;
          if (net_.elements[e].node_from == n) A(row, flow_index(e)) -= 1.0;
        }
      }
    }
  }

  Eigen::VectorXd rhs(double t) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim_);
    for (int n = 0; n < n_nodes_; ++n) {
      const int row = n_elems_ + n;
      if (is_ground_[n])
        b(row) = ground_pressure_[n];
      else if (inflow_at_[n])
        b(row) = -inflow_at_[n]->value(t);
    }
    return b;
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd>& factorization() {
    auto it = lu_cache_.find(diode_open_);
    if (it != lu_cache_.end()) return it->second;
    assemble(E_, A_);
    Eigen::MatrixXd S = alpha_m_ * E_ + alpha_f_ * gamma_ * dt_ * A_;
    Eigen::FullPivLU<Eigen::MatrixXd> check(S);
    if (!check.isInvertible())
      throw std::runtime_error("simulate_network: singular system (floating sub-network)");
    return lu_cache_.emplace(diode_open_, Eigen::PartialPivLU<Eigen::MatrixXd>(S))
        .first->second;
  }

  void initialize_state() {
    y_ = Eigen::VectorXd::Zero(dim_);
    if (!opts_.initial_pressures.empty()) {
      if (static_cast<int>(opts_.initial_pressures.size()) != n_nodes_)
        throw std::invalid_argument("simulate_network: initial_pressures size mismatch");
      for (int n = 0; n < n_nodes_; ++n) y_(n) = opts_.initial_pressures[n];
    }
    for (int n = 0; n < n_nodes_; ++n)
      if (is_ground_[n]) y_(n) = ground_pressure_[n];

    // consistent initial flows given the node pressures: resistor laws are
    // explicit, inductor and diode flows start at zero, capacitor flows come
    // from a least-squares solve of the conservation equations
    std::vector<int> cap_elems;
    for (int e = 0; e < n_elems_; ++e) {
      const auto& el = net_.elements[e];
      const double dp = y_(el.node_from) - y_(el.node_to);
      switch (el.kind) {
        case ElementKind::resistor:
          y_(flow_index(e)) = dp / el.value;
          break;
        case ElementKind::capacitor:
          cap_elems.push_back(e);
          break;
        default:
          y_(flow_index(e)) = 0.0;
          break;
      }
    }
    if (!cap_elems.empty()) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_nodes_, cap_elems.size());
      Eigen::VectorXd r = Eigen::VectorXd::Zero(n_nodes_);
      for (int n = 0; n < n_nodes_; ++n) {
        if (is_ground_[n]) continue;
        double known = inflow_at_[n] ? inflow_at_[n]->value(0.0) : 0.0;
        for (int e = 0; e < n_elems_; ++e) {
          const auto& el = net_.elements[e];
          if (el.kind == ElementKind::capacitor) continue;
          if (el.node_to == n) known += y_(flow_index(e));
          if (el.node_from == n) known -= y_(flow_index(e));
        }
        for (std::size_t c = 0; c < cap_elems.size(); ++c) {
          const auto& el = net_.elements[cap_elems[c]];
          if (el.node_to == n) M(n, c) += 1.0;
          if (el.node_from == n) M(n, c) -= 1.0;
        }
        r(n) = -known;
      }
      Eigen::VectorXd qc = M.completeOrthogonalDecomposition().solve(r);
      for (std::size_t c = 0; c < cap_elems.size(); ++c)
        y_(flow_index(cap_elems[c])) = qc(c);
    }

    // minimal-norm initial rate from the differential rows
    assemble(E_, A_);
    ydot_ = E_.completeOrthogonalDecomposition().solve(rhs(0.0) - A_ * y_);
  }

  void step() {
    const double t_af = local_time_ + alpha_f_ * dt_;
    const Eigen::VectorXd b = rhs(t_af);
    for (int iter = 0;; ++iter) {
      assemble(E_, A_);
      const auto& lu = factorization();
      Eigen::VectorXd r = b - (1.0 - alpha_m_) * (E_ * ydot_) - A_ * y_ -
                          alpha_f_ * dt_ * (1.0 - gamma_) * (A_ * ydot_);
      Eigen::VectorXd ydot_new = lu.solve(r);
      Eigen::VectorXd y_new =
          y_ + dt_ * ((1.0 - gamma_) * ydot_ + gamma_ * ydot_new);

      if (update_active_set(y_new)) {
        y_ = y_new;
        ydot_ = ydot_new;
        break;
      }
      if (iter + 1 >= opts_.max_diode_iterations)
        throw std::runtime_error("simulate_network: diode active-set iteration did not converge");
    }
    local_time_ += dt_;
    if (!y_.allFinite())
      throw std::runtime_error("simulate_network: non-finite state at t = " +
                               std::to_string(local_time_));
  }

  /*! Flips inconsistent diodes; returns true when the assignment is stable. */
  bool update_active_set(const Eigen::VectorXd& y_new) {
    const double scale = std::max(1.0, y_new.cwiseAbs().maxCoeff());
    const double tol = 1e-10 * scale;
    bool stable = true;
    int diode = 0;
    for (int e = 0; e < n_elems_; ++e) {
      if (net_.elements[e].kind != ElementKind::diode) continue;
      const auto& el = net_.elements[e];
      if (diode_open_[diode]) {
        if (y_new(flow_index(e)) < -tol) {
          diode_open_[diode] = false;
          stable = false;
        }
      } else {
        if (y_new(el.node_from) - y_new(el.node_to) > tol) {
          diode_open_[diode] = true;
          stable = false;
        }
      }
      ++diode;
    }
    return stable;
  }

  const LumpedNetwork& net_;
  double dt_;
  NetworkSimOptions opts_;
  int n_nodes_ = 0, n_elems_ = 0, dim_ = 0;
  double alpha_m_ = 0.0, alpha_f_ = 0.0, gamma_ = 0.0;
  double local_time_ = 0.0;
  std::vector<bool> is_ground_;
  std::vector<double> ground_pressure_;
  std::vector<const PeriodicWaveform*> inflow_at_;
  std::vector<bool> diode_open_;
  Eigen::MatrixXd E_, A_;
  Eigen::VectorXd y_, ydot_;
  std::map<std::vector<bool>, Eigen::PartialPivLU<Eigen::MatrixXd>> lu_cache_;
};

} // namespace

SolutionTrace simulate_network(const LumpedNetwork& network, double dt,
                               int n_cycles, const NetworkSimOptions& options) {
  if (n_cycles < 1)
    throw std::invalid_argument("simulate_network: n_cycles must be >= 1");
  const double T = network.period();
  const long m = aligned_steps_per_cycle(T, dt);
  const std::size_t n_steps = static_cast<std::size_t>(m) * n_cycles;

  NetworkIntegrator integrator(network, dt, options);

  SolutionTrace trace;
  trace.dt = dt;
  trace.period = T;
  trace.cycles = n_cycles;
  trace.time.resize(n_steps + 1);
  trace.node_pressure.assign(network.node_count,
                             std::vector<double>(n_steps + 1));
  trace.element_flow.assign(network.elements.size(),
                            std::vector<double>(n_steps + 1));
  auto record = [&](std::size_t k, const Eigen::VectorXd& y) {
    trace.time[k] = static_cast<double>(k) * dt;
    for (int n = 0; n < network.node_count; ++n)
      trace.node_pressure[n][k] = y(n);
    for (std::size_t e = 0; e < network.elements.size(); ++e)
      trace.element_flow[e][k] = y(network.node_count + static_cast<int>(e));
  };
  record(0, integrator.state());
  for (int c = 0; c < n_cycles; ++c) {
    const std::size_t base = static_cast<std::size_t>(c) * m;
    integrator.advance_cycle(
        m, [&](long i, const Eigen::VectorXd& y) { record(base + i + 1, y); });
  }
  return trace;
}

std::vector<double> steady_state_pressures(const LumpedNetwork& network) {
  network.validate();
  const int N = network.node_count;
  const int M = static_cast<int>(network.elements.size());
  const int dim = N + M;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);

  std::vector<bool> ground(N, false);
  std::vector<double> gp(N, 0.0);
  for (const auto& g : network.grounds) {
    ground[g.node] = true;
    gp[g.node] = g.pressure;
  }
  for (int e = 0; e < M; ++e) {
    const auto& el = network.elements[e];
    const int q = N + e;
    switch (el.kind) {
      case ElementKind::resistor:
        A(e, el.node_from) = 1.0;
        A(e, el.node_to) = -1.0;
        A(e, q) = -el.value;
        break;
      case ElementKind::capacitor: // open at steady state
        A(e, q) = 1.0;
        break;
      case ElementKind::inductor: // short at steady state
      case ElementKind::diode:    // treated as forward-conducting short
        A(e, el.node_from) = 1.0;
        A(e, el.node_to) = -1.0;
        break;
    }
  }
  for (int n = 0; n < N; ++n) {
    const int row = M + n;
    if (ground[n]) {
      A(row, n) = 1.0;
      b(row) = gp[n];
    } else {
      for (int e = 0; e < M; ++e) {
        if (network.elements[e].node_to == n) A(row, N + e) += 1.0;
        if (network.elements[e].node_from == n) A(row, N + e) -= 1.0;
      }
      for (const auto& in : network.inflows)
        if (in.node == n) b(row) -= in.waveform.mean();
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw std::runtime_error("steady_state_pressures: singular system");
  Eigen::VectorXd y = lu.solve(b);
  return {y.data(), y.data() + N};
}

namespace {

PeriodicWaveform cycle_waveform(const std::vector<double>& series, double dt,
                                double period, long m, std::size_t start) {
  std::vector<std::pair<double, double>> samples(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i)
    samples[i] = {static_cast<double>(i) * dt, series[start + i]};
  return PeriodicWaveform(period, std::move(samples));
}

/*! Cycle-recurrence error: the state of the 0D model is fully captured by the
 *  monitored series, so comparing cycle start and end values (normalized by
 *  the in-cycle magnitude) bounds the cyclic error of the means. */
double recurrence_error(const std::vector<std::vector<double>>& cycle_series) {
  double err = 0.0;
  for (const auto& s : cycle_series) {
    double scale = 0.0;
    for (double v : s) scale = std::max(scale, std::abs(v));
    const double diff = std::abs(s.back() - s.front());
    err = std::max(err, scale > 0.0 ? diff / scale : diff);
  }
  return err;
}

} // namespace

PeriodicRunResult run_rcr_to_periodic(const RcrParameters& params,
                                      const PeriodicWaveform& inflow, double dt,
                                      const PeriodicRunOptions& options) {
  if (!(options.epsilon > 0.0))
    throw std::invalid_argument("run_rcr_to_periodic: epsilon must be > 0");
  const double T = inflow.period();
  const long m = aligned_steps_per_cycle(T, dt);

  PeriodicRunResult result;
  result.mean_history.assign(1, CycleMeans{T, {}});
  double p = options.p_initial;
  SolutionTrace cycle;
  for (int n = 0; n < options.max_cycles; ++n) {
    cycle = simulate_rcr_rk4(params, inflow, p, dt, 1);
    const auto& series = cycle.node_pressure[0];
    result.mean_history[0].values.push_back(mean_over_cycle(series, dt, T, 0));
    result.cycles_used = n + 1;
    result.achieved_error = recurrence_error({series});
    p = series.back();
    if (result.achieved_error <= options.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.pressure_cycles.push_back(
      cycle_waveform(cycle.node_pressure[0], dt, T, m, 0));
  result.cycle_mean.push_back(result.mean_history[0].values.back());
  return result;
}

PeriodicRunResult run_network_to_periodic(const LumpedNetwork& network,
                                          double dt,
                                          const PeriodicRunOptions& options) {
  if (!(options.epsilon > 0.0))
    throw std::invalid_argument("run_network_to_periodic: epsilon must be > 0");
  const double T = network.period();
  const long m = aligned_steps_per_cycle(T, dt);

  std::vector<bool> ground(network.node_count, false);
  for (const auto& g : network.grounds) ground[g.node] = true;
  std::vector<int> monitored;
  for (int n = 0; n < network.node_count; ++n)
    if (!ground[n]) monitored.push_back(n);

  NetworkIntegrator integrator(network, dt, options.network);

  PeriodicRunResult result;
  result.mean_history.assign(monitored.size(), CycleMeans{T, {}});
  std::vector<std::vector<double>> cycle_series(
      monitored.size(), std::vector<double>(static_cast<std::size_t>(m) + 1));

  for (int n = 0; n < options.max_cycles; ++n) {
    for (std::size_t q = 0; q < monitored.size(); ++q)
      cycle_series[q][0] = integrator.state()(monitored[q]);
    integrator.advance_cycle(m, [&](long i, const Eigen::VectorXd& y) {
      for (std::size_t q = 0; q < monitored.size(); ++q)
        cycle_series[q][i + 1] = y(monitored[q]);
    });
    for (std::size_t q = 0; q < monitored.size(); ++q)
      result.mean_history[q].values.push_back(
          mean_over_cycle(cycle_series[q], dt, T, 0));
    result.cycles_used = n + 1;
    result.achieved_error = recurrence_error(cycle_series);
    if (result.achieved_error <= options.epsilon) {
      result.converged = true;
      break;
    }
  }
  for (std::size_t q = 0; q < monitored.size(); ++q) {
    result.pressure_cycles.push_back(cycle_waveform(cycle_series[q], dt, T, m, 0));
    result.cycle_mean.push_back(result.mean_history[q].values.back());
  }
  return result;
}

std::optional<RcrParameters> detect_single_rcr(const LumpedNetwork& network) {
  if (network.elements.size() != 3 || network.inflows.size() != 1)
    return std::nullopt;
  const int inlet = network.inflows[0].node;
  std::vector<bool> ground(network.node_count, false);
  for (const auto& g : network.grounds) {
    if (g.pressure != 0.0) return std::nullopt;
    ground[g.node] = true;
  }
  const LumpedElement* r_prox = nullptr;
  const LumpedElement* r_dist = nullptr;
  const LumpedElement* cap = nullptr;
  int mid = -1;
  for (const auto& e : network.elements) {
    const bool at_inlet = (e.node_from == inlet || e.node_to == inlet);
    if (e.kind == ElementKind::resistor && at_inlet) {
      r_prox = &e;
      mid = (e.node_from == inlet) ? e.node_to : e.node_from;
    }
  }
  if (!r_prox || mid < 0 || ground[mid]) return std::nullopt;
  for (const auto& e : network.elements) {
    if (&e == r_prox) continue;
    const bool at_mid = (e.node_from == mid || e.node_to == mid);
    const int other = (e.node_from == mid) ? e.node_to : e.node_from;
    if (!at_mid || !ground[other]) return std::nullopt;
    if (e.kind == ElementKind::resistor)
      r_dist = &e;
    else if (e.kind == ElementKind::capacitor)
      cap = &e;
    else
      return std::nullopt;
  }
  if (!r_dist || !cap) return std::nullopt;
  return RcrParameters{r_prox->value, cap->value, r_dist->value};
}

} // namespace vasc
