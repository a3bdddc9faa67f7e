#ifndef VASC_IO_HPP
#define VASC_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vasc/centerline_map.hpp"
#include "vasc/network.hpp"
#include "vasc/periodicity.hpp"

namespace vasc {

/*! Malformed input file; the message names the file, line, and offending
 *  field. CLI exit code 2. */
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/*! Full-precision (17 significant digits) decimal formatting; write-then-read
 *  reproduces the in-memory value exactly. */
std::string format_full(double value);

// --- mesh ------------------------------------------------------------------
void write_mesh(const std::filesystem::path& path, const VolumeMesh& mesh);
VolumeMesh read_mesh(const std::filesystem::path& path);

// --- centerline solution ----------------------------------------------------
void write_centerline(const std::filesystem::path& path, const Centerline& cl);
Centerline read_centerline(const std::filesystem::path& path);

// --- initial-condition field -------------------------------------------------
struct InitialConditionField;
void write_initial_condition(const std::filesystem::path& path,
                             const std::vector<double>& pressure,
                             const std::vector<Vec3>& velocity);
void read_initial_condition(const std::filesystem::path& path,
                            std::vector<double>& pressure,
                            std::vector<Vec3>& velocity);

// --- inflow waveform ---------------------------------------------------------
void write_waveform(const std::filesystem::path& path,
                    const PeriodicWaveform& waveform);
PeriodicWaveform read_waveform(const std::filesystem::path& path);

// --- lumped network ----------------------------------------------------------
struct OutletSpec {
  std::string id;
  int pressure_node = -1;
  int flow_element = -1; // index into the element list
};

struct NetworkSpec {
  LumpedNetwork network;
  std::vector<OutletSpec> outlets;
};

/*! Reads a network description. INFLOW waveform paths resolve relative to the
 *  network file; a non-empty inflow_override replaces every referenced
 *  waveform file. */
NetworkSpec read_network(const std::filesystem::path& path,
                         const std::filesystem::path& inflow_override = {});
void write_network(const std::filesystem::path& path, const NetworkSpec& spec,
                   const std::vector<std::string>& inflow_files);

// --- trace file --------------------------------------------------------------
/*! Writes per-outlet flow/pressure columns on the shared time grid. */
void write_trace(const std::filesystem::path& path, const OutletTraceSet& traces);

/*! Reads a trace file; outlet RCR parameters are left zeroed and must be
 *  attached from a boundary-condition file before analysis. */
OutletTraceSet read_trace(const std::filesystem::path& path);

/*! Boundary-condition file: one "<outlet-id> <Rp> <C> <Rd>" line per outlet. */
std::vector<std::pair<std::string, RcrParameters>> read_bc_file(
    const std::filesystem::path& path);
void write_bc_file(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, RcrParameters>>& bcs);

// --- node-map sidecar ---------------------------------------------------------
void write_node_map(const std::filesystem::path& path, const NodeMap& map);
NodeMap read_node_map(const std::filesystem::path& path);

// --- machine-readable report ---------------------------------------------------
/*! key = value lines for the convergence report. */
void write_report(const std::filesystem::path& path, const ConvergenceReport& report);

} // namespace vasc

#endif
