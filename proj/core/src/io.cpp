#include "vasc/io.hpp"
#include "vasc/init_field.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vasc {

std::string format_full(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

class LineReader {
public:
  explicit LineReader(const std::filesystem::path& path)
      : path_(path), in_(path) {
    if (!in_) throw ParseError("cannot open " + path.string());
  }

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  std::string expect_line(const std::string& what) {
    std::string line;
    if (!next(line)) parse_fail(path_, line_no_ + 1, "unexpected end of file, expected " + what);
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const {
    parse_fail(path_, line_no_, what);
  }

  std::size_t line() const { return line_no_; }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

double to_double(LineReader& r, const std::string& token, const std::string& field) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    r.fail("invalid number for " + field + ": '" + token + "'");
  }
}

long to_long(LineReader& r, const std::string& token, const std::string& field) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    r.fail("invalid integer for " + field + ": '" + token + "'");
  }
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  for (std::string t; ss >> t;) tokens.push_back(std::move(t));
  return tokens;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      tokens.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  tokens.push_back(cur);
  return tokens;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::size_t expect_count(LineReader& r, const std::string& keyword) {
  const std::string line = r.expect_line("'" + keyword + " <count>'");
  const auto tokens = split_ws(line);
  if (tokens.size() != 2 || tokens[0] != keyword)
    r.fail("expected '" + keyword + " <count>', got '" + line + "'");
  const long n = to_long(r, tokens[1], keyword + " count");
  if (n < 0) r.fail(keyword + " count must be >= 0");
  return static_cast<std::size_t>(n);
}

} // namespace

// --- mesh --------------------------------------------------------------------

void write_mesh(const std::filesystem::path& path, const VolumeMesh& mesh) {
  auto out = open_out(path);
  out << "nodes " << mesh.nodes.size() << "\n";
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    out << i << " " << format_full(mesh.nodes[i].x()) << " "
        << format_full(mesh.nodes[i].y()) << " "
        << format_full(mesh.nodes[i].z()) << "\n";
  out << "tets " << mesh.tets.size() << "\n";
  for (const auto& t : mesh.tets)
    out << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << "\n";
  out << "walls " << mesh.wall_faces.size() << "\n";
  for (const auto& f : mesh.wall_faces)
    out << f[0] << " " << f[1] << " " << f[2] << "\n";
}

VolumeMesh read_mesh(const std::filesystem::path& path) {
  LineReader r(path);
  VolumeMesh mesh;
  const std::size_t n_nodes = expect_count(r, "nodes");
  mesh.nodes.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const auto tokens = split_ws(r.expect_line("node line"));
    if (tokens.size() != 4) r.fail("node line needs 'id x y z'");
    const long id = to_long(r, tokens[0], "node id");
    if (id != static_cast<long>(i)) r.fail("node ids must be 0-based and consecutive");
    mesh.nodes[i] = Vec3(to_double(r, tokens[1], "x"), to_double(r, tokens[2], "y"),
                         to_double(r, tokens[3], "z"));
  }
  const std::size_t n_tets = expect_count(r, "tets");
  mesh.tets.resize(n_tets);
  for (std::size_t i = 0; i < n_tets; ++i) {
    const auto tokens = split_ws(r.expect_line("tet line"));
    if (tokens.size() != 4) r.fail("tet line needs 4 node ids");
    for (int k = 0; k < 4; ++k)
      mesh.tets[i][k] = static_cast<int>(to_long(r, tokens[k], "tet node id"));
  }
  const std::size_t n_walls = expect_count(r, "walls");
  mesh.wall_faces.resize(n_walls);
  for (std::size_t i = 0; i < n_walls; ++i) {
    const auto tokens = split_ws(r.expect_line("wall face line"));
    if (tokens.size() != 3) r.fail("wall face line needs 3 node ids");
    for (int k = 0; k < 3; ++k)
      mesh.wall_faces[i][k] = static_cast<int>(to_long(r, tokens[k], "wall node id"));
  }
  mesh.validate();
  return mesh;
}

// --- centerline --------------------------------------------------------------

void write_centerline(const std::filesystem::path& path, const Centerline& cl) {
  auto out = open_out(path);
  out << "centerline " << cl.nodes.size() << "\n";
  for (std::size_t i = 0; i < cl.nodes.size(); ++i) {
    const auto& n = cl.nodes[i];
    out << i << " " << n.branch << " " << format_full(n.position.x()) << " "
        << format_full(n.position.y()) << " " << format_full(n.position.z())
        << " " << format_full(n.tangent.x()) << " " << format_full(n.tangent.y())
        << " " << format_full(n.tangent.z()) << " " << format_full(n.area) << " "
        << format_full(n.pressure) << " " << format_full(n.flow) << "\n";
  }
}

Centerline read_centerline(const std::filesystem::path& path) {
  LineReader r(path);
  Centerline cl;
  const std::size_t n = expect_count(r, "centerline");
  cl.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto tokens = split_ws(r.expect_line("centerline node line"));
    if (tokens.size() != 11)
      r.fail("centerline node line needs 'id branch x y z tx ty tz area pressure flow'");
    if (to_long(r, tokens[0], "node id") != static_cast<long>(i))
      r.fail("centerline node ids must be 0-based and consecutive");
    auto& node = cl.nodes[i];
    node.branch = static_cast<int>(to_long(r, tokens[1], "branch id"));
    node.position = Vec3(to_double(r, tokens[2], "x"), to_double(r, tokens[3], "y"),
                         to_double(r, tokens[4], "z"));
    node.tangent = Vec3(to_double(r, tokens[5], "tx"), to_double(r, tokens[6], "ty"),
                        to_double(r, tokens[7], "tz"));
    node.area = to_double(r, tokens[8], "area");
    node.pressure = to_double(r, tokens[9], "pressure");
    node.flow = to_double(r, tokens[10], "flow");
  }
  cl.validate();
  return cl;
}

// --- initial condition ---------------------------------------------------------

void write_initial_condition(const std::filesystem::path& path,
                             const std::vector<double>& pressure,
                             const std::vector<Vec3>& velocity) {
  if (pressure.size() != velocity.size())
    throw std::invalid_argument("write_initial_condition: field size mismatch");
  auto out = open_out(path);
  out << "initfield " << pressure.size() << "\n";
  for (std::size_t i = 0; i < pressure.size(); ++i)
    out << i << " " << format_full(pressure[i]) << " "
        << format_full(velocity[i].x()) << " " << format_full(velocity[i].y())
        << " " << format_full(velocity[i].z()) << "\n";
}

void read_initial_condition(const std::filesystem::path& path,
                            std::vector<double>& pressure,
                            std::vector<Vec3>& velocity) {
  LineReader r(path);
  const std::size_t n = expect_count(r, "initfield");
  pressure.resize(n);
  velocity.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto tokens = split_ws(r.expect_line("field line"));
    if (tokens.size() != 5) r.fail("field line needs 'id pressure vx vy vz'");
    if (to_long(r, tokens[0], "node id") != static_cast<long>(i))
      r.fail("field node ids must be 0-based and consecutive");
    pressure[i] = to_double(r, tokens[1], "pressure");
    velocity[i] = Vec3(to_double(r, tokens[2], "vx"), to_double(r, tokens[3], "vy"),
                       to_double(r, tokens[4], "vz"));
  }
}

// --- waveform -------------------------------------------------------------------

void write_waveform(const std::filesystem::path& path,
                    const PeriodicWaveform& waveform) {
  auto out = open_out(path);
  out << "# period " << format_full(waveform.period()) << "\n";
  for (const auto& [t, q] : waveform.samples())
    out << format_full(t) << "," << format_full(q) << "\n";
}

PeriodicWaveform read_waveform(const std::filesystem::path& path) {
  LineReader r(path);
  const auto header = split_ws(r.expect_line("'# period <T>'"));
  if (header.size() != 3 || header[0] != "#" || header[1] != "period")
    r.fail("expected period metadata line '# period <T>'");
  const double period = to_double(r, header[2], "period");
  std::vector<std::pair<double, double>> samples;
  std::string line;
  while (r.next(line)) {
    const auto tokens = split_csv(line);
    if (tokens.size() != 2) r.fail("waveform line needs 't,Q'");
    samples.emplace_back(to_double(r, tokens[0], "t"), to_double(r, tokens[1], "Q"));
  }
  try {
    return PeriodicWaveform(period, std::move(samples));
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
}

// --- network -------------------------------------------------------------------

NetworkSpec read_network(const std::filesystem::path& path,
                         const std::filesystem::path& inflow_override) {
  LineReader r(path);
  NetworkSpec spec;
  int max_node = -1;
  std::string line;
  while (r.next(line)) {
    if (line[0] == '#') continue;
    const auto tokens = split_ws(line);
    const std::string& kind = tokens[0];
    auto track = [&](int n) { max_node = std::max(max_node, n); return n; };
    if (kind == "RESISTOR" || kind == "CAPACITOR" || kind == "INDUCTOR") {
      if (tokens.size() != 4) r.fail(kind + " line needs 'kind value from to'");
      LumpedElement e;
      e.kind = kind == "RESISTOR"    ? ElementKind::resistor
               : kind == "CAPACITOR" ? ElementKind::capacitor
                                     : ElementKind::inductor;
      e.value = to_double(r, tokens[1], "element value");
      e.node_from = track(static_cast<int>(to_long(r, tokens[2], "node_from")));
      e.node_to = track(static_cast<int>(to_long(r, tokens[3], "node_to")));
      spec.network.elements.push_back(e);
    } else if (kind == "DIODE") {
      if (tokens.size() != 3) r.fail("DIODE line needs 'DIODE from to'");
      LumpedElement e;
      e.kind = ElementKind::diode;
      e.node_from = track(static_cast<int>(to_long(r, tokens[1], "node_from")));
      e.node_to = track(static_cast<int>(to_long(r, tokens[2], "node_to")));
      spec.network.elements.push_back(e);
    } else if (kind == "INFLOW") {
      if (tokens.size() != 3) r.fail("INFLOW line needs 'INFLOW node waveform-file'");
      const int node = track(static_cast<int>(to_long(r, tokens[1], "inflow node")));
      std::filesystem::path wf = inflow_override.empty()
                                     ? path.parent_path() / tokens[2]
                                     : inflow_override;
      spec.network.inflows.push_back(InflowBc{node, read_waveform(wf)});
    } else if (kind == "GROUND") {
      if (tokens.size() != 3) r.fail("GROUND line needs 'GROUND node pressure'");
      GroundBc g;
      g.node = track(static_cast<int>(to_long(r, tokens[1], "ground node")));
      g.pressure = to_double(r, tokens[2], "ground pressure");
      spec.network.grounds.push_back(g);
    } else if (kind == "OUTLET") {
      if (tokens.size() != 4)
        r.fail("OUTLET line needs 'OUTLET id pressure-node flow-element'");
      OutletSpec o;
      o.id = tokens[1];
      o.pressure_node = track(static_cast<int>(to_long(r, tokens[2], "outlet node")));
      o.flow_element = static_cast<int>(to_long(r, tokens[3], "outlet flow element"));
      spec.outlets.push_back(o);
    } else {
      r.fail("unknown line kind '" + kind + "'");
    }
  }
  spec.network.node_count = max_node + 1;
  for (const auto& o : spec.outlets)
    if (o.flow_element < 0 ||
        o.flow_element >= static_cast<int>(spec.network.elements.size()))
      throw ParseError(path.string() + ": OUTLET " + o.id +
                       " references element " + std::to_string(o.flow_element) +
                       " out of range");
  try {
    spec.network.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return spec;
}

void write_network(const std::filesystem::path& path, const NetworkSpec& spec,
                   const std::vector<std::string>& inflow_files) {
  if (inflow_files.size() != spec.network.inflows.size())
    throw std::invalid_argument("write_network: one waveform file per inflow required");
  auto out = open_out(path);
  for (const auto& e : spec.network.elements) {
    switch (e.kind) {
      case ElementKind::resistor:
        out << "RESISTOR " << format_full(e.value);
        break;
      case ElementKind::capacitor:
        out << "CAPACITOR " << format_full(e.value);
        break;
      case ElementKind::inductor:
        out << "INDUCTOR " << format_full(e.value);
        break;
      case ElementKind::diode:
        out << "DIODE";
        break;
    }
    out << " " << e.node_from << " " << e.node_to << "\n";
  }
  for (std::size_t i = 0; i < spec.network.inflows.size(); ++i)
    out << "INFLOW " << spec.network.inflows[i].node << " " << inflow_files[i] << "\n";
  for (const auto& g : spec.network.grounds)
    out << "GROUND " << g.node << " " << format_full(g.pressure) << "\n";
  for (const auto& o : spec.outlets)
    out << "OUTLET " << o.id << " " << o.pressure_node << " " << o.flow_element << "\n";
}

// --- trace ----------------------------------------------------------------------

void write_trace(const std::filesystem::path& path, const OutletTraceSet& traces) {
  auto out = open_out(path);
  out << "# period " << format_full(traces.period) << "\n";
  out << "time";
  for (const auto& o : traces.outlets)
    out << ",flow:" << o.id << ",pressure:" << o.id;
  out << "\n";
  const std::size_t len = traces.outlets.at(0).flow.size();
  for (std::size_t k = 0; k < len; ++k) {
    out << format_full(static_cast<double>(k) * traces.dt);
    for (const auto& o : traces.outlets)
      out << "," << format_full(o.flow[k]) << "," << format_full(o.pressure[k]);
    out << "\n";
  }
}

OutletTraceSet read_trace(const std::filesystem::path& path) {
  LineReader r(path);
  OutletTraceSet traces;
  const auto meta = split_ws(r.expect_line("'# period <T>'"));
  if (meta.size() != 3 || meta[0] != "#" || meta[1] != "period")
    r.fail("expected period metadata line '# period <T>'");
  traces.period = to_double(r, meta[2], "period");

  const auto header = split_csv(r.expect_line("CSV header"));
  if (header.empty() || header[0] != "time")
    r.fail("malformed header: column 0 must be 'time'");
  if (header.size() < 3 || header.size() % 2 == 0)
    r.fail("malformed header: expected paired flow:<id>,pressure:<id> columns");
  for (std::size_t c = 1; c < header.size(); c += 2) {
    const std::string& fc = header[c];
    const std::string& pc = header[c + 1];
    if (fc.rfind("flow:", 0) != 0)
      r.fail("malformed header: column " + std::to_string(c) +
             " ('" + fc + "') must be flow:<id>");
    if (pc.rfind("pressure:", 0) != 0)
      r.fail("malformed header: column " + std::to_string(c + 1) +
             " ('" + pc + "') must be pressure:<id>");
    const std::string id = fc.substr(5);
    if (pc.substr(9) != id)
      r.fail("malformed header: column " + std::to_string(c + 1) +
             " pairs outlet '" + pc.substr(9) + "' with flow outlet '" + id + "'");
    OutletTrace o;
    o.id = id;
    traces.outlets.push_back(std::move(o));
  }

  std::vector<double> time;
  std::string line;
  while (r.next(line)) {
    const auto tokens = split_csv(line);
    if (tokens.size() != header.size())
      r.fail("row has " + std::to_string(tokens.size()) + " columns, expected " +
             std::to_string(header.size()));
    time.push_back(to_double(r, tokens[0], "time"));
    for (std::size_t o = 0; o < traces.outlets.size(); ++o) {
      traces.outlets[o].flow.push_back(to_double(r, tokens[1 + 2 * o], "flow"));
      traces.outlets[o].pressure.push_back(
          to_double(r, tokens[2 + 2 * o], "pressure"));
    }
  }
  if (time.size() < 2) r.fail("trace needs at least 2 rows");
  traces.dt = time[1] - time[0];
  if (!(traces.dt > 0.0)) r.fail("time column must be strictly increasing");
  for (std::size_t k = 1; k < time.size(); ++k) {
    const double step = time[k] - time[k - 1];
    if (std::abs(step - traces.dt) > 1e-6 * traces.dt)
      r.fail("non-uniform time step at row " + std::to_string(k));
  }
  return traces;
}

// --- boundary conditions ----------------------------------------------------------

std::vector<std::pair<std::string, RcrParameters>> read_bc_file(
    const std::filesystem::path& path) {
  LineReader r(path);
  std::vector<std::pair<std::string, RcrParameters>> bcs;
  std::string line;
  while (r.next(line)) {
    if (line[0] == '#') continue;
    const auto tokens = split_ws(line);
    if (tokens.size() != 4) r.fail("boundary line needs '<id> <Rp> <C> <Rd>'");
    RcrParameters p{to_double(r, tokens[1], "Rp"), to_double(r, tokens[2], "C"),
                    to_double(r, tokens[3], "Rd")};
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
    bcs.emplace_back(tokens[0], p);
  }
  return bcs;
}

void write_bc_file(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, RcrParameters>>& bcs) {
  auto out = open_out(path);
  for (const auto& [id, p] : bcs)
    out << id << " " << format_full(p.r_proximal) << " "
        << format_full(p.capacitance) << " " << format_full(p.r_distal) << "\n";
}

// --- node map sidecar ---------------------------------------------------------------

namespace {
constexpr char kNodeMapMagic[8] = {'V', 'A', 'S', 'C', 'N', 'M', 'A', 'P'};
}

void write_node_map(const std::filesystem::path& path, const NodeMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kNodeMapMagic, sizeof(kNodeMapMagic));
  const std::uint64_t n = map.index.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&map.layer_count), sizeof(map.layer_count));
  out.write(reinterpret_cast<const char*>(&map.centerline_count),
            sizeof(map.centerline_count));
  out.write(reinterpret_cast<const char*>(map.index.data()),
            static_cast<std::streamsize>(n * sizeof(std::int32_t)));
  out.write(reinterpret_cast<const char*>(map.layer.data()),
            static_cast<std::streamsize>(n * sizeof(std::int32_t)));
}

NodeMap read_node_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kNodeMapMagic, sizeof(magic)) != 0)
    throw ParseError(path.string() + ": not a node-map sidecar");
  std::uint64_t n = 0;
  NodeMap map;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&map.layer_count), sizeof(map.layer_count));
  in.read(reinterpret_cast<char*>(&map.centerline_count), sizeof(map.centerline_count));
  map.index.resize(n);
  map.layer.resize(n);
  in.read(reinterpret_cast<char*>(map.index.data()),
          static_cast<std::streamsize>(n * sizeof(std::int32_t)));
  in.read(reinterpret_cast<char*>(map.layer.data()),
          static_cast<std::streamsize>(n * sizeof(std::int32_t)));
  if (!in) throw ParseError(path.string() + ": truncated node-map sidecar");
  return map;
}

// --- report --------------------------------------------------------------------------

void write_report(const std::filesystem::path& path, const ConvergenceReport& report) {
  auto out = open_out(path);
  out << "epsilon_target = " << format_full(report.epsilon_target) << "\n";
  out << "converged = " << (report.converged ? "true" : "false") << "\n";
  out << "flow_periodic = " << (report.flow_periodic ? "true" : "false") << "\n";
  out << "prediction_provisional = "
      << (report.prediction_provisional ? "true" : "false") << "\n";
  out << "mean_outlet_tau_over_T = " << format_full(report.mean_outlet_tau_over_T)
      << "\n";
  out << "cycles_to_target = " << report.cycles_to_target << "\n";
  for (std::size_t o = 0; o < report.outlets.size(); ++o) {
    const auto& e = report.outlets[o];
    const std::string prefix = "outlet." + e.id + ".";
    out << prefix << "predicted_mean = " << format_full(report.predicted_mean[o])
        << "\n";
    out << prefix << "tau_over_T_fitted = "
        << format_full(report.tau_over_T_fitted[o]) << "\n";
    out << prefix << "eps_asym_pressure = " << format_full(e.eps_asym_pressure.back())
        << "\n";
    out << prefix << "eps_asym_flow = " << format_full(e.eps_asym_flow.back()) << "\n";
    out << prefix << "eps_cyclic = "
        << (e.eps_cyclic.empty() ? "nan" : format_full(e.eps_cyclic.back())) << "\n";
    out << prefix << "eps_asym_max_over_time = "
        << format_full(e.eps_asym_max_over_time) << "\n";
  }
}

} // namespace vasc
