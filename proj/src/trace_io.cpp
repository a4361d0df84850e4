#include "esoform/trace_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "esoform/errors.hpp"
#include "esoform/scenario.hpp"

namespace esoform {

using nlohmann::json;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> trace_columns(int n_agents, int n_axes) {
  std::vector<std::string> cols{"t"};
  for (int i = 1; i <= n_agents; ++i) {
    for (const char* q : {"p", "v", "u", "w", "z"}) {
      for (int d = 1; d <= n_axes; ++d) {
        cols.push_back("a" + std::to_string(i) + "_" + q + std::to_string(d));
      }
    }
  }
  for (const char* q : {"p", "v"}) {
    for (int d = 1; d <= n_axes; ++d) {
      cols.push_back(std::string("kappa_") + q + std::to_string(d));
    }
  }
  cols.push_back("e");
  return cols;
}

namespace {

json meta_to_json(const TraceMetadata& m) {
  json eso = json::array();
  for (const auto& p : m.eso) eso.push_back({p.beta_g, p.beta_z});
  // dump() writes shortest round-trip doubles.
  return {{"name", m.name},
          {"n_agents", m.u_bar_1.size()},
          {"plant", {{"alpha_p", m.plant.alpha_p},
                     {"alpha_v", m.plant.alpha_v},
                     {"n_axes", m.plant.n_axes}}},
          {"u_bar_1", std::vector<double>(m.u_bar_1.data(),
                                          m.u_bar_1.data() + m.u_bar_1.size())},
          {"gain_row", {m.gain.k_p, m.gain.k_v}},
          {"lambda2_used", m.lambda2_used},
          {"observers", eso},
          {"formation", formation_to_json(m.formation)},
          {"disturbance", disturbance_to_json(m.disturbance)}};
}

TraceMetadata meta_from_json(const json& j) {
  try {
    TraceMetadata m;
    m.name = j.at("name").get<std::string>();
    const int agents = j.at("n_agents").get<int>();
    m.plant.alpha_p = j.at("plant").at("alpha_p").get<double>();
    m.plant.alpha_v = j.at("plant").at("alpha_v").get<double>();
    m.plant.n_axes = j.at("plant").at("n_axes").get<int>();
    const auto u = j.at("u_bar_1").get<std::vector<double>>();
    if (static_cast<int>(u.size()) != agents || m.plant.n_axes < 1) {
      throw FormatError("trace metadata dimensions are inconsistent");
    }
    m.u_bar_1 = Eigen::Map<const Eigen::RowVectorXd>(u.data(), agents);
    const auto g = j.at("gain_row").get<std::vector<double>>();
    if (g.size() != 2) throw FormatError("trace metadata gain_row must have 2 entries");
    m.gain = {g[0], g[1]};
    m.lambda2_used = j.at("lambda2_used").get<double>();
    for (const auto& p : j.at("observers")) {
      m.eso.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    m.formation = parse_formation(j.at("formation"), agents, m.plant.n_axes, "meta.formation");
    m.disturbance =
        parse_disturbance(j.at("disturbance"), agents, m.plant.n_axes, "meta.disturbance");
    return m;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& ex) {
    throw FormatError(std::string("invalid trace metadata: ") + ex.what());
  }
}

std::vector<double> parse_row(const std::string& line, std::size_t expected,
                              std::size_t line_no) {
  std::vector<double> values;
  values.reserve(expected);
  const char* p = line.c_str();
  while (true) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(p, &end);
    if (end == p || errno == ERANGE) {
      throw FormatError("line " + std::to_string(line_no) + ": malformed number");
    }
    values.push_back(v);
    p = end;
    if (*p == ',') {
      ++p;
    } else if (*p == '\0' || *p == '\r') {
      break;
    } else {
      throw FormatError("line " + std::to_string(line_no) + ": unexpected character");
    }
  }
  if (values.size() != expected) {
    throw FormatError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected) + " columns, got " +
                      std::to_string(values.size()));
  }
  return values;
}

}  // namespace

void write_trace_csv(std::ostream& os, const SimulationTrace& trace,
                     const TraceMetadata& meta) {
  const int agents = trace.n_agents;
  const int n = trace.n_axes;
  os << "# " << kTraceFormat << " v" << kTraceVersion << "\n";
  os << "# meta " << meta_to_json(meta).dump() << "\n";
  const auto cols = trace_columns(agents, n);
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << "\n";
  for (const auto& s : trace.samples) {
    os << format_number(s.t);
    for (int i = 0; i < agents; ++i) {
      for (int k = 0; k < 2 * n; ++k) os << ',' << format_number(s.x(i, k));
      for (int d = 0; d < n; ++d) os << ',' << format_number(s.u(i, d));
      for (int d = 0; d < n; ++d) os << ',' << format_number(s.omega(i, d));
      for (int d = 0; d < n; ++d) os << ',' << format_number(s.z(i, d));
    }
    for (int k = 0; k < 2 * n; ++k) os << ',' << format_number(s.kappa[k]);
    os << ',' << format_number(s.error) << "\n";
  }
  os << "# end " << trace.samples.size() << "\n";
}

LoadedTrace read_trace_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    if (!std::getline(is, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  const std::string magic = std::string("# ") + kTraceFormat + " v";
  if (!next() || line.rfind(magic, 0) != 0) {
    throw FormatError("not an esoform trace (missing '" + magic + "N' header)");
  }
  const std::string version = line.substr(magic.size());
  if (version != std::to_string(kTraceVersion)) {
    throw FormatError("trace format version " + version + " is not supported (expected " +
                      std::to_string(kTraceVersion) + ")");
  }
  if (!next() || line.rfind("# meta ", 0) != 0) {
    throw FormatError("missing '# meta' line");
  }
  json meta_json;
  try {
    meta_json = json::parse(line.substr(7));
  } catch (const json::parse_error& ex) {
    throw FormatError(std::string("trace metadata is not valid JSON: ") + ex.what());
  }

  LoadedTrace out;
  out.meta = meta_from_json(meta_json);
  const int agents = static_cast<int>(out.meta.u_bar_1.size());
  const int n = out.meta.plant.n_axes;
  out.trace.n_agents = agents;
  out.trace.n_axes = n;

  const auto cols = trace_columns(agents, n);
  std::string header;
  for (std::size_t c = 0; c < cols.size(); ++c) header += (c ? "," : "") + cols[c];
  if (!next() || line != header) throw FormatError("column header does not match metadata");

  bool ended = false;
  while (next()) {
    if (line.rfind("# end ", 0) == 0) {
      const auto count = std::strtoull(line.c_str() + 6, nullptr, 10);
      if (count != out.trace.samples.size()) {
        throw FormatError("row count " + std::to_string(out.trace.samples.size()) +
                          " does not match footer " + std::to_string(count));
      }
      ended = true;
      break;
    }
    const auto v = parse_row(line, cols.size(), line_no);
    TraceSample s;
    s.t = v[0];
    s.x.resize(agents, 2 * n);
    s.u.resize(agents, n);
    s.omega.resize(agents, n);
    s.z.resize(agents, n);
    std::size_t c = 1;
    for (int i = 0; i < agents; ++i) {
      for (int k = 0; k < 2 * n; ++k) s.x(i, k) = v[c++];
      for (int d = 0; d < n; ++d) s.u(i, d) = v[c++];
      for (int d = 0; d < n; ++d) s.omega(i, d) = v[c++];
      for (int d = 0; d < n; ++d) s.z(i, d) = v[c++];
    }
    s.kappa.resize(2 * n);
    for (int k = 0; k < 2 * n; ++k) s.kappa[k] = v[c++];
    s.error = v[c];
    if (!out.trace.samples.empty() && !(s.t > out.trace.samples.back().t)) {
      throw FormatError("line " + std::to_string(line_no) + ": time is not increasing");
    }
    // Deviation is derived data; rebuild it from the formation spec.
    Eigen::MatrixXd f(agents, 2 * n);
    for (int i = 0; i < agents; ++i) {
      const auto fs = eval_formation(out.meta.formation, i, s.t);
      f.row(i).head(n) = fs.position.transpose();
      f.row(i).tail(n) = fs.velocity.transpose();
    }
    s.deviation = (s.x - f).rowwise() - s.kappa.transpose();
    out.trace.samples.push_back(std::move(s));
  }
  if (!ended) throw FormatError("trace is truncated (missing '# end' footer)");
  if (out.trace.samples.empty()) throw FormatError("trace has no rows");
  return out;
}

LoadedTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open trace");
  return read_trace_csv(in);
}

void write_center_csv(std::ostream& os, const CenterDecomposition& dec, int n_axes) {
  os << "t";
  for (const char* series : {"c0", "cz", "cf", "kappa_hat"}) {
    for (const char* q : {"p", "v"}) {
      for (int d = 1; d <= n_axes; ++d) os << ',' << series << '_' << q << d;
    }
  }
  os << ",r\n";
  for (std::size_t k = 0; k < dec.times.size(); ++k) {
    os << format_number(dec.times[k]);
    for (const auto* series : {&dec.c0, &dec.cz, &dec.cf, &dec.kappa_hat}) {
      const auto& v = (*series)[k];
      for (Eigen::Index c = 0; c < v.size(); ++c) os << ',' << format_number(v[c]);
    }
    os << ',' << format_number(dec.residual[k]) << "\n";
  }
}

}  // namespace esoform
