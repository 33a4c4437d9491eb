#include "csivc/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "csivc/errors.hpp"

namespace csivc::io {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(std::string_view field, std::string_view what) {
  if (field == "nan") return NAN;
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ValidationError(std::string(what) + ": not a number: '" + std::string(field) + "'");
  }
  return v;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  for (std::size_t start = 0;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : "nan"; }

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

std::vector<RawRow> read_observations_csv(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");
  const auto header = split(chomp(line));
  if (header.size() < 4 || header[0] != "y" || header[1] != "delta" || header[2] != "t") {
    throw ValidationError(path.string() + ": header must be y,delta,t,x1,...,xd");
  }
  const std::size_t d = header.size() - 3;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[3 + j] != "x" + std::to_string(j + 1)) {
      throw ValidationError(path.string() + ": header column " + std::to_string(4 + j) + " must be x" +
                            std::to_string(j + 1));
    }
  }
  std::vector<RawRow> rows;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    const auto body = chomp(line);
    if (body.empty()) continue;
    const auto where = path.string() + " line " + std::to_string(line_no) + " (row " + std::to_string(rows.size()) + ")";
    const auto fields = split(body);
    if (fields.size() != header.size()) {
      throw ValidationError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    RawRow row;
    row.y = parse_number(fields[0], where + " y");
    const auto* dend = fields[1].data() + fields[1].size();
    const auto [ptr, ec] = std::from_chars(fields[1].data(), dend, row.delta);
    if (fields[1].empty() || ec != std::errc() || ptr != dend) {
      throw ValidationError(where + ": delta is not an integer: '" + std::string(fields[1]) + "'");
    }
    row.t = parse_number(fields[2], where + " t");
    for (std::size_t j = 0; j < d; ++j) row.x.push_back(parse_number(fields[3 + j], where + " x" + std::to_string(j + 1)));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_observations_csv(const std::filesystem::path& path, const Dataset& data) {
  auto out = open_out(path);
  out << "y,delta,t";
  for (std::size_t j = 0; j < data.dim(); ++j) out << ",x" << j + 1;
  out << '\n';
  for (const auto& r : data.rows()) {
    out << format_number(r.y) << ',' << r.delta << ',' << format_number(r.t);
    for (double v : r.x) out << ',' << format_number(v);
    out << '\n';
  }
  finish(out, path);
}

void write_curves_csv(const std::filesystem::path& path, const CoefficientCurves& curves) {
  auto out = open_out(path);
  out << "t0";
  for (std::size_t j = 0; j < curves.dim(); ++j) out << ",beta_" << j + 1;
  out << '\n';
  for (std::size_t k = 0; k < curves.grid.size(); ++k) {
    out << format_number(curves.grid[k]);
    for (double v : curves.directions[k].components()) out << ',' << format_number(v);
    out << '\n';
  }
  finish(out, path);
}

CoefficientCurves read_curves_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");
  const std::size_t columns = split(chomp(line)).size();
  if (columns < 2) throw ValidationError(path.string() + ": need t0 and at least one beta column");
  CoefficientCurves curves;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    const auto fields = split(chomp(line));
    const auto where = path.string() + " line " + std::to_string(line_no);
    if (fields.size() != columns) throw ValidationError(where + ": wrong field count");
    curves.grid.push_back(parse_number(fields[0], where));
    std::vector<double> v;
    for (std::size_t j = 1; j < columns; ++j) v.push_back(parse_number(fields[j], where));
    curves.directions.push_back(normalize_direction(v));
  }
  check_curves(curves);
  return curves;
}

void write_link_csv(const std::filesystem::path& path, const LinkEstimate& link) {
  auto out = open_out(path);
  out << "u,m_hat,defined\n";
  for (std::size_t k = 0; k < link.u_grid.size(); ++k) {
    out << format_number(link.u_grid[k]) << ',' << optional_number(link.m_hat[k]) << ','
        << (link.m_hat[k] ? 1 : 0) << '\n';
  }
  finish(out, path);
}

void write_summary_csv(const std::filesystem::path& path, const SimSummary& summary) {
  auto out = open_out(path);
  out << "t0";
  for (std::size_t j = 0; j < summary.coefficients.size(); ++j) {
    out << ",beta_" << j + 1 << "_median,beta_" << j + 1 << "_q05,beta_" << j + 1 << "_q95";
  }
  out << '\n';
  for (std::size_t k = 0; k < summary.t_grid.size(); ++k) {
    out << format_number(summary.t_grid[k]);
    for (const auto& band : summary.coefficients) {
      out << ',' << optional_number(band.median[k]) << ',' << optional_number(band.q05[k]) << ','
          << optional_number(band.q95[k]);
    }
    out << '\n';
  }
  finish(out, path);
}

void write_link_summary_csv(const std::filesystem::path& path, const SimSummary& summary) {
  auto out = open_out(path);
  out << "u,median,q05,q95,count\n";
  const auto& band = summary.link;
  for (std::size_t k = 0; k < summary.u_grid.size(); ++k) {
    out << format_number(summary.u_grid[k]) << ',' << optional_number(band.median[k]) << ','
        << optional_number(band.q05[k]) << ',' << optional_number(band.q95[k]) << ',' << band.defined[k] << '\n';
  }
  finish(out, path);
}

void write_replications_csv(const std::filesystem::path& path, const SimSummary& summary) {
  auto out = open_out(path);
  out << "rep,curve,grid,value\n";
  for (const auto& r : summary.replications) {
    if (!r.ok) continue;
    for (std::size_t j = 0; j < r.coefficients.size(); ++j) {
      for (std::size_t k = 0; k < summary.t_grid.size(); ++k) {
        out << r.rep << ",beta_" << j + 1 << ',' << format_number(summary.t_grid[k]) << ','
            << format_number(r.coefficients[j][k]) << '\n';
      }
    }
    for (std::size_t k = 0; k < summary.u_grid.size(); ++k) {
      if (r.link[k]) out << r.rep << ",m_hat," << format_number(summary.u_grid[k]) << ',' << format_number(*r.link[k]) << '\n';
    }
  }
  finish(out, path);
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& section) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("config: unknown key '" + key + "' in " + section);
    }
  }
}

template <class T>
void read_if(const json& obj, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

FitConfig parse_fit(const json& j) {
  if (!j.is_object()) throw ValidationError("config: 'fit' must be an object");
  reject_unknown(j, {"t_grid_size", "link_grid", "bandwidths", "link_bandwidth_cv", "kernel", "optimizer",
                     "independent_grid", "threads"},
                 "fit");
  FitConfig c;
  read_if(j, "t_grid_size", c.t_grid_size);
  read_if(j, "link_bandwidth_cv", c.link_bandwidth_cv);
  read_if(j, "independent_grid", c.independent_grid);
  read_if(j, "threads", c.threads);
  if (j.contains("kernel")) {
    std::string name;
    read_if(j, "kernel", name);
    c.kernel.family = parse_kernel_family(name);
  }
  if (j.contains("link_grid")) {
    const auto& g = j.at("link_grid");
    if (!g.is_object()) throw ValidationError("config: 'link_grid' must be an object");
    reject_unknown(g, {"min", "max", "count"}, "fit.link_grid");
    read_if(g, "min", c.link_grid.min);
    read_if(g, "max", c.link_grid.max);
    read_if(g, "count", c.link_grid.count);
  }
  if (j.contains("bandwidths")) {
    const auto& b = j.at("bandwidths");
    if (b.is_string()) {
      if (b.get<std::string>() != "auto") throw ValidationError("config: bandwidths must be \"auto\" or an object");
    } else if (b.is_object()) {
      reject_unknown(b, {"h1", "h2", "h_link"}, "fit.bandwidths");
      if (!b.contains("h1") || !b.contains("h2") || !b.contains("h_link")) {
        throw ValidationError("config: bandwidths object needs h1, h2 and h_link");
      }
      Bandwidths bw;
      read_if(b, "h1", bw.h1);
      read_if(b, "h2", bw.h2);
      read_if(b, "h_link", bw.h_link);
      check_bandwidths(bw);
      c.bandwidths = bw;
    } else {
      throw ValidationError("config: bandwidths must be \"auto\" or an object");
    }
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    if (!o.is_object()) throw ValidationError("config: 'optimizer' must be an object");
    reject_unknown(o, {"restarts", "max_iterations", "tolerance"}, "fit.optimizer");
    read_if(o, "restarts", c.optimizer.restarts);
    read_if(o, "max_iterations", c.optimizer.max_iterations);
    read_if(o, "tolerance", c.optimizer.tolerance);
  }
  check_fit_config(c);
  return c;
}

SimConfig parse_sim(const json& j) {
  if (!j.is_object()) throw ValidationError("config: 'simulation' must be an object");
  reject_unknown(j, {"n", "d", "reps", "censor_target", "noise_sd", "seed", "preset", "constant_direction", "probe_n",
                     "threads"},
                 "simulation");
  SimConfig c;
  read_if(j, "n", c.n);
  read_if(j, "d", c.d);
  read_if(j, "reps", c.reps);
  read_if(j, "censor_target", c.censor_target);
  read_if(j, "noise_sd", c.noise_sd);
  read_if(j, "seed", c.seed);
  read_if(j, "probe_n", c.probe_n);
  read_if(j, "threads", c.threads);
  read_if(j, "constant_direction", c.constant_direction);
  if (j.contains("preset")) {
    std::string name;
    read_if(j, "preset", name);
    c.preset = parse_preset(name);
  }
  if (c.preset == Preset::constant && !j.contains("d")) c.d = c.constant_direction.size();
  check_sim_config(c);
  return c;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ValidationError("config: top level must be an object");
  reject_unknown(doc, {"fit", "simulation"}, "top level");
  RunConfig rc;
  if (doc.contains("fit")) rc.fit = parse_fit(doc.at("fit"));
  if (doc.contains("simulation")) rc.sim = parse_sim(doc.at("simulation"));
  return rc;
}

RunConfig read_config(const std::filesystem::path& path) {
  const auto text = read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const FitConfig& c) {
  json j;
  j["t_grid_size"] = c.t_grid_size;
  j["link_grid"] = {{"min", c.link_grid.min}, {"max", c.link_grid.max}, {"count", c.link_grid.count}};
  if (c.bandwidths) {
    j["bandwidths"] = {{"h1", c.bandwidths->h1}, {"h2", c.bandwidths->h2}, {"h_link", c.bandwidths->h_link}};
  } else {
    j["bandwidths"] = "auto";
  }
  j["link_bandwidth_cv"] = c.link_bandwidth_cv;
  j["kernel"] = std::string(to_string(c.kernel.family));
  j["optimizer"] = {{"restarts", c.optimizer.restarts},
                    {"max_iterations", c.optimizer.max_iterations},
                    {"tolerance", c.optimizer.tolerance}};
  j["independent_grid"] = c.independent_grid;
  j["threads"] = c.threads;
  return j;
}

json to_json(const SimConfig& c) {
  return {{"n", c.n},
          {"d", c.d},
          {"reps", c.reps},
          {"censor_target", c.censor_target},
          {"noise_sd", c.noise_sd},
          {"seed", c.seed},
          {"preset", std::string(to_string(c.preset))},
          {"constant_direction", c.constant_direction},
          {"probe_n", c.probe_n},
          {"threads", c.threads}};
}

json diagnostics_json(const ModelFit& fit) {
  json points = json::array();
  for (std::size_t k = 0; k < fit.diagnostics.size(); ++k) {
    const auto& p = fit.diagnostics[k];
    points.push_back({{"t0", fit.curves.grid[k]},
                      {"objective", p.objective},
                      {"iterations", p.iterations},
                      {"evaluations", p.evaluations},
                      {"converged", p.converged},
                      {"empty_neighbourhoods", p.empty_neighbourhoods},
                      {"local_rows", p.local_rows}});
  }
  std::size_t undefined = 0;
  for (const auto& v : fit.link.m_hat) undefined += v ? 0 : 1;
  return {{"bandwidths", {{"h1", fit.bandwidths.h1}, {"h2", fit.bandwidths.h2}, {"h_link", fit.bandwidths.h_link}}},
          {"grid_points", points},
          {"link_undefined_points", undefined},
          {"censoring_survival_jumps", fit.censoring_survival.jump_times.size()}};
}

}  // namespace csivc::io
