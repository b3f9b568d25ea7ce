#include "anisoflow/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "anisoflow/error.hpp"

namespace anisoflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) { return '"' + s + '"'; }

/// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

struct Entry {
  std::string value;
  int line = 0;
};

using Table = std::map<std::string, Entry>;  // "section.key"

Table tokenize(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(lineno, "empty key");
    if (section.empty()) throw ParseError(lineno, "key '" + key + "' outside a section");
    const std::string full = section + "." + key;
    if (table.count(full)) throw ParseError(lineno, "duplicate key '" + full + "'");
    table[full] = {trim(line.substr(eq + 1)), lineno};
  }
  return table;
}

std::string as_string(const Entry& e) {
  const std::string& v = e.value;
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

double as_double(const Entry& e) {
  const std::string s = as_string(e);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) throw ParseError(e.line, "not a number: '" + s + "'");
  return v;
}

int as_int(const Entry& e) {
  const double v = as_double(e);
  if (v != std::floor(v) || std::abs(v) > 2e9) throw ParseError(e.line, "not an integer: '" + e.value + "'");
  return static_cast<int>(v);
}

bool as_bool(const Entry& e) {
  const std::string s = as_string(e);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParseError(e.line, "expected true or false, got '" + s + "'");
}

std::vector<double> as_list(const Entry& e) {
  std::vector<double> out;
  const std::string s = as_string(e);
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(as_double({trim(item), e.line}));
  return out;
}

/// Applies the known keys, rejecting anything left over.
void apply(Table& table, const std::map<std::string, std::function<void(const Entry&)>>& handlers) {
  for (auto it = table.begin(); it != table.end();) {
    const auto h = handlers.find(it->first);
    if (h == handlers.end()) {
      ++it;
      continue;
    }
    try {
      h->second(it->second);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& err) {
      throw ParseError(it->second.line, err.what());
    }
    it = table.erase(it);
  }
}

void reject_unknown(const Table& table) {
  if (table.empty()) return;
  const auto& [key, entry] = *table.begin();
  throw ParseError(entry.line, "unknown key '" + key + "'");
}

SimConfig parse_sim(Table& t) {
  SimConfig c;
  apply(t, {
      {"domain.width", [&](const Entry& e) { c.width = as_double(e); }},
      {"domain.height", [&](const Entry& e) { c.height = as_double(e); }},
      {"domain.mesh", [&](const Entry& e) { c.mesh_file = as_string(e); }},
      {"numerics.h", [&](const Entry& e) { c.h = as_double(e); }},
      {"numerics.dt", [&](const Entry& e) { c.dt = as_double(e); }},
      {"numerics.t_end", [&](const Entry& e) { c.t_end = as_double(e); }},
      {"numerics.mu", [&](const Entry& e) { c.mu = as_double(e); }},
      {"numerics.solver_rel_tol", [&](const Entry& e) { c.solver_rel_tol = as_double(e); }},
      {"numerics.solver_max_iter", [&](const Entry& e) { c.solver_max_iter = as_int(e); }},
      {"numerics.solver_restart", [&](const Entry& e) { c.solver_restart = as_int(e); }},
      {"numerics.supg", [&](const Entry& e) { c.supg = as_bool(e); }},
      {"case.kind", [&](const Entry& e) { c.kind = parse_case_kind(as_string(e)); }},
      {"case.center",
       [&](const Entry& e) {
         const auto v = as_list(e);
         if (v.size() != 2) throw ParseError(e.line, "center needs two values");
         c.center = {v[0], v[1]};
       }},
      {"case.a0", [&](const Entry& e) { c.a0 = as_double(e); }},
      {"case.r", [&](const Entry& e) { c.ratio = as_double(e); }},
      {"case.radius", [&](const Entry& e) { c.radius = as_double(e); }},
      {"case.contour", [&](const Entry& e) { c.contour_file = as_string(e); }},
      {"model.name", [&](const Entry& e) { c.model = as_string(e); }},
      {"model.params", [&](const Entry& e) { c.model_params = as_list(e); }},
      {"model.table", [&](const Entry& e) { c.model_table = as_string(e); }},
      {"model.variant",
       [&](const Entry& e) {
         const std::string s = as_string(e);
         if (s.empty() || s == "unset") {
           c.variant.reset();
         } else {
           c.variant = parse_variant(s);
         }
       }},
      {"model.force_inadmissible", [&](const Entry& e) { c.force_inadmissible = as_bool(e); }},
      {"output.dir", [&](const Entry& e) { c.output_dir = as_string(e); }},
      {"output.snapshot_every", [&](const Entry& e) { c.snapshot_every = as_int(e); }},
  });
  return c;
}

void resolve_paths(SimConfig& c, const std::filesystem::path& file) {
  const auto base = file.parent_path();
  for (std::string* p : {&c.mesh_file, &c.contour_file, &c.model_table}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  Table table = tokenize(text);
  SimConfig c = parse_sim(table);
  reject_unknown(table);
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  SimConfig c = parse_config(read_file(path));
  resolve_paths(c, path);
  return c;
}

std::string serialize_config(const SimConfig& c) {
  std::ostringstream out;
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
  };
  out << "[domain]\n"
      << "width = " << fmt(c.width) << '\n'
      << "height = " << fmt(c.height) << '\n'
      << "mesh = " << quote(c.mesh_file) << "\n\n"
      << "[numerics]\n"
      << "h = " << fmt(c.h) << '\n'
      << "dt = " << fmt(c.dt) << '\n'
      << "t_end = " << fmt(c.t_end) << '\n'
      << "mu = " << fmt(c.mu) << '\n'
      << "solver_rel_tol = " << fmt(c.solver_rel_tol) << '\n'
      << "solver_max_iter = " << c.solver_max_iter << '\n'
      << "solver_restart = " << c.solver_restart << '\n'
      << "supg = " << (c.supg ? "true" : "false") << "\n\n"
      << "[case]\n"
      << "kind = " << to_string(c.kind) << '\n'
      << "center = " << fmt(c.center.x()) << ", " << fmt(c.center.y()) << '\n'
      << "a0 = " << fmt(c.a0) << '\n'
      << "r = " << fmt(c.ratio) << '\n'
      << "radius = " << fmt(c.radius) << '\n'
      << "contour = " << quote(c.contour_file) << "\n\n"
      << "[model]\n"
      << "name = " << quote(c.model) << '\n'
      << "params = " << quote(list(c.model_params)) << '\n'
      << "table = " << quote(c.model_table) << '\n'
      << "variant = " << (c.variant ? to_string(*c.variant) : "unset") << '\n'
      << "force_inadmissible = " << (c.force_inadmissible ? "true" : "false") << "\n\n"
      << "[output]\n"
      << "dir = " << quote(c.output_dir) << '\n'
      << "snapshot_every = " << c.snapshot_every << '\n';
  return out.str();
}

const char* to_string(StudyAxis axis) {
  switch (axis) {
    case StudyAxis::MeshSize: return "meshSize";
    case StudyAxis::TimeStep: return "timeStep";
    case StudyAxis::Ratio: return "ratio";
  }
  return "?";
}

StudyAxis parse_study_axis(const std::string& s) {
  if (s == "meshSize") return StudyAxis::MeshSize;
  if (s == "timeStep") return StudyAxis::TimeStep;
  if (s == "ratio") return StudyAxis::Ratio;
  throw Error(ErrorKind::Validation, "study axis must be meshSize, timeStep or ratio, got '" + s + "'");
}

void StudySpec::validate() const {
  const std::size_t need = axis == StudyAxis::Ratio ? 2 : 3;
  if (values.size() < need) {
    throw Error(ErrorKind::Validation, std::string(to_string(axis)) + " study needs at least " + std::to_string(need) + " values");
  }
  bool up = true, down = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw Error(ErrorKind::Validation, "study values must be positive");
    if (i > 0) {
      up = up && values[i] > values[i - 1];
      down = down && values[i] < values[i - 1];
    }
  }
  if (!up && !down) throw Error(ErrorKind::Validation, "study values must be strictly monotone");
  if (base.kind != CaseKind::Ellipse || base.model != "ellipse") {
    throw Error(ErrorKind::Validation, "studies need the ellipse case with the ellipse model");
  }
  for (std::size_t i = 0; i < values.size(); ++i) member(i).validate();
}

SimConfig StudySpec::member(std::size_t i) const {
  SimConfig c = base;
  switch (axis) {
    case StudyAxis::MeshSize: c.h = values.at(i); break;
    case StudyAxis::TimeStep: c.dt = values.at(i); break;
    case StudyAxis::Ratio: c.ratio = values.at(i); break;
  }
  return c;
}

StudySpec parse_study(const std::string& text) {
  Table table = tokenize(text);
  StudySpec spec;
  bool has_axis = false, has_values = false;
  apply(table, {
      {"study.axis", [&](const Entry& e) { spec.axis = parse_study_axis(as_string(e)); has_axis = true; }},
      {"study.values", [&](const Entry& e) { spec.values = as_list(e); has_values = true; }},
      {"study.output", [&](const Entry& e) { spec.output_dir = as_string(e); }},
  });
  if (!has_axis || !has_values) throw Error(ErrorKind::Validation, "[study] needs axis and values");
  spec.base = parse_sim(table);
  reject_unknown(table);
  if (spec.output_dir.empty()) spec.output_dir = spec.base.output_dir;
  return spec;
}

StudySpec load_study(const std::filesystem::path& path) {
  StudySpec spec = parse_study(read_file(path));
  resolve_paths(spec.base, path);
  return spec;
}

}  // namespace anisoflow
