#include "anisoflow/bench.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "anisoflow/error.hpp"

namespace anisoflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kColumns =
    "step,t,a,b,r,e,va,vb,err_a,err_b,err_va,err_vb,lambda,energy,length,status";

void write_value(std::ostream& out, double v) {
  if (std::isnan(v)) return;  // empty cell
  out << v;
}

double read_value(const std::string& cell) {
  if (cell.empty()) return kNaN;
  return std::stod(cell);
}

}  // namespace

void EllipseExact::validate() const {
  if (!(b0 > 0.0) || a0 < b0) throw Error(ErrorKind::Validation, "ellipse oracle needs a0 >= b0 > 0");
  if (!(mu_g > 0.0)) throw Error(ErrorKind::Validation, "ellipse oracle needs muG > 0");
}

EllipseState ellipse_exact_state(const EllipseExact& ex, double t) {
  ex.validate();
  const double decay = std::exp(-3.0 * ex.mu_g * t);
  const double ratio = ex.b0 / ex.a0;
  return {ex.a0 * decay, ex.b0 * decay, 3.0 * ex.mu_g * ex.a0 * decay, 3.0 * ex.mu_g * ex.b0 * decay,
          std::sqrt(1.0 - ratio * ratio)};
}

double RunRow::eccentricity() const {
  const double q = b / a;
  return std::sqrt(std::max(0.0, 1.0 - q * q));
}

std::span<const RunRow> RunRecord::measured() const {
  std::size_t n = 0;
  while (n < rows.size() && rows[n].status == "ok") ++n;
  return {rows.data(), n};
}

double measure_b(const LevelSet& ls) {
  if (ls.phi.size() == 0 || !(ls.phi.maxCoeff() > 0.0)) {
    throw Error(ErrorKind::UniformSign, "level set has no positive region; interface has vanished");
  }
  return ls.phi.maxCoeff();
}

double measure_a(const TriMesh& mesh, const LevelSet& ls, double a0, const Eigen::Vector2d& center) {
  return a0 + interpolate(mesh, ls.phi, center + Eigen::Vector2d(a0, 0.0));
}

RunRecord series_velocity(RunRecord record) {
  const std::size_t n = record.measured().size();
  if (n < 2) throw Error(ErrorKind::InsufficientData, "velocity needs at least two measured rows");
  auto& rows = record.rows;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    const double span = rows[hi].t - rows[lo].t;
    rows[i].va = (rows[hi].a - rows[lo].a) / span;
    rows[i].vb = (rows[hi].b - rows[lo].b) / span;
  }
  return record;
}

RunRecord apply_exact(RunRecord record, const EllipseExact& ex) {
  const std::size_t n = record.measured().size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = record.rows[i];
    const EllipseState s = ellipse_exact_state(ex, row.t);
    row.err_a = std::abs(s.a - row.a);
    row.err_b = std::abs(s.b - row.b);
    row.err_va = std::abs(-s.va - row.va);
    row.err_vb = std::abs(-s.vb - row.vb);
  }
  return record;
}

double l2_error(const RunRecord& record, const EllipseExact& ex) {
  const auto rows = record.measured();
  if (rows.size() < 2) throw Error(ErrorKind::InsufficientData, "L2 error needs at least two measured rows");
  double total = 0.0;
  double prev = std::pow(ellipse_exact_state(ex, rows[0].t).b - rows[0].b, 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double cur = std::pow(ellipse_exact_state(ex, rows[i].t).b - rows[i].b, 2);
    total += 0.5 * (rows[i].t - rows[i - 1].t) * (prev + cur);
    prev = cur;
  }
  return total;
}

ContourEnergy contour_energy(const TriMesh& mesh, const LevelSet& ls, const EnergyModel& model) {
  const Contour contour = extract_contour(mesh, ls);
  ContourEnergy out;
  for (const auto& seg : contour.segments) {
    const Eigen::Vector2d grad = element_gradient(mesh, ls.phi, seg.triangle);
    const double len = seg.length();
    out.length += len;
    out.energy += model.at(grad.normalized()) * len;
  }
  return out;
}

double efficiency(const TriMesh& mesh, const LevelSet& ls, const EnergyModel& model) {
  return contour_energy(mesh, ls, model).efficiency();
}

double fit_convergence(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw Error(ErrorKind::InsufficientData, "convergence fit needs at least three points");
  double mx = 0.0, my = 0.0;
  for (const auto& [h, e] : pairs) {
    if (!(h > 0.0) || !(e > 0.0)) throw Error(ErrorKind::DegenerateData, "convergence data must be positive");
    mx += std::log(h);
    my += std::log(e);
  }
  mx /= static_cast<double>(pairs.size());
  my /= static_cast<double>(pairs.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [h, e] : pairs) {
    sxx += (std::log(h) - mx) * (std::log(h) - mx);
    sxy += (std::log(h) - mx) * (std::log(e) - my);
  }
  if (!(sxx > 1e-24)) throw Error(ErrorKind::DegenerateData, "identical discretization values");
  return sxy / sxx;
}

void write_record_csv(std::ostream& out, const RunRecord& record) {
  out << "# anisoflow run record\n";
  for (const auto& [key, value] : record.config) out << "# " << key << " = " << value << '\n';
  out << "# status = " << record.status << '\n';
  out << kColumns << '\n';
  out << std::setprecision(17);
  for (const auto& r : record.rows) {
    out << r.step;
    for (double v : {r.t, r.a, r.b, r.ratio, r.status == "ok" ? r.eccentricity() : kNaN, r.va, r.vb, r.err_a, r.err_b,
                     r.err_va, r.err_vb, r.efficiency, r.energy, r.length}) {
      out << ',';
      write_value(out, v);
    }
    out << ',' << r.status << '\n';
  }
}

void write_record_csv(const std::filesystem::path& path, const RunRecord& record) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_record_csv(out, record);
}

RunRecord read_record_csv(std::istream& in) {
  RunRecord record;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      std::string key = line.substr(2, eq - 2), value = line.substr(eq + 3);
      if (key == "status") {
        record.status = value;
      } else {
        record.config.emplace_back(std::move(key), std::move(value));
      }
      continue;
    }
    if (!header_seen) {
      if (line != kColumns) throw ParseError(lineno, "unexpected column header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 16) throw ParseError(lineno, "expected 16 columns");
    RunRow r;
    r.step = std::stol(cells[0]);
    double* targets[] = {&r.t, &r.a, &r.b, &r.ratio, nullptr, &r.va, &r.vb, &r.err_a, &r.err_b,
                         &r.err_va, &r.err_vb, &r.efficiency, &r.energy, &r.length};
    for (std::size_t k = 0; k < 14; ++k) {
      if (targets[k]) *targets[k] = read_value(cells[k + 1]);
    }
    r.status = cells[15];
    record.rows.push_back(r);
  }
  return record;
}

void write_convergence_csv(std::ostream& out, std::span<const std::pair<double, double>> pairs, double slope) {
  out << std::setprecision(17) << "discretization,error,slope\n";
  for (const auto& [h, e] : pairs) out << h << ',' << e << ',' << slope << '\n';
}

}  // namespace anisoflow
