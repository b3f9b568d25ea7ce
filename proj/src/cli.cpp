#include "anisoflow/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "anisoflow/bench.hpp"
#include "anisoflow/sim.hpp"
#include "anisoflow/vtk.hpp"

namespace anisoflow::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void apply_options(SimConfig& c, const RunOptions& opts) {
  if (opts.force_inadmissible) c.force_inadmissible = true;
  if (opts.snapshot_every) c.snapshot_every = *opts.snapshot_every;
}

/// Runs `body` and converts errors to exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

double max_err_b(const RunRecord& record) {
  double worst = 0.0;
  for (const auto& row : record.measured()) {
    if (!std::isnan(row.err_b)) worst = std::max(worst, row.err_b);
  }
  return worst;
}

void write_study_table(const std::filesystem::path& path, const StudySpec& spec,
                       const std::vector<std::optional<StudyRow>>& rows) {
  auto out = open_out(path);
  out << std::setprecision(17) << to_string(spec.axis) << ",l2_error,max_err_b,wall_seconds\n";
  for (const auto& row : rows) {
    if (row) out << row->value << ',' << row->l2_error << ',' << row->max_err_b << ',' << row->wall_seconds << '\n';
  }
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Parse:
    case ErrorKind::UnknownModel:
    case ErrorKind::Mode:
      return kValidation;
    case ErrorKind::Inadmissible:
      return kInadmissible;
    default:
      return kRuntime;
  }
}

std::filesystem::path output_root(const std::string& configured) {
  if (const char* env = std::getenv("ANISOFLOW_OUT"); env && *env) return env;
  if (!configured.empty()) return configured;
  return "out";
}

int cmd_run(const std::filesystem::path& config_path, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    SimConfig config = load_config(config_path);
    apply_options(config, opts);
    const auto root = output_root(config.output_dir);
    config.output_dir = root.string();
    config.validate();
    std::filesystem::create_directories(root);
    const RunRecord record = run(config);
    write_record_csv(root / "record.csv", record);

    const auto rows = record.measured();
    out << std::setprecision(6) << "status " << record.status << ", steps " << rows.size() - 1;
    if (!rows.empty()) out << ", final b " << rows.back().b << " at t " << rows.back().t;
    if (!rows.empty() && !std::isnan(rows.back().err_b)) {
      out << ", max |b - b_exact| " << max_err_b(record);
    }
    out << ", wall " << std::setprecision(3) << seconds_since(start) << " s, record " << (root / "record.csv").string()
        << '\n';
    return kOk;
  });
}

std::vector<StudyRow> run_study(const StudySpec& spec, int jobs, const std::filesystem::path& root, std::ostream& log) {
  spec.validate();
  if (jobs < 1) throw Error(ErrorKind::Validation, "--jobs must be >= 1");
  std::filesystem::create_directories(root);
  const std::size_t n = spec.values.size();
  std::vector<std::optional<StudyRow>> rows(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex mutex;

  auto worker = [&] {
    for (;;) {
      if (failed) return;
      const std::size_t i = next++;
      if (i >= n) return;
      try {
        const auto start = Clock::now();
        SimConfig member = spec.member(i);
        const auto dir = root / (std::string(to_string(spec.axis)) + "_" + std::to_string(i));
        std::filesystem::create_directories(dir);
        member.output_dir = dir.string();
        const RunRecord record = run(member);
        write_record_csv(dir / "record.csv", record);
        const EllipseExact ex = *ellipse_oracle(member);
        StudyRow row{spec.values[i], l2_error(record, ex), max_err_b(record), seconds_since(start)};
        std::lock_guard lock(mutex);
        rows[i] = row;
        log << std::setprecision(6) << to_string(spec.axis) << " = " << row.value << ": L2 error " << row.l2_error
            << ", max |b err| " << row.max_err_b << ", wall " << row.wall_seconds << " s\n";
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };

  const int workers = std::min<int>(jobs, static_cast<int>(n));
  std::vector<std::thread> pool;
  for (int k = 1; k < workers; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  write_study_table(root / "study.csv", spec, rows);
  if (first_error) std::rethrow_exception(first_error);

  std::vector<StudyRow> out;
  for (const auto& r : rows) out.push_back(*r);
  return out;
}

int cmd_study(const std::filesystem::path& study_path, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    StudySpec spec = load_study(study_path);
    apply_options(spec.base, opts);
    const auto root = output_root(spec.output_dir);
    const auto rows = run_study(spec, opts.jobs, root, out);
    if (spec.axis == StudyAxis::Ratio) {
      out << "ratio,l2_error,max_err_b\n" << std::setprecision(6);
      for (const auto& r : rows) out << r.value << ',' << r.l2_error << ',' << r.max_err_b << '\n';
      return kOk;
    }
    std::vector<std::pair<double, double>> pairs;
    for (const auto& r : rows) pairs.emplace_back(r.value, r.l2_error);
    const double slope = fit_convergence(pairs);
    auto csv = open_out(root / "convergence.csv");
    write_convergence_csv(csv, pairs, slope);
    out << "fitted slope " << std::setprecision(4) << slope << " (" << to_string(spec.axis) << ")\n";
    return kOk;
  });
}

int cmd_compare(const std::filesystem::path& config_path, const RunOptions& opts, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    SimConfig config = load_config(config_path);
    apply_options(config, opts);
    config.variant.reset();
    const auto root = output_root(config.output_dir);
    std::filesystem::create_directories(root);
    const CompareResult result = compare_iso_aniso(config);
    write_record_csv(root / "iso.csv", result.iso.record);
    write_record_csv(root / "aniso.csv", result.aniso.record);
    auto csv = open_out(root / "compare.csv");
    write_compare_csv(csv, result);
    if (result.iso.final_contour) write_contour_csv(root / "iso_contour.csv", *result.iso.final_contour);
    if (result.aniso.final_contour) write_contour_csv(root / "aniso_contour.csv", *result.aniso.final_contour);
    std::size_t aniso_ahead = 0;
    for (const auto& row : result.table) aniso_ahead += row.lambda_aniso >= row.lambda_iso ? 1 : 0;
    out << "compared " << result.table.size() << " steps; lambda_aniso >= lambda_iso at " << aniso_ahead
        << "; table " << (root / "compare.csv").string() << '\n';
    return kOk;
  });
}

int cmd_check_model(const std::string& name, const std::vector<double>& params, const std::string& table,
                    std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const EnergyModel model = make_model(name, params, table);
    const PdReport report = check_positive_definite(model);
    out << std::setprecision(6) << "model " << model.name << '\n'
        << "admissible " << (report.admissible ? "yes" : "no") << '\n'
        << "worst eigenvalue " << report.worst_eigenvalue << " at lambda " << report.worst_angle << '\n'
        << "min dxy margin " << report.dxy_margin_min << '\n';
    return report.admissible ? kOk : kInadmissible;
  });
}

int cmd_export_vtk(const std::filesystem::path& config_path, const std::filesystem::path& target, std::ostream& out,
                   std::ostream& err) {
  return guarded(err, [&] {
    const SimConfig config = load_config(config_path);
    config.validate();
    const TriMesh mesh = build_mesh(config);
    const LevelSet ls = initial_level_set(config, mesh);
    const EnergyModel model = model_for_state(config, ls);
    const Stepper stepper(mesh);
    const InterfaceFields f = stepper.fields(ls, model, config.variant.value_or(Variant::Aniso));
    auto path = target;
    if (path.empty()) path = output_root(config.output_dir) / "initial.vtk";
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    VtkWriter(mesh)
        .add("phi", ls.phi)
        .add("gamma", f.gamma)
        .add("normal", f.normals.n)
        .add("div_D", f.div_d)
        .add("D", f.d)
        .write(path);
    out << "wrote " << path.string() << '\n';
    return kOk;
  });
}

int main(int argc, char** argv) {
  CLI::App app{"Level-set interface migration with inclination-dependent energy"};
  app.require_subcommand(1);

  std::string config;
  RunOptions opts;
  int snapshot_every = -1;

  auto* run = app.add_subcommand("run", "run one simulation and write record.csv");
  run->add_option("--config", config, "configuration file")->required();
  run->add_flag("--force-inadmissible", opts.force_inadmissible, "run even if D is not positive definite");
  run->add_option("--snapshot-every", snapshot_every, "write a VTK snapshot every N steps");

  auto* study = app.add_subcommand("study", "run a mesh-size, time-step or ratio sweep");
  study->add_option("--config", config, "study file ([study] section plus base configuration)")->required();
  study->add_option("--jobs", opts.jobs, "concurrent member runs")->check(CLI::PositiveNumber);
  study->add_flag("--force-inadmissible", opts.force_inadmissible, "run even if D is not positive definite");

  auto* compare = app.add_subcommand("compare", "run iso and aniso variants and tabulate efficiency");
  compare->add_option("--config", config, "configuration file")->required();
  compare->add_flag("--force-inadmissible", opts.force_inadmissible, "run even if D is not positive definite");
  compare->add_option("--snapshot-every", snapshot_every, "write a VTK snapshot every N steps");

  std::string model_name, table;
  std::vector<double> params;
  auto* check = app.add_subcommand("check-model", "report positive definiteness of D_aniso");
  check->add_option("model", model_name, "model name")->required();
  check->add_option("params", params, "model parameters");
  check->add_option("--table", table, "CSV of lambda,gamma for the tabulated model");

  std::string target;
  auto* vtk = app.add_subcommand("export-vtk", "write the initial fields of a configuration as legacy VTK");
  vtk->add_option("--config", config, "configuration file")->required();
  vtk->add_option("--output", target, "target .vtk file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }
  if (snapshot_every >= 0) opts.snapshot_every = snapshot_every;

  if (*run) return cmd_run(config, opts, std::cout, std::cerr);
  if (*study) return cmd_study(config, opts, std::cout, std::cerr);
  if (*compare) return cmd_compare(config, opts, std::cout, std::cerr);
  if (*check) return cmd_check_model(model_name, params, table, std::cout, std::cerr);
  if (*vtk) return cmd_export_vtk(config, target, std::cout, std::cerr);
  return kValidation;
}

}  // namespace anisoflow::cli
