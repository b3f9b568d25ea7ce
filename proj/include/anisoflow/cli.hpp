#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anisoflow/config.hpp"
#include "anisoflow/error.hpp"

namespace anisoflow::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kRuntime = 1, kValidation = 2, kInadmissible = 3 };

int exit_code(ErrorKind kind);

/// Output root: ANISOFLOW_OUT when set, else the configured directory, else "out".
std::filesystem::path output_root(const std::string& configured);

struct RunOptions {
  bool force_inadmissible = false;
  std::optional<int> snapshot_every;
  int jobs = 1;
};

/// Each command returns an exit code and reports errors on `err`.
int cmd_run(const std::filesystem::path& config, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_study(const std::filesystem::path& study, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const std::filesystem::path& config, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check_model(const std::string& name, const std::vector<double>& params, const std::string& table,
                    std::ostream& out, std::ostream& err);
/// Writes the initial state (phi, normals, gamma, D, div D) of a configuration.
int cmd_export_vtk(const std::filesystem::path& config, const std::filesystem::path& target, std::ostream& out,
                   std::ostream& err);

/// Row of a study table.
struct StudyRow {
  double value = 0.0;
  double l2_error = 0.0;
  double max_err_b = 0.0;  // max |b - b_measured| over the run
  double wall_seconds = 0.0;
};

/// Runs the members of a study, at most `jobs` at a time. Completed rows are
/// returned in value order; the first failure is rethrown after all started
/// members finish, with completed rows written to the study directory.
std::vector<StudyRow> run_study(const StudySpec& spec, int jobs, const std::filesystem::path& root, std::ostream& log);

int main(int argc, char** argv);

}  // namespace anisoflow::cli
