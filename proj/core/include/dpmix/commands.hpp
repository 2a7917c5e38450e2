#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dpmix/artifact.hpp"

namespace dpmix {

/// Exit codes shared by every command.
constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitInsufficientSamples = 4;

/// Either an explicit point list or an even (min, max, count) spec.
struct GridSpec {
  std::vector<double> points;

  static GridSpec linear(double min, double max, int count);
  /// Parses "min:max:count" or a comma-separated point list.
  static GridSpec parse(const std::string& text);
};

/// Commands print diagnostics to `out`, errors as "error-class: message" to
/// `err`, and return a process exit code.

int cmd_fit(const FitConfig& config, const std::string& data_path,
            const std::string& output_path, std::ostream& out, std::ostream& err);

int cmd_summarize(const std::string& artifact_path, const GridSpec& grid,
                  int burnin, int thinning, double level,
                  const std::string& output_path, std::ostream& out,
                  std::ostream& err);

int cmd_predict(const std::string& artifact_path, const std::string& data_path,
                std::uint64_t seed, const std::string& output_path,
                std::ostream& out, std::ostream& err);

int cmd_hdp_fit(const FitConfig& config, const std::string& data_path,
                const std::string& output_path, std::ostream& out,
                std::ostream& err);

/// Writes one summary CSV per group, derived from output_path by inserting
/// the group key before the extension.
int cmd_hdp_summarize(const std::string& artifact_path, const GridSpec& grid,
                      int burnin, int thinning, double level,
                      const std::string& output_path, std::ostream& out,
                      std::ostream& err);

}  // namespace dpmix
