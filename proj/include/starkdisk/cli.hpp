#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "starkdisk/analysis.hpp"

namespace starkdisk::cli {

inline constexpr const char* kVersion = "starkdisk 1.0.0";

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitInvalid = 2,
  kExitSolver = 3,
  kExitNoSignChange = 4,
};

/// Rejected flag, config key or value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Command { Spectrum, Sweep, Table1, Figure, Crossing, BesselZeros };
enum class Format { Csv, Svg };

std::string to_string(Command c);
Command parse_command(const std::string& text);

/// Raw key -> value text, as read from a config file or collected from flags.
using ConfigMap = std::map<std::string, std::string>;

/// Fully resolved run configuration. Keys shared by several commands keep
/// one meaning; command-specific defaults are applied by resolve().
struct RunConfig {
  Command command = Command::Spectrum;
  double r0 = 0.75;
  double lambda = 0.0;
  double beta = 0.75;
  SectorChoice sector = SectorChoice::Both;
  int n_basis = 12;
  int radial_size = 20;
  std::size_t levels = 6;
  Format format = Format::Csv;
  std::string out;  // empty: standard output
  unsigned threads = 0;
  // sweep
  SweepParameter param = SweepParameter::Lambda;
  double start = 0.0;
  double stop = 2.0;
  double step = 0.02;
  // figure
  int figure = 1;
  // crossing
  StateLabel label_a{std::nullopt, 0, 2};
  StateLabel label_b{std::nullopt, 1, 0};
  double lo = 0.5;
  double hi = 1.0;
  // besselzeros
  int nu = 0;
  int count = 1;
};

/// Parses `key = value` lines; '#' starts a comment, blank lines are
/// skipped. Throws ConfigError on malformed lines and repeated keys.
ConfigMap parse_config_text(const std::string& text);

/// Recovers the echoed configuration from CSV metadata: every
/// `# key = value` line before the header. Lines without '=' are skipped.
ConfigMap parse_metadata(const std::string& csv_text);

/// Applies command defaults, then `values`. Throws ConfigError on unknown
/// keys and invalid values.
RunConfig resolve(Command command, const ConfigMap& values);

/// The resolved configuration as ordered `key = value` pairs (output path
/// excluded), numbers in shortest round-trip form.
std::vector<std::pair<std::string, std::string>> echo(const RunConfig& config);

/// "(0,2)" or "even(1,1)".
StateLabel parse_label(const std::string& text);

struct CsvTable {
  std::vector<std::string> metadata;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// LF line endings, comma separator; cells holding ',' or '"' (the state
/// labels in headers) are quoted with doubled inner quotes. Throws std::logic_error when a row
/// length differs from the header.
std::string render_csv(const CsvTable& table);

/// Fixed 17-significant-digit scientific form used for data cells.
std::string format_data(double value);
/// Shortest decimal that reads back to the same double, used in metadata.
std::string format_shortest(double value);

struct Series {
  std::string name;
  std::vector<double> y;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<Series> series;
};

/// Single-panel line plot on a fixed 800 x 600 viewBox with linear axes.
std::string render_svg(const Plot& plot);

struct CommandOutput {
  CsvTable table;
  std::optional<Plot> plot;
};

/// Runs one resolved command. Library exceptions propagate.
CommandOutput run_command(const RunConfig& config);

/// Writes `content` to `path` through a temporary file in the same
/// directory and a rename, so a failed run leaves no partial file.
void write_atomically(const std::string& path, const std::string& content);

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace starkdisk::cli
