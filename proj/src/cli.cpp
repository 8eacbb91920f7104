#include "starkdisk/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <list>
#include <sstream>
#include <system_error>

#include "CLI11.hpp"
#include "starkdisk/errors.hpp"
#include "starkdisk/reference.hpp"

#ifdef _WIN32
#include <process.h>
#define STARKDISK_GETPID _getpid
#else
#include <unistd.h>
#define STARKDISK_GETPID getpid
#endif

namespace starkdisk::cli {

namespace {

// Keys accepted in config files and echoed into metadata, in echo order.
constexpr std::array<const char*, 22> kKeys = {
    "command", "r0",    "lambda", "beta", "sector",  "n-basis", "radial-size", "levels",
    "format",  "threads", "param", "start", "stop",   "step",    "figure",      "label-a",
    "label-b", "lo",    "hi",     "nu",   "count",   "out"};

constexpr double kDegenerateTolerance = 1e-7;
constexpr std::size_t kMaxGridPoints = 100000;

bool known_key(const std::string& key) {
  return std::find_if(kKeys.begin(), kKeys.end(), [&](const char* k) { return key == k; }) !=
         kKeys.end();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

SectorChoice parse_sector(const std::string& text) {
  if (text == "even") return SectorChoice::Even;
  if (text == "odd") return SectorChoice::Odd;
  if (text == "both") return SectorChoice::Both;
  throw ConfigError("sector: expected even, odd or both, got '" + text + "'");
}

std::string sector_name(SectorChoice s) {
  switch (s) {
    case SectorChoice::Even:
      return "even";
    case SectorChoice::Odd:
      return "odd";
    case SectorChoice::Both:
      return "both";
  }
  return "both";
}

SweepParameter parse_param(const std::string& text) {
  if (text == "lambda") return SweepParameter::Lambda;
  if (text == "r0") return SweepParameter::R0;
  if (text == "beta") return SweepParameter::Beta;
  throw ConfigError("param: expected lambda, r0 or beta, got '" + text + "'");
}

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::Csv;
  if (text == "svg") return Format::Svg;
  throw ConfigError("format: expected csv or svg, got '" + text + "'");
}

std::vector<Parity> parities(SectorChoice s) {
  if (s == SectorChoice::Even) return {Parity::Even};
  if (s == SectorChoice::Odd) return {Parity::Odd};
  return {Parity::Even, Parity::Odd};
}

std::vector<double> make_grid(double start, double stop, double step) {
  const double span = (stop - start) / step;
  const auto intervals = static_cast<std::size_t>(std::floor(span + 1e-9));
  if (intervals + 1 > kMaxGridPoints) throw ConfigError("sweep grid has too many points");
  std::vector<double> grid(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) grid[i] = start + step * static_cast<double>(i);
  return grid;
}

void add_header_metadata(CsvTable& table, const RunConfig& config) {
  table.metadata.emplace_back(kVersion);
  for (const auto& [key, value] : echo(config)) table.metadata.push_back(key + " = " + value);
}

std::string event_line(const LevelEvent& e) {
  std::ostringstream line;
  line << "event: " << (e.kind == EventKind::Crossing ? "crossing " : "avoided-crossing ")
       << to_string(e.a) << " " << to_string(e.b) << " at " << format_shortest(e.location)
       << " gap " << format_shortest(e.gap);
  return line.str();
}

CommandOutput sweep_output(const SweepRequest& request, const RunConfig& config,
                           const std::string& title, const std::string& description) {
  const auto result = sweep(request);
  CommandOutput output;
  auto& table = output.table;
  add_header_metadata(table, config);
  table.metadata.push_back(description);
  for (const auto& e : result.events) table.metadata.push_back(event_line(e));

  table.header.push_back(to_string(result.parameter));
  for (const auto& c : result.curves) table.header.push_back(to_string(c.label));
  for (std::size_t p = 0; p < result.grid.size(); ++p) {
    std::vector<std::string> row{format_data(result.grid[p])};
    for (const auto& c : result.curves) row.push_back(format_data(c.energies[p]));
    table.rows.push_back(std::move(row));
  }

  Plot plot;
  plot.title = title;
  plot.x_label = to_string(result.parameter);
  plot.y_label = "E";
  plot.x = result.grid;
  for (const auto& c : result.curves) plot.series.push_back({to_string(c.label), c.energies});
  output.plot = std::move(plot);
  return output;
}

CommandOutput run_spectrum(const RunConfig& config) {
  CommandOutput output;
  auto& table = output.table;
  add_header_metadata(table, config);
  table.header = {"sector", "index", "energy", "label_n", "label_nu"};
  if (config.levels == 0) return output;
  for (Parity parity : parities(config.sector)) {
    const auto levels =
        labeled_levels(config.r0, config.lambda, parity, config.n_basis, config.levels);
    for (std::size_t k = 0; k < levels.size(); ++k) {
      table.rows.push_back({std::string(to_string(parity)), std::to_string(k),
                            format_data(levels[k].energy), std::to_string(levels[k].label.n),
                            std::to_string(levels[k].label.nu)});
    }
  }
  return output;
}

CommandOutput run_sweep(const RunConfig& config) {
  SweepRequest request;
  request.parameter = config.param;
  request.grid = make_grid(config.start, config.stop, config.step);
  request.fixed = {config.r0, config.lambda, config.beta};
  request.sector = config.sector;
  request.basis = {config.n_basis, config.radial_size};
  request.levels = config.levels;
  request.threads = config.threads;
  require(config.levels >= 1, "levels: a sweep needs at least one level");
  return sweep_output(request, config, "sweep over " + to_string(config.param),
                      "grid: " + to_string(config.param) + " from " +
                          format_shortest(config.start) + " step " + format_shortest(config.step));
}

CommandOutput run_table1(const RunConfig& config) {
  const std::array<DiskLevel, 6> states = {{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {0, 3}, {1, 1}}};
  CommandOutput output;
  auto& table = output.table;
  add_header_metadata(table, config);
  table.metadata.emplace_back("rows: r0^2 E(n,nu) at lambda 1 for two radii, then j^2/2 (PB)");
  table.header.emplace_back("r0");
  for (const auto& s : states) {
    table.header.push_back("(" + std::to_string(s.n) + "," + std::to_string(s.nu) + ")");
  }
  for (double r0 : {0.01, 0.001}) {
    const auto levels = labeled_levels(r0, 1.0, Parity::Even, config.n_basis, states.size());
    std::vector<std::string> row{format_shortest(r0)};
    for (const auto& s : states) {
      const StateLabel label{Parity::Even, s.n, s.nu};
      const auto it = std::find_if(levels.begin(), levels.end(),
                                   [&](const Level& l) { return l.label == label; });
      if (it == levels.end()) throw SolverError("table1: state " + to_string(label) + " not found");
      row.push_back(format_data(r0 * r0 * it->energy));
    }
    table.rows.push_back(std::move(row));
  }
  std::vector<std::string> pb{"PB"};
  for (const auto& s : states) pb.push_back(format_data(particle_in_box_energy(s)));
  table.rows.push_back(std::move(pb));
  return output;
}

CommandOutput run_figure(const RunConfig& config) {
  SweepRequest request;
  request.basis = {config.n_basis, config.radial_size};
  request.levels = config.levels;
  request.threads = config.threads;
  require(config.levels >= 1, "levels: a figure needs at least one level");
  std::string title;
  std::string description;
  switch (config.figure) {
    case 1:
      request.parameter = SweepParameter::Beta;
      request.grid = make_grid(0.0, 1.0, 0.01);
      title = "E(n,nu) against beta at zero field";
      description = "grid: beta from 0 to 1 step 0.01, radial problem";
      break;
    case 2:
      request.parameter = SweepParameter::Lambda;
      request.grid = make_grid(0.0, 2.0, 0.02);
      request.fixed.r0 = 0.75;
      request.sector = SectorChoice::Both;
      title = "lowest levels against lambda at r0 = 0.75";
      description = "grid: lambda from 0 to 2 step 0.02, r0 0.75, both sectors";
      break;
    case 3:
    case 4:
      request.parameter = SweepParameter::R0;
      request.grid = make_grid(0.25, 6.0, 0.05);
      request.fixed.lambda = 1.0;
      request.sector = config.figure == 3 ? SectorChoice::Even : SectorChoice::Odd;
      title = std::string(config.figure == 3 ? "even" : "odd") + " levels against r0 at lambda = 1";
      description = std::string("grid: r0 from 0.25 to 6 step 0.05, lambda 1, ") +
                    (config.figure == 3 ? "even" : "odd") + " sector";
      break;
    default:
      throw ConfigError("figure: expected 1, 2, 3 or 4");
  }
  return sweep_output(request, config, title, description);
}

int label_weight(const StateLabel& label) { return !label.parity && label.nu > 0 ? 2 : 1; }

CommandOutput run_crossing(const RunConfig& config) {
  const FixedParams fixed{config.r0, config.lambda, config.beta};
  const BasisSettings basis{config.n_basis, config.radial_size};
  const auto hit =
      find_crossing(config.label_a, config.label_b, config.param, config.lo, config.hi, fixed, basis);

  double ground = 0.0;
  switch (config.param) {
    case SweepParameter::Beta:
      ground = radial_energy(0, 0, hit.location, config.radial_size);
      break;
    case SweepParameter::R0:
      ground = solve_levels(hit.location, config.lambda, Parity::Even, config.n_basis).at(0).energy;
      break;
    case SweepParameter::Lambda:
      ground = solve_levels(config.r0, hit.location, Parity::Even, config.n_basis).at(0).energy;
      break;
  }
  const bool coincident = std::abs(hit.energy_a - hit.energy_b) <=
                          kDegenerateTolerance * std::max(1.0, std::abs(hit.energy_a));
  const int multiplicity =
      coincident ? label_weight(config.label_a) + label_weight(config.label_b) : 1;

  CommandOutput output;
  auto& table = output.table;
  add_header_metadata(table, config);
  table.metadata.push_back("levels: " + to_string(config.label_a) + " " + to_string(config.label_b));
  table.header = {"location", "energy_a", "energy_b", "multiplicity", "ground_energy"};
  table.rows.push_back({format_data(hit.location), format_data(hit.energy_a),
                        format_data(hit.energy_b), std::to_string(multiplicity),
                        format_data(ground)});
  return output;
}

CommandOutput run_bessel_zeros(const RunConfig& config) {
  CommandOutput output;
  auto& table = output.table;
  add_header_metadata(table, config);
  table.header = {"nu", "k", "zero", "energy"};
  for (int k = 1; k <= config.count; ++k) {
    const double z = bessel_zero(config.nu, k);
    table.rows.push_back(
        {std::to_string(config.nu), std::to_string(k), format_data(z), format_data(0.5 * z * z)});
  }
  return output;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Spectrum:
      return "spectrum";
    case Command::Sweep:
      return "sweep";
    case Command::Table1:
      return "table1";
    case Command::Figure:
      return "figure";
    case Command::Crossing:
      return "crossing";
    case Command::BesselZeros:
      return "besselzeros";
  }
  return "spectrum";
}

Command parse_command(const std::string& text) {
  for (Command c : {Command::Spectrum, Command::Sweep, Command::Table1, Command::Figure,
                    Command::Crossing, Command::BesselZeros}) {
    if (to_string(c) == text) return c;
  }
  throw ConfigError("unknown command '" + text + "'");
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    if (!map.emplace(key, value).second) throw ConfigError("config key '" + key + "' repeated");
  }
  return map;
}

ConfigMap parse_metadata(const std::string& csv_text) {
  std::string echoed;
  std::istringstream in(csv_text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '#') break;
    const std::string body = trim(line.substr(1));
    if (body.find('=') != std::string::npos) echoed += body + "\n";
  }
  return parse_config_text(echoed);
}

StateLabel parse_label(const std::string& text) {
  StateLabel label;
  std::string rest = text;
  if (rest.rfind("even", 0) == 0) {
    label.parity = Parity::Even;
    rest.erase(0, 4);
  } else if (rest.rfind("odd", 0) == 0) {
    label.parity = Parity::Odd;
    rest.erase(0, 3);
  }
  int n = -1;
  int nu = -1;
  char close = 0;
  char extra = 0;
  if (std::sscanf(rest.c_str(), "(%d,%d%c%c", &n, &nu, &close, &extra) != 3 || close != ')' ||
      n < 0 || nu < 0) {
    throw ConfigError("label: expected (n,nu), even(n,nu) or odd(n,nu), got '" + text + "'");
  }
  label.n = n;
  label.nu = nu;
  return label;
}

RunConfig resolve(Command command, const ConfigMap& values) {
  RunConfig c;
  c.command = command;
  if (command == Command::Crossing) c.param = SweepParameter::Beta;

  for (const auto& [key, value] : values) {
    if (!known_key(key)) throw ConfigError("unknown config key '" + key + "'");
    if (key == "command") {
      require(parse_command(value) == command, "config command '" + value + "' differs from '" +
                                                   to_string(command) + "'");
    } else if (key == "r0") {
      c.r0 = parse_double(key, value);
    } else if (key == "lambda") {
      c.lambda = parse_double(key, value);
    } else if (key == "beta") {
      c.beta = parse_double(key, value);
    } else if (key == "sector") {
      c.sector = parse_sector(value);
    } else if (key == "n-basis") {
      const auto n = parse_integer(key, value);
      require(n >= 1 && n <= 20, "n-basis: expected 1 .. 20");
      c.n_basis = static_cast<int>(n);
    } else if (key == "radial-size") {
      const auto n = parse_integer(key, value);
      require(n >= 1 && n <= 40, "radial-size: expected 1 .. 40");
      c.radial_size = static_cast<int>(n);
    } else if (key == "levels") {
      const auto n = parse_integer(key, value);
      require(n >= 0 && n <= 1000, "levels: expected 0 .. 1000");
      c.levels = static_cast<std::size_t>(n);
    } else if (key == "format") {
      c.format = parse_format(value);
    } else if (key == "threads") {
      const auto n = parse_integer(key, value);
      require(n >= 0 && n <= 1024, "threads: expected 0 .. 1024");
      c.threads = static_cast<unsigned>(n);
    } else if (key == "param") {
      c.param = parse_param(value);
    } else if (key == "start") {
      c.start = parse_double(key, value);
    } else if (key == "stop") {
      c.stop = parse_double(key, value);
    } else if (key == "step") {
      c.step = parse_double(key, value);
    } else if (key == "figure") {
      const auto n = parse_integer(key, value);
      require(n >= 1 && n <= 4, "figure: expected 1, 2, 3 or 4");
      c.figure = static_cast<int>(n);
    } else if (key == "label-a") {
      c.label_a = parse_label(value);
    } else if (key == "label-b") {
      c.label_b = parse_label(value);
    } else if (key == "lo") {
      c.lo = parse_double(key, value);
    } else if (key == "hi") {
      c.hi = parse_double(key, value);
    } else if (key == "nu") {
      const auto n = parse_integer(key, value);
      require(n >= 0 && n <= 200, "nu: expected 0 .. 200");
      c.nu = static_cast<int>(n);
    } else if (key == "count") {
      const auto n = parse_integer(key, value);
      require(n >= 1 && n <= 10000, "count: expected 1 .. 10000");
      c.count = static_cast<int>(n);
    } else if (key == "out") {
      c.out = value;
    }
  }

  require(c.r0 > 0.0, "r0: must be > 0");
  require(c.beta >= 0.0, "beta: must be >= 0");
  require(c.step > 0.0, "step: must be > 0");
  require(c.stop >= c.start, "stop: must not be below start");
  require(c.hi > c.lo, "hi: must exceed lo");
  if (command == Command::Sweep) {
    if (c.param == SweepParameter::R0) require(c.start > 0.0, "start: r0 sweeps need start > 0");
    if (c.param == SweepParameter::Beta) require(c.start >= 0.0, "start: beta sweeps need start >= 0");
    make_grid(c.start, c.stop, c.step);
  }
  if (command == Command::Crossing) {
    if (c.param == SweepParameter::R0) require(c.lo > 0.0, "lo: r0 brackets need lo > 0");
    if (c.param == SweepParameter::Beta) require(c.lo >= 0.0, "lo: beta brackets need lo >= 0");
  }
  const bool plots = command == Command::Sweep || command == Command::Figure;
  require(c.format == Format::Csv || plots, "format: svg is available for sweep and figure only");
  return c;
}

std::vector<std::pair<std::string, std::string>> echo(const RunConfig& c) {
  return {
      {"command", to_string(c.command)},
      {"r0", format_shortest(c.r0)},
      {"lambda", format_shortest(c.lambda)},
      {"beta", format_shortest(c.beta)},
      {"sector", sector_name(c.sector)},
      {"n-basis", std::to_string(c.n_basis)},
      {"radial-size", std::to_string(c.radial_size)},
      {"levels", std::to_string(c.levels)},
      {"format", c.format == Format::Csv ? "csv" : "svg"},
      {"threads", std::to_string(c.threads)},
      {"param", to_string(c.param)},
      {"start", format_shortest(c.start)},
      {"stop", format_shortest(c.stop)},
      {"step", format_shortest(c.step)},
      {"figure", std::to_string(c.figure)},
      {"label-a", to_string(c.label_a)},
      {"label-b", to_string(c.label_b)},
      {"lo", format_shortest(c.lo)},
      {"hi", format_shortest(c.hi)},
      {"nu", std::to_string(c.nu)},
      {"count", std::to_string(c.count)},
  };
}

std::string format_data(double value) {
  std::array<char, 64> buffer{};
  std::snprintf(buffer.data(), buffer.size(), "%.16e", value);
  return buffer.data();
}

std::string format_shortest(double value) {
  std::array<char, 64> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc()) throw std::logic_error("format_shortest: conversion failed");
  return std::string(buffer.data(), ptr);
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (const auto& m : table.metadata) out += "# " + m + "\n";
  auto append_row = [&](const std::vector<std::string>& cells) {
    if (cells.size() != table.header.size()) {
      throw std::logic_error("render_csv: row length differs from the header");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      const auto& cell = cells[i];
      if (cell.find_first_of(",\"\n") == std::string::npos) {
        out += cell;
        continue;
      }
      out += '"';
      for (char ch : cell) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    }
    out += '\n';
  };
  append_row(table.header);
  for (const auto& row : table.rows) append_row(row);
  return out;
}

std::string render_svg(const Plot& plot) {
  constexpr double kWidth = 800.0;
  constexpr double kHeight = 600.0;
  constexpr double kLeft = 80.0;
  constexpr double kRight = 640.0;
  constexpr double kTop = 50.0;
  constexpr double kBottom = 540.0;
  constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                                    "#bcbd22", "#17becf"};

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (double x : plot.x) {
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
  }
  for (const auto& s : plot.series) {
    for (double y : s.y) {
      if (!std::isfinite(y)) continue;
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (!(x_max > x_min)) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (!(y_max > y_min)) {
    y_min -= 0.5;
    y_max += 0.5;
  }
  const double y_pad = 0.03 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;
  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft); };
  auto sy = [&](double y) { return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop); };
  auto num = [](const char* fmt, double v) {
    std::array<char, 48> buffer{};
    std::snprintf(buffer.data(), buffer.size(), fmt, v);
    return std::string(buffer.data());
  };
  auto escape = [](const std::string& s) {
    std::string out;
    for (char ch : s) {
      if (ch == '<') out += "&lt;";
      else if (ch == '>') out += "&gt;";
      else if (ch == '&') out += "&amp;";
      else out += ch;
    }
    return out;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << " " << kHeight
      << "\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  svg << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">" << escape(plot.title)
      << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
      << kBottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kBottom << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x_min + (x_max - x_min) * t / 4.0;
    const double yv = y_min + (y_max - y_min) * t / 4.0;
    svg << "<text x=\"" << num("%.2f", sx(xv)) << "\" y=\"" << kBottom + 20
        << "\" text-anchor=\"middle\" font-size=\"12\">" << num("%.4g", xv) << "</text>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << num("%.2f", sy(yv) + 4)
        << "\" text-anchor=\"end\" font-size=\"12\">" << num("%.4g", yv) << "</text>\n";
  }
  svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kBottom + 45
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.x_label) << "</text>\n";
  svg << "<text x=\"25\" y=\"" << (kTop + kBottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 25 "
      << (kTop + kBottom) / 2 << ")\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& series = plot.series[s];
    const char* color = kPalette[s % kPalette.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t p = 0; p < plot.x.size() && p < series.y.size(); ++p) {
      if (!std::isfinite(series.y[p])) continue;
      if (p > 0) svg << ' ';
      svg << num("%.2f", sx(plot.x[p])) << ',' << num("%.2f", sy(series.y[p]));
    }
    svg << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
    svg << "<line x1=\"655\" y1=\"" << ly << "\" x2=\"680\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"686\" y=\"" << ly + 4 << "\" font-size=\"12\">" << escape(series.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

CommandOutput run_command(const RunConfig& config) {
  switch (config.command) {
    case Command::Spectrum:
      return run_spectrum(config);
    case Command::Sweep:
      return run_sweep(config);
    case Command::Table1:
      return run_table1(config);
    case Command::Figure:
      return run_figure(config);
    case Command::Crossing:
      return run_crossing(config);
    case Command::BesselZeros:
      return run_bessel_zeros(config);
  }
  throw std::logic_error("run_command: unhandled command");
}

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp-" + std::to_string(STARKDISK_GETPID());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + temp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw std::runtime_error("write to '" + temp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(temp, ignored);
    throw std::runtime_error("cannot move output into '" + path + "': " + ec.message());
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectrum of a two-dimensional hydrogen atom in a disk under a uniform field",
               "starkdisk"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Flag {
    std::string key;
    std::string value;
    CLI::Option* option = nullptr;
  };
  struct Sub {
    Command command;
    CLI::App* app;
    std::vector<std::unique_ptr<Flag>> flags;
    std::string config_path;
    CLI::Option* config_option = nullptr;
  };
  std::list<Sub> subs;  // stable addresses: CLI11 binds into the entries
  auto add_sub = [&](Command command, const std::string& help,
                     std::initializer_list<std::pair<const char*, const char*>> extra) {
    Sub& sub = subs.emplace_back(Sub{command, app.add_subcommand(to_string(command), help), {}, {}, nullptr});
    auto add_flag = [&](const std::string& key, const std::string& description) {
      auto flag = std::make_unique<Flag>();
      flag->key = key;
      flag->option = sub.app->add_option("--" + key, flag->value, description);
      sub.flags.push_back(std::move(flag));
    };
    add_flag("r0", "box radius in Coulomb length units");
    add_flag("lambda", "dimensionless field strength");
    add_flag("beta", "Coulomb coupling of the unit-disk zero-field problem");
    add_flag("sector", "even, odd or both");
    add_flag("n-basis", "largest radial power N of the basis");
    add_flag("radial-size", "functions per angular block of the radial problem");
    add_flag("levels", "number of levels per sector");
    add_flag("out", "output path (default: standard output)");
    add_flag("format", "csv or svg");
    add_flag("threads", "worker threads for sweeps (0: STARKDISK_THREADS or all cores)");
    for (const auto& [key, description] : extra) add_flag(key, description);
    sub.config_option = sub.app->add_option("--config", sub.config_path, "key = value config file");
  };

  add_sub(Command::Spectrum, "lowest labeled levels at one parameter point", {});
  add_sub(Command::Sweep, "labeled level curves over a parameter grid",
          {{"param", "lambda, r0 or beta"},
           {"start", "first grid value"},
           {"stop", "last grid value"},
           {"step", "grid spacing"}});
  add_sub(Command::Table1, "r0^2 E for small boxes next to the particle-in-disk limit", {});
  add_sub(Command::Figure, "data behind one of the four standard plots", {{"figure", "1, 2, 3 or 4"}});
  add_sub(Command::Crossing, "locate an exact level crossing by bisection",
          {{"label-a", "first level, e.g. (0,2) or even(0,1)"},
           {"label-b", "second level"},
           {"param", "lambda, r0 or beta"},
           {"lo", "bracket start"},
           {"hi", "bracket end"}});
  add_sub(Command::BesselZeros, "zeros of J_nu and the disk energies j^2/2",
          {{"nu", "Bessel order"}, {"count", "number of zeros"}});
  // `figure 3` as well as `figure --figure 3`.
  std::string figure_id;
  for (auto& sub : subs) {
    if (sub.command == Command::Figure) sub.app->add_option("id", figure_id, "figure number");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "starkdisk: " << e.what() << "\n";
    return kExitInvalid;
  }

  const Sub* chosen = nullptr;
  for (const auto& sub : subs) {
    if (sub.app->parsed()) chosen = &sub;
  }
  if (chosen == nullptr) {
    err << "starkdisk: a command is required\n";
    return kExitInvalid;
  }

  RunConfig config;
  try {
    ConfigMap values;
    if (chosen->config_option->count() > 0) values = parse_config_text(read_file(chosen->config_path));
    for (const auto& flag : chosen->flags) {
      if (flag->option->count() > 0) values[flag->key] = flag->value;
    }
    if (!figure_id.empty()) values["figure"] = figure_id;
    config = resolve(chosen->command, values);
  } catch (const std::exception& e) {
    err << "starkdisk: " << e.what() << "\n";
    return kExitInvalid;
  }

  std::string content;
  try {
    const auto result = run_command(config);
    if (config.format == Format::Svg) {
      if (!result.plot) throw ConfigError("format: this command has no plot");
      content = render_svg(*result.plot);
    } else {
      content = render_csv(result.table);
    }
  } catch (const BracketError& e) {
    err << "starkdisk: " << e.what() << "\n";
    return kExitNoSignChange;
  } catch (const SolverError& e) {
    err << "starkdisk: solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const NumericalError& e) {
    err << "starkdisk: numerical failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "starkdisk: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    err << "starkdisk: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    err << "starkdisk: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    if (config.out.empty()) {
      out << content;
      out.flush();
    } else {
      write_atomically(config.out, content);
    }
  } catch (const std::exception& e) {
    err << "starkdisk: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace starkdisk::cli
