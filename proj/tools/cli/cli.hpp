#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "near_misses/surfaces.hpp"
#include "near_misses/weights.hpp"

namespace near_misses::cli {

using nlohmann::json;

/// Options shared by every subcommand.
struct Common {
  int threads = 1;
  bool json_out = false;
  std::string out_path;
  std::uint64_t seed = 1;
};

/// Reproducibility record written next to every --out file.
struct RunManifest {
  std::vector<std::string> argv;
  std::string surface_hash;
  std::uint64_t seed = 1;
  int threads = 1;
  std::map<std::string, double> tolerances;
  std::string version;
  double wall_seconds = 0.0;

  json to_json() const;
};

/// Subcommand output: CSV text and the same payload as JSON.
struct Payload {
  std::string csv;
  json doc;
};

class Context {
 public:
  Context(std::vector<std::string> argv, Common& common);

  Common& common() { return common_; }
  RunManifest& manifest() { return manifest_; }
  /// NEAR_MISSES_THREADS wins over --threads.
  int threads() const;

  /// Writes the payload to --out (plus a manifest sidecar) or stdout.
  void emit(const Payload& payload);

 private:
  Common& common_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

void add_common(CLI::App& sub, Common& common);

/// "1,2,3" -> {1, 2, 3}
std::vector<std::int64_t> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

/// Bump weight centred in the domain with radius 3/8 of its smallest width,
/// unless centre or radius are given.
WeightPtr default_weight(const MongeChart& chart, const std::vector<double>& center, double radius);

void register_counting(CLI::App& app, Common& common, std::vector<std::string>& argv);
void register_analysis(CLI::App& app, Common& common, std::vector<std::string>& argv);
void register_experiments(CLI::App& app, Common& common, std::vector<std::string>& argv);

}  // namespace near_misses::cli
