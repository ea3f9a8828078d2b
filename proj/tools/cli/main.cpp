#include <cstdlib>
#include <fstream>
#include <iostream>

#include "cli.hpp"
#include "near_misses/error.hpp"
#include "near_misses/numeric.hpp"
#include "near_misses/surfaces.hpp"

#ifndef NEAR_MISSES_VERSION
#define NEAR_MISSES_VERSION "unknown"
#endif

namespace near_misses::cli {

json RunManifest::to_json() const {
  return json{{"command_line", argv},  {"surface_hash", surface_hash}, {"seed", seed},
              {"threads", threads},    {"tolerances", tolerances},     {"version", version},
              {"wall_seconds", wall_seconds}};
}

Context::Context(std::vector<std::string> argv, Common& common)
    : common_(common), start_(std::chrono::steady_clock::now()) {
  manifest_.argv = std::move(argv);
  manifest_.version = NEAR_MISSES_VERSION;
  manifest_.seed = common.seed;
  manifest_.threads = threads();
}

int Context::threads() const {
  if (const char* env = std::getenv("NEAR_MISSES_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw InvalidQuery("NEAR_MISSES_THREADS must be an integer in [1, 1024]");
    return static_cast<int>(v);
  }
  if (common_.threads < 1) throw InvalidQuery("--threads must be >= 1");
  return common_.threads;
}

void Context::emit(const Payload& payload) {
  const std::string body = common_.json_out ? payload.doc.dump(2) + "\n" : payload.csv;
  if (common_.out_path.empty()) {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream out(common_.out_path, std::ios::binary);
  if (!out) throw InvalidQuery("cannot write " + common_.out_path);
  out << body;
  manifest_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  std::ofstream side(common_.out_path + ".manifest.json", std::ios::binary);
  if (!side) throw InvalidQuery("cannot write " + common_.out_path + ".manifest.json");
  side << manifest_.to_json().dump(2) << "\n";
}

void add_common(CLI::App& sub, Common& common) {
  sub.add_option("--threads", common.threads, "worker threads (NEAR_MISSES_THREADS overrides)")->check(CLI::PositiveNumber);
  sub.add_flag("--json", common.json_out, "emit a single JSON document instead of CSV");
  sub.add_option("--out", common.out_path, "write output here and a manifest to <out>.manifest.json");
  sub.add_option("--seed", common.seed, "seed for randomized steps");
}

namespace {

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& s : split(text)) {
    std::size_t used = 0;
    try {
      out.push_back(std::stoll(s, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw InvalidQuery("not an integer list: '" + text + "'");
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text)) {
    std::size_t used = 0;
    try {
      out.push_back(std::stod(s, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw InvalidQuery("not a number list: '" + text + "'");
  }
  return out;
}

WeightPtr default_weight(const MongeChart& chart, const std::vector<double>& center, double radius) {
  const Box& box = chart.domain_box();
  std::vector<double> c = center.empty() ? box.center() : center;
  if (c.size() != box.dim()) throw InvalidQuery("--center needs " + std::to_string(box.dim()) + " coordinates");
  const double r = radius > 0.0 ? radius : 0.375 * box.min_width();
  return std::make_shared<BumpWeight>(std::move(c), r);
}

}  // namespace near_misses::cli

int main(int argc, char** argv) {
  using namespace near_misses;
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Rational points near curved hypersurfaces", "near-misses"};
  app.require_subcommand(1);
  cli::Common common;
  cli::register_counting(app, common, args);
  cli::register_analysis(app, common, args);
  cli::register_experiments(app, common, args);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
