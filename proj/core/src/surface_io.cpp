#include "near_misses/surface_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "near_misses/error.hpp"

namespace near_misses {

namespace {

using nlohmann::json;

std::optional<Box> read_domain(const json& doc) {
  if (!doc.contains("domain")) return std::nullopt;
  const auto& d = doc.at("domain");
  return Box(d.at("lo").get<std::vector<double>>(), d.at("hi").get<std::vector<double>>(),
             d.value("closed", false));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidQuery("cannot open surface file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// FNV-1a, 64 bit.
std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

MongeChart surface_from_json_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidQuery(std::string("surface JSON: ") + e.what());
  }
  try {
    const std::string kind = doc.value("kind", "builtin");
    const std::string name = doc.at("name").get<std::string>();
    std::optional<double> margin;
    if (doc.contains("margin")) margin = doc.at("margin").get<double>();
    if (kind == "builtin") {
      MongeChart chart = builtin_surface(name, margin);
      if (doc.contains("ambient_dim") && doc.at("ambient_dim").get<std::size_t>() != chart.ambient_dim()) {
        throw InvalidQuery("surface JSON: ambient_dim does not match builtin " + name);
      }
      if (auto box = read_domain(doc)) chart = chart.restricted(*box);
      return chart;
    }
    if (kind != "polynomial") throw InvalidQuery("surface JSON: unknown kind '" + kind + "'");
    const auto n = doc.at("ambient_dim").get<std::size_t>();
    if (n < 2) throw InvalidQuery("surface JSON: ambient_dim must be >= 2");
    std::vector<Monomial> terms;
    for (const auto& c : doc.at("coefficients")) {
      const auto coef = c.at("coef").get<std::vector<std::int64_t>>();
      if (coef.size() != 2) throw InvalidQuery("surface JSON: coef must be [num, den]");
      terms.push_back({c.at("exponents").get<std::vector<int>>(), {coef[0], coef[1]}});
    }
    auto box = read_domain(doc);
    if (!box) throw InvalidQuery("surface JSON: polynomial surfaces need a domain");
    if (margin && *margin > 0.0) *box = box->inset(*margin);
    return polynomial_chart(name, n, RationalPolynomial(n - 1, std::move(terms)), doc.value("root", 1), *box);
  } catch (const json::exception& e) {
    throw InvalidQuery(std::string("surface JSON: ") + e.what());
  }
}

MongeChart load_surface_file(const std::string& path) { return surface_from_json_text(read_file(path)); }

MongeChart resolve_surface(const std::string& name_or_path) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(name_or_path, ec)) return load_surface_file(name_or_path);
  return builtin_surface(name_or_path);
}

std::string surface_fingerprint(const std::string& name_or_path) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(name_or_path, ec)) return fnv1a_hex(read_file(name_or_path));
  return fnv1a_hex(name_or_path);
}

}  // namespace near_misses
