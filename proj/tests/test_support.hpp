#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "geoagent/geoagent.hpp"

#ifndef GEOAGENT_SOURCE_DIR
#define GEOAGENT_SOURCE_DIR "."
#endif

namespace test_support {

inline std::string src_dir() { return GEOAGENT_SOURCE_DIR; }
inline std::string data_use() { return src_dir() + "/data_use"; }
inline std::string trace(const std::string& name) {
  return src_dir() + "/tests/traces/" + name;
}

// fresh directory under the build tree's temp area
inline std::string fresh_dir(const std::string& tag) {
  static int counter = 0;
  std::string dir = (std::filesystem::temp_directory_path() /
                     ("geoagent_" + tag + "_" + std::to_string(++counter) + "_" +
                      std::to_string(::getpid())))
                        .string();
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double unit_draw(std::mt19937& rng) { return rng() / 4294967296.0; }

// Simple polygon: stratified vertex angles keep every gap below pi.
inline geoagent::Polygon random_polygon(std::mt19937& rng, double cx, double cy,
                                        double radius = 2.0, int max_extra = 8) {
  int n = 4 + static_cast<int>(rng() % (max_extra + 1));
  geoagent::Ring r;
  for (int i = 0; i < n; ++i) {
    double ang = 2 * M_PI * (i + 0.1 + 0.8 * unit_draw(rng)) / n;
    double rad = radius * (0.15 + unit_draw(rng));
    r.push_back({cx + rad * std::cos(ang), cy + rad * std::sin(ang)});
  }
  r.push_back(r.front());
  geoagent::Polygon p;
  p.outer = r;
  geoagent::normalize(p);
  return p;
}

inline geoagent::Polygon square(double x0, double y0, double x1, double y1) {
  geoagent::Polygon p;
  p.outer = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
  geoagent::normalize(p);
  return p;
}

inline geoagent::FeatureCollection collection_of(std::vector<geoagent::Polygon> polys) {
  geoagent::FeatureCollection fc;
  for (auto& p : polys)
    fc.features.push_back({geoagent::Geometry::polygon(std::move(p)), {}});
  geoagent::normalize(fc);
  return fc;
}

inline geoagent::FeatureCollection point_collection(std::vector<geoagent::Vec2> pts) {
  geoagent::FeatureCollection fc;
  for (auto p : pts) fc.features.push_back({geoagent::Geometry::point(p), {}});
  geoagent::normalize(fc);
  return fc;
}

inline double region_area(const std::vector<geoagent::Polygon>& ps) {
  double a = 0;
  for (const auto& p : ps) a += geoagent::area(p);
  return a;
}

struct CliResult {
  int exit_code = -1;
  std::string output;
};

// run the built binary, capturing stdout+stderr
inline CliResult run_cli(const std::string& args) {
#ifdef GEOAGENT_CLI_PATH
  std::string cmd = std::string(GEOAGENT_CLI_PATH) + " " + args + " 2>&1";
#else
  std::string cmd = "./geoagent " + args + " 2>&1";
#endif
  CliResult res;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return res;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
    res.output.append(buf.data(), n);
  int status = ::pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

inline geoagent::RegistryOptions test_registry_options(const std::string& out_root) {
  geoagent::RegistryOptions opts;
  opts.output_root = out_root;
  opts.data_use_root = data_use();
  return opts;
}

inline geoagent::ToolRegistry make_test_registry(const std::string& out_root) {
  return geoagent::register_default_pool(geoagent::make_mock_providers(data_use()),
                                         test_registry_options(out_root));
}

}  // namespace test_support
