#pragma once

#include "json.hpp"

#include <boost/version.hpp>
#include <Eigen/Core>
#include <fftw3.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace lpmf::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Tracks every artifact written under the output directory so the manifest
// can reference all of them.
class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  const fs::path& root() const { return root_; }
  const std::vector<std::string>& files() const { return files_; }

  std::ofstream open(const std::string& rel) {
    const fs::path p = root_ / rel;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    files_.push_back(rel);
    return f;
  }

  void write_text(const std::string& rel, const std::string& text) {
    auto f = open(rel);
    f << text;
  }

  void write_json(const std::string& rel, const json& j) { write_text(rel, j.dump(2) + "\n"); }

  void write_series(const std::string& rel, const std::vector<double>& t, const std::vector<double>& v) {
    std::string s = "t,value\n";
    for (std::size_t i = 0; i < t.size(); ++i) s += fmt(t[i]) + "," + fmt(v[i]) + "\n";
    write_text(rel, s);
  }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

inline json versions() {
  json v;
  v["lpmf"] = "0.1.0";
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["boost"] = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
               std::to_string(BOOST_VERSION % 100);
  v["fftw"] = std::string(fftw_version);
  return v;
}

inline json cplx_array(const Eigen::VectorXcd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
  return a;
}

}  // namespace lpmf::cli
