#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gaitsim/subject.hpp"

// Helpers shared across the test binaries: a per-suite scratch directory under
// the test working directory, access to the repository data files, and the
// roster's first subject as a common fixture.
namespace testutil {

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::current_path() / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string repo_path(const std::string& rel) {
  return std::string(GAITSIM_SOURCE_DIR) + "/" + rel;
}

inline std::string data_path(const std::string& rel) {
  return repo_path("data/" + rel);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("testutil: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("testutil: cannot write " + path);
  out << text;
}

// Subject 1 of the roster: 74 kg, 172.4 cm, preferred speed 1.25 m/s.
inline gaitsim::SubjectSpec test_subject() {
  gaitsim::SubjectSpec s;
  s.id = 1;
  s.sex = "M";
  s.mass = 74.0;
  s.height_cm = 172.4;
  s.age = 25;
  s.speed = 1.25;
  return s;
}

}  // namespace testutil
