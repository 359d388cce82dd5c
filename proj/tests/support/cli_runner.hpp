#pragma once

// Helpers for driving the installed CLI binary from tests. The binary path
// arrives via the PITCH2D_BIN environment variable (set by CTest).

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testsupport {

inline std::string cli_path() {
  const char* env = std::getenv("PITCH2D_BIN");
  if (env != nullptr && *env != '\0') return env;
  return "./tools/pitch2d";  // build-tree fallback
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

// Runs `pitch2d <args>` with output captured to a file in `dir`.
inline CliResult run_cli(const std::string& args, const std::filesystem::path& dir,
                         const std::string& env_prefix = "") {
  const std::filesystem::path log = dir / "cli_output.log";
  const std::string command =
      env_prefix + "\"" + cli_path() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(command.c_str());

  CliResult result;
  result.exit_code = raw < 0 ? raw : WEXITSTATUS(raw);
  std::ifstream in(log);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

// A unique scratch directory below the system temp dir, removed on
// destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("pitch2d_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace testsupport
