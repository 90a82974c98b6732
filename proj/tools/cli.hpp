// Subcommand registration for the lifespec tool.
#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lifespec::cli {

// Bad flag values or unusable input files; exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Set by a subcommand that finished but wants a non-zero status.
inline int g_exit_status = 0;

void add_analyze(CLI::App& app);
void add_render(CLI::App& app);
void add_rm(CLI::App& app);
void add_bench(CLI::App& app);
void add_fetch_urm(CLI::App& app);

// Shortest text that reads back to the same double.
std::string exact(double v);
std::string read_input(const std::string& path);
unsigned default_workers();

}  // namespace lifespec::cli
