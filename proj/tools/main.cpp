// lifespec: Life simulation, sector spectra and register-machine utilities.
//
// Exit status: 0 ok, 1 unexpected failure, 2 bad flags or input,
// 3 memory budget exceeded, 4 step limit exceeded.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "cli.hpp"
#include "lifespec/analyzer.hpp"
#include "lifespec/classifier.hpp"
#include "lifespec/manifest.hpp"
#include "lifespec/pattern.hpp"
#include "lifespec/register_machine.hpp"
#include "lifespec/render.hpp"

namespace lifespec::cli {

std::string exact(double v) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return {buf, end};
}

std::string read_input(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw UsageError("cannot read " + path);
  return read_file(path);
}

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace lifespec::cli

int main(int argc, char** argv) {
  using namespace lifespec;
  CLI::App app{"Game of Life sector spectra, class maps and register-machine tools", "lifespec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kEngineVersion));
  cli::add_analyze(app);
  cli::add_render(app);
  cli::add_rm(app);
  cli::add_bench(app);
  cli::add_fetch_urm(app);

  const auto fail = [](int code, const char* kind, const std::exception& e) {
    std::fprintf(stderr, "lifespec: %s: %s\n", kind, e.what());
    return code;
  };
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const spectral::MemoryBudgetExceeded& e) {
    return fail(3, "memory", e);
  } catch (const AllocationTooLarge& e) {
    return fail(3, "memory", e);
  } catch (const rm::StepLimitExceeded& e) {
    return fail(4, "step limit", e);
  } catch (const cli::UsageError& e) {
    return fail(2, "error", e);
  } catch (const RleError& e) {
    return fail(2, "pattern", e);
  } catch (const rm::RmError& e) {
    return fail(2, "program", e);
  } catch (const spectral::SpectralError& e) {
    return fail(2, "config", e);
  } catch (const IncompleteGrid& e) {
    return fail(2, "class map", e);
  } catch (const std::exception& e) {
    return fail(1, "failed", e);
  }
  return cli::g_exit_status;
}
