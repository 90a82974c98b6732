// rm run | rm encode

#include <algorithm>
#include <cstdio>
#include <memory>

#include "cli.hpp"
#include "lifespec/register_machine.hpp"

namespace lifespec::cli {
namespace {

struct RmArgs {
  std::string program;
  std::vector<std::uint64_t> regs;
  std::uint64_t max_steps = 1'000'000;
  bool no_trace = false;
};

std::string registers_text(const std::vector<mpz_class>& regs, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += "r" + std::to_string(i) + "=" + (i < regs.size() ? regs[i].get_str() : "0");
  }
  return out;
}

void print_final(const rm::RunResult& r, std::size_t n, std::FILE* to) {
  std::fprintf(to, "%s\n", registers_text(r.final_state.registers, n).c_str());
  std::fprintf(to, "%s after %llu steps, pc=%u\n", r.final_state.halted ? "halted" : "stopped",
               (unsigned long long)r.final_state.steps_executed, r.final_state.pc);
}

void run_rm(const RmArgs& a) {
  const auto program = rm::Program::parse(read_input(a.program));
  const std::size_t n = std::max<std::size_t>(a.regs.size(), program.max_register() + 1);
  rm::RunResult r;
  try {
    r = rm::run(program, rm::State::with_registers(a.regs), a.max_steps);
  } catch (const rm::StepLimitExceeded& e) {
    print_final(e.partial(), n, stderr);
    throw;
  }
  if (!a.no_trace) {
    std::printf("%-6s %-5s %-10s %s\n", "step", "adr", "op", "registers");
    std::uint64_t step = 0;
    for (const auto& t : r.trace) {
      const auto& ins = program.at(t.address);
      std::string op(rm::opcode_name(t.op));
      if (t.op != rm::Opcode::Halt) op += " " + std::to_string(ins.reg);
      const std::string idx = t.op == rm::Opcode::Halt ? "-" : std::to_string(++step);
      std::printf("%-6s %-5u %-10s %s\n", idx.c_str(), t.address, op.c_str(), registers_text(t.registers, n).c_str());
    }
  }
  print_final(r, n, stdout);
}

void run_encode(const RmArgs& a) {
  const auto program = rm::Program::parse(read_input(a.program));
  for (const auto& R : rm::encode_urm(program, a.regs)) std::printf("%s\n", R.get_str().c_str());
}

}  // namespace

void add_rm(CLI::App& app) {
  auto a = std::make_shared<RmArgs>();
  auto* rm = app.add_subcommand("rm", "Register machine: run a program or encode it for the URM");
  rm->require_subcommand(1);
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--program", a->program, "Program text: INC n pass / DEC n pass fail / HALT")->required();
    sub->add_option("--regs", a->regs, "Initial registers r0,r1,...")->delimiter(',');
  };
  auto* run = rm->add_subcommand("run", "Run to HALT and print the register trace");
  common(run);
  run->add_option("--max-steps", a->max_steps, "INC/DEC limit before giving up")->capture_default_str();
  run->add_flag("--no-trace", a->no_trace, "Print only the final state");
  run->callback([a] { run_rm(*a); });
  auto* enc = rm->add_subcommand("encode", "Print the URM registers R0..R11, one per line");
  common(enc);
  enc->callback([a] { run_encode(*a); });
}

}  // namespace lifespec::cli
