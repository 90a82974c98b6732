// Minsky-style register machine (INC / DEC / HALT) and the Goedel encoding
// that loads a machine description into the twelve registers of the
// universal register machine.
#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lifespec::rm {

// Numeric values are the operator codes used by the encoder.
enum class Opcode : std::uint8_t { Halt = 0, Inc = 1, Dec = 2 };

struct Instruction {
  Opcode op = Opcode::Halt;
  std::uint32_t reg = 0;
  std::uint32_t pass_adr = 0;
  std::uint32_t fail_adr = 0;  // DEC only

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

class RmError : public std::runtime_error {
 public:
  enum class Kind { Parse, InvalidAddress, SteppedWhileHalted, StepLimitExceeded };
  RmError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class Program {
 public:
  Program() = default;
  // Throws RmError{InvalidAddress} if any jump target is out of range.
  explicit Program(std::vector<Instruction> instructions);

  // One instruction per line: "INC n pass", "DEC n pass fail", "HALT".
  // Blank lines and '#' comments are skipped; addresses count instructions
  // from zero.
  static Program parse(std::string_view text);

  std::span<const Instruction> instructions() const noexcept { return instructions_; }
  std::size_t size() const noexcept { return instructions_.size(); }
  const Instruction& at(std::size_t adr) const { return instructions_.at(adr); }
  std::uint32_t max_register() const noexcept;

  std::string to_text() const;

 private:
  std::vector<Instruction> instructions_;
};

struct State {
  std::vector<mpz_class> registers;  // r_i; indices past the end read as 0
  std::uint32_t pc = 0;
  bool halted = false;
  // Executed INC/DEC operations; reaching HALT is not counted.
  std::uint64_t steps_executed = 0;

  static State with_registers(std::span<const std::uint64_t> values);
  const mpz_class& reg(std::uint32_t i) const;
  mpz_class& reg_mut(std::uint32_t i);
};

State step(const Program& program, State state);

struct TraceEntry {
  std::uint32_t address;
  Opcode op;
  std::vector<mpz_class> registers;  // after the instruction
};

struct RunResult {
  State final_state;
  std::vector<TraceEntry> trace;
};

// Steps until HALT. Throws StepLimitExceeded (carrying the partial run) when
// more than max_steps INC/DEC instructions would be executed.
RunResult run(const Program& program, State initial, std::uint64_t max_steps);

class StepLimitExceeded : public RmError {
 public:
  StepLimitExceeded(const std::string& what, RunResult partial)
      : RmError(Kind::StepLimitExceeded, what), partial_(std::move(partial)) {}
  const RunResult& partial() const noexcept { return partial_; }

 private:
  RunResult partial_;
};

// n-th prime, 1-based: prime(1) == 2.
std::uint64_t prime(std::uint64_t n);
// The first n primes.
std::vector<std::uint64_t> first_primes(std::size_t n);

using UrmRegisters = std::array<mpz_class, 12>;

// R0: register contents, R1: operator codes, R2..R4: first to third operands
// (a missing operand counts as 0), R5 = 2, R6..R11 = 0.
UrmRegisters encode_urm(const Program& program, std::span<const std::uint64_t> registers);

// Exponents of the first `count` primes in `value`, by trial division.
std::vector<std::uint64_t> prime_exponents(const mpz_class& value, std::size_t count);

std::string_view opcode_name(Opcode op);

}  // namespace lifespec::rm
