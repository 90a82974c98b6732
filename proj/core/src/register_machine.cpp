#include "lifespec/register_machine.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace lifespec::rm {
namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

std::uint32_t parse_operand(std::string_view word, std::size_t line_no) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
  if (ec != std::errc{} || ptr != word.data() + word.size())
    throw RmError(RmError::Kind::Parse,
                  "line " + std::to_string(line_no) + ": bad operand '" + std::string(word) + "'");
  return v;
}

std::string upper(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

const mpz_class kZero = 0;

}  // namespace

std::string_view opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Inc: return "INC";
    case Opcode::Dec: return "DEC";
    case Opcode::Halt: return "HALT";
  }
  return "?";
}

Program::Program(std::vector<Instruction> instructions) : instructions_(std::move(instructions)) {
  const auto n = instructions_.size();
  for (std::size_t adr = 0; adr < n; ++adr) {
    const auto& ins = instructions_[adr];
    const bool bad = (ins.op != Opcode::Halt && ins.pass_adr >= n) || (ins.op == Opcode::Dec && ins.fail_adr >= n);
    if (bad)
      throw RmError(RmError::Kind::InvalidAddress,
                    "instruction " + std::to_string(adr) + " jumps past the end of a " + std::to_string(n) +
                        "-instruction program");
  }
}

Program Program::parse(std::string_view text) {
  std::vector<Instruction> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto words = split_words(line);
    if (words.empty()) continue;

    const auto op = upper(words[0]);
    const auto expect = [&](std::size_t n) {
      if (words.size() != n)
        throw RmError(RmError::Kind::Parse, "line " + std::to_string(line_no) + ": " + op + " takes " +
                                                std::to_string(n - 1) + " operand(s)");
    };
    Instruction ins;
    if (op == "INC") {
      expect(3);
      ins = {Opcode::Inc, parse_operand(words[1], line_no), parse_operand(words[2], line_no), 0};
    } else if (op == "DEC") {
      expect(4);
      ins = {Opcode::Dec, parse_operand(words[1], line_no), parse_operand(words[2], line_no),
             parse_operand(words[3], line_no)};
    } else if (op == "HALT") {
      expect(1);
      ins = {Opcode::Halt, 0, 0, 0};
    } else {
      throw RmError(RmError::Kind::Parse, "line " + std::to_string(line_no) + ": unknown opcode '" +
                                              std::string(words[0]) + "'");
    }
    out.push_back(ins);
  }
  if (out.empty()) throw RmError(RmError::Kind::Parse, "program has no instructions");
  return Program(std::move(out));
}

std::uint32_t Program::max_register() const noexcept {
  std::uint32_t m = 0;
  for (const auto& ins : instructions_)
    if (ins.op != Opcode::Halt) m = std::max(m, ins.reg);
  return m;
}

std::string Program::to_text() const {
  std::ostringstream os;
  for (const auto& ins : instructions_) {
    os << opcode_name(ins.op);
    if (ins.op != Opcode::Halt) os << ' ' << ins.reg << ' ' << ins.pass_adr;
    if (ins.op == Opcode::Dec) os << ' ' << ins.fail_adr;
    os << '\n';
  }
  return os.str();
}

State State::with_registers(std::span<const std::uint64_t> values) {
  State s;
  for (auto v : values) s.registers.emplace_back(static_cast<unsigned long>(v));
  return s;
}

const mpz_class& State::reg(std::uint32_t i) const { return i < registers.size() ? registers[i] : kZero; }

mpz_class& State::reg_mut(std::uint32_t i) {
  if (i >= registers.size()) registers.resize(i + 1);
  return registers[i];
}

State step(const Program& program, State s) {
  if (s.halted) throw RmError(RmError::Kind::SteppedWhileHalted, "step on a halted machine");
  if (s.pc >= program.size())
    throw RmError(RmError::Kind::InvalidAddress, "pc " + std::to_string(s.pc) + " outside program");
  const auto& ins = program.at(s.pc);
  switch (ins.op) {
    case Opcode::Halt:
      s.halted = true;
      return s;
    case Opcode::Inc:
      ++s.reg_mut(ins.reg);
      s.pc = ins.pass_adr;
      break;
    case Opcode::Dec:
      if (s.reg(ins.reg) > 0) {
        --s.reg_mut(ins.reg);
        s.pc = ins.pass_adr;
      } else {
        s.pc = ins.fail_adr;
      }
      break;
  }
  ++s.steps_executed;
  return s;
}

RunResult run(const Program& program, State initial, std::uint64_t max_steps) {
  RunResult r;
  r.final_state = std::move(initial);
  auto& s = r.final_state;
  if (s.registers.size() <= program.max_register()) s.registers.resize(program.max_register() + 1);
  while (!s.halted) {
    const auto adr = s.pc;
    const auto op = adr < program.size() ? program.at(adr).op : Opcode::Halt;
    if (op != Opcode::Halt && s.steps_executed >= max_steps)
      throw StepLimitExceeded("no HALT within " + std::to_string(max_steps) + " steps", std::move(r));
    s = step(program, std::move(s));
    r.trace.push_back({adr, op, s.registers});
  }
  return r;
}

std::vector<std::uint64_t> first_primes(std::size_t n) {
  if (n == 0) return {};
  // Rosser's bound p_n < n (ln n + ln ln n) for n >= 6.
  const double dn = static_cast<double>(n);
  std::size_t limit = n < 6 ? 15 : static_cast<std::size_t>(dn * (std::log(dn) + std::log(std::log(dn)))) + 1;
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint64_t> primes;
  primes.reserve(n);
  for (std::size_t i = 2; i <= limit && primes.size() < n; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::size_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

std::uint64_t prime(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("prime index is 1-based");
  return first_primes(static_cast<std::size_t>(n)).back();
}

namespace {

mpz_class prime_power_product(std::span<const std::uint64_t> exponents, std::span<const std::uint64_t> primes) {
  mpz_class acc = 1;
  mpz_class term;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] == 0) continue;
    mpz_ui_pow_ui(term.get_mpz_t(), static_cast<unsigned long>(primes[i]),
                  static_cast<unsigned long>(exponents[i]));
    acc *= term;
  }
  return acc;
}

}  // namespace

UrmRegisters encode_urm(const Program& program, std::span<const std::uint64_t> registers) {
  const std::size_t n = program.size();
  std::array<std::vector<std::uint64_t>, 3> operands;
  std::vector<std::uint64_t> opcodes(n);
  std::uint64_t max_operand = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ins = program.at(i);
    opcodes[i] = static_cast<std::uint64_t>(ins.op);
    std::array<std::uint64_t, 3> q{};
    if (ins.op == Opcode::Inc) q = {ins.reg, ins.pass_adr, 0};
    if (ins.op == Opcode::Dec) q = {ins.reg, ins.pass_adr, ins.fail_adr};
    for (int k = 0; k < 3; ++k) {
      operands[k].push_back(q[k]);
      max_operand = std::max(max_operand, q[k]);
    }
  }
  const auto primes = first_primes(std::max<std::size_t>({n, registers.size(), max_operand + 1, 1}));

  UrmRegisters R;
  R[0] = prime_power_product(registers, primes);
  R[1] = prime_power_product(opcodes, primes);
  for (int k = 0; k < 3; ++k) {
    // Operand q is stored as exponent P(q+1) - 2, so q = 0 contributes nothing.
    std::vector<std::uint64_t> exps;
    for (auto q : operands[k]) exps.push_back(primes[q] - 2);
    R[2 + k] = prime_power_product(exps, primes);
  }
  R[5] = 2;
  for (int j = 6; j < 12; ++j) R[j] = 0;
  return R;
}

std::vector<std::uint64_t> prime_exponents(const mpz_class& value, std::size_t count) {
  if (value <= 0) throw std::invalid_argument("prime_exponents needs a positive value");
  std::vector<std::uint64_t> out;
  mpz_class rest = value;
  for (auto p : first_primes(count)) {
    std::uint64_t e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), static_cast<unsigned long>(p))) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), static_cast<unsigned long>(p));
      ++e;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace lifespec::rm
