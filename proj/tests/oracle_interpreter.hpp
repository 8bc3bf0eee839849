#pragma once

// Independent re-implementation of the reference machine, written directly
// against docs/machine.md for cross-checking the production interpreter.
// Deliberately different structure: eager step loop, map-backed tape, string
// I/O.  Test-only; keep it free of any dependency on src/machine.cpp.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct result {
  std::string output;
  uint64_t consumed = 0;
  uint64_t steps = 0;
  std::string status;
};

inline result run(const std::string& prog, const std::string& cond, uint64_t budget,
                  uint64_t out_limit) {
  std::map<long long, int> tape;
  long long head = 0;
  std::vector<int> code;
  std::size_t next_bit = 0;
  std::string out;
  uint64_t steps = 0;
  std::size_t in_pos = 0;
  int acc = 0, accn = 0;

  auto decode_next = [&]() -> bool {
    while (accn < 3) {
      if (next_bit >= prog.size()) return false;
      acc = (acc << 1) | (prog[next_bit++] == '1' ? 1 : 0);
      ++accn;
    }
    code.push_back(acc);
    acc = 0;
    accn = 0;
    return true;
  };
  auto cell = [&]() -> int {
    auto it = tape.find(head);
    return it == tape.end() ? 0 : it->second;
  };

  std::size_t ip = 0;
  while (true) {
    if (out.size() >= out_limit) return {out, next_bit, steps, "OutputLimitReached"};
    if (steps >= budget) return {out, next_bit, steps, "StepBudgetExhausted"};
    while (ip >= code.size())
      if (!decode_next()) return {out, next_bit, steps, "ProgramBitsExhausted"};
    const int op = code[ip];
    ++steps;
    switch (op) {
      case 0:
        --head;
        ++ip;
        break;
      case 1:
        ++head;
        ++ip;
        break;
      case 2:
        tape[head] = 1 - cell();
        ++ip;
        break;
      case 3:
        out += cell() ? '1' : '0';
        ++ip;
        break;
      case 4:
        if (in_pos >= cond.size()) return {out, next_bit, steps, "Halted"};
        tape[head] = cond[in_pos++] == '1' ? 1 : 0;
        ++ip;
        break;
      case 5:
        if (cell() == 0) {
          int depth = 1;
          std::size_t j = ip + 1;
          while (depth > 0) {
            while (j >= code.size())
              if (!decode_next()) return {out, next_bit, steps, "ProgramBitsExhausted"};
            if (code[j] == 5) ++depth;
            if (code[j] == 6) --depth;
            ++j;
          }
          ip = j;
        } else {
          ++ip;
        }
        break;
      case 6:
        if (cell() == 1) {
          int depth = 1;
          long long j = (long long)ip - 1;
          for (; j >= 0; --j) {
            if (code[j] == 6) ++depth;
            if (code[j] == 5) {
              --depth;
              if (depth == 0) break;
            }
          }
          if (j < 0 || depth != 0) return {out, next_bit, steps, "Halted"};
          ip = (std::size_t)j;
        } else {
          ++ip;
        }
        break;
      case 7:
        return {out, next_bit, steps, "Halted"};
    }
  }
}

}  // namespace oracle
