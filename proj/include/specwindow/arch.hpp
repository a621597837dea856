#pragma once

// Architectural state and the sequential (non-speculative) reference
// semantics. run_seq is the ISA-level ground truth the speculative
// simulator is checked against.

#include <array>
#include <cstdint>
#include <vector>

#include "specwindow/errors.hpp"
#include "specwindow/isa.hpp"

namespace specwindow {

inline constexpr std::size_t kDefaultMemSize = 64 * 1024;

struct ArchState {
    std::array<std::uint32_t, kNumRegs> regs{};
    std::vector<std::uint8_t> mem;
    std::uint32_t pc = 0;
    bool halted = false;

    ArchState() : mem(kDefaultMemSize, 0) {}
    explicit ArchState(std::size_t mem_size) : mem(mem_size, 0) {}

    bool in_image(std::uint64_t addr) const { return addr + 4 <= mem.size(); }

    // 32-bit little-endian accesses; the only width the ISA has.
    std::uint32_t load_u32(std::uint64_t addr) const {
        if (!in_image(addr)) throw MemError("load outside memory image", addr);
        return static_cast<std::uint32_t>(mem[addr]) |
               (static_cast<std::uint32_t>(mem[addr + 1]) << 8) |
               (static_cast<std::uint32_t>(mem[addr + 2]) << 16) |
               (static_cast<std::uint32_t>(mem[addr + 3]) << 24);
    }

    void store_u32(std::uint64_t addr, std::uint32_t v) {
        if (!in_image(addr)) throw MemError("store outside memory image", addr);
        mem[addr] = static_cast<std::uint8_t>(v);
        mem[addr + 1] = static_cast<std::uint8_t>(v >> 8);
        mem[addr + 2] = static_cast<std::uint8_t>(v >> 16);
        mem[addr + 3] = static_cast<std::uint8_t>(v >> 24);
    }

    friend bool operator==(const ArchState&, const ArchState&) = default;
};

struct MemEvent {
    enum class Kind { Read, Write };
    Kind kind;
    std::uint64_t addr;

    friend bool operator==(const MemEvent&, const MemEvent&) = default;
};

inline std::uint32_t eval_alu(AluKind op, std::uint32_t a, std::uint32_t b) {
    switch (op) {
        case AluKind::Add: return a + b;
        case AluKind::Sub: return a - b;
        case AluKind::And: return a & b;
        case AluKind::Or: return a | b;
        case AluKind::Xor: return a ^ b;
        case AluKind::Lsl: return b >= 32 ? 0 : a << b;
        case AluKind::Lsr: return b >= 32 ? 0 : a >> b;
    }
    return 0;
}

// Unsigned 32-bit compares; Z/Nz ignore the second operand.
inline bool eval_branch(BranchCond cond, std::uint32_t a, std::uint32_t b) {
    switch (cond) {
        case BranchCond::Lt: return a < b;
        case BranchCond::Ge: return a >= b;
        case BranchCond::Z: return a == 0;
        case BranchCond::Nz: return a != 0;
    }
    return false;
}

inline std::uint64_t effective_addr(const ArchState& s, const Imm& base,
                                    const std::optional<std::uint8_t>& index) {
    std::uint64_t addr = base.value;
    if (index) addr += s.regs[*index];
    return addr;
}

struct SeqResult {
    ArchState state;
    std::vector<MemEvent> events;
};

// Executes in program order, no prediction, no speculation. `fuel`
// bounds the number of executed instructions. Running off the end of
// the program stops execution with `halted` still false.
inline SeqResult run_seq(ArchState s, const Program& p, std::uint64_t fuel) {
    SeqResult r;
    std::uint64_t steps = 0;
    while (!s.halted && s.pc < p.size()) {
        if (steps++ >= fuel) throw FuelError("run_seq: fuel exhausted");
        const Instruction& instr = p.instructions[s.pc];
        if (const auto* ld = std::get_if<LoadInstr>(&instr)) {
            std::uint64_t addr = effective_addr(s, ld->base, ld->index);
            s.regs[ld->rd] = s.load_u32(addr);
            r.events.push_back({MemEvent::Kind::Read, addr});
            s.pc++;
        } else if (const auto* st = std::get_if<StoreInstr>(&instr)) {
            std::uint64_t addr = effective_addr(s, st->base, st->index);
            s.store_u32(addr, s.regs[st->rs]);
            r.events.push_back({MemEvent::Kind::Write, addr});
            s.pc++;
        } else if (const auto* mv = std::get_if<MovInstr>(&instr)) {
            s.regs[mv->rd] = mv->imm.value;
            s.pc++;
        } else if (const auto* alu = std::get_if<AluInstr>(&instr)) {
            std::uint32_t b = std::holds_alternative<std::uint8_t>(alu->operand)
                                  ? s.regs[std::get<std::uint8_t>(alu->operand)]
                                  : std::get<Imm>(alu->operand).value;
            s.regs[alu->rd] = eval_alu(alu->op, s.regs[alu->rs], b);
            s.pc++;
        } else if (const auto* b = std::get_if<BranchInstr>(&instr)) {
            bool taken = eval_branch(b->cond, s.regs[b->rs], b->rt ? s.regs[*b->rt] : 0);
            s.pc = taken ? b->target : s.pc + 1;
        } else if (const auto* j = std::get_if<JmpInstr>(&instr)) {
            s.pc = j->target;
        } else {
            s.halted = true;
        }
    }
    r.state = std::move(s);
    return r;
}

}  // namespace specwindow
