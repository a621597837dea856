#pragma once

// Tiny load/store ISA: instruction types, textual assembly, disassembly.
//
// One instruction per line, `;` starts a comment, labels end with `:`.
// Immediates are decimal or 0x-hex; `#name` pseudo-symbols are resolved
// from a symbol table supplied at assembly time (gadget manifests bind
// the array base addresses this way).

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "specwindow/errors.hpp"

namespace specwindow {

inline constexpr unsigned kNumRegs = 8;

// Immediate operand. Remembers the manifest symbol it was written as,
// so disassembly can reproduce `#A` instead of a bare number.
struct Imm {
    std::uint32_t value = 0;
    std::string symbol;  // empty for literals

    friend bool operator==(const Imm&, const Imm&) = default;
};

enum class AluKind { Add, Sub, And, Or, Xor, Lsl, Lsr };
enum class BranchCond { Lt, Ge, Z, Nz };

struct LoadInstr {
    std::uint8_t rd = 0;
    Imm base;
    std::optional<std::uint8_t> index;
    friend bool operator==(const LoadInstr&, const LoadInstr&) = default;
};

struct StoreInstr {
    std::uint8_t rs = 0;
    Imm base;
    std::optional<std::uint8_t> index;
    friend bool operator==(const StoreInstr&, const StoreInstr&) = default;
};

struct MovInstr {
    std::uint8_t rd = 0;
    Imm imm;
    friend bool operator==(const MovInstr&, const MovInstr&) = default;
};

struct AluInstr {
    AluKind op = AluKind::Add;
    std::uint8_t rd = 0;
    std::uint8_t rs = 0;
    std::variant<std::uint8_t, Imm> operand;  // register or immediate
    friend bool operator==(const AluInstr&, const AluInstr&) = default;
};

// Fused compare-and-branch. Lt/Ge take two registers (unsigned compare),
// Z/Nz take one. `target` is a resolved instruction index.
struct BranchInstr {
    BranchCond cond = BranchCond::Lt;
    std::uint8_t rs = 0;
    std::optional<std::uint8_t> rt;
    std::uint32_t target = 0;
    friend bool operator==(const BranchInstr&, const BranchInstr&) = default;
};

struct JmpInstr {
    std::uint32_t target = 0;
    friend bool operator==(const JmpInstr&, const JmpInstr&) = default;
};

struct HaltInstr {
    friend bool operator==(const HaltInstr&, const HaltInstr&) = default;
};

using Instruction =
    std::variant<LoadInstr, StoreInstr, MovInstr, AluInstr, BranchInstr, JmpInstr, HaltInstr>;

using SymbolTable = std::map<std::string, std::uint32_t>;

struct Program {
    std::vector<Instruction> instructions;
    std::map<std::string, std::uint32_t> labels;
    std::string source;

    std::size_t size() const { return instructions.size(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

inline bool is_symbol_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline std::uint8_t parse_reg(const std::string& tok, std::size_t line) {
    std::string t = upper(trim(tok));
    if (t.size() < 2 || t[0] != 'R')
        throw AsmError("expected register, got '" + tok + "'", line);
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(t[i])))
            throw AsmError("expected register, got '" + tok + "'", line);
    unsigned long idx = std::stoul(t.substr(1));
    if (idx >= kNumRegs)
        throw AsmError("register R" + std::to_string(idx) + " out of range (R0..R7)", line);
    return static_cast<std::uint8_t>(idx);
}

inline bool looks_like_reg(const std::string& tok) {
    std::string t = upper(trim(tok));
    if (t.size() < 2 || t[0] != 'R') return false;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
}

inline Imm parse_imm(const std::string& tok, const SymbolTable& symbols, std::size_t line) {
    std::string t = trim(tok);
    if (t.empty()) throw AsmError("expected immediate", line);
    if (t[0] == '#') {
        for (std::size_t i = 1; i < t.size(); ++i)
            if (!is_symbol_char(t[i]))
                throw AsmError("bad symbol '" + t + "'", line);
        auto it = symbols.find(t);
        if (it == symbols.end()) throw AsmError("unknown symbol '" + t + "'", line);
        return Imm{it->second, t};
    }
    bool neg = false;
    std::string digits = t;
    if (!digits.empty() && digits[0] == '-') {
        neg = true;
        digits = digits.substr(1);
    }
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(digits, &used, 0);
        if (used != digits.size()) throw AsmError("bad immediate '" + t + "'", line);
        if (!neg && v > 0xFFFFFFFFull) throw AsmError("immediate '" + t + "' exceeds 32 bits", line);
        if (neg && v > 0x80000000ull) throw AsmError("immediate '" + t + "' exceeds 32 bits", line);
        std::uint32_t raw = neg ? static_cast<std::uint32_t>(0u - static_cast<std::uint32_t>(v))
                                : static_cast<std::uint32_t>(v);
        return Imm{raw, ""};
    } catch (const AsmError&) {
        throw;
    } catch (const std::exception&) {
        throw AsmError("bad immediate '" + t + "'", line);
    }
}

// `[imm]` or `[imm + reg]`
inline std::pair<Imm, std::optional<std::uint8_t>> parse_mem_operand(const std::string& tok,
                                                                     const SymbolTable& symbols,
                                                                     std::size_t line) {
    std::string t = trim(tok);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw AsmError("expected memory operand [imm] or [imm + reg], got '" + tok + "'", line);
    std::string inner = t.substr(1, t.size() - 2);
    auto parts = split(inner, '+');
    if (parts.size() == 1) return {parse_imm(parts[0], symbols, line), std::nullopt};
    if (parts.size() == 2) return {parse_imm(parts[0], symbols, line), parse_reg(parts[1], line)};
    throw AsmError("bad memory operand '" + tok + "'", line);
}

inline std::optional<AluKind> alu_kind(const std::string& mnemonic) {
    if (mnemonic == "ADD") return AluKind::Add;
    if (mnemonic == "SUB") return AluKind::Sub;
    if (mnemonic == "AND") return AluKind::And;
    if (mnemonic == "OR") return AluKind::Or;
    if (mnemonic == "XOR") return AluKind::Xor;
    if (mnemonic == "LSL") return AluKind::Lsl;
    if (mnemonic == "LSR") return AluKind::Lsr;
    return std::nullopt;
}

inline const char* alu_name(AluKind k) {
    switch (k) {
        case AluKind::Add: return "ADD";
        case AluKind::Sub: return "SUB";
        case AluKind::And: return "AND";
        case AluKind::Or: return "OR";
        case AluKind::Xor: return "XOR";
        case AluKind::Lsl: return "LSL";
        case AluKind::Lsr: return "LSR";
    }
    return "?";
}

inline const char* branch_name(BranchCond c) {
    switch (c) {
        case BranchCond::Lt: return "BLT";
        case BranchCond::Ge: return "BGE";
        case BranchCond::Z: return "BZ";
        case BranchCond::Nz: return "BNZ";
    }
    return "?";
}

}  // namespace detail

// Two passes: collect labels and raw statements, then parse operands and
// resolve branch targets. Targets may be labels or absolute indices.
inline Program assemble(const std::string& text, const SymbolTable& symbols = {}) {
    struct RawStmt {
        std::string text;
        std::size_t line;
    };
    Program prog;
    prog.source = text;

    std::vector<RawStmt> stmts;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto cut = line.find(';');
        if (cut != std::string::npos) line = line.substr(0, cut);
        std::string s = detail::trim(line);
        while (!s.empty()) {
            auto colon = s.find(':');
            bool is_label = false;
            if (colon != std::string::npos) {
                std::string name = detail::trim(s.substr(0, colon));
                is_label = !name.empty() &&
                           (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
                for (char c : name)
                    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) is_label = false;
                if (is_label) {
                    if (prog.labels.count(name))
                        throw AsmError("duplicate label '" + name + "'", line_no);
                    prog.labels[name] = static_cast<std::uint32_t>(stmts.size());
                    s = detail::trim(s.substr(colon + 1));
                    continue;
                }
            }
            stmts.push_back({s, line_no});
            break;
        }
    }

    auto resolve_target = [&](const std::string& tok, std::size_t ln) -> std::uint32_t {
        std::string t = detail::trim(tok);
        if (t.empty()) throw AsmError("missing branch target", ln);
        if (std::isdigit(static_cast<unsigned char>(t[0]))) {
            Imm imm = detail::parse_imm(t, symbols, ln);
            if (imm.value >= stmts.size())
                throw AsmError("branch target " + std::to_string(imm.value) + " out of range", ln);
            return imm.value;
        }
        auto it = prog.labels.find(t);
        if (it == prog.labels.end()) throw AsmError("unknown label '" + t + "'", ln);
        if (it->second >= stmts.size())
            throw AsmError("label '" + t + "' points past the last instruction", ln);
        return it->second;
    };

    for (const auto& stmt : stmts) {
        const std::string& s = stmt.text;
        std::size_t ln = stmt.line;
        auto sp = s.find_first_of(" \t");
        std::string mnemonic = detail::upper(sp == std::string::npos ? s : s.substr(0, sp));
        std::string rest = sp == std::string::npos ? "" : detail::trim(s.substr(sp));
        auto ops = rest.empty() ? std::vector<std::string>{} : detail::split(rest, ',');

        auto expect_ops = [&](std::size_t n) {
            if (ops.size() != n)
                throw AsmError(mnemonic + " expects " + std::to_string(n) + " operand(s)", ln);
        };

        if (mnemonic == "LD") {
            expect_ops(2);
            auto [base, index] = detail::parse_mem_operand(ops[1], symbols, ln);
            prog.instructions.push_back(LoadInstr{detail::parse_reg(ops[0], ln), base, index});
        } else if (mnemonic == "ST") {
            expect_ops(2);
            auto [base, index] = detail::parse_mem_operand(ops[1], symbols, ln);
            prog.instructions.push_back(StoreInstr{detail::parse_reg(ops[0], ln), base, index});
        } else if (mnemonic == "MOV") {
            expect_ops(2);
            prog.instructions.push_back(
                MovInstr{detail::parse_reg(ops[0], ln), detail::parse_imm(ops[1], symbols, ln)});
        } else if (auto alu = detail::alu_kind(mnemonic)) {
            expect_ops(3);
            AluInstr instr;
            instr.op = *alu;
            instr.rd = detail::parse_reg(ops[0], ln);
            instr.rs = detail::parse_reg(ops[1], ln);
            if (detail::looks_like_reg(ops[2]))
                instr.operand = detail::parse_reg(ops[2], ln);
            else
                instr.operand = detail::parse_imm(ops[2], symbols, ln);
            prog.instructions.push_back(instr);
        } else if (mnemonic == "BLT" || mnemonic == "BGE") {
            expect_ops(3);
            BranchInstr b;
            b.cond = mnemonic == "BLT" ? BranchCond::Lt : BranchCond::Ge;
            b.rs = detail::parse_reg(ops[0], ln);
            b.rt = detail::parse_reg(ops[1], ln);
            b.target = resolve_target(ops[2], ln);
            prog.instructions.push_back(b);
        } else if (mnemonic == "BZ" || mnemonic == "BNZ") {
            expect_ops(2);
            BranchInstr b;
            b.cond = mnemonic == "BZ" ? BranchCond::Z : BranchCond::Nz;
            b.rs = detail::parse_reg(ops[0], ln);
            b.target = resolve_target(ops[1], ln);
            prog.instructions.push_back(b);
        } else if (mnemonic == "JMP") {
            expect_ops(1);
            prog.instructions.push_back(JmpInstr{resolve_target(ops[0], ln)});
        } else if (mnemonic == "HALT") {
            expect_ops(0);
            prog.instructions.push_back(HaltInstr{});
        } else {
            throw AsmError("unknown mnemonic '" + mnemonic + "'", ln);
        }
    }

    // Labels may point one past the end only if nothing branches there;
    // resolve_target already rejected such uses.
    return prog;
}

namespace detail {

inline std::string imm_text(const Imm& imm) {
    if (!imm.symbol.empty()) return imm.symbol;
    if (imm.value < 10) return std::to_string(imm.value);
    std::ostringstream os;
    os << "0x" << std::hex << imm.value;
    return os.str();
}

inline std::string reg_text(std::uint8_t r) { return "R" + std::to_string(r); }

inline std::string mem_text(const Imm& base, const std::optional<std::uint8_t>& index) {
    std::string s = "[" + imm_text(base);
    if (index) s += " + " + reg_text(*index);
    return s + "]";
}

}  // namespace detail

// Canonical text form. Branch targets become synthetic labels `L<index>`.
// assemble(disassemble(p)) yields an instruction list equal to p's.
inline std::string disassemble(const Program& p) {
    std::vector<bool> targeted(p.instructions.size(), false);
    for (const auto& instr : p.instructions) {
        if (const auto* b = std::get_if<BranchInstr>(&instr)) targeted[b->target] = true;
        if (const auto* j = std::get_if<JmpInstr>(&instr)) targeted[j->target] = true;
    }

    std::ostringstream os;
    for (std::size_t i = 0; i < p.instructions.size(); ++i) {
        if (targeted[i]) os << "L" << i << ":\n";
        os << "  ";
        const Instruction& instr = p.instructions[i];
        if (const auto* ld = std::get_if<LoadInstr>(&instr)) {
            os << "LD " << detail::reg_text(ld->rd) << ", " << detail::mem_text(ld->base, ld->index);
        } else if (const auto* st = std::get_if<StoreInstr>(&instr)) {
            os << "ST " << detail::reg_text(st->rs) << ", " << detail::mem_text(st->base, st->index);
        } else if (const auto* mv = std::get_if<MovInstr>(&instr)) {
            os << "MOV " << detail::reg_text(mv->rd) << ", " << detail::imm_text(mv->imm);
        } else if (const auto* alu = std::get_if<AluInstr>(&instr)) {
            os << detail::alu_name(alu->op) << " " << detail::reg_text(alu->rd) << ", "
               << detail::reg_text(alu->rs) << ", ";
            if (const auto* rt = std::get_if<std::uint8_t>(&alu->operand))
                os << detail::reg_text(*rt);
            else
                os << detail::imm_text(std::get<Imm>(alu->operand));
        } else if (const auto* b = std::get_if<BranchInstr>(&instr)) {
            os << detail::branch_name(b->cond) << " " << detail::reg_text(b->rs) << ", ";
            if (b->rt) os << detail::reg_text(*b->rt) << ", ";
            os << "L" << b->target;
        } else if (const auto* j = std::get_if<JmpInstr>(&instr)) {
            os << "JMP L" << j->target;
        } else {
            os << "HALT";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace specwindow
