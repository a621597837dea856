#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "specwindow/isa.hpp"
#include "specwindow/random_program.hpp"

using namespace specwindow;

TEST_CASE("assembler parses every instruction form") {
    SymbolTable syms{{"#buf", 0x1000}};
    Program p = assemble(R"(
; comment-only line
start:
  MOV R0, 5
  MOV R1, 0x10
  MOV R2, -1
  MOV R3, #buf
  ADD R4, R0, R1
  SUB R4, R4, 3
  AND R5, R4, R0
  OR  R5, R5, 1
  XOR R5, R5, R5
  LSL R6, R0, 2
  LSR R6, R6, R1
  LD R7, [#buf]
  LD R7, [#buf + R0]
  ST R7, [16]
  ST R7, [16 + R1]
  BLT R0, R1, start
  BGE R0, R1, start
  BZ R5, start
  BNZ R5, 0
  JMP end
end:
  HALT
)",
                         syms);
    REQUIRE(p.size() == 21);
    REQUIRE(std::get<MovInstr>(p.instructions[0]).imm.value == 5);
    REQUIRE(std::get<MovInstr>(p.instructions[1]).imm.value == 0x10);
    REQUIRE(std::get<MovInstr>(p.instructions[2]).imm.value == 0xFFFFFFFFu);
    REQUIRE(std::get<MovInstr>(p.instructions[3]).imm.value == 0x1000);
    REQUIRE(std::get<MovInstr>(p.instructions[3]).imm.symbol == "#buf");

    const auto& ld0 = std::get<LoadInstr>(p.instructions[11]);
    REQUIRE(ld0.base.value == 0x1000);
    REQUIRE_FALSE(ld0.index.has_value());
    const auto& ld1 = std::get<LoadInstr>(p.instructions[12]);
    REQUIRE(ld1.index == std::uint8_t{0});

    const auto& blt = std::get<BranchInstr>(p.instructions[15]);
    REQUIRE(blt.cond == BranchCond::Lt);
    REQUIRE(blt.target == 0);
    REQUIRE(blt.rt == std::uint8_t{1});
    const auto& bnz = std::get<BranchInstr>(p.instructions[18]);
    REQUIRE(bnz.cond == BranchCond::Nz);
    REQUIRE_FALSE(bnz.rt.has_value());

    REQUIRE(p.labels.at("start") == 0);
    REQUIRE(p.labels.at("end") == 20);
    REQUIRE(std::holds_alternative<HaltInstr>(p.instructions[20]));
}

TEST_CASE("label on the same line as an instruction") {
    Program p = assemble("top: MOV R0, 1\n  JMP top\n");
    REQUIRE(p.size() == 2);
    REQUIRE(p.labels.at("top") == 0);
    REQUIRE(std::get<JmpInstr>(p.instructions[1]).target == 0);
}

TEST_CASE("assembler rejects malformed programs") {
    CHECK_THROWS_AS(assemble("MOV R8, 1\n"), AsmError);
    CHECK_THROWS_AS(assemble("MOV R0\n"), AsmError);
    CHECK_THROWS_AS(assemble("FROB R0, 1\n"), AsmError);
    CHECK_THROWS_AS(assemble("LD R0, [#nope]\n"), AsmError);
    CHECK_THROWS_AS(assemble("JMP missing\n"), AsmError);
    CHECK_THROWS_AS(assemble("JMP 5\nHALT\n"), AsmError);  // numeric target past the end
    CHECK_THROWS_AS(assemble("x: MOV R0, 1\nx: HALT\n"), AsmError);
    CHECK_THROWS_AS(assemble("MOV R0, 0x1FFFFFFFF\n"), AsmError);
    CHECK_THROWS_AS(assemble("BLT R0, start\n"), AsmError);  // two-reg form needs both
}

TEST_CASE("assembly errors carry the source line") {
    try {
        assemble("MOV R0, 1\nMOV R9, 2\n");
        FAIL("expected AsmError");
    } catch (const AsmError& e) {
        REQUIRE(e.line == 2);
    }
}

TEST_CASE("disassembly round-trips corpus-style source") {
    SymbolTable syms{{"#A-size", 0x40}, {"#A", 0x1000}, {"#B", 0x4000}};
    Program p = assemble(R"(
start:
  LD R1, [#A-size]
  BLT R0, R1, body
  JMP end
body:
  LD R2, [#A + R0]
  LD R3, [#B + R2]
end:
  HALT
)",
                         syms);
    std::string text = disassemble(p);
    Program q = assemble(text, syms);
    REQUIRE(p.instructions == q.instructions);
    // Symbols survive the round trip in the printed text.
    REQUIRE(text.find("#A-size") != std::string::npos);
    REQUIRE(text.find("#B") != std::string::npos);
}

TEST_CASE("disassembly round-trips random programs") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 50; ++i) {
        Program p = random_program(rng);
        Program q = assemble(disassemble(p));
        REQUIRE(p.instructions == q.instructions);
    }
}
