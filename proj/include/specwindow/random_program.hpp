#pragma once

// Random well-formed programs for differential testing. Every generated
// program terminates and stays inside the memory image on all paths —
// including mispredicted ones — so the speculative machines can be
// compared against the plain sequential interpreter.
//
// Shape: a fixed number of straight-line blocks, each ending in either
// a fall-through, a forward branch/jump to a later block, or HALT. One
// optional counted loop (R7 is reserved as its counter) may jump
// backwards. Load/store addresses are masked to a small window before
// use, so even a wrong-path execution of any block is in bounds.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "specwindow/arch.hpp"
#include "specwindow/isa.hpp"

namespace specwindow {

struct RandomProgramOptions {
    std::uint32_t blocks = 8;
    std::uint32_t max_block_len = 6;  // ALU/MOV/LD/ST per block, before the terminator
    std::uint32_t mem_size = kDefaultMemSize;
    bool allow_loop = true;
};

inline Program random_program(std::mt19937_64& rng, const RandomProgramOptions& opt = {}) {
    auto pick = [&](std::uint32_t n) { return static_cast<std::uint32_t>(rng() % n); };
    // R7 is the loop counter; the other registers are fair game.
    auto reg = [&] { return static_cast<std::uint8_t>(pick(7)); };

    std::string src;
    auto line = [&](const std::string& s) {
        src += s;
        src += '\n';
    };

    // Keep effective addresses below mem_size even after the +index:
    // index registers are masked to 0xFC (word aligned) right before use
    // and bases leave 0x100 of headroom.
    const std::uint32_t base_limit = opt.mem_size - 0x100;

    std::uint32_t loop_block = opt.allow_loop && opt.blocks >= 4 ? 1 + pick(opt.blocks - 2) : 0;

    for (std::uint32_t b = 0; b < opt.blocks; ++b) {
        line("B" + std::to_string(b) + ":");
        if (b == loop_block && loop_block != 0) {
            // Counted loop: init the trip count, then a separate label so
            // the back-edge skips the init.
            line("  MOV R7, " + std::to_string(2 + pick(3)));
            line("B" + std::to_string(b) + "_loop:");
        }
        std::uint32_t len = 1 + pick(opt.max_block_len);
        for (std::uint32_t i = 0; i < len; ++i) {
            switch (pick(8)) {
                case 0: {
                    line("  MOV R" + std::to_string(reg()) + ", " + std::to_string(pick(1 << 16)));
                    break;
                }
                case 1:
                case 2: {  // masked load
                    std::uint8_t idx = reg();
                    std::uint8_t rd = reg();
                    line("  AND R" + std::to_string(idx) + ", R" + std::to_string(idx) + ", 252");
                    line("  LD R" + std::to_string(rd) + ", [" +
                         std::to_string(4 * pick(base_limit / 4)) + " + R" + std::to_string(idx) +
                         "]");
                    break;
                }
                case 3: {  // masked store
                    std::uint8_t idx = reg();
                    std::uint8_t rs = reg();
                    line("  AND R" + std::to_string(idx) + ", R" + std::to_string(idx) + ", 252");
                    line("  ST R" + std::to_string(rs) + ", [" +
                         std::to_string(4 * pick(base_limit / 4)) + " + R" + std::to_string(idx) +
                         "]");
                    break;
                }
                default: {  // two-register or reg-imm ALU
                    static const char* ops[] = {"ADD", "SUB", "AND", "OR", "XOR", "LSL", "LSR"};
                    std::string op = ops[pick(7)];
                    std::string rd = "R" + std::to_string(reg());
                    std::string rs = "R" + std::to_string(reg());
                    if (op == "LSL" || op == "LSR") {
                        line("  " + op + " " + rd + ", " + rs + ", " + std::to_string(pick(33)));
                    } else if (pick(2) == 0) {
                        line("  " + op + " " + rd + ", " + rs + ", R" + std::to_string(reg()));
                    } else {
                        line("  " + op + " " + rd + ", " + rs + ", " + std::to_string(pick(1 << 12)));
                    }
                    break;
                }
            }
        }

        // Terminator.
        if (b + 1 == opt.blocks) {
            line("  HALT");
            break;
        }
        if (b == loop_block && loop_block != 0) {
            line("  SUB R7, R7, 1");
            line("  BNZ R7, B" + std::to_string(b) + "_loop");  // bounded back-edge
            continue;
        }
        std::uint32_t target = b + 1 + pick(opt.blocks - b - 1);
        switch (pick(4)) {
            case 0:
                line("  JMP B" + std::to_string(target));
                break;
            case 1:
                line("  BZ R" + std::to_string(reg()) + ", B" + std::to_string(target));
                break;
            case 2:
                line("  BNZ R" + std::to_string(reg()) + ", B" + std::to_string(target));
                break;
            default:
                line(std::string("  ") + (pick(2) ? "BLT" : "BGE") + " R" + std::to_string(reg()) +
                     ", R" + std::to_string(reg()) + ", B" + std::to_string(target));
                break;
        }
    }

    return assemble(src);
}

}  // namespace specwindow
