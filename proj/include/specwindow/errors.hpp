#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace specwindow {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Assembly-source problem, carries the 1-based source line.
struct AsmError : Error {
    AsmError(const std::string& msg, std::size_t line_no)
        : Error("asm line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
    std::size_t line;
};

// Access outside the memory image on an architecturally visible path.
struct MemError : Error {
    MemError(const std::string& msg, std::uint64_t address)
        : Error(msg + " (addr 0x" + to_hex(address) + ")"), addr(address) {}
    std::uint64_t addr;

private:
    static std::string to_hex(std::uint64_t v) {
        static const char* digits = "0123456789abcdef";
        std::string s;
        do {
            s.insert(s.begin(), digits[v & 0xF]);
            v >>= 4;
        } while (v != 0);
        return s;
    }
};

// Step or cycle budget ran out before the program halted.
struct FuelError : Error {
    using Error::Error;
};

// Bad run configuration or gadget manifest.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace specwindow
