#pragma once

// Cycle-level in-order machine with branch prediction and three
// speculation semantics:
//
//   seq  — branches stall until their operands arrive; no prediction,
//          no speculative work at all.
//   a53  — branches are predicted and a bounded window (spec_depth
//          instructions) may issue under an unresolved branch, but a
//          value produced under a still-unresolved branch cannot feed
//          younger instructions: consumers stall until the branch
//          resolves. Loads issued in the window still fill the cache.
//   ooo  — unbounded window and speculative results forward freely.
//
// Each cycle has two phases: at most one instruction issues, then any
// due branch resolves (commit or squash). Squash restores registers and
// the scoreboard from the branch's snapshot; cache, predictor and the
// observation trace are microarchitectural and persist.
//
// Loads write their value at issue but the scoreboard delays visibility
// by hit/miss latency; a branch resolves resolve_delay cycles after its
// operands' data arrived. Stores and HALT retire only with no branch
// in flight, so memory never changes speculatively and frames never
// need to snapshot the image.

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "specwindow/arch.hpp"
#include "specwindow/cache.hpp"
#include "specwindow/config.hpp"
#include "specwindow/predictor.hpp"

namespace specwindow {

struct TraceEvent {
    enum class Kind { Fill, Hit };
    std::uint64_t cycle = 0;
    Kind kind = Kind::Fill;
    std::uint64_t set = 0;
    std::uint64_t tag = 0;
    bool speculative = false;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct BranchRecord {
    std::uint64_t cycle = 0;  // resolution cycle, or squash cycle if discarded
    std::uint32_t index = 0;  // instruction index of the branch
    std::optional<bool> predicted;  // empty in seq mode
    bool taken = false;             // actual outcome (as computed at issue)
    bool resolved = false;          // false when an older mispredict discarded it
    bool mispredicted = false;

    friend bool operator==(const BranchRecord&, const BranchRecord&) = default;
};

struct SimStats {
    std::uint32_t max_frame_issued = 0;  // worst per-frame speculative issue count
    std::uint64_t frames_opened = 0;
    std::uint64_t squashes = 0;
    std::uint64_t speculative_events = 0;

    friend bool operator==(const SimStats&, const SimStats&) = default;
};

struct SimResult {
    ArchState arch;
    std::uint64_t cycles = 0;  // the simulated PMC reading
    std::vector<TraceEvent> trace;
    CacheState cache;
    PredictorState predictor;
    std::vector<BranchRecord> branch_log;
    SimStats stats;
};

namespace detail {

inline constexpr std::uint64_t kNoFrame = ~std::uint64_t{0};

struct RegInfo {
    std::uint64_t ready_at = 0;          // cycle the value becomes usable
    std::uint64_t producer_frame = kNoFrame;  // frame the producer issued under
};

struct SpecFrame {
    std::uint64_t id = 0;
    std::uint32_t branch_index = 0;
    bool predicted_taken = false;
    bool actual_taken = false;
    std::uint32_t taken_target = 0;
    std::uint64_t resolve_at = 0;
    std::array<std::uint32_t, kNumRegs> regs_snap{};
    std::array<RegInfo, kNumRegs> score_snap{};
    std::uint32_t issued = 0;
    std::optional<std::uint64_t> pending_fault;  // OOB spec load, fires on commit
};

class Machine {
public:
    Machine(const Program& p, ArchState s0, const ModelConfig& cfg, PredictorState pred,
            CacheState cache)
        : prog_(p), cfg_(cfg), depth_(cfg.effective_depth()) {
        cfg_.validate();
        res_.arch = std::move(s0);
        res_.predictor = pred;
        res_.cache = std::move(cache);
    }

    SimResult run(std::uint64_t fuel) {
        for (std::uint64_t t = 0; t < fuel; ++t) {
            issue_phase(t);
            resolve_phase(t);
            if (frames_.empty() && (res_.arch.halted || res_.arch.pc >= prog_.size())) {
                res_.cycles = t + 1;
                return std::move(res_);
            }
        }
        throw FuelError("simulate: cycle budget exhausted");
    }

private:
    const Program& prog_;
    ModelConfig cfg_;
    std::uint32_t depth_;
    SimResult res_;
    std::array<RegInfo, kNumRegs> score_{};
    std::deque<SpecFrame> frames_;  // oldest first
    std::uint64_t next_frame_id_ = 0;

    bool frame_alive(std::uint64_t id) const {
        for (const auto& f : frames_)
            if (f.id == id) return true;
        return false;
    }

    bool value_ready(std::uint8_t r, std::uint64_t t) const { return score_[r].ready_at <= t; }

    // a53 no-forwarding rule: a value produced under a still-unresolved
    // branch cannot be consumed yet.
    bool value_spec_tainted(std::uint8_t r) const {
        return score_[r].producer_frame != kNoFrame && frame_alive(score_[r].producer_frame);
    }

    bool operand_usable(std::uint8_t r, std::uint64_t t) const {
        if (!value_ready(r, t)) return false;
        if (!cfg_.forwarding_allowed() && value_spec_tainted(r)) return false;
        return true;
    }

    bool budget_available() const {
        if (frames_.empty()) return true;
        for (const auto& f : frames_)
            if (f.issued >= depth_) return false;
        return true;
    }

    void count_issue() {
        for (auto& f : frames_) {
            ++f.issued;
            if (f.issued > depth_)
                throw std::logic_error("speculation depth bound violated");
            if (f.issued > res_.stats.max_frame_issued) res_.stats.max_frame_issued = f.issued;
        }
    }

    std::uint64_t current_frame_id() const { return frames_.empty() ? kNoFrame : frames_.back().id; }

    void write_reg(std::uint8_t r, std::uint32_t value, std::uint64_t ready_at) {
        res_.arch.regs[r] = value;
        score_[r] = {ready_at, current_frame_id()};
    }

    void record_access(std::uint64_t t, std::uint64_t addr, bool hit) {
        auto [set, tag] = line_index(addr, cfg_.geometry);
        bool spec = !frames_.empty();
        res_.trace.push_back(
            {t, hit ? TraceEvent::Kind::Hit : TraceEvent::Kind::Fill, set, tag, spec});
        if (spec) ++res_.stats.speculative_events;
    }

    void issue_phase(std::uint64_t t) {
        ArchState& st = res_.arch;
        if (st.halted || st.pc >= prog_.size()) return;
        if (!budget_available()) return;

        const Instruction& instr = prog_.instructions[st.pc];

        if (const auto* mv = std::get_if<MovInstr>(&instr)) {
            count_issue();
            write_reg(mv->rd, mv->imm.value, t + cfg_.alu_latency);
            st.pc++;
        } else if (const auto* alu = std::get_if<AluInstr>(&instr)) {
            if (!operand_usable(alu->rs, t)) return;
            std::uint32_t b;
            if (const auto* rt = std::get_if<std::uint8_t>(&alu->operand)) {
                if (!operand_usable(*rt, t)) return;
                b = st.regs[*rt];
            } else {
                b = std::get<Imm>(alu->operand).value;
            }
            count_issue();
            write_reg(alu->rd, eval_alu(alu->op, st.regs[alu->rs], b), t + cfg_.alu_latency);
            st.pc++;
        } else if (const auto* ld = std::get_if<LoadInstr>(&instr)) {
            if (ld->index && !operand_usable(*ld->index, t)) return;
            count_issue();
            std::uint64_t addr = effective_addr(st, ld->base, ld->index);
            if (!st.in_image(addr)) {
                if (frames_.empty()) throw MemError("load outside memory image", addr);
                // Transient fault: invisible unless this path commits.
                frames_.back().pending_fault = frames_.back().pending_fault
                                                   ? frames_.back().pending_fault
                                                   : std::optional<std::uint64_t>(addr);
                score_[ld->rd] = {t + cfg_.miss_latency, current_frame_id()};
                st.pc++;
                return;
            }
            bool hit = res_.cache.access(addr);
            record_access(t, addr, hit);
            std::uint32_t lat = hit ? cfg_.hit_latency : cfg_.miss_latency;
            write_reg(ld->rd, st.load_u32(addr), t + lat);
            st.pc++;
        } else if (const auto* sto = std::get_if<StoreInstr>(&instr)) {
            // Stores retire in order: only with no branch in flight.
            if (!frames_.empty()) return;
            if (!operand_usable(sto->rs, t)) return;
            if (sto->index && !operand_usable(*sto->index, t)) return;
            count_issue();
            std::uint64_t addr = effective_addr(st, sto->base, sto->index);
            st.store_u32(addr, st.regs[sto->rs]);  // throws MemError when OOB
            bool hit = res_.cache.access(addr);    // write-allocate
            record_access(t, addr, hit);
            st.pc++;
        } else if (const auto* j = std::get_if<JmpInstr>(&instr)) {
            count_issue();
            st.pc = j->target;
        } else if (const auto* b = std::get_if<BranchInstr>(&instr)) {
            issue_branch(*b, t);
        } else {  // HALT
            if (!frames_.empty()) return;
            st.halted = true;
        }
    }

    void issue_branch(const BranchInstr& b, std::uint64_t t) {
        ArchState& st = res_.arch;
        std::uint32_t branch_index = st.pc;

        if (cfg_.mode == Mode::Seq) {
            if (!value_ready(b.rs, t)) return;
            if (b.rt && !value_ready(*b.rt, t)) return;
            bool taken = eval_branch(b.cond, st.regs[b.rs], b.rt ? st.regs[*b.rt] : 0);
            st.pc = taken ? b.target : st.pc + 1;
            res_.branch_log.push_back({t, branch_index, std::nullopt, taken, true, false});
            return;
        }

        // Predicted modes issue through pending operands, but the a53
        // rule still blocks operands produced under an open branch.
        if (!cfg_.forwarding_allowed()) {
            if (value_spec_tainted(b.rs)) return;
            if (b.rt && value_spec_tainted(*b.rt)) return;
        }

        count_issue();
        bool predicted = res_.predictor.predict(branch_index);
        bool actual = eval_branch(b.cond, st.regs[b.rs], b.rt ? st.regs[*b.rt] : 0);

        std::uint64_t arrival = score_[b.rs].ready_at;
        if (b.rt && score_[*b.rt].ready_at > arrival) arrival = score_[*b.rt].ready_at;
        if (arrival < t) arrival = t;

        SpecFrame f;
        f.id = next_frame_id_++;
        f.branch_index = branch_index;
        f.predicted_taken = predicted;
        f.actual_taken = actual;
        f.taken_target = b.target;
        f.resolve_at = arrival + cfg_.resolve_delay;
        f.regs_snap = st.regs;
        f.score_snap = score_;
        frames_.push_back(std::move(f));
        ++res_.stats.frames_opened;

        st.pc = predicted ? b.target : branch_index + 1;
    }

    void resolve_phase(std::uint64_t t) {
        while (!frames_.empty() && frames_.front().resolve_at <= t) {
            SpecFrame f = frames_.front();
            frames_.pop_front();
            res_.branch_log.push_back({t, f.branch_index, f.predicted_taken, f.actual_taken, true,
                                       f.predicted_taken != f.actual_taken});
            res_.predictor.update(f.branch_index, f.actual_taken);

            if (f.predicted_taken == f.actual_taken) {
                // Commit: work issued under this branch becomes
                // architectural, so a suppressed fault is now real.
                if (f.pending_fault)
                    throw MemError("load outside memory image", *f.pending_fault);
                continue;
            }

            // Squash everything younger than the mispredicted branch.
            ++res_.stats.squashes;
            for (const auto& inner : frames_)
                res_.branch_log.push_back(
                    {t, inner.branch_index, inner.predicted_taken, inner.actual_taken, false, false});
            frames_.clear();
            res_.arch.regs = f.regs_snap;
            score_ = f.score_snap;
            res_.arch.pc = f.actual_taken ? f.taken_target : f.branch_index + 1;
            return;
        }
    }
};

}  // namespace detail

// Pure function of its five inputs; fuel bounds total cycles.
inline SimResult simulate(const Program& p, ArchState s0, const ModelConfig& cfg,
                          const PredictorState& pred0, const CacheState& cache0,
                          std::uint64_t fuel) {
    detail::Machine m(p, std::move(s0), cfg, pred0, cache0);
    return m.run(fuel);
}

}  // namespace specwindow
