// specwindow — speculative-leakage simulator and checker.
//
// Subcommands:
//   run          simulate one gadget measurement and dump the observation
//   attack       flush+reload against a gadget's monitored region
//   check        secret-independence verdict per mode/observer
//   corpus-list  enumerate and validate gadget manifests in a directory
//   fuzz         differential check of the speculative machines against
//                the sequential interpreter on random programs
//
// Exit codes: 0 clean/secure, 1 leak (or divergence) found, 2 bad
// usage/config, 3 simulation or input error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "specwindow/attack.hpp"
#include "specwindow/checker.hpp"
#include "specwindow/gadget.hpp"
#include "specwindow/random_program.hpp"
#include "specwindow/report.hpp"

namespace {

using namespace specwindow;

struct CommonOpts {
    std::string corpus_path;
    std::string config_path;
    std::string out_path;
    std::string mode;
    std::string observer;
    std::string depth;
    std::string format;
    std::uint64_t fuel = 0;
    bool no_train = false;
};

void add_model_flags(CLI::App* cmd, CommonOpts& o, bool with_corpus = true) {
    if (with_corpus)
        cmd->add_option("--corpus", o.corpus_path, "gadget manifest (.json)")->required();
    cmd->add_option("--config", o.config_path, "run configuration file (JSON)");
    cmd->add_option("--out", o.out_path, "write the JSON report to this file");
    cmd->add_option("--mode", o.mode, "semantics: seq | a53 | ooo");
    cmd->add_option("--observer", o.observer, "fill-trace | final-cache | probe");
    cmd->add_option("--depth", o.depth, "speculative issue budget (number or 'unbounded')");
    cmd->add_option("--fuel", o.fuel, "cycle budget per simulation");
    cmd->add_option("--format", o.format, "json | table");
}

RunConfig build_config(const CommonOpts& o) {
    RunConfig cfg;
    if (!o.config_path.empty()) {
        json j;
        try {
            j = json::parse(detail::read_text_file(o.config_path));
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config file: ") + e.what());
        }
        cfg = run_config_from_json(j);
    }
    if (!o.mode.empty()) cfg.model.mode = parse_mode(o.mode);
    if (!o.observer.empty()) cfg.observer = parse_observer(o.observer);
    if (!o.depth.empty()) {
        if (o.depth == "unbounded")
            cfg.model.spec_depth = kUnboundedDepth;
        else
            cfg.model.spec_depth = static_cast<std::uint32_t>(std::stoul(o.depth));
    }
    if (o.fuel) cfg.fuel = o.fuel;
    if (!o.format.empty()) cfg.report_format = o.format;
    cfg.validate();
    return cfg;
}

void emit_report(const json& report, const RunConfig& cfg, const CommonOpts& o,
                 const std::string& table) {
    if (cfg.report_format == "table")
        std::cout << table;
    else
        std::cout << report.dump(2) << "\n";
    if (!o.out_path.empty()) {
        std::ofstream out(o.out_path);
        if (!out) throw ConfigError("cannot write '" + o.out_path + "'");
        out << report.dump(2) << "\n";
    }
}

int cmd_run(const CommonOpts& o, std::uint32_t input, bool input_set, std::uint32_t secret,
            bool secret_set) {
    RunConfig cfg = build_config(o);
    Gadget g = load_gadget(o.corpus_path);
    if (!input_set) input = g.manifest.malicious_inputs.empty() ? g.manifest.valid_inputs.front()
                                                                : g.manifest.malicious_inputs.front();
    if (!secret_set) secret = g.manifest.secret_default;

    Runner runner(g, cfg);
    Measurement m = runner.measure(input, secret, !o.no_train);

    json report = report_envelope("run", cfg);
    report["results"].push_back(
        run_result_to_json(g.manifest.name, cfg.model.mode, input, secret, m));

    std::ostringstream t;
    t << g.manifest.name << " " << to_string(cfg.model.mode) << " input=" << input
      << " secret=" << secret << "\n"
      << "  cycles=" << m.sim.cycles << " halted=" << (m.sim.arch.halted ? "yes" : "no")
      << " frames=" << m.sim.stats.frames_opened << " squashes=" << m.sim.stats.squashes
      << " spec_events=" << m.sim.stats.speculative_events << "\n"
      << "  observation (" << to_string(m.obs.mode) << "): " << m.obs.lines.size()
      << " lines\n";
    emit_report(report, cfg, o, t.str());
    return 0;
}

int cmd_attack(const CommonOpts& o, std::uint32_t input, bool input_set, std::uint32_t secret,
               bool secret_set, bool sweep) {
    RunConfig cfg = build_config(o);
    Gadget g = load_gadget(o.corpus_path);
    if (!g.manifest.monitored) {
        std::cerr << "error: gadget '" << g.manifest.name << "' has no monitored region\n";
        return 3;
    }
    if (!input_set) input = g.manifest.malicious_inputs.empty() ? g.manifest.valid_inputs.front()
                                                                : g.manifest.malicious_inputs.front();

    std::vector<std::uint32_t> secrets;
    if (sweep)
        for (std::uint32_t s = 0; s < 256; ++s) secrets.push_back(s);
    else
        secrets.push_back(secret_set ? secret : g.manifest.secret_default);

    json report = report_envelope("attack", cfg);
    std::ostringstream t;
    bool any_recovered = false;
    std::uint32_t exact = 0;
    for (std::uint32_t s : secrets) {
        AttackResult a = flush_reload(g, cfg, input, s, !o.no_train);
        any_recovered |= !a.recovered_slots.empty();
        if (a.recovered_value && *a.recovered_value == s) ++exact;
        report["results"].push_back(attack_result_to_json(g.manifest.name, cfg.model.mode, a));
        if (!sweep) {
            t << g.manifest.name << " " << to_string(cfg.model.mode) << " input=" << input
              << " secret=" << s << "\n  hot=" << a.hot_slots.size()
              << " recovered=" << a.recovered_slots.size() << " value=";
            if (a.recovered_value)
                t << *a.recovered_value;
            else
                t << "-";
            t << "\n";
        }
    }
    if (sweep)
        t << g.manifest.name << " " << to_string(cfg.model.mode) << ": recovered " << exact << "/"
          << secrets.size() << " secrets exactly\n";
    emit_report(report, cfg, o, t.str());
    return any_recovered ? 1 : 0;
}

int cmd_check(const CommonOpts& o, const std::string& modes_csv) {
    RunConfig cfg = build_config(o);
    Gadget g = load_gadget(o.corpus_path);

    std::vector<Mode> modes;
    if (modes_csv.empty()) {
        modes = {cfg.model.mode};
    } else {
        std::stringstream ss(modes_csv);
        std::string item;
        while (std::getline(ss, item, ',')) modes.push_back(parse_mode(item));
    }

    json report = report_envelope("check", cfg);
    std::ostringstream t;
    bool any_leak = false;
    for (Mode mode : modes) {
        RunConfig mcfg = cfg;
        mcfg.model.mode = mode;
        CheckResult r = check_gadget(g, mcfg);
        any_leak |= r.leak;
        report["results"].push_back(check_result_to_json(r));
        t << std::left << std::setw(18) << g.manifest.name << std::setw(5) << to_string(mode)
          << std::setw(13) << to_string(mcfg.observer) << r.verdict();
        if (r.witness)
            t << "  (input=" << r.witness->input << ", s=" << r.witness->secret << " vs "
              << r.witness->secret_ref << ", " << r.witness->detail << ")";
        t << "\n";
    }
    emit_report(report, cfg, o, t.str());
    return any_leak ? 1 : 0;
}

int cmd_corpus_list(const CommonOpts& o, const std::string& dir) {
    RunConfig cfg = build_config(o);
    json report = report_envelope("corpus-list", cfg);
    std::ostringstream t;

    namespace fs = std::filesystem;
    std::vector<std::string> manifests;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") manifests.push_back(e.path().string());
    std::sort(manifests.begin(), manifests.end());

    for (const auto& path : manifests) {
        Gadget g = load_gadget(path);  // validates manifest and assembles
        json entry{{"gadget", g.manifest.name},
                   {"mode", to_string(cfg.model.mode)},
                   {"file", path},
                   {"asm", g.manifest.asm_file},
                   {"instructions", g.program.size()},
                   {"monitored_slots",
                    g.manifest.monitored ? json(g.manifest.monitored->count) : json(nullptr)},
                   {"description", g.manifest.description}};
        report["results"].push_back(entry);
        t << std::left << std::setw(18) << g.manifest.name << std::setw(4) << g.program.size()
          << " instr  " << path << "\n";
    }
    emit_report(report, cfg, o, t.str());
    return 0;
}

int cmd_fuzz(const CommonOpts& o, std::uint64_t seed, std::uint32_t count) {
    RunConfig cfg = build_config(o);
    std::vector<Mode> modes{Mode::A53, Mode::Ooo};

    json report = report_envelope("fuzz", cfg);
    std::ostringstream t;
    std::mt19937_64 rng(seed);
    std::uint32_t divergences = 0;

    for (std::uint32_t i = 0; i < count; ++i) {
        Program p = random_program(rng);
        ArchState s0;
        for (std::uint8_t r = 0; r < kNumRegs; ++r)
            s0.regs[r] = static_cast<std::uint32_t>(rng());

        SeqResult ref = run_seq(s0, p, cfg.fuel);
        for (Mode mode : modes) {
            ModelConfig mc = cfg.model;
            mc.mode = mode;
            SimResult got = simulate(p, s0, mc, PredictorState{}, CacheState(mc.geometry),
                                     cfg.fuel);
            if (got.arch == ref.state) continue;
            ++divergences;
            report["results"].push_back(json{{"gadget", "random-" + std::to_string(i)},
                                             {"mode", to_string(mode)},
                                             {"seed", seed},
                                             {"index", i},
                                             {"divergence", true}});
            t << "divergence: program " << i << " under " << to_string(mode) << "\n";
        }
    }
    if (report["results"].empty())
        report["results"].push_back(json{{"gadget", "random"},
                                         {"mode", "a53+ooo"},
                                         {"seed", seed},
                                         {"count", count},
                                         {"divergence", false}});
    t << count << " programs, " << divergences << " divergences\n";
    emit_report(report, cfg, o, t.str());
    return divergences ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"speculative-window cache-leakage simulator"};
    app.require_subcommand(1);

    CommonOpts run_o, atk_o, chk_o, lst_o, fz_o;
    std::uint32_t run_input = 0, run_secret = 0, atk_input = 0, atk_secret = 0;
    bool sweep = false;
    std::string modes_csv, corpus_dir = "corpus";
    std::uint64_t seed = 1;
    std::uint32_t count = 100;

    CLI::App* run = app.add_subcommand("run", "simulate one measurement");
    add_model_flags(run, run_o);
    auto* run_in = run->add_option("--input", run_input, "attacker input (default: malicious)");
    auto* run_sec = run->add_option("--secret", run_secret, "planted secret word");
    run->add_flag("--no-train", run_o.no_train, "skip mistraining");

    CLI::App* atk = app.add_subcommand("attack", "flush+reload byte recovery");
    add_model_flags(atk, atk_o);
    auto* atk_in = atk->add_option("--input", atk_input, "attacker input (default: malicious)");
    auto* atk_sec = atk->add_option("--secret", atk_secret, "planted secret word");
    atk->add_flag("--sweep", sweep, "attack every secret byte 0..255");
    atk->add_flag("--no-train", atk_o.no_train, "skip mistraining");

    CLI::App* chk = app.add_subcommand("check", "secret-independence verdicts");
    add_model_flags(chk, chk_o);
    chk->add_option("--modes", modes_csv, "comma list of modes (default: --mode)");

    CLI::App* lst = app.add_subcommand("corpus-list", "validate and list gadget manifests");
    add_model_flags(lst, lst_o, /*with_corpus=*/false);
    lst->add_option("--dir", corpus_dir, "corpus directory")->required();

    CLI::App* fz = app.add_subcommand("fuzz", "differential random-program check");
    add_model_flags(fz, fz_o, /*with_corpus=*/false);
    fz->add_option("--seed", seed, "random seed");
    fz->add_option("--count", count, "number of programs");

    try {
        app.parse(argc, argv);
        if (run->parsed())
            return cmd_run(run_o, run_input, !run_in->empty(), run_secret, !run_sec->empty());
        if (atk->parsed())
            return cmd_attack(atk_o, atk_input, !atk_in->empty(), atk_secret, !atk_sec->empty(),
                              sweep);
        if (chk->parsed()) return cmd_check(chk_o, modes_csv);
        if (lst->parsed()) return cmd_corpus_list(lst_o, corpus_dir);
        if (fz->parsed()) return cmd_fuzz(fz_o, seed, count);
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const AsmError& e) {
        std::cerr << "assembly error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
