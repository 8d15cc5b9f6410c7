// Command-line harness: run scenarios with online property checking, validate
// scenario files, run the static discharge check, or batch a directory.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "cbsa/cbsa.hpp"

namespace fs = std::filesystem;
using namespace cbsa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 2;
constexpr int kExitInvalid = 3;

std::string default_out_dir() {
    if (const char *env = std::getenv("CBSA_OUT_DIR")) return env;
    return ".";
}

struct CheckSelection {
    bool es = true;
    bool cf = true;
    bool mc = true;
};

CheckSelection parse_checks(const std::string &list) {
    CheckSelection sel{false, false, false};
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "es")
            sel.es = true;
        else if (item == "cf")
            sel.cf = true;
        else if (item == "mc")
            sel.mc = true;
        else
            throw CLI::ValidationError("--check", "unknown property '" + item + "'");
    }
    return sel;
}

int verdict_exit_code(const RunResult &r, const CheckSelection &sel) {
    bool ok = r.cases_ok && r.monitors_ok && r.legs_ok;
    if (sel.es) ok = ok && r.es_ok;
    if (sel.cf) ok = ok && r.cf_ok;
    if (sel.mc) ok = ok && r.mc_ok;
    return ok ? kExitOk : kExitViolation;
}

void print_summary(const Scenario &sc, const RunResult &r) {
    std::cout << sc.name << ": " << r.ticks_run << " ticks";
    switch (r.stop) {
        case StopCause::MissionComplete:
            std::cout << ", mission complete at t=" << r.completion_time << " s";
            break;
        case StopCause::Violation:
            std::cout << ", stopped at first violation";
            break;
        case StopCause::MaxTicks:
            std::cout << ", tick budget exhausted";
            break;
    }
    std::cout << "\n  properties:"
              << " es=" << (r.es_ok ? "ok" : "VIOLATED")
              << " cf=" << (r.cf_ok ? "ok" : "VIOLATED")
              << " mc=" << (r.mc_ok ? "ok" : "VIOLATED")
              << " cases=" << (r.cases_ok ? "ok" : "VIOLATED")
              << " contracts=" << (r.monitors_ok ? "ok" : "VIOLATED")
              << " legs=" << (r.legs_ok ? "ok" : "VIOLATED") << "\n";
    for (const auto &f : r.failures) std::cout << "  ! " << f << "\n";
    for (const auto &ep : r.episodes) {
        std::cout << "  recharge episode: switch@" << ep.switch_tick << " arrival@"
                  << ep.arrival_tick << " forward=" << ep.fe_at_switch
                  << " backtrack=" << ep.measured_backtrack
                  << " arrival battery=" << ep.arrival_battery << "\n";
    }
}

int cmd_run(const std::string &path, std::int64_t ticks, std::int64_t seed,
            const std::string &out_dir, bool no_plot, const std::string &checks,
            bool fail_fast) {
    Scenario sc = load_scenario(path);
    if (ticks > 0) sc.max_ticks = ticks;
    if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
    const auto errors = validate_scenario(sc);
    if (!errors.empty()) {
        std::cerr << "invalid scenario:\n";
        for (const auto &e : errors) std::cerr << "  " << e << "\n";
        return kExitInvalid;
    }
    HarnessOptions opts;
    opts.fail_fast = fail_fast;
    RunResult r = run_scenario(sc, opts);
    fs::create_directories(out_dir);
    OutputFlags flags;
    flags.plot = !no_plot;
    for (const auto &f : emit_outputs(out_dir, sc, r, flags)) std::cout << "wrote " << f << "\n";
    print_summary(sc, r);
    return verdict_exit_code(r, parse_checks(checks));
}

int cmd_validate(const std::string &path) {
    Scenario sc = load_scenario(path);
    const auto errors = validate_scenario(sc);
    if (errors.empty()) {
        std::cout << sc.name << ": valid\n";
        return kExitOk;
    }
    std::cout << sc.name << ": invalid\n";
    for (const auto &e : errors) std::cout << "  " << e << "\n";
    return kExitInvalid;
}

int cmd_discharge(const std::string &path) {
    Scenario sc = load_scenario(path);
    const auto errors = validate_scenario(sc);
    if (!errors.empty()) {
        std::cout << sc.name << ": invalid scenario\n";
        for (const auto &e : errors) std::cout << "  " << e << "\n";
        return kExitInvalid;
    }
    try {
        AssembledSystem sys = assemble(sc);
        std::cout << sys.discharge_report.summary() << "\n";
        return kExitOk;
    } catch (const DischargeError &e) {
        std::cout << e.what() << "\n";
        return kExitInvalid;
    }
}

int cmd_batch(const std::string &dir, int parallel, const std::string &out_dir) {
    std::vector<std::string> files;
    for (const auto &entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "no scenario files in " << dir << "\n";
        return kExitInvalid;
    }
    fs::create_directories(out_dir);

    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{kExitOk};
    std::mutex io;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            int code = kExitOk;
            std::string line;
            try {
                Scenario sc = load_scenario(files[i]);
                const auto errors = validate_scenario(sc);
                if (!errors.empty()) {
                    code = kExitInvalid;
                    line = sc.name + ": invalid (" + std::to_string(errors.size()) + " problems)";
                } else {
                    RunResult r = run_scenario(sc);
                    emit_outputs(out_dir, sc, r);
                    code = r.exit_code();
                    line = sc.name + (r.properties_ok() ? ": ok" : ": VIOLATION");
                }
            } catch (const Error &e) {
                code = kExitInvalid;
                line = files[i] + ": error: " + e.what();
            }
            int cur = worst.load();
            while (code > cur && !worst.compare_exchange_weak(cur, code)) {
            }
            std::lock_guard<std::mutex> lock(io);
            std::cout << line << "\n";
        }
    };
    std::vector<std::thread> pool;
    const int n = std::max(1, parallel);
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
    return worst.load();
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"component-based runtime-assurance scenario harness"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = default_out_dir(), checks = "es,cf,mc";
    std::int64_t ticks = -1, seed = -1;
    bool no_plot = false, fail_fast = false;

    CLI::App *run = app.add_subcommand("run", "run a scenario with online property checks");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--ticks", ticks, "override the tick budget");
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_dir, "output directory (default CBSA_OUT_DIR or .)");
    run->add_flag("--no-plot", no_plot, "skip the SVG plot");
    run->add_option("--check", checks, "comma list of properties to gate on (es,cf,mc)");
    run->add_flag("--fail-fast", fail_fast, "stop at the first property violation");

    CLI::App *validate = app.add_subcommand("validate", "check a scenario against the assumptions");
    validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

    CLI::App *discharge =
        app.add_subcommand("discharge", "static assume-guarantee discharge check only");
    discharge->add_option("scenario", scenario_path, "scenario JSON file")->required();

    std::string batch_dir;
    int parallel = 1;
    CLI::App *batch = app.add_subcommand("batch", "run every scenario in a directory");
    batch->add_option("dir", batch_dir, "directory of scenario JSON files")->required();
    batch->add_option("--parallel", parallel, "worker pool size");
    batch->add_option("--out", out_dir, "output directory (default CBSA_OUT_DIR or .)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(scenario_path, ticks, seed, out_dir, no_plot, checks, fail_fast);
        if (validate->parsed()) return cmd_validate(scenario_path);
        if (discharge->parsed()) return cmd_discharge(scenario_path);
        if (batch->parsed()) return cmd_batch(batch_dir, parallel, out_dir);
    } catch (const ParseError &e) {
        std::cerr << e.what() << "\n";
        return kExitInvalid;
    } catch (const ValidationError &e) {
        std::cerr << e.what() << "\n";
        return kExitInvalid;
    } catch (const DischargeError &e) {
        std::cerr << e.what() << "\n";
        return kExitInvalid;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
