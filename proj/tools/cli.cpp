#include "cli.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "competeai/checkpoint.hpp"
#include "competeai/config.hpp"
#include "competeai/gateway.hpp"
#include "competeai/hashing.hpp"
#include "competeai/log_verify.hpp"
#include "competeai/orchestrator.hpp"
#include "competeai/report.hpp"
#include "competeai/roster.hpp"
#include "competeai/scripted_backend.hpp"
#include "competeai/templates.hpp"

namespace fs = std::filesystem;

namespace competeai::cli {

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted.store(true); }

/// Bad input: reported, exit 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string workdir = ".";

    fs::path path(const std::string& p) const
    {
        const fs::path q(p);
        return q.is_absolute() ? q : fs::path(workdir) / q;
    }

    /// Bundled assets are looked up in the workdir first, then next to the sources.
    fs::path asset(const std::string& p) const
    {
        const auto local = path(p);
        if (fs::exists(local) || fs::path(p).is_absolute())
            return local;
        const auto bundled = fs::path(COMPETEAI_SOURCE_DIR) / p;
        return fs::exists(bundled) ? bundled : local;
    }
};

struct RunFlags {
    std::string config;
    std::string mode;
    std::optional<std::uint64_t> seed;
    std::optional<int> horizon;
    std::string gateway = "scripted";
    std::string upstream = "http";
    std::string cache;
    std::string out;
    std::string checkpoint;
    bool force = false;
    int stop_after_day = 0;
};

SimulationConfig load_effective_config(const Common& c, const RunFlags& f)
{
    SimulationConfig config;
    if (!f.config.empty()) {
        config = load_config(c.path(f.config));
    } else if (const auto bundled = c.asset("assets/config/default.json"); fs::exists(bundled)) {
        config = load_config(bundled);
    } else {
        config = default_config();
    }
    if (!f.mode.empty())
        config.mode = dining_mode_from_string(f.mode);
    if (f.seed)
        config.seed = *f.seed;
    if (f.horizon)
        config.horizon = *f.horizon;
    return config;
}

TemplateSet load_templates(const Common& c, const std::string& id)
{
    const auto versions = TemplateSet::builtin_versions();
    if (std::find(versions.begin(), versions.end(), id) != versions.end())
        return TemplateSet::builtin(id);
    return TemplateSet::load_dir(c.path(id));
}

struct BackendBundle {
    std::unique_ptr<AgentBackend> owned;
    Gateway* gateway = nullptr;
    std::string kind;
    bool classify = false;
};

BackendBundle make_backend(const Common& c, const RunFlags& f, const SimulationConfig& config,
                           const fs::path& out_dir)
{
    const auto policies = load_policies(c.asset(config.policies));
    BackendBundle b;
    if (f.gateway == "scripted") {
        b.owned = std::make_unique<ScriptedBackend>(policies);
        b.kind = "scripted";
        return b;
    }

    const auto mode = gateway_mode_from_string(f.gateway);
    const auto cache_path = f.cache.empty() ? out_dir / "cache.bin" : c.path(f.cache);
    std::shared_ptr<CacheStore> cache;
    std::shared_ptr<ChatTransport> transport;
    if (mode == GatewayMode::replay) {
        if (!fs::exists(cache_path))
            throw InputError("replay needs a cache file; not found: " + cache_path.string());
        cache = CacheStore::open(cache_path, false);
    } else {
        if (mode == GatewayMode::record)
            cache = CacheStore::open(cache_path, true);
        if (f.upstream == "scripted") {
            transport = std::make_shared<BackendTransport>(std::make_shared<ScriptedBackend>(policies));
        } else {
            const char* key = std::getenv(config.gateway.api_key_env.c_str());
            if (!key || !*key)
                throw InputError("environment variable " + config.gateway.api_key_env +
                                 " must hold the API key for --upstream http");
            transport = std::make_shared<HttpChatTransport>(config.gateway.base_url, key);
        }
    }

    GatewaySettings s;
    s.model = config.gateway.model;
    s.temperature = config.gateway.temperature;
    s.max_tokens = config.gateway.max_tokens;
    s.retry.attempts = config.gateway.attempts;
    s.retry.base_seconds = config.gateway.backoff_base_seconds;
    s.retry.cap_seconds = config.gateway.backoff_cap_seconds;
    s.parallelism = config.gateway.parallelism;
    s.requests_per_minute = config.gateway.requests_per_minute;
    s.request_cap = config.gateway.request_cap;
    auto gw = std::make_unique<Gateway>(mode, s, transport, cache);
    b.gateway = gw.get();
    b.owned = std::move(gw);
    b.kind = "gateway";
    b.classify = true;
    return b;
}

std::string summary_line(const Simulation& sim, const fs::path& log_path, const BackendBundle& b)
{
    const auto& w = sim.world();
    std::string line = fmt::format("days_completed={} termination={}", w.day,
                                   w.termination.empty() ? "none" : w.termination);
    for (const auto& r : w.restaurants) {
        int persons = 0;
        Money income;
        for (const auto& d : r.daybooks) {
            persons += d.num_of_customer;
            income += d.income;
        }
        line += fmt::format(" {}[persons={} income={} funds={} status={}]", r.id, persons, income.str(),
                            r.funds.str(), to_string(r.status));
    }
    if (b.gateway)
        line += fmt::format(" requests={} upstream_calls={}", b.gateway->requests(), b.gateway->transport_calls());
    return line + " log=" + log_path.string();
}

void write_text(const fs::path& file, const std::string& text)
{
    if (file.has_parent_path())
        fs::create_directories(file.parent_path());
    std::ofstream o(file, std::ios::binary | std::ios::trunc);
    o << text;
    if (!o)
        throw std::runtime_error("cannot write " + file.string());
}

std::string read_text(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Drives the simulation day by day, writing the log and, when stopping
/// early, a checkpoint.
int drive(Simulation& sim, const BackendBundle& b, const Common&, const RunFlags& f, const fs::path& out_dir,
          std::ostream& out, std::ostream& err)
{
    const auto log_path = out_dir / "run.jsonl";
    const auto ckpt_path = f.checkpoint.empty() ? out_dir / "checkpoint.bin" : fs::path(f.checkpoint);
    g_interrupted.store(false);
    auto previous = std::signal(SIGINT, on_interrupt);
    struct Restore {
        decltype(previous) handler;
        ~Restore() { std::signal(SIGINT, handler); }
    } restore{previous};

    try {
        while (!sim.finished()) {
            if (f.stop_after_day > 0 && sim.world().day >= f.stop_after_day)
                break;
            if (g_interrupted.load())
                break;
            sim.run_day();
        }
    } catch (const RunAborted& e) {
        write_text(log_path, sim.log().to_jsonl());
        err << "run aborted: " << e.what() << "\npartial log: " << log_path.string() << "\n";
        return kExitRuntime;
    }

    write_text(log_path, sim.log().to_jsonl());
    if (!sim.finished()) {
        save_checkpoint(ckpt_path, {sim.config(), sim.roster(), sim.world(), sim.log(),
                                    b.gateway ? b.gateway->requests() : 0});
        out << "stopped after day " << sim.world().day << "; checkpoint: " << ckpt_path.string() << "\n";
    } else if (fs::exists(ckpt_path)) {
        fs::remove(ckpt_path);
    }
    out << summary_line(sim, log_path, b) << "\n";
    return kExitOk;
}

void print_findings(std::ostream& os, const std::vector<Finding>& findings)
{
    for (const auto& f : findings)
        os << f.code << ": " << f.message << "\n";
}

int cmd_run(const Common& c, const RunFlags& f, std::ostream& out, std::ostream& err)
{
    const auto config = load_effective_config(c, f);
    if (const auto findings = validate_config(config); !findings.empty()) {
        print_findings(err, findings);
        return kExitValidation;
    }
    const auto out_dir =
        f.out.empty() ? c.path(fmt::format("runs/{}-seed{}", to_string(config.mode), config.seed)) : c.path(f.out);
    const auto log_path = out_dir / "run.jsonl";
    if (fs::exists(log_path) && !f.force)
        throw InputError(log_path.string() + " exists; pass --force to overwrite it");

    auto roster = load_roster(c.asset(config.roster));
    auto templates = load_templates(c, config.templates);
    auto b = make_backend(c, f, config, out_dir);
    Simulation sim(config, std::move(roster), std::move(templates), *b.owned, b.kind, b.classify);
    RunFlags g = f;
    if (!g.checkpoint.empty())
        g.checkpoint = c.path(g.checkpoint).string();
    return drive(sim, b, c, g, out_dir, out, err);
}

int cmd_resume(const Common& c, const RunFlags& f, std::ostream& out, std::ostream& err)
{
    const auto out_dir = f.out.empty() ? fs::path(c.workdir) : c.path(f.out);
    const auto ckpt_path = f.checkpoint.empty() ? out_dir / "checkpoint.bin" : c.path(f.checkpoint);
    if (!fs::exists(ckpt_path))
        throw InputError("checkpoint not found: " + ckpt_path.string());
    auto ckpt = load_checkpoint(ckpt_path);

    const auto log_path = out_dir / "run.jsonl";
    if (fs::exists(log_path) && !f.force && read_text(log_path) != ckpt.log.to_jsonl())
        throw InputError(log_path.string() + " is not the log of this checkpoint; pass --force to overwrite it");

    auto templates = load_templates(c, ckpt.config.templates);
    if (templates.version() != ckpt.log.header().template_version)
        throw InputError(fmt::format("checkpoint used templates {}, found {}", ckpt.log.header().template_version,
                                     templates.version()));
    auto b = make_backend(c, f, ckpt.config, out_dir);
    if (b.kind != ckpt.log.header().backend)
        throw InputError(fmt::format("checkpoint was run with the {} backend, not {}", ckpt.log.header().backend,
                                     b.kind));
    if (b.gateway)
        b.gateway->set_requests(ckpt.requests);
    Simulation sim(ckpt.config, ckpt.roster, std::move(templates), *b.owned, b.kind, b.classify);
    sim.restore(std::move(ckpt.world), std::move(ckpt.log));
    RunFlags g = f;
    g.checkpoint = ckpt_path.string();
    return drive(sim, b, c, g, out_dir, out, err);
}

struct AnalyzeFlags {
    std::vector<std::string> logs;
    std::string out = "report";
    std::string config;
    bool aggregate = false;
    std::optional<double> threshold;
    std::optional<int> from_day;
};

int cmd_analyze(const Common& c, const AnalyzeFlags& f, std::ostream& out, std::ostream&)
{
    AnalysisOptions opt;
    if (!f.config.empty()) {
        const auto config = load_config(c.path(f.config));
        opt.wta_threshold = config.wta.threshold;
        opt.wta_from_day = config.wta.from_day;
    }
    if (f.threshold)
        opt.wta_threshold = *f.threshold;
    if (f.from_day)
        opt.wta_from_day = *f.from_day;

    std::vector<RunLog> logs;
    for (const auto& p : f.logs) {
        const auto file = c.path(p);
        if (!fs::exists(file))
            throw InputError("log not found: " + file.string());
        try {
            logs.push_back(RunLog::read(file));
        } catch (const RunLogError& e) {
            throw InputError(fmt::format("{}: line {}: {}", file.string(), e.line(), e.what()));
        }
    }
    const auto dir = c.path(f.out);
    const auto files = f.aggregate ? build_aggregate_report(logs, opt) : build_report(logs.front(), opt);
    write_report(files, dir);
    out << fmt::format("wrote {} files to {}\n", files.size(), dir.string());
    return kExitOk;
}

struct ValidateFlags {
    std::string config;
    std::string roster;
    std::string policies;
    std::string cache;
    std::string log;
};

int cmd_validate(const Common& c, const ValidateFlags& f, std::ostream& out, std::ostream&)
{
    std::vector<Finding> findings;
    std::optional<SimulationConfig> config;
    try {
        RunFlags rf;
        rf.config = f.config;
        config = load_effective_config(c, rf);
        for (auto& x : validate_config(*config))
            findings.push_back(std::move(x));
    } catch (const ConfigError& e) {
        if (e.findings().empty())
            findings.push_back({"config", e.what()});
        for (const auto& x : e.findings())
            findings.push_back(x);
    } catch (const std::exception& e) {
        findings.push_back({"config", e.what()});
    }

    std::optional<Roster> roster;
    try {
        const auto path = !f.roster.empty() ? c.path(f.roster) : c.asset(config ? config->roster : "assets/roster.json");
        roster = load_roster(path);
    } catch (const std::exception& e) {
        findings.push_back({"roster", e.what()});
    }

    if (config) {
        try {
            const auto t = load_templates(c, config->templates);
            for (const auto& name : required_templates())
                if (!t.has(name))
                    findings.push_back({"templates", "template set " + t.version() + " lacks " + name});
        } catch (const std::exception& e) {
            findings.push_back({"templates", e.what()});
        }
        try {
            load_policies(!f.policies.empty() ? c.path(f.policies) : c.asset(config->policies));
        } catch (const std::exception& e) {
            findings.push_back({"policies", e.what()});
        }
    }

    if (!f.cache.empty()) {
        try {
            const auto path = c.path(f.cache);
            if (!fs::exists(path))
                findings.push_back({"cache", "cache file not found: " + path.string()});
            else
                CacheStore::open(path, false);
        } catch (const std::exception& e) {
            findings.push_back({"cache", e.what()});
        }
    }

    if (!f.log.empty() && config && roster) {
        try {
            const auto log = RunLog::read(c.path(f.log));
            for (const auto& v : verify_log(log, *config, *roster))
                findings.push_back({"log_" + v.check, fmt::format("day {} seq {}: {}", v.day, v.seq, v.message)});
        } catch (const RunLogError& e) {
            findings.push_back({"log", fmt::format("line {}: {}", e.line(), e.what())});
        } catch (const std::exception& e) {
            findings.push_back({"log", e.what()});
        }
    }

    if (findings.empty()) {
        out << "ok: no findings\n";
        return kExitOk;
    }
    print_findings(out, findings);
    out << findings.size() << " finding(s)\n";
    return kExitValidation;
}

int cmd_roster(const Common& c, const std::string& roster_path, const std::string& mode, std::ostream& out)
{
    const auto roster = load_roster(c.asset(roster_path));
    const auto m = dining_mode_from_string(mode);
    const auto units = decision_units(roster, m);
    int persons = 0;
    for (const auto& u : units) {
        std::string members;
        for (const auto& p : u.members)
            members += (members.empty() ? "" : ", ") + p.name;
        out << fmt::format("{:<14} {} {:<12} {}\n", u.id, u.persons(), to_string(u.leader().income_band), members);
        persons += u.persons();
    }
    out << fmt::format("{} customers, {} groups; {} mode: {} units, {} persons\n", roster.customers.size(),
                       roster.groups.size(), to_string(m), units.size(), persons);
    return kExitOk;
}

void add_run_flags(CLI::App* cmd, RunFlags& f, bool resume)
{
    if (!resume) {
        cmd->add_option("--config", f.config, "Config file (default: assets/config/default.json)");
        cmd->add_option("--mode", f.mode, "Dining mode")->check(CLI::IsMember({"single", "group"}));
        cmd->add_option("--seed", f.seed, "Master seed");
        cmd->add_option("--horizon", f.horizon, "Number of days");
    }
    cmd->add_option("--gateway", f.gateway, "Agent backend")
        ->check(CLI::IsMember({"scripted", "live", "record", "replay"}));
    cmd->add_option("--upstream", f.upstream, "Where live/record requests go")
        ->check(CLI::IsMember({"http", "scripted"}));
    cmd->add_option("--cache", f.cache, "Completion cache (default: <out>/cache.bin)");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--checkpoint", f.checkpoint, "Checkpoint file (default: <out>/checkpoint.bin)");
    cmd->add_option("--stop-after-day", f.stop_after_day, "Stop and checkpoint after this day");
    cmd->add_flag("--force", f.force, "Overwrite an existing log");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Two restaurant agents compete for a town of customer agents."};
    app.require_subcommand(1);
    Common common;
    app.add_option("--workdir", common.workdir, "Base directory for every relative path");

    RunFlags run_flags, resume_flags;
    auto* run = app.add_subcommand("run", "Run a simulation");
    add_run_flags(run, run_flags, false);
    auto* resume = app.add_subcommand("resume", "Continue a run from its checkpoint");
    add_run_flags(resume, resume_flags, true);

    AnalyzeFlags analyze_flags, aggregate_flags;
    auto* analyze = app.add_subcommand("analyze", "Compute metric tables from run logs");
    analyze->add_option("logs", analyze_flags.logs, "Run log(s)")->required();
    analyze->add_option("--out", analyze_flags.out, "Report directory");
    analyze->add_option("--config", analyze_flags.config, "Take the winner-take-all settings from this config");
    analyze->add_option("--wta-threshold", analyze_flags.threshold, "Winner share threshold");
    analyze->add_option("--wta-from-day", analyze_flags.from_day, "First day of the winner-take-all window");
    analyze->add_flag("--aggregate", analyze_flags.aggregate, "Aggregate over many logs");
    auto* aggregate = app.add_subcommand("aggregate", "Winner-take-all frequency and mean deltas over many logs");
    aggregate->add_option("logs", aggregate_flags.logs, "Run logs")->required();
    aggregate->add_option("--out", aggregate_flags.out, "Report directory");
    aggregate->add_option("--config", aggregate_flags.config, "Take the winner-take-all settings from this config");
    aggregate->add_option("--wta-threshold", aggregate_flags.threshold, "Winner share threshold");
    aggregate->add_option("--wta-from-day", aggregate_flags.from_day, "First day of the winner-take-all window");

    ValidateFlags validate_flags;
    auto* validate = app.add_subcommand("validate", "Check config, roster, templates and optional cache/log");
    validate->add_option("--config", validate_flags.config, "Config file");
    validate->add_option("--roster", validate_flags.roster, "Roster file (overrides the config)");
    validate->add_option("--policies", validate_flags.policies, "Scripted policy file (overrides the config)");
    validate->add_option("--cache", validate_flags.cache, "Completion cache to check");
    validate->add_option("--log", validate_flags.log, "Run log to verify against the config and roster");

    std::string roster_path = "assets/roster.json", roster_mode = "group";
    auto* roster = app.add_subcommand("roster", "List decision units");
    roster->add_option("--roster", roster_path, "Roster file");
    roster->add_option("--mode", roster_mode, "Dining mode")->check(CLI::IsMember({"single", "group"}));

    std::vector<std::string> argv_store{"competeai"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store)
        argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*run)
            return cmd_run(common, run_flags, out, err);
        if (*resume)
            return cmd_resume(common, resume_flags, out, err);
        if (*analyze)
            return cmd_analyze(common, analyze_flags, out, err);
        if (*aggregate) {
            aggregate_flags.aggregate = true;
            return cmd_analyze(common, aggregate_flags, out, err);
        }
        if (*validate)
            return cmd_validate(common, validate_flags, out, err);
        if (*roster)
            return cmd_roster(common, roster_path, roster_mode, out);
    } catch (const ConfigError& e) {
        err << "invalid config: " << e.what() << "\n";
        print_findings(err, e.findings());
        return kExitValidation;
    } catch (const InputError& e) {
        err << e.what() << "\n";
        return kExitValidation;
    } catch (const RosterError& e) {
        err << "invalid roster: " << e.what() << "\n";
        return kExitValidation;
    } catch (const TemplateError& e) {
        err << "invalid templates: " << e.what() << "\n";
        return kExitValidation;
    } catch (const CacheError& e) {
        err << "cache: " << e.what() << "\n";
        return kExitValidation;
    } catch (const CheckpointError& e) {
        err << "checkpoint: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}

} // namespace competeai::cli
