#include <doctest.h>

#include <fstream>
#include <set>

#include "competeai/checkpoint.hpp"
#include "competeai/log_verify.hpp"
#include "competeai/orchestrator.hpp"
#include "support.hpp"

using namespace competeai;
using competeai::test::TempDir;

namespace {

SimulationConfig short_config(int horizon, DiningMode mode = DiningMode::group)
{
    auto c = test::bundled_config();
    c.horizon = horizon;
    c.mode = mode;
    c.wta.from_day = 1;
    return c;
}

bool has_code(const std::vector<Finding>& fs, const std::string& code)
{
    for (const auto& f : fs)
        if (f.code == code)
            return true;
    return false;
}

const Event* last_of(const RunLog& log, EventType t)
{
    const Event* out = nullptr;
    for (const auto& e : log.events())
        if (e.type == t)
            out = &e;
    return out;
}

/// Scripted replies until a call budget runs out, then a given failure.
class LimitedBackend : public AgentBackend {
public:
    LimitedBackend(int budget, bool cap) : inner_(test::bundled_policies()), budget_(budget), cap_(cap) {}
    std::string complete(const Prompt& p) override
    {
        if (calls_.fetch_add(1) >= budget_) {
            if (cap_)
                throw RequestCapExceeded("cap");
            throw std::runtime_error("disk on fire");
        }
        return inner_.complete(p);
    }
    std::string identity() const override { return "limited"; }
    int calls() const { return calls_.load(); }

private:
    ScriptedBackend inner_;
    int budget_;
    bool cap_;
    std::atomic<int> calls_{0};
};

} // namespace

TEST_CASE("the bundled config is valid")
{
    const auto c = test::bundled_config();
    CHECK(validate_config(c).empty());
    CHECK(c == default_config());
    CHECK(c.horizon == 15);
    CHECK(c.restaurants.size() == 2);
}

TEST_CASE("config validation reports every problem")
{
    auto c = default_config();
    c.horizon = 0;
    c.comment_rate = 2;
    c.restaurants.pop_back();
    const auto fs = validate_config(c);
    CHECK(has_code(fs, "horizon"));
    CHECK(has_code(fs, "comment_rate"));
    CHECK(has_code(fs, "restaurant_count"));
    bool message = false;
    for (const auto& f : fs)
        message = message || f.message == "horizon must be ≥ 1";
    CHECK(message);
}

TEST_CASE("config parsing rejects unknown keys and wrong types")
{
    nlohmann::json doc = default_config();
    CHECK(parse_config(doc) == default_config());
    auto bad = doc;
    bad["horizn"] = 3;
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = doc;
    bad["horizon"] = "three";
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    CHECK(parse_config(nlohmann::json{{"horizon", 4}}).horizon == 4);
}

TEST_CASE("config hash follows content")
{
    auto c = default_config();
    const auto h = config_hash(c);
    CHECK(h == config_hash(default_config()));
    c.seed = 8;
    CHECK(config_hash(c) != h);
}

TEST_CASE("run log round trip")
{
    RunLogHeader h;
    h.config_hash = "c";
    h.roster_hash = "r";
    h.template_version = "v1";
    h.mode = "group";
    h.seed = 3;
    h.backend = "scripted";
    h.horizon = 2;
    RunLog log(h);
    log.append(1, Phase::turns, EventType::TurnCommitted, {{"restaurant", "R1"}});
    log.append(1, Phase::settlement, EventType::DaySettled, {{"x", 1.5}});
    log.append(2, Phase::turns, EventType::Warning, {{"code", "w"}});
    CHECK_THROWS_AS(log.append(1, Phase::end, EventType::Terminated, {}), std::logic_error);
    CHECK(log.events().back().seq == 3);

    const auto text = log.to_jsonl();
    const auto back = RunLog::from_jsonl(text);
    CHECK(back == log);
    CHECK(back.to_jsonl() == text);

    TempDir dir;
    log.write(dir / "run.jsonl");
    CHECK(RunLog::read(dir / "run.jsonl") == log);
}

TEST_CASE("run log errors carry the line")
{
    RunLog log(RunLogHeader{});
    log.append(1, Phase::turns, EventType::Warning, {});
    log.append(1, Phase::end, EventType::Warning, {});
    const auto text = log.to_jsonl();

    auto broken = text;
    broken.insert(broken.find('\n') + 1, "{not json\n");
    try {
        RunLog::from_jsonl(broken);
        FAIL("expected an error");
    } catch (const RunLogError& e) {
        CHECK(e.line() == 2);
    }

    // drop the first event: the second now has the wrong sequence number
    const auto first = text.find('\n');
    const auto second = text.find('\n', first + 1);
    const auto gap = text.substr(0, first + 1) + text.substr(second + 1);
    try {
        RunLog::from_jsonl(gap);
        FAIL("expected an error");
    } catch (const RunLogError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(RunLog::from_jsonl(""), RunLogError);
}

TEST_CASE("parallel_for rethrows the lowest failing index")
{
    std::vector<int> hit(50, 0);
    parallel_for(50, 4, [&](std::size_t i) { hit[i] += 1; });
    CHECK(std::all_of(hit.begin(), hit.end(), [](int x) { return x == 1; }));
    try {
        parallel_for(20, 4, [](std::size_t i) {
            if (i == 7 || i == 13)
                throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "7");
    }
}

TEST_CASE("a short scripted run is consistent")
{
    const auto cfg = short_config(3);
    const auto r = test::run_scripted(cfg);
    CHECK(r.world.day == 3);
    CHECK(r.world.termination == cause::horizon);
    CHECK(verify_log(r.log, cfg, test::bundled_roster()).empty());
    CHECK(fold(initial_world(cfg), r.log, cfg) == r.world);

    const auto* term = last_of(r.log, EventType::Terminated);
    REQUIRE(term);
    CHECK(term == &r.log.events().back());
    CHECK(term->data.at("cause") == "horizon");

    // 11 individuals and 15 groups decide every day
    std::set<std::string> units;
    int decisions = 0;
    for (const auto& e : r.log.events())
        if (e.type == EventType::DecisionMade && e.day == 1) {
            units.insert(e.data.at("unit").get<std::string>());
            ++decisions;
        }
    CHECK(decisions == 26);
    CHECK(units.size() == 26);
}

TEST_CASE("single mode has fifty decisions a day")
{
    const auto cfg = short_config(1, DiningMode::single);
    const auto r = test::run_scripted(cfg);
    int decisions = 0;
    for (const auto& e : r.log.events())
        decisions += e.type == EventType::DecisionMade;
    CHECK(decisions == 50);
    CHECK(verify_log(r.log, cfg, test::bundled_roster()).empty());
}

TEST_CASE("horizon one")
{
    const auto cfg = short_config(1);
    const auto r = test::run_scripted(cfg);
    CHECK(r.world.day == 1);
    CHECK(r.log.header().horizon == 1);
    CHECK(r.log.events().back().type == EventType::Terminated);
}

TEST_CASE("a voluntary quit ends the run after that day")
{
    auto policies = test::bundled_policies();
    policies.restaurants["R1"].quit_on_day = 4;
    const auto cfg = short_config(15);
    const auto r = test::run_scripted(cfg, policies);
    CHECK(r.world.day == 4);
    CHECK(r.world.termination == cause::voluntary_quit);
    CHECK(r.world.restaurant("R1").status == RestaurantStatus::quit);
    CHECK(verify_log(r.log, cfg, test::bundled_roster()).empty());
}

TEST_CASE("the request cap ends the run at the last complete day")
{
    const auto cfg = short_config(5);
    int day1_calls = 0;
    {
        LimitedBackend counter(1 << 30, true);
        Simulation sim(short_config(1), test::bundled_roster(), test::templates_v1(), counter, "scripted", false);
        sim.run();
        day1_calls = counter.calls();
    }
    REQUIRE(day1_calls > 0);

    LimitedBackend backend(day1_calls + 5, true);
    Simulation sim(cfg, test::bundled_roster(), test::templates_v1(), backend, "scripted", false);
    sim.run();
    CHECK(sim.world().termination == cause::request_cap);
    CHECK(sim.world().day == 1);
    for (const auto& e : sim.log().events())
        CHECK(e.day <= 1);
    CHECK(verify_log(sim.log(), cfg, test::bundled_roster()).empty());
}

TEST_CASE("an unexpected error aborts with a terminated log")
{
    const auto cfg = short_config(3);
    LimitedBackend backend(10, false);
    Simulation sim(cfg, test::bundled_roster(), test::templates_v1(), backend, "scripted", false);
    CHECK_THROWS_AS(sim.run(), RunAborted);
    const auto& e = sim.log().events().back();
    CHECK(e.type == EventType::Terminated);
    CHECK(e.data.at("cause") == "abort");
    CHECK(sim.world().day == 0);
}

TEST_CASE("checkpoints round trip and detect damage")
{
    const auto cfg = short_config(4);
    auto r = test::run_scripted(cfg, test::bundled_policies(), 2);
    Checkpoint c{cfg, test::bundled_roster(), r.world, r.log, 1234};
    const auto bytes = encode_checkpoint(c);
    CHECK(decode_checkpoint(bytes) == c);

    TempDir dir;
    save_checkpoint(dir / "ck.bin", c);
    CHECK(load_checkpoint(dir / "ck.bin") == c);

    auto tampered = bytes;
    tampered[tampered.size() / 2] ^= 0x01;
    CHECK_THROWS_AS(decode_checkpoint(tampered), CheckpointError);

    auto version = bytes;
    version[8] = 9;
    CHECK_THROWS_WITH_AS(decode_checkpoint(version), doctest::Contains("version 9"), CheckpointError);

    CHECK_THROWS_AS(decode_checkpoint("CAICKPT"), CheckpointError);
    CHECK_THROWS_AS(load_checkpoint(dir / "missing.bin"), CheckpointError);
}

TEST_CASE("resuming from a checkpoint reproduces the full run")
{
    const auto cfg = short_config(4);
    const auto full = test::run_scripted(cfg);
    const auto part = test::run_scripted(cfg, test::bundled_policies(), 2);
    CHECK(part.world.day == 2);
    CHECK_FALSE(part.world.finished());

    const auto c = decode_checkpoint(encode_checkpoint({cfg, test::bundled_roster(), part.world, part.log, 0}));
    ScriptedBackend backend(test::bundled_policies());
    Simulation sim(c.config, c.roster, test::templates_v1(), backend, "scripted", false);
    sim.restore(c.world, c.log);
    sim.run();
    CHECK(sim.log().to_jsonl() == full.log.to_jsonl());
    CHECK(sim.world() == full.world);
}

TEST_CASE("verify_log finds tampering")
{
    const auto cfg = short_config(2);
    const auto r = test::run_scripted(cfg);
    const auto roster = test::bundled_roster();

    auto text = r.log.to_jsonl();
    auto doc_lines = std::vector<nlohmann::json>{};
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        doc_lines.push_back(nlohmann::json::parse(line));
    auto rebuild = [&](const std::vector<nlohmann::json>& lines) {
        std::string out;
        for (const auto& l : lines)
            out += l.dump() + "\n";
        return RunLog::from_jsonl(out);
    };
    auto checks_of = [&](const RunLog& log) {
        std::set<std::string> out;
        for (const auto& v : verify_log(log, cfg, roster))
            out.insert(v.check);
        return out;
    };

    SUBCASE("funds")
    {
        auto lines = doc_lines;
        for (auto& l : lines)
            if (l.value("type", "") == "DaySettled") {
                l["data"]["funds"] = l["data"]["funds"].get<double>() + 1.0;
                break;
            }
        CHECK(checks_of(rebuild(lines)).count("funds"));
    }
    SUBCASE("majority")
    {
        auto lines = doc_lines;
        for (auto& l : lines)
            if (l.value("type", "") == "DecisionMade" && l["data"]["group"].get<bool>()) {
                auto& votes = l["data"]["votes"];
                const auto other = l["data"]["restaurant"] == "R1" ? "R2" : "R1";
                for (auto& v : votes)
                    v["restaurant"] = other;
                break;
            }
        CHECK(checks_of(rebuild(lines)).count("majority"));
    }
    SUBCASE("duplicate decision")
    {
        auto lines = doc_lines;
        std::size_t at = 0;
        for (std::size_t i = 0; i < lines.size(); ++i)
            if (lines[i].value("type", "") == "DecisionMade") {
                at = i;
                break;
            }
        REQUIRE(at > 0);
        lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(at) + 1, lines[at]);
        for (std::size_t i = 1; i < lines.size(); ++i)
            lines[i]["seq"] = i;
        CHECK(checks_of(rebuild(lines)).count("units"));
    }
}
