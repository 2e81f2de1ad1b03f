#include <doctest.h>

#include <fstream>
#include <thread>

#include <httplib.h>

#include "competeai/gateway.hpp"
#include "support.hpp"

using namespace competeai;
using competeai::test::FunctionBackend;
using competeai::test::TempDir;

namespace {

Prompt prompt(const std::string& text)
{
    Prompt p;
    p.system = "sys";
    p.messages.push_back({"user", text});
    return p;
}

/// Replies "echo: <last user message>" and counts sends; optionally fails first.
class FakeTransport : public ChatTransport {
public:
    int fail_first = 0;
    bool transient = true;
    std::atomic<int> sends{0};

    TransportReply send(const CompletionRequest& r, const nlohmann::json&) override
    {
        const int n = sends.fetch_add(1);
        if (n < fail_first)
            throw TransportError("boom", transient, 503);
        return {"echo: " + r.messages.back().content + " #" + std::to_string(n), 3, 4};
    }
    std::string describe() const override { return "fake"; }
};

GatewaySettings fast_settings()
{
    GatewaySettings s;
    s.retry.attempts = 4;
    return s;
}

Gateway::Sleeper recorder(std::vector<double>& slept)
{
    return [&slept](double s) { slept.push_back(s); };
}

} // namespace

TEST_CASE("fingerprints cover every request field")
{
    CompletionRequest r{"m", "s", {{"user", "hi"}}, 0.7, 100};
    const auto base = fingerprint(r);
    CHECK(base.size() == 64);
    CHECK(fingerprint(r) == base);
    auto x = r;
    x.model = "m2";
    CHECK(fingerprint(x) != base);
    x = r;
    x.system = "t";
    CHECK(fingerprint(x) != base);
    x = r;
    x.messages[0].content = "ho";
    CHECK(fingerprint(x) != base);
    x = r;
    x.messages[0].role = "assistant";
    CHECK(fingerprint(x) != base);
    x = r;
    x.temperature = 0.2;
    CHECK(fingerprint(x) != base);
    x = r;
    x.max_tokens = 101;
    CHECK(fingerprint(x) != base);
}

TEST_CASE("the prompt context is not part of the request")
{
    Gateway g(GatewayMode::live, {}, std::make_shared<FakeTransport>(), nullptr, [](double) {});
    auto a = prompt("x");
    auto b = prompt("x");
    b.context = {{"seed", 99}};
    CHECK(fingerprint(g.request_for(a)) == fingerprint(g.request_for(b)));
}

TEST_CASE("cache store round trip")
{
    TempDir dir;
    const auto file = dir / "cache.bin";
    {
        auto store = CacheStore::open(file, true);
        CompletionRecord r;
        r.request = {"m", "s", {{"user", "hi"}}, 0.7, 100};
        r.fingerprint = fingerprint(r.request);
        r.response = "hello";
        r.latency_ms = 12.5;
        r.prompt_tokens = 7;
        r.completion_tokens = 2;
        r.timestamp = "2024-01-01T00:00:00Z";
        store->append(r);
        auto dup = r;
        dup.response = "second";
        store->append(dup);
        CHECK(store->size() == 2); // append-only; lookups see the first
    }
    auto store = CacheStore::open(file, false);
    const auto fp = fingerprint({"m", "s", {{"user", "hi"}}, 0.7, 100});
    REQUIRE(store->find(fp));
    CHECK(store->find(fp)->response == "hello");
    CHECK(store->find(fp)->prompt_tokens == 7);
    CHECK(store->find(fp)->request.messages[0].content == "hi");
    CHECK(store->find("nope") == nullptr);
}

TEST_CASE("cache store rejects bad files")
{
    TempDir dir;
    CHECK_THROWS_AS(CacheStore::open(dir / "missing.bin", false), CacheError);
    {
        std::ofstream(dir / "bad.bin", std::ios::binary) << "NOTACACHEFILE";
    }
    CHECK_THROWS_AS(CacheStore::open(dir / "bad.bin", false), CacheError);
}

TEST_CASE("record then replay without the transport")
{
    TempDir dir;
    auto transport = std::make_shared<FakeTransport>();
    std::vector<std::string> recorded;
    {
        Gateway rec(GatewayMode::record, {}, transport, CacheStore::open(dir / "c.bin", true), [](double) {});
        for (const auto* t : {"a", "b", "a"})
            recorded.push_back(rec.complete(prompt(t)));
        CHECK(rec.requests() == 3);
        CHECK(rec.transport_calls() == 3);
    }
    // a repeated request is served again upstream but the first answer stays canonical
    CHECK(recorded[0] != recorded[2]);

    Gateway replay(GatewayMode::replay, {}, nullptr, CacheStore::open(dir / "c.bin", false));
    CHECK(replay.complete(prompt("a")) == recorded[0]);
    CHECK(replay.complete(prompt("b")) == recorded[1]);
    CHECK(replay.complete(prompt("a")) == recorded[0]);
    CHECK(replay.transport_calls() == 0);
    CHECK(replay.requests() == 3);
    CHECK_THROWS_AS(replay.complete(prompt("c")), CacheError);
}

TEST_CASE("gateway mode requirements")
{
    CHECK_THROWS_AS(Gateway(GatewayMode::live, {}, nullptr, nullptr), std::invalid_argument);
    CHECK_THROWS_AS(Gateway(GatewayMode::replay, {}, nullptr, nullptr), std::invalid_argument);
    CHECK(gateway_mode_from_string("record") == GatewayMode::record);
    CHECK(to_string(GatewayMode::replay) == "replay");
}

TEST_CASE("backoff delays grow and stay under the cap")
{
    RetryPolicy p;
    p.attempts = 10;
    p.base_seconds = 1;
    p.cap_seconds = 20;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto d = backoff_delays(p, seed);
        REQUIRE(d.size() == 9);
        CHECK(d[0] >= 1.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            CHECK(d[i] <= 20.0);
            if (i > 0)
                CHECK(d[i] >= d[i - 1]);
        }
        CHECK(d.back() == 20.0);
        CHECK(backoff_delays(p, seed) == d);
    }
}

TEST_CASE("transient failures are retried with backoff")
{
    auto transport = std::make_shared<FakeTransport>();
    transport->fail_first = 2;
    std::vector<double> slept;
    Gateway g(GatewayMode::live, fast_settings(), transport, nullptr, recorder(slept));
    CHECK(g.complete(prompt("x")).rfind("echo: x", 0) == 0);
    CHECK(transport->sends == 3);
    CHECK(g.transport_calls() == 3);
    CHECK(slept.size() == 2);
}

TEST_CASE("retries give up after the policy's attempts")
{
    auto transport = std::make_shared<FakeTransport>();
    transport->fail_first = 100;
    std::vector<double> slept;
    Gateway g(GatewayMode::live, fast_settings(), transport, nullptr, recorder(slept));
    CHECK_THROWS_AS(g.complete(prompt("x")), BackendError);
    CHECK(transport->sends == 4);
    CHECK(slept.size() == 3);
}

TEST_CASE("permanent failures are not retried")
{
    auto transport = std::make_shared<FakeTransport>();
    transport->fail_first = 100;
    transport->transient = false;
    Gateway g(GatewayMode::live, fast_settings(), transport, nullptr, [](double) {});
    CHECK_THROWS_AS(g.complete(prompt("x")), BackendError);
    CHECK(transport->sends == 1);
}

TEST_CASE("the request cap ends the run")
{
    auto s = fast_settings();
    s.request_cap = 2;
    Gateway g(GatewayMode::live, s, std::make_shared<FakeTransport>(), nullptr, [](double) {});
    g.complete(prompt("1"));
    g.complete(prompt("2"));
    CHECK_THROWS_AS(g.complete(prompt("3")), RequestCapExceeded);
}

TEST_CASE("rate limiting spaces out requests")
{
    auto s = fast_settings();
    s.requests_per_minute = 60;
    double now = 0.0;
    std::vector<double> slept;
    Gateway g(
        GatewayMode::live, s, std::make_shared<FakeTransport>(), nullptr,
        [&](double d) {
            slept.push_back(d);
            now += d;
        },
        [&] { return now; });
    for (int i = 0; i < 3; ++i)
        g.complete(prompt(std::to_string(i)));
    REQUIRE(slept.size() == 2);
    CHECK(slept[0] == doctest::Approx(1.0));
    CHECK(slept[1] == doctest::Approx(1.0));
}

TEST_CASE("backend transport forwards the context")
{
    auto inner = std::make_shared<FunctionBackend>([](const Prompt& p) { return p.context.at("k").get<std::string>(); });
    BackendTransport t(inner);
    CompletionRequest r{"m", "s", {{"user", "hi"}}, 0.7, 10};
    CHECK(t.send(r, {{"k", "v"}}).text == "v");
}

TEST_CASE("http transport against a local server")
{
    httplib::Server server;
    std::string auth, model;
    std::atomic<int> hits{0};
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        const int n = hits.fetch_add(1);
        auth = req.get_header_value("Authorization");
        const auto body = nlohmann::json::parse(req.body);
        model = body.at("model").get<std::string>();
        if (n == 0) {
            res.status = 503;
            return;
        }
        res.set_content(nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "pong"}}}}}},
                                       {"usage", {{"prompt_tokens", 5}, {"completion_tokens", 1}}}}
                            .dump(),
                        "application/json");
    });
    server.Post("/bad/chat/completions", [](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
        res.set_content("unauthorized", "text/plain");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const auto base = "http://127.0.0.1:" + std::to_string(port);
    auto transport = std::make_shared<HttpChatTransport>(base + "/v1", "sk-test");
    Gateway g(GatewayMode::live, fast_settings(), transport, nullptr, [](double) {});
    CHECK(g.complete(prompt("ping")) == "pong");
    CHECK(hits == 2);
    CHECK(auth == "Bearer sk-test");
    CHECK(model == "gpt-4-0613");

    HttpChatTransport bad(base + "/bad", "k");
    try {
        bad.send({"m", "s", {{"user", "x"}}, 0.7, 10}, {});
        FAIL("expected a transport error");
    } catch (const TransportError& e) {
        CHECK_FALSE(e.transient());
        CHECK(e.status() == 401);
    }

    server.stop();
    th.join();

    HttpChatTransport gone(base + "/v1", "k", std::chrono::seconds(2));
    try {
        gone.send({"m", "s", {{"user", "x"}}, 0.7, 10}, {});
        FAIL("expected a transport error");
    } catch (const TransportError& e) {
        CHECK(e.transient());
    }
}

TEST_CASE("http reply parsing")
{
    const auto r = HttpChatTransport::parse_reply(R"({"choices":[{"message":{"content":"hi"}}]})");
    CHECK(r.text == "hi");
    CHECK_THROWS_AS(HttpChatTransport::parse_reply("{}"), TransportError);
    CHECK_THROWS_AS(HttpChatTransport::parse_reply("not json"), TransportError);
    const auto body = HttpChatTransport::body({"m", "s", {{"user", "x"}}, 0.5, 77});
    CHECK(body.at("messages").size() == 2);
    CHECK(body.at("messages")[0].at("role") == "system");
    CHECK(body.at("max_tokens") == 77);
}

TEST_CASE("concurrent callers")
{
    auto s = fast_settings();
    s.parallelism = 2;
    auto transport = std::make_shared<FakeTransport>();
    Gateway g(GatewayMode::live, s, transport, nullptr, [](double) {});
    std::vector<std::thread> ts;
    for (int i = 0; i < 8; ++i)
        ts.emplace_back([&, i] {
            for (int k = 0; k < 25; ++k)
                g.complete(prompt(std::to_string(i * 100 + k)));
        });
    for (auto& t : ts)
        t.join();
    CHECK(g.requests() == 200);
    CHECK(transport->sends == 200);
}
