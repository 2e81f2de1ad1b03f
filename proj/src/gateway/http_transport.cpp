#include <httplib.h>

#include <fmt/format.h>

#include "competeai/gateway.hpp"

namespace competeai {

HttpChatTransport::HttpChatTransport(std::string base_url, std::string api_key, std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), timeout_(timeout)
{
    const auto scheme_end = base_url_.find("://");
    if (scheme_end == std::string::npos)
        throw std::invalid_argument("base URL needs a scheme: " + base_url_);
    const auto path_start = base_url_.find('/', scheme_end + 3);
    origin_ = base_url_.substr(0, path_start);
    path_ = path_start == std::string::npos ? "" : base_url_.substr(path_start);
    while (!path_.empty() && path_.back() == '/')
        path_.pop_back();
}

nlohmann::json HttpChatTransport::body(const CompletionRequest& request)
{
    nlohmann::json messages = nlohmann::json::array();
    if (!request.system.empty())
        messages.push_back({{"role", "system"}, {"content", request.system}});
    for (const auto& m : request.messages)
        messages.push_back({{"role", m.role}, {"content", m.content}});
    return {{"model", request.model},
            {"messages", messages},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};
}

TransportReply HttpChatTransport::parse_reply(const std::string& body)
{
    try {
        const auto doc = nlohmann::json::parse(body);
        TransportReply r;
        r.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        if (doc.contains("usage")) {
            r.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
            r.completion_tokens = doc["usage"].value("completion_tokens", 0);
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed completion response: ") + e.what(), false);
    }
}

TransportReply HttpChatTransport::send(const CompletionRequest& request, const nlohmann::json&)
{
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers headers;
    if (!api_key_.empty())
        headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(path_ + "/chat/completions", headers, body(request).dump(), "application/json");
    if (!res)
        throw TransportError(fmt::format("connection to {} failed: {}", origin_, httplib::to_string(res.error())), true);
    if (res->status == 429 || res->status >= 500)
        throw TransportError(fmt::format("HTTP {} from {}", res->status, origin_), true, res->status);
    if (res->status != 200)
        throw TransportError(fmt::format("HTTP {} from {}: {}", res->status, origin_, res->body.substr(0, 200)), false,
                             res->status);
    return parse_reply(res->body);
}

} // namespace competeai
