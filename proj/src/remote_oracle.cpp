#include "vlmrrt/remote_oracle.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>

namespace vlmrrt {

using nlohmann::json;

std::string base64_encode(const std::uint8_t* data, std::size_t size) {
    static constexpr char kAlphabet[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((size + 2) / 3 * 4);
    for (std::size_t i = 0; i < size; i += 3) {
        const std::uint32_t b0 = data[i];
        const std::uint32_t b1 = i + 1 < size ? data[i + 1] : 0;
        const std::uint32_t b2 = i + 2 < size ? data[i + 2] : 0;
        const std::uint32_t triple = (b0 << 16) | (b1 << 8) | b2;
        out.push_back(kAlphabet[(triple >> 18) & 0x3F]);
        out.push_back(kAlphabet[(triple >> 12) & 0x3F]);
        out.push_back(i + 1 < size ? kAlphabet[(triple >> 6) & 0x3F] : '=');
        out.push_back(i + 2 < size ? kAlphabet[triple & 0x3F] : '=');
    }
    return out;
}

RemoteOracleConfig RemoteOracleConfig::from_environment() {
    RemoteOracleConfig cfg;
    const char* endpoint = std::getenv("ORACLE_ENDPOINT");
    const char* model = std::getenv("ORACLE_MODEL");
    const char* key = std::getenv("ORACLE_API_KEY");
    if (!endpoint || !*endpoint)
        throw OracleError(OracleError::Kind::Transport, "ORACLE_ENDPOINT is not set");
    if (!model || !*model)
        throw OracleError(OracleError::Kind::Transport, "ORACLE_MODEL is not set");
    cfg.endpoint = endpoint;
    cfg.model = model;
    cfg.api_key = key ? key : "";
    return cfg;
}

std::string chat_request_body(const RemoteOracleConfig& cfg, const Prompt& prompt) {
    json user_content = json::array();
    user_content.push_back({{"type", "text"}, {"text", prompt.user_text}});
    if (!prompt.image_png.empty()) {
        user_content.push_back(
            {{"type", "image_url"},
             {"image_url",
              {{"url", "data:image/png;base64," +
                           base64_encode(prompt.image_png.data(), prompt.image_png.size())}}}});
    }
    json body{
        {"model", cfg.model},
        {"messages",
         json::array({json{{"role", "system"}, {"content", prompt.system_text}},
                      json{{"role", "user"}, {"content", user_content}}})},
        {"temperature", cfg.temperature},
        {"max_tokens", cfg.max_tokens},
    };
    return body.dump();
}

RemoteOracle::RemoteOracle(RemoteOracleConfig cfg)
    : cfg_(std::move(cfg)), in_flight_(std::max(1, std::min(cfg_.max_in_flight, 256))) {
    const auto scheme_end = cfg_.endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw OracleError(OracleError::Kind::Transport,
                          "endpoint must include a scheme: " + cfg_.endpoint);
    const auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_ = cfg_.endpoint;
        path_ = "/";
    } else {
        scheme_host_ = cfg_.endpoint.substr(0, path_start);
        path_ = cfg_.endpoint.substr(path_start);
    }
}

RemoteOracle::~RemoteOracle() = default;

OracleAnswer RemoteOracle::answer(const OracleQuery& query) {
    const Prompt prompt = build_prompt(query, cfg_.prompt_mode);
    const std::string body = chat_request_body(cfg_, prompt);

    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<256>& sem;
        ~Release() { sem.release(); }
    } release{in_flight_};

    const auto t0 = std::chrono::steady_clock::now();
    OracleError::Kind last_kind = OracleError::Kind::Transport;
    std::string last_detail = "no attempt made";

    for (int attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
        httplib::Client client(scheme_host_);
        client.set_connection_timeout(cfg_.timeout_seconds, 0);
        client.set_read_timeout(cfg_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!cfg_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + cfg_.api_key);

        auto res = client.Post(path_, headers, body, "application/json");
        if (!res) {
            last_kind = OracleError::Kind::Transport;
            last_detail = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429) {
            last_kind = OracleError::Kind::RateLimit;
            last_detail = "rate limited (429)";
            continue;
        }
        if (res->status != 200) {
            last_kind = OracleError::Kind::Transport;
            last_detail = "http status " + std::to_string(res->status);
            continue;
        }

        std::string content;
        try {
            const json reply = json::parse(res->body);
            content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
            last_kind = OracleError::Kind::Parse;
            last_detail = std::string("malformed reply: ") + e.what();
            continue;
        }

        const auto direction = parse_direction(content);
        if (!direction) {
            last_kind = OracleError::Kind::Parse;
            last_detail = "no DIRECTION token in reply";
            continue;
        }

        OracleAnswer ans;
        ans.direction = *direction;
        ans.raw_response = content;
        ans.prompt_mode = cfg_.prompt_mode;
        ans.latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return ans;
    }
    throw OracleError(last_kind, "remote oracle failed after " +
                                     std::to_string(cfg_.max_attempts) + " attempts: " +
                                     last_detail);
}

}  // namespace vlmrrt
