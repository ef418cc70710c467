#pragma once

#include "vlmrrt/oracle.hpp"
#include "vlmrrt/prompt.hpp"

#include <memory>
#include <semaphore>
#include <string>

namespace vlmrrt {

struct RemoteOracleConfig {
    std::string endpoint;  // full URL, e.g. http://host:port/v1/chat/completions
    std::string model;
    std::string api_key;
    PromptMode prompt_mode = PromptMode::ZeroShot;
    double temperature = 0.0;
    int max_tokens = 512;
    int max_attempts = 3;
    int timeout_seconds = 30;
    int max_in_flight = 4;

    /// Reads ORACLE_ENDPOINT, ORACLE_MODEL and ORACLE_API_KEY; throws when the
    /// endpoint or model is missing.
    static RemoteOracleConfig from_environment();
};

/// Vision-chat client. Sends the built prompt as a chat-completion request
/// (system text; user content = one text part plus one base64 PNG image part)
/// with bearer-token auth, then parses the reply through the answer grammar.
/// Transport errors and parse failures are retried with fresh sampling up to
/// max_attempts before an OracleError escapes.
class RemoteOracle : public DirectionOracle {
public:
    explicit RemoteOracle(RemoteOracleConfig cfg);
    ~RemoteOracle() override;

    OracleAnswer answer(const OracleQuery& query) override;
    bool needs_image() const override { return true; }
    std::string_view kind() const override { return "remote"; }

private:
    RemoteOracleConfig cfg_;
    std::string scheme_host_;  // scheme://host:port
    std::string path_;
    std::counting_semaphore<256> in_flight_;
};

std::string base64_encode(const std::uint8_t* data, std::size_t size);

/// Request body for one query; exposed so the wire format is testable without
/// a live server.
std::string chat_request_body(const RemoteOracleConfig& cfg, const Prompt& prompt);

}  // namespace vlmrrt
