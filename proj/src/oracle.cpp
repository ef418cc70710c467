#include "vlmrrt/oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace vlmrrt {

using nlohmann::json;

std::string_view to_string(PromptMode mode) {
    switch (mode) {
        case PromptMode::None: return "-";
        case PromptMode::ZeroShot: return "zero-shot";
        case PromptMode::FewShot: return "few-shot";
        case PromptMode::CoT: return "cot";
    }
    return "-";
}

std::optional<PromptMode> prompt_mode_from_string(std::string_view s) {
    if (s == "zero-shot") return PromptMode::ZeroShot;
    if (s == "few-shot") return PromptMode::FewShot;
    if (s == "cot") return PromptMode::CoT;
    if (s == "-" || s == "none") return PromptMode::None;
    return std::nullopt;
}

GeometricOracle::GeometricOracle(const Env& env, double ray_length)
    : bounds_(env.bounds), obstacles_(env.obstacles), ray_length_(ray_length) {}

double GeometricOracle::direction_score(const Point2& from, const Point2& goal,
                                        CompassDirection d) const {
    const double angle = compass_angle(d);
    const Point2 unit{std::cos(angle), std::sin(angle)};
    const Point2 tip = from + ray_length_ * unit;

    // Farthest in-bounds, collision-free parameter along [from, tip].
    double t_max = 1.0;
    if (const auto inside = clip_segment_to_rect(from, tip, bounds_)) {
        t_max = std::min(t_max, inside->second);
    } else {
        t_max = 0.0;
    }
    for (const Rect& o : obstacles_) {
        if (const auto hit = clip_segment_to_rect(from, tip, o)) {
            t_max = std::min(t_max, hit->first);
        }
    }
    t_max = std::max(t_max, 0.0);

    const Point2 reach = from + t_max * ray_length_ * unit;
    return (from - goal).norm() - (reach - goal).norm();
}

OracleAnswer GeometricOracle::answer(const OracleQuery& query) {
    CompassDirection best = CompassDirection::N;
    double best_score = -std::numeric_limits<double>::infinity();
    for (CompassDirection d : kCompassClockwiseFromNorth) {
        const double score = direction_score(query.query_point, query.goal_centroid, d);
        if (score > best_score) {
            best_score = score;
            best = d;
        }
    }
    OracleAnswer ans;
    ans.direction = best;
    ans.raw_response = std::string("DIRECTION: ") + std::string(compass_name(best));
    return ans;
}

NoisyOracle::NoisyOracle(const Env& env, double p_wrong, std::uint64_t seed, double ray_length)
    : inner_(env, ray_length), p_wrong_(p_wrong), rng_(seed) {
    if (!(p_wrong >= 0.0 && p_wrong <= 1.0))
        throw std::invalid_argument("p_wrong must be in [0,1]");
}

OracleAnswer NoisyOracle::answer(const OracleQuery& query) {
    OracleAnswer ans = inner_.answer(query);
    std::lock_guard lock(mutex_);
    if (rng_.uniform01() < p_wrong_) {
        std::vector<CompassDirection> others;
        for (CompassDirection d : kCompassClockwiseFromNorth) {
            if (d != ans.direction) others.push_back(d);
        }
        ans.direction = others[rng_.index(others.size())];
        ans.raw_response = std::string("DIRECTION: ") + std::string(compass_name(ans.direction));
    }
    return ans;
}

OracleAnswer ReplayOracle::answer(const OracleQuery&) {
    std::lock_guard lock(mutex_);
    if (cursor_ >= tape_.size())
        throw OracleError(OracleError::Kind::TapeExhausted,
                          "replay tape exhausted after " + std::to_string(tape_.size()) +
                              " answers");
    return tape_[cursor_++];
}

OracleAnswer RecordingOracle::answer(const OracleQuery& query) {
    const OracleAnswer ans = inner_.answer(query);
    std::lock_guard lock(mutex_);
    out_ << session_line(query, ans) << "\n";
    return ans;
}

std::optional<CompassDirection> parse_direction(std::string_view text) {
    static constexpr std::string_view kMarker = "DIRECTION:";
    auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
    auto matches_at = [&](std::size_t pos, std::string_view token) {
        if (pos + token.size() > text.size()) return false;
        for (std::size_t k = 0; k < token.size(); ++k) {
            if (lower(text[pos + k]) != lower(token[k])) return false;
        }
        return true;
    };
    // Longest-first so two-letter tokens are preferred at each site.
    static constexpr std::string_view kTokens[] = {"NE", "SE", "SW", "NW", "N", "E", "S", "W"};

    std::optional<CompassDirection> last;
    std::size_t i = 0;
    while (i + kMarker.size() <= text.size()) {
        if (!matches_at(i, kMarker)) {
            ++i;
            continue;
        }
        std::size_t j = i + kMarker.size();
        while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        bool found = false;
        for (std::string_view token : kTokens) {
            if (matches_at(j, token)) {
                std::string canonical(token);
                last = compass_from_name(canonical);
                i = j + token.size();
                found = true;
                break;
            }
        }
        if (!found) i = j;
    }
    return last;
}

std::string session_line(const OracleQuery& query, const OracleAnswer& answer) {
    json j;
    j["query"] = {
        {"point", {query.query_point.x(), query.query_point.y()}},
        {"goal", {query.goal_centroid.x(), query.goal_centroid.y()}},
        {"history_len", query.history.size()},
        {"snapshot", query.snapshot
                         ? json(std::to_string(query.snapshot->width) + "x" +
                                std::to_string(query.snapshot->height))
                         : json(nullptr)},
    };
    j["answer"] = {
        {"direction", std::string(compass_name(answer.direction))},
        {"raw_response", answer.raw_response},
        {"latency", answer.latency},
        {"prompt_mode", std::string(to_string(answer.prompt_mode))},
    };
    return j.dump();
}

std::vector<OracleAnswer> load_session(std::istream& in) {
    std::vector<OracleAnswer> tape;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("session line " + std::to_string(line_no) + ": " + e.what());
        }
        OracleAnswer ans;
        const json& a = j.at("answer");
        const auto dir = compass_from_name(a.at("direction").get<std::string>());
        if (!dir)
            throw ParseError("session line " + std::to_string(line_no) + ": bad direction");
        ans.direction = *dir;
        ans.raw_response = a.value("raw_response", std::string{});
        ans.latency = a.value("latency", 0.0);
        if (const auto mode = prompt_mode_from_string(a.value("prompt_mode", "-")))
            ans.prompt_mode = *mode;
        tape.push_back(std::move(ans));
    }
    return tape;
}

std::vector<OracleAnswer> load_session_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open session file: " + path);
    return load_session(in);
}

}  // namespace vlmrrt
