#pragma once

#include "vlmrrt/env.hpp"
#include "vlmrrt/rng.hpp"
#include "vlmrrt/sector.hpp"
#include "vlmrrt/snapshot.hpp"

#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vlmrrt {

enum class PromptMode { None, ZeroShot, FewShot, CoT };

std::string_view to_string(PromptMode mode);
std::optional<PromptMode> prompt_mode_from_string(std::string_view s);

class OracleError : public std::runtime_error {
public:
    enum class Kind { Transport, Parse, RateLimit, TapeExhausted };

    OracleError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct OracleQuery {
    std::shared_ptr<const Snapshot> snapshot;  // null unless the oracle needs the image
    Point2 query_point{0.0, 0.0};
    Point2 goal_centroid{0.0, 0.0};
    std::vector<std::pair<Point2, CompassDirection>> history;  // prior (point, answer) pairs
};

struct OracleAnswer {
    CompassDirection direction = CompassDirection::N;
    std::string raw_response;
    double latency = 0.0;  // seconds
    PromptMode prompt_mode = PromptMode::None;
};

/// Decision source mapping (scene, query point) -> compass direction. Oracles
/// carry no per-run state beyond what the query passes in, and answer() must
/// tolerate concurrent calls.
class DirectionOracle {
public:
    virtual ~DirectionOracle() = default;

    /// Throws OracleError on failure; the planner degrades the iteration to
    /// uniform sampling rather than aborting.
    virtual OracleAnswer answer(const OracleQuery& query) = 0;

    /// Whether queries must carry a rendered snapshot. White-box oracles skip
    /// the render entirely; the planner's observable behavior is identical
    /// either way.
    virtual bool needs_image() const { return false; }

    virtual std::string_view kind() const = 0;
};

/// Ground-truth stand-in: scores each compass direction by marching a ray of
/// length `ray_length` from the query point and measuring how much the
/// farthest collision-free, in-bounds point along it reduces the distance to
/// the goal centroid. Ties break clockwise from North. White-box: it reads
/// the world geometry, not the image; the goal comes from the query so
/// relocations are picked up automatically.
class GeometricOracle : public DirectionOracle {
public:
    GeometricOracle(const Env& env, double ray_length = 30.0);

    OracleAnswer answer(const OracleQuery& query) override;
    std::string_view kind() const override { return "geometric"; }

    /// Progress score of a single direction; exposed for verification.
    double direction_score(const Point2& from, const Point2& goal, CompassDirection d) const;

private:
    Rect bounds_;
    std::vector<Rect> obstacles_;
    double ray_length_;
};

/// Wraps the geometric oracle; with probability p_wrong answers uniformly
/// among the seven other directions.
class NoisyOracle : public DirectionOracle {
public:
    NoisyOracle(const Env& env, double p_wrong, std::uint64_t seed, double ray_length = 30.0);

    OracleAnswer answer(const OracleQuery& query) override;
    std::string_view kind() const override { return "noisy"; }

private:
    GeometricOracle inner_;
    double p_wrong_;
    std::mutex mutex_;
    Rng rng_;
};

/// Replays a recorded answer tape in order; throws TapeExhausted past the end.
class ReplayOracle : public DirectionOracle {
public:
    explicit ReplayOracle(std::vector<OracleAnswer> tape) : tape_(std::move(tape)) {}

    OracleAnswer answer(const OracleQuery& query) override;
    std::string_view kind() const override { return "replay"; }

private:
    std::vector<OracleAnswer> tape_;
    std::mutex mutex_;
    std::size_t cursor_ = 0;
};

/// Forwards to an inner oracle and appends one JSON line per answered query
/// to the given stream.
class RecordingOracle : public DirectionOracle {
public:
    RecordingOracle(DirectionOracle& inner, std::ostream& out) : inner_(inner), out_(out) {}

    OracleAnswer answer(const OracleQuery& query) override;
    bool needs_image() const override { return inner_.needs_image(); }
    std::string_view kind() const override { return inner_.kind(); }

private:
    DirectionOracle& inner_;
    std::ostream& out_;
    std::mutex mutex_;
};

/// Extracts the answered direction from free-form oracle text. The grammar:
/// scan case-insensitively for occurrences of "DIRECTION:" followed by
/// optional whitespace and one of the eight compass tokens (longest token
/// wins, so "NE" is NE rather than N followed by E); the last occurrence
/// decides. Returns nullopt when no occurrence parses.
std::optional<CompassDirection> parse_direction(std::string_view text);

/// Session recording: one line per (query, answer), JSON objects.
std::string session_line(const OracleQuery& query, const OracleAnswer& answer);
std::vector<OracleAnswer> load_session(std::istream& in);
std::vector<OracleAnswer> load_session_file(const std::string& path);

}  // namespace vlmrrt
