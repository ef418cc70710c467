#include "vlmrrt/prompt.hpp"

#include <cstdio>
#include <sstream>

namespace vlmrrt {

namespace {

std::string coords(const Point2& p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%.1f, %.1f)", p.x(), p.y());
    return buf;
}

std::string legend_text() {
    std::ostringstream out;
    out << "Color legend of the image:\n";
    for (const auto& [role, color] : snapshot_legend()) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "- %s: rgb(%d, %d, %d)\n", role.c_str(), color.r,
                      color.g, color.b);
        out << buf;
    }
    return out.str();
}

constexpr const char* kFewShotExamples = R"(Worked examples:

Example 1 (unobstructed path):
Queried node at (100.0, 100.0), goal centroid at (200.0, 100.0), no obstacle in between.
The goal lies due east and the straight line to it is clear.
DIRECTION: E

Example 2 (single blocking obstacle):
Queried node at (100.0, 100.0), goal centroid at (200.0, 100.0). A wall spans
(140.0, 60.0)-(160.0, 140.0), blocking the direct easterly line. The wall ends at
y = 140.0, so moving north-east makes progress while clearing its upper edge.
DIRECTION: NE

Example 3 (multi-obstacle configuration):
Queried node at (250.0, 400.0), goal centroid at (250.0, 100.0). Obstacles at
(200.0, 300.0)-(320.0, 340.0) and (150.0, 180.0)-(240.0, 230.0) stagger the corridor.
Heading south-west passes the first block on its left and lines up with the gap
right of the second.
DIRECTION: SW
)";

constexpr const char* kCotScaffold = R"(Reason through the decision in these three steps before answering:
1. Obstacle identification: list the obstacles visible in the image near the queried node.
2. Relative position analysis: establish where the goal region lies relative to the queried node.
3. Path feasibility evaluation: check which candidate directions are not blocked and make progress.
)";

}  // namespace

std::string output_format_clause() {
    return "End your reply with a single line of the exact form \"DIRECTION: <TOKEN>\" "
           "where <TOKEN> is one of N, NE, E, SE, S, SW, W, NW.";
}

Prompt build_prompt(const OracleQuery& query, PromptMode mode) {
    Prompt prompt;

    prompt.system_text =
        "You guide an autonomous aerial vehicle through a bounded 2D world rendered as an "
        "image. A search tree is grown from the start toward the goal region; you are asked, "
        "for one tree node, which compass direction the next expansion should take. Directions "
        "are world-frame: N is up in the image, E is right. Favor directions that move toward "
        "the goal region without crossing obstacles.";

    std::ostringstream user;
    user << "Task: choose the best movement direction for the queried node. The eight legal "
            "directions are N, NE, E, SE, S, SW, W, NW.\n\n";
    user << legend_text() << "\n";

    if (mode == PromptMode::FewShot) user << kFewShotExamples << "\n";

    user << "Current state:\n";
    user << "- queried node: " << coords(query.query_point) << "\n";
    user << "- goal centroid: " << coords(query.goal_centroid) << "\n";
    if (query.history.empty()) {
        user << "- no prior queries this run\n";
    } else {
        user << "- recent queries (oldest first):\n";
        // Cap the history so long runs cannot blow up the prompt.
        const std::size_t keep = std::min<std::size_t>(query.history.size(), 5);
        for (std::size_t i = query.history.size() - keep; i < query.history.size(); ++i) {
            user << "    " << coords(query.history[i].first) << " -> "
                 << compass_name(query.history[i].second) << "\n";
        }
    }
    user << "\n";

    if (mode == PromptMode::CoT) user << kCotScaffold << "\n";

    user << output_format_clause();
    prompt.user_text = user.str();

    if (query.snapshot) prompt.image_png = encode_png(*query.snapshot);
    return prompt;
}

}  // namespace vlmrrt
