#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tennis/match_data.hpp"

namespace tennis::synthetic {

/// Point-by-point tennis simulator producing rows in the public schema.
///
/// A latent form differential f (positive favors P1) follows
///   f <- persistence * f + form_noise * N(0,1) + feedback * (+1 if P1 won the point, -1 otherwise)
/// and shifts every per-point probability by `momentum * f` on the logit
/// scale. With momentum = 0 points are independent given the server.
struct SimulationParams {
    std::string match_id = "synthetic-0001";
    PerPlayer<std::string> players{"Player A", "Player B"};
    int sets_to_win = 3;
    double first_serve_in = 0.62;
    double first_serve_win = 0.72;
    double second_serve_win = 0.54;
    double momentum = 0.0;
    double persistence = 0.93;
    double form_noise = 0.35;
    double feedback = 0.0;
    double speed_missing = 0.06;
    std::uint64_t seed = 1;
};

MatchData simulate_match(const SimulationParams& params);

/// Extra columns emitted alongside the schema by simulate_match ("elapsed_time").
const std::vector<std::string>& extra_columns();

/// `count` independent matches; match ids are prefix-0001, prefix-0002, ...
std::vector<MatchData> simulate_tournament(const std::string& prefix, int count, double momentum, std::uint64_t seed);

} // namespace tennis::synthetic
