#pragma once

#include <span>

#include "aoi/exact_solver.hpp"

namespace aoi::detail {

/// Policy p assigns state s the action (p / |U|^s) mod |U|.
void decode_policy(std::size_t index, int num_actions, std::span<Action> out);

bool better_candidate(const PolicyEvaluation& cand, const PolicyEvaluation& best);

}  // namespace aoi::detail
