#pragma once

#include <string>
#include <vector>

#include "bnmco/bayes_net.hpp"
#include "bnmco/pathfinder.hpp"
#include "bnmco/scenario.hpp"

namespace bnmco {

/// SVG picture of a scenario: obstacles in gray, the goal region outlined,
/// the robot at the start in blue and, with a trajectory, at its end in
/// green with the end-effector trace in red. Net nodes are drawn at the
/// end-effector position of their means, sized by importance, with an arrow
/// per edge.
std::string render_svg(const Scenario& scenario, const Trajectory* trajectory = nullptr,
                       const std::vector<BayesNet>& nets = {});

}  // namespace bnmco
