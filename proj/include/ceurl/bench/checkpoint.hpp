#pragma once

#include "ceurl/agents/agent.hpp"

#include <filesystem>
#include <string>

namespace ceurl::bench {

/// Decimal-text checkpoints.
///
///   ceurl-checkpoint 1
///   kind agent|controller
///   stage <name>
///   int <name> <value>
///   matrix <name> <rows> <cols>
///   <rows lines of cols %.17g reals>
///   end
///
/// Reals round-trip exactly, so a resumed run continues bit-identically.
/// Replay buffers are not stored: no stage after pre-training reads them.

void save_agent(const std::filesystem::path& path, const AgentState& state, const std::string& stage);
/// Restores into a fresh initial_state(set, config) and checks every shape.
AgentState load_agent(const std::filesystem::path& path, const EmbodimentSet& set, const TrainConfig& config);

void save_controller(const std::filesystem::path& path, const MetaController& controller, const std::string& stage);
MetaController load_controller(const std::filesystem::path& path);

/// The stage name recorded in a checkpoint.
std::string checkpoint_stage(const std::filesystem::path& path);

}  // namespace ceurl::bench
