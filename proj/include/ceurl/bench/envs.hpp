#pragma once

#include "ceurl/core/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ceurl::bench {

/// Unified action set of every grid family.
enum GridAction : int { kUp = 0, kRight = 1, kDown = 2, kLeft = 3, kStay = 4 };
inline constexpr int kGridActions = 5;

enum class EnvFamily { AppendixA1, ConfusionRooms, GridDisabled, GridSlip, GridPermuted };
enum class GridLayout { Open, FourRooms };

std::string to_string(EnvFamily family);
EnvFamily parse_family(const std::string& name);
std::string to_string(GridLayout layout);
GridLayout parse_layout(const std::string& name);

/// Declarative description of a built-in embodiment family.
///
/// Exactly one of the per-embodiment parameter lists is read, depending on
/// the family: `disabled_actions` (grid-disabled, -1 disables nothing),
/// `slip_probs` (grid-slip), `permutations` (grid-permuted and the right room
/// of confusion-rooms; each a permutation of the four moves).
struct EnvSpec {
  EnvFamily family = EnvFamily::AppendixA1;
  int rows = 3;
  int cols = 3;
  GridLayout layout = GridLayout::Open;
  std::vector<int> disabled_actions;
  std::vector<double> slip_probs;
  std::vector<std::vector<int>> permutations;
  /// Empty means uniform.
  std::vector<double> prior;
  double discount = 0.99;
  /// Empty means a uniform start over all cells.
  std::optional<std::pair<int, int>> start_cell;
  std::optional<std::pair<int, int>> goal_cell;

  /// Number of embodiments the spec describes.
  int num_embodiments() const;
  /// Family-range checks. Configured families need two or more embodiments;
  /// held-out halves of a split may hold a single one.
  void validate(int min_embodiments = 2) const;
};

/// The default confusion-rooms spec: 2x4 grid, two 2x2 rooms joined through
/// the top row, right room rotated for the second embodiment.
EnvSpec confusion_rooms_spec();

EmbodimentSet build_env(const EnvSpec& spec);

/// The two-state, two-embodiment construction whose mixture occupancy polytope
/// has a non-deterministic vertex.
EmbodimentSet appendix_a1(double discount = 0.9);

/// A single-embodiment deterministic grid (open or four-rooms).
EmbodimentSet single_grid(int rows, int cols, GridLayout layout, double discount,
                          std::optional<std::pair<int, int>> start_cell = std::nullopt);

/// Interleaved split of the family's parameter list: even positions train,
/// odd positions are held out. Needs at least three embodiments. The split is
/// a pure function of the spec; `seed` is accepted for interface symmetry with
/// randomized families and does not change the ordered split.
std::pair<EnvSpec, EnvSpec> train_test_split(const EnvSpec& spec, std::uint64_t seed);

/// Downstream task rewards: "goal" (goal cell, default bottom-right),
/// "corridor" (middle row), "anti-goal" (top-left corner). For appendix-a1 the
/// goal is state 0 and the anti-goal state 1.
RewardTable make_task(const EnvSpec& spec, const std::string& task);

/// Cell index helpers for grid families.
inline int cell_index(int cols, int r, int c) { return r * cols + c; }

/// Set of cells in the left room of a confusion-rooms layout.
std::vector<int> left_room_cells(const EnvSpec& spec);

}  // namespace ceurl::bench
