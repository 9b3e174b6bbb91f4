#include "ceurl/bench/envs.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ceurl::bench {
namespace {

struct Grid {
  int rows = 0;
  int cols = 0;
  std::set<std::pair<int, int>> walls;  // blocked edges between adjacent cells, (lo, hi)

  void block(int a, int b) { walls.insert({std::min(a, b), std::max(a, b)}); }

  int step(int cell, int direction) const {
    const int r = cell / cols, c = cell % cols;
    int nr = r, nc = c;
    switch (direction) {
      case kUp: --nr; break;
      case kRight: ++nc; break;
      case kDown: ++nr; break;
      case kLeft: --nc; break;
      default: return cell;
    }
    if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) return cell;
    const int next = cell_index(cols, nr, nc);
    return walls.count({std::min(cell, next), std::max(cell, next)}) ? cell : next;
  }
};

Grid make_grid(int rows, int cols, GridLayout layout) {
  Grid g{rows, cols, {}};
  if (layout == GridLayout::FourRooms) {
    const int hr = rows / 2, hc = cols / 2;
    // vertical wall between columns hc-1 | hc, one door per half
    for (int r = 0; r < rows; ++r) {
      const bool door = r == hr / 2 || r == hr + (rows - hr) / 2;
      if (!door) g.block(cell_index(cols, r, hc - 1), cell_index(cols, r, hc));
    }
    // horizontal wall between rows hr-1 | hr
    for (int c = 0; c < cols; ++c) {
      const bool door = c == hc / 2 || c == hc + (cols - hc) / 2;
      if (!door) g.block(cell_index(cols, hr - 1, c), cell_index(cols, hr, c));
    }
  }
  return g;
}

Eigen::VectorXd start_distribution(int rows, int cols, const std::optional<std::pair<int, int>>& start) {
  const int n = rows * cols;
  if (!start) return Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
  mu(cell_index(cols, start->first, start->second)) = 1.0;
  return mu;
}

std::vector<int> identity_projector() { return {kUp, kRight, kDown, kLeft, kStay}; }

/// Grid embodiment whose effective move direction may depend on the cell.
template <typename DirectionOf>
Embodiment grid_embodiment(int id, const Grid& g, double slip, DirectionOf direction_of) {
  Embodiment e;
  e.id = id;
  e.num_states = g.rows * g.cols;
  e.num_actions = kGridActions;
  e.transition = Eigen::MatrixXd::Zero(e.num_states * kGridActions, e.num_states);
  for (int s = 0; s < e.num_states; ++s)
    for (int a = 0; a < kGridActions; ++a) {
      auto row = e.transition.row(s * kGridActions + a);
      if (a == kStay) {
        row(s) = 1.0;
        continue;
      }
      row(g.step(s, direction_of(s, a))) += 1.0 - slip;
      for (int d = 0; d < 4; ++d) row(g.step(s, d)) += slip / 4.0;
    }
  e.action_projector = identity_projector();
  return e;
}

bool is_move_permutation(const std::vector<int>& p) {
  if (p.size() != 4) return false;
  std::vector<int> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  return sorted == std::vector<int>{0, 1, 2, 3};
}

void check_cell(const EnvSpec& spec, const std::optional<std::pair<int, int>>& cell, const char* what) {
  if (cell && (cell->first < 0 || cell->first >= spec.rows || cell->second < 0 || cell->second >= spec.cols))
    throw std::invalid_argument(std::string(what) + " lies outside the grid");
}

Eigen::VectorXd prior_of(const EnvSpec& spec) {
  const int m = spec.num_embodiments();
  if (spec.prior.empty()) return Eigen::VectorXd::Constant(m, 1.0 / m);
  return Eigen::Map<const Eigen::VectorXd>(spec.prior.data(), static_cast<Eigen::Index>(spec.prior.size()));
}

}  // namespace

std::string to_string(EnvFamily family) {
  switch (family) {
    case EnvFamily::AppendixA1: return "appendix-a1";
    case EnvFamily::ConfusionRooms: return "confusion-rooms";
    case EnvFamily::GridDisabled: return "grid-disabled";
    case EnvFamily::GridSlip: return "grid-slip";
    case EnvFamily::GridPermuted: return "grid-permuted";
  }
  return "?";
}

EnvFamily parse_family(const std::string& name) {
  for (auto f : {EnvFamily::AppendixA1, EnvFamily::ConfusionRooms, EnvFamily::GridDisabled, EnvFamily::GridSlip,
                 EnvFamily::GridPermuted})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown environment family '" + name + "'");
}

std::string to_string(GridLayout layout) { return layout == GridLayout::Open ? "open" : "four-rooms"; }

GridLayout parse_layout(const std::string& name) {
  if (name == "open") return GridLayout::Open;
  if (name == "four-rooms") return GridLayout::FourRooms;
  throw std::invalid_argument("unknown grid layout '" + name + "'");
}

int EnvSpec::num_embodiments() const {
  switch (family) {
    case EnvFamily::AppendixA1: return 2;
    case EnvFamily::GridDisabled: return static_cast<int>(disabled_actions.size());
    case EnvFamily::GridSlip: return static_cast<int>(slip_probs.size());
    case EnvFamily::ConfusionRooms:
    case EnvFamily::GridPermuted: return static_cast<int>(permutations.size());
  }
  return 0;
}

void EnvSpec::validate(int min_embodiments) const {
  if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("discount must lie strictly inside (0, 1)");
  const int m = num_embodiments();
  if (family != EnvFamily::AppendixA1) {
    if (m < min_embodiments)
      throw std::invalid_argument(to_string(family) + " needs at least " + std::to_string(min_embodiments) +
                                  " embodiments");
    if (rows < 1 || cols < 1 || rows * cols < 2) throw std::invalid_argument("grid must have at least two cells");
    if (layout == GridLayout::FourRooms && (rows < 4 || cols < 4 || rows % 2 || cols % 2))
      throw std::invalid_argument("four-rooms layout needs even dimensions of at least 4");
    check_cell(*this, start_cell, "start cell");
    check_cell(*this, goal_cell, "goal cell");
  }
  if (!prior.empty()) {
    if (static_cast<int>(prior.size()) != m) throw std::invalid_argument("prior length must match embodiment count");
    double total = 0.0;
    for (double p : prior) {
      if (!(p >= 0.0)) throw std::invalid_argument("prior entries must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("prior must sum to 1");
  }
  switch (family) {
    case EnvFamily::AppendixA1: break;
    case EnvFamily::GridDisabled:
      for (int a : disabled_actions)
        if (a < -1 || a > 3) throw std::invalid_argument("disabled action must be -1 or a move in 0..3");
      break;
    case EnvFamily::GridSlip:
      for (double p : slip_probs)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("slip probability must lie in [0, 1]");
      break;
    case EnvFamily::ConfusionRooms:
      if (cols % 2 != 0) throw std::invalid_argument("confusion-rooms needs an even column count");
      if (layout != GridLayout::Open) throw std::invalid_argument("confusion-rooms has its own layout");
      [[fallthrough]];
    case EnvFamily::GridPermuted:
      for (std::size_t i = 0; i < permutations.size(); ++i) {
        if (!is_move_permutation(permutations[i])) throw std::invalid_argument("invalid move permutation");
        for (std::size_t j = 0; j < i; ++j)
          if (permutations[i] == permutations[j]) throw std::invalid_argument("duplicate move permutation");
      }
      break;
  }
}

EnvSpec confusion_rooms_spec() {
  EnvSpec spec;
  spec.family = EnvFamily::ConfusionRooms;
  spec.rows = 2;
  spec.cols = 4;
  spec.permutations = {{0, 1, 2, 3}, {1, 2, 3, 0}};
  spec.discount = 0.99;
  return spec;
}

EmbodimentSet appendix_a1(double discount) {
  EmbodimentSet set;
  set.unified_num_actions = 2;
  set.discount = discount;
  set.prior = Eigen::Vector2d(0.5, 0.5);
  // rows: (s1,a1) (s1,a2) (s2,a1) (s2,a2); columns: s1 s2
  Eigen::MatrixXd p1(4, 2), p2(4, 2);
  p1 << 1, 0,  //
      0, 1,    //
      0, 1,    //
      1, 0;
  p2 << 0, 1,  //
      1, 0,    //
      1, 0,    //
      0, 1;
  int id = 0;
  for (const auto& p : {p1, p2}) {
    Embodiment e;
    e.id = id++;
    e.num_states = 2;
    e.num_actions = 2;
    e.transition = p;
    e.initial_dist = Eigen::Vector2d(0.5, 0.5);
    e.action_projector = {0, 1};
    set.embodiments.push_back(e);
  }
  set.validate();
  return set;
}

EmbodimentSet single_grid(int rows, int cols, GridLayout layout, double discount,
                          std::optional<std::pair<int, int>> start_cell) {
  const Grid g = make_grid(rows, cols, layout);
  Embodiment e = grid_embodiment(0, g, 0.0, [](int, int a) { return a; });
  e.initial_dist = start_distribution(rows, cols, start_cell);
  EmbodimentSet set;
  set.embodiments.push_back(e);
  set.prior = Eigen::VectorXd::Ones(1);
  set.unified_num_actions = kGridActions;
  set.discount = discount;
  set.validate();
  return set;
}

EmbodimentSet build_env(const EnvSpec& spec) {
  spec.validate(1);
  if (spec.family == EnvFamily::AppendixA1) {
    auto set = appendix_a1(spec.discount);
    if (!spec.prior.empty()) set.prior = prior_of(spec);
    set.validate();
    return set;
  }

  EmbodimentSet set;
  set.unified_num_actions = kGridActions;
  set.discount = spec.discount;
  set.prior = prior_of(spec);
  const Eigen::VectorXd mu0 = start_distribution(spec.rows, spec.cols, spec.start_cell);
  const int m = spec.num_embodiments();

  for (int i = 0; i < m; ++i) {
    Embodiment e;
    switch (spec.family) {
      case EnvFamily::GridDisabled: {
        const Grid g = make_grid(spec.rows, spec.cols, spec.layout);
        e = grid_embodiment(i, g, 0.0, [](int, int a) { return a; });
        const int off = spec.disabled_actions[static_cast<std::size_t>(i)];
        if (off >= 0) e.action_projector[static_cast<std::size_t>(off)] = kStay;
        break;
      }
      case EnvFamily::GridSlip: {
        const Grid g = make_grid(spec.rows, spec.cols, spec.layout);
        e = grid_embodiment(i, g, spec.slip_probs[static_cast<std::size_t>(i)], [](int, int a) { return a; });
        break;
      }
      case EnvFamily::GridPermuted: {
        const Grid g = make_grid(spec.rows, spec.cols, spec.layout);
        e = grid_embodiment(i, g, 0.0, [](int, int a) { return a; });
        const auto& perm = spec.permutations[static_cast<std::size_t>(i)];
        for (int a = 0; a < 4; ++a) e.action_projector[static_cast<std::size_t>(a)] = perm[static_cast<std::size_t>(a)];
        break;
      }
      case EnvFamily::ConfusionRooms: {
        Grid g = make_grid(spec.rows, spec.cols, GridLayout::Open);
        const int half = spec.cols / 2;
        for (int r = 1; r < spec.rows; ++r) g.block(cell_index(spec.cols, r, half - 1), cell_index(spec.cols, r, half));
        const auto perm = spec.permutations[static_cast<std::size_t>(i)];
        const int cols = spec.cols;
        e = grid_embodiment(i, g, 0.0, [perm, half, cols](int s, int a) {
          return (s % cols) >= half ? perm[static_cast<std::size_t>(a)] : a;
        });
        break;
      }
      case EnvFamily::AppendixA1: break;
    }
    e.initial_dist = mu0;
    set.embodiments.push_back(std::move(e));
  }
  set.validate();
  return set;
}

std::pair<EnvSpec, EnvSpec> train_test_split(const EnvSpec& spec, std::uint64_t /*seed*/) {
  spec.validate();
  const int m = spec.num_embodiments();
  if (spec.family == EnvFamily::AppendixA1 || m < 3)
    throw std::invalid_argument("train/test split needs at least three embodiments");
  EnvSpec train = spec, test = spec;
  train.disabled_actions.clear();
  test.disabled_actions.clear();
  train.slip_probs.clear();
  test.slip_probs.clear();
  train.permutations.clear();
  test.permutations.clear();
  train.prior.clear();
  test.prior.clear();
  for (int i = 0; i < m; ++i) {
    EnvSpec& dst = (i % 2 == 0) ? train : test;
    const auto k = static_cast<std::size_t>(i);
    switch (spec.family) {
      case EnvFamily::GridDisabled: dst.disabled_actions.push_back(spec.disabled_actions[k]); break;
      case EnvFamily::GridSlip: dst.slip_probs.push_back(spec.slip_probs[k]); break;
      default: dst.permutations.push_back(spec.permutations[k]); break;
    }
  }
  // the held-out side may hold a single embodiment, so only train is re-validated
  train.validate();
  return {train, test};
}

RewardTable make_task(const EnvSpec& spec, const std::string& task) {
  RewardTable r;
  if (spec.family == EnvFamily::AppendixA1) {
    if (task == "goal") r.values = Eigen::Vector2d(1.0, 0.0);
    else if (task == "anti-goal") r.values = Eigen::Vector2d(0.0, 1.0);
    else throw std::invalid_argument("appendix-a1 has no task '" + task + "'");
    return r;
  }
  r.values = Eigen::VectorXd::Zero(spec.rows * spec.cols);
  if (task == "goal") {
    const auto goal = spec.goal_cell.value_or(std::pair{spec.rows - 1, spec.cols - 1});
    r.values(cell_index(spec.cols, goal.first, goal.second)) = 1.0;
  } else if (task == "corridor") {
    for (int c = 0; c < spec.cols; ++c) r.values(cell_index(spec.cols, spec.rows / 2, c)) = 1.0;
  } else if (task == "anti-goal") {
    r.values(0) = 1.0;
  } else {
    throw std::invalid_argument("unknown task '" + task + "'");
  }
  return r;
}

std::vector<int> left_room_cells(const EnvSpec& spec) {
  std::vector<int> cells;
  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols / 2; ++c) cells.push_back(cell_index(spec.cols, r, c));
  return cells;
}

}  // namespace ceurl::bench
