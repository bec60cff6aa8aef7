#pragma once

#include "mlirl/features.hpp"
#include "mlirl/mdp.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace mlirl {

/// An MDP with its feature map and ground-truth weights.
struct EnvironmentBundle {
    TabularMdp mdp;
    FeatureMap features;
    WeightVector true_weights;
    std::string name;
    /// All rewards are costs (nonpositive weights); IRL starts from negative weights.
    bool costs_only = false;

    RewardTable true_reward() const { return assemble_reward(features, true_weights); }
};

// ---------------------------------------------------------------------------
// Grid worlds

enum class GridLayout { NarrowPassage, Paths };

/// Grid actions in index order.
enum GridAction : Index { kNorth = 0, kSouth = 1, kEast = 2, kWest = 3, kStay = 4 };

struct GridWorldSpec {
    Index width = 10;
    Index height = 10;
    Index macro_cell_size = 2;
    double success_prob = 0.7;
    double discount = 0.95;
    GridLayout layout = GridLayout::NarrowPassage;
    /// Raw per-macro-cell reward, row-major over the macro grid (row 0 at the top).
    std::vector<double> reward_by_cell;

    Index macro_cols() const { return width / macro_cell_size; }
    Index macro_rows() const { return height / macro_cell_size; }
    Index n_cells() const { return macro_cols() * macro_rows(); }
};

/// Narrow-passage layout on a 10x10 grid with the given macro-cell size (1, 2 or 5).
GridWorldSpec narrow_passage_spec(Index macro_cell_size = 2);
/// Path-following layout on a 10x10 grid with 1x1 macro-cells.
GridWorldSpec paths_spec();

/**
 * State `row * width + col`; five actions (N, S, E, W, stay). The intended move
 * happens with probability success_prob, otherwise one of the five outcomes is
 * drawn uniformly. Bumping into the border leaves the agent in place.
 *
 * The raw cell rewards are rescaled affinely onto [0, 1] and multiplied by
 * (1 - discount), so any policy's total value lies in [0, 1].
 */
EnvironmentBundle build_grid_world(const GridWorldSpec& spec, std::string name = "grid");

// ---------------------------------------------------------------------------
// Sailing

/// Relative heading classes, then the tack-change bit.
enum SailingFeature : Index {
    kAway = 0,
    kDown = 1,
    kCross = 2,
    kUp = 3,
    kInto = 4,
    kDelay = 5,
};

inline constexpr Index kWindDirections = 8;
inline constexpr Index kTacks = 2;

struct GridCoord {
    Index row = 0;
    Index col = 0;
};

struct SailingSpec {
    Index grid_side = 5;
    double wind_persistence = 0.4;
    double discount = 0.99;
    GridCoord goal{0, 4};
    GridCoord start{4, 0};
    std::array<double, 6> true_theta{-1.0, -2.0, -3.0, -4.0, -100000.0, -3.0};
};

SailingSpec sailing_spec(Index grid_side);

/**
 * Sailing on a grid_side x grid_side lake.
 *
 * States are (row, col, wind, tack) packed as ((row * side + col) * 8 + wind) * 2 + tack,
 * followed by one absorbing goal state. Wind is the compass direction the wind blows
 * towards, indexed like the actions (0 = N, 1 = NE, ..., 7 = NW). Moving onto the goal
 * square enters the absorbing state; moving off the lake keeps the position.
 */
EnvironmentBundle build_sailing(const SailingSpec& spec, std::string name = "sailing");

/// Heading class (kAway .. kInto) of compass action `heading` under wind blowing towards `wind`.
Index heading_class(Index heading, Index wind);
/// Tack after sailing `heading` under `wind`, starting from `tack`.
Index next_tack(Index heading, Index wind, Index tack);

struct SailingState {
    Index row;
    Index col;
    Index wind;
    Index tack;
};
Index encode_sailing_state(const SailingSpec& spec, const SailingState& s);
SailingState decode_sailing_state(const SailingSpec& spec, Index state);
Index sailing_goal_state(const SailingSpec& spec);

// ---------------------------------------------------------------------------
// Catalog

using EnvironmentSpec = std::variant<GridWorldSpec, SailingSpec>;

struct CatalogEntry {
    std::string name;
    EnvironmentSpec spec;
};

/// Named default environments; contains at least narrow-passage-2x2, paths-10x10,
/// sailing-small and sailing-paper.
const std::vector<CatalogEntry>& env_catalog();
/// Throws NotFoundError for unknown names.
const CatalogEntry& find_environment(const std::string& name);
EnvironmentBundle build_environment(const CatalogEntry& entry);
EnvironmentBundle build_environment(const std::string& name);

// ---------------------------------------------------------------------------
// Text serialization (exact round-trip decimal encoding)

void write_bundle(std::ostream& out, const EnvironmentBundle& bundle);
EnvironmentBundle read_bundle(std::istream& in);

} // namespace mlirl
