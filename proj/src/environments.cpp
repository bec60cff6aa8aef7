#include "mlirl/environments.hpp"

#include "mlirl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mlirl {

namespace {

constexpr std::array<Index, 5> kGridDr{-1, 1, 0, 0, 0};
constexpr std::array<Index, 5> kGridDc{0, 0, 1, -1, 0};

// Compass offsets indexed N, NE, E, SE, S, SW, W, NW.
constexpr std::array<Index, 8> kCompassDr{-1, -1, 0, 1, 1, 1, 0, -1};
constexpr std::array<Index, 8> kCompassDc{0, 1, 1, 1, 0, -1, -1, -1};

Index mod8(Index v) { return ((v % 8) + 8) % 8; }

void validate(const GridWorldSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0 || spec.macro_cell_size <= 0) {
        throw ConfigError("GridWorldSpec: sizes must be positive");
    }
    if (spec.width % spec.macro_cell_size != 0 || spec.height % spec.macro_cell_size != 0) {
        throw ConfigError("GridWorldSpec: grid size not divisible by the macro-cell size");
    }
    if (!(spec.success_prob > 0.0 && spec.success_prob <= 1.0)) {
        throw ConfigError("GridWorldSpec: success_prob must lie in (0, 1]");
    }
    if (static_cast<Index>(spec.reward_by_cell.size()) != spec.n_cells()) {
        throw ConfigError("GridWorldSpec: reward_by_cell needs " + std::to_string(spec.n_cells()) +
                          " entries");
    }
}

void validate(const SailingSpec& spec) {
    if (spec.grid_side < 2) throw ConfigError("SailingSpec: grid_side must be at least 2");
    if (!(spec.wind_persistence > 0.0 && spec.wind_persistence <= 1.0)) {
        throw ConfigError("SailingSpec: wind_persistence must lie in (0, 1]");
    }
    auto inside = [&](GridCoord c) {
        return c.row >= 0 && c.row < spec.grid_side && c.col >= 0 && c.col < spec.grid_side;
    };
    if (!inside(spec.goal)) throw ConfigError("SailingSpec: goal outside the grid");
    if (!inside(spec.start)) throw ConfigError("SailingSpec: start outside the grid");
    if (spec.goal.row == spec.start.row && spec.goal.col == spec.start.col) {
        throw ConfigError("SailingSpec: start coincides with the goal");
    }
}

// Narrow passage on a 5x5 macro pattern: goal corner top-right, a corridor in
// column 3 walled by pits in columns 2 and 4.
constexpr std::array<std::array<double, 5>, 5> kNarrowPattern{{
    {0.0, 0.0, -1.0, 0.0, 1.0},
    {0.0, 0.0, -1.0, 0.0, -1.0},
    {0.0, 0.0, -1.0, 0.0, -1.0},
    {0.0, 0.0, -1.0, 0.0, -1.0},
    {0.0, 0.0, 0.0, 0.0, 0.0},
}};

} // namespace

GridWorldSpec narrow_passage_spec(Index macro_cell_size) {
    GridWorldSpec spec;
    spec.width = 10;
    spec.height = 10;
    spec.macro_cell_size = macro_cell_size;
    spec.layout = GridLayout::NarrowPassage;
    if (10 % macro_cell_size != 0) {
        throw ConfigError("narrow passage needs a macro-cell size dividing 10");
    }
    // Sample the 5x5 pattern at each macro-cell's centre square.
    const Index cells = 10 / macro_cell_size;
    for (Index r = 0; r < cells; ++r) {
        for (Index c = 0; c < cells; ++c) {
            const Index sr = (r * macro_cell_size + macro_cell_size / 2) / 2;
            const Index sc = (c * macro_cell_size + macro_cell_size / 2) / 2;
            spec.reward_by_cell.push_back(kNarrowPattern[static_cast<std::size_t>(sr)][static_cast<std::size_t>(sc)]);
        }
    }
    return spec;
}

GridWorldSpec paths_spec() {
    GridWorldSpec spec;
    spec.width = 10;
    spec.height = 10;
    spec.macro_cell_size = 1;
    spec.layout = GridLayout::Paths;
    spec.reward_by_cell.assign(100, 0.0);
    auto set = [&](Index r, Index c, double v) { spec.reward_by_cell[static_cast<std::size_t>(r * 10 + c)] = v; };
    // Top row and right column lead to the goal; a middle row joins the right column.
    for (Index c = 0; c < 9; ++c) set(0, c, 0.25);
    for (Index r = 1; r < 10; ++r) set(r, 9, 0.25);
    for (Index c = 0; c < 9; ++c) set(5, c, 0.25);
    set(0, 9, 1.0);
    return spec;
}

EnvironmentBundle build_grid_world(const GridWorldSpec& spec, std::string name) {
    validate(spec);
    const Index n = spec.width * spec.height;
    const Index na = 5;
    std::vector<Transition> transitions;
    transitions.reserve(static_cast<std::size_t>(n * na * 5));

    auto target = [&](Index r, Index c, Index move) {
        const Index nr = r + kGridDr[static_cast<std::size_t>(move)];
        const Index nc = c + kGridDc[static_cast<std::size_t>(move)];
        if (nr < 0 || nr >= spec.height || nc < 0 || nc >= spec.width) return r * spec.width + c;
        return nr * spec.width + nc;
    };

    const double slip = (1.0 - spec.success_prob) / 5.0;
    for (Index r = 0; r < spec.height; ++r) {
        for (Index c = 0; c < spec.width; ++c) {
            const Index x = r * spec.width + c;
            for (Index a = 0; a < na; ++a) {
                std::array<double, 5> p{};
                for (Index m = 0; m < 5; ++m) p[static_cast<std::size_t>(m)] = slip;
                p[static_cast<std::size_t>(a)] += spec.success_prob;
                for (Index m = 0; m < 5; ++m) {
                    transitions.push_back({x, a, target(r, c, m), p[static_cast<std::size_t>(m)]});
                }
            }
        }
    }
    TabularMdp mdp(n, na, transitions, spec.discount,
                   Vector::Constant(n, 1.0 / static_cast<double>(n)));

    std::vector<Index> cell_of(static_cast<std::size_t>(n));
    for (Index r = 0; r < spec.height; ++r) {
        for (Index c = 0; c < spec.width; ++c) {
            cell_of[static_cast<std::size_t>(r * spec.width + c)] =
                (r / spec.macro_cell_size) * spec.macro_cols() + c / spec.macro_cell_size;
        }
    }
    FeatureMap features = indicator_features(n, na, cell_of, spec.n_cells());

    const Vector raw = Eigen::Map<const Vector>(spec.reward_by_cell.data(), spec.n_cells());
    const double lo = raw.minCoeff();
    const double hi = raw.maxCoeff();
    Vector theta = hi > lo ? Vector((raw.array() - lo) / (hi - lo)) : Vector::Ones(raw.size());
    theta *= (1.0 - spec.discount);

    return EnvironmentBundle{std::move(mdp), std::move(features),
                             WeightVector(std::move(theta), ConstraintMode::Unconstrained),
                             std::move(name), false};
}

SailingSpec sailing_spec(Index grid_side) {
    SailingSpec spec;
    spec.grid_side = grid_side;
    spec.goal = {0, grid_side - 1};
    spec.start = {grid_side - 1, 0};
    return spec;
}

Index heading_class(Index heading, Index wind) {
    const Index d = mod8(heading - wind);
    return std::min(d, 8 - d);
}

Index next_tack(Index heading, Index wind, Index tack) {
    const Index d = mod8(heading - wind);
    if (d == 0 || d == 4) return tack;
    return d < 4 ? 0 : 1;
}

Index encode_sailing_state(const SailingSpec& spec, const SailingState& s) {
    return ((s.row * spec.grid_side + s.col) * kWindDirections + s.wind) * kTacks + s.tack;
}

SailingState decode_sailing_state(const SailingSpec& spec, Index state) {
    if (state < 0 || state >= sailing_goal_state(spec)) {
        throw DimensionError("decode_sailing_state: not a grid state");
    }
    SailingState s{};
    s.tack = state % kTacks;
    state /= kTacks;
    s.wind = state % kWindDirections;
    state /= kWindDirections;
    s.col = state % spec.grid_side;
    s.row = state / spec.grid_side;
    return s;
}

Index sailing_goal_state(const SailingSpec& spec) {
    return spec.grid_side * spec.grid_side * kWindDirections * kTacks;
}

EnvironmentBundle build_sailing(const SailingSpec& spec, std::string name) {
    validate(spec);
    const Index side = spec.grid_side;
    const Index goal = sailing_goal_state(spec);
    const Index n = goal + 1;
    const Index na = 8;
    const double turn = (1.0 - spec.wind_persistence) / 2.0;

    std::vector<Transition> transitions;
    transitions.reserve(static_cast<std::size_t>(n * na * 3));
    Matrix phi = Matrix::Zero(n * na, 6);

    for (Index x = 0; x < goal; ++x) {
        const SailingState s = decode_sailing_state(spec, x);
        const bool at_goal = s.row == spec.goal.row && s.col == spec.goal.col;
        for (Index a = 0; a < na; ++a) {
            if (at_goal) {
                transitions.push_back({x, a, goal, 1.0});
                continue;
            }
            const Index cls = heading_class(a, s.wind);
            const Index tack = next_tack(a, s.wind, s.tack);
            phi(x * na + a, cls) = 1.0;
            phi(x * na + a, kDelay) = tack != s.tack ? 1.0 : 0.0;

            Index nr = s.row + kCompassDr[static_cast<std::size_t>(a)];
            Index nc = s.col + kCompassDc[static_cast<std::size_t>(a)];
            if (nr < 0 || nr >= side || nc < 0 || nc >= side) {
                nr = s.row;
                nc = s.col;
            }
            if (nr == spec.goal.row && nc == spec.goal.col) {
                transitions.push_back({x, a, goal, 1.0});
                continue;
            }
            auto push = [&](Index wind, double p) {
                if (p > 0.0) {
                    transitions.push_back({x, a, encode_sailing_state(spec, {nr, nc, wind, tack}), p});
                }
            };
            push(s.wind, spec.wind_persistence);
            push(mod8(s.wind + 1), turn);
            push(mod8(s.wind - 1), turn);
        }
    }
    for (Index a = 0; a < na; ++a) transitions.push_back({goal, a, goal, 1.0});

    Vector initial = Vector::Zero(n);
    for (Index w = 0; w < kWindDirections; ++w) {
        for (Index t = 0; t < kTacks; ++t) {
            initial(encode_sailing_state(spec, {spec.start.row, spec.start.col, w, t})) =
                1.0 / static_cast<double>(kWindDirections * kTacks);
        }
    }

    TabularMdp mdp(n, na, transitions, spec.discount, std::move(initial));
    FeatureMap features(n, na, std::move(phi));
    Vector theta = Eigen::Map<const Vector>(spec.true_theta.data(), 6);
    return EnvironmentBundle{std::move(mdp), std::move(features),
                             WeightVector(std::move(theta), ConstraintMode::Unconstrained),
                             std::move(name), true};
}

const std::vector<CatalogEntry>& env_catalog() {
    static const std::vector<CatalogEntry> catalog = [] {
        std::vector<CatalogEntry> c;
        c.push_back({"narrow-passage-2x2", narrow_passage_spec(2)});
        c.push_back({"narrow-passage-1x1", narrow_passage_spec(1)});
        c.push_back({"paths-10x10", paths_spec()});
        c.push_back({"sailing-small", sailing_spec(5)});
        c.push_back({"sailing-paper", sailing_spec(10)});
        return c;
    }();
    return catalog;
}

const CatalogEntry& find_environment(const std::string& name) {
    for (const auto& entry : env_catalog()) {
        if (entry.name == name) return entry;
    }
    throw NotFoundError("unknown environment '" + name + "'");
}

EnvironmentBundle build_environment(const CatalogEntry& entry) {
    return std::visit(
        [&](const auto& spec) -> EnvironmentBundle {
            using Spec = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<Spec, GridWorldSpec>) {
                return build_grid_world(spec, entry.name);
            } else {
                return build_sailing(spec, entry.name);
            }
        },
        entry.spec);
}

EnvironmentBundle build_environment(const std::string& name) {
    return build_environment(find_environment(name));
}

} // namespace mlirl
