// SPDX-License-Identifier: Apache-2.0
#include "codesign/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "codesign/errors.hpp"

namespace codesign {

namespace {

// Index of a factor on the ladder, -1 if absent.
int ladder_index(double f) {
    for (std::size_t i = 0; i < kChannelFactorLadder.size(); ++i) {
        if (std::abs(kChannelFactorLadder[i] - f) < 1e-9) return static_cast<int>(i);
    }
    return -1;
}

// rng()%n is platform-stable, unlike std::uniform_int_distribution.
std::size_t pick(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

DnnModel move_n(const DnnModel& m, int steps) {
    const int next = m.n_rep + steps;
    if (next < 1) throw MoveError("N move would drop n_rep below 1");
    DnnModel out = m;
    out.n_rep = next;
    out.x_ds.resize(static_cast<std::size_t>(next) - 1, 0);
    out.pi_ch.resize(static_cast<std::size_t>(next) - 1, 1.0);
    return out;
}

DnnModel move_pi(const DnnModel& m, int steps, std::mt19937_64& rng) {
    DnnModel out = m;
    const int dir = steps > 0 ? 1 : -1;
    const int last = static_cast<int>(kChannelFactorLadder.size()) - 1;
    for (int u = 0; u < std::abs(steps); ++u) {
        std::vector<std::size_t> movable;
        for (std::size_t i = 0; i < out.pi_ch.size(); ++i) {
            const int at = ladder_index(out.pi_ch[i]);
            if (at < 0) throw MoveError("pi entry off the factor ladder");
            if ((dir > 0 && at < last) || (dir < 0 && at > 0)) movable.push_back(i);
        }
        if (movable.empty()) {
            throw MoveError("Pi move has no entry left to advance");
        }
        const std::size_t i = movable[pick(rng, movable.size())];
        out.pi_ch[i] = kChannelFactorLadder[static_cast<std::size_t>(
            ladder_index(out.pi_ch[i]) + dir)];
    }
    return out;
}

DnnModel move_x(const DnnModel& m, int steps, const MoveContext& ctx) {
    DnnModel out = m;
    for (int u = 0; u < std::abs(steps); ++u) {
        if (out.x_ds.empty()) throw MoveError("X move needs at least one boundary");
        const double lat = ctx.oracle->latency_ms(out);
        const double gap = std::abs(ctx.lat_targ_ms - lat);
        double best_gain = 0.0;
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < out.x_ds.size(); ++i) {
            DnnModel flipped = out;
            flipped.x_ds[i] = 1 - flipped.x_ds[i];
            const double gain =
                gap - std::abs(ctx.lat_targ_ms - ctx.oracle->latency_ms(flipped));
            if (gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        if (!best) throw MoveError("no down-sampling flip moves latency toward the target");
        out.x_ds[*best] = 1 - out.x_ds[*best];
    }
    return out;
}

} // namespace

std::string to_string(Coord c) {
    switch (c) {
    case Coord::N: return "N";
    case Coord::Pi: return "Pi";
    case Coord::X: return "X";
    }
    return "?";
}

void validate(const SearchConfig& cfg) {
    if (cfg.epsilon_ms <= 0.0) throw DomainError("epsilon must be > 0");
    if (cfg.k < 1) throw DomainError("k must be >= 1");
    if (cfg.max_iters < 1) throw DomainError("max_iters must be >= 1");
    if (cfg.lat_targ_ms <= 0.0) throw DomainError("latency target must be > 0");
}

double AnalyticalOracle::latency_ms(const DnnModel& m) const {
    return dnn_latency_ms(m, *device_, *ch_);
}

ResourceVector AnalyticalOracle::resource(const DnnModel& m) const {
    return dnn_resource(m, *ch_);
}

DnnModel coordinate_move(const DnnModel& m, Coord coord, int steps, MoveContext& ctx) {
    if (steps == 0) throw MoveError("move of 0 steps");
    DnnModel out;
    switch (coord) {
    case Coord::N: out = move_n(m, steps); break;
    case Coord::Pi: out = move_pi(m, steps, *ctx.rng); break;
    case Coord::X: out = move_x(m, steps, ctx); break;
    }
    try {
        validate(out);
    } catch (const DomainError& e) {
        throw MoveError(std::string("move produced an invalid model: ") + e.what());
    }
    return out;
}

std::string trace_to_text(const std::vector<TraceEntry>& trace) {
    std::string out;
    char line[256];
    for (const auto& e : trace) {
        std::snprintf(line, sizeof(line),
                      "iter=%d event=%s coord=%s steps=%d lat_ms=%.6g dsp=%.6g lut=%.6g "
                      "ff=%.6g bram_kbit=%.6g\n",
                      e.iter, e.event.c_str(), e.coord.c_str(), e.steps, e.lat_ms, e.res.dsp,
                      e.res.lut, e.res.ff, e.res.bram_kbit);
        out += line;
    }
    return out;
}

namespace {

constexpr std::array<Coord, 3> kCoords = {Coord::N, Coord::Pi, Coord::X};

struct Probe {
    DnnModel moved;
    double dlat = 0.0;
};

// One random structural perturbation after an acceptance, so consecutive
// accepted models are not forced to coincide. Ignores the target direction.
DnnModel perturb(const DnnModel& m, MoveContext& ctx) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        const Coord coord = kCoords[pick(*ctx.rng, kCoords.size())];
        const int dir = pick(*ctx.rng, 2) == 0 ? 1 : -1;
        try {
            return coordinate_move(m, coord, dir, ctx);
        } catch (const MoveError&) {
            continue;
        }
    }
    return m;
}

} // namespace

SearchResult scd_search(const DnnModel& initial, const SearchConfig& cfg,
                        const LatResOracle& oracle) {
    validate(initial);
    validate(cfg);

    SearchState state;
    state.current = initial;
    state.rng.seed(cfg.seed);
    MoveContext ctx{&oracle, cfg.lat_targ_ms, &state.rng};

    SearchResult result;
    auto log = [&](const std::string& event, const std::string& coord, int steps, double lat,
                   const ResourceVector& res) {
        result.trace.push_back(TraceEntry{state.iteration, event, coord, steps, lat, res});
    };

    while (state.iteration < cfg.max_iters &&
           static_cast<int>(state.accepted.size()) < cfg.k) {
        ++state.iteration;
        const double lat = oracle.latency_ms(state.current);
        const ResourceVector res = oracle.resource(state.current);

        if (std::abs(cfg.lat_targ_ms - lat) < cfg.epsilon_ms && res.all_leq(cfg.res_max)) {
            state.accepted.push_back(state.current);
            log("accept", "-", 0, lat, res);
            if (static_cast<int>(state.accepted.size()) == cfg.k) break;
            state.current = perturb(state.current, ctx);
            continue;
        }

        // Probe a unit move toward the target along each coordinate.
        const bool grow = lat < cfg.lat_targ_ms;
        std::array<std::optional<Probe>, 3> probes;
        for (std::size_t c = 0; c < kCoords.size(); ++c) {
            const int unit = grow ? 1 : -1;
            try {
                Probe p;
                p.moved = coordinate_move(state.current, kCoords[c], unit, ctx);
                p.dlat = oracle.latency_ms(p.moved) - lat;
                if (p.dlat != 0.0) probes[c] = std::move(p);
            } catch (const MoveError&) {
                // coordinate unavailable this round
            }
        }

        std::vector<std::size_t> available;
        for (std::size_t c = 0; c < probes.size(); ++c) {
            if (probes[c]) available.push_back(c);
        }
        if (available.empty()) {
            log("stuck", "-", 0, lat, res);
            break;
        }

        const std::size_t c = available[pick(state.rng, available.size())];
        const Coord coord = kCoords[c];
        const Probe& p = *probes[c];

        if (!oracle.resource(p.moved).all_lt(cfg.res_max)) {
            log("resource-reject", to_string(coord), grow ? 1 : -1, lat, res);
            continue;
        }

        // Step count floor(|gap| / |dLat|), at least the probed unit.
        const int steps = std::max(
            1, static_cast<int>(std::floor(std::abs(cfg.lat_targ_ms - lat) / std::abs(p.dlat))));
        const int signed_steps = grow ? steps : -steps;
        DnnModel next;
        int applied = signed_steps;
        try {
            next = coordinate_move(state.current, coord, signed_steps, ctx);
        } catch (const MoveError&) {
            next = p.moved; // fall back to the probed single unit
            applied = grow ? 1 : -1;
        }
        state.current = std::move(next);
        log("move", to_string(coord), applied, oracle.latency_ms(state.current),
            oracle.resource(state.current));
    }

    result.models = state.accepted;
    result.iterations = state.iteration;
    if (static_cast<int>(result.models.size()) < cfg.k) {
        result.warning = "accepted " + std::to_string(result.models.size()) + " of " +
                         std::to_string(cfg.k) + " requested models within " +
                         std::to_string(state.iteration) + " iterations";
    }
    return result;
}

} // namespace codesign
