#include <algorithm>
#include <cmath>
#include <numeric>

#include "probeflow/errors.hpp"
#include "probeflow/probes.hpp"

namespace probeflow {

namespace {

std::uint64_t name_hash(const std::string& name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Maps a unit-interval position onto the parameter's range and scale.
double map_to_range(const ParamSpec& p, double t) {
    if (p.scale == RangeScale::log) {
        const double lo = std::log(p.low);
        const double hi = std::log(p.high);
        return std::exp(lo + t * (hi - lo));
    }
    return p.low + t * (p.high - p.low);
}

HyperValue ranged_value(const ParamSpec& p, double t) {
    if (p.kind == ParamKind::float_range) {
        return std::clamp(map_to_range(p, t), p.low, p.high);
    }
    double x;
    if (p.scale == RangeScale::log) {
        x = std::round(map_to_range(p, t));
    } else {
        // Cells over [low, high + 1) give every integer equal width.
        x = std::floor(p.low + t * (p.high - p.low + 1.0));
    }
    return static_cast<std::int64_t>(std::clamp(x, p.low, p.high));
}

}  // namespace

std::vector<ProbeConfig> sample_configs(const ModelSearchSpace& space, std::size_t k, std::uint64_t seed) {
    if (k == 0) throw ValidationError("sample_configs: k must be >= 1");
    std::vector<ProbeConfig> configs(k);
    for (auto& c : configs) c.model_kind = space.model_kind;

    for (const ParamSpec& p : space.params) {
        // One stream per dimension keeps dimensions independent of each other.
        Rng rng(mix64(seed ^ name_hash(p.name)));
        std::vector<std::size_t> cells(k);
        if (p.kind == ParamKind::categorical) {
            if (p.choices.empty()) throw ValidationError("categorical parameter \"" + p.name + "\" has no options");
            for (std::size_t i = 0; i < k; ++i) cells[i] = i % p.choices.size();
            rng.shuffle(std::span<std::size_t>(cells));
            for (std::size_t i = 0; i < k; ++i) configs[i].params[p.name] = p.choices[cells[i]];
            continue;
        }
        std::iota(cells.begin(), cells.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(cells));
        for (std::size_t i = 0; i < k; ++i) {
            const double t = (static_cast<double>(cells[i]) + rng.uniform01()) / static_cast<double>(k);
            configs[i].params[p.name] = ranged_value(p, t);
        }
    }
    return configs;
}

}  // namespace probeflow
