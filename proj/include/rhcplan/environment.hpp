#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "rhcplan/dts.hpp"

namespace rhcplan {

/// Deterministic uniform double in [lo, hi) from raw mt19937 draws. The
/// standard distributions are implementation-defined, which would break
/// byte-identical logs across platforms.
inline double uniform_real(std::mt19937& rng, double lo, double hi) {
    return lo + (hi - lo) * (rng() * (1.0 / 4294967296.0));
}

inline std::uint32_t uniform_int(std::mt19937& rng, std::uint32_t n) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(rng()) * n) >> 32);
}

struct ObstacleScript {
    enum class Mode { None, Static, Scripted, RandomWalk };
    Mode mode = Mode::None;
    std::vector<std::uint32_t> cells;                            // Static / RandomWalk spawn
    std::vector<std::pair<int, std::vector<std::uint32_t>>> steps; // Scripted: (from step k, cells)
    std::uint32_t count = 0;                                     // RandomWalk
    std::uint32_t seed = 0;
};

struct ToggleRule {
    std::uint32_t atom = 0;
    int off_from = 0; // inclusive step range with the atom removed everywhere
    int off_to = -1;
};

struct RewardModel {
    double low = 0.0;
    double high = 1.0;
    std::uint32_t seed = 0;
};

/// Ground truth of the world at the current step: true labels, obstacle
/// positions, and the freshly sampled reward field. Advances one step at a
/// time; all randomness is seeded, so replays are bit-identical.
class EnvironmentTruth {
public:
    EnvironmentTruth(const Dts& dts, std::vector<LabelMask> base_labels,
                     std::uint32_t obstacle_atom, ObstacleScript obstacles,
                     std::vector<ToggleRule> toggles, RewardModel rewards)
        : num_states_(dts.num_states()),
          base_labels_(std::move(base_labels)),
          obstacle_atom_(obstacle_atom),
          script_(std::move(obstacles)),
          toggles_(std::move(toggles)),
          reward_model_(rewards),
          reward_rng_(rewards.seed),
          walk_rng_(script_.seed) {
        if (base_labels_.size() != num_states_)
            throw std::invalid_argument("base label table size mismatch");
        rewards_.assign(num_states_, 0.0);
        if (script_.mode == ObstacleScript::Mode::Static ||
            script_.mode == ObstacleScript::Mode::RandomWalk)
            obstacles_ = script_.cells;
        apply_scripted(0);
        sample_rewards();
        step_ = 0;
    }

    int step() const { return step_; }
    const std::vector<std::uint32_t>& obstacles() const { return obstacles_; }

    double reward(std::uint32_t q) const { return rewards_.at(q); }

    LabelMask true_label(std::uint32_t q) const {
        LabelMask l = base_labels_[q];
        for (const auto& t : toggles_)
            if (step_ >= t.off_from && step_ <= t.off_to)
                l &= ~(LabelMask{1} << t.atom);
        for (auto c : obstacles_)
            if (c == q) l |= LabelMask{1} << obstacle_atom_;
        return l;
    }

    /// Advances the world to step k (must be step()+1): resamples rewards,
    /// moves obstacles, and applies label toggles. Obstacles never move onto
    /// `blocked` cells (the agent's position and its committed plan).
    void advance(int k, const std::vector<std::uint8_t>& blocked) {
        if (k != step_ + 1)
            throw std::logic_error("environment must advance one step at a time");
        step_ = k;
        if (script_.mode == ObstacleScript::Mode::Scripted) {
            apply_scripted(k);
        } else if (script_.mode == ObstacleScript::Mode::RandomWalk) {
            walk_obstacles(blocked);
        }
        sample_rewards();
    }

private:
    void apply_scripted(int k) {
        if (script_.mode != ObstacleScript::Mode::Scripted) return;
        for (const auto& [from, cells] : script_.steps)
            if (k >= from) obstacles_ = cells;
    }

    void walk_obstacles(const std::vector<std::uint8_t>& blocked) {
        std::vector<std::uint8_t> occupied(num_states_, 0);
        for (auto c : obstacles_) occupied[c] = 1;
        for (auto& c : obstacles_) {
            // stay / N / S / E / W
            std::uint32_t dir = uniform_int(walk_rng_, 5);
            if (dir == 0) continue;
            std::int64_t nx = static_cast<std::int64_t>(c % grid_w_) + (dir == 3) - (dir == 4);
            std::int64_t ny = static_cast<std::int64_t>(c / grid_w_) + (dir == 1) - (dir == 2);
            if (nx < 0 || ny < 0 || nx >= grid_w_ || ny >= grid_h_) continue;
            std::uint32_t target = static_cast<std::uint32_t>(ny * grid_w_ + nx);
            if (occupied[target]) continue;
            if (target < blocked.size() && blocked[target]) continue;
            if (forbidden_.size() > target && forbidden_[target]) continue;
            occupied[c] = 0;
            occupied[target] = 1;
            c = target;
        }
    }

    void sample_rewards() {
        for (std::uint32_t q = 0; q < num_states_; ++q)
            rewards_[q] = uniform_real(reward_rng_, reward_model_.low, reward_model_.high);
    }

public:
    /// Cells random-walk obstacles must never occupy (stations, typically).
    void set_forbidden(std::vector<std::uint8_t> cells) { forbidden_ = std::move(cells); }
    void set_grid(std::uint32_t w, std::uint32_t h) {
        grid_w_ = w;
        grid_h_ = h;
    }

private:
    std::uint32_t num_states_;
    std::vector<LabelMask> base_labels_;
    std::uint32_t obstacle_atom_;
    ObstacleScript script_;
    std::vector<ToggleRule> toggles_;
    RewardModel reward_model_;
    std::mt19937 reward_rng_;
    std::mt19937 walk_rng_;
    std::vector<double> rewards_;
    std::vector<std::uint32_t> obstacles_;
    std::vector<std::uint8_t> forbidden_;
    std::uint32_t grid_w_ = 0, grid_h_ = 0;
    int step_ = 0;
};

/// Operation surface for advancing the world by one step: resample rewards,
/// move obstacles (honoring the blocked set), apply label toggles.
inline void step_environment(EnvironmentTruth& env, int k,
                             const std::vector<std::uint8_t>& blocked) {
    env.advance(k, blocked);
}

/// Rewards visible from q: exactly the states within Chebyshev distance
/// `radius`. Cells outside the window stay unobserved (and count as zero
/// reward during planning).
struct RewardWindow {
    std::vector<double> value;
    std::vector<std::uint8_t> observed;

    double planning_reward(std::uint32_t q) const {
        return observed[q] ? value[q] : 0.0;
    }
};

inline RewardWindow observe_rewards(const EnvironmentTruth& env, const Dts& d,
                                    std::uint32_t q, int radius) {
    if (radius < 0) throw std::invalid_argument("sensing radius must be nonnegative");
    RewardWindow w;
    w.value.assign(d.num_states(), 0.0);
    w.observed.assign(d.num_states(), 0);
    for (std::uint32_t s = 0; s < d.num_states(); ++s) {
        if (chebyshev(d, q, s) <= radius) {
            w.value[s] = env.reward(s);
            w.observed[s] = 1;
        }
    }
    return w;
}

} // namespace rhcplan
