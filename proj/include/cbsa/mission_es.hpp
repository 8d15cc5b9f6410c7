#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cbsa/errors.hpp"
#include "cbsa/plant.hpp"
#include "cbsa/simplex.hpp"
#include "cbsa/value.hpp"

namespace cbsa {

// ============================================================================
// Mission planning for the energy-safety case study: target sequencing,
// recharge controller, forward-energy accounting and the battery switching
// condition.
// ============================================================================

/// Constants of the switching condition
///   B <= E_MP + E_180 + BE_MP + (1 + eps_BE) * FE.
/// E_MP bounds one mission-planning period of arbitrary control, E_180 the
/// in-place half turn, BE_MP the backtrack cost of one period; BE_MP = E_MP.
struct EnergyConstants {
    double e_mp = 2.032;
    double e_180 = 1.524;
    double be_mp = 2.032;
    double eps_be = 0.0;

    /// Reject configurations that under-approximate the physical worst case.
    void validate(const PlantParams &p, double mp_period_seconds, double nav_period_seconds) const {
        if (e_mp < 0 || e_180 < 0 || be_mp < 0 || eps_be < 0)
            throw ValidationError("energy constants must be non-negative");
        if (std::abs(be_mp - e_mp) > 1e-9)
            throw ValidationError("BE_MP must equal E_MP");
        const double e_mp_derived = derived_period_energy(p, mp_period_seconds);
        if (e_mp + 1e-9 < e_mp_derived)
            throw ValidationError("E_MP below the derived one-period worst case (" +
                                  std::to_string(e_mp_derived) + ")");
        const double e_180_derived = derived_turn_energy(p, nav_period_seconds);
        if (e_180 + 1e-9 < e_180_derived)
            throw ValidationError("E_180 below the derived turn energy (" +
                                  std::to_string(e_180_derived) + ")");
    }
};

/// (1 + eps_BE) * FE: bound on the energy needed to backtrack the forward
/// path that consumed FE.
inline double backtrack_energy_bound(double forward_energy, double eps_be) {
    return (1.0 + eps_be) * forward_energy;
}

/// The battery switching condition; true means switch to (or stay on) the
/// recharge controller.
inline bool mp_dm_switch(double battery, double forward_energy, const EnergyConstants &k) {
    return battery <= k.e_mp + k.e_180 + k.be_mp + backtrack_energy_bound(forward_energy, k.eps_be);
}

/// Energy required to reach the last-visited station from here: the turn is
/// still ahead under the advanced controller, already spent (or in progress)
/// under the baseline.
inline double es_energy_requirement(Ctlr ctlr, double backtrack_estimate, double e_180) {
    return ctlr == Ctlr::AC ? e_180 + backtrack_estimate : backtrack_estimate;
}

/// Mission-planning state for the energy-safety mission.
struct MissionState {
    std::vector<Vec2> targets;      ///< configured visit sequence
    std::size_t next_index = 0;
    Vec2 target;                    ///< current output T
    Ctlr ctlr = Ctlr::AC;
    Vec2 last_station;              ///< last-visited power station
    double forward_energy = 0.0;    ///< FE since the station was visited
    bool mission_done = false;
    bool target_reached_event = false;  ///< set when the current step advanced the target
};

/// Advance the target when the rover has arrived at the current one.
inline MissionState choose_next_target(MissionState ms, Vec2 position, double arrival_radius) {
    ms.target_reached_event = false;
    if (ms.mission_done || ms.next_index >= ms.targets.size()) {
        ms.mission_done = true;
        return ms;
    }
    ms.target = ms.targets[ms.next_index];
    if (distance(position, ms.target) <= arrival_radius) {
        ms.target_reached_event = true;
        ++ms.next_index;
        if (ms.next_index >= ms.targets.size()) {
            ms.mission_done = true;  // T keeps its last value
        } else {
            ms.target = ms.targets[ms.next_index];
        }
    }
    return ms;
}

/// The recharge controller: steer for the last-visited power station.
inline MissionState recharge_controller(MissionState ms) {
    ms.target = ms.last_station;
    return ms;
}

/// Accumulate forward energy at plant granularity; only meaningful while the
/// advanced controller is active.
inline MissionState forward_energy_accumulate(MissionState ms, double consumed) {
    ms.forward_energy += consumed;
    return ms;
}

inline MissionState reset_forward_energy(MissionState ms, Vec2 station) {
    ms.forward_energy = 0.0;
    ms.last_station = station;
    return ms;
}

} // namespace cbsa
