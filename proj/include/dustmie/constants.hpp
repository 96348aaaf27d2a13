#pragma once

namespace dustmie {

/// Physical constants used throughout the charged-dust model. Values follow
/// the simulation parameter set the model was calibrated with (e, k_e, k_B,
/// h_P); c and the electron mass are CODATA.
struct PhysicalConstants {
    static constexpr double electron_charge = 1.602e-19;   // C
    static constexpr double coulomb_constant = 9e9;        // N m^2 / C^2
    static constexpr double boltzmann = 1.38e-23;          // J / K
    static constexpr double planck_reduced = 1.0546e-34;   // J s
    static constexpr double speed_of_light = 2.998e8;      // m / s
    static constexpr double electron_mass = 9.109e-31;     // kg
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace dustmie
