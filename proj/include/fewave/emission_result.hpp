#pragma once

namespace fewave {

/// Photon-number increments of the mode.
struct EmissionResult {
  double dnu1 = 0.0;  // first order: interference with the initial state
  double dnu2 = 0.0;  // second order: wavepacket-independent

  [[nodiscard]] double total() const noexcept { return dnu1 + dnu2; }
  /// Energy transferred to the mode, in units of hbar*omega.
  [[nodiscard]] double energy_per_hbar_omega() const noexcept { return total(); }
};

}  // namespace fewave
