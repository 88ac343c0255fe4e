#pragma once

#include <stdexcept>
#include <string>
#include <variant>

namespace fewave {

struct Vacuum {};

/// Definite photon number; phaseless, so no first-order interference.
struct Fock {
  long nu0 = 0;
};

/// Glauber state with real amplitude sqrt(nu0); the radiation phase lives in phi0.
struct Coherent {
  double nu0 = 0.0;
};

using PhotonFieldState = std::variant<Vacuum, Fock, Coherent>;

[[nodiscard]] inline double mean_photon_number(const PhotonFieldState& state) {
  struct {
    double operator()(const Vacuum&) const { return 0.0; }
    double operator()(const Fock& f) const { return static_cast<double>(f.nu0); }
    double operator()(const Coherent& c) const { return c.nu0; }
  } visitor;
  return std::visit(visitor, state);
}

[[nodiscard]] inline bool is_coherent(const PhotonFieldState& state) noexcept {
  return std::holds_alternative<Coherent>(state);
}

[[nodiscard]] inline std::string describe(const PhotonFieldState& state) {
  struct {
    std::string operator()(const Vacuum&) const { return "vacuum"; }
    std::string operator()(const Fock&) const { return "fock"; }
    std::string operator()(const Coherent&) const { return "coherent"; }
  } visitor;
  return std::visit(visitor, state);
}

inline void validate(const PhotonFieldState& state) {
  if (const auto* f = std::get_if<Fock>(&state); f && f->nu0 < 0)
    throw std::invalid_argument("photon_state.nu0: Fock photon number must be >= 0");
  if (const auto* c = std::get_if<Coherent>(&state); c && !(c->nu0 >= 0.0))
    throw std::invalid_argument("photon_state.nu0: coherent mean photon number must be >= 0");
}

}  // namespace fewave
