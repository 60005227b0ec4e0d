#pragma once

// Well-index relations: the classic radial-inflow coefficient with skin,
// and the equivalent corrected coefficient obtained from the truncated
// logarithmic kernel.

#include <cmath>

#include "wellfem/errors.hpp"

namespace wellfem {

struct PeacemanParams {
  double kappa = 1.0;  ///< reservoir permeability
  double mu = 1.0;     ///< viscosity
  double radius = 0.1; ///< borehole radius
  double r_e = 0.2;    ///< equivalent (external) radius
  double skin = 0.0;   ///< skin factor
};

/// Flux per unit length per unit pressure drop:
/// 2 pi kappa / (mu (ln(r_e/R) + S)).
inline double peaceman_flux_coefficient(const PeacemanParams& p) {
  if (!(p.radius > 0.0) || !(p.r_e >= p.radius))
    throw InvalidArgument("peaceman_flux_coefficient: need 0 < R <= r_e");
  const double den = std::log(p.r_e / p.radius) + p.skin;
  if (!(den > 0.0))
    throw InvalidArgument("peaceman_flux_coefficient: ln(r_e/R) + S must be positive");
  return 2.0 * M_PI * p.kappa / (p.mu * den);
}

/// The same coefficient expressed as a corrected beta: with the truncated
/// kernel the borehole average is Gbar = -(mu/2 pi kappa) ln(R/r_e), and
/// beta = 2 pi kappa / (mu S) corrected by Gbar reproduces the flux
/// coefficient. With S = 0 the skin term drops and beta is formally
/// infinite; the limit is the pure logarithm term.
inline double srb_equivalent_coefficient(const PeacemanParams& p) {
  if (!(p.radius > 0.0) || !(p.r_e >= p.radius))
    throw InvalidArgument("srb_equivalent_coefficient: need 0 < R <= r_e");
  const double gbar = -(p.mu / (2.0 * M_PI * p.kappa)) * std::log(p.radius / p.r_e);
  if (p.skin <= 0.0) {
    if (!(gbar > 0.0))
      throw InvalidArgument("srb_equivalent_coefficient: need S > 0 when r_e = R");
    // beta -> infinity limit of beta / (1 + beta Gbar).
    return 1.0 / gbar;
  }
  const double beta = 2.0 * M_PI * p.kappa / (p.mu * p.skin);
  return beta / (1.0 + beta * gbar);
}

}  // namespace wellfem
