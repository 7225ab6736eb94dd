#pragma once

#include <cstdint>

#include "cofflow/image.hpp"

namespace cofflow::synthetic {

/// Gaussian blob exp(-r^2 / 2 sigma^2) centered at (cx, cy), peak `amplitude`.
GrayImage gaussian_blob(Size size, double cx, double cy, double sigma, double amplitude = 1.0);

/// Smooth random texture: sum of `bumps` Gaussian bumps with random centers,
/// widths in [min_sigma, max_sigma] and amplitudes, rescaled into [0.05, 0.95].
/// `dx`, `dy` translate the whole pattern.
GrayImage smooth_texture(Size size, std::uint64_t seed, double dx = 0.0, double dy = 0.0,
                         int bumps = 24, double min_sigma = 4.0, double max_sigma = 10.0);

}  // namespace cofflow::synthetic
