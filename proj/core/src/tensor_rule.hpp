#pragma once

// Composite tensor Gauss-Legendre rules with phase-aware panel placement,
// shared by the oscillatory integral and the batched Poisson dual sum.

#include <cstdint>
#include <vector>

#include "near_misses/geometry.hpp"
#include "near_misses/quadrature.hpp"
#include "near_misses/surfaces.hpp"

namespace near_misses::detail {

struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

struct PhaseSpec {
  std::int64_t q = 1;
  std::int64_t j = 1;
  std::vector<std::int64_t> k_lo;  // frequency box; k_lo == k_hi for one integral
  std::vector<std::int64_t> k_hi;
};

/// Per axis, per bin: max over the box of |q (j d_i f - k_i)| in cycles per
/// unit length, maximised over the frequency range.
std::vector<std::vector<double>> phase_rate_profile(const MongeChart& chart, const Box& box,
                                                    const PhaseSpec& phase, std::size_t bins);

/// Panel edges on [lo, hi] with at most `cycles` phase cycles per panel and at
/// least `min_panels` panels.
std::vector<double> panel_edges(double lo, double hi, const std::vector<double>& bin_rate, double cycles,
                                std::size_t min_panels);

std::vector<double> bisect(const std::vector<double>& edges);

AxisRule composite_rule(const std::vector<double>& edges, const GaussLegendreRule& gl);

std::size_t bins_for_dim(std::size_t d);

inline constexpr double kCyclesPerPanel = 2.5;
inline constexpr std::size_t kMinPanels = 8;
inline constexpr std::size_t kLowOrder = 20;
inline constexpr std::size_t kHighOrder = 24;

}  // namespace near_misses::detail
