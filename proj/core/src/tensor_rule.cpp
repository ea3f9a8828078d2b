#include "tensor_rule.hpp"

#include <algorithm>
#include <cmath>

namespace near_misses::detail {

std::size_t bins_for_dim(std::size_t d) {
  if (d == 1) return 512;
  if (d == 2) return 128;
  return 24;
}

std::vector<std::vector<double>> phase_rate_profile(const MongeChart& chart, const Box& box,
                                                    const PhaseSpec& phase, std::size_t bins) {
  const std::size_t d = box.dim();
  std::vector<std::vector<double>> rate(d, std::vector<double>(bins, 0.0));
  // Samples at bin edges; each sample feeds both neighbouring bins.
  const std::size_t per = bins + 1;
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  const double qd = static_cast<double>(phase.q);
  const double jd = static_cast<double>(phase.j);
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = box.lo()[i] + (box.hi()[i] - box.lo()[i]) * static_cast<double>(idx[i]) / static_cast<double>(bins);
      // Stay strictly inside so open domains evaluate.
      x[i] = std::clamp(x[i], box.lo()[i] + 1e-12, box.hi()[i] - 1e-12);
    }
    const Eigen::VectorXd g = chart.gradient(x);
    for (std::size_t i = 0; i < d; ++i) {
      const double gi = jd * g(static_cast<Eigen::Index>(i));
      const double r = qd * std::max(std::abs(gi - static_cast<double>(phase.k_lo[i])),
                                     std::abs(gi - static_cast<double>(phase.k_hi[i])));
      if (idx[i] > 0) rate[i][idx[i] - 1] = std::max(rate[i][idx[i] - 1], r);
      if (idx[i] < bins) rate[i][idx[i]] = std::max(rate[i][idx[i]], r);
    }
    std::size_t k = 0;
    while (k < d && ++idx[k] == per) idx[k++] = 0;
    if (k == d) break;
  }
  // Widen by one bin to cover variation between samples.
  for (auto& r : rate) {
    std::vector<double> w(r);
    for (std::size_t b = 0; b < bins; ++b) {
      if (b > 0) w[b] = std::max(w[b], r[b - 1]);
      if (b + 1 < bins) w[b] = std::max(w[b], r[b + 1]);
    }
    r = std::move(w);
  }
  return rate;
}

std::vector<double> panel_edges(double lo, double hi, const std::vector<double>& bin_rate, double cycles,
                                std::size_t min_panels) {
  const std::size_t bins = bin_rate.size();
  const double width = hi - lo;
  const double bw = width / static_cast<double>(bins);
  // Cumulative cost, with a floor so that every panel is at most width/min_panels.
  const double floor_rate = cycles * static_cast<double>(min_panels) / width;
  std::vector<double> cum(bins + 1, 0.0);
  for (std::size_t b = 0; b < bins; ++b) cum[b + 1] = cum[b] + std::max(bin_rate[b], floor_rate) * bw;
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(cum[bins] / cycles)));
  std::vector<double> edges(panels + 1);
  edges[0] = lo;
  edges[panels] = hi;
  std::size_t b = 0;
  for (std::size_t p = 1; p < panels; ++p) {
    const double target = cum[bins] * static_cast<double>(p) / static_cast<double>(panels);
    while (b + 1 < bins && cum[b + 1] < target) ++b;
    const double seg = cum[b + 1] - cum[b];
    const double t = seg > 0 ? (target - cum[b]) / seg : 0.0;
    edges[p] = lo + bw * (static_cast<double>(b) + std::clamp(t, 0.0, 1.0));
  }
  return edges;
}

std::vector<double> bisect(const std::vector<double>& edges) {
  std::vector<double> out;
  out.reserve(2 * edges.size());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    out.push_back(edges[i]);
    out.push_back(0.5 * (edges[i] + edges[i + 1]));
  }
  out.push_back(edges.back());
  return out;
}

AxisRule composite_rule(const std::vector<double>& edges, const GaussLegendreRule& gl) {
  AxisRule r;
  const std::size_t m = gl.nodes.size();
  r.nodes.reserve((edges.size() - 1) * m);
  r.weights.reserve((edges.size() - 1) * m);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double c = 0.5 * (edges[p] + edges[p + 1]);
    const double h = 0.5 * (edges[p + 1] - edges[p]);
    for (std::size_t i = 0; i < m; ++i) {
      r.nodes.push_back(c + h * gl.nodes[i]);
      r.weights.push_back(h * gl.weights[i]);
    }
  }
  return r;
}

}  // namespace near_misses::detail
