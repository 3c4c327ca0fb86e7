#include "cesec/verify/oracles.h"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace cesec::verify {

double exp_integral_quadrature(int n, double x) {
  // Substitute t = 1 + s so the integral runs over [0, inf).
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [n, x](double s) {
    const double t = 1.0 + s;
    return std::exp(-x * t) / std::pow(t, n);
  };
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

McEstimate log2_one_plus_gamma_mc(double snr, double shape, std::uint64_t trials,
                                  std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::gamma_distribution<double> gamma(shape, 1.0);
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const double v = std::log2(1.0 + snr * gamma(engine));
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(trials);
  McEstimate r;
  r.mean = sum / n;
  const double var = (sum_sq - n * r.mean * r.mean) / (n - 1.0);
  r.std_error = std::sqrt(std::max(var, 0.0) / n);
  return r;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double gamma_cdf(double shape, double x) {
  return x <= 0.0 ? 0.0 : boost::math::gamma_p(shape, x);
}

namespace {

struct Partial {
  Complex sum;
  std::size_t code;  // mixed-radix phase indices
};

std::vector<Partial> enumerate(std::span<const Complex> h, int levels) {
  std::vector<Complex> roots(levels);
  for (int k = 0; k < levels; ++k) roots[k] = std::polar(1.0, -std::numbers::pi + 2.0 * std::numbers::pi * (k + 1) / levels);
  std::size_t count = 1;
  for (std::size_t i = 0; i < h.size(); ++i) count *= static_cast<std::size_t>(levels);
  std::vector<Partial> out(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t rem = c;
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < h.size(); ++i) {
      s += h[i] * roots[rem % levels];
      rem /= levels;
    }
    out[c] = {s, c};
  }
  return out;
}

// Uniform bucket grid with exact ring-expanding nearest-neighbour queries.
class BucketIndex {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit BucketIndex(const std::vector<Partial>& pts) : pts_(pts) {
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
    double xmax = -xmin, ymax = -xmin;
    for (const auto& p : pts) {
      xmin = std::min(xmin, p.sum.real());
      xmax = std::max(xmax, p.sum.real());
      ymin = std::min(ymin, p.sum.imag());
      ymax = std::max(ymax, p.sum.imag());
    }
    side_ = std::max<long>(1, static_cast<long>(std::sqrt(static_cast<double>(pts.size()))));
    x0_ = xmin;
    y0_ = ymin;
    cell_ = std::max({(xmax - xmin) / side_, (ymax - ymin) / side_, 1e-12}) * (1.0 + 1e-9);
    start_.assign(side_ * side_ + 1, 0);
    for (const auto& p : pts) ++start_[cell_of(p.sum) + 1];
    for (std::size_t i = 1; i < start_.size(); ++i) start_[i] += start_[i - 1];
    order_.resize(pts.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < pts.size(); ++i) order_[fill[cell_of(pts[i].sum)]++] = i;
  }

  // Nearest point to q among those closer than sqrt(bound). Returns the index
  // and squared distance, or npos and `bound` when no point beats the bound.
  //
  // Rings are walked outward from the cell of q', the projection of q onto
  // the bounding box. For p in the box, |q - p|^2 >= |q - q'|^2 + |q' - p|^2,
  // which gives the stopping bound for queries outside the box.
  std::pair<std::size_t, double> nearest(Complex q, double bound) const {
    const double xmax = x0_ + cell_ * static_cast<double>(side_);
    const double ymax = y0_ + cell_ * static_cast<double>(side_);
    const Complex qp{std::clamp(q.real(), x0_, xmax), std::clamp(q.imag(), y0_, ymax)};
    const double outside2 = std::norm(q - qp);
    const long qx = std::clamp(static_cast<long>(std::floor((qp.real() - x0_) / cell_)), 0L, side_ - 1);
    const long qy = std::clamp(static_cast<long>(std::floor((qp.imag() - y0_) / cell_)), 0L, side_ - 1);
    double best = bound;
    std::size_t best_i = npos;
    for (long r = 0; r <= side_; ++r) {
      const double ring_gap = static_cast<double>(r - 1) * cell_;
      if (r > 1 && outside2 + ring_gap * ring_gap > best) break;
      if (r == 0 && outside2 > best) break;
      for (long cx = qx - r; cx <= qx + r; ++cx) {
        if (cx < 0 || cx >= side_) continue;
        const bool edge_col = cx == qx - r || cx == qx + r;
        for (long cy = qy - r; cy <= qy + r; cy += edge_col ? 1 : 2 * r) {
          if (cy >= 0 && cy < side_) {
            const std::size_t cell = static_cast<std::size_t>(cx * side_ + cy);
            for (std::size_t k = start_[cell]; k < start_[cell + 1]; ++k) {
              const double d = std::norm(pts_[order_[k]].sum - q);
              if (d < best) {
                best = d;
                best_i = order_[k];
              }
            }
          }
          if (r == 0) break;
        }
      }
    }
    return {best_i, best};
  }

 private:
  std::size_t cell_of(Complex z) const {
    long cx = static_cast<long>((z.real() - x0_) / cell_);
    long cy = static_cast<long>((z.imag() - y0_) / cell_);
    cx = std::clamp(cx, 0L, side_ - 1);
    cy = std::clamp(cy, 0L, side_ - 1);
    return static_cast<std::size_t>(cx * side_ + cy);
  }

  const std::vector<Partial>& pts_;
  long side_ = 1;
  double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

std::vector<double> decode(std::size_t code, std::size_t count, int levels) {
  std::vector<double> phases;
  for (std::size_t i = 0; i < count; ++i) {
    phases.push_back(-std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(code % levels + 1) / levels);
    code /= levels;
  }
  return phases;
}

}  // namespace

PhaseGridResult phase_grid_search(Complex u, std::span<const Complex> h, int levels) {
  if (h.empty() || levels < 1) throw std::invalid_argument("phase_grid_search: bad input");
  const double root_n = std::sqrt(static_cast<double>(h.size()));
  const Complex target = u * root_n;
  const std::size_t half = h.size() / 2;

  const auto left = enumerate(h.subspan(0, half), levels);
  const auto right = enumerate(h.subspan(half), levels);
  const BucketIndex index(right);

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_left = 0, best_right = 0;
  for (const auto& a : left) {
    const auto [j, d] = index.nearest(target - a.sum, best);
    if (j != BucketIndex::npos) {
      best = d;
      best_left = a.code;
      best_right = right[j].code;
    }
  }
  PhaseGridResult r;
  r.residual = best / static_cast<double>(h.size());
  r.phases = decode(best_left, half, levels);
  const auto tail = decode(best_right, h.size() - half, levels);
  r.phases.insert(r.phases.end(), tail.begin(), tail.end());
  return r;
}

double invisibility_grid_min(std::span<const Complex> h, std::span<const double> theta,
                             int levels, double min_an_power) {
  const std::size_t n = h.size();
  std::vector<std::vector<Complex>> term(n, std::vector<Complex>(levels));
  std::vector<std::vector<double>> power(n, std::vector<double>(levels));
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < levels; ++k) {
      const double phi = -std::numbers::pi + 2.0 * std::numbers::pi * (k + 1) / levels;
      const double c = std::cos(theta[i] - phi);
      term[i][k] = h[i] * c * std::polar(1.0, phi);
      power[i][k] = 4.0 * c * c;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(n, 0);
  for (;;) {
    Complex s{0.0, 0.0};
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += term[i][idx[i]];
      p += power[i][idx[i]];
    }
    if (p >= min_an_power) best = std::min(best, std::abs(s));
    std::size_t i = 0;
    while (i < n && ++idx[i] == levels) idx[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace cesec::verify
