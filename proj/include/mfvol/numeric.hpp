#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace mfvol {

// Neumaier-compensated sum.
inline double stable_sum(std::span<const double> xs) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

inline double mean(std::span<const double> xs) {
  return xs.empty() ? 0.0 : stable_sum(xs) / static_cast<double>(xs.size());
}

inline double root_mean_square(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += x * x;
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

// Population (1/n) standard deviation about the sample mean.
inline double population_stddev(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a) {
  return mix_seed(mix_seed(master) ^ (a + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b) {
  return derive_seed(derive_seed(master, a), b);
}

}  // namespace mfvol
