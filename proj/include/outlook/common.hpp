#ifndef OUTLOOK_COMMON_HPP_
#define OUTLOOK_COMMON_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace outlook
{

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
using RowMatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed binary or text input; carries the byte offset where parsing stopped.
class FormatError : public Error
{
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset)
  {
  }

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class DimensionError : public Error
{
 public:
  using Error::Error;
};

/// FNV-1a, 64 bit.
constexpr std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept
{
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// splitmix64 step; used to derive independent seeds from a base seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept
{
  return mix_seed(a ^ mix_seed(b));
}

using Rng = std::mt19937_64;

/// Uniform integer in [0, n) without modulo bias; portable across standard libraries.
inline std::size_t uniform_index(Rng& rng, std::size_t n)
{
  if (n <= 1) return 0;
  const std::uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r > limit);
  return static_cast<std::size_t>(r % n);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_real(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Standard normal draw (Box-Muller, one value per call).
inline double standard_normal(Rng& rng)
{
  const double u = 1.0 - uniform_real(rng);
  const double v = uniform_real(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
}

template <typename T>
void seeded_shuffle(std::vector<T>& v, Rng& rng)
{
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

/// k distinct indices from [0, n), in ascending order.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng)
{
  if (k > n) throw Error("cannot sample " + std::to_string(k) + " of " + std::to_string(n));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + uniform_index(rng, n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace outlook

#endif  // OUTLOOK_COMMON_HPP_
