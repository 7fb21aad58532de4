#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fedce {

// splitmix64 finalizer, used to derive independent per-client seeds.
uint64_t splitmix64(uint64_t x);

// Seeded generator with hand-rolled uniform/normal draws. mt19937_64 output
// is fully specified by the standard; the std distributions are not, and the
// generated federations must be bit-stable.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // uniform in [0,1), 53-bit mantissa
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller, spare value cached
  double normal();

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  int bit() { return static_cast<int>(next_u64() >> 63); }

  // uniform index in [0, n)
  size_t index(size_t n) { return static_cast<size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Fisher-Yates with the deterministic generator above.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = rng.index(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace fedce
