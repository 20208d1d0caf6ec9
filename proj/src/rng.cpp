#include "chartag/rng.hpp"

#include <sstream>

#include "chartag/error.hpp"

namespace chartag {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

int Rng::below(int n) {
  if (n <= 0) throw DimError("Rng::below requires a positive bound");
  return static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
}

std::string Rng::save_state() const {
  std::ostringstream os;
  os << gen_;
  return os.str();
}

void Rng::load_state(const std::string& s) {
  std::istringstream is(s);
  is >> gen_;
  if (is.fail()) throw DataError("invalid RNG state string");
}

}  // namespace chartag
