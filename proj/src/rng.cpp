#include "gaitsim/rng.hpp"

#include <sstream>

namespace gaitsim {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::derive(std::uint64_t a, std::uint64_t b) const {
  // hash the current engine state together with the stream ids
  std::ostringstream os;
  os << engine_;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::string s = os.str();
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return Rng(mix64(h ^ mix64(a ^ mix64(b))));
}

std::string Rng::serialize() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

Rng Rng::deserialize(const std::string& text) {
  Rng r;
  std::istringstream is(text);
  is >> r.engine_;
  return r;
}

}  // namespace gaitsim
