#include "dic/random.hpp"

namespace dic {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, StreamTag tag) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ static_cast<std::uint64_t>(tag) * 0xa0761d6478bd642fULL);
  return mix64(h ^ index);
}

}  // namespace dic
