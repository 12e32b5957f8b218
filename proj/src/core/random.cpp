#include "core/random.hpp"

namespace uwbsim {

namespace {

// splitmix64; decorrelates the per-stream seeds derived from the run seed.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64& RandomStreams::engine(std::uint32_t node, StreamPurpose purpose) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(node) << 32) | static_cast<std::uint32_t>(purpose);
    auto it = streams_.find(key);
    if (it == streams_.end()) {
        const std::uint64_t stream_seed = mix64(mix64(seed_) ^ mix64(key));
        it = streams_.emplace(key, std::mt19937_64(stream_seed)).first;
    }
    return it->second;
}

double RandomStreams::uniform(std::uint32_t node, StreamPurpose purpose) {
    return to_unit_interval(engine(node, purpose)());
}

}  // namespace uwbsim
