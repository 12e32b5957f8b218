#pragma once

#include <cstdint>
#include <random>
#include <unordered_map>

namespace uwbsim {

// One independent stream per (node, purpose), all derived from the run seed.
// Keeping streams separate means one node's draw count never perturbs another
// node's sequence, so adding a node leaves unrelated results untouched.
enum class StreamPurpose : std::uint32_t {
    PhyBitError = 1,
    MacForcedLoss = 2,
    Sensing = 3,
    Generic = 4,
};

class RandomStreams {
public:
    explicit RandomStreams(std::uint64_t seed) : seed_(seed) {}

    std::mt19937_64& engine(std::uint32_t node, StreamPurpose purpose);

    /// Next value of the stream, uniform in [0, 1). Implemented from the raw
    /// 64-bit output so the sequence is identical on every platform
    /// (std::uniform_real_distribution is not portable across libraries).
    double uniform(std::uint32_t node, StreamPurpose purpose);

    static double to_unit_interval(std::uint64_t raw) {
        return static_cast<double>(raw >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t seed_;
    std::unordered_map<std::uint64_t, std::mt19937_64> streams_;
};

}  // namespace uwbsim
