#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace ttsv {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// The 128-bit counter is split into a 64-bit block index and a 64-bit
// stream id, so any (seed, stream) pair addresses an independent sequence
// without shared state.
class Philox4x32 {
public:
    using result_type = std::uint32_t;

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Raw block function, exposed for the known-answer test.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key);

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

// Stream purposes, so draws for distinct sub-tasks of one day never overlap.
enum class Purpose : std::uint8_t {
    lambda_ou = 1,
    varsigma_ou = 2,
    arrivals = 3,
    prices = 4,
    noise = 5,
    bootstrap = 6,
    misc = 7,
};

// Per-task random stream. Cheap to construct; never shared across threads.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t index, Purpose purpose = Purpose::misc);

    double uniform();  // in [0,1)
    double normal();
    std::uint64_t poisson(double mean);
    // Number of failures before the first success, success probability p.
    std::uint64_t geometric(double p);
    std::uint64_t uniform_index(std::uint64_t n);

    Philox4x32& engine() { return engine_; }

private:
    Philox4x32 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ttsv
