#pragma once

#include <array>
#include <cstdint>

namespace bandstat::rng {

// Philox 4x32-10 counter-based generator (Salmon-Moraes-Dror-Shaw
// constants).  Pure function of (counter, key), so any sample index can be
// generated independently of scheduling.
struct philox4x32 {
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static counter_type generate(counter_type counter, key_type key);
};

// One logical draw sequence per (master_seed, stream_id).  The key carries
// the master seed, counter words 2..3 carry the stream id, and words 0..1
// advance as 64-bit block index, so distinct streams never overlap.
class stream {
public:
    stream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    // Uniform on [0, 1) with 53 random bits.
    double uniform01();
    // Standard normal via Marsaglia polar pairs (second value cached).
    double gaussian();
    // +1 or -1 with equal probability.
    double rademacher();

private:
    void refill();

    philox4x32::key_type key_;
    std::uint32_t id_lo_, id_hi_;
    std::uint64_t block_ = 0;
    philox4x32::counter_type buf_{};
    int buf_pos_ = 2;  // u64 pairs consumed from buf_ (0, 1, or 2 = empty)
    double spare_gauss_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace bandstat::rng
