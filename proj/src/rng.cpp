#include "bandstat/rng.hpp"

#include <cmath>

namespace bandstat::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(philox4x32::counter_type& c,
                       const philox4x32::key_type& k) {
    std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

philox4x32::counter_type philox4x32::generate(counter_type counter,
                                              key_type key) {
    for (int r = 0; r < 9; ++r) {
        round_once(counter, key);
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    round_once(counter, key);
    return counter;
}

stream::stream(std::uint64_t master_seed, std::uint64_t stream_id)
    : key_{static_cast<std::uint32_t>(master_seed),
           static_cast<std::uint32_t>(master_seed >> 32)},
      id_lo_(static_cast<std::uint32_t>(stream_id)),
      id_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

void stream::refill() {
    philox4x32::counter_type ctr = {static_cast<std::uint32_t>(block_),
                                    static_cast<std::uint32_t>(block_ >> 32),
                                    id_lo_, id_hi_};
    buf_ = philox4x32::generate(ctr, key_);
    ++block_;
    buf_pos_ = 0;
}

std::uint64_t stream::next_u64() {
    if (buf_pos_ >= 2) refill();
    int i = 2 * buf_pos_++;
    return static_cast<std::uint64_t>(buf_[i]) |
           (static_cast<std::uint64_t>(buf_[i + 1]) << 32);
}

double stream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double stream::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_gauss_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_gauss_ = v * m;
    has_spare_ = true;
    return u * m;
}

double stream::rademacher() {
    return (next_u64() >> 63) ? 1.0 : -1.0;
}

}  // namespace bandstat::rng
