#pragma once
#include <array>
#include <cmath>
#include <cstdint>

namespace fraclab {

// Philox4x32-10 counter block cipher (Salmon et al. keyed-counter RNG).
// Pure function of (counter, key): reproducible and splittable by construction.
struct Philox4x32 {
    static std::array<uint32_t, 4> block(std::array<uint32_t, 4> x, std::array<uint32_t, 2> k) {
        constexpr uint64_t M0 = 0xD2511F53ull, M1 = 0xCD9E8D57ull;
        constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        for (int r = 0; r < 10; ++r) {
            const uint64_t p0 = M0 * x[0];
            const uint64_t p1 = M1 * x[2];
            x = {static_cast<uint32_t>(p1 >> 32) ^ x[1] ^ k[0], static_cast<uint32_t>(p1),
                 static_cast<uint32_t>(p0 >> 32) ^ x[3] ^ k[1], static_cast<uint32_t>(p0)};
            k[0] += W0;
            k[1] += W1;
        }
        return x;
    }
};

// Stream of uniforms/gaussians keyed by (master, stream). Distinct streams are
// statistically independent; identical keys reproduce the sequence bit-for-bit
// regardless of what other streams were drawn in between.
class CounterRng {
  public:
    CounterRng(uint64_t master, uint64_t stream) : master_(master), stream_(stream) {}

    uint32_t next_u32() {
        if (pos_ == 4) {
            buf_ = Philox4x32::block({static_cast<uint32_t>(counter_), static_cast<uint32_t>(counter_ >> 32),
                                      static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)},
                                     {static_cast<uint32_t>(master_), static_cast<uint32_t>(master_ >> 32)});
            ++counter_;
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    uint64_t next_u64() {
        const uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // uniform on (0, 1), 53-bit resolution, never exactly 0 or 1
    double next_unit() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    // standard normal via Box-Muller; pairs cached
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

  private:
    uint64_t master_, stream_;
    uint64_t counter_ = 0;
    std::array<uint32_t, 4> buf_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace fraclab
