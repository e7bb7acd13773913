#pragma once

#include <complex>
#include <cstdint>

#include "ncgpi1/matrix.hpp"

namespace ncg {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic per-trial generator: the stream depends only on
/// (seed, trial index), so fuzz trials reproduce independently of
/// scheduling or trial order.
class TrialRng {
  public:
    TrialRng(std::uint64_t seed, std::uint64_t trial) {
        state_ = seed ^ 0x8e6bd52d2e3fd142ULL;
        splitmix64(state_);
        state_ ^= trial * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0,1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1,1].
    double next_sym() { return 2.0 * next_unit() - 1.0; }

    /// Uniform integer in [lo, hi] inclusive.
    long next_int(long lo, long hi) {
        return lo + static_cast<long>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    std::complex<double> next_complex() { return {next_sym(), next_sym()}; }

    CMatrix next_cmatrix(std::size_t rows, std::size_t cols) {
        CMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = next_complex();
        return m;
    }

  private:
    std::uint64_t state_;
};

} // namespace ncg
