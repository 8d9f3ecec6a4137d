#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bandstat/matrix.hpp"
#include "bandstat/rng.hpp"

namespace bandstat {

// Periodic distance d_n(j,k) = min(|j-k|, n-|j-k|) on 1-based indices.
std::size_t circ_distance(std::size_t j, std::size_t k, std::size_t n);

enum class DistKind { gaussian, uniform, rademacher };

std::string to_string(DistKind kind);

// Entry law for the band.  Off-diagonal entries always have mean 0 and
// variance 1; the kind fixes the fourth moment mu4 and its cumulant
// kappa4 = mu4 - 3.  Diagonal entries carry variance sigma2.
struct EntryDistribution {
    DistKind kind = DistKind::gaussian;
    double sigma2 = 1.0;
    double mu4 = 3.0;
    double kappa4 = 0.0;

    static EntryDistribution make(DistKind kind, double sigma2 = 1.0);
    // Accepts "gaussian", "uniform", "rademacher".
    static EntryDistribution parse(const std::string& name, double sigma2 = 1.0);
};

// Parameters of one band-matrix draw: m_jk = w_jk / sqrt(b) when
// d_n(j,k) <= b, 0 otherwise.
struct MatrixSpec {
    std::size_t n = 0;
    std::size_t b = 0;
    EntryDistribution dist;
    std::uint64_t seed = 0;

    // Enforces n >= 2 and 1 <= b <= floor((n-1)/2), so the 2b+1 wide band
    // never self-overlaps around the circle.
    void validate() const;
};

// Index sets of the band: I_n = {(j,k) : d_n(j,k) <= b}, its upper
// representatives I_n^+ = {(j,k) in I_n : j <= k}, and the first row
// I_1 = {1 < j <= n : (1,j) in I_n}.  All indices 1-based.
struct BandIndexSet {
    std::size_t n = 0;
    std::size_t b = 0;

    BandIndexSet(std::size_t n_, std::size_t b_);

    bool in_band(std::size_t j, std::size_t k) const;   // (j,k) in I_n
    bool in_upper(std::size_t j, std::size_t k) const;  // (j,k) in I_n^+
    bool in_row1(std::size_t j) const;                  // j in I_1

    // The 2b members of I_1 in increasing order.
    std::vector<std::size_t> row1_indices() const;
};

// Draws one symmetric band matrix; entries over I_n^+ are independent and
// consumed from the stream in row-major order, so equal (spec, stream
// state) gives bit-identical matrices.
Matrix sample_matrix(const MatrixSpec& spec, rng::stream& stream);

// Wigner semicircle density sqrt(8 - x^2) / (4 pi) on [-2 sqrt 2, 2 sqrt 2].
double semicircle_density(double x);

}  // namespace bandstat
