#include "bandstat/ensemble.hpp"

#include <cmath>

#include "bandstat/errors.hpp"

namespace bandstat {

std::size_t circ_distance(std::size_t j, std::size_t k, std::size_t n) {
    if (j < 1 || j > n || k < 1 || k > n)
        throw argument_error("circ_distance: index out of [1, n]");
    std::size_t d = j > k ? j - k : k - j;
    return std::min(d, n - d);
}

std::string to_string(DistKind kind) {
    switch (kind) {
        case DistKind::gaussian: return "gaussian";
        case DistKind::uniform: return "uniform";
        case DistKind::rademacher: return "rademacher";
    }
    throw argument_error("to_string: unknown distribution kind");
}

EntryDistribution EntryDistribution::make(DistKind kind, double sigma2) {
    if (!(sigma2 >= 0.0))
        throw argument_error("EntryDistribution: sigma2 must be nonnegative");
    EntryDistribution d;
    d.kind = kind;
    d.sigma2 = sigma2;
    switch (kind) {
        case DistKind::gaussian: d.mu4 = 3.0; break;
        case DistKind::uniform: d.mu4 = 9.0 / 5.0; break;
        case DistKind::rademacher: d.mu4 = 1.0; break;
    }
    d.kappa4 = d.mu4 - 3.0;
    return d;
}

EntryDistribution EntryDistribution::parse(const std::string& name, double sigma2) {
    if (name == "gaussian") return make(DistKind::gaussian, sigma2);
    if (name == "uniform") return make(DistKind::uniform, sigma2);
    if (name == "rademacher") return make(DistKind::rademacher, sigma2);
    throw argument_error("EntryDistribution: unknown kind '" + name + "'");
}

void MatrixSpec::validate() const {
    if (n < 2) throw argument_error("MatrixSpec: n must be at least 2");
    if (b < 1) throw argument_error("MatrixSpec: b must be at least 1");
    if (2 * b + 1 > n)
        throw argument_error("MatrixSpec: need 2b+1 <= n (b <= floor((n-1)/2))");
    if (!(dist.sigma2 >= 0.0))
        throw argument_error("MatrixSpec: sigma2 must be nonnegative");
}

BandIndexSet::BandIndexSet(std::size_t n_, std::size_t b_) : n(n_), b(b_) {
    if (n < 2) throw argument_error("BandIndexSet: n must be at least 2");
    if (b < 1 || 2 * b + 1 > n)
        throw argument_error("BandIndexSet: need 1 <= b <= floor((n-1)/2)");
}

bool BandIndexSet::in_band(std::size_t j, std::size_t k) const {
    return circ_distance(j, k, n) <= b;
}

bool BandIndexSet::in_upper(std::size_t j, std::size_t k) const {
    return j <= k && in_band(j, k);
}

bool BandIndexSet::in_row1(std::size_t j) const {
    return j > 1 && j <= n && in_band(1, j);
}

std::vector<std::size_t> BandIndexSet::row1_indices() const {
    std::vector<std::size_t> idx;
    idx.reserve(2 * b);
    for (std::size_t j = 2; j <= n; ++j)
        if (in_band(1, j)) idx.push_back(j);
    return idx;
}

namespace {

// One unit-variance draw of the requested kind.
double draw_unit(DistKind kind, rng::stream& stream) {
    switch (kind) {
        case DistKind::gaussian:
            return stream.gaussian();
        case DistKind::uniform:
            // Uniform on [-sqrt 3, sqrt 3] has variance 1.
            return std::sqrt(3.0) * (2.0 * stream.uniform01() - 1.0);
        case DistKind::rademacher:
            return stream.rademacher();
    }
    throw argument_error("draw_unit: unknown distribution kind");
}

}  // namespace

Matrix sample_matrix(const MatrixSpec& spec, rng::stream& stream) {
    spec.validate();
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.b));
    const double diag_scale = std::sqrt(spec.dist.sigma2);
    Matrix m(spec.n);
    for (std::size_t j = 1; j <= spec.n; ++j) {
        for (std::size_t k = j; k <= spec.n; ++k) {
            if (circ_distance(j, k, spec.n) > spec.b) continue;
            double w = draw_unit(spec.dist.kind, stream);
            if (j == k) w *= diag_scale;
            m(j - 1, k - 1) = m(k - 1, j - 1) = w * scale;
        }
    }
    return m;
}

double semicircle_density(double x) {
    const double r2 = 8.0 - x * x;
    if (r2 <= 0.0) return 0.0;
    return std::sqrt(r2) / (4.0 * M_PI);
}

}  // namespace bandstat
