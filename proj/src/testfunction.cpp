#include "bandstat/testfunction.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <vector>

#include "bandstat/chebyshev.hpp"
#include "bandstat/errors.hpp"

namespace bandstat {

namespace {

std::atomic<long> clip_counter{0};
std::atomic<bool> clip_logged{false};

double semicircle16_eval(double x) {
    if (std::abs(x) > 4.0) {
        clip_counter.fetch_add(1, std::memory_order_relaxed);
        if (!clip_logged.exchange(true)) {
            std::fprintf(stderr,
                         "note: semicircle16 evaluated outside [-4,4] "
                         "(x=%.6g); clipping to 0\n",
                         x);
        }
        return 0.0;
    }
    return std::sqrt(16.0 - x * x);
}

std::vector<double> parse_double_list(const std::string& spec,
                                      const std::string& id) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t comma = spec.find(',', pos);
        std::string tok = spec.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw argument_error("test function '" + id +
                                 "': cannot parse number '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

TestFunction::TestFunction(std::string id, bool real,
                           std::function<std::complex<double>(double)> f)
    : id_(std::move(id)), real_(real), eval_(std::move(f)) {}

long TestFunction::clip_count() {
    return clip_counter.load(std::memory_order_relaxed);
}

double TestFunction::real_at(double x) const {
    if (!real_)
        throw state_error("test function '" + id_ +
                          "' is complex-valued; no real evaluation");
    return eval_(x).real();
}

TestFunction TestFunction::parse(const std::string& id) {
    if (id == "identity")
        return TestFunction(id, true, [](double x) {
            return std::complex<double>(x, 0.0);
        });
    if (id == "gauss")
        return TestFunction(id, true, [](double x) {
            return std::complex<double>(std::exp(-x * x), 0.0);
        });
    if (id == "semicircle16")
        return TestFunction(id, true, [](double x) {
            return std::complex<double>(semicircle16_eval(x), 0.0);
        });
    if (id.rfind("poly:", 0) == 0) {
        auto coeffs = parse_double_list(id.substr(5), id);
        if (coeffs.empty())
            throw argument_error("test function '" + id +
                                 "': empty coefficient list");
        return TestFunction(id, true, [coeffs](double x) {
            double acc = 0.0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
                acc = acc * x + *it;
            return std::complex<double>(acc, 0.0);
        });
    }
    if (id.rfind("chebU:", 0) == 0) {
        int k = 0;
        try {
            std::size_t used = 0;
            k = std::stoi(id.substr(6), &used);
            if (used != id.size() - 6) throw std::invalid_argument(id);
        } catch (const std::exception&) {
            throw argument_error("test function '" + id +
                                 "': cannot parse degree");
        }
        if (k < 0)
            throw argument_error("test function '" + id +
                                 "': degree must be nonnegative");
        return TestFunction(id, true, [k](double x) {
            return std::complex<double>(chebyshev::u_poly(k, x), 0.0);
        });
    }
    if (id.rfind("resolvent:", 0) == 0) {
        auto parts = parse_double_list(id.substr(10), id);
        if (parts.size() != 2)
            throw argument_error("test function '" + id +
                                 "': expected 'resolvent:mu,eta'");
        double mu = parts[0], eta = parts[1];
        if (eta == 0.0)
            throw argument_error("test function '" + id +
                                 "': eta must be nonzero");
        std::complex<double> pole(mu, eta);
        return TestFunction(id, false, [pole](double x) {
            return 1.0 / (std::complex<double>(x, 0.0) - pole);
        });
    }
    throw argument_error("unknown test function '" + id + "'");
}

}  // namespace bandstat
