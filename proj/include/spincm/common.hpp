#ifndef SPINCM_COMMON_HPP
#define SPINCM_COMMON_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spincm {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Evaluation too close to a vanishing denominator (z near a pole of the
// spectral-parameter functions, or alpha(q) in the singular set).
struct PoleProximityError : std::domain_error {
    explicit PoleProximityError(const std::string& what) : std::domain_error(what) {}
};

// Rejection sampling exhausted its retry budget.
struct SamplingError : std::runtime_error {
    explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

// Requested feature exists at the root-combinatorics level only.
struct CapabilityError : std::invalid_argument {
    explicit CapabilityError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical solve came out too ill-conditioned; caller should pick new nodes.
struct ResampleError : std::runtime_error {
    explicit ResampleError(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic splitmix64 generator.  Used everywhere instead of the std
// distributions so that a fixed seed gives identical samples on any platform,
// and so that per-sample substreams can be derived from (seed, index).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // uniform modulus in [rmin, rmax], uniform phase
    cplx annulus(double rmin, double rmax) {
        const double r = uniform(rmin, rmax);
        const double t = uniform(0.0, 2.0 * pi);
        return cplx(r * std::cos(t), r * std::sin(t));
    }

    // independent substream indexed by `index`; deterministic in (seed, index)
    Rng stream(std::uint64_t index) const {
        Rng mix(state_ ^ (0x632be59bd9b4e019ULL * (index + 1)));
        std::uint64_t s = mix.next_u64();
        return Rng(s);
    }

private:
    std::uint64_t state_;
};

}  // namespace spincm

#endif
