#pragma once
// Synthetic populations with step-shaped success probabilities, and biased
// scorers for exercising the post-processing.
//
// Random stream: xoshiro256** seeded by four successive SplitMix64 outputs of
// the user seed. uniform() = (next() >> 11) * 2^-53. normal() is the Marsaglia
// polar method returning only the first variate of each accepted pair. Every
// generator documents the order in which it consumes the stream so other
// implementations can reproduce datasets bit for bit.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fairgroups/core.hpp"

namespace fairgroups {

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next(); }

    std::uint64_t next() noexcept {
        const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double normal() noexcept {
        for (;;) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    // Uniform integer in [0, n) by rejection of the biased low range.
    std::uint64_t uniform_index(std::uint64_t n) noexcept {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t s_[4]{};
};

// Fisher-Yates with the portable index draw, from the back.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.uniform_index(i)]);
}

// Piecewise-constant function of L: value[g] on (breakpoints[g], breakpoints[g+1]].
// The first piece also covers breakpoints[0] and anything below it, the last
// piece anything above the final breakpoint.
class StepFunction {
public:
    StepFunction(std::vector<double> breakpoints, std::vector<double> values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
        if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size())
            throw ValidationError("step function needs G+1 breakpoints and G values");
        for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
            if (!(breakpoints_[i] > breakpoints_[i - 1]))
                throw ValidationError("step breakpoints must be strictly increasing");
        }
    }

    double operator()(double l) const noexcept {
        auto it = std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end(), l);
        auto g = static_cast<std::size_t>(it - (breakpoints_.begin() + 1));
        return values_[std::min(g, values_.size() - 1)];
    }

    std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t pieces() const noexcept { return values_.size(); }

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

// Success probability P(Y=1 | L) as a step function.
class StepSpec : public StepFunction {
public:
    StepSpec(std::vector<double> breakpoints, std::vector<double> probabilities)
        : StepFunction(std::move(breakpoints), std::move(probabilities)) {
        for (double q : values()) {
            if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("step probabilities must lie in [0,1]");
        }
    }
};

// 0.1, 0.3, 0.5, 0.7, 0.9 on (0,20], (20,30], (30,55], (55,88], (88,100].
inline StepSpec reference_step_spec() {
    return StepSpec({0.0, 20.0, 30.0, 55.0, 88.0, 100.0}, {0.1, 0.3, 0.5, 0.7, 0.9});
}

class SensitiveDistribution {
public:
    enum class Kind { Uniform, TruncatedNormal };

    static SensitiveDistribution uniform(double a, double b) {
        if (!(a < b)) throw ValidationError("uniform distribution needs a < b");
        return SensitiveDistribution(Kind::Uniform, a, b, 0.0, 0.0);
    }

    static SensitiveDistribution truncated_normal(double mean, double sd, double a, double b) {
        if (!(a < b)) throw ValidationError("truncated normal needs a < b");
        if (!(sd > 0.0)) throw ValidationError("truncated normal needs sd > 0");
        return SensitiveDistribution(Kind::TruncatedNormal, a, b, mean, sd);
    }

    Kind kind() const noexcept { return kind_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double mean() const noexcept { return mean_; }
    double sd() const noexcept { return sd_; }

    // Uniform: one uniform draw. Truncated normal: normal draws from the
    // parent distribution until one lands in [a, b].
    double sample(Rng& rng) const noexcept {
        if (kind_ == Kind::Uniform) return a_ + (b_ - a_) * rng.uniform();
        for (;;) {
            const double x = mean_ + sd_ * rng.normal();
            if (x >= a_ && x <= b_) return x;
        }
    }

    double cdf(double x) const noexcept {
        if (x <= a_) return 0.0;
        if (x >= b_) return 1.0;
        if (kind_ == Kind::Uniform) return (x - a_) / (b_ - a_);
        auto phi = [&](double v) { return 0.5 * std::erfc(-(v - mean_) / (sd_ * std::sqrt(2.0))); };
        return (phi(x) - phi(a_)) / (phi(b_) - phi(a_));
    }

private:
    SensitiveDistribution(Kind k, double a, double b, double mean, double sd)
        : kind_(k), a_(a), b_(b), mean_(mean), sd_(sd) {}

    Kind kind_;
    double a_, b_, mean_, sd_;
};

// Per sample: draw L from `dist`, then one uniform u; y = 1{u < p(L)}.
inline Dataset generate_step_dataset(const StepSpec& spec, const SensitiveDistribution& dist, std::size_t n,
                                     std::uint64_t seed) {
    if (n == 0) throw ValidationError("sample count must be at least 1");
    Rng rng(seed);
    std::vector<Sample> samples(n);
    for (auto& s : samples) {
        s.l[0] = dist.sample(rng);
        s.y = rng.uniform() < spec(s.l[0]) ? 1 : 0;
    }
    return Dataset(std::move(samples), 1);
}

struct ScorerSpec {
    StepFunction shift{{0.0, 100.0}, {0.0}};  // additive score shift as a function of L
    double noise_sd = 0.0;
    double base_negative = 0.0;  // score before shift and noise when y = 0
    double base_positive = 1.0;  // ... and when y = 1
};

// Per sample, in order: one normal draw e; score = clamp(base(y) + shift(L) +
// noise_sd * e, 0, 1); y_hat = 1{score > 0.5}. Uses l[0] of 1D or 2D data.
inline Dataset generate_biased_scores(const Dataset& data, const ScorerSpec& scorer, std::uint64_t seed) {
    if (scorer.noise_sd < 0.0) throw ValidationError("noise_sd must be non-negative");
    Rng rng(seed);
    std::vector<Sample> samples(data.samples().begin(), data.samples().end());
    for (auto& s : samples) {
        const double base = s.y == 1 ? scorer.base_positive : scorer.base_negative;
        const double e = rng.normal();
        const double score = std::clamp(base + scorer.shift(s.l[0]) + scorer.noise_sd * e, 0.0, 1.0);
        s.score = score;
        s.y_hat = score > kScoreThreshold ? 1 : 0;
    }
    return Dataset(std::move(samples), data.dimension());
}

inline Dataset generate_biased_scores(const Dataset& data, const StepFunction& shift, double noise_sd,
                                      std::uint64_t seed) {
    ScorerSpec scorer;
    scorer.shift = shift;
    scorer.noise_sd = noise_sd;
    return generate_biased_scores(data, scorer, seed);
}

// Scorer whose bias grows with L on the reference breakpoints; outcomes should be
// drawn independently of L so that any dependence of the scores on L is bias.
inline ScorerSpec planted_bias_scorer() {
    ScorerSpec s;
    s.shift = StepFunction({0.0, 20.0, 30.0, 55.0, 88.0, 100.0}, {-0.2, -0.1, 0.0, 0.1, 0.2});
    s.noise_sd = 0.15;
    s.base_negative = 0.3;
    s.base_positive = 0.7;
    return s;
}

}  // namespace fairgroups
