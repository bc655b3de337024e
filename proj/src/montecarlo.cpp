#include "magnoise/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "magnoise/constants.hpp"
#include "magnoise/errors.hpp"

namespace magnoise {

namespace detail {

void fft_pow2(std::vector<std::complex<double>>& data, int sign) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw ValidationError("fft: size must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = sign * constants::two_pi / static_cast<double>(len);
        const std::complex<double> step = std::polar(1.0, angle);
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = data[i + k];
                const auto v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= step;
            }
        }
    }
}

} // namespace detail

namespace {

using constants::pi;
using constants::two_pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// independent per-trajectory stream: counter-mixed master seed
std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ (index + 1)));
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double max_support_hz(const SpectralDensity& sbeta) {
    if (sbeta.is_tone_set()) {
        double hi = 0.0;
        for (const auto& t : sbeta.as_tone_set().tones) hi = std::max(hi, t.omega);
        return hi / two_pi;
    }
    return sbeta.support().second / two_pi;
}

struct SynthesisPlan {
    double sample_rate = 0.0;
    std::size_t n_fft = 0;
    std::size_t n_samples = 0;          // returned samples (<= n_fft)
    std::vector<double> bin_sigma;      // index k -> std of each quadrature, k*df
    std::vector<Tone> tones;
};

SynthesisPlan make_plan(const SpectralDensity& sbeta, double duration, double sample_rate,
                        std::size_t n_samples_wanted) {
    if (!(duration > 0.0)) throw ValidationError("synthesize: duration must be > 0");
    if (!(sample_rate > 0.0)) throw ValidationError("synthesize: sample rate must be > 0");
    const double f_max = max_support_hz(sbeta);
    if (!std::isfinite(f_max))
        throw ValidationError("synthesize: spectrum support must be finite");
    if (!(sample_rate > 2.0 * f_max))
        throw ValidationError("synthesize: sample rate violates Nyquist for the "
                              "spectrum's support");

    SynthesisPlan plan;
    plan.sample_rate = sample_rate;
    plan.n_samples = n_samples_wanted;
    plan.n_fft = next_pow2(std::max<std::size_t>(n_samples_wanted, 16));

    if (sbeta.is_tone_set()) {
        plan.tones = sbeta.as_tone_set().tones;
        return plan;
    }

    const double df = sample_rate / static_cast<double>(plan.n_fft);
    plan.bin_sigma.assign(plan.n_fft / 2, 0.0);
    for (std::size_t k = 1; k < plan.n_fft / 2; ++k) {
        const double w_lo = two_pi * (static_cast<double>(k) - 0.5) * df;
        const double w_hi = two_pi * (static_cast<double>(k) + 0.5) * df;
        const double var = sbeta.integrate_square(w_lo, w_hi) / pi;
        plan.bin_sigma[k] = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    return plan;
}

void synthesize_into(const SynthesisPlan& plan, std::uint64_t seed, std::uint64_t index,
                     std::vector<std::complex<double>>& work, std::vector<double>& out) {
    auto rng = trajectory_rng(seed, index);
    out.assign(plan.n_samples, 0.0);

    if (!plan.bin_sigma.empty()) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        const std::size_t n = plan.n_fft;
        work.assign(n, {0.0, 0.0});
        bool any = false;
        for (std::size_t k = 1; k < n / 2; ++k) {
            const double sigma = plan.bin_sigma[k];
            if (sigma == 0.0) continue;
            any = true;
            const double a = sigma * gauss(rng); // cosine quadrature
            const double b = sigma * gauss(rng); // sine quadrature
            work[k] = {0.5 * a, -0.5 * b};
            work[n - k] = {0.5 * a, 0.5 * b};
        }
        if (any) {
            detail::fft_pow2(work, +1);
            for (std::size_t j = 0; j < plan.n_samples; ++j) out[j] = work[j].real();
        }
    }

    if (!plan.tones.empty()) {
        std::uniform_real_distribution<double> uniform(0.0, two_pi);
        const double dt = 1.0 / plan.sample_rate;
        for (const auto& tone : plan.tones) {
            const double phase = uniform(rng);
            for (std::size_t j = 0; j < plan.n_samples; ++j)
                out[j] += tone.amplitude * std::sin(tone.omega * dt * static_cast<double>(j) + phase);
        }
    }
}

} // namespace

NoiseRealization synthesize(const SpectralDensity& sbeta, double duration,
                            double sample_rate, std::uint64_t seed,
                            std::uint64_t trajectory_index) {
    if (sbeta.kind() != DensityKind::Frequency)
        throw KindError("synthesize: spectrum kind is not frequency");
    const auto n_wanted =
        static_cast<std::size_t>(std::floor(duration * sample_rate)) + 1;
    const auto plan = make_plan(sbeta, duration, sample_rate, n_wanted);
    NoiseRealization real;
    real.sample_rate = sample_rate;
    real.master_seed = seed;
    real.trajectory_index = trajectory_index;
    std::vector<std::complex<double>> work;
    synthesize_into(plan, seed, trajectory_index, work, real.samples);
    return real;
}

McEstimate estimate_coherence(const SpectralDensity& sbeta, const PulseSequence& seq,
                              const McOptions& options, std::vector<double>* phases_out) {
    if (sbeta.kind() != DensityKind::Frequency)
        throw KindError("estimate_coherence: spectrum kind is not frequency");
    if (options.trajectories < 100)
        throw ValidationError("estimate_coherence: need at least 100 trajectories");
    if (!(options.duration_factor >= 1.0))
        throw ValidationError("estimate_coherence: duration factor must be >= 1");

    const double total_time = seq.total_time();
    double fs = options.sample_rate;
    if (fs <= 0.0) {
        const double f_max = max_support_hz(sbeta);
        if (!std::isfinite(f_max) || f_max <= 0.0)
            throw ValidationError("estimate_coherence: cannot derive a sample rate from "
                                  "the spectrum support");
        fs = 16.0 * f_max;
    }
    // align the grid so segment boundaries (the pulse centers) land on samples
    const auto n_per_seg = static_cast<std::size_t>(std::ceil(seq.tau * fs));
    if (n_per_seg < 2)
        throw ValidationError("estimate_coherence: sample rate too low for the segment "
                              "duration");
    const double dt = seq.tau / static_cast<double>(n_per_seg);
    fs = 1.0 / dt;

    const std::size_t n_total = n_per_seg * static_cast<std::size_t>(seq.segments);
    const auto plan = make_plan(sbeta, options.duration_factor * total_time, fs,
                                std::max<std::size_t>(
                                    static_cast<std::size_t>(std::ceil(
                                        options.duration_factor * total_time * fs)),
                                    n_total + 1));

    const ToggledPhaseKernel kernel(seq);
    const double dead_time = options.finite_pulse_deadtime ? seq.pi_duration : 0.0;

    const auto integrate_phase = [&](const std::vector<double>& samples) {
        double phase = 0.0;
        if (dead_time > 0.0) {
            for (std::size_t j = 0; j <= n_total; ++j) {
                const double w = (j == 0 || j == n_total) ? 0.5 : 1.0;
                const int s = kernel.sign_at(dt * static_cast<double>(j), dead_time);
                phase += w * s * samples[j];
            }
        } else {
            for (int k = 0; k < seq.segments; ++k) {
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                const std::size_t j0 = static_cast<std::size_t>(k) * n_per_seg;
                double seg = 0.5 * (samples[j0] + samples[j0 + n_per_seg]);
                for (std::size_t j = j0 + 1; j < j0 + n_per_seg; ++j) seg += samples[j];
                phase += sign * seg;
            }
        }
        return phase * dt;
    };

    const std::uint64_t n_traj = options.trajectories;
    std::vector<double> phases(n_traj);
    unsigned workers = options.workers;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, n_traj));

    const auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<std::complex<double>> work;
        std::vector<double> samples;
        for (std::uint64_t j = begin; j < end; ++j) {
            synthesize_into(plan, options.seed, j, work, samples);
            phases[j] = integrate_phase(samples);
        }
    };

    if (workers <= 1) {
        run_range(0, n_traj);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (n_traj + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t begin = static_cast<std::uint64_t>(w) * chunk;
            const std::uint64_t end = std::min(n_traj, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    // sequential reduction in trajectory order keeps results independent of
    // the worker count
    double sum_cos = 0.0, sum_phase = 0.0, sum_phase_sq = 0.0;
    for (double p : phases) {
        sum_cos += std::cos(p);
        sum_phase += p;
        sum_phase_sq += p * p;
    }
    const double n = static_cast<double>(n_traj);
    McEstimate est;
    est.trajectories = n_traj;
    est.coherence = sum_cos / n;
    est.mean_phase = sum_phase / n;
    est.mean_phase_sq = sum_phase_sq / n;
    double var = 0.0;
    for (double p : phases) {
        const double d = std::cos(p) - est.coherence;
        var += d * d;
    }
    if (n_traj > 1) var /= (n - 1.0);
    est.std_error = std::sqrt(var / n);
    if (phases_out) *phases_out = std::move(phases);
    return est;
}

} // namespace magnoise
