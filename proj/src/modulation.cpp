#include "magnoise/modulation.hpp"

#include <cmath>

#include "magnoise/errors.hpp"

namespace magnoise {

namespace {

constexpr double kSeriesMax = 12.0;  // series/recurrence crossover
constexpr double kValidatedMax = 50.0;

// power series J_n(x) = sum_k (-1)^k (x/2)^{n+2k} / (k! (n+k)!)
double bessel_series(int n, double x) {
    const double half = 0.5 * x;
    double term = std::exp(n * std::log(half) - std::lgamma(n + 1.0));
    double sum = term;
    const double q = half * half;
    for (int k = 0; k < 400; ++k) {
        term *= -q / ((k + 1.0) * (n + k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

std::vector<double> bessel_miller(double x, int n_max) {
    const int start = std::max(n_max, static_cast<int>(std::ceil(x))) + 50;
    std::vector<double> out(n_max + 1, 0.0);
    double older = 0.0;    // J_{k+1} trial
    double current = 1e-30; // J_k trial
    double even_sum = 0.0;  // sum of trial J_n over even n >= 2
    for (int k = start; k > 0; --k) {
        const double next = (2.0 * k / x) * current - older; // J_{k-1} trial
        older = current;
        current = next;
        if (std::abs(current) > 1e250) {
            current *= 1e-250;
            older *= 1e-250;
            even_sum *= 1e-250;
            for (auto& v : out) v *= 1e-250;
        }
        const int order = k - 1;
        if (order <= n_max) out[order] = current;
        if (order >= 2 && order % 2 == 0) even_sum += current;
    }
    const double norm = current + 2.0 * even_sum; // J_0 + 2 sum J_{2k} = 1
    for (auto& v : out) v /= norm;
    return out;
}

} // namespace

double modulation_index(const ToneModulation& tone) {
    if (!(tone.omega_m > 0.0))
        throw ValidationError("modulation index: omega_m must be > 0");
    if (!(tone.carrier > 0.0))
        throw ValidationError("modulation index: carrier must be > 0");
    if (tone.fractional_amplitude < 0.0 || !std::isfinite(tone.fractional_amplitude))
        throw ValidationError("modulation index: fractional amplitude must be >= 0");
    return tone.fractional_amplitude * tone.carrier / tone.omega_m;
}

std::vector<double> sideband_strengths(double beta_m, int n_max) {
    if (!(beta_m >= 0.0))
        throw ValidationError("sideband strengths: beta_m must be >= 0");
    if (beta_m > kValidatedMax)
        throw ValidationError("sideband strengths: beta_m > 50 is outside the validated "
                              "range");
    if (n_max < 0) throw ValidationError("sideband strengths: n_max must be >= 0");

    std::vector<double> out(n_max + 1, 0.0);
    if (beta_m == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (beta_m <= kSeriesMax) {
        for (int n = 0; n <= n_max; ++n) out[n] = bessel_series(n, beta_m);
        return out;
    }
    return bessel_miller(beta_m, n_max);
}

EsrNmrComparison compare_esr_nmr(double fractional_amplitude, double omega_m,
                                 const SpinSpecies& electron, const SpinSpecies& nuclear) {
    const auto row = [&](const std::string& label, const SpinSpecies& spin) {
        const double beta =
            modulation_index({fractional_amplitude, omega_m, spin.carrier()});
        const auto j = sideband_strengths(beta, 1);
        return SidebandRow{label, beta, j[0], j[1]};
    };
    EsrNmrComparison cmp;
    cmp.esr = row("ESR", electron);
    cmp.nmr = row("NMR", nuclear);
    const double ratio = nuclear.gamma / electron.gamma;
    cmp.dephasing_ratio = ratio * ratio;
    return cmp;
}

} // namespace magnoise
