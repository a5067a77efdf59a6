#include "nldiff/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "nldiff/rng.hpp"

namespace nldiff {

namespace {

// Product-form Poisson sampling for small intensity; larger intensities
// split in halves (sums of independent Poissons are Poisson).
std::uint32_t sample_poisson(SplitMix64& g, double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda > 30.0) return sample_poisson(g, 0.5 * lambda) + sample_poisson(g, 0.5 * lambda);
    const double floor_p = std::exp(-lambda);
    std::uint32_t k = 0;
    double prod = g.next_double();
    while (prod > floor_p) {
        ++k;
        prod *= g.next_double();
    }
    return k;
}

std::size_t sample_cdf(const std::vector<double>& cdf, double u) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return static_cast<std::size_t>(it - cdf.begin());
}

struct WorkerTally {
    std::vector<std::uint64_t> counts;
    std::uint64_t absorbed = 0;
    std::uint64_t total_jumps = 0;
};

}  // namespace

unsigned default_worker_count() {
    unsigned w = std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("NLDIFF_THREADS")) {
        const long v = std::strtol(cap, nullptr, 10);
        if (v >= 1) w = std::min<unsigned>(w, static_cast<unsigned>(v));
    }
    return w;
}

McDensity simulate(const Field& u0_density, const Kernel& k, const McConfig& cfg) {
    if (cfg.particles < 1) throw std::invalid_argument("mc: need at least one particle");
    if (!(cfg.t_final >= 0.0)) throw std::invalid_argument("mc: t_final must be nonnegative");
    const auto& g = *u0_density.geom;
    if (k.h() != g.h()) throw std::invalid_argument("mc: kernel/geometry spacing mismatch");
    const int n = g.n_cells();
    const double h = g.h();

    // initial-position law from the density on interior nodes
    std::vector<double> start_cdf;
    start_cdf.reserve(static_cast<std::size_t>(n) - 1);
    double mass = 0.0;
    for (int i = 1; i < n; ++i) {
        const double v = u0_density.at(i);
        if (v < 0.0) throw std::invalid_argument("mc: initial density must be nonnegative");
        mass += v * h;
        start_cdf.push_back(mass);
    }
    if (std::abs(mass - 1.0) > 1e-10)
        throw std::invalid_argument("mc: initial density must have unit mass");
    for (double& c : start_cdf) c /= mass;
    start_cdf.back() = 1.0;

    // jump law = the kernel weights on their offset lattice
    const int J = k.radius_index();
    std::vector<double> jump_cdf(static_cast<std::size_t>(2 * J + 1));
    double wsum = 0.0;
    for (int j = -J; j <= J; ++j) {
        wsum += k.weight(j);
        jump_cdf[static_cast<std::size_t>(j + J)] = wsum;
    }
    jump_cdf.back() = 1.0;

    // Streams are consumed in a fixed order per particle: jump count,
    // start position, then the jumps.
    const bool absorbing = cfg.mode == McMode::DirichletAbsorbing;

    int bin_lo = 1, bin_hi = n - 1;  // absorbing mode: interior nodes
    if (!absorbing) {
        // widen the bins so every endpoint stays inside: max jump count
        // times the extreme displacement, known after a replayable pass
        std::uint32_t max_jumps = 0;
        for (std::uint64_t p = 0; p < cfg.particles; ++p) {
            SplitMix64 stream = make_stream(cfg.seed, p);
            max_jumps = std::max(max_jumps, sample_poisson(stream, cfg.t_final));
        }
        bin_lo = 1 + static_cast<int>(max_jumps) * std::min(k.support_lo(), 0);
        bin_hi = (n - 1) + static_cast<int>(max_jumps) * std::max(k.support_hi(), 0);
    }
    const std::size_t n_bins = static_cast<std::size_t>(bin_hi - bin_lo + 1);

    unsigned workers = cfg.workers == 0 ? default_worker_count() : cfg.workers;
    workers = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, cfg.particles));

    std::vector<WorkerTally> tallies(workers);
    auto run_chunk = [&](unsigned w) {
        WorkerTally& tally = tallies[w];
        tally.counts.assign(n_bins, 0);
        const std::uint64_t begin = cfg.particles * w / workers;
        const std::uint64_t end = cfg.particles * (w + 1) / workers;
        for (std::uint64_t p = begin; p < end; ++p) {
            SplitMix64 stream = make_stream(cfg.seed, p);
            const std::uint32_t jumps = sample_poisson(stream, cfg.t_final);
            tally.total_jumps += jumps;
            long pos = 1 + static_cast<long>(sample_cdf(start_cdf, stream.next_double()));
            bool alive = true;
            for (std::uint32_t q = 0; q < jumps; ++q) {
                const long j =
                    static_cast<long>(sample_cdf(jump_cdf, stream.next_double())) - J;
                pos += j;
                if (absorbing && !(0 < pos && pos < n)) {
                    alive = false;
                    break;
                }
            }
            if (alive)
                ++tally.counts[static_cast<std::size_t>(pos - bin_lo)];
            else
                ++tally.absorbed;
        }
    };

    if (workers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
        for (auto& t : pool) t.join();
    }

    McDensity out;
    out.particles = cfg.particles;
    out.bin_width = h;
    out.counts.assign(n_bins, 0);
    std::uint64_t absorbed = 0, total_jumps = 0;
    for (const auto& tally : tallies) {
        for (std::size_t b = 0; b < n_bins; ++b) out.counts[b] += tally.counts[b];
        absorbed += tally.absorbed;
        total_jumps += tally.total_jumps;
    }

    const double m = static_cast<double>(cfg.particles);
    out.centers.resize(n_bins);
    out.density.resize(n_bins);
    out.standard_error.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        out.centers[b] = g.coord(bin_lo + static_cast<int>(b));
        const double p_hat = static_cast<double>(out.counts[b]) / m;
        out.density[b] = p_hat / h;
        out.standard_error[b] = std::sqrt(p_hat * (1.0 - p_hat) / m) / h;
    }
    out.surviving_fraction = static_cast<double>(cfg.particles - absorbed) / m;
    out.mean_jumps = static_cast<double>(total_jumps) / m;
    return out;
}

DensityComparison compare_density(const McDensity& mc, const Field& u) {
    const auto& g = *u.geom;
    const int n = g.n_cells();
    if (mc.centers.size() != static_cast<std::size_t>(n - 1) ||
        std::abs(mc.centers.front() - g.coord(1)) > 1e-9 || mc.bin_width != g.h())
        throw std::invalid_argument("compare_density: bin/grid geometry mismatch");

    DensityComparison cmp;
    cmp.z_scores.resize(mc.centers.size());
    for (int i = 1; i < n; ++i) {
        const std::size_t b = static_cast<std::size_t>(i - 1);
        const double diff = mc.density[b] - u.at(i);
        cmp.l1 += std::abs(diff) * g.h();
        const double z = mc.standard_error[b] > 0.0 ? diff / mc.standard_error[b] : 0.0;
        cmp.z_scores[b] = z;
        cmp.max_abs_z = std::max(cmp.max_abs_z, std::abs(z));
    }
    return cmp;
}

}  // namespace nldiff
