#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "optcas/vec.hpp"

namespace optcas {

struct Box {
    Vec3 lo;
    Vec3 hi;
    double volume() const { return (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z); }
};

struct IntegratorConfig {
    std::int64_t samples = 100000;  // budget per pass block
    std::uint64_t seed = 12345;
    int strata_per_axis = 0;   // 0 = choose from the sample budget
    int workers = 0;           // 0 = OPTCAS_WORKERS env var, then hardware
    double rel_tolerance = 0;  // 0 = single block, no refinement
    int max_passes = 4;        // refinement blocks allowed when rel_tolerance > 0
};

struct IntegralEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_evaluated = 0;  // points with integrand values
    std::int64_t n_excluded = 0;   // points outside the membership domain
    bool converged = true;
    std::int64_t samples() const { return n_evaluated + n_excluded; }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent substream per (seed, stratum, pass); sampling order inside a
// stratum never depends on how strata are distributed over workers.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stratum, std::uint64_t pass) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(stratum ^ splitmix64(pass + 0x51ed2701)));
    return std::mt19937_64(s);
}

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("OPTCAS_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) return w;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

struct StratumAccum {
    double sum = 0.0;
    double sumsq = 0.0;
    std::int64_t n = 0;
    std::int64_t excluded = 0;

    double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        double m = mean();
        double v = (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return v > 0.0 ? v : 0.0;
    }
};

}  // namespace detail

// Stratified Monte Carlo volume integral. The integrand returns nullopt for
// points outside the integration domain; those contribute zero to the
// integral and are tallied as excluded. Sampling proceeds in passes: a
// uniform pilot, then budget allocated across strata proportional to
// (cell volume) * (sample standard deviation); when rel_tolerance > 0,
// further blocks are added until the error target or max_passes is reached.
// Results are bit-identical for any worker count.
template <class F>
IntegralEstimate integrate_volume(const F& f, const Box& box, const IntegratorConfig& cfg) {
    if (cfg.samples < 1000)
        throw std::invalid_argument("integrate_volume: need at least 1000 samples");
    if (!(box.volume() > 0.0)) throw std::invalid_argument("integrate_volume: empty box");

    int spa = cfg.strata_per_axis;
    if (spa <= 0) {
        spa = static_cast<int>(std::cbrt(static_cast<double>(cfg.samples) / 256.0));
        if (spa < 2) spa = 2;
        if (spa > 12) spa = 12;
    }
    const int K = spa * spa * spa;
    const double cell_vol = box.volume() / static_cast<double>(K);
    const Vec3 ext = box.hi - box.lo;
    const double dx = ext.x / spa, dy = ext.y / spa, dz = ext.z / spa;

    auto cell_lo = [&](int idx) {
        int ix = idx % spa, iy = (idx / spa) % spa, iz = idx / (spa * spa);
        return Vec3{box.lo.x + ix * dx, box.lo.y + iy * dy, box.lo.z + iz * dz};
    };

    std::vector<detail::StratumAccum> acc(K);
    std::vector<std::int64_t> plan(K, 0);

    auto run_pass = [&](std::uint64_t pass) {
        std::atomic<int> next{0};
        int workers = detail::worker_count(cfg.workers);
        if (workers > K) workers = K;
        auto body = [&]() {
            for (;;) {
                int k = next.fetch_add(1);
                if (k >= K) return;
                std::int64_t n = plan[k];
                if (n <= 0) continue;
                auto rng = detail::substream(cfg.seed, static_cast<std::uint64_t>(k), pass);
                Vec3 lo = cell_lo(k);
                double s = 0.0, comp = 0.0, ssq = 0.0;
                std::int64_t excl = 0;
                for (std::int64_t i = 0; i < n; ++i) {
                    Vec3 p{lo.x + dx * detail::uniform01(rng),
                           lo.y + dy * detail::uniform01(rng),
                           lo.z + dz * detail::uniform01(rng)};
                    double v = 0.0;
                    if (auto val = f(p))
                        v = *val;
                    else
                        ++excl;
                    double t = s + v;  // Neumaier compensated sum
                    comp += (std::fabs(s) >= std::fabs(v)) ? (s - t) + v : (v - t) + s;
                    s = t;
                    ssq += v * v;
                }
                acc[k].sum += s + comp;
                acc[k].sumsq += ssq;
                acc[k].n += n;
                acc[k].excluded += excl;
            }
        };
        if (workers <= 1) {
            body();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (int w = 0; w < workers; ++w) pool.emplace_back(body);
            for (auto& th : pool) th.join();
        }
    };

    auto allocate_by_stddev = [&](std::int64_t budget) {
        double wsum = 0.0;
        std::vector<double> w(K);
        for (int k = 0; k < K; ++k) {
            w[k] = std::sqrt(acc[k].variance()) * cell_vol;
            wsum += w[k];
        }
        std::int64_t assigned = 0;
        if (wsum > 0.0) {
            for (int k = 0; k < K; ++k) {
                plan[k] = static_cast<std::int64_t>(static_cast<double>(budget) * w[k] / wsum);
                assigned += plan[k];
            }
        } else {
            for (int k = 0; k < K; ++k) {
                plan[k] = budget / K;
                assigned += plan[k];
            }
        }
        std::int64_t rem = budget - assigned;
        for (int k = 0; rem > 0; k = (k + 1) % K, --rem) ++plan[k];
    };

    auto tally = [&]() {
        IntegralEstimate out;
        double val = 0.0, vcomp = 0.0, var = 0.0;
        for (int k = 0; k < K; ++k) {
            double contrib = cell_vol * acc[k].mean();
            double t = val + contrib;
            vcomp += (std::fabs(val) >= std::fabs(contrib)) ? (val - t) + contrib
                                                            : (contrib - t) + val;
            val = t;
            if (acc[k].n > 1)
                var += cell_vol * cell_vol * acc[k].variance() / static_cast<double>(acc[k].n);
            out.n_evaluated += acc[k].n - acc[k].excluded;
            out.n_excluded += acc[k].excluded;
        }
        out.value = val + vcomp;
        out.std_error = std::sqrt(var);
        return out;
    };

    // pass 0: uniform pilot over half the first block
    std::int64_t pilot_each = (cfg.samples / 2) / K;
    if (pilot_each < 8) pilot_each = 8;
    for (auto& p : plan) p = pilot_each;
    run_pass(0);

    // pass 1: spend the rest of the block where the pilot saw variance
    std::int64_t left = cfg.samples - static_cast<std::int64_t>(K) * pilot_each;
    if (left > 0) {
        allocate_by_stddev(left);
        run_pass(1);
    }

    IntegralEstimate out = tally();
    if (cfg.rel_tolerance > 0.0) {
        std::uint64_t pass = 2;
        while (out.std_error > cfg.rel_tolerance * std::fabs(out.value) &&
               static_cast<int>(pass) < cfg.max_passes + 2) {
            allocate_by_stddev(cfg.samples);
            run_pass(pass++);
            out = tally();
        }
        out.converged = out.std_error <= cfg.rel_tolerance * std::fabs(out.value);
    }
    return out;
}

}  // namespace optcas
