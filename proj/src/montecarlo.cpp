#include "aoapos/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "aoapos/error_variance.hpp"
#include "aoapos/errors.hpp"
#include "aoapos/wls_positioner.hpp"

namespace aoapos {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

unsigned resolve_workers(unsigned workers, std::size_t jobs) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(jobs, 1)));
}

// Runs body(i) for i in [0, n) over contiguous chunks.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F body) {
    workers = resolve_workers(workers, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

struct TrialOutcome {
    bool ok = false;
    double err2 = 0.0;
    double err2_baseline = 0.0;
};

TrialOutcome run_trial(const Scenario& sc, const std::vector<AnglePair>& truth, std::size_t trial) {
    const std::size_t n = sc.anchors.size();
    const double a = half_width_a(sc.geom, sc.grid), b = half_width_b(sc.geom, sc.grid);
    PositioningProblem p;
    p.anchors = sc.anchors;
    p.theta_hats.resize(n);
    p.phi_hats.resize(n);
    p.sigma2_theta.assign(n, 0.0);
    p.sigma2_phi.assign(n, 0.0);
    TrialOutcome out;
    try {
        for (std::size_t i = 0; i < n; ++i) {
            if (sc.noiseless) {
                p.theta_hats[i] = truth[i].theta;
                p.phi_hats[i] = truth[i].phi;
                continue;
            }
            // Subtractive dither: shift the composite grid by a uniform offset
            // of up to one cell, so the error is uniform on [-a, a] x [-b, b]
            // while the true position stays fixed.
            const DirectionCosines dc = direction_cosines(truth[i]);
            const double dy = (2.0 * counter_uniform(sc.seed, trial, 2 * i) - 1.0) * a;
            const double dz = (2.0 * counter_uniform(sc.seed, trial, 2 * i + 1) - 1.0) * b;
            const AngleEstimate q = quantize_cosines({dc.sin_phi + dy, dc.cos_cos + dz}, sc.geom, sc.grid);
            const AnglePair est = angles_from_cosines({q.cosines.sin_phi - dy, q.cosines.cos_cos - dz});
            const AngleVariances var = angle_variances(est.theta, est.phi, a, b);
            p.theta_hats[i] = est.theta;
            p.phi_hats[i] = est.phi;
            p.sigma2_theta[i] = var.theta;
            p.sigma2_phi[i] = var.phi;
        }
        const PositionEstimate loc = locate(p);
        const Eigen::Vector3d base = geometry_baseline(p);
        out.err2 = (loc.q_hat - sc.mu).squaredNorm();
        out.err2_baseline = (base - sc.mu).squaredNorm();
        out.ok = std::isfinite(out.err2) && std::isfinite(out.err2_baseline);
    } catch (const DomainError&) {
    } catch (const RankError&) {
    }
    return out;
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
    const std::uint64_t h = splitmix(splitmix(splitmix(seed) ^ index) ^ (stream * 0xD6E8FEB86659FD93ULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) { return base + k * 0x9E3779B97F4A7C15ULL; }

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

ConditionalSamples sample_conditional_errors(const EstimateState& st, std::size_t n, std::uint64_t seed) {
    constexpr std::size_t kMaxAttempts = 10000;
    ConditionalSamples out;
    out.phi_err.reserve(n);
    out.theta_err.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = 0;
        for (;; ++k) {
            if (k == kMaxAttempts) throw DomainError("sampler: no admissible (Y, Z) pair");
            const double y = st.y_hat + (2.0 * counter_uniform(seed, i, 2 * k) - 1.0) * st.a;
            const double z = st.z_hat + (2.0 * counter_uniform(seed, i, 2 * k + 1) - 1.0) * st.b;
            const double c = std::sqrt((1.0 - y) * (1.0 + y));
            if (!(std::abs(z) <= c) || c == 0.0) continue;
            out.phi_err.push_back(st.phi_hat - std::asin(y));
            out.theta_err.push_back(st.theta_hat - std::acos(z / c));
            break;
        }
        out.attempts += k + 1;
        out.rejected += k;
    }
    out.rejection_rate = out.attempts ? static_cast<double>(out.rejected) / out.attempts : 0.0;
    out.domain_warning = out.rejection_rate > 0.01;
    return out;
}

std::vector<double> histogram_density(const std::vector<double>& samples, int bins, double lo, double hi) {
    if (bins < 1 || !(hi > lo)) throw std::invalid_argument("histogram: need bins >= 1 and hi > lo");
    std::vector<double> counts(bins, 0.0);
    const double w = (hi - lo) / bins;
    for (double s : samples) {
        if (s < lo || s > hi) continue;
        const int k = std::min(bins - 1, static_cast<int>((s - lo) / w));
        counts[k] += 1.0;
    }
    const double norm = samples.empty() ? 0.0 : 1.0 / (static_cast<double>(samples.size()) * w);
    for (double& c : counts) c *= norm;
    return counts;
}

double histogram_l1(const std::vector<double>& samples, const PiecewisePdf& pdf, int bins) {
    const double lo = pdf.support_lo(), hi = pdf.support_hi();
    const auto dens = histogram_density(samples, bins, lo, hi);
    const double w = (hi - lo) / bins;
    double l1 = 0.0, inside = 0.0;
    for (int k = 0; k < bins; ++k) {
        const double l = lo + k * w, h = k + 1 == bins ? hi : lo + (k + 1) * w;
        l1 += std::abs(dens[k] * w - pdf_integrate(pdf, l, h, Weight::none));
        inside += dens[k] * w;
    }
    // samples outside the support count fully against the match
    return l1 + std::max(0.0, 1.0 - inside);
}

void Scenario::validate() const {
    if (anchors.empty()) throw std::invalid_argument("scenario needs anchors");
    if (trials < 1) throw std::invalid_argument("scenario needs trials >= 1");
    geom.validate();
    grid.validate();
    if (!mu.allFinite()) throw std::invalid_argument("scenario: non-finite MU");
    for (const auto& s : anchors)
        if (!(mu.x() - s.x() > 0.0)) throw std::invalid_argument("scenario: MU must satisfy mu.x > anchor.x");
}

Scenario default_scenario() {
    Scenario sc;
    sc.anchors = {{2, 20, 3}, {-12, -16, 58}, {-10, -6, -8}, {10, 6, -20}};
    sc.mu = {60, 40, 70};
    return sc;
}

Eigen::Vector3d fifth_anchor() { return {-5, 30, 20}; }

ExperimentResult run_positioning_experiment(const Scenario& scenario, unsigned workers) {
    scenario.validate();
    std::vector<AnglePair> truth;
    for (const auto& s : scenario.anchors) truth.push_back(true_angles(s, scenario.mu));

    std::vector<TrialOutcome> outcomes(scenario.trials);
    parallel_for(scenario.trials, workers,
                 [&](std::size_t t) { outcomes[t] = run_trial(scenario, truth, t); });

    std::vector<double> e, eb;
    e.reserve(outcomes.size());
    eb.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        if (!o.ok) continue;
        e.push_back(o.err2);
        eb.push_back(o.err2_baseline);
    }
    ExperimentResult r;
    r.trials = scenario.trials;
    r.failures = scenario.trials - e.size();
    r.failure_fraction = static_cast<double>(r.failures) / scenario.trials;
    if (r.failure_fraction > kMaxFailureFraction)
        throw ExperimentError("solver failure fraction " + std::to_string(r.failure_fraction) + " exceeds 0.1%");
    r.mse = pairwise_sum(e.data(), e.size()) / e.size();
    r.mse_baseline = pairwise_sum(eb.data(), eb.size()) / eb.size();
    return r;
}

std::vector<SweepRow> sweep(const Scenario& base, SweepParameter parameter, const std::vector<int>& values,
                            SweepQuantity quantity, unsigned workers) {
    if (values.empty()) throw std::invalid_argument("sweep: no values");
    std::vector<SweepRow> rows;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const int v = values[k];
        Scenario sc = base;
        sc.seed = derive_seed(base.seed, k);
        switch (parameter) {
            case SweepParameter::anchor_size:
                sc.geom.n_y = sc.geom.n_z = v;
                break;
            case SweepParameter::grid_size:
                sc.grid.s1 = sc.grid.s2 = v;
                break;
            case SweepParameter::anchor_count:
                if (v < 1 || static_cast<std::size_t>(v) > base.anchors.size())
                    throw std::invalid_argument("sweep: anchor count outside the available anchors");
                sc.anchors.resize(v);
                break;
        }
        SweepRow row;
        row.value = v;
        if (quantity == SweepQuantity::mse) {
            row.result = run_positioning_experiment(sc, workers);
        } else {
            sc.validate();
            const AnglePair t = true_angles(sc.anchors.front(), sc.mu);
            const auto var = angle_variances(t.theta, t.phi, sc.geom, sc.grid);
            row.var_theta = var.theta;
            row.var_phi = var.phi;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace aoapos
