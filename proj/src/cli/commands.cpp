#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "aoapos/cli.hpp"
#include "aoapos/error_variance.hpp"
#include "aoapos/errors.hpp"
#include "aoapos/format.hpp"
#include "aoapos/wls_positioner.hpp"

namespace aoapos::cli {

namespace {

double sample_variance(const std::vector<double>& x) {
    const double mean = pairwise_sum(x.data(), x.size()) / x.size();
    std::vector<double> dev(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dev[i] = (x[i] - mean) * (x[i] - mean);
    return pairwise_sum(dev.data(), dev.size()) / (x.size() - 1.0);
}

std::vector<int> sweep_values(const RunConfig& cfg) {
    if (!cfg.values.empty()) return cfg.values;
    if (cfg.parameter == "anchor-size") return {1, 2, 4, 8};
    if (cfg.parameter == "grid-size") return {16, 32, 64, 128};
    return {2, 3, 4};
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos)
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string("cannot parse ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(std::string(what) + " list is empty");
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    for (double v : parse_list(text, what)) {
        if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(std::string(what) + " entries must be integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

Eigen::Vector3d parse_point(const std::string& text, const char* what) {
    const auto v = parse_list(text, what);
    if (v.size() != 3) throw ConfigError(std::string(what) + " needs three comma-separated coordinates");
    return {v[0], v[1], v[2]};
}

}  // namespace

std::string cmd_pdf(const RunConfig& cfg) {
    const auto& sc = cfg.scenario;
    const auto st = build_estimate_state(cfg.theta_hat, cfg.phi_hat, sc.geom, sc.grid);
    const bool theta = cfg.angle == "theta";
    const auto exact = theta ? theta_error_pdf(st, PdfMode::exact) : phi_error_pdf(st, PdfMode::exact);
    const auto linear = theta ? theta_error_pdf(st, PdfMode::linear) : phi_error_pdf(st, PdfMode::linear);
    const auto samples = sample_conditional_errors(st, cfg.samples, sc.seed);
    const double lo = exact.support_lo(), hi = exact.support_hi();
    const auto emp = histogram_density(theta ? samples.theta_err : samples.phi_err, cfg.bins, lo, hi);
    std::ostringstream os;
    os << "t,analytic_exact,analytic_linear,empirical\n";
    const double w = (hi - lo) / cfg.bins;
    for (int k = 0; k < cfg.bins; ++k) {
        const double t = lo + (k + 0.5) * w;
        os << fmt17(t) << ',' << fmt17(pdf_eval(exact, t)) << ',' << fmt17(pdf_eval(linear, t)) << ','
           << fmt17(emp[k]) << '\n';
    }
    return os.str();
}

std::string cmd_variance(const RunConfig& cfg) {
    const auto& sc = cfg.scenario;
    std::ostringstream os;
    os << "n,var_theta_closed,var_theta_mc,var_phi_closed,var_phi_mc\n";
    for (std::size_t k = 0; k < cfg.sizes.size(); ++k) {
        ArrayGeometry g = sc.geom;
        g.n_y = g.n_z = cfg.sizes[k];
        const auto st = build_estimate_state(cfg.theta_hat, cfg.phi_hat, g, sc.grid);
        const auto smp = sample_conditional_errors(st, cfg.samples, derive_seed(sc.seed, k));
        os << cfg.sizes[k] << ',' << fmt17(variance_theta(st).variance) << ',' << fmt17(sample_variance(smp.theta_err))
           << ',' << fmt17(variance_phi(st)) << ',' << fmt17(sample_variance(smp.phi_err)) << '\n';
    }
    return os.str();
}

std::string cmd_locate(const RunConfig& cfg) {
    const auto& sc = cfg.scenario;
    const double a = half_width_a(sc.geom, sc.grid), b = half_width_b(sc.geom, sc.grid);
    PositioningProblem p;
    p.anchors = sc.anchors;
    for (const auto& s : sc.anchors) {
        const AnglePair t = true_angles(s, sc.mu);
        AnglePair est = t;
        AngleVariances var;
        if (!sc.noiseless) {
            est = quantize_model(t, sc.geom, sc.grid).angles;
            var = angle_variances(est.theta, est.phi, a, b);
        }
        p.theta_hats.push_back(est.theta);
        p.phi_hats.push_back(est.phi);
        p.sigma2_theta.push_back(var.theta);
        p.sigma2_phi.push_back(var.phi);
    }
    const auto r = locate(p);
    std::ostringstream os;
    os << "x,y,z,error,residual_norm,passes,condition_warning\n";
    os << fmt17(r.q_hat.x()) << ',' << fmt17(r.q_hat.y()) << ',' << fmt17(r.q_hat.z()) << ','
       << fmt17((r.q_hat - sc.mu).norm()) << ',' << fmt17(r.residual_norm) << ',' << r.passes << ','
       << (r.condition_warning ? 1 : 0) << '\n';
    return os.str();
}

std::string cmd_sweep(const RunConfig& cfg) {
    const SweepParameter param = cfg.parameter == "anchor-size"  ? SweepParameter::anchor_size
                                 : cfg.parameter == "grid-size" ? SweepParameter::grid_size
                                                                : SweepParameter::anchor_count;
    const bool mse = cfg.quantity == "mse";
    const auto rows = sweep(cfg.scenario, param, sweep_values(cfg), mse ? SweepQuantity::mse : SweepQuantity::variance,
                            cfg.workers);
    std::ostringstream os;
    if (mse) {
        os << "value,mse,mse_baseline,failure_fraction\n";
        for (const auto& r : rows)
            os << r.value << ',' << fmt17(r.result.mse) << ',' << fmt17(r.result.mse_baseline) << ','
               << fmt17(r.result.failure_fraction) << '\n';
    } else {
        os << "value,var_theta,var_phi\n";
        for (const auto& r : rows) os << r.value << ',' << fmt17(r.var_theta) << ',' << fmt17(r.var_phi) << '\n';
    }
    return os.str();
}

std::string cmd_estimate(const RunConfig& cfg) {
    const auto& sc = cfg.scenario;
    const auto e = estimate({cfg.theta, cfg.phi}, sc.geom, sc.grid);
    std::ostringstream os;
    os << "theta,phi,theta_hat,phi_hat,sin_phi_hat,coscos_hat,b_n,q_n,s1,s2\n";
    os << fmt17(cfg.theta) << ',' << fmt17(cfg.phi) << ',' << fmt17(e.angles.theta) << ',' << fmt17(e.angles.phi)
       << ',' << fmt17(e.cosines.sin_phi) << ',' << fmt17(e.cosines.cos_cos) << ',' << e.b_n << ',' << e.q_n << ','
       << e.s1 << ',' << e.s2 << '\n';
    return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"AoA positioning error analysis"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials, samples;
    std::optional<std::string> out_path, angle, sizes, param, values, quantity, mu, anchors;
    std::optional<double> theta_hat, phi_hat, theta, phi, d_over_lambda, lambda;
    std::optional<int> n, ny, nz, s, s1, s2, bins;
    std::optional<unsigned> workers;
    bool noiseless = false;

    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed);
    app.add_option("--trials", trials);
    app.add_option("--out", out_path, "CSV destination (default stdout)");
    app.add_option("--workers", workers, "threads for Monte Carlo (0 = all cores)");
    app.add_option("--theta-hat", theta_hat);
    app.add_option("--phi-hat", phi_hat);
    app.add_option("--theta", theta, "true theta for estimate");
    app.add_option("--phi", phi, "true phi for estimate");
    app.add_option("--n", n, "sets n_y = n_z");
    app.add_option("--ny", ny);
    app.add_option("--nz", nz);
    app.add_option("--s", s, "sets s1 = s2");
    app.add_option("--s1", s1);
    app.add_option("--s2", s2);
    app.add_option("--d-over-lambda", d_over_lambda);
    app.add_option("--lambda", lambda, "carrier wavelength [m]");
    app.add_option("--samples", samples);
    app.add_option("--bins", bins);
    app.add_option("--angle", angle, "pdf: theta or phi");
    app.add_option("--sizes", sizes, "variance: comma-separated array sizes");
    app.add_option("--param", param, "sweep: anchor-size, anchor-count or grid-size");
    app.add_option("--values", values, "sweep: comma-separated values");
    app.add_option("--quantity", quantity, "sweep: mse or variance");
    app.add_option("--mu", mu, "MU position x,y,z");
    app.add_option("--anchors", anchors, "anchors x,y,z;x,y,z;...");
    app.add_flag("--noiseless", noiseless, "use true angles and zero variances");

    for (const char* name : {"pdf", "variance", "locate", "sweep", "estimate"}) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kConfig;
    }

    RunConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot read config file " + config_path);
            apply_json(cfg, std::string(std::istreambuf_iterator<char>(in), {}));
        }
        Scenario& sc = cfg.scenario;
        if (seed) sc.seed = *seed;
        if (trials) sc.trials = *trials;
        if (out_path) cfg.out = *out_path;
        if (workers) cfg.workers = *workers;
        if (theta_hat) cfg.theta_hat = *theta_hat;
        if (phi_hat) cfg.phi_hat = *phi_hat;
        if (theta) cfg.theta = *theta;
        if (phi) cfg.phi = *phi;
        if (n) sc.geom.n_y = sc.geom.n_z = *n;
        if (ny) sc.geom.n_y = *ny;
        if (nz) sc.geom.n_z = *nz;
        if (s) sc.grid.s1 = sc.grid.s2 = *s;
        if (s1) sc.grid.s1 = *s1;
        if (s2) sc.grid.s2 = *s2;
        if (d_over_lambda) cfg.d_over_lambda = *d_over_lambda;
        if (lambda) sc.geom.lambda_c = *lambda;
        if (samples) cfg.samples = *samples;
        if (bins) cfg.bins = *bins;
        if (angle) cfg.angle = *angle;
        if (sizes) cfg.sizes = parse_int_list(*sizes, "sizes");
        if (param) cfg.parameter = *param;
        if (values) cfg.values = parse_int_list(*values, "values");
        if (quantity) cfg.quantity = *quantity;
        if (mu) sc.mu = parse_point(*mu, "mu");
        if (anchors) {
            sc.anchors.clear();
            std::stringstream ss(*anchors);
            std::string item;
            while (std::getline(ss, item, ';')) sc.anchors.push_back(parse_point(item, "anchor"));
        }
        if (noiseless) sc.noiseless = true;
        cfg.finalize();

        std::string csv;
        if (cfg.command == "pdf") csv = cmd_pdf(cfg);
        else if (cfg.command == "variance") csv = cmd_variance(cfg);
        else if (cfg.command == "locate") csv = cmd_locate(cfg);
        else if (cfg.command == "sweep") csv = cmd_sweep(cfg);
        else csv = cmd_estimate(cfg);

        if (cfg.out.empty()) {
            out << csv;
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f) throw ConfigError("cannot open output file " + cfg.out);
            f << csv;
        }
        return kOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const RankError& e) {
        err << "rank failure: " << e.what() << '\n';
        return kRank;
    } catch (const DomainError& e) {
        err << "numerical domain error: " << e.what() << '\n';
        return kDomain;
    } catch (const ExperimentError& e) {
        err << "experiment failed: " << e.what() << '\n';
        return kDomain;
    }
}

}  // namespace aoapos::cli
