#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "gibbstf/diagnostics.hpp"
#include "gibbstf/experiment.hpp"
#include "gibbstf/io.hpp"
#include "gibbstf/parallel.hpp"

using namespace gibbstf;

namespace {

constexpr int exit_config = 2;
constexpr int exit_all_failed = 3;

struct ModelArgs {
    std::string model = "strauss";
    double R = 0.05;
    std::vector<double> radii;
    std::vector<double> theta;
    double beta = 0.0;
    double gamma = 0.0;
};

void add_model_options(CLI::App* app, ModelArgs& m) {
    app->add_option("--model", m.model, "strauss | area | multi_strauss | poisson");
    app->add_option("--R", m.R, "interaction radius");
    app->add_option("--radii", m.radii, "multi_strauss radii")->delimiter(',');
    app->add_option("--theta", m.theta, "parameter vector")->delimiter(',');
    app->add_option("--beta", m.beta, "exp(-theta1)");
    app->add_option("--gamma", m.gamma, "exp(-theta2)");
}

ModelPtr build_model(const ModelArgs& m) {
    Json j{{"model", m.model}, {"R", m.R}};
    if (!m.radii.empty()) j["radii"] = m.radii;
    return model_from_json(j);
}

Vector build_theta(const ModelArgs& m, const GibbsModel& model) {
    const std::size_t p = model.parameter_count();
    if (!m.theta.empty()) {
        if (m.theta.size() != p) throw ConfigError("--theta needs " + std::to_string(p) + " values");
        return Eigen::Map<const Vector>(m.theta.data(), static_cast<Eigen::Index>(p));
    }
    if (m.beta > 0.0 && p == 1) return Vector::Constant(1, -std::log(m.beta));
    if (m.beta > 0.0 && m.gamma > 0.0 && p == 2) return theta_from_beta_gamma(m.beta, m.gamma);
    throw ConfigError("give the parameter with --theta or --beta/--gamma");
}

// "strauss_indicator:1,strauss_indicator:2", "count:0.05", "gradV", "constant:1", or a JSON list.
std::vector<HSpec> parse_h(const std::string& text) {
    if (!text.empty() && text.front() == '[') {
        try {
            return hspecs_from_json(Json::parse(text));
        } catch (const Json::parse_error& e) {
            throw ConfigError(std::string("--h: ") + e.what());
        }
    }
    std::vector<HSpec> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        HSpec s;
        const auto colon = item.find(':');
        s.type = item.substr(0, colon);
        if (colon != std::string::npos) {
            const std::string arg = item.substr(colon + 1);
            try {
                if (s.type == "strauss_indicator") s.k = std::stoi(arg);
                else if (s.type == "constant") s.value = std::stod(arg);
                else s.r = std::stod(arg);
            } catch (const std::exception&) {
                throw ConfigError("--h: bad argument in '" + item + "'");
            }
        }
        out.push_back(s);
    }
    return out;
}

Window window_from_args(const std::vector<double>& lower, const std::vector<double>& upper) {
    if (lower.size() != upper.size() || lower.empty() || lower.size() > 3) {
        throw ConfigError("--lower and --upper need the same number (1..3) of coordinates");
    }
    Position a{0, 0, 0}, b{0, 0, 0};
    for (std::size_t i = 0; i < lower.size(); ++i) {
        a[i] = lower[i];
        b[i] = upper[i];
    }
    try {
        return Window(static_cast<int>(lower.size()), a, b);
    } catch (const EmptyWindow& e) {
        throw ConfigError(e.what());
    }
}

void emit(const Json& j, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << "\n";
    } else {
        write_json(j, out);
    }
}

std::vector<TestFunction> method_h(const std::string& method, const std::vector<HSpec>& specs, const GibbsModel& model) {
    if (method == "explicit") return {h_strauss_indicator(model, 1), h_strauss_indicator(model, 2)};
    if (method == "mple") return h_gradV(model);
    return build_test_functions(specs, model);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and Takacs-Fiksel estimation of Gibbs point processes"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help");

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate a pattern and write it as CSV");
    ModelArgs sim_model;
    add_model_options(sim, sim_model);
    std::string sim_config, sim_out = "pattern.csv";
    std::vector<double> sim_lower{-0.05, -0.05}, sim_upper{3.05, 3.05};
    SamplerConfig sim_sampler;
    sim->add_option("--config", sim_config, "experiment JSON; model, parameter, carrier and sampler are read from it");
    sim->add_option("--lower", sim_lower, "carrier lower corner")->delimiter(',');
    sim->add_option("--upper", sim_upper, "carrier upper corner")->delimiter(',');
    sim->add_option("--seed", sim_sampler.seed);
    sim->add_option("--burn-in", sim_sampler.burn_in);
    sim->add_option("--steps-per-point", sim_sampler.steps_per_point);
    sim->add_option("--out", sim_out, "CSV path; the window goes to the .window.json sidecar");

    // estimate
    auto* est = app.add_subcommand("estimate", "fit a model to a pattern");
    est->set_help_flag("--help", "print this help");
    ModelArgs est_model;
    add_model_options(est, est_model);
    std::string est_pattern, est_window, est_method = "tf", est_h, est_out;
    double est_erode = -1.0, est_spacing = 0.0;
    std::size_t est_n_dummy = 0, est_resolution = 0;
    bool est_shortcut = false;
    est->add_option("--pattern", est_pattern, "pattern CSV")->required();
    est->add_option("--window", est_window, "carrier JSON (default: the sidecar)");
    est->add_option("--method", est_method, "tf | mple | explicit");
    est->add_option("--h", est_h, "test functions, e.g. strauss_indicator:1,strauss_indicator:2");
    est->add_option("--erode", est_erode, "erosion of the carrier (default: model range)");
    est->add_option("--n-dummy", est_n_dummy, "dummy points");
    est->add_option("--spacing", est_spacing, "dummy grid spacing");
    est->add_option("--resolution", est_resolution, "V_k grid cells per axis (explicit)");
    est->add_flag("--fiksel-shortcut", est_shortcut, "closed-form integral for fiksel count functions");
    est->add_option("--out", est_out, "report JSON (default: stdout)");

    // replicate
    auto* rep = app.add_subcommand("replicate", "seeded replication study");
    std::string rep_config, rep_out_dir;
    rep->add_option("--config", rep_config, "experiment JSON")->required();
    rep->add_option("--out-dir", rep_out_dir, "overrides output_dir");

    // covariance
    auto* cov = app.add_subcommand("covariance", "sandwich covariance of a fit, or the covariance study of an experiment");
    cov->set_help_flag("--help", "print this help");
    ModelArgs cov_model;
    add_model_options(cov, cov_model);
    std::string cov_config, cov_pattern, cov_window, cov_method = "explicit", cov_h, cov_out;
    double cov_erode = -1.0, cov_block = 0.0, cov_spacing = 0.0;
    cov->add_option("--config", cov_config, "experiment JSON: run the covariance study");
    cov->add_option("--pattern", cov_pattern, "single pattern CSV: plug-in covariance at the fitted parameter");
    cov->add_option("--window", cov_window);
    cov->add_option("--method", cov_method, "tf | mple | explicit");
    cov->add_option("--h", cov_h);
    cov->add_option("--erode", cov_erode);
    cov->add_option("--D-block", cov_block, "block side (default: max(range, side/10))");
    cov->add_option("--spacing", cov_spacing, "dummy grid spacing");
    cov->add_option("--out", cov_out);

    // diagnose
    auto* dia = app.add_subcommand("diagnose", "GNZ balance, contrast profile or sign check");
    dia->set_help_flag("--help", "print this help");
    std::string dia_config, dia_check = "gnz", dia_h, dia_out, dia_scatter;
    std::size_t dia_m = 100;
    std::vector<double> dia_theta;
    std::vector<std::string> dia_grid;
    dia->add_option("--config", dia_config, "experiment JSON (model, parameter, carrier, sampler)")->required();
    dia->add_option("--check", dia_check, "gnz | profile | det")->check(CLI::IsMember({"gnz", "profile", "det"}));
    dia->add_option("--h", dia_h, "test functions");
    dia->add_option("--replicates", dia_m, "simulated patterns");
    dia->add_option("--theta", dia_theta, "evaluation parameter (gnz, det); default theta_star")->delimiter(',');
    dia->add_option("--grid", dia_grid, "profile axes lo:hi:n, one per parameter");
    dia->add_option("--scatter", dia_scatter, "det: write binned (v, psi) CSV");
    dia->add_option("--out", dia_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*sim) {
            ModelPtr model;
            Vector theta;
            Window carrier = window_from_args(sim_lower, sim_upper);
            SamplerConfig sampler = sim_sampler;
            if (!sim_config.empty()) {
                const auto cfg = parse_experiment(read_json(sim_config));
                model = cfg.model;
                theta = cfg.theta_star;
                carrier = cfg.carrier;
                const auto seed = sim->count("--seed") ? sim_sampler.seed : cfg.seed;
                sampler = cfg.sampler;
                sampler.seed = seed;
            } else {
                model = build_model(sim_model);
                theta = build_theta(sim_model, *model);
            }
            if (!model->box().contains(theta)) throw ConfigError("parameter lies outside the model box");
            try {
                sampler.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            const auto phi = sample_gibbs(model, theta, carrier, sampler);
            write_pattern(phi, sim_out);
            std::cerr << "wrote " << phi.size() << " points to " << sim_out << "\n";
            return 0;
        }

        if (*est) {
            const auto model = build_model(est_model);
            const auto phi = read_pattern(est_pattern, est_window);
            const double erode = est_erode >= 0.0 ? est_erode : model->range();
            Window lambda = Window::square(0, 1);
            try {
                lambda = phi.carrier().eroded(erode);
            } catch (const EmptyWindow& e) {
                throw ConfigError(e.what());
            }
            QuadratureScheme q;
            if (est_spacing > 0.0) q = QuadratureScheme::grid_spacing(lambda, est_spacing);
            else if (est_n_dummy > 0) q = QuadratureScheme::grid(est_n_dummy);
            else if (model->range() > 0.0) q = QuadratureScheme::grid_spacing(lambda, model->range() / 4.0);
            ContrastReport report;
            if (est_method == "explicit") {
                const auto* strauss = dynamic_cast<const StraussModel*>(model.get());
                if (!strauss) throw ConfigError("--method explicit needs --model strauss");
                report = fit_strauss_explicit(phi, lambda, strauss->interaction_radius(), est_resolution);
            } else if (est_method == "mple") {
                report = fit_mple(phi, lambda, *model, model->box(), q);
            } else if (est_method == "tf") {
                if (est_h.empty()) throw ConfigError("--method tf needs --h");
                const auto h = build_test_functions(parse_h(est_h), *model);
                FitOptions options;
                options.quadrature = q;
                options.fiksel_shortcut = est_shortcut;
                report = fit_tf(phi, lambda, h, *model, model->box(), options);
            } else {
                throw ConfigError("unknown --method " + est_method);
            }
            emit(to_json(report), est_out);
            return 0;
        }

        if (*rep) {
            auto cfg = parse_experiment(read_json(rep_config));
            if (!rep_out_dir.empty()) cfg.output_dir = rep_out_dir;
            const auto result = run_replication(cfg);
            write_replication_csv(cfg, result, cfg.output_dir);
            std::cerr << "wrote " << cfg.output_dir << "/replicates.csv and summary.csv\n";
            if (result.all_failed()) {
                std::cerr << "every replicate failed\n";
                return exit_all_failed;
            }
            return 0;
        }

        if (*cov) {
            if (!cov_config.empty()) {
                auto cfg = parse_experiment(read_json(cov_config));
                if (cov_block > 0.0) cfg.D_block = cov_block;
                const auto result = run_replication(cfg);
                write_replication_csv(cfg, result, cfg.output_dir);
                if (result.all_failed()) {
                    std::cerr << "every replicate failed\n";
                    return exit_all_failed;
                }
                const auto study = run_covariance_study(cfg, result);
                emit(to_json(study), cov_out.empty() ? cfg.output_dir + "/covariance.json" : cov_out);
                return 0;
            }
            if (cov_pattern.empty()) throw ConfigError("covariance needs --config or --pattern");
            const auto model = build_model(cov_model);
            const auto phi = read_pattern(cov_pattern, cov_window);
            const double erode = cov_erode >= 0.0 ? cov_erode : model->range();
            const Window lambda = phi.carrier().eroded(erode);
            QuadratureScheme q = cov_spacing > 0.0 ? QuadratureScheme::grid_spacing(lambda, cov_spacing)
                                                   : QuadratureScheme::grid_spacing(lambda, model->range() / 4.0);
            const auto h = method_h(cov_method, parse_h(cov_h), *model);
            ContrastReport fit;
            if (cov_method == "explicit") {
                fit = fit_strauss_explicit(phi, lambda, model->range());
            } else if (cov_method == "mple") {
                fit = fit_mple(phi, lambda, *model, model->box(), q);
            } else {
                FitOptions options;
                options.quadrature = q;
                fit = fit_tf(phi, lambda, h, *model, model->box(), options);
            }
            const auto report = estimate_covariance(phi, lambda, h, *model, fit.theta_hat,
                                                    cov_block > 0.0 ? std::optional<double>(cov_block) : std::nullopt, q);
            Json j = to_json(report);
            j["fit"] = to_json(fit);
            emit(j, cov_out);
            return 0;
        }

        if (*dia) {
            const auto cfg = parse_experiment(read_json(dia_config));
            const double tau = *std::max_element(cfg.taus.begin(), cfg.taus.end());
            const Window lambda = cfg.estimation_window(tau);
            const QuadratureScheme q = cfg.quadrature.for_window(lambda);
            const auto h = build_test_functions(dia_h.empty() ? std::vector<HSpec>{{"gradV"}} : parse_h(dia_h), *cfg.model);
            Vector theta = cfg.theta_star;
            if (!dia_theta.empty()) {
                if (dia_theta.size() != cfg.model->parameter_count()) throw ConfigError("--theta has the wrong length");
                theta = Eigen::Map<const Vector>(dia_theta.data(), static_cast<Eigen::Index>(dia_theta.size()));
            }
            SamplerConfig sampler = cfg.sampler;
            const auto patterns = sample_replicates(cfg.model, cfg.theta_star, cfg.carrier, sampler, dia_m, cfg.threads);
            Json j;
            if (dia_check == "gnz") {
                if (dia_m < 30) throw ConfigError("gnz needs --replicates >= 30");
                j = to_json(gnz_balance(patterns, lambda, h, *cfg.model, theta, q));
            } else if (dia_check == "profile") {
                const std::size_t p = cfg.model->parameter_count();
                if (p != 2) throw ConfigError("profile grids are built for two-parameter models");
                std::vector<std::vector<double>> axes;
                for (std::size_t i = 0; i < p; ++i) {
                    std::vector<double> axis;
                    if (i < dia_grid.size()) {
                        double lo = 0, hi = 0;
                        int n = 0;
                        char c1 = 0, c2 = 0;
                        std::stringstream ss(dia_grid[i]);
                        if (!(ss >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1) {
                            throw ConfigError("--grid entries look like lo:hi:n");
                        }
                        for (int k = 0; k < n; ++k) axis.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
                    } else {
                        const auto& box = cfg.model->box();
                        const double t = cfg.theta_star[static_cast<Eigen::Index>(i)];
                        const double half = 0.25 * std::max(std::abs(t), 0.1);
                        for (int k = -10; k <= 10; ++k) {
                            axis.push_back(std::clamp(t + half * k / 10.0, box.lower[static_cast<Eigen::Index>(i)],
                                                      box.upper[static_cast<Eigen::Index>(i)]));
                        }
                    }
                    axes.push_back(axis);
                }
                j = to_json(contrast_profile(patterns, lambda, *cfg.model, cfg.theta_star, h, product_grid(axes[0], axes[1]), q));
            } else {
                DetCheckOptions options;
                options.seed = cfg.seed;
                const auto report = det_check(patterns, lambda, *cfg.model, theta, h, options);
                if (!dia_scatter.empty()) write_scatter_csv(report, dia_scatter);
                j = to_json(report);
            }
            emit(j, dia_out);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const Json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
