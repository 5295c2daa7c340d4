#include "gibbstf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "gibbstf/parallel.hpp"

namespace gibbstf {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

Vector vec(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::optional<ParameterBox> box_from_json(const Json& j, std::size_t p) {
    if (!j.contains("box")) return std::nullopt;
    const auto& b = j.at("box");
    Vector lo(static_cast<Eigen::Index>(p)), hi(static_cast<Eigen::Index>(p));
    if (b.contains("lower")) {
        const auto l = b.at("lower").get<std::vector<double>>();
        const auto u = b.at("upper").get<std::vector<double>>();
        if (l.size() != p || u.size() != p) throw ConfigError("model box must have " + std::to_string(p) + " bounds");
        return ParameterBox(vec(l), vec(u));
    }
    for (std::size_t i = 0; i < p; ++i) {
        const std::string key = "theta" + std::to_string(i + 1);
        if (!b.contains(key)) throw ConfigError("model box lacks '" + key + "'");
        const auto range = b.at(key).get<std::vector<double>>();
        if (range.size() != 2) throw ConfigError("model box '" + key + "' must be [lower, upper]");
        lo[static_cast<Eigen::Index>(i)] = range[0];
        hi[static_cast<Eigen::Index>(i)] = range[1];
    }
    return ParameterBox(lo, hi);
}

std::vector<std::string> parameter_names(const ExperimentConfig& config) {
    const std::size_t p = config.model->parameter_count();
    std::vector<std::string> names;
    if (!config.report_theta && p == 2) return {"beta", "gamma"};
    for (std::size_t i = 0; i < p; ++i) {
        names.push_back((config.report_theta ? "theta" : "exp_neg_theta") + std::to_string(i + 1));
    }
    return names;
}

Vector reported(const ExperimentConfig& config, const Vector& theta) {
    return config.report_theta ? theta : Vector((-theta.array()).exp());
}

}  // namespace

QuadratureScheme QuadratureSpec::for_window(const Window& window) const {
    QuadratureScheme s;
    s.kind = kind;
    s.seed = seed;
    if (spacing) {
        s.n_dummy = QuadratureScheme::grid_spacing(window, *spacing).n_dummy;
    } else if (n_dummy) {
        s.n_dummy = *n_dummy;
    }
    return s;
}

Window ExperimentConfig::estimation_window(double tau) const {
    Position lo = carrier.lower(), hi = carrier.lower();
    for (int a = 0; a < carrier.dim(); ++a) {
        lo[a] += erosion;
        hi[a] = lo[a] + tau;
    }
    return Window(carrier.dim(), lo, hi);
}

ModelPtr model_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("model must be an object");
    const std::string kind = j.contains("model") ? j.at("model").get<std::string>() : get_or<std::string>(j, "type", "");
    try {
        if (kind == "strauss") {
            if (!j.contains("R")) throw ConfigError("strauss model needs R");
            return std::make_shared<StraussModel>(j.at("R").get<double>(), box_from_json(j, 2));
        }
        if (kind == "area") {
            if (!j.contains("R")) throw ConfigError("area model needs R");
            return std::make_shared<AreaModel>(j.at("R").get<double>(), box_from_json(j, 2),
                                               get_or<int>(j, "resolution", 128));
        }
        if (kind == "multi_strauss") {
            if (!j.contains("radii")) throw ConfigError("multi_strauss model needs radii");
            const auto radii = j.at("radii").get<std::vector<double>>();
            return std::make_shared<MultiStraussModel>(radii, box_from_json(j, radii.size() + 1));
        }
        if (kind == "poisson") return std::make_shared<PoissonModel>(box_from_json(j, 1));
    } catch (const ConfigError&) {
        throw;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    throw ConfigError("unknown model '" + kind + "' (expected strauss, area, multi_strauss or poisson)");
}

std::vector<HSpec> hspecs_from_json(const Json& j) {
    const Json& list = j.is_object() && j.contains("h") ? j.at("h") : j;
    if (!list.is_array()) throw ConfigError("test functions must be a list");
    std::vector<HSpec> out;
    for (const auto& item : list) {
        HSpec s;
        s.type = get_or<std::string>(item, "type", "");
        s.r = get_or<double>(item, "r", 0.0);
        s.k = get_or<int>(item, "k", 0);
        s.value = get_or<double>(item, "value", 1.0);
        out.push_back(s);
    }
    return out;
}

std::vector<TestFunction> build_test_functions(const std::vector<HSpec>& specs, const GibbsModel& model) {
    std::vector<TestFunction> out;
    try {
        for (const auto& s : specs) {
            if (s.type == "constant") out.push_back(h_constant(s.value));
            else if (s.type == "count") out.push_back(h_count(s.r));
            else if (s.type == "fiksel") out.push_back(h_fiksel(model, s.r));
            else if (s.type == "strauss_indicator") out.push_back(h_strauss_indicator(model, s.k));
            else if (s.type == "gradV") {
                for (auto& f : h_gradV(model)) out.push_back(std::move(f));
            } else if (s.type == "exp_energy") out.push_back(h_exp_energy(model));
            else if (s.type == "per") out.push_back(h_per(model));
            else if (s.type == "iso") out.push_back(h_iso(model));
            else throw ConfigError("unknown test function type '" + s.type + "'");
        }
    } catch (const ModelMismatch& e) {
        throw ConfigError(e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return out;
}

QuadratureSpec quadrature_from_json(const Json& j) {
    reject_unknown(j, {"kind", "n_dummy", "spacing", "seed"}, "quadrature");
    QuadratureSpec q;
    const auto kind = get_or<std::string>(j, "kind", "grid");
    if (kind == "grid" || kind == "stratified_grid") q.kind = QuadratureKind::stratified_grid;
    else if (kind == "monte_carlo") q.kind = QuadratureKind::monte_carlo;
    else throw ConfigError("quadrature kind must be grid or monte_carlo");
    if (j.contains("n_dummy")) {
        const auto n = j.at("n_dummy").get<long long>();
        if (n < 1) throw ConfigError("quadrature n_dummy must be >= 1");
        q.n_dummy = static_cast<std::size_t>(n);
    }
    if (j.contains("spacing")) {
        q.spacing = j.at("spacing").get<double>();
        if (!(*q.spacing > 0.0)) throw ConfigError("quadrature spacing must be positive");
    }
    q.seed = get_or<std::uint64_t>(j, "seed", 0);
    return q;
}

namespace {

ExperimentConfig parse_experiment_unchecked(const Json& j) {
    if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
    reject_unknown(j,
                   {"model", "theta_star", "beta", "gamma", "carrier", "taus", "erosion", "replicates", "seed",
                    "methods", "quadrature", "sampler", "output_dir", "report", "threads", "vk_resolution",
                    "covariance"},
                   "experiment config");
    ExperimentConfig c;
    if (!j.contains("model")) throw ConfigError("experiment config needs 'model'");
    c.model = model_from_json(j.at("model"));
    const std::size_t p = c.model->parameter_count();

    if (j.contains("theta_star")) {
        const auto t = j.at("theta_star").get<std::vector<double>>();
        if (t.size() != p) throw ConfigError("theta_star must have " + std::to_string(p) + " entries");
        c.theta_star = vec(t);
    } else if (j.contains("beta")) {
        const double beta = j.at("beta").get<double>();
        if (!(beta > 0.0)) throw ConfigError("beta must be positive");
        if (p == 1) {
            c.theta_star = Vector::Constant(1, -std::log(beta));
        } else if (p == 2 && j.contains("gamma")) {
            const double gamma = j.at("gamma").get<double>();
            if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
            c.theta_star = theta_from_beta_gamma(beta, gamma);
        } else {
            throw ConfigError("beta/gamma only describe one- or two-parameter models; use theta_star");
        }
    } else {
        throw ConfigError("experiment config needs theta_star or beta/gamma");
    }
    if (!c.model->box().contains(c.theta_star)) throw ConfigError("theta_star lies outside the model box");

    try {
        if (!j.contains("carrier")) throw ConfigError("experiment config needs 'carrier'");
        c.carrier = window_from_json(j.at("carrier"));
        c.taus = get_or<std::vector<double>>(j, "taus", {c.carrier.max_side()});
        c.erosion = get_or<double>(j, "erosion", c.model->range());
        if (c.erosion < 0.0) throw ConfigError("erosion must be >= 0");
        for (double tau : c.taus) {
            if (!(tau > 0.0)) throw ConfigError("every tau must be positive");
            if (!c.carrier.eroded(c.erosion).contains(c.estimation_window(tau))) {
                throw ConfigError("window for tau = " + std::to_string(tau) + " does not fit inside the eroded carrier");
            }
        }
    } catch (const EmptyWindow& e) {
        throw ConfigError(e.what());
    }

    const auto m = get_or<long long>(j, "replicates", 1);
    if (m < 1) throw ConfigError("replicates must be >= 1");
    c.replicates = static_cast<std::size_t>(m);
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    c.output_dir = get_or<std::string>(j, "output_dir", ".");
    const auto report = get_or<std::string>(j, "report", "beta_gamma");
    if (report != "beta_gamma" && report != "theta") throw ConfigError("report must be beta_gamma or theta");
    c.report_theta = report == "theta";
    c.vk_resolution = get_or<std::size_t>(j, "vk_resolution", 0);
    if (c.vk_resolution != 0 && c.vk_resolution < 64) throw ConfigError("vk_resolution must be 0 or >= 64");

    if (j.contains("quadrature")) {
        c.quadrature = quadrature_from_json(j.at("quadrature"));
    } else if (c.model->range() > 0.0) {
        c.quadrature.spacing = c.model->range() / 4.0;
    } else {
        c.quadrature.n_dummy = 4096;
    }

    if (j.contains("sampler")) {
        const auto& s = j.at("sampler");
        reject_unknown(s, {"burn_in", "steps_per_point", "birth_probability", "max_points"}, "sampler");
        c.sampler.burn_in = get_or<std::uint64_t>(s, "burn_in", c.sampler.burn_in);
        c.sampler.steps_per_point = get_or<double>(s, "steps_per_point", c.sampler.steps_per_point);
        c.sampler.birth_probability = get_or<double>(s, "birth_probability", c.sampler.birth_probability);
        if (s.contains("max_points")) c.sampler.max_points = s.at("max_points").get<std::size_t>();
    }
    c.sampler.seed = c.seed;
    try {
        c.sampler.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty()) {
        throw ConfigError("experiment config needs a non-empty 'methods' list");
    }
    for (const auto& item : j.at("methods")) {
        MethodSpec ms;
        if (item.is_string()) {
            ms.name = item.get<std::string>();
        } else {
            reject_unknown(item, {"name", "h", "quadrature"}, "method");
            ms.name = get_or<std::string>(item, "name", "");
            if (item.contains("h")) ms.h = hspecs_from_json(item.at("h"));
            if (item.contains("quadrature")) ms.quadrature = quadrature_from_json(item.at("quadrature"));
        }
        if (ms.name == "explicit") {
            if (c.model->kind() != ModelKind::strauss) throw ConfigError("method 'explicit' requires the strauss model");
        } else if (ms.name == "tf") {
            if (ms.h.empty()) throw ConfigError("method 'tf' needs a list of test functions 'h'");
            const auto h = build_test_functions(ms.h, *c.model);
            if (h.size() < p) throw ConfigError("method 'tf' needs at least p test functions");
        } else if (ms.name != "mple") {
            throw ConfigError("unknown method '" + ms.name + "' (expected tf, mple or explicit)");
        }
        c.methods.push_back(std::move(ms));
    }

    if (j.contains("covariance")) {
        const auto& cv = j.at("covariance");
        reject_unknown(cv, {"method", "asymptotic_patterns", "D_block", "histogram_bins"}, "covariance");
        c.covariance_method = get_or<std::string>(cv, "method", c.covariance_method);
        c.asymptotic_patterns = get_or<std::size_t>(cv, "asymptotic_patterns", c.asymptotic_patterns);
        if (cv.contains("D_block")) c.D_block = cv.at("D_block").get<double>();
        c.histogram_bins = get_or<int>(cv, "histogram_bins", c.histogram_bins);
        if (c.histogram_bins < 1) throw ConfigError("histogram_bins must be >= 1");
    }

    const auto threads = get_or<long long>(j, "threads", 0);
    if (threads < 0) throw ConfigError("threads must be >= 0");
    c.threads = threads > 0 ? static_cast<unsigned>(threads) : default_thread_count();
    if (std::getenv("GIBBSTF_THREADS")) c.threads = default_thread_count();
    return c;
}

}  // namespace

ExperimentConfig parse_experiment(const Json& j) {
    try {
        return parse_experiment_unchecked(j);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("experiment config: ") + e.what());
    }
}

ContrastReport fit_method(const Configuration& phi, const Window& window, const MethodSpec& method,
                          const ExperimentConfig& config) {
    const QuadratureScheme q = (method.quadrature ? *method.quadrature : config.quadrature).for_window(window);
    if (method.name == "explicit") {
        const auto* strauss = dynamic_cast<const StraussModel*>(config.model.get());
        if (!strauss) throw ModelMismatch("explicit estimator needs the strauss model");
        return fit_strauss_explicit(phi, window, strauss->interaction_radius(), config.vk_resolution);
    }
    if (method.name == "mple") return fit_mple(phi, window, *config.model, config.model->box(), q);
    const auto h = build_test_functions(method.h, *config.model);
    FitOptions options;
    options.quadrature = q;
    options.seed = config.seed;
    return fit_tf(phi, window, h, *config.model, config.model->box(), options);
}

bool ReplicationResult::all_failed() const {
    return std::none_of(rows.begin(), rows.end(), [](const ReplicateRow& r) { return r.ok; });
}

std::vector<Configuration> simulate_experiment_patterns(const ExperimentConfig& config) {
    return sample_replicates(config.model, config.theta_star, config.carrier, config.sampler, config.replicates,
                             config.threads);
}

ReplicationResult run_replication(const ExperimentConfig& config) {
    const std::size_t m = config.replicates;
    const std::size_t per = config.taus.size() * config.methods.size();
    ReplicationResult result;
    result.rows.resize(m * per);
    parallel_for(m, config.threads, [&](std::size_t r) {
        SamplerConfig s = config.sampler;
        s.seed = config.seed + r;
        std::optional<Configuration> phi;
        std::string sim_error;
        try {
            phi = sample_gibbs(config.model, config.theta_star, config.carrier, s);
        } catch (const Error& e) {
            sim_error = e.what();
        }
        for (std::size_t t = 0; t < config.taus.size(); ++t) {
            for (std::size_t k = 0; k < config.methods.size(); ++k) {
                auto& row = result.rows[r * per + t * config.methods.size() + k];
                row.replicate = r;
                row.tau = config.taus[t];
                row.method = config.methods[k].name;
                if (!phi) {
                    row.error = sim_error;
                    continue;
                }
                const Window w = config.estimation_window(config.taus[t]);
                row.points = phi->count_in(w);
                try {
                    const auto rep = fit_method(*phi, w, config.methods[k], config);
                    row.ok = true;
                    row.converged = rep.converged;
                    row.theta_hat = rep.theta_hat;
                } catch (const Error& e) {
                    row.error = e.what();
                }
            }
        }
    });
    result.summary = summarize(config, result.rows);
    return result;
}

ReplicationResult run_replication(const ExperimentConfig& config, const std::vector<Configuration>& patterns) {
    const std::size_t m = patterns.size();
    const std::size_t per = config.taus.size() * config.methods.size();
    ReplicationResult result;
    result.rows.resize(m * per);
    parallel_for(m, config.threads, [&](std::size_t r) {
        for (std::size_t t = 0; t < config.taus.size(); ++t) {
            const Window w = config.estimation_window(config.taus[t]);
            for (std::size_t k = 0; k < config.methods.size(); ++k) {
                auto& row = result.rows[r * per + t * config.methods.size() + k];
                row.replicate = r;
                row.tau = config.taus[t];
                row.method = config.methods[k].name;
                row.points = patterns[r].count_in(w);
                try {
                    const auto rep = fit_method(patterns[r], w, config.methods[k], config);
                    row.ok = true;
                    row.converged = rep.converged;
                    row.theta_hat = rep.theta_hat;
                } catch (const Error& e) {
                    row.error = e.what();
                }
            }
        }
    });
    result.summary = summarize(config, result.rows);
    return result;
}

std::vector<SummaryRow> summarize(const ExperimentConfig& config, const std::vector<ReplicateRow>& rows) {
    std::vector<SummaryRow> out;
    const auto p = static_cast<Eigen::Index>(config.model->parameter_count());
    for (double tau : config.taus) {
        for (const auto& method : config.methods) {
            SummaryRow s;
            s.tau = tau;
            s.method = method.name;
            std::vector<Vector> values;
            for (const auto& r : rows) {
                if (r.tau != tau || r.method != method.name) continue;
                if (r.ok) {
                    values.push_back(reported(config, r.theta_hat));
                } else {
                    ++s.failed;
                }
            }
            s.ok = values.size();
            s.mean = Vector::Constant(p, nan);
            s.sd = Vector::Constant(p, nan);
            if (!values.empty()) {
                s.mean.setZero();
                for (const auto& v : values) s.mean += v;
                s.mean /= static_cast<double>(values.size());
            }
            if (values.size() >= 2) {
                s.sd.setZero();
                for (const auto& v : values) s.sd += (v - s.mean).array().square().matrix();
                s.sd = (s.sd / static_cast<double>(values.size() - 1)).cwiseSqrt();
            }
            out.push_back(s);
        }
    }
    return out;
}

void write_replication_csv(const ExperimentConfig& config, const ReplicationResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const auto names = parameter_names(config);
    auto cell = [](std::ostream& o, double v) {
        if (std::isfinite(v)) o << v;
    };
    {
        std::ofstream out(dir + "/replicates.csv");
        if (!out) throw std::runtime_error("cannot write " + dir + "/replicates.csv");
        out.precision(17);
        out << "replicate,tau,method,ok,converged,points";
        for (const auto& n : names) out << "," << n;
        out << ",error\n";
        for (const auto& r : result.rows) {
            out << r.replicate << "," << r.tau << "," << r.method << "," << r.ok << "," << r.converged << "," << r.points;
            const Vector v = r.ok ? reported(config, r.theta_hat) : Vector::Constant(static_cast<Eigen::Index>(names.size()), nan);
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                out << ",";
                cell(out, v[i]);
            }
            std::string err = r.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            out << "," << err << "\n";
        }
    }
    std::ofstream out(dir + "/summary.csv");
    if (!out) throw std::runtime_error("cannot write " + dir + "/summary.csv");
    out.precision(17);
    out << "tau,method,n_ok,n_failed";
    for (const auto& n : names) out << ",mean_" << n << ",sd_" << n;
    out << "\n";
    for (const auto& s : result.summary) {
        out << s.tau << "," << s.method << "," << s.ok << "," << s.failed;
        for (Eigen::Index i = 0; i < s.mean.size(); ++i) {
            out << ",";
            cell(out, s.mean[i]);
            out << ",";
            cell(out, s.sd[i]);
        }
        out << "\n";
    }
}

Histogram make_histogram(const std::vector<double>& values, int bins) {
    Histogram h;
    if (values.empty() || bins < 1) return h;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + (hi - lo) * b / bins);
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        const int b = std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
        ++h.counts[static_cast<std::size_t>(std::max(0, b))];
    }
    for (double v : values) h.mean += v;
    h.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        for (double v : values) h.variance += (v - h.mean) * (v - h.mean);
        h.variance /= static_cast<double>(values.size() - 1);
    }
    return h;
}

void asymptotic_sandwich(const ExperimentConfig& config, const MethodSpec& method, const Window& window,
                         const std::vector<Configuration>& patterns, CovarianceStudy& out) {
    std::vector<TestFunction> h;
    if (method.name == "explicit") {
        h = {h_strauss_indicator(*config.model, 1), h_strauss_indicator(*config.model, 2)};
    } else if (method.name == "mple") {
        h = h_gradV(*config.model);
    } else {
        h = build_test_functions(method.h, *config.model);
    }
    const QuadratureScheme q = (method.quadrature ? *method.quadrature : config.quadrature).for_window(window);
    const std::size_t n = patterns.size();
    std::vector<Matrix> Es(n), Ss(n);
    std::vector<double> D(n);
    parallel_for(n, config.threads, [&](std::size_t r) {
        Es[r] = estimate_E(patterns[r], window, h, *config.model, config.theta_star, q);
        const auto s = estimate_Sigma(patterns[r], window, h, *config.model, config.theta_star, config.D_block, q);
        Ss[r] = s.sigma;
        D[r] = s.D_block;
    });
    out.E = Matrix::Zero(Es.front().rows(), Es.front().cols());
    out.Sigma = Matrix::Zero(Ss.front().rows(), Ss.front().cols());
    for (std::size_t r = 0; r < n; ++r) {
        out.E += Es[r];
        out.Sigma += Ss[r];
    }
    out.E /= static_cast<double>(n);
    out.Sigma /= static_cast<double>(n);
    out.asymptotic = sandwich_covariance(out.E, out.Sigma).sandwich;
    out.asymptotic_patterns = n;
    out.D_block = D.front();
}

CovarianceStudy run_covariance_study(const ExperimentConfig& config, const ReplicationResult& replication) {
    auto it = std::find_if(config.methods.begin(), config.methods.end(),
                           [&](const MethodSpec& m) { return m.name == config.covariance_method; });
    if (it == config.methods.end()) {
        throw ConfigError("covariance method '" + config.covariance_method + "' is not among the experiment methods");
    }
    CovarianceStudy study;
    study.method = it->name;
    const auto p = static_cast<Eigen::Index>(config.model->parameter_count());
    for (double tau : config.taus) {
        const double scale = std::sqrt(config.estimation_window(tau).volume());
        std::vector<Vector> xs;
        for (const auto& r : replication.rows) {
            if (r.ok && r.tau == tau && r.method == study.method) xs.push_back(scale * r.theta_hat);
        }
        CovarianceStudyEntry e;
        e.tau = tau;
        e.replicates = xs.size();
        e.empirical = Matrix::Constant(p, p, nan);
        if (xs.size() >= 2) {
            Vector mean = Vector::Zero(p);
            for (const auto& x : xs) mean += x;
            mean /= static_cast<double>(xs.size());
            e.empirical.setZero();
            for (const auto& x : xs) e.empirical += (x - mean) * (x - mean).transpose();
            e.empirical /= static_cast<double>(xs.size() - 1);
        }
        for (Eigen::Index j = 0; j < p; ++j) {
            std::vector<double> dev;
            for (const auto& x : xs) dev.push_back(x[j] - scale * config.theta_star[j]);
            e.histograms.push_back(make_histogram(dev, config.histogram_bins));
        }
        study.entries.push_back(std::move(e));
    }
    if (config.asymptotic_patterns > 0) {
        SamplerConfig s = config.sampler;
        s.seed = config.seed + (std::uint64_t{1} << 32);
        const auto patterns =
            sample_replicates(config.model, config.theta_star, config.carrier, s, config.asymptotic_patterns, config.threads);
        const double tau_max = *std::max_element(config.taus.begin(), config.taus.end());
        asymptotic_sandwich(config, *it, config.estimation_window(tau_max), patterns, study);
    }
    return study;
}

CovarianceStudy run_covariance_study(const ExperimentConfig& config) {
    return run_covariance_study(config, run_replication(config));
}

Json to_json(const CovarianceStudy& s) {
    Json entries = Json::array();
    for (const auto& e : s.entries) {
        Json hs = Json::array();
        for (const auto& h : e.histograms) {
            hs.push_back({{"edges", h.edges}, {"counts", h.counts}, {"gaussian_mean", h.mean}, {"gaussian_variance", h.variance}});
        }
        entries.push_back({{"tau", e.tau}, {"replicates", e.replicates}, {"empirical", to_json(e.empirical)}, {"histograms", hs}});
    }
    Json j{{"method", s.method}, {"entries", entries}};
    if (s.asymptotic_patterns > 0) {
        j["asymptotic"] = {{"sandwich", to_json(s.asymptotic)},
                           {"E", to_json(s.E)},
                           {"Sigma", to_json(s.Sigma)},
                           {"patterns", s.asymptotic_patterns},
                           {"D_block", s.D_block}};
    }
    return j;
}

}  // namespace gibbstf
