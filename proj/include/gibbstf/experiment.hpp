#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gibbstf/asymptotics.hpp"
#include "gibbstf/io.hpp"
#include "gibbstf/sim.hpp"

namespace gibbstf {

struct HSpec {
    std::string type;  // constant | count | fiksel | strauss_indicator | gradV | exp_energy | per | iso
    double r = 0.0;
    int k = 0;
    double value = 1.0;
};

/// Dummy points either by count or by grid spacing (resolved per window).
struct QuadratureSpec {
    QuadratureKind kind = QuadratureKind::stratified_grid;
    std::optional<std::size_t> n_dummy;
    std::optional<double> spacing;
    std::uint64_t seed = 0;

    QuadratureScheme for_window(const Window& window) const;
};

struct MethodSpec {
    std::string name;  // tf | mple | explicit
    std::vector<HSpec> h;
    std::optional<QuadratureSpec> quadrature;
};

struct ExperimentConfig {
    ModelPtr model;
    Vector theta_star;
    Window carrier = Window::square(0.0, 1.0);
    std::vector<double> taus{1.0};
    double erosion = 0.0;
    std::size_t replicates = 1;
    std::uint64_t seed = 0;
    std::vector<MethodSpec> methods;
    QuadratureSpec quadrature;
    SamplerConfig sampler;
    std::string output_dir = ".";
    bool report_theta = false;  // false: (beta, gamma) = exp(-theta)
    unsigned threads = 1;
    std::size_t vk_resolution = 0;  // 0: default_vk_resolution
    // Covariance study.
    std::string covariance_method = "explicit";
    std::size_t asymptotic_patterns = 20;
    std::optional<double> D_block;
    int histogram_bins = 20;

    /// [lower + erosion, lower + erosion + tau] on every axis.
    Window estimation_window(double tau) const;
};

ModelPtr model_from_json(const Json& j);
std::vector<HSpec> hspecs_from_json(const Json& j);
std::vector<TestFunction> build_test_functions(const std::vector<HSpec>& specs, const GibbsModel& model);
QuadratureSpec quadrature_from_json(const Json& j);

/// Throws ConfigError on anything malformed or unsatisfiable. Thread count
/// comes from "threads", overridden by GIBBSTF_THREADS.
ExperimentConfig parse_experiment(const Json& j);

/// Fit of one pattern on one window with one method; throws on failure.
ContrastReport fit_method(const Configuration& phi, const Window& window, const MethodSpec& method,
                          const ExperimentConfig& config);

struct ReplicateRow {
    std::size_t replicate = 0;
    double tau = 0.0;
    std::string method;
    bool ok = false;
    bool converged = false;
    Vector theta_hat;
    std::size_t points = 0;
    std::string error;
};

struct SummaryRow {
    double tau = 0.0;
    std::string method;
    std::size_t ok = 0;
    std::size_t failed = 0;
    Vector mean;  // of the reported parametrisation
    Vector sd;    // empty-valued (NaN) when fewer than two successes
};

struct ReplicationResult {
    std::vector<ReplicateRow> rows;  // replicate-major, then tau, then method
    std::vector<SummaryRow> summary;
    bool all_failed() const;
};

std::vector<Configuration> simulate_experiment_patterns(const ExperimentConfig& config);

ReplicationResult run_replication(const ExperimentConfig& config);
ReplicationResult run_replication(const ExperimentConfig& config, const std::vector<Configuration>& patterns);

/// Mean and sd per tau and method in the requested parametrisation.
std::vector<SummaryRow> summarize(const ExperimentConfig& config, const std::vector<ReplicateRow>& rows);

void write_replication_csv(const ExperimentConfig& config, const ReplicationResult& result, const std::string& dir);

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
    double mean = 0.0;
    double variance = 0.0;  // of the fitted Gaussian
};

Histogram make_histogram(const std::vector<double>& values, int bins);

struct CovarianceStudyEntry {
    double tau = 0.0;
    std::size_t replicates = 0;
    Matrix empirical;  // covariance of sqrt|window| * theta_hat
    std::vector<Histogram> histograms;  // of sqrt|window| (theta_hat_j - theta_star_j)
};

struct CovarianceStudy {
    std::string method;
    std::vector<CovarianceStudyEntry> entries;
    Matrix E;
    Matrix Sigma;
    Matrix asymptotic;  // sandwich from E and Sigma averaged over simulated patterns at theta_star
    std::size_t asymptotic_patterns = 0;
    double D_block = 0.0;
};

/// Empirical covariance across replicates for each tau, plus the Monte-Carlo
/// sandwich at theta_star on the largest window.
CovarianceStudy run_covariance_study(const ExperimentConfig& config, const ReplicationResult& replication);
CovarianceStudy run_covariance_study(const ExperimentConfig& config);

/// Sandwich at theta_star from E and Sigma averaged over `patterns`.
void asymptotic_sandwich(const ExperimentConfig& config, const MethodSpec& method, const Window& window,
                         const std::vector<Configuration>& patterns, CovarianceStudy& out);

Json to_json(const CovarianceStudy& s);

}  // namespace gibbstf
