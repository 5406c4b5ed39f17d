#pragma once

#include "graphgp/config.hpp"
#include "graphgp/csv.hpp"
#include "graphgp/dataset.hpp"
#include "graphgp/ridge.hpp"
#include "graphgp/sampler.hpp"
#include "graphgp/sbm_theory.hpp"
#include "graphgp/sweep.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <string>

// Experiment execution: builds the graph, runs the requested pipeline, and
// writes CSV artifacts plus a manifest (resolved config, seed, artifact
// checksums, wall time). Artifact bytes are deterministic for a fixed config
// and seed; the classify table's runtime_ms column is the one measured value.

namespace graphgp {

struct ExperimentResult {
    std::filesystem::path out_dir;
    // name -> content, in write order
    std::vector<std::pair<std::string, std::string>> artifacts;
};

namespace exp_detail {

inline Graph build_graph(const ExperimentConfig& c, SplitIndices* file_splits) {
    switch (c.source) {
        case GraphSource::PopulationSbm:
            return population_sbm(c.sbm);
        case GraphSource::SampledCsbm:
            return sample_csbm(c.sbm, c.feature_dim, c.mean_separation,
                               derive_seed(c.seed, "graph"));
        case GraphSource::Files: {
            auto [g, splits] = load_dataset(c.edges_path, c.features_path, c.labels_path,
                                            c.splits_path);
            if (file_splits) *file_splits = splits;
            return g;
        }
    }
    throw InvalidParameterError("cli_experiments.build_graph", "unknown graph source");
}

inline SplitIndices random_splits(int n, const std::vector<double>& fractions,
                                  std::uint64_t seed) {
    Rng rng(derive_seed(seed, "splits"));
    std::vector<int> perm = rng.permutation(n);
    int n_train = static_cast<int>(fractions[0] * n);
    int n_val = static_cast<int>(fractions[1] * n);
    SplitIndices s;
    s.train.assign(perm.begin(), perm.begin() + n_train);
    s.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
    s.test.assign(perm.begin() + n_train + n_val, perm.end());
    return s;
}

inline SweepOptions sweep_options(const ExperimentConfig& c, const Graph& g) {
    SweepOptions opt = c.sweep;
    opt.add_self_loops = c.self_loops;
    if (c.pe_kind) opt.pe = build_positional_covariance(g, *c.pe_kind, c.pe_rank, c.hp);
    if (c.relation_max_bucket >= 0) opt.relation = shortest_path_buckets(g, c.relation_max_bucket);
    if (c.source == GraphSource::PopulationSbm)
        opt.initial_kernel = block_kernel(c.sbm.n, c.sbm.x0, c.sbm.y0);
    return opt;
}

// ---------------------------------------------------------------- kernel-sweep

inline void run_kernel_sweep(const ExperimentConfig& c, ExperimentResult& result) {
    Graph g = build_graph(c, nullptr);
    SweepOptions opt = sweep_options(c, g);
    auto trajectory = run_depth_sweep(g, c.model, c.hp, c.depth, opt);

    CsvWriter summary({"layer", "trace", "min_eig", "intra_mean", "inter_mean", "ratio"});
    for (const auto& km : trajectory) {
        LayerSummary s = summarize_kernel(km, g.labels);
        if (s.has_community_stats)
            summary.append_row_raw(
                row({s.layer, s.trace, s.min_eig, s.intra_mean, s.inter_mean, s.ratio}));
        else
            summary.append_row_raw(row({s.layer, s.trace, s.min_eig, "", "", ""}));
    }
    result.artifacts.emplace_back("summary.csv", summary.str());

    if (c.export_matrices)
        for (const auto& km : trajectory)
            result.artifacts.emplace_back("kernel_layer_" + format_int(km.layer) + ".csv",
                                          matrix_to_csv(km.values));
}

// ---------------------------------------------------------------- sbm-phase

inline void run_sbm_phase(const ExperimentConfig& c, ExperimentResult& result) {
    CsvWriter phase({"model", "p", "q", "l", "x_log", "x_sign", "y_log", "y_sign", "ratio",
                     "verdict", "F", "G_log"});
    for (ModelTag model : c.phase_models) {
        for (double p : c.p_values) {
            for (double q : c.q_values) {
                SbmParams params = c.sbm;
                params.p = p;
                params.q = q;
                std::vector<SbmKernelState> states;
                GatFactors factors{};
                bool has_factors = false;
                for (int l = 0; l <= c.phase_depth; ++l) {
                    switch (model) {
                        case ModelTag::GCN:
                            states.push_back(gcn_sbm(params, l));
                            break;
                        case ModelTag::GAT: {
                            auto [st, f] = gat_sbm(params, l);
                            states.push_back(st);
                            factors = f;
                            has_factors = true;
                            break;
                        }
                        case ModelTag::Graphormer:
                            states.push_back(graphormer_sbm(params, c.hp.alpha, l));
                            break;
                        case ModelTag::Specformer: {
                            double half = params.n / 2.0;
                            double l1 = c.lambda1 ? *c.lambda1 : half * (p + q);
                            double l2 = c.lambda2 ? *c.lambda2 : half * (p - q);
                            states.push_back(specformer_sbm(params, l1, l2, l));
                            break;
                        }
                        default:
                            throw InvalidParameterError("cli_experiments.sbm_phase",
                                                        "model has no SBM closed form");
                    }
                }
                OversmoothingReport report = oversmoothing_diagnosis(states, c.phase_tol);
                for (const auto& st : states) {
                    phase.append_row_raw(row({to_string(model), p, q, st.layer,
                                              st.x.log_abs, st.x.sign, st.y.log_abs, st.y.sign,
                                              ratio_metric(st), to_string(report.verdict),
                                              has_factors ? format_double(factors.F) : std::string(),
                                              has_factors ? format_double(std::log(factors.G))
                                                          : std::string()}));
                }
            }
        }
    }
    result.artifacts.emplace_back("phase.csv", phase.str());
}

// ---------------------------------------------------------------- mc-validate

inline void run_mc_validate(const ExperimentConfig& c, ExperimentResult& result) {
    Graph g = build_graph(c, nullptr);
    if (!g.has_features())
        throw InvalidParameterError("cli_experiments.mc_validate", "graph needs features");

    Matrix k0 = initial_feature_kernel(g);
    Matrix analytic;
    if (!c.mc_softmax && !c.mc_relu_logits) {
        analytic = gat_step_linear(k0, g.adjacency, c.hp);
    } else {
        // no closed form: reference = high-sample MC estimate of the Theorem kernel
        auto est = gat_step_mc(k0, g.adjacency, c.hp,
                               c.mc_relu_logits ? AttentionNonlinearity::Relu
                                                : AttentionNonlinearity::Identity,
                               c.mc_softmax, 200000, derive_seed(c.seed, "mc-reference"));
        analytic = est.value;
    }

    std::uint64_t sampler_seed = derive_seed(c.seed, "mc-validate");
    for (int w : c.mc_widths) {
        SamplerConfig cfg;
        cfg.width = w;
        cfg.heads = w;
        cfg.samples = c.mc_samples;
        cfg.seed = sampler_seed;
        cfg.model = ModelTag::GAT;
        cfg.hp = c.hp;
        EmpiricalMoments m = sample_gat_layer(
            g, cfg, c.mc_softmax ? SamplerAttention::Softmax : SamplerAttention::Identity,
            c.mc_relu_logits ? AttentionNonlinearity::Relu : AttentionNonlinearity::Identity);
        GaussianityReport report = gaussianity_report(m, analytic);

        std::string suffix = "_w" + format_int(w);
        std::string text;
        text += "width = " + format_int(w) + "\n";
        text += "heads = " + format_int(w) + "\n";
        text += "samples = " + format_int(c.mc_samples) + "\n";
        text += "rel_frobenius_error = " + format_double(report.rel_frobenius_error) + "\n";
        text += "max_abs_skewness = " + format_double(report.max_abs_skewness) + "\n";
        text += "max_abs_excess_kurtosis = " + format_double(report.max_abs_excess_kurtosis) + "\n";
        for (Eigen::Index a = 0; a < report.ks_statistics.size(); ++a)
            text += "ks_node_" + format_int(a) + " = " + format_double(report.ks_statistics(a)) +
                    "\n";
        result.artifacts.emplace_back("report" + suffix + ".txt", text);

        CsvWriter hist({"node", "bin_lo", "bin_hi", "count"});
        for (std::size_t a = 0; a < m.histograms.size(); ++a) {
            const Histogram& h = m.histograms[a];
            for (std::size_t b = 0; b < h.counts.size(); ++b)
                hist.append_row_raw(
                    row({a, h.edges[b], h.edges[b + 1], h.counts[b]}));
        }
        result.artifacts.emplace_back("hist" + suffix + ".csv", hist.str());

        CsvWriter moments({"node", "mean", "var", "skew", "kurt"});
        for (Eigen::Index a = 0; a < m.mean.size(); ++a)
            moments.append_row_raw(row({a, m.mean(a), m.covariance(a, a), m.skewness(a),
                                        m.excess_kurtosis(a)}));
        result.artifacts.emplace_back("moments" + suffix + ".csv", moments.str());
    }
}

// ---------------------------------------------------------------- classify

inline void run_classify(const ExperimentConfig& c, ExperimentResult& result) {
    SplitIndices splits;
    Graph g = build_graph(c, &splits);
    if (c.source != GraphSource::Files)
        splits = random_splits(g.n, c.split_fractions, c.seed);
    if (!g.labels)
        throw InvalidParameterError("cli_experiments.classify", "graph has no labels");

    SweepOptions opt = sweep_options(c, g);
    auto table = depth_accuracy_sweep(g, c.model, c.hp, c.depths, splits, opt, c.ridge_grid);

    CsvWriter sweep({"model", "depth", "pe_kind", "alpha", "val_acc", "test_acc", "ridge",
                     "runtime_ms"});
    for (const auto& rowv : table)
        sweep.append_row_raw(row({to_string(rowv.model), rowv.depth, rowv.pe_kind, rowv.alpha,
                                  rowv.val_accuracy, rowv.test_accuracy, rowv.chosen_ridge,
                                  rowv.runtime_ms}));
    result.artifacts.emplace_back("sweep.csv", sweep.str());
}

} // namespace exp_detail

/// Executes the configured experiment and writes every artifact plus the
/// manifest under the config's output directory.
inline ExperimentResult run_experiment(const ExperimentConfig& c,
                                       const std::string& raw_config_text) {
    auto start = std::chrono::steady_clock::now();
    ExperimentResult result;
    result.out_dir = c.out_dir;

    switch (c.kind) {
        case ExperimentKind::KernelSweep: exp_detail::run_kernel_sweep(c, result); break;
        case ExperimentKind::SbmPhase: exp_detail::run_sbm_phase(c, result); break;
        case ExperimentKind::McValidate: exp_detail::run_mc_validate(c, result); break;
        case ExperimentKind::Classify: exp_detail::run_classify(c, result); break;
    }

    std::filesystem::create_directories(result.out_dir);
    for (const auto& [name, content] : result.artifacts)
        write_text_file(result.out_dir / name, content);

    auto stop = std::chrono::steady_clock::now();
    double wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start).count();

    std::string manifest;
    manifest += "manifest-version = 1\n";
    manifest += "config-checksum = " + checksum_hex(raw_config_text) + "\n";
    manifest += "wall-ms = " + format_double(wall_ms) + "\n";
    manifest += "[resolved]\n" + c.resolved_text();
    manifest += "[resolved-defaults]\n";
    for (const auto& note : c.resolved_defaults) manifest += note + "\n";
    manifest += "[artifacts]\n";
    for (const auto& [name, content] : result.artifacts)
        manifest += name + " bytes=" + format_int(content.size()) +
                    " fnv64=" + checksum_hex(content) + "\n";
    write_text_file(result.out_dir / "manifest", manifest);
    return result;
}

} // namespace graphgp
