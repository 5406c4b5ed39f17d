#pragma once

#include "graphgp/config.hpp"
#include "graphgp/csv.hpp"

// parse_experiment_config implementation: per-section field readers with
// aggregated diagnostics, cross-field checks, resolved-default reporting.

namespace graphgp {

inline ExperimentConfig parse_experiment_config(const std::string& text) {
    ConfigFile cf = ConfigFile::parse(text);
    ExperimentConfig c;
    std::vector<ConfigDiagnostic> errors;
    config_detail::Reader r{cf, errors, c.resolved_defaults};
    bool ok = true;

    // ------------------------------------------------------------------ [experiment]
    {
        const std::string sec = "experiment";
        if (auto v = r.raw(sec, "kind")) {
            if (*v == "kernel-sweep") c.kind = ExperimentKind::KernelSweep;
            else if (*v == "sbm-phase") c.kind = ExperimentKind::SbmPhase;
            else if (*v == "mc-validate") c.kind = ExperimentKind::McValidate;
            else if (*v == "classify") c.kind = ExperimentKind::Classify;
            else r.error(sec, "kind", "unknown experiment kind: '" + *v + "'");
        } else {
            r.error(sec, "kind", "required field missing");
        }
        if (auto v = r.raw(sec, "seed")) {
            long long s = r.parse_int(sec, "seed", *v, ok);
            if (ok && s < 0) r.error(sec, "seed", "seed must be >= 0");
            if (ok) c.seed = static_cast<std::uint64_t>(s);
        } else {
            r.note_default(sec, "seed", "0");
        }
        if (auto v = r.raw(sec, "out")) c.out_dir = *v;
        else r.note_default(sec, "out", c.out_dir);
    }

    // ------------------------------------------------------------------ [graph]
    {
        const std::string sec = "graph";
        if (auto v = r.raw(sec, "source")) {
            if (*v == "population-sbm") c.source = GraphSource::PopulationSbm;
            else if (*v == "sampled-csbm") c.source = GraphSource::SampledCsbm;
            else if (*v == "files") c.source = GraphSource::Files;
            else r.error(sec, "source", "unknown graph source: '" + *v + "'");
        } else {
            r.note_default(sec, "source", "population-sbm");
        }

        auto read_double = [&](const char* key, double& target, const char* def) {
            if (auto v = r.raw(sec, key)) {
                double d = r.parse_double(sec, key, *v, ok);
                if (ok) target = d;
            } else if (def) {
                r.note_default(sec, key, def);
            }
        };
        if (auto v = r.raw(sec, "n")) {
            long long n = r.parse_int(sec, "n", *v, ok);
            if (ok && (n < 2 || n % 2 != 0)) r.error(sec, "n", "n must be even and >= 2");
            else if (ok) c.sbm.n = static_cast<int>(n);
        } else if (c.source != GraphSource::Files) {
            r.note_default(sec, "n", format_int(c.sbm.n == 0 ? (c.sbm.n = 100) : c.sbm.n));
        }
        read_double("p", c.sbm.p, "0.5");
        read_double("q", c.sbm.q, "0.1");
        read_double("x0", c.sbm.x0, "1");
        read_double("y0", c.sbm.y0, "0");
        if (c.sbm.p < 0.0 || c.sbm.p > 1.0) r.error(sec, "p", "p must lie in [0, 1]");
        if (c.sbm.q < 0.0 || c.sbm.q > 1.0) r.error(sec, "q", "q must lie in [0, 1]");
        if (!(c.sbm.x0 > std::abs(c.sbm.y0)))
            r.error(sec, "x0", "need x0 > |y0| so the block kernel is PSD");

        if (auto v = r.raw(sec, "feature_dim")) {
            long long d = r.parse_int(sec, "feature_dim", *v, ok);
            if (ok && d < 1) r.error(sec, "feature_dim", "must be >= 1");
            else if (ok) c.feature_dim = static_cast<int>(d);
        } else if (c.source == GraphSource::SampledCsbm) {
            r.note_default(sec, "feature_dim", format_int(c.feature_dim));
        }
        read_double("mean_separation", c.mean_separation,
                    c.source == GraphSource::SampledCsbm ? "1" : nullptr);
        if (auto v = r.raw(sec, "self_loops")) c.self_loops = r.parse_on_off(sec, "self_loops", *v, ok);
        else r.note_default(sec, "self_loops", "off");

        auto read_path = [&](const char* key, std::string& target) {
            if (auto v = r.raw(sec, key)) target = *v;
            else if (c.source == GraphSource::Files)
                r.error(sec, key, "required for source = files");
        };
        read_path("edges", c.edges_path);
        read_path("features", c.features_path);
        read_path("labels", c.labels_path);
        read_path("splits", c.splits_path);
    }

    // ------------------------------------------------------------------ [hyperparams]
    {
        const std::string sec = "hyperparams";
        auto read_var = [&](const char* key, double& target) {
            if (auto v = r.raw(sec, key)) {
                double d = r.parse_double(sec, key, *v, ok);
                if (ok && d < 0.0) r.error(sec, key, "variance must be >= 0");
                else if (ok) target = d;
            } else {
                r.note_default(sec, key, format_double(target));
            }
        };
        read_var("sigma_w2", c.hp.sigma_w2);
        read_var("sigma_v2", c.hp.sigma_v2);
        read_var("sigma_H2", c.hp.sigma_H2);
        read_var("sigma_Q2", c.hp.sigma_Q2);
        read_var("sigma_K2", c.hp.sigma_K2);
        read_var("sigma_b2", c.hp.sigma_b2);
        read_var("sigma_V2", c.hp.sigma_V2);
        read_var("sigma_O2", c.hp.sigma_O2);
        read_var("sigma_lambda2", c.hp.sigma_lambda2);
        read_var("sigma_CE2", c.hp.sigma_CE2);
        if (auto v = r.raw(sec, "alpha")) {
            double a = r.parse_double(sec, "alpha", *v, ok);
            if (ok && (a < 0.0 || a > 1.0)) r.error(sec, "alpha", "alpha must lie in [0, 1]");
            else if (ok) c.hp.alpha = a;
        } else {
            r.note_default(sec, "alpha", format_double(c.hp.alpha));
        }
        if (auto v = r.raw(sec, "gtn_sigma_k2")) {
            c.hp.gtn_sigma_k2.clear();
            for (const auto& tok : r.split_list(*v)) {
                double d = r.parse_double(sec, "gtn_sigma_k2", tok, ok);
                if (ok) c.hp.gtn_sigma_k2.push_back(d);
            }
        }
    }

    // ------------------------------------------------------------------ [model]
    {
        const std::string sec = "model";
        if (auto v = r.raw(sec, "name")) {
            if (auto m = config_detail::parse_model(*v)) c.model = *m;
            else r.error(sec, "name", "unknown model: '" + *v + "'");
        } else if (c.kind == ExperimentKind::KernelSweep || c.kind == ExperimentKind::Classify) {
            r.note_default(sec, "name", "gcn");
        }
        if (auto v = r.raw(sec, "activation")) {
            if (*v == "relu") c.sweep.activation = Activation::Relu;
            else if (*v == "identity") c.sweep.activation = Activation::Identity;
            else r.error(sec, "activation", "expected relu or identity");
        } else {
            r.note_default(sec, "activation", "relu");
        }
        if (auto v = r.raw(sec, "layernorm")) c.sweep.layernorm = r.parse_on_off(sec, "layernorm", *v, ok);
        else r.note_default(sec, "layernorm", "on");
        if (auto v = r.raw(sec, "layernorm_first"))
            c.sweep.layernorm_before_activation = r.parse_on_off(sec, "layernorm_first", *v, ok);
        if (auto v = r.raw(sec, "gcn_operator")) {
            if (*v == "normalized") c.sweep.gcn_operator = GcnOperator::Normalized;
            else if (*v == "raw") c.sweep.gcn_operator = GcnOperator::Raw;
            else r.error(sec, "gcn_operator", "expected normalized or raw");
        }
        if (auto v = r.raw(sec, "gat_attention")) {
            if (*v == "linear") c.sweep.gat_attention = GatAttention::Linear;
            else if (*v == "relu") c.sweep.gat_attention = GatAttention::Relu;
            else r.error(sec, "gat_attention", "expected linear or relu");
        }
        if (auto v = r.raw(sec, "pe")) {
            if (*v == "none") c.pe_kind.reset();
            else if (*v == "laplacian-eigvec") c.pe_kind = PeKind::LaplacianEigvec;
            else if (*v == "spectral-reconstruction") c.pe_kind = PeKind::SpectralReconstruction;
            else if (*v == "centrality") c.pe_kind = PeKind::Centrality;
            else r.error(sec, "pe", "unknown positional encoding: '" + *v + "'");
        } else if (c.model == ModelTag::Graphormer) {
            r.note_default(sec, "pe", "none");
        }
        if (auto v = r.raw(sec, "rank_k")) {
            long long k = r.parse_int(sec, "rank_k", *v, ok);
            if (ok && k < 1) r.error(sec, "rank_k", "must be >= 1");
            else if (ok) c.pe_rank = static_cast<int>(k);
        } else if (c.pe_kind && *c.pe_kind != PeKind::Centrality) {
            r.note_default(sec, "rank_k", format_int(c.pe_rank));
        }
        if (auto v = r.raw(sec, "relation_max_bucket")) {
            long long b = r.parse_int(sec, "relation_max_bucket", *v, ok);
            if (ok && b < 0) r.error(sec, "relation_max_bucket", "must be >= 0");
            else if (ok) c.relation_max_bucket = static_cast<int>(b);
        }
        if (auto v = r.raw(sec, "token_layers")) {
            long long t = r.parse_int(sec, "token_layers", *v, ok);
            if (ok && t < 0) r.error(sec, "token_layers", "must be >= 0");
            else if (ok) c.sweep.token_layers = static_cast<int>(t);
        }
        if (auto v = r.raw(sec, "token_embed_dim")) {
            long long d = r.parse_int(sec, "token_embed_dim", *v, ok);
            if (ok && (d < 2 || d % 2 != 0)) r.error(sec, "token_embed_dim", "must be even and >= 2");
            else if (ok) c.sweep.token_embed_dim = static_cast<int>(d);
        }
        if (auto v = r.raw(sec, "token_epsilon")) {
            double e = r.parse_double(sec, "token_epsilon", *v, ok);
            if (ok) c.sweep.token_epsilon = e;
        }
        if (auto v = r.raw(sec, "decoder")) {
            if (*v == "identity") c.sweep.decoder = DecoderNonlinearity::Identity;
            else if (*v == "relu") c.sweep.decoder = DecoderNonlinearity::Relu;
            else r.error(sec, "decoder", "expected identity or relu");
        }
    }

    // ------------------------------------------------------------------ [sweep]
    {
        const std::string sec = "sweep";
        if (auto v = r.raw(sec, "depth")) {
            long long d = r.parse_int(sec, "depth", *v, ok);
            if (ok && d < 0) r.error(sec, "depth", "must be >= 0");
            else if (ok) c.depth = static_cast<int>(d);
        } else if (c.kind == ExperimentKind::KernelSweep) {
            r.note_default(sec, "depth", format_int(c.depth));
        }
        if (auto v = r.raw(sec, "depths")) {
            c.depths.clear();
            for (const auto& tok : r.split_list(*v)) {
                long long d = r.parse_int(sec, "depths", tok, ok);
                if (ok && d < 0) r.error(sec, "depths", "depths must be >= 0");
                else if (ok) c.depths.push_back(static_cast<int>(d));
            }
            if (c.depths.empty()) r.error(sec, "depths", "list must be nonempty");
        } else if (c.kind == ExperimentKind::Classify) {
            r.note_default(sec, "depths", "1,2,4");
        }
        if (auto v = r.raw(sec, "export_matrices"))
            c.export_matrices = r.parse_on_off(sec, "export_matrices", *v, ok);
    }

    // ------------------------------------------------------------------ [classify]
    {
        const std::string sec = "classify";
        if (auto v = r.raw(sec, "split_fractions")) {
            c.split_fractions.clear();
            double total = 0.0;
            for (const auto& tok : r.split_list(*v)) {
                double d = r.parse_double(sec, "split_fractions", tok, ok);
                if (ok) {
                    c.split_fractions.push_back(d);
                    total += d;
                }
            }
            if (c.split_fractions.size() != 3 || std::abs(total - 1.0) > 1e-9)
                r.error(sec, "split_fractions", "expected three fractions summing to 1");
        } else if (c.kind == ExperimentKind::Classify && c.source != GraphSource::Files) {
            r.note_default(sec, "split_fractions", "0.6,0.2,0.2");
        }
        if (auto v = r.raw(sec, "ridge_grid")) {
            c.ridge_grid.clear();
            for (const auto& tok : r.split_list(*v)) {
                double d = r.parse_double(sec, "ridge_grid", tok, ok);
                if (ok && d < 0.0) r.error(sec, "ridge_grid", "ridge values must be >= 0");
                else if (ok) c.ridge_grid.push_back(d);
            }
            if (c.ridge_grid.empty()) r.error(sec, "ridge_grid", "list must be nonempty");
        } else if (c.kind == ExperimentKind::Classify) {
            r.note_default(sec, "ridge_grid", "1e-06,0.0001,0.01,1,10");
        }
    }

    // ------------------------------------------------------------------ [phase]
    {
        const std::string sec = "phase";
        if (auto v = r.raw(sec, "models")) {
            c.phase_models.clear();
            for (const auto& tok : r.split_list(*v)) {
                if (auto m = config_detail::parse_model(tok)) {
                    if (*m == ModelTag::GTN) r.error(sec, "models", "gtn has no SBM closed form");
                    else c.phase_models.push_back(*m);
                } else {
                    r.error(sec, "models", "unknown model: '" + tok + "'");
                }
            }
        } else if (c.kind == ExperimentKind::SbmPhase) {
            r.note_default(sec, "models", "gcn,gat,graphormer,specformer");
        }
        auto read_grid = [&](const char* key, std::vector<double>& target) {
            if (auto v = r.raw(sec, key)) {
                target.clear();
                for (const auto& tok : r.split_list(*v)) {
                    double d = r.parse_double(sec, key, tok, ok);
                    if (ok && (d < 0.0 || d > 1.0)) r.error(sec, key, "probabilities must lie in [0, 1]");
                    else if (ok) target.push_back(d);
                }
            } else if (c.kind == ExperimentKind::SbmPhase) {
                target = {0.1, 0.3, 0.5, 0.7, 0.9};
                r.note_default(sec, key, "0.1,0.3,0.5,0.7,0.9");
            }
        };
        read_grid("p_values", c.p_values);
        read_grid("q_values", c.q_values);
        if (auto v = r.raw(sec, "depth")) {
            long long d = r.parse_int(sec, "depth", *v, ok);
            if (ok && d < 1) r.error(sec, "depth", "must be >= 1");
            else if (ok) c.phase_depth = static_cast<int>(d);
        } else if (c.kind == ExperimentKind::SbmPhase) {
            r.note_default(sec, "depth", format_int(c.phase_depth));
        }
        if (auto v = r.raw(sec, "tol")) {
            double t = r.parse_double(sec, "tol", *v, ok);
            if (ok && t <= 0.0) r.error(sec, "tol", "must be > 0");
            else if (ok) c.phase_tol = t;
        } else if (c.kind == ExperimentKind::SbmPhase) {
            r.note_default(sec, "tol", format_double(c.phase_tol));
        }
        if (auto v = r.raw(sec, "lambda1")) {
            double d = r.parse_double(sec, "lambda1", *v, ok);
            if (ok) c.lambda1 = d;
        }
        if (auto v = r.raw(sec, "lambda2")) {
            double d = r.parse_double(sec, "lambda2", *v, ok);
            if (ok) c.lambda2 = d;
        }
    }

    // ------------------------------------------------------------------ [mc]
    {
        const std::string sec = "mc";
        if (auto v = r.raw(sec, "widths")) {
            c.mc_widths.clear();
            for (const auto& tok : r.split_list(*v)) {
                long long w = r.parse_int(sec, "widths", tok, ok);
                if (ok && w < 1) r.error(sec, "widths", "widths must be >= 1");
                else if (ok) c.mc_widths.push_back(static_cast<int>(w));
            }
            if (c.mc_widths.empty()) r.error(sec, "widths", "list must be nonempty");
        } else if (c.kind == ExperimentKind::McValidate) {
            r.note_default(sec, "widths", "8,32,128,512");
        }
        if (auto v = r.raw(sec, "samples")) {
            long long s = r.parse_int(sec, "samples", *v, ok);
            if (ok && s < 2) r.error(sec, "samples", "must be >= 2");
            else if (ok) c.mc_samples = s;
        } else if (c.kind == ExperimentKind::McValidate) {
            r.note_default(sec, "samples", format_int(c.mc_samples));
        }
        if (auto v = r.raw(sec, "attention")) {
            if (*v == "softmax") c.mc_softmax = true;
            else if (*v == "identity") c.mc_softmax = false;
            else r.error(sec, "attention", "expected softmax or identity");
        } else if (c.kind == ExperimentKind::McValidate) {
            r.note_default(sec, "attention", "identity");
        }
        if (auto v = r.raw(sec, "sigma")) {
            if (*v == "relu") c.mc_relu_logits = true;
            else if (*v == "identity") c.mc_relu_logits = false;
            else r.error(sec, "sigma", "expected relu or identity");
        } else if (c.kind == ExperimentKind::McValidate) {
            r.note_default(sec, "sigma", "identity");
        }
    }

    // ------------------------------------------------------------------ cross-field
    if (c.kind == ExperimentKind::KernelSweep || c.kind == ExperimentKind::Classify) {
        if (c.model == ModelTag::Graphormer && !c.pe_kind &&
            !(c.hp.alpha == 1.0 && c.relation_max_bucket >= 0 && c.hp.sigma_b2 > 0.0))
            errors.push_back({"[model].pe",
                              "Graphormer needs a positional encoding (or alpha = 1 with "
                              "relation_max_bucket and sigma_b2 > 0)"});
        if (c.model == ModelTag::GTN)
            errors.push_back({"[model].name",
                              "GTN runs need heterogeneous relations; not available from the "
                              "CLI graph sources"});
        if (c.hp.sigma_b2 > 0.0 && c.relation_max_bucket < 0 && c.model == ModelTag::Graphormer)
            errors.push_back({"[model].relation_max_bucket",
                              "sigma_b2 > 0 requires a shortest-path relation bucket cap"});
    }
    if (c.kind == ExperimentKind::Classify && c.source == GraphSource::PopulationSbm)
        errors.push_back({"[graph].source",
                          "classification needs sampled-csbm or files (population SBM has no "
                          "per-node samples)"});
    if (c.kind == ExperimentKind::McValidate && c.model != ModelTag::GAT) {
        if (r.raw("model", "name"))
            errors.push_back({"[model].name", "mc-validate supports the GAT sampler"});
        c.model = ModelTag::GAT;
    }
    if (c.kind == ExperimentKind::McValidate && c.source == GraphSource::PopulationSbm)
        errors.push_back({"[graph].source",
                          "mc-validate needs node features (sampled-csbm or files)"});
    if (c.source == GraphSource::SampledCsbm && c.sbm.n <= 0)
        errors.push_back({"[graph].n", "sampled-csbm needs n"});

    for (auto& d : cf.unconsumed()) errors.push_back(std::move(d));

    if (!errors.empty()) throw ValidationError(std::move(errors));
    return c;
}

inline std::string ExperimentConfig::resolved_text() const {
    std::string s;
    auto kv = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    kv("kind", to_string(kind));
    kv("seed", format_int(static_cast<long long>(seed)));
    kv("out", out_dir);
    kv("source", source == GraphSource::PopulationSbm   ? "population-sbm"
                 : source == GraphSource::SampledCsbm   ? "sampled-csbm"
                                                        : "files");
    kv("n", format_int(sbm.n));
    kv("p", format_double(sbm.p));
    kv("q", format_double(sbm.q));
    kv("x0", format_double(sbm.x0));
    kv("y0", format_double(sbm.y0));
    kv("feature_dim", format_int(feature_dim));
    kv("mean_separation", format_double(mean_separation));
    kv("self_loops", self_loops ? "on" : "off");
    if (source == GraphSource::Files) {
        kv("edges", edges_path);
        kv("features", features_path);
        kv("labels", labels_path);
        kv("splits", splits_path);
    }
    kv("model", to_string(model));
    kv("activation", sweep.activation == Activation::Relu ? "relu" : "identity");
    kv("layernorm", sweep.layernorm ? "on" : "off");
    kv("gcn_operator", sweep.gcn_operator == GcnOperator::Normalized ? "normalized" : "raw");
    kv("gat_attention", sweep.gat_attention == GatAttention::Linear ? "linear" : "relu");
    kv("pe", pe_kind ? to_string(*pe_kind) : "none");
    kv("rank_k", format_int(pe_rank));
    kv("relation_max_bucket", format_int(relation_max_bucket));
    kv("token_layers", format_int(sweep.token_layers));
    kv("token_embed_dim", format_int(sweep.token_embed_dim));
    kv("token_epsilon", format_double(sweep.token_epsilon));
    kv("decoder", sweep.decoder == DecoderNonlinearity::Identity ? "identity" : "relu");
    kv("sigma_w2", format_double(hp.sigma_w2));
    kv("sigma_v2", format_double(hp.sigma_v2));
    kv("sigma_H2", format_double(hp.sigma_H2));
    kv("sigma_Q2", format_double(hp.sigma_Q2));
    kv("sigma_K2", format_double(hp.sigma_K2));
    kv("sigma_b2", format_double(hp.sigma_b2));
    kv("sigma_V2", format_double(hp.sigma_V2));
    kv("sigma_O2", format_double(hp.sigma_O2));
    kv("sigma_lambda2", format_double(hp.sigma_lambda2));
    kv("sigma_CE2", format_double(hp.sigma_CE2));
    kv("alpha", format_double(hp.alpha));
    switch (kind) {
        case ExperimentKind::KernelSweep:
            kv("depth", format_int(depth));
            kv("export_matrices", export_matrices ? "on" : "off");
            break;
        case ExperimentKind::Classify: {
            std::string ds;
            for (int d : depths) ds += (ds.empty() ? "" : ",") + format_int(d);
            kv("depths", ds);
            std::string fr;
            for (double f : split_fractions) fr += (fr.empty() ? "" : ",") + format_double(f);
            kv("split_fractions", fr);
            std::string rg;
            for (double rr : ridge_grid) rg += (rg.empty() ? "" : ",") + format_double(rr);
            kv("ridge_grid", rg);
            break;
        }
        case ExperimentKind::SbmPhase: {
            std::string ms;
            for (ModelTag m : phase_models) ms += (ms.empty() ? "" : ",") + to_string(m);
            kv("models", ms);
            std::string ps, qs;
            for (double p : p_values) ps += (ps.empty() ? "" : ",") + format_double(p);
            for (double q : q_values) qs += (qs.empty() ? "" : ",") + format_double(q);
            kv("p_values", ps);
            kv("q_values", qs);
            kv("phase_depth", format_int(phase_depth));
            kv("phase_tol", format_double(phase_tol));
            if (lambda1) kv("lambda1", format_double(*lambda1));
            if (lambda2) kv("lambda2", format_double(*lambda2));
            break;
        }
        case ExperimentKind::McValidate: {
            std::string ws;
            for (int w : mc_widths) ws += (ws.empty() ? "" : ",") + format_int(w);
            kv("widths", ws);
            kv("samples", format_int(mc_samples));
            kv("attention", mc_softmax ? "softmax" : "identity");
            kv("sigma", mc_relu_logits ? "relu" : "identity");
            break;
        }
    }
    return s;
}

} // namespace graphgp
