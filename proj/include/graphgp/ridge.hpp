#pragma once

#include "graphgp/dataset.hpp"
#include "graphgp/sweep.hpp"

#include <chrono>
#include <vector>

// Kernel-ridge multi-output GP classification: one-hot targets, a solve of
// (K_tt + lambda I) alpha = Y on the train block per grid point, validation
// model selection, argmax prediction.

namespace graphgp {

struct ClassificationResult {
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
    double test_accuracy = 0.0;
    double chosen_ridge = 0.0;
    // Per-split confusion counts, (true class, predicted class).
    IntMatrix train_confusion;
    IntMatrix val_confusion;
    IntMatrix test_confusion;
};

namespace detail {

inline Matrix submatrix(const Matrix& k, const std::vector<int>& rows,
                        const std::vector<int>& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                k(rows[i], cols[j]);
    return out;
}

/// SPD solve with jitter escalation: on factorization failure (or residual
/// above 1e-8 * ||Y||_F) adds 1e-10 * trace/n, escalating tenfold up to three
/// times. LayerNorm kernels are unit-diagonal and occasionally near-singular.
inline Matrix ridge_solve(const Matrix& ktt, double ridge, const Matrix& y,
                          const std::string& where) {
    Eigen::Index m = ktt.rows();
    double base_jitter = 1e-10 * ktt.trace() / static_cast<double>(m);
    if (base_jitter <= 0.0) base_jitter = 1e-12;
    double jitter = 0.0;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        Matrix system = ktt + (ridge + jitter) * Matrix::Identity(m, m);
        Eigen::LLT<Matrix> llt(system);
        if (llt.info() == Eigen::Success) {
            Matrix alpha = llt.solve(y);
            double residual = (system * alpha - y).norm();
            if (residual < 1e-8 * std::max(y.norm(), 1e-300)) return alpha;
        }
        jitter = attempt == 0 ? base_jitter : jitter * 10.0;
    }
    throw NumericalError(where, "ridge system singular even with jitter at lambda_r = " +
                                    std::to_string(ridge));
}

inline int argmax_class(const Eigen::RowVectorXd& scores) {
    int best = 0;
    for (int c = 1; c < scores.size(); ++c)
        if (scores(c) > scores(best)) best = c; // ties keep the smallest index
    return best;
}

} // namespace detail

/// Fits one-hot ridge regression on the train block for every grid value,
/// picks the ridge maximizing validation accuracy (ties -> smallest), and
/// reports accuracies and confusion counts at the chosen value.
inline ClassificationResult kernel_ridge_classify(const Matrix& k, const IntVector& labels,
                                                  const SplitIndices& splits,
                                                  const std::vector<double>& ridge_grid) {
    const std::string where = "gp_inference.kernel_ridge_classify";
    int n = static_cast<int>(k.rows());
    if (labels.size() != n) throw InvalidParameterError(where, "labels/kernel size mismatch");
    if (ridge_grid.empty()) throw InvalidParameterError(where, "ridge grid must be nonempty");
    for (double r : ridge_grid)
        if (r < 0.0) throw InvalidParameterError(where, "ridge values must be >= 0");
    splits.validate(n);

    int classes = labels.maxCoeff() + 1;
    Matrix y = Matrix::Zero(static_cast<Eigen::Index>(splits.train.size()), classes);
    for (std::size_t i = 0; i < splits.train.size(); ++i)
        y(static_cast<Eigen::Index>(i), labels(splits.train[i])) = 1.0;

    Matrix ktt = detail::submatrix(k, splits.train, splits.train);

    auto evaluate = [&](const Matrix& alpha, const std::vector<int>& idx, IntMatrix* confusion) {
        if (idx.empty()) return 0.0;
        Matrix scores = detail::submatrix(k, idx, splits.train) * alpha;
        if (confusion) *confusion = IntMatrix::Zero(classes, classes);
        long correct = 0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            int pred = detail::argmax_class(scores.row(static_cast<Eigen::Index>(i)));
            int truth = labels(idx[i]);
            if (confusion) (*confusion)(truth, pred) += 1;
            if (pred == truth) ++correct;
        }
        return static_cast<double>(correct) / static_cast<double>(idx.size());
    };

    double best_val = -1.0;
    double best_ridge = ridge_grid.front();
    Matrix best_alpha;
    for (double ridge : ridge_grid) {
        Matrix alpha = detail::ridge_solve(ktt, ridge, y, where);
        double val_acc = evaluate(alpha, splits.val, nullptr);
        if (val_acc > best_val || (val_acc == best_val && ridge < best_ridge)) {
            best_val = val_acc;
            best_ridge = ridge;
            best_alpha = std::move(alpha);
        }
    }

    ClassificationResult result;
    result.chosen_ridge = best_ridge;
    result.train_accuracy = evaluate(best_alpha, splits.train, &result.train_confusion);
    result.val_accuracy = evaluate(best_alpha, splits.val, &result.val_confusion);
    result.test_accuracy = evaluate(best_alpha, splits.test, &result.test_confusion);
    return result;
}

/// One row of the depth/accuracy sweep table.
struct DepthAccuracyRow {
    ModelTag model = ModelTag::GCN;
    int depth = 0;
    std::string pe_kind; // empty when no positional encoding
    double alpha = 0.0;
    double val_accuracy = 0.0;
    double test_accuracy = 0.0;
    double chosen_ridge = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN(); // inter/intra when labels define blocks
    double runtime_ms = 0.0;
};

/// Runs the kernel trajectory once to max(depths) and classifies each
/// requested prefix depth.
inline std::vector<DepthAccuracyRow> depth_accuracy_sweep(const Graph& g, ModelTag model,
                                                          const HyperParams& hp,
                                                          const std::vector<int>& depths,
                                                          const SplitIndices& splits,
                                                          const SweepOptions& options,
                                                          const std::vector<double>& ridge_grid) {
    const std::string where = "gp_inference.depth_accuracy_sweep";
    if (!g.labels) throw InvalidParameterError(where, "graph has no labels");
    if (depths.empty()) throw InvalidParameterError(where, "depth list must be nonempty");
    int max_depth = 0;
    for (int d : depths) {
        if (d < 0) throw InvalidParameterError(where, "depths must be >= 0");
        max_depth = std::max(max_depth, d);
    }

    auto trajectory = run_depth_sweep(g, model, hp, max_depth, options);

    std::vector<DepthAccuracyRow> table;
    table.reserve(depths.size());
    for (int d : depths) {
        auto start = std::chrono::steady_clock::now();
        const KernelMatrix& km = trajectory[static_cast<std::size_t>(d)];
        ClassificationResult res = kernel_ridge_classify(km.values, *g.labels, splits, ridge_grid);
        auto stop = std::chrono::steady_clock::now();

        DepthAccuracyRow row;
        row.model = model;
        row.depth = d;
        row.pe_kind = options.pe ? to_string(options.pe->kind) : "";
        row.alpha = hp.alpha;
        row.val_accuracy = res.val_accuracy;
        row.test_accuracy = res.test_accuracy;
        row.chosen_ridge = res.chosen_ridge;
        LayerSummary s = summarize_kernel(km, g.labels);
        if (s.has_community_stats) row.ratio = s.ratio;
        row.runtime_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start)
                .count();
        table.push_back(std::move(row));
    }
    return table;
}

} // namespace graphgp
