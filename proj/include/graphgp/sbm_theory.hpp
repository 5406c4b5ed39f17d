#pragma once

#include "graphgp/graph.hpp"
#include "graphgp/logscalar.hpp"

#include <vector>

// Scalar closed-form kernel evolutions under the population 2-block SBM and
// the oversmoothing diagnostics. All trajectories are carried in signed
// log-magnitude form: the GAT kernel grows like G^(2^l) and overflows doubles
// near depth 10, while every statement of interest is about ratios.

namespace graphgp {

/// Block scalars (x = intra, y = inter) of a block-constant kernel at layer l.
struct SbmKernelState {
    LogScalar x;
    LogScalar y;
    int layer = 0;
};

/// GAT-GP growth/preservation factors. F >= 1 (p/q outside (2-sqrt3, 2+sqrt3))
/// is the no-rank-collapse condition; F = 1/2 iff p = q.
struct GatFactors {
    double G = 0.0; // (x0+y0)(p+q)^2 (n/2)^2
    double F = 0.0; // 2(p^2 - pq + q^2)/(p+q)^2
};

namespace detail {

/// Shared two-eigenmode evolution: S_l = (x0+y0) m1^{2l}, D_l = (x0-y0) m2^{2l},
/// x = (S+D)/2, y = (S-D)/2. GCN uses the adjacency block eigenvalues for
/// (m1, m2); Specformer uses the learned filter values.
inline SbmKernelState two_mode_state(double x0, double y0, double m1, double m2, int depth) {
    LogScalar s = LogScalar::from_double(x0 + y0) * LogScalar::from_double(m1).pow(2LL * depth);
    LogScalar d = LogScalar::from_double(x0 - y0) * LogScalar::from_double(m2).pow(2LL * depth);
    SbmKernelState st;
    st.x = (s + d).scaled(0.5);
    st.y = (s - d).scaled(0.5);
    st.layer = depth;
    return st;
}

} // namespace detail

/// GCN-GP closed form:
///   x_l, y_l = 1/2 (n/2)^{2l} [ (x0+y0)(p+q)^{2l} +- (x0-y0)(p-q)^{2l} ].
inline SbmKernelState gcn_sbm(const SbmParams& params, int depth) {
    params.validate();
    if (depth < 0) throw InvalidParameterError("sbm_closed_forms.gcn_sbm", "depth must be >= 0");
    double half = params.n / 2.0;
    return detail::two_mode_state(params.x0, params.y0, half * (params.p + params.q),
                                  half * (params.p - params.q), depth);
}

/// Specformer-GP closed form with learned filter values (lambda1, lambda2):
///   x_l, y_l = 1/2 [ (x0+y0) lambda1^{2l} +- (x0-y0) lambda2^{2l} ].
/// Choosing lambda1 = (n/2)(p+q), lambda2 = (n/2)(p-q) reproduces gcn_sbm.
inline SbmKernelState specformer_sbm(const SbmParams& params, double lambda1, double lambda2,
                                     int depth) {
    params.validate();
    if (depth < 0)
        throw InvalidParameterError("sbm_closed_forms.specformer_sbm", "depth must be >= 0");
    return detail::two_mode_state(params.x0, params.y0, lambda1, lambda2, depth);
}

/// Graphormer-GP mixing trajectory (unnormalized; the per-layer trace scalar
/// is deliberately excluded):
///   x_l = alpha^l x0 + (1 - alpha^l) p,  y_l = alpha^l y0 + (1 - alpha^l) q.
inline SbmKernelState graphormer_sbm(const SbmParams& params, double alpha, int depth) {
    params.validate();
    if (alpha < 0.0 || alpha > 1.0)
        throw InvalidParameterError("sbm_closed_forms.graphormer_sbm", "alpha must lie in [0, 1]");
    if (depth < 0)
        throw InvalidParameterError("sbm_closed_forms.graphormer_sbm", "depth must be >= 0");
    double al = std::pow(alpha, depth);
    SbmKernelState st;
    st.x = LogScalar::from_double(al * params.x0 + (1.0 - al) * params.p);
    st.y = LogScalar::from_double(al * params.y0 + (1.0 - al) * params.q);
    st.layer = depth;
    return st;
}

/// GAT-GP block scalars under SBM. Evolves the exact coupled recurrence
///   S_{l+1} = (n/2)^2 [ (p+q)^2 S_l^2 + (p^2+q^2) D_l^2 ]
///   D_{l+1} = 2 (n/2)^2 (p^2 - pq + q^2) D_l S_l
/// in log space (both sequences stay positive for valid initializations), and
/// reports the growth factor G and preservation factor F.
inline std::pair<SbmKernelState, GatFactors> gat_sbm(const SbmParams& params, int depth) {
    const char* where = "sbm_closed_forms.gat_sbm";
    params.validate();
    if (depth < 0) throw InvalidParameterError(where, "depth must be >= 0");
    if (!(params.x0 + params.y0 > 0.0))
        throw InvalidParameterError(where, "need x0 + y0 > 0");
    double p = params.p, q = params.q;
    if (!(p + q > 0.0)) throw InvalidParameterError(where, "need p + q > 0");
    double half = params.n / 2.0;

    GatFactors factors;
    factors.G = (params.x0 + params.y0) * (p + q) * (p + q) * half * half;
    factors.F = 2.0 * (p * p - p * q + q * q) / ((p + q) * (p + q));

    double log_half2 = 2.0 * std::log(half);
    double log_sum_coef = log_half2 + 2.0 * std::log(p + q);
    double log_diff_coef = std::log(p * p + q * q) + log_half2;
    // p^2 - pq + q^2 > 0 whenever p + q > 0
    double log_delta_coef = std::log(2.0) + log_half2 + std::log(p * p - p * q + q * q);

    double log_s = std::log(params.x0 + params.y0);
    // x0 > |y0| guarantees D_0 = x0 - y0 > 0
    double log_d = std::log(params.x0 - params.y0);
    for (int l = 0; l < depth; ++l) {
        double term_s = log_sum_coef + 2.0 * log_s;
        double term_d = log_diff_coef + 2.0 * log_d;
        double m = std::max(term_s, term_d);
        double next_s = m + std::log(std::exp(term_s - m) + std::exp(term_d - m));
        double next_d = log_delta_coef + log_d + log_s;
        log_s = next_s;
        log_d = next_d;
    }

    LogScalar s{log_s, 1}, d{log_d, 1};
    SbmKernelState st;
    st.x = (s + d).scaled(0.5);
    st.y = (s - d).scaled(0.5);
    st.layer = depth;
    return {st, factors};
}

/// Discriminability ratio y_l / x_l.
inline double ratio_metric(const SbmKernelState& state) {
    if (state.x.is_zero())
        throw DegenerateError("sbm_closed_forms.ratio_metric", "x is zero at layer " +
                                                                   std::to_string(state.layer));
    return state.y.ratio_to(state.x);
}

enum class OversmoothingVerdict { Oversmoothing, StructurePreserved, Undetermined };

inline std::string to_string(OversmoothingVerdict v) {
    switch (v) {
        case OversmoothingVerdict::Oversmoothing: return "oversmoothing";
        case OversmoothingVerdict::StructurePreserved: return "structure-preserved";
        case OversmoothingVerdict::Undetermined: return "undetermined";
    }
    return "?";
}

struct OversmoothingReport {
    OversmoothingVerdict verdict = OversmoothingVerdict::Undetermined;
    double gamma_estimate = 0.0; // y/x at the final layer
};

/// Verdict over a trajectory: oversmoothing iff |y/x - 1| < tol at the final
/// layer and the gap is non-increasing over the last half of the trajectory;
/// structure-preserved iff the final gap is >= tol.
inline OversmoothingReport oversmoothing_diagnosis(const std::vector<SbmKernelState>& trajectory,
                                                   double tol = 1e-3) {
    if (trajectory.size() < 2)
        throw InvalidParameterError("sbm_closed_forms.oversmoothing_diagnosis",
                                    "trajectory must have length >= 2");
    std::vector<double> gap;
    gap.reserve(trajectory.size());
    for (const auto& st : trajectory) gap.push_back(std::abs(ratio_metric(st) - 1.0));

    OversmoothingReport report;
    report.gamma_estimate = ratio_metric(trajectory.back());

    double final_gap = gap.back();
    if (final_gap >= tol) {
        report.verdict = OversmoothingVerdict::StructurePreserved;
        return report;
    }
    std::size_t start = trajectory.size() / 2;
    bool monotone = true;
    for (std::size_t i = start; i + 1 < gap.size(); ++i) {
        if (gap[i + 1] > gap[i] * (1.0 + 1e-12) + 1e-300) {
            monotone = false;
            break;
        }
    }
    report.verdict = monotone ? OversmoothingVerdict::Oversmoothing
                              : OversmoothingVerdict::Undetermined;
    return report;
}

} // namespace graphgp
