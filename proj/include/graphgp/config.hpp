#pragma once

#include "graphgp/common.hpp"
#include "graphgp/graphormer.hpp"
#include "graphgp/kernels.hpp"
#include "graphgp/sweep.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

// Experiment configuration: line-oriented "key = value" text with [section]
// headers, '#' comments, comma-separated lists. Unknown sections or keys are
// validation errors; every omitted field with a default is reported as a
// resolved default so runs are fully reproducible from the manifest.

namespace graphgp {

/// One field-level diagnostic: "[section].key: message".
struct ConfigDiagnostic {
    std::string path;
    std::string message;
    std::string to_string() const { return path + ": " + message; }
};

class ValidationError : public Error {
public:
    ValidationError(std::vector<ConfigDiagnostic> diagnostics)
        : Error("cli_experiments.validate", join(diagnostics)),
          diagnostics_(std::move(diagnostics)) {}
    const std::vector<ConfigDiagnostic>& diagnostics() const { return diagnostics_; }

private:
    static std::string join(const std::vector<ConfigDiagnostic>& ds) {
        std::string out;
        for (const auto& d : ds) {
            if (!out.empty()) out += "\n";
            out += d.to_string();
        }
        return out;
    }
    std::vector<ConfigDiagnostic> diagnostics_;
};

// ----------------------------------------------------------------------------
// Raw key/value layer
// ----------------------------------------------------------------------------

class ConfigFile {
public:
    static ConfigFile parse(const std::string& text) {
        ConfigFile cf;
        std::istringstream in(text);
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw ParseError("cli_experiments.config",
                                     "line " + std::to_string(line_no) + ": unterminated section header");
                section = trim(t.substr(1, t.size() - 2));
                cf.sections_[section]; // record even if empty
                continue;
            }
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ParseError("cli_experiments.config",
                                 "line " + std::to_string(line_no) + ": expected 'key = value'");
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (key.empty())
                throw ParseError("cli_experiments.config",
                                 "line " + std::to_string(line_no) + ": empty key");
            cf.sections_[section][key] = {value, line_no};
        }
        return cf;
    }

    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };

    const Entry* find(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        if (s == sections_.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        k->second.consumed = true;
        return &k->second;
    }

    bool has_section(const std::string& section) const {
        return sections_.count(section) > 0;
    }

    /// Unconsumed keys after parsing = unknown fields.
    std::vector<ConfigDiagnostic> unconsumed() const {
        std::vector<ConfigDiagnostic> out;
        for (const auto& [sec, keys] : sections_)
            for (const auto& [key, entry] : keys)
                if (!entry.consumed)
                    out.push_back({"[" + sec + "]." + key,
                                   "unknown field (line " + std::to_string(entry.line) + ")"});
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        std::size_t e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::map<std::string, Entry>> sections_;
};

// ----------------------------------------------------------------------------
// Typed experiment configuration
// ----------------------------------------------------------------------------

enum class ExperimentKind { KernelSweep, SbmPhase, McValidate, Classify };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::KernelSweep: return "kernel-sweep";
        case ExperimentKind::SbmPhase: return "sbm-phase";
        case ExperimentKind::McValidate: return "mc-validate";
        case ExperimentKind::Classify: return "classify";
    }
    return "?";
}

enum class GraphSource { PopulationSbm, SampledCsbm, Files };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::KernelSweep;
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    // graph
    GraphSource source = GraphSource::PopulationSbm;
    SbmParams sbm;
    int feature_dim = 8;
    double mean_separation = 1.0;
    bool self_loops = false;
    std::string edges_path, features_path, labels_path, splits_path;

    // model + sweep options
    ModelTag model = ModelTag::GCN;
    HyperParams hp;
    SweepOptions sweep;
    std::optional<PeKind> pe_kind;
    int pe_rank = 8;
    int relation_max_bucket = -1; // <0 = no relation

    // kernel-sweep / classify
    int depth = 4;
    std::vector<int> depths{1, 2, 4};
    bool export_matrices = true;

    // classify
    std::vector<double> split_fractions{0.6, 0.2, 0.2};
    std::vector<double> ridge_grid{1e-6, 1e-4, 1e-2, 1.0, 10.0};

    // sbm-phase
    std::vector<ModelTag> phase_models{ModelTag::GCN, ModelTag::GAT, ModelTag::Graphormer,
                                       ModelTag::Specformer};
    std::vector<double> p_values;
    std::vector<double> q_values;
    int phase_depth = 30;
    double phase_tol = 1e-3;
    std::optional<double> lambda1, lambda2; // Specformer phase; default GCN-equivalent

    // mc-validate
    std::vector<int> mc_widths{8, 32, 128, 512};
    long long mc_samples = 2000;
    bool mc_softmax = false;
    bool mc_relu_logits = false;

    std::vector<std::string> resolved_defaults;

    /// Key = value lines of every field, in a fixed order (manifest payload).
    std::string resolved_text() const;
};

namespace config_detail {

struct Reader {
    const ConfigFile& cf;
    std::vector<ConfigDiagnostic>& errors;
    std::vector<std::string>& resolved;

    std::string path(const std::string& sec, const std::string& key) const {
        return "[" + sec + "]." + key;
    }

    void error(const std::string& sec, const std::string& key, const std::string& msg) {
        errors.push_back({path(sec, key), msg});
    }

    std::optional<std::string> raw(const std::string& sec, const std::string& key) {
        const auto* e = cf.find(sec, key);
        if (!e) return std::nullopt;
        return e->value;
    }

    void note_default(const std::string& sec, const std::string& key, const std::string& value) {
        resolved.push_back("resolved-default: " + path(sec, key) + " = " + value);
    }

    template <typename Parse>
    bool assign(const std::string& sec, const std::string& key, Parse&& parse,
                const std::string& default_repr) {
        auto v = raw(sec, key);
        if (!v) {
            if (!default_repr.empty()) note_default(sec, key, default_repr);
            return false;
        }
        parse(*v);
        return true;
    }

    double parse_double(const std::string& sec, const std::string& key, const std::string& v,
                        bool& ok) {
        try {
            std::size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing");
            ok = true;
            return d;
        } catch (const std::exception&) {
            error(sec, key, "not a number: '" + v + "'");
            ok = false;
            return 0.0;
        }
    }

    long long parse_int(const std::string& sec, const std::string& key, const std::string& v,
                        bool& ok) {
        try {
            std::size_t pos = 0;
            long long d = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing");
            ok = true;
            return d;
        } catch (const std::exception&) {
            error(sec, key, "not an integer: '" + v + "'");
            ok = false;
            return 0;
        }
    }

    std::vector<std::string> split_list(const std::string& v) {
        std::vector<std::string> out;
        std::string cur;
        std::istringstream in(v);
        while (std::getline(in, cur, ',')) {
            std::size_t b = cur.find_first_not_of(" \t");
            std::size_t e = cur.find_last_not_of(" \t");
            out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
        }
        return out;
    }

    bool parse_on_off(const std::string& sec, const std::string& key, const std::string& v,
                      bool& ok) {
        ok = true;
        if (v == "on" || v == "true") return true;
        if (v == "off" || v == "false") return false;
        error(sec, key, "expected on/off: '" + v + "'");
        ok = false;
        return false;
    }
};

inline std::optional<ModelTag> parse_model(const std::string& v) {
    if (v == "gcn") return ModelTag::GCN;
    if (v == "gat") return ModelTag::GAT;
    if (v == "graphormer") return ModelTag::Graphormer;
    if (v == "specformer") return ModelTag::Specformer;
    if (v == "gtn") return ModelTag::GTN;
    return std::nullopt;
}

} // namespace config_detail

/// Parses and fully validates an experiment configuration. Throws
/// ValidationError carrying one diagnostic per offending field; the resolved
/// defaults are recorded on the returned config.
ExperimentConfig parse_experiment_config(const std::string& text);

} // namespace graphgp

#include "graphgp/config_impl.hpp"
