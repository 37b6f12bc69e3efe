// Locale-independent CSV/JSON output with 17 significant digits.
#pragma once

#include "json.hpp"

#include <charconv>
#include <span>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "anicurve/convex_body.hpp"
#include "anicurve/flow_engine.hpp"
#include "anicurve/harness/config.hpp"

namespace anicurve::harness {

using Json = nlohmann::ordered_json;

inline std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : path_(path), out_(path) {
        if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
        row_strings(header);
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << fmt(values[i]);
        }
        out_ << '\n';
        check();
    }

    void row_strings(const std::vector<std::string>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << values[i];
        }
        out_ << '\n';
        check();
    }

private:
    void check() {
        if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
    }

    std::filesystem::path path_;
    std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline std::vector<std::string> diagnostics_header(std::span<const double> z_exponents) {
    std::vector<std::string> h{"t", "tau", "R", "eta", "J"};
    for (double e : z_exponents) h.push_back("Z[" + fmt(e) + "]");
    for (const char* s : {"umin", "umax", "gradmax", "lambda_min", "lambda_max", "Q_min", "Q_max"}) h.emplace_back(s);
    return h;
}

inline std::vector<double> diagnostics_row(const DiagnosticsRecord& d) {
    std::vector<double> r{d.t, d.tau, d.R, d.eta, d.J};
    r.insert(r.end(), d.Z.begin(), d.Z.end());
    for (double v : {d.umin, d.umax, d.gradmax, d.lambda_min, d.lambda_max, d.Q_min, d.Q_max}) r.push_back(v);
    return r;
}

inline void write_diagnostics(const std::filesystem::path& path, const Trajectory& tr,
                              std::span<const double> z_exponents) {
    CsvWriter w(path, diagnostics_header(z_exponents));
    for (const auto& d : tr.diagnostics) w.row(diagnostics_row(d));
}

inline void write_field(const std::filesystem::path& path, const ScalarField& u, const std::string& column) {
    CsvWriter w(path, {"theta", column});
    for (int i = 0; i < u.size(); ++i) w.row({u.grid().theta(i), u[i]});
}

inline void write_profile(const std::filesystem::path& path, const SupportField& u) {
    CsvWriter w(path, {"rho", "z"});
    for (const auto& p : embed(u)) w.row({p.rho, p.z});
}

inline void write_snapshots(const std::filesystem::path& dir, const Trajectory& tr, const std::string& column) {
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
        write_field(dir / ("snapshot_" + std::to_string(i) + ".csv"), tr.snapshots[i].state, column);
    }
}

inline Json record_json(const DiagnosticsRecord& d, std::span<const double> z_exponents) {
    Json z = Json::object();
    for (std::size_t i = 0; i < z_exponents.size() && i < d.Z.size(); ++i) z[fmt(z_exponents[i])] = d.Z[i];
    return Json{{"t", d.t},           {"tau", d.tau},         {"R", d.R},
                {"eta", d.eta},       {"J", d.J},             {"Z", z},
                {"umin", d.umin},     {"umax", d.umax},       {"gradmax", d.gradmax},
                {"lambda_min", d.lambda_min}, {"lambda_max", d.lambda_max}, {"Q_min", d.Q_min},
                {"Q_max", d.Q_max}};
}

/// Everything needed to reconstruct a run.
inline Json params_echo(const ExperimentConfig& cfg, Experiment e) {
    return Json{{"experiment", to_string(e)},
                {"N", cfg.N},
                {"k", cfg.k},
                {"beta", cfg.beta},
                {"alpha", cfg.alpha},
                {"regime", anicurve::to_string(cfg.regime())},
                {"f", cfg.f.text.empty() ? std::string("constant 1") : cfg.f.text},
                {"mode", anicurve::to_string(cfg.mode)},
                {"initial", cfg.initial.text.empty() ? std::string("round 1") : cfg.initial.text},
                {"t_max", cfg.stop.t_max},
                {"tol_conv", cfg.stop.tol_conv},
                {"R_blowup", cfg.stop.R_blowup},
                {"dt_min", cfg.stop.dt_min},
                {"cfl", cfg.stop.c_cfl},
                {"record_every", cfg.stop.record_every},
                {"snapshot_every", cfg.stop.snapshot_every},
                {"c", cfg.c},
                {"trials", cfg.trials},
                {"psi_alpha", cfg.psi_alpha},
                {"psi_k", cfg.psi_k},
                {"psi_beta", cfg.psi_beta},
                {"theta", cfg.theta},
                {"samples", cfg.samples},
                {"horizon", cfg.horizon},
                {"radii", cfg.radii},
                {"seed", cfg.seed}};
}

}  // namespace anicurve::harness
