// Key-value experiment configuration: "key = value" lines, "#" comments.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "anicurve/flow_engine.hpp"
#include "anicurve/functionals.hpp"

namespace anicurve::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Experiment { flow, soliton, counterexample, validate, barriers };

inline const char* to_string(Experiment e) {
    switch (e) {
    case Experiment::flow:
        return "flow";
    case Experiment::soliton:
        return "soliton";
    case Experiment::counterexample:
        return "counterexample";
    case Experiment::validate:
        return "validate";
    case Experiment::barriers:
        return "barriers";
    }
    return "?";
}

inline Experiment experiment_from_string(const std::string& s) {
    if (s == "flow") return Experiment::flow;
    if (s == "soliton") return Experiment::soliton;
    if (s == "counterexample") return Experiment::counterexample;
    if (s == "validate") return Experiment::validate;
    if (s == "barriers") return Experiment::barriers;
    throw ConfigError("unknown experiment '" + s + "' (expected flow, soliton, counterexample, validate, barriers)");
}

/// Anisotropy as written in the config; the tabulated forms need the grid.
struct AnisotropySpec {
    enum class Kind { constant, power_linear, cosine, table } kind = Kind::constant;
    double value = 1.0;               // constant
    double eps = 0.0;                 // power_linear, cosine
    std::optional<double> exponent;   // power_linear; default 1 + k beta - alpha
    int mode = 2;                     // cosine: 1 + eps cos(mode theta)
    std::string path;                 // table: CSV with theta,f columns
    std::string text;                 // as written

    [[nodiscard]] Anisotropy build(const Grid& grid, int k, double beta, double alpha) const;
};

struct InitialSpec {
    enum class Kind { round, translate, spheroid, file } kind = Kind::round;
    double a = 1.0;  // round radius; translate offset; spheroid equatorial semi-axis
    double b = 1.0;  // translate radius; spheroid polar semi-axis
    std::string path;
    std::string text;

    [[nodiscard]] ScalarField build(const Grid& grid) const;
};

struct ExperimentConfig {
    std::optional<Experiment> experiment;
    int N = 128;
    int k = 1;
    double beta = 2.0;
    double alpha = -2.0;
    AnisotropySpec f;
    FlowMode mode = FlowMode::nef2;
    InitialSpec initial;
    StoppingConfig stop;
    std::string out = "out";
    std::uint64_t seed = 0;

    // soliton
    double c = 1.0;
    int trials = 3;
    // counterexample: sub-solution exponents and the A/B run
    double psi_alpha = 1.0;
    int psi_k = 1;
    double psi_beta = 1.0;
    double theta = 2.0;
    int samples = 1000;
    double horizon = 2.0;
    // barriers: initial radii of the round runs
    std::vector<double> radii{0.5, 2.0};

    [[nodiscard]] Regime regime() const { return FlowParams::unchecked(k, beta, alpha).regime(); }
    [[nodiscard]] FlowParams params(const Grid& grid) const {
        return FlowParams::make(k, beta, alpha, f.build(grid, k, beta, alpha));
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError(where + ": expected a number, got '" + s + "'");
    return v;
}

inline long long parse_int(const std::string& s, const std::string& where) {
    long long v = 0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError(where + ": expected an integer, got '" + s + "'");
    return v;
}

inline std::vector<std::vector<double>> read_two_columns(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::vector<std::vector<double>> cols(2);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(path + ":" + std::to_string(n) + ": expected two columns");
        const std::string a = trim(line.substr(0, comma));
        const std::string b = trim(line.substr(comma + 1));
        double x = 0.0, y = 0.0;
        const auto ra = std::from_chars(a.data(), a.data() + a.size(), x);
        const auto rb = std::from_chars(b.data(), b.data() + b.size(), y);
        if (ra.ec != std::errc() || rb.ec != std::errc()) {
            if (cols[0].empty()) continue;  // header row
            throw ConfigError(path + ":" + std::to_string(n) + ": malformed number");
        }
        cols[0].push_back(x);
        cols[1].push_back(y);
    }
    if (cols[0].size() < 2) throw ConfigError("'" + path + "' needs at least two data rows");
    return cols;
}

inline AnisotropySpec parse_f(const std::string& v, const std::string& where) {
    const auto w = words(v);
    AnisotropySpec s;
    s.text = v;
    if (w.empty()) throw ConfigError(where + ": empty anisotropy");
    if (w[0] == "constant" && w.size() <= 2) {
        s.kind = AnisotropySpec::Kind::constant;
        if (w.size() == 2) s.value = parse_double(w[1], where);
        if (!(s.value > 0.0)) throw ConfigError(where + ": anisotropy must be positive");
    } else if (w[0] == "power_linear" && (w.size() == 2 || w.size() == 3)) {
        s.kind = AnisotropySpec::Kind::power_linear;
        s.eps = parse_double(w[1], where);
        if (w.size() == 3) s.exponent = parse_double(w[2], where);
        if (!(std::abs(s.eps) < 1.0)) throw ConfigError(where + ": power_linear needs |eps| < 1 for positivity");
    } else if (w[0] == "cosine" && w.size() == 3) {
        s.kind = AnisotropySpec::Kind::cosine;
        s.mode = static_cast<int>(parse_int(w[1], where));
        s.eps = parse_double(w[2], where);
        if (!(std::abs(s.eps) < 1.0)) throw ConfigError(where + ": cosine needs |eps| < 1 for positivity");
    } else if (w[0] == "table" && w.size() == 2) {
        s.kind = AnisotropySpec::Kind::table;
        s.path = w[1];
    } else {
        throw ConfigError(where + ": f must be 'constant [v]', 'power_linear eps [s]', 'cosine m eps' or 'table path'");
    }
    return s;
}

inline InitialSpec parse_initial(const std::string& v, const std::string& where) {
    const auto w = words(v);
    InitialSpec s;
    s.text = v;
    if (w.size() == 2 && w[0] == "round") {
        s.kind = InitialSpec::Kind::round;
        s.a = parse_double(w[1], where);
        if (!(s.a > 0.0)) throw ConfigError(where + ": round radius must be positive");
    } else if ((w.size() == 2 || w.size() == 3) && w[0] == "translate") {
        s.kind = InitialSpec::Kind::translate;
        s.a = parse_double(w[1], where);
        s.b = w.size() == 3 ? parse_double(w[2], where) : 1.0;
        if (!(std::abs(s.a) < s.b)) throw ConfigError(where + ": translated ball must enclose the origin");
    } else if (w.size() == 3 && w[0] == "spheroid") {
        s.kind = InitialSpec::Kind::spheroid;
        s.a = parse_double(w[1], where);
        s.b = parse_double(w[2], where);
        if (!(s.a > 0.0 && s.b > 0.0)) throw ConfigError(where + ": spheroid semi-axes must be positive");
    } else if (w.size() == 2 && w[0] == "file") {
        s.kind = InitialSpec::Kind::file;
        s.path = w[1];
    } else {
        throw ConfigError(where + ": initial must be 'round r', 'translate eps [r]', 'spheroid a b' or 'file path'");
    }
    return s;
}

}  // namespace detail

inline Anisotropy AnisotropySpec::build(const Grid& grid, int k, double beta, double alpha) const {
    switch (kind) {
    case Kind::constant:
        return Anisotropy::constant(value);
    case Kind::power_linear:
        return Anisotropy::power_of_linear(eps, exponent.value_or(1.0 + k * beta - alpha));
    case Kind::cosine: {
        const double e = eps;
        const int m = mode;
        return Anisotropy::from_field(
            ScalarField::sample(grid, [e, m](double t) { return 1.0 + e * std::cos(m * t); }));
    }
    case Kind::table: {
        auto cols = detail::read_two_columns(path);
        return Anisotropy::tabulated(std::move(cols[0]), std::move(cols[1]));
    }
    }
    throw ConfigError("unknown anisotropy kind");
}

inline ScalarField InitialSpec::build(const Grid& grid) const {
    switch (kind) {
    case Kind::round:
        return ScalarField(grid, a);
    case Kind::translate:
        return translated_ball(grid, b, a).field();
    case Kind::spheroid:
        return spheroid_support(grid, a, b).field();
    case Kind::file: {
        const auto cols = detail::read_two_columns(path);
        // linear interpolation in theta, clamped at the ends
        const Anisotropy interp = Anisotropy::tabulated(cols[0], cols[1]);
        return interp.on(grid);
    }
    }
    throw ConfigError("unknown initial body kind");
}

/// Parses and validates a config document; errors name the offending line.
inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) throw ConfigError(where + ": expected 'key = value'");
        if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
        const std::string kw = where + " (" + key + ")";

        auto num = [&] { return detail::parse_double(val, kw); };
        auto integer = [&] { return detail::parse_int(val, kw); };

        if (key == "experiment") cfg.experiment = experiment_from_string(val);
        else if (key == "N") cfg.N = static_cast<int>(integer());
        else if (key == "k") cfg.k = static_cast<int>(integer());
        else if (key == "beta") cfg.beta = num();
        else if (key == "alpha") cfg.alpha = num();
        else if (key == "f") cfg.f = detail::parse_f(val, kw);
        else if (key == "mode") {
            try {
                cfg.mode = flow_mode_from_string(val);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(kw + ": " + e.what());
            }
        }
        else if (key == "initial") cfg.initial = detail::parse_initial(val, kw);
        else if (key == "t_max") cfg.stop.t_max = num();
        else if (key == "tol_conv") cfg.stop.tol_conv = num();
        else if (key == "R_blowup") cfg.stop.R_blowup = num();
        else if (key == "dt_min") cfg.stop.dt_min = num();
        else if (key == "cfl") cfg.stop.c_cfl = num();
        else if (key == "record_every") cfg.stop.record_every = static_cast<int>(integer());
        else if (key == "snapshot_every") cfg.stop.snapshot_every = static_cast<int>(integer());
        else if (key == "out") cfg.out = val;
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(integer());
        else if (key == "c") cfg.c = num();
        else if (key == "trials") cfg.trials = static_cast<int>(integer());
        else if (key == "psi_alpha") cfg.psi_alpha = num();
        else if (key == "psi_k") cfg.psi_k = static_cast<int>(integer());
        else if (key == "psi_beta") cfg.psi_beta = num();
        else if (key == "theta") cfg.theta = num();
        else if (key == "samples") cfg.samples = static_cast<int>(integer());
        else if (key == "horizon") cfg.horizon = num();
        else if (key == "radii") {
            cfg.radii.clear();
            for (const auto& w : detail::words(val)) cfg.radii.push_back(detail::parse_double(w, kw));
        }
        else if (key == "gamma" || key == "q") {
            throw ConfigError(where + ": '" + key + "' is derived from k, beta and alpha and cannot be set");
        } else {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }

    // admissibility
    if (cfg.N < kMinGridNodes) throw ConfigError("N must be at least " + std::to_string(kMinGridNodes));
    if (cfg.k != 1 && cfg.k != 2) throw ConfigError("k must be 1 or 2");
    if (!(cfg.beta > 1.0 / cfg.k)) {
        throw ConfigError("beta must exceed 1/k (beta=" + std::to_string(cfg.beta) + ", k=" + std::to_string(cfg.k) +
                          ")");
    }
    if ((cfg.mode == FlowMode::nef1 || cfg.mode == FlowMode::dual_radial) &&
        cfg.f.kind != AnisotropySpec::Kind::constant) {
        throw ConfigError(std::string("mode ") + anicurve::to_string(cfg.mode) + " requires f = constant 1");
    }
    if ((cfg.mode == FlowMode::nef1 || cfg.mode == FlowMode::dual_radial) && cfg.f.value != 1.0) {
        throw ConfigError(std::string("mode ") + anicurve::to_string(cfg.mode) + " requires f = constant 1");
    }
    if (!(cfg.c > 0.0)) throw ConfigError("c must be positive");
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.samples < 1) throw ConfigError("samples must be >= 1");
    if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be positive");
    for (double r : cfg.radii) {
        if (!(r > 0.0)) throw ConfigError("radii must be positive");
    }
    try {
        cfg.stop.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace anicurve::harness
