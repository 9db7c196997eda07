#include "raman/scenario.hpp"

#include "raman/analytic_ww.hpp"
#include "raman/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace raman {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys = {
        "preset",
        "model",
        "omega_p",
        "omega_31",
        "n_atoms",
        "frequency_unit",
        "frequency_unit_label",
        "dark_states",
        "coupling.profile",
        "coupling.lambda0",
        "coupling.gamma",
        "coupling.center",
        "coupling.width",
        "coupling.table",
        "grid.bandwidth_gamma",
        "grid.bandwidth",
        "grid.spacing",
        "grid.modes_per_gamma",
        "grid.modes",
        "integrator.method",
        "integrator.dt_gamma",
        "integrator.dt",
        "time.t_max_gamma",
        "time.t_max",
        "time.samples",
        "spectrum.t_gamma",
        "spectrum.t",
        "full.detuning2",
        "full.light_shift_gamma",
        "full.light_shift",
        "adiabatic.detuning2",
        "adiabatic.ratios",
        "sweep.axis",
        "sweep.values",
        "output.dir",
    };
    return keys;
}

RawConfig RawConfig::with(const std::string& key, const std::string& value) const
{
    RawConfig out = *this;
    out.entries[key] = {value, 0};
    return out;
}

RawConfig RawConfig::without(const std::string& key) const
{
    RawConfig out = *this;
    out.entries.erase(key);
    return out;
}

RawConfig parse_config_text(std::string_view text, std::string origin)
{
    RawConfig raw;
    raw.origin = std::move(origin);
    raw.digest = fnv1a(text);
    const std::set<std::string> known(known_keys().begin(), known_keys().end());

    auto error = [&](int line, const std::string& msg) {
        throw ConfigError(raw.origin + ":" + std::to_string(line) + ": " + msg);
    };

    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size() || (pos == 0 && text.empty())) {
        const auto nl = text.find('\n', pos);
        const auto end = nl == std::string_view::npos ? text.size() : nl;
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const std::string body = trim(line);
        if (body.empty()) {
            if (nl == std::string_view::npos)
                break;
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            error(line_no, "expected 'key = value', got '" + body + "'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty())
            error(line_no, "missing key before '='");
        if (!known.count(key))
            error(line_no, "unknown key '" + key + "'");
        if (value.empty())
            error(line_no, "key '" + key + "' has an empty value");
        if (raw.entries.count(key))
            error(line_no, "duplicate key '" + key + "' (first set on line " +
                               std::to_string(raw.entries[key].line) + ")");
        raw.entries[key] = {value, line_no};
        if (nl == std::string_view::npos)
            break;
    }
    if (raw.entries.empty())
        error(1, "configuration is empty (no 'key = value' lines)");
    return raw;
}

RawConfig load_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path.string() + ": cannot open configuration file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

std::string to_string(ModelKind m)
{
    switch (m) {
    case ModelKind::effective: return "effective";
    case ModelKind::full: return "full";
    case ModelKind::both: return "both";
    }
    return "?";
}

std::string to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::lambda0: return "lambda0";
    case SweepAxis::n_atoms: return "n_atoms";
    case SweepAxis::bandwidth: return "bandwidth";
    case SweepAxis::n_modes: return "n_modes";
    case SweepAxis::detuning2: return "detuning2";
    }
    return "?";
}

ModeGrid Scenario::grid() const
{
    if (single_mode)
        return single_mode_grid(single_mode_omega, coupling_at(params.coupling, single_mode_omega));
    return build_mode_grid(params, bandwidth, n_modes);
}

FullParams Scenario::full_params(double d2) const
{
    return raman_parameters(params, params.coupling, d2, light_shift);
}

ModeGrid Scenario::full_grid(const FullParams& fp) const
{
    if (single_mode) {
        const double w = shifted_resonance(fp);
        return single_mode_grid(w, coupling_at(fp.g_s_profile, w));
    }
    return build_mode_grid_about(fp.g_s_profile, shifted_resonance(fp), bandwidth, n_modes);
}

std::vector<double> Scenario::sample_times() const
{
    return linspace(0.0, t_max, samples);
}

namespace {

class Resolver {
public:
    explicit Resolver(const RawConfig& raw) : raw_(raw) {}

    [[noreturn]] void error(const std::string& key, const std::string& msg) const
    {
        const auto it = raw_.entries.find(key);
        std::string where = raw_.origin;
        if (it != raw_.entries.end() && it->second.line > 0)
            where += ":" + std::to_string(it->second.line);
        throw ConfigError(where + ": " + key + ": " + msg);
    }

    bool has(const std::string& key) const { return raw_.has(key); }
    const std::string& text(const std::string& key) const { return raw_.entries.at(key).value; }

    double number(const std::string& key) const
    {
        const std::string& s = text(key);
        double v = 0.0;
        const auto* first = s.data();
        const auto* last = s.data() + s.size();
        const auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
            error(key, "expected a finite number, got '" + s + "'");
        return v;
    }

    double number_or(const std::string& key, double fallback) const
    {
        return has(key) ? number(key) : fallback;
    }

    long integer(const std::string& key) const
    {
        const std::string& s = text(key);
        long v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            error(key, "expected an integer, got '" + s + "'");
        return v;
    }

    bool boolean(const std::string& key) const
    {
        const std::string& s = text(key);
        if (s == "true" || s == "yes" || s == "1")
            return true;
        if (s == "false" || s == "no" || s == "0")
            return false;
        error(key, "expected true or false, got '" + s + "'");
    }

    std::vector<double> list(const std::string& key) const
    {
        std::vector<double> out;
        std::stringstream ss(text(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            double v = 0.0;
            const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
            if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() ||
                !std::isfinite(v))
                error(key, "expected a comma-separated list of numbers, got '" + text(key) + "'");
            out.push_back(v);
        }
        return out;
    }

    void exclusive(std::initializer_list<const char*> keys) const
    {
        std::vector<std::string> present;
        for (const char* k : keys)
            if (has(k))
                present.emplace_back(k);
        if (present.size() > 1)
            error(present[1], "cannot be combined with " + present[0]);
    }

    void positive(const std::string& key, double v) const
    {
        if (!(v > 0.0))
            error(key, "must be > 0");
    }

private:
    const RawConfig& raw_;
};

constexpr double two_pi = 2.0 * std::numbers::pi;

} // namespace

Scenario resolve(const RawConfig& raw)
{
    const Resolver r(raw);
    Scenario sc;
    sc.digest = raw.digest;

    if (r.has("preset")) {
        sc.preset = r.text("preset");
        if (sc.preset != "default" && sc.preset != "rb85" && sc.preset != "toy2x2")
            r.error("preset", "unknown preset '" + sc.preset + "' (default, rb85, toy2x2)");
    }
    const bool toy = sc.preset == "toy2x2";
    if (sc.preset == "rb85")
        sc.params = rb85_preset().params;

    if (r.has("model")) {
        const std::string& m = r.text("model");
        if (m == "effective")
            sc.model = ModelKind::effective;
        else if (m == "full")
            sc.model = ModelKind::full;
        else if (m == "both")
            sc.model = ModelKind::both;
        else
            r.error("model", "unknown model '" + m + "' (effective, full, both)");
    }

    sc.params.omega_p = r.number_or("omega_p", sc.params.omega_p);
    sc.params.omega_31 = r.number_or("omega_31", sc.params.omega_31);
    if (r.has("n_atoms")) {
        const long n = r.integer("n_atoms");
        if (n < 2 || n > 1000000)
            r.error("n_atoms", "must be an integer in [2, 1e6]");
        sc.params.n_atoms = static_cast<int>(n);
    }
    if (r.has("frequency_unit")) {
        sc.params.unit.rad_per_s = r.number("frequency_unit");
        r.positive("frequency_unit", sc.params.unit.rad_per_s);
    }
    if (r.has("frequency_unit_label"))
        sc.params.unit.label = r.text("frequency_unit_label");
    if (!(sc.params.omega_p > 0.0))
        r.error("omega_p", "must be > 0");
    if (!(sc.params.omega_31 >= 0.0))
        r.error("omega_31", "must be >= 0");
    if (!(sc.params.resonance() > 0.0))
        r.error("omega_p", "two-photon resonance omega_p - omega_31 must be > 0");
    if (r.has("dark_states"))
        sc.dark_states = r.boolean("dark_states");

    const double res = sc.params.resonance();
    const double n_atoms = sc.params.n_atoms;

    // Coupling shape with unit peak (flat, lorentzian) or absolute (table).
    std::string profile = "flat";
    if (r.has("coupling.profile")) {
        profile = r.text("coupling.profile");
        if (profile != "flat" && profile != "lorentzian" && profile != "table")
            r.error("coupling.profile", "unknown profile '" + profile +
                                            "' (flat, lorentzian, table)");
    }
    r.exclusive({"coupling.gamma", "coupling.lambda0", "coupling.table"});
    if (profile != "lorentzian") {
        for (const char* k : {"coupling.center", "coupling.width"})
            if (r.has(k))
                r.error(k, "only valid with coupling.profile = lorentzian");
    }
    if (profile == "table" && !r.has("coupling.table"))
        r.error("coupling.profile", "profile 'table' needs coupling.table");
    if (profile != "table" && r.has("coupling.table"))
        r.error("coupling.table", "only valid with coupling.profile = table");

    CouplingProfile shape;
    if (profile == "flat") {
        shape = CouplingProfile::flat(1.0);
    } else if (profile == "lorentzian") {
        if (!r.has("coupling.width"))
            r.error("coupling.profile", "profile 'lorentzian' needs coupling.width");
        const double width = r.number("coupling.width");
        r.positive("coupling.width", width);
        shape = CouplingProfile::lorentzian_window(1.0, r.number_or("coupling.center", res), width);
    } else {
        const std::vector<double> v = r.list("coupling.table");
        if (v.size() < 4 || v.size() % 2 != 0)
            r.error("coupling.table", "expected omega, lambda pairs (at least two)");
        std::vector<std::pair<double, double>> table;
        for (std::size_t i = 0; i < v.size(); i += 2)
            table.emplace_back(v[i], v[i + 1]);
        shape = CouplingProfile::user_table(std::move(table));
        try {
            shape.validate();
        } catch (const Error& e) {
            r.error("coupling.table", e.what());
        }
        if (!(shape.table.front().first <= res && res <= shape.table.back().first))
            r.error("coupling.table", "table does not cover the two-photon resonance");
    }

    // Time keys shared by all presets.
    r.exclusive({"time.t_max", "time.t_max_gamma"});
    r.exclusive({"integrator.dt", "integrator.dt_gamma"});
    r.exclusive({"spectrum.t", "spectrum.t_gamma"});
    if (r.has("time.samples")) {
        const long s = r.integer("time.samples");
        if (s < 2 || s > 1000000)
            r.error("time.samples", "must be an integer in [2, 1e6]");
        sc.samples = static_cast<std::size_t>(s);
    }
    if (r.has("integrator.method")) {
        const std::string& m = r.text("integrator.method");
        if (m == "expm")
            sc.method = Method::expm;
        else if (m == "rk4")
            sc.method = Method::rk4;
        else
            r.error("integrator.method", "unknown method '" + m + "' (expm, rk4)");
    }

    if (toy) {
        for (const char* k : {"grid.bandwidth_gamma", "grid.bandwidth", "grid.spacing",
                              "grid.modes_per_gamma", "grid.modes", "coupling.gamma",
                              "time.t_max_gamma", "integrator.dt_gamma", "spectrum.t_gamma"})
            if (r.has(k))
                r.error(k, "not used by the toy2x2 preset (single mode, no continuum)");
        if (profile != "flat")
            r.error("coupling.profile", "the toy2x2 preset needs a flat coupling");
        const double lambda = r.number_or("coupling.lambda0", 0.1);
        if (!(lambda >= 0.0))
            r.error("coupling.lambda0", "must be >= 0");
        sc.params.coupling = CouplingProfile::flat(lambda);
        sc.single_mode = true;
        sc.single_mode_omega = res;
        sc.n_modes = 1;
        const double rabi = std::sqrt(n_atoms) * lambda;
        if (r.has("time.t_max"))
            sc.t_max = r.number("time.t_max");
        else if (rabi > 0.0)
            sc.t_max = 2.0 * two_pi / rabi;
        else
            r.error("preset", "toy2x2 with zero coupling needs time.t_max");
        r.positive("time.t_max", sc.t_max);
        sc.dt = r.has("integrator.dt") ? r.number("integrator.dt") : sc.t_max * 1e-4;
        r.positive("integrator.dt", sc.dt);
        sc.spectrum_time = r.has("spectrum.t") ? r.number("spectrum.t") : sc.t_max;
        r.positive("spectrum.t", sc.spectrum_time);
    } else {
        r.exclusive({"grid.bandwidth", "grid.bandwidth_gamma"});
        r.exclusive({"grid.spacing", "grid.modes_per_gamma", "grid.modes"});

        std::optional<double> gamma;
        double lambda0 = 0.0;
        if (r.has("coupling.gamma")) {
            gamma = r.number("coupling.gamma");
            if (!(*gamma >= 0.0))
                r.error("coupling.gamma", "must be >= 0");
        } else if (r.has("coupling.lambda0")) {
            lambda0 = r.number("coupling.lambda0");
            if (!(lambda0 >= 0.0))
                r.error("coupling.lambda0", "must be >= 0");
        } else if (profile != "table") {
            gamma = sc.preset == "rb85" ? 0.01 : 0.1;
        }
        const double shape_res = coupling_at(shape, res);
        if (gamma && *gamma > 0.0 && !(shape_res > 0.0))
            r.error("coupling.gamma", "coupling profile vanishes at the two-photon resonance");

        double m_per_gamma = 40.0;
        if (r.has("grid.modes_per_gamma")) {
            m_per_gamma = r.number("grid.modes_per_gamma");
            r.positive("grid.modes_per_gamma", m_per_gamma);
        }
        std::optional<double> bw_abs;
        double bw_gamma = 40.0;
        if (r.has("grid.bandwidth")) {
            bw_abs = r.number("grid.bandwidth");
            r.positive("grid.bandwidth", *bw_abs);
        } else if (r.has("grid.bandwidth_gamma")) {
            bw_gamma = r.number("grid.bandwidth_gamma");
            r.positive("grid.bandwidth_gamma", bw_gamma);
        }
        std::optional<double> spacing_abs;
        if (r.has("grid.spacing")) {
            spacing_abs = r.number("grid.spacing");
            r.positive("grid.spacing", *spacing_abs);
        }
        std::optional<long> modes;
        if (r.has("grid.modes")) {
            modes = r.integer("grid.modes");
            if (*modes < 3)
                r.error("grid.modes", "must be >= 3");
            if (*modes > static_cast<long>(default_max_dim) - 2)
                r.error("grid.modes", "exceeds the Hamiltonian size limit " +
                                          std::to_string(default_max_dim));
        }

        // s2 = 2 pi n lambda(res)^2, so gamma = s2 / spacing.
        double gamma_v = 0.0;
        double spacing = 0.0;
        if (gamma) {
            gamma_v = *gamma;
            if (spacing_abs)
                spacing = *spacing_abs;
            else if (modes && bw_abs)
                spacing = *bw_abs / static_cast<double>(*modes - 1);
            else if (modes)
                spacing = bw_gamma * gamma_v / static_cast<double>(*modes - 1);
            else
                spacing = gamma_v / m_per_gamma;
            lambda0 = gamma_v > 0.0 ? std::sqrt(gamma_v * spacing / (two_pi * n_atoms)) / shape_res
                                    : 0.0;
        } else {
            const double l_res = profile == "table" ? shape_res : lambda0 * shape_res;
            const double s2 = two_pi * n_atoms * l_res * l_res;
            if (spacing_abs) {
                spacing = *spacing_abs;
                gamma_v = s2 / spacing;
            } else if (modes && bw_abs) {
                spacing = *bw_abs / static_cast<double>(*modes - 1);
                gamma_v = s2 / spacing;
            } else if (modes) {
                gamma_v = std::sqrt(s2 * static_cast<double>(*modes - 1) / bw_gamma);
                spacing = bw_gamma * gamma_v / static_cast<double>(*modes - 1);
            } else {
                gamma_v = std::sqrt(s2 * m_per_gamma);
                spacing = gamma_v / m_per_gamma;
            }
        }
        if (!(gamma_v > 0.0) && (!bw_abs || !(spacing > 0.0)))
            r.error(r.has("coupling.lambda0") ? "coupling.lambda0" : "coupling.gamma",
                    "zero coupling gives gamma = 0; set grid.bandwidth and grid.spacing "
                    "(or grid.modes) explicitly");
        sc.gamma = gamma_v;
        sc.params.coupling = profile == "table" ? shape : shape.scaled(lambda0);

        const double bw = bw_abs ? *bw_abs : bw_gamma * gamma_v;
        long n = modes ? *modes : std::lround(bw / spacing) + 1;
        if (n < 3)
            r.error("grid.bandwidth_gamma", "grid would have fewer than 3 modes");
        if (n > static_cast<long>(default_max_dim) - 2)
            r.error(modes ? "grid.modes" : "grid.bandwidth_gamma",
                    "grid would have " + std::to_string(n) + " modes, above the limit " +
                        std::to_string(default_max_dim - 2));
        sc.n_modes = static_cast<int>(n);
        sc.bandwidth = modes ? bw : spacing * static_cast<double>(n - 1);
        sc.spacing = sc.bandwidth / static_cast<double>(n - 1);
        if (!(res - 0.5 * sc.bandwidth > 0.0))
            r.error(bw_abs ? "grid.bandwidth" : "grid.bandwidth_gamma",
                    "grid reaches non-positive Stokes frequencies");

        auto in_gamma = [&](const char* abs_key, const char* rel_key, double rel_default) {
            if (r.has(abs_key)) {
                const double v = r.number(abs_key);
                r.positive(abs_key, v);
                return v;
            }
            if (gamma_v > 0.0) {
                const double rel = r.number_or(rel_key, rel_default);
                r.positive(rel_key, rel);
                return rel / gamma_v;
            }
            if (r.has(rel_key))
                r.error(rel_key, "gamma is zero; give the absolute value instead");
            return 0.0;
        };
        sc.t_max = in_gamma("time.t_max", "time.t_max_gamma", 5.0);
        if (!(sc.t_max > 0.0))
            r.error("coupling.lambda0", "gamma is zero; time.t_max must be set");
        sc.dt = in_gamma("integrator.dt", "integrator.dt_gamma", 1e-3);
        if (!(sc.dt > 0.0))
            sc.dt = sc.t_max * 1e-4;
        sc.spectrum_time = in_gamma("spectrum.t", "spectrum.t_gamma", 30.0);
        if (!(sc.spectrum_time > 0.0))
            sc.spectrum_time = sc.t_max;
    }

    try {
        sc.params.validate();
    } catch (const Error& e) {
        throw ConfigError(raw.origin + ": " + e.what());
    }

    // Full model and the adiabatic ladder.
    r.exclusive({"full.light_shift", "full.light_shift_gamma"});
    if (r.has("full.light_shift")) {
        sc.light_shift = r.number("full.light_shift");
    } else {
        const double rel = r.number_or("full.light_shift_gamma", 45.0);
        if (sc.gamma > 0.0)
            sc.light_shift = rel * sc.gamma;
        else if (r.has("full.light_shift_gamma"))
            r.error("full.light_shift_gamma", "gamma is zero; give full.light_shift instead");
    }
    if (!(sc.light_shift >= 0.0))
        r.error(r.has("full.light_shift") ? "full.light_shift" : "full.light_shift_gamma",
                "must be >= 0");
    if (sc.light_shift == 0.0 && sc.params.coupling.kind == ProfileKind::flat &&
        sc.params.coupling.lambda0 > 0.0 &&
        (sc.model != ModelKind::effective || r.has("adiabatic.detuning2") ||
         r.has("adiabatic.ratios")))
        r.error("full.light_shift", "a non-zero Raman coupling needs a non-zero light shift");
    if (r.has("full.detuning2")) {
        const double d2 = r.number("full.detuning2");
        if (d2 == 0.0)
            r.error("full.detuning2", "must be non-zero (adiabatic elimination needs a detuning)");
        sc.detuning2 = d2;
    } else if (sc.model != ModelKind::effective) {
        r.error("model", "model '" + to_string(sc.model) + "' needs full.detuning2");
    }

    r.exclusive({"adiabatic.detuning2", "adiabatic.ratios"});
    if (r.has("adiabatic.detuning2")) {
        sc.ladder_detunings = r.list("adiabatic.detuning2");
        for (double d : sc.ladder_detunings)
            if (d == 0.0)
                r.error("adiabatic.detuning2", "ladder contains a resonant point (detuning 0)");
    } else if (sc.light_shift > 0.0) {
        std::vector<double> ratios = {0.1, 0.03, 0.01};
        if (r.has("adiabatic.ratios"))
            ratios = r.list("adiabatic.ratios");
        for (double q : ratios) {
            if (!(q > 0.0))
                r.error("adiabatic.ratios", "ratios must be > 0");
            // sqrt(n) g_p / d2 = sqrt(S / d2) = q
            sc.ladder_detunings.push_back(sc.light_shift / (q * q));
        }
    } else if (r.has("adiabatic.ratios")) {
        r.error("adiabatic.ratios", "ratios need a non-zero light shift; use adiabatic.detuning2");
    }
    if (sc.ladder_detunings.size() > 64)
        r.error("adiabatic.detuning2", "ladder longer than 64 points");

    if (r.has("sweep.axis") != r.has("sweep.values"))
        r.error(r.has("sweep.axis") ? "sweep.axis" : "sweep.values",
                "sweep.axis and sweep.values go together");
    if (r.has("sweep.axis")) {
        const std::string& a = r.text("sweep.axis");
        if (a == "lambda0")
            sc.sweep_axis = SweepAxis::lambda0;
        else if (a == "n_atoms")
            sc.sweep_axis = SweepAxis::n_atoms;
        else if (a == "bandwidth")
            sc.sweep_axis = SweepAxis::bandwidth;
        else if (a == "n_modes")
            sc.sweep_axis = SweepAxis::n_modes;
        else if (a == "detuning2")
            sc.sweep_axis = SweepAxis::detuning2;
        else
            r.error("sweep.axis", "unknown axis '" + a +
                                      "' (lambda0, n_atoms, bandwidth, n_modes, detuning2)");
        sc.sweep_values = r.list("sweep.values");
        if (sc.sweep_values.empty() || sc.sweep_values.size() > 10000)
            r.error("sweep.values", "needs 1 to 10000 values");
        if (toy && *sc.sweep_axis != SweepAxis::lambda0 && *sc.sweep_axis != SweepAxis::n_atoms)
            r.error("sweep.axis", "the toy2x2 preset only sweeps lambda0 or n_atoms");
        if (profile == "table" && *sc.sweep_axis == SweepAxis::lambda0)
            r.error("sweep.axis", "lambda0 sweeps need a flat or lorentzian profile");
        for (double v : sc.sweep_values) {
            switch (*sc.sweep_axis) {
            case SweepAxis::lambda0:
                if (!(v >= 0.0))
                    r.error("sweep.values", "lambda0 values must be >= 0");
                break;
            case SweepAxis::n_atoms:
                if (v != std::floor(v) || v < 2)
                    r.error("sweep.values", "n_atoms values must be integers >= 2");
                break;
            case SweepAxis::bandwidth:
                if (!(v > 0.0))
                    r.error("sweep.values", "bandwidth values must be > 0");
                break;
            case SweepAxis::n_modes:
                if (v != std::floor(v) || v < 3)
                    r.error("sweep.values", "n_modes values must be integers >= 3");
                break;
            case SweepAxis::detuning2:
                if (v == 0.0)
                    r.error("sweep.values", "detuning2 values must be non-zero");
                if (sc.model == ModelKind::effective)
                    r.error("sweep.axis", "a detuning2 sweep needs model = full or both");
                break;
            }
        }
    }

    if (r.has("output.dir"))
        sc.output_dir = r.text("output.dir");
    return sc;
}

RawConfig sweep_point(const RawConfig& raw, const Scenario& base, double value)
{
    RawConfig p = raw.without("sweep.axis").without("sweep.values");
    if (!base.sweep_axis)
        return p;
    const std::string v = format_double(value);
    auto pin_density = [&](RawConfig c) {
        if (base.single_mode)
            return c;
        return c.without("grid.modes_per_gamma")
            .without("grid.modes")
            .with("grid.spacing", format_double(base.spacing));
    };
    auto pin_lambda = [&](RawConfig c) {
        if (c.has("coupling.table"))
            return c;
        return c.without("coupling.gamma")
            .with("coupling.lambda0", format_double(base.params.coupling.lambda0));
    };
    switch (*base.sweep_axis) {
    case SweepAxis::lambda0:
        return pin_density(p.without("coupling.gamma").with("coupling.lambda0", v));
    case SweepAxis::n_atoms:
        return pin_density(pin_lambda(p)).with("n_atoms", v);
    case SweepAxis::bandwidth:
        return pin_density(p.without("grid.bandwidth").with("grid.bandwidth_gamma", v));
    case SweepAxis::n_modes:
        return p.without("grid.spacing").without("grid.modes_per_gamma").with("grid.modes", v);
    case SweepAxis::detuning2:
        return p.with("full.detuning2", v);
    }
    return p;
}

} // namespace raman
