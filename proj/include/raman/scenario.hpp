#pragma once

// Scenario configuration: a flat `key = value` text format (see docs/config.md)
// resolved into concrete model parameters, grid and time settings.

#include "raman/core_model.hpp"
#include "raman/effective_dynamics.hpp"
#include "raman/full_model.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace raman {

/// Invalid configuration. The message already carries "origin:line:" when a
/// line is known.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RawEntry {
    std::string value;
    int line = 0;
};

/// Parsed but unresolved key/value pairs.
struct RawConfig {
    std::string origin = "<config>";
    std::map<std::string, RawEntry> entries;
    std::uint64_t digest = 0; // FNV-1a of the source text

    bool has(const std::string& key) const { return entries.count(key) != 0; }
    /// Copy with `key` set (or replaced) to `value`; line 0 marks an override.
    RawConfig with(const std::string& key, const std::string& value) const;
    RawConfig without(const std::string& key) const;
};

RawConfig parse_config_text(std::string_view text, std::string origin = "<config>");
RawConfig load_config_file(const std::filesystem::path& path);

enum class ModelKind { effective, full, both };
std::string to_string(ModelKind m);

enum class SweepAxis { lambda0, n_atoms, bandwidth, n_modes, detuning2 };
std::string to_string(SweepAxis a);

struct Scenario {
    std::string preset = "default";
    ModelKind model = ModelKind::effective;
    SystemParams params; // effective coupling lambda(omega) per atom
    bool dark_states = false;

    // Mode grid. A single-mode scenario (toy2x2) has n_modes == 1.
    double bandwidth = 0.0;
    int n_modes = 0;
    double spacing = 0.0;
    bool single_mode = false;
    double single_mode_omega = 0.0;

    double gamma = 0.0; // decay-rate formula for the effective model at the resonance

    Method method = Method::expm;
    double dt = 0.0;
    double t_max = 0.0;
    std::size_t samples = 201;
    double spectrum_time = 0.0;

    // Full model, present when model != effective.
    std::optional<double> detuning2;
    double light_shift = 0.0;

    // Adiabatic ladder.
    std::vector<double> ladder_detunings;

    std::optional<SweepAxis> sweep_axis;
    std::vector<double> sweep_values;

    std::string output_dir;
    std::uint64_t digest = 0;

    /// Effective-model grid centred on the two-photon resonance.
    ModeGrid grid() const;
    /// Full-model parameters for a detuning (light shift held at light_shift).
    FullParams full_params(double d2) const;
    /// Grid centred on the light-shifted resonance of `fp`.
    ModeGrid full_grid(const FullParams& fp) const;
    std::vector<double> sample_times() const;
};

/// Validates every key and derives grid, coupling and time settings.
/// Throws ConfigError.
Scenario resolve(const RawConfig& raw);

/// The raw configuration of one sweep point (axis value substituted, grid
/// spacing pinned to the base scenario so the mode density stays fixed).
RawConfig sweep_point(const RawConfig& raw, const Scenario& base, double value);

/// Names of every accepted key.
const std::vector<std::string>& known_keys();

} // namespace raman
