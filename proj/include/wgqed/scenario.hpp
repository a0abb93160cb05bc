// Scenario files, sweep execution and CSV output

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wgqed/effective_dynamics.hpp"
#include "wgqed/emitter_model.hpp"
#include "wgqed/error.hpp"
#include "wgqed/lambda_protocols.hpp"
#include "wgqed/waveguide.hpp"

namespace wgqed {

inline constexpr const char* version_string = "wgqed 0.1.0";

enum class RunMode { spectrum, lambda_rates, lambda_intensity, fidelity, average_fidelity };

const char* run_mode_name(RunMode m);

struct GridSpec {
    std::vector<double> explicit_values;
    double min{0.0};
    double max{0.0};
    std::size_t points{0};

    bool empty() const { return explicit_values.empty() && points == 0; }
    std::vector<double> values() const;
    bool operator==(const GridSpec&) const = default;
};

// Assignment of a value to a dotted parameter path; see docs/schema.md.
struct Override {
    std::string key;
    double value{0.0};
    int line{0};

    bool operator==(const Override& o) const { return key == o.key && value == o.value; }
};

struct Curve {
    std::string label;
    std::vector<Override> overrides;

    bool operator==(const Curve&) const = default;
};

struct WaveguideSpec {
    double observation_phase{0.0}; // restores the propagation phase of r

    bool operator==(const WaveguideSpec&) const = default;
};

struct RunSpec {
    RunMode mode{RunMode::spectrum};
    std::string sweep;  // swept parameter; empty picks the mode default
    std::string column; // first output column; empty picks a default
    GridSpec grid;
    double detuning{0.0};
    double detuning_sign{1.0};
    Direction input{Direction::right};
    std::vector<std::string> quantities;
    PulseSpec pulse{PulseShape::square, 0.0, 1.0};
    DetectionConfig detection;
    std::size_t panels{2000};
    std::string output; // empty means standard output
    std::string format{"csv"};

    bool operator==(const RunSpec&) const = default;
};

struct Scenario {
    std::string description;
    WaveguideSpec waveguide;
    SystemSpec system;
    RunSpec run;
    std::vector<Curve> curves;

    bool operator==(const Scenario&) const = default;
};

struct Diagnostic {
    int line{0};
    ErrorCode code{ErrorCode::ParseError};
    std::string message;
};

class ScenarioError : public Error {
public:
    explicit ScenarioError(std::vector<Diagnostic> diags);
    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

struct Provenance {
    std::uint64_t scenario_hash{0};
    std::string version{version_string};
    std::string grid;
};

struct TableWarning {
    std::string code;
    std::string message;
};

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    Provenance provenance;
    std::vector<TableWarning> warnings;
};

enum class TableFormat { csv, csv_with_provenance };

Scenario parse_scenario(const std::string& text);

std::string serialize_scenario(const Scenario& s);

// Applies an override path to a system and run spec; throws SchemaError on unknown paths.
void apply_override(const std::string& key, double value, SystemSpec& system, RunSpec& run);

// The sweep parameter after defaults are resolved.
std::string effective_sweep(const RunSpec& run);

ResultTable run_scenario(const Scenario& s, unsigned threads = 1);

std::string format_number(double x);

std::string emit_table(const ResultTable& t, TableFormat format = TableFormat::csv);

void write_table(const ResultTable& t, const std::string& path, TableFormat format = TableFormat::csv);

std::uint64_t fnv1a(const std::string& bytes);

} // namespace wgqed
