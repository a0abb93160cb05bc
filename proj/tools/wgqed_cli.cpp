// Command-line front end: run scenario files and presets

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wgqed/scenario.hpp"

namespace fs = std::filesystem;

namespace {

int exit_code_for(wgqed::ErrorCode code)
{
    using wgqed::ErrorCode;
    switch (code) {
    case ErrorCode::SingularMatrix:
    case ErrorCode::DivisionByZero:
    case ErrorCode::StepTooLarge:
    case ErrorCode::NonfiniteEntry: return 2;
    default: return 1;
    }
}

fs::path preset_dir()
{
    if (const char* env = std::getenv("WGQED_PRESET_DIR")) return env;
    return WGQED_PRESET_DIR;
}

std::string read_file(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f) throw wgqed::Error(wgqed::ErrorCode::IoError, "cannot read '" + p.string() + "'");
    std::ostringstream o;
    o << f.rdbuf();
    return o.str();
}

void report(const wgqed::Error& e)
{
    if (const auto* se = dynamic_cast<const wgqed::ScenarioError*>(&e)) {
        for (const auto& d : se->diagnostics())
            std::cerr << "ERROR " << wgqed::error_code_name(d.code) << " line " << d.line << ": " << d.message << "\n";
        return;
    }
    std::cerr << "ERROR " << wgqed::error_code_name(e.code()) << " " << e.what() << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Photon scattering in waveguide QED: spectra and Lambda-system protocols"};
    app.require_subcommand(1);

    std::string scenario_file, output, preset;
    unsigned threads = 1;
    bool provenance = false;
    auto* run = app.add_subcommand("run", "Run a scenario file or a named preset");
    run->add_option("scenario", scenario_file, "Scenario file");
    run->add_option("-o,--output", output, "Output CSV path (default: scenario setting, else stdout)");
    run->add_option("-j,--threads", threads, "Worker threads for sweeps")->check(CLI::Range(1u, 1024u));
    run->add_option("-p,--preset", preset, "Preset name from the preset library");
    run->add_flag("--provenance", provenance, "Prefix the CSV with provenance comment lines");

    auto* list = app.add_subcommand("presets", "List the bundled presets");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(preset_dir()))
            if (e.path().extension() == ".toml") names.push_back(e.path().stem().string());
        std::sort(names.begin(), names.end());
        for (const auto& n : names) std::cout << n << "\n";
        return 0;
    }

    if (scenario_file.empty() == preset.empty()) {
        std::cerr << "ERROR Usage give either a scenario file or --preset\n";
        return 1;
    }

    try {
        const fs::path path = preset.empty() ? fs::path(scenario_file) : preset_dir() / (preset + ".toml");
        const auto sc = wgqed::parse_scenario(read_file(path));
        const auto table = wgqed::run_scenario(sc, threads);
        for (const auto& w : table.warnings) std::cerr << "WARN " << w.code << " " << w.message << "\n";
        const auto fmt = (provenance || sc.run.format == "csv_with_provenance")
                             ? wgqed::TableFormat::csv_with_provenance
                             : wgqed::TableFormat::csv;
        const std::string dest = output.empty() ? sc.run.output : output;
        if (dest.empty() || dest == "-")
            std::cout << wgqed::emit_table(table, fmt);
        else
            wgqed::write_table(table, dest, fmt);
    } catch (const wgqed::Error& e) {
        report(e);
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "ERROR Internal " << e.what() << "\n";
        return 2;
    }
    return 0;
}
