// Scenario text <-> Scenario mapping

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "wgqed/scattering.hpp"
#include "wgqed/scenario.hpp"
#include "wgqed/toml_subset.hpp"

namespace wgqed {

namespace {

std::string join_messages(const std::vector<Diagnostic>& diags)
{
    std::string out;
    for (const auto& d : diags) {
        if (!out.empty()) out += "; ";
        out += "line " + std::to_string(d.line) + ": " + d.message;
    }
    return out;
}

} // namespace

ScenarioError::ScenarioError(std::vector<Diagnostic> diags)
    : Error(diags.empty() ? ErrorCode::ParseError : diags.front().code, join_messages(diags)),
      diags_(std::move(diags))
{
}

const char* run_mode_name(RunMode m)
{
    switch (m) {
    case RunMode::spectrum: return "spectrum";
    case RunMode::lambda_rates: return "lambda_rates";
    case RunMode::lambda_intensity: return "lambda_intensity";
    case RunMode::fidelity: return "fidelity";
    case RunMode::average_fidelity: return "average_fidelity";
    }
    return "?";
}

std::vector<double> GridSpec::values() const
{
    if (!explicit_values.empty()) return explicit_values;
    std::vector<double> v(points);
    if (points == 1) {
        v[0] = min;
    } else {
        for (std::size_t k = 0; k < points; ++k)
            v[k] = min + (max - min) * static_cast<double>(k) / static_cast<double>(points - 1);
        if (points > 1) v.back() = max;
    }
    return v;
}

namespace {

class Reader {
public:
    std::vector<Diagnostic> diags;

    void error(int line, ErrorCode code, const std::string& msg) { diags.push_back({line, code, msg}); }

    const toml::Value* find(const toml::Table& t, const std::string& key)
    {
        for (const auto& e : t.entries)
            if (e.key == key) return &e.value;
        return nullptr;
    }

    void check_keys(const toml::Table& t, const std::set<std::string>& allowed)
    {
        for (const auto& e : t.entries)
            if (!allowed.count(e.key))
                error(e.line, ErrorCode::SchemaError,
                      "unknown key '" + e.key + "' in " + (t.name.empty() ? "top level" : "[" + t.name + "]"));
    }

    std::string str(const toml::Table& t, const std::string& key, bool required, const std::string& fallback = "")
    {
        const auto* v = find(t, key);
        if (!v) {
            if (required) error(t.line, ErrorCode::SchemaError, "missing key '" + key + "' in [" + t.name + "]");
            return fallback;
        }
        if (!v->is_string()) {
            error(v->line, ErrorCode::SchemaError, "key '" + key + "' must be a string");
            return fallback;
        }
        return std::get<std::string>(v->data);
    }

    double num(const toml::Table& t, const std::string& key, double fallback)
    {
        const auto* v = find(t, key);
        if (!v) return fallback;
        if (!v->is_number()) {
            error(v->line, ErrorCode::SchemaError, "key '" + key + "' must be a number");
            return fallback;
        }
        const double x = std::get<double>(v->data);
        if (!std::isfinite(x)) error(v->line, ErrorCode::SchemaError, "key '" + key + "' must be finite");
        return x;
    }

    std::vector<std::string> strings(const toml::Table& t, const std::string& key, bool required)
    {
        std::vector<std::string> out;
        const auto* v = find(t, key);
        if (!v) {
            if (required) error(t.line, ErrorCode::SchemaError, "missing key '" + key + "' in [" + t.name + "]");
            return out;
        }
        if (!v->is_array()) {
            error(v->line, ErrorCode::SchemaError, "key '" + key + "' must be an array of strings");
            return out;
        }
        for (const auto& x : std::get<toml::Array>(v->data)) {
            if (!x.is_string()) {
                error(v->line, ErrorCode::SchemaError, "key '" + key + "' must be an array of strings");
                return {};
            }
            out.push_back(std::get<std::string>(x.data));
        }
        return out;
    }

    std::vector<double> numbers(const toml::Table& t, const std::string& key)
    {
        std::vector<double> out;
        const auto* v = find(t, key);
        if (!v) return out;
        if (!v->is_array()) {
            error(v->line, ErrorCode::SchemaError, "key '" + key + "' must be an array of numbers");
            return out;
        }
        for (const auto& x : std::get<toml::Array>(v->data)) {
            if (!x.is_number() || !std::isfinite(std::get<double>(x.data))) {
                error(v->line, ErrorCode::SchemaError, "key '" + key + "' must be an array of finite numbers");
                return {};
            }
            out.push_back(std::get<double>(x.data));
        }
        return out;
    }

    LevelRef ref(const toml::Table& t, const std::string& key)
    {
        const std::string s = str(t, key, true);
        const auto dot = s.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == s.size()) {
            if (!s.empty())
                error(find(t, key)->line, ErrorCode::SchemaError,
                      "key '" + key + "' must name a level as \"EMITTER.LEVEL\"");
            return {};
        }
        return {s.substr(0, dot), s.substr(dot + 1)};
    }
};

const std::set<std::string> quantity_names = {"T2",       "R2",       "loss",    "p_d",       "p_r",
                                              "p_sc",     "p_red_r",  "p_red_l", "p_blue_r",  "p_blue_l",
                                              "p_click_single", "p_click_coherent", "I_out", "rho00",
                                              "rho11",    "rho01_re", "rho01_im", "F",       "Fbar",
                                              "Fbar_numeric", "discrepancy"};

} // namespace

Scenario parse_scenario(const std::string& text)
{
    const toml::Document doc = toml::parse(text);
    Reader rd;
    Scenario sc;
    std::map<std::string, int> emitter_line;
    const toml::Table* run_table = nullptr;
    bool have_emitter = false;

    for (const auto& t : doc.tables) {
        if (t.name.empty()) {
            rd.check_keys(t, {"description"});
            sc.description = rd.str(t, "description", false);
        } else if (t.name == "waveguide" && !t.is_array) {
            rd.check_keys(t, {"observation_phase"});
            sc.waveguide.observation_phase = rd.num(t, "observation_phase", 0.0);
        } else if (t.name == "emitter" && t.is_array) {
            have_emitter = true;
            rd.check_keys(t, {"id", "phase_position", "ground", "excited", "ground_energies", "excited_energies"});
            Emitter em;
            em.id = rd.str(t, "id", true);
            if (em.id.find('.') != std::string::npos)
                rd.error(t.line, ErrorCode::SchemaError, "emitter id '" + em.id + "' must not contain '.'");
            em.phase_position = rd.num(t, "phase_position", 0.0);
            const auto add = [&](const char* names_key, const char* energy_key, LevelKind kind) {
                const auto names = rd.strings(t, names_key, true);
                auto energies = rd.numbers(t, energy_key);
                if (!energies.empty() && energies.size() != names.size())
                    rd.error(t.line, ErrorCode::SchemaError,
                             std::string("'") + energy_key + "' length differs from '" + names_key + "'");
                for (std::size_t k = 0; k < names.size(); ++k) {
                    if (names[k].find('.') != std::string::npos)
                        rd.error(t.line, ErrorCode::SchemaError, "level id '" + names[k] + "' must not contain '.'");
                    em.levels.push_back({names[k], k < energies.size() ? energies[k] : 0.0, kind});
                }
            };
            add("ground", "ground_energies", LevelKind::ground);
            add("excited", "excited_energies", LevelKind::excited);
            emitter_line[em.id] = t.line;
            sc.system.emitters.push_back(std::move(em));
        } else if (t.name == "transition" && t.is_array) {
            rd.check_keys(t, {"emitter", "excited", "ground", "gamma1d_right", "gamma1d_left", "gamma_prime", "phase"});
            const std::string host = rd.str(t, "emitter", true);
            Transition tr;
            tr.excited = rd.str(t, "excited", true);
            tr.ground = rd.str(t, "ground", true);
            tr.gamma1d_right = rd.num(t, "gamma1d_right", 0.0);
            tr.gamma1d_left = rd.num(t, "gamma1d_left", 0.0);
            tr.gamma_prime = rd.num(t, "gamma_prime", 0.0);
            tr.coupling_phase = rd.num(t, "phase", 0.0);
            auto idx = sc.system.find_emitter(host);
            if (!idx)
                rd.error(t.line, ErrorCode::ValidationError,
                         "transition names emitter '" + host + "' which is not declared above");
            else
                sc.system.emitters[*idx].transitions.push_back(tr);
        } else if (t.name == "coupling" && t.is_array) {
            rd.check_keys(t, {"kind", "a", "b", "magnitude", "phase", "label"});
            const std::string kind = rd.str(t, "kind", false, "coherent");
            const LevelRef a = rd.ref(t, "a");
            const LevelRef b = rd.ref(t, "b");
            const double mag = rd.num(t, "magnitude", 0.0);
            const double ph = rd.num(t, "phase", 0.0);
            const std::string label = rd.str(t, "label", false);
            if (kind == "coherent")
                sc.system.coherent_couplings.push_back({a, b, mag, ph, label});
            else if (kind == "dipole")
                sc.system.dipole_couplings.push_back({a, b, mag, ph, label});
            else
                rd.error(t.line, ErrorCode::SchemaError, "coupling kind must be \"coherent\" or \"dipole\"");
        } else if (t.name == "splitting" && t.is_array) {
            rd.check_keys(t, {"a", "b", "omega"});
            GroundSplitting gs{rd.ref(t, "a"), rd.ref(t, "b"), rd.num(t, "omega", 0.0)};
            sc.system.ground_splittings.push_back(gs);
        } else if (t.name == "run" && !t.is_array) {
            run_table = &t;
        } else if (t.name == "curve" && t.is_array) {
            Curve cv;
            for (const auto& e : t.entries) {
                if (e.key == "label") {
                    if (!e.value.is_string()) rd.error(e.line, ErrorCode::SchemaError, "curve label must be a string");
                    else cv.label = std::get<std::string>(e.value.data);
                } else if (!e.value.is_number()) {
                    rd.error(e.line, ErrorCode::SchemaError, "override '" + e.key + "' must be a number");
                } else {
                    cv.overrides.push_back({e.key, std::get<double>(e.value.data), e.line});
                }
            }
            if (cv.label.empty()) rd.error(t.line, ErrorCode::SchemaError, "curve needs a non-empty label");
            sc.curves.push_back(std::move(cv));
        } else {
            rd.error(t.line, ErrorCode::SchemaError,
                     std::string("unknown section ") + (t.is_array ? "[[" : "[") + t.name + (t.is_array ? "]]" : "]"));
        }
    }

    if (!have_emitter) rd.error(1, ErrorCode::SchemaError, "scenario declares no [[emitter]]");
    if (!run_table) {
        rd.error(1, ErrorCode::SchemaError, "scenario has no [run] section");
    } else {
        const auto& t = *run_table;
        rd.check_keys(t, {"mode", "sweep", "column", "grid", "grid_min", "grid_max", "grid_points", "detuning",
                          "detuning_sign", "input", "quantities", "pulse_shape", "pulse_intensity", "pulse_nbar",
                          "pulse_duration", "efficiency", "filter", "phase_offset", "panels", "output", "format"});
        RunSpec& r = sc.run;
        const std::string mode = rd.str(t, "mode", true);
        if (mode == "spectrum") r.mode = RunMode::spectrum;
        else if (mode == "lambda_rates") r.mode = RunMode::lambda_rates;
        else if (mode == "lambda_intensity") r.mode = RunMode::lambda_intensity;
        else if (mode == "fidelity") r.mode = RunMode::fidelity;
        else if (mode == "average_fidelity") r.mode = RunMode::average_fidelity;
        else if (!mode.empty()) rd.error(rd.find(t, "mode")->line, ErrorCode::SchemaError, "unknown run mode '" + mode + "'");
        r.sweep = rd.str(t, "sweep", false);
        r.column = rd.str(t, "column", false);
        r.grid.explicit_values = rd.numbers(t, "grid");
        r.grid.min = rd.num(t, "grid_min", 0.0);
        r.grid.max = rd.num(t, "grid_max", 0.0);
        const double pts = rd.num(t, "grid_points", 0.0);
        if (pts < 0.0 || pts != std::floor(pts) || pts > 1e8)
            rd.error(rd.find(t, "grid_points")->line, ErrorCode::SchemaError, "grid_points must be a non-negative integer");
        else
            r.grid.points = static_cast<std::size_t>(pts);
        if (!r.grid.explicit_values.empty() && r.grid.points)
            rd.error(t.line, ErrorCode::SchemaError, "use either 'grid' or 'grid_points', not both");
        r.detuning = rd.num(t, "detuning", 0.0);
        r.detuning_sign = rd.num(t, "detuning_sign", 1.0);
        if (r.detuning_sign != 1.0 && r.detuning_sign != -1.0)
            rd.error(rd.find(t, "detuning_sign")->line, ErrorCode::SchemaError, "detuning_sign must be 1 or -1");
        const std::string input = rd.str(t, "input", false, "right");
        if (input == "left") r.input = Direction::left;
        else if (input != "right") rd.error(rd.find(t, "input")->line, ErrorCode::SchemaError, "input must be \"right\" or \"left\"");
        r.quantities = rd.strings(t, "quantities", false);
        for (const auto& q : r.quantities)
            if (!quantity_names.count(q))
                rd.error(rd.find(t, "quantities")->line, ErrorCode::SchemaError, "unknown quantity '" + q + "'");
        if (rd.str(t, "pulse_shape", false, "square") != "square")
            rd.error(rd.find(t, "pulse_shape")->line, ErrorCode::SchemaError, "only square pulses are supported");
        r.pulse.duration = rd.num(t, "pulse_duration", 1.0);
        if (!(r.pulse.duration > 0.0)) rd.error(t.line, ErrorCode::SchemaError, "pulse_duration must be positive");
        if (rd.find(t, "pulse_intensity") && rd.find(t, "pulse_nbar"))
            rd.error(t.line, ErrorCode::SchemaError, "use either 'pulse_intensity' or 'pulse_nbar', not both");
        r.pulse.intensity = rd.num(t, "pulse_intensity", 0.0);
        if (rd.find(t, "pulse_nbar") && r.pulse.duration > 0.0) r.pulse.intensity = rd.num(t, "pulse_nbar", 0.0) / r.pulse.duration;
        if (r.pulse.intensity < 0.0) rd.error(t.line, ErrorCode::SchemaError, "pulse intensity must be non-negative");
        r.detection.efficiency = rd.num(t, "efficiency", 1.0);
        if (r.detection.efficiency < 0.0 || r.detection.efficiency > 1.0)
            rd.error(rd.find(t, "efficiency")->line, ErrorCode::SchemaError, "efficiency must lie in [0, 1]");
        const std::string filter = rd.str(t, "filter", false, "none");
        if (filter == "red_only") r.detection.filter = Filter::red_only;
        else if (filter == "blue_only") r.detection.filter = Filter::blue_only;
        else if (filter != "none") rd.error(rd.find(t, "filter")->line, ErrorCode::SchemaError, "unknown filter '" + filter + "'");
        r.detection.phase_offset = rd.num(t, "phase_offset", 0.0);
        const double panels = rd.num(t, "panels", 2000.0);
        if (panels < 2000.0 || panels != std::floor(panels) || panels > 1e8)
            rd.error(rd.find(t, "panels")->line, ErrorCode::SchemaError, "panels must be an integer >= 2000");
        else
            r.panels = static_cast<std::size_t>(panels);
        r.output = rd.str(t, "output", false);
        r.format = rd.str(t, "format", false, "csv");
        if (r.format != "csv" && r.format != "csv_with_provenance")
            rd.error(rd.find(t, "format")->line, ErrorCode::SchemaError, "format must be \"csv\" or \"csv_with_provenance\"");
        if (r.grid.points == 0 && r.grid.explicit_values.empty() && (rd.find(t, "grid_min") || rd.find(t, "grid_max")))
            rd.error(t.line, ErrorCode::SchemaError, "grid_min/grid_max need grid_points");
        if (r.grid.points >= 2 && !(r.grid.max > r.grid.min))
            rd.error(t.line, ErrorCode::SchemaError, "grid_max must exceed grid_min");
    }
    if (!rd.diags.empty()) throw ScenarioError(rd.diags);

    // Semantic validation.
    const auto report = validate_system(sc.system);
    for (const auto& v : report.violations) {
        rd.error(1, ErrorCode::ValidationError, v.code + ": " + v.message);
    }
    if (!rd.diags.empty()) throw ScenarioError(rd.diags);

    try {
        const auto basis = build_single_excitation_basis(sc.system);
        if (sc.run.mode == RunMode::spectrum && basis.ground_states.size() != 1)
            rd.error(run_table->line, ErrorCode::ValidationError,
                     "multi-ground elastic: spectrum runs need a single ground state");
        if (sc.run.mode != RunMode::spectrum) lambda_params_from_system(sc.system, 0.0);
    } catch (const Error& e) {
        rd.error(run_table->line, ErrorCode::ValidationError, e.what());
    }

    const std::string sweep = effective_sweep(sc.run);
    const bool natural = sweep.empty() || sweep == "time" || sweep == "tc_over_T";
    if (sweep == "time" && sc.run.mode != RunMode::lambda_intensity)
        rd.error(run_table->line, ErrorCode::SchemaError, "sweep 'time' is only valid for lambda_intensity");
    if (sc.run.mode == RunMode::lambda_intensity && sweep != "time")
        rd.error(run_table->line, ErrorCode::SchemaError, "lambda_intensity sweeps 'time'");
    if (sweep == "tc_over_T" && sc.run.mode != RunMode::fidelity)
        rd.error(run_table->line, ErrorCode::SchemaError, "sweep 'tc_over_T' is only valid for fidelity");
    if (sc.run.mode == RunMode::fidelity && sweep != "tc_over_T")
        rd.error(run_table->line, ErrorCode::SchemaError, "fidelity sweeps 'tc_over_T'");

    auto try_key = [&](const std::string& key, int line) {
        SystemSpec sys = sc.system;
        RunSpec run = sc.run;
        try {
            apply_override(key, 0.5, sys, run);
        } catch (const Error& e) {
            rd.error(line, e.code(), e.what());
        }
    };
    if (!natural) try_key(sweep, run_table->line);
    std::set<std::string> labels;
    for (const auto& cv : sc.curves) {
        if (!labels.insert(cv.label).second)
            rd.error(cv.overrides.empty() ? 1 : cv.overrides.front().line, ErrorCode::SchemaError,
                     "duplicate curve label '" + cv.label + "'");
        for (const auto& o : cv.overrides) try_key(o.key, o.line);
    }
    if (!rd.diags.empty()) throw ScenarioError(rd.diags);
    return sc;
}

namespace {

std::string num17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string ref_text(const LevelRef& r) { return toml::quote(r.emitter + "." + r.level); }

} // namespace

std::string serialize_scenario(const Scenario& s)
{
    std::ostringstream o;
    if (!s.description.empty()) o << "description = " << toml::quote(s.description) << "\n\n";
    o << "[waveguide]\nobservation_phase = " << num17(s.waveguide.observation_phase) << "\n";
    for (const auto& em : s.system.emitters) {
        o << "\n[[emitter]]\nid = " << toml::quote(em.id) << "\nphase_position = " << num17(em.phase_position) << "\n";
        for (LevelKind kind : {LevelKind::ground, LevelKind::excited}) {
            const char* name = kind == LevelKind::ground ? "ground" : "excited";
            std::string ids, energies;
            for (const auto& lv : em.levels) {
                if (lv.kind != kind) continue;
                ids += (ids.empty() ? "" : ", ") + toml::quote(lv.id);
                energies += (energies.empty() ? "" : ", ") + num17(lv.energy);
            }
            o << name << " = [" << ids << "]\n" << name << "_energies = [" << energies << "]\n";
        }
    }
    for (const auto& em : s.system.emitters)
        for (const auto& tr : em.transitions)
            o << "\n[[transition]]\nemitter = " << toml::quote(em.id) << "\nexcited = " << toml::quote(tr.excited)
              << "\nground = " << toml::quote(tr.ground) << "\ngamma1d_right = " << num17(tr.gamma1d_right)
              << "\ngamma1d_left = " << num17(tr.gamma1d_left) << "\ngamma_prime = " << num17(tr.gamma_prime)
              << "\nphase = " << num17(tr.coupling_phase) << "\n";
    auto coupling = [&](const char* kind, const LevelRef& a, const LevelRef& b, double m, double ph,
                        const std::string& label) {
        o << "\n[[coupling]]\nkind = \"" << kind << "\"\na = " << ref_text(a) << "\nb = " << ref_text(b)
          << "\nmagnitude = " << num17(m) << "\nphase = " << num17(ph) << "\n";
        if (!label.empty()) o << "label = " << toml::quote(label) << "\n";
    };
    for (const auto& c : s.system.coherent_couplings) coupling("coherent", c.a, c.b, c.magnitude, c.phase, c.label);
    for (const auto& c : s.system.dipole_couplings) coupling("dipole", c.a, c.b, c.magnitude, c.phase, c.label);
    for (const auto& gs : s.system.ground_splittings)
        o << "\n[[splitting]]\na = " << ref_text(gs.a) << "\nb = " << ref_text(gs.b) << "\nomega = " << num17(gs.omega)
          << "\n";

    const RunSpec& r = s.run;
    o << "\n[run]\nmode = \"" << run_mode_name(r.mode) << "\"\n";
    if (!r.sweep.empty()) o << "sweep = " << toml::quote(r.sweep) << "\n";
    if (!r.column.empty()) o << "column = " << toml::quote(r.column) << "\n";
    if (!r.grid.explicit_values.empty()) {
        o << "grid = [";
        for (std::size_t k = 0; k < r.grid.explicit_values.size(); ++k)
            o << (k ? ", " : "") << num17(r.grid.explicit_values[k]);
        o << "]\n";
    }
    if (r.grid.points)
        o << "grid_min = " << num17(r.grid.min) << "\ngrid_max = " << num17(r.grid.max)
          << "\ngrid_points = " << r.grid.points << "\n";
    o << "detuning = " << num17(r.detuning) << "\ndetuning_sign = " << num17(r.detuning_sign) << "\n";
    o << "input = \"" << (r.input == Direction::right ? "right" : "left") << "\"\n";
    if (!r.quantities.empty()) {
        o << "quantities = [";
        for (std::size_t k = 0; k < r.quantities.size(); ++k) o << (k ? ", " : "") << toml::quote(r.quantities[k]);
        o << "]\n";
    }
    o << "pulse_shape = \"square\"\npulse_intensity = " << num17(r.pulse.intensity)
      << "\npulse_duration = " << num17(r.pulse.duration) << "\n";
    o << "efficiency = " << num17(r.detection.efficiency) << "\nfilter = \""
      << (r.detection.filter == Filter::none ? "none" : r.detection.filter == Filter::red_only ? "red_only" : "blue_only")
      << "\"\nphase_offset = " << num17(r.detection.phase_offset) << "\npanels = " << r.panels << "\n";
    if (!r.output.empty()) o << "output = " << toml::quote(r.output) << "\n";
    o << "format = " << toml::quote(r.format) << "\n";

    for (const auto& cv : s.curves) {
        o << "\n[[curve]]\nlabel = " << toml::quote(cv.label) << "\n";
        for (const auto& ov : cv.overrides) o << ov.key << " = " << num17(ov.value) << "\n";
    }
    return o.str();
}

} // namespace wgqed
