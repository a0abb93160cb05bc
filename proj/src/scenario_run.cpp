// Scenario execution and table output

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "wgqed/scattering.hpp"
#include "wgqed/scenario.hpp"

namespace wgqed {

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::size_t b = 0;
    while (true) {
        const auto e = s.find(sep, b);
        out.push_back(s.substr(b, e == std::string::npos ? std::string::npos : e - b));
        if (e == std::string::npos) return out;
        b = e + 1;
    }
}

[[noreturn]] void unknown(const std::string& key, const std::string& why)
{
    throw Error(ErrorCode::SchemaError, "unknown parameter path '" + key + "': " + why);
}

Emitter& emitter_of(SystemSpec& s, const std::string& key, const std::string& id)
{
    auto j = s.find_emitter(id);
    if (!j) unknown(key, "no emitter '" + id + "'");
    return s.emitters[*j];
}

Emitter& lambda_emitter(SystemSpec& s, const std::string& key)
{
    if (s.emitters.size() != 1) unknown(key, "needs a single Lambda emitter");
    return s.emitters.front();
}

} // namespace

std::string effective_sweep(const RunSpec& run)
{
    if (!run.sweep.empty()) return run.sweep;
    switch (run.mode) {
    case RunMode::spectrum:
    case RunMode::lambda_rates: return "detuning";
    case RunMode::lambda_intensity: return "time";
    case RunMode::fidelity: return "tc_over_T";
    case RunMode::average_fidelity: return "";
    }
    return "";
}

void apply_override(const std::string& key, double value, SystemSpec& s, RunSpec& run)
{
    if (!std::isfinite(value)) throw Error(ErrorCode::SchemaError, "override '" + key + "' must be finite");
    const auto p = split(key, '.');
    const std::string& head = p.front();
    if (p.size() == 1 && head == "detuning") {
        run.detuning = value;
    } else if (head == "emitter" && p.size() == 3 && p[2] == "phase_position") {
        emitter_of(s, key, p[1]).phase_position = value;
    } else if (head == "level" && p.size() == 4 && p[3] == "energy") {
        Emitter& em = emitter_of(s, key, p[1]);
        auto l = em.find_level(p[2]);
        if (!l) unknown(key, "no level '" + p[2] + "'");
        em.levels[*l].energy = value;
    } else if (head == "transition" && p.size() == 5) {
        Emitter& em = emitter_of(s, key, p[1]);
        Transition* tr = nullptr;
        for (auto& t : em.transitions)
            if (t.excited == p[2] && t.ground == p[3]) tr = &t;
        if (!tr) unknown(key, "no transition " + p[2] + "->" + p[3]);
        if (p[4] == "gamma1d_right") tr->gamma1d_right = value;
        else if (p[4] == "gamma1d_left") tr->gamma1d_left = value;
        else if (p[4] == "gamma_prime") tr->gamma_prime = value;
        else if (p[4] == "phase") tr->coupling_phase = value;
        else unknown(key, "no transition field '" + p[4] + "'");
    } else if (head == "coupling" && p.size() == 3) {
        bool hit = false;
        auto set = [&](auto& list) {
            for (auto& c : list) {
                if (c.label != p[1]) continue;
                if (p[2] == "magnitude") c.magnitude = value;
                else if (p[2] == "phase") c.phase = value;
                else unknown(key, "no coupling field '" + p[2] + "'");
                hit = true;
            }
        };
        set(s.coherent_couplings);
        set(s.dipole_couplings);
        if (!hit) unknown(key, "no coupling labelled '" + p[1] + "'");
    } else if (head == "pulse" && p.size() == 2) {
        if (p[1] == "nbar") run.pulse.intensity = value / run.pulse.duration;
        else if (p[1] == "intensity") run.pulse.intensity = value;
        else if (p[1] == "duration") {
            if (!(value > 0.0)) throw Error(ErrorCode::SchemaError, "pulse duration must be positive");
            run.pulse.duration = value;
        } else unknown(key, "no pulse field '" + p[1] + "'");
    } else if (head == "detection" && p.size() == 2) {
        if (p[1] == "efficiency") run.detection.efficiency = value;
        else if (p[1] == "phase_offset") run.detection.phase_offset = value;
        else unknown(key, "no detection field '" + p[1] + "'");
    } else if (head == "lambda" && p.size() == 2) {
        Emitter& em = lambda_emitter(s, key);
        std::vector<std::size_t> grounds;
        for (std::size_t l = 0; l < em.levels.size(); ++l)
            if (em.levels[l].kind == LevelKind::ground) grounds.push_back(l);
        if (grounds.size() != 2) unknown(key, "needs a Lambda emitter");
        if (p[1] == "beta") {
            // beta0 = beta1 = beta/2 at fixed total width, side decay split equally.
            double total = 0.0;
            for (const auto& t : em.transitions) total += t.total();
            for (auto& t : em.transitions) {
                t.gamma1d_right = t.gamma1d_left = value * total / 4.0;
                t.gamma_prime = (1.0 - value) * total / 2.0;
            }
        } else if (p[1] == "omega01") {
            const LevelRef a{em.id, em.levels[grounds[0]].id}, b{em.id, em.levels[grounds[1]].id};
            bool hit = false;
            for (auto& gs : s.ground_splittings) {
                if (gs.a == a && gs.b == b) { gs.omega = value; hit = true; }
                else if (gs.a == b && gs.b == a) { gs.omega = -value; hit = true; }
            }
            if (!hit) s.ground_splittings.push_back({a, b, value});
        } else {
            unknown(key, "no Lambda field '" + p[1] + "'");
        }
    } else {
        unknown(key, "see docs/schema.md for the supported paths");
    }
}

namespace {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn)
{
    const unsigned nt = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, n)));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nt);
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += nt) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<std::string> default_quantities(RunMode m, bool multi_curve)
{
    switch (m) {
    case RunMode::spectrum:
        return multi_curve ? std::vector<std::string>{"T2"} : std::vector<std::string>{"T2", "R2", "loss"};
    case RunMode::lambda_rates:
        return {"p_d", "p_r", "p_sc", "p_red_r", "p_red_l", "p_blue_r", "p_blue_l", "p_click_single",
                "p_click_coherent"};
    case RunMode::lambda_intensity: return {"I_out", "rho00", "rho11", "rho01_re", "rho01_im"};
    case RunMode::fidelity: return {"F"};
    case RunMode::average_fidelity: return {"Fbar", "Fbar_numeric", "discrepancy"};
    }
    return {};
}

std::string default_column(const std::string& sweep)
{
    if (sweep == "detuning") return "delta";
    if (sweep == "time") return "t";
    return sweep;
}

bool is_spectrum_quantity(const std::string& q) { return q == "T2" || q == "R2" || q == "loss"; }

struct CurveResult {
    std::vector<std::vector<double>> values; // [grid point][quantity]
    std::vector<TableWarning> warnings;
};

double pick(const std::string& q, const std::map<std::string, double>& vals)
{
    auto it = vals.find(q);
    if (it == vals.end()) throw Error(ErrorCode::SchemaError, "quantity '" + q + "' is not produced by this run mode");
    return it->second;
}

std::map<std::string, double> lambda_point(const SystemSpec& sys, const RunSpec& run,
                                           const std::vector<std::string>& qs)
{
    const LambdaParams lp = lambda_params_from_system(sys, run.detuning_sign * run.detuning);
    std::map<std::string, double> v;
    bool need_filtered = false;
    for (const auto& q : qs)
        if (q.rfind("p_red", 0) == 0 || q.rfind("p_blue", 0) == 0) need_filtered = true;
    if (run.mode == RunMode::lambda_rates) {
        const Rates r = compute_rates(lp);
        v["p_d"] = r.p_d;
        v["p_r"] = r.p_r;
        v["p_sc"] = r.p_sc;
        if (need_filtered) {
            const auto f = filtered_photon_probs(lp);
            v["p_red_r"] = f.p_red_r;
            v["p_red_l"] = f.p_red_l;
            v["p_blue_r"] = f.p_blue_r;
            v["p_blue_l"] = f.p_blue_l;
        }
        const auto c = click_probabilities(lp, run.pulse, run.detection);
        v["p_click_single"] = c.p_click_single;
        v["p_click_coherent"] = c.p_click_coherent;
    } else if (run.mode == RunMode::average_fidelity) {
        const auto a = average_fidelity({lp, run.pulse, run.detection}, run.panels);
        v["Fbar"] = a.closed_form;
        v["Fbar_numeric"] = a.numeric;
        v["discrepancy"] = a.discrepancy;
    }
    return v;
}

CurveResult run_curve(const Scenario& sc, const Curve* curve, const std::vector<std::string>& qs,
                      const std::vector<double>& grid, bool has_grid, unsigned threads)
{
    SystemSpec sys = sc.system;
    RunSpec run = sc.run;
    if (curve)
        for (const auto& o : curve->overrides) apply_override(o.key, o.value, sys, run);
    const std::string sweep = effective_sweep(run);
    const std::string tag = curve ? "curve '" + curve->label + "' " : "";
    const std::size_t npts = has_grid ? grid.size() : 1;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    CurveResult res;
    res.values.assign(npts, std::vector<double>(qs.size(), nan));

    if (run.mode == RunMode::spectrum) {
        for (const auto& q : qs)
            if (!is_spectrum_quantity(q)) throw Error(ErrorCode::SchemaError, "quantity '" + q + "' is not a spectrum quantity");
        const auto basis = build_single_excitation_basis(sys);
        std::vector<std::string> fails(npts);
        std::vector<char> limits(npts, 0);
        parallel_for(npts, threads, [&](std::size_t k) {
            SystemSpec s2 = sys;
            RunSpec r2 = run;
            if (has_grid) {
                if (sweep == "detuning") r2.detuning = grid[k];
                else apply_override(sweep, grid[k], s2, r2);
            }
            try {
                bool dark = false;
                const auto amp = evaluate_amplitudes(s2, basis, r2.detuning_sign * r2.detuning, r2.input,
                                                     sc.waveguide.observation_phase, &dark);
                limits[k] = dark;
                const double t2 = std::norm(amp.t), r2n = std::norm(*amp.r);
                for (std::size_t q = 0; q < qs.size(); ++q)
                    res.values[k][q] = qs[q] == "T2" ? t2 : qs[q] == "R2" ? r2n : 1.0 - t2 - r2n;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SingularMatrix) throw;
                fails[k] = e.what();
            }
        });
        for (std::size_t k = 0; k < npts; ++k) {
            if (!fails[k].empty())
                res.warnings.push_back({"SingularMatrix", tag + "point " + std::to_string(k) + ": " + fails[k]});
            if (limits[k])
                res.warnings.push_back({"DarkStateLimit", tag + "point " + std::to_string(k) +
                                                              ": decoupled zero-width state on resonance, amplitudes taken as the limit"});
        }
        return res;
    }

    if (run.mode == RunMode::lambda_intensity) {
        const LambdaParams lp = lambda_params_from_system(sys, run.detuning_sign * run.detuning);
        const auto traj = evolve_ground_state(lp, run.pulse, grid);
        for (std::size_t k = 0; k < npts; ++k) {
            const auto& g = traj[k];
            const double t = grid[k];
            const double iout = t <= run.pulse.duration ? output_intensity(lp, run.pulse, t) : 0.0;
            std::map<std::string, double> v{{"I_out", iout},       {"rho00", g.rho00},
                                            {"rho11", g.rho11},    {"rho01_re", g.rho01.real()},
                                            {"rho01_im", g.rho01.imag()}};
            for (std::size_t q = 0; q < qs.size(); ++q) res.values[k][q] = pick(qs[q], v);
        }
        return res;
    }

    if (run.mode == RunMode::fidelity) {
        const LambdaParams lp = lambda_params_from_system(sys, run.detuning_sign * run.detuning);
        const FidelityParams fp{lp, run.pulse, run.detection};
        parallel_for(npts, threads, [&](std::size_t k) {
            std::map<std::string, double> v{{"F", conditional_fidelity(fp, grid[k] * run.pulse.duration)}};
            for (std::size_t q = 0; q < qs.size(); ++q) res.values[k][q] = pick(qs[q], v);
        });
        return res;
    }

    // lambda_rates and average_fidelity: one evaluation per point.
    parallel_for(npts, threads, [&](std::size_t k) {
        SystemSpec s2 = sys;
        RunSpec r2 = run;
        if (has_grid) {
            if (sweep == "detuning") r2.detuning = grid[k];
            else apply_override(sweep, grid[k], s2, r2);
        }
        const auto v = lambda_point(s2, r2, qs);
        for (std::size_t q = 0; q < qs.size(); ++q) res.values[k][q] = pick(qs[q], v);
    });
    return res;
}

std::string grid_text(const RunSpec& run, const std::string& sweep, const std::vector<double>& grid, bool has_grid)
{
    if (!has_grid) return "single point";
    std::ostringstream o;
    o << "sweep=" << sweep << " points=" << grid.size();
    if (!run.grid.explicit_values.empty()) o << " explicit";
    else o << " min=" << format_number(run.grid.min) << " max=" << format_number(run.grid.max);
    return o.str();
}

} // namespace

ResultTable run_scenario(const Scenario& sc, unsigned threads)
{
    const std::string sweep = effective_sweep(sc.run);
    std::vector<double> grid = sc.run.grid.values();
    if (grid.empty()) {
        if (sc.run.mode == RunMode::lambda_intensity) {
            grid = GridSpec{{}, 0.0, sc.run.pulse.duration, 201}.values();
        } else if (sc.run.mode == RunMode::fidelity) {
            grid = GridSpec{{}, 0.0, 1.0, 201}.values();
        }
    }
    const bool has_grid = !grid.empty();

    const bool multi = !sc.curves.empty();
    const auto qs = sc.run.quantities.empty() ? default_quantities(sc.run.mode, multi) : sc.run.quantities;

    ResultTable table;
    table.provenance.scenario_hash = fnv1a(serialize_scenario(sc));
    table.provenance.grid = grid_text(sc.run, sweep, grid, has_grid);
    if (has_grid) table.columns.push_back(sc.run.column.empty() ? default_column(sweep) : sc.run.column);

    std::vector<CurveResult> results;
    if (multi) {
        for (const auto& cv : sc.curves) {
            results.push_back(run_curve(sc, &cv, qs, grid, has_grid, threads));
            for (const auto& q : qs) table.columns.push_back(q + "_" + cv.label);
        }
    } else {
        results.push_back(run_curve(sc, nullptr, qs, grid, has_grid, threads));
        for (const auto& q : qs) table.columns.push_back(q);
    }

    const std::size_t npts = has_grid ? grid.size() : 1;
    for (std::size_t k = 0; k < npts; ++k) {
        std::vector<double> row;
        if (has_grid) row.push_back(grid[k]);
        for (const auto& r : results) row.insert(row.end(), r.values[k].begin(), r.values[k].end());
        table.rows.push_back(std::move(row));
    }
    for (const auto& r : results) table.warnings.insert(table.warnings.end(), r.warnings.begin(), r.warnings.end());
    return table;
}

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[48];
    const double a = std::abs(x);
    if (a < 1e-4 || a >= 1e6) std::snprintf(buf, sizeof buf, "%.11e", x);
    else std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string emit_table(const ResultTable& t, TableFormat format)
{
    std::string out;
    if (format == TableFormat::csv_with_provenance) {
        char hash[32];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(t.provenance.scenario_hash));
        out += "# scenario_hash=" + std::string(hash) + "\n";
        out += "# version=" + t.provenance.version + "\n";
        out += "# grid=" + t.provenance.grid + "\n";
    }
    for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
    out += "\n";
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size()) throw Error(ErrorCode::IoError, "table row width differs from header");
        for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_number(row[c]);
        out += "\n";
    }
    return out;
}

void write_table(const ResultTable& t, const std::string& path, TableFormat format)
{
    const std::string bytes = emit_table(t, format);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace wgqed
