#include "wgqed/emitter_model.hpp"

#include <cmath>
#include <set>

#include "wgqed/error.hpp"

namespace wgqed {

std::optional<std::size_t> Emitter::find_level(const std::string& level_id) const
{
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i].id == level_id) return i;
    return std::nullopt;
}

std::size_t Emitter::first_ground() const
{
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i].kind == LevelKind::ground) return i;
    throw Error(ErrorCode::EmptyManifold, "emitter '" + id + "' has no ground level");
}

std::optional<std::size_t> SystemSpec::find_emitter(const std::string& emitter_id) const
{
    for (std::size_t i = 0; i < emitters.size(); ++i)
        if (emitters[i].id == emitter_id) return i;
    return std::nullopt;
}

std::optional<std::size_t> CombinedBasis::excited_index(std::size_t emitter, std::size_t level) const
{
    for (std::size_t i = 0; i < excited_states.size(); ++i)
        if (excited_states[i].emitter == emitter && excited_states[i].level == level) return i;
    return std::nullopt;
}

std::optional<std::size_t> CombinedBasis::ground_index(const GroundConfig& config) const
{
    for (std::size_t i = 0; i < ground_states.size(); ++i)
        if (ground_states[i] == config) return i;
    return std::nullopt;
}

namespace {

std::string ref_name(const LevelRef& r) { return r.emitter + "." + r.level; }

const Level* resolve(const SystemSpec& s, const LevelRef& r)
{
    auto e = s.find_emitter(r.emitter);
    if (!e) return nullptr;
    auto l = s.emitters[*e].find_level(r.level);
    if (!l) return nullptr;
    return &s.emitters[*e].levels[*l];
}

void check_rate(ValidationReport& rep, double v, const std::string& what)
{
    if (!std::isfinite(v))
        rep.violations.push_back({"nonfinite value", what + " is not finite"});
    else if (v < 0.0)
        rep.violations.push_back({"negative rate", what + " = " + std::to_string(v) + " is negative"});
}

void check_pair(ValidationReport& rep, const SystemSpec& s, const LevelRef& a, const LevelRef& b,
                double magnitude, double phase, const std::string& what, bool distinct_emitters)
{
    for (const LevelRef* r : {&a, &b}) {
        const Level* lv = resolve(s, *r);
        if (!lv)
            rep.violations.push_back({"dangling level id", what + " references unknown level " + ref_name(*r)});
        else if (lv->kind != LevelKind::excited)
            rep.violations.push_back({"wrong level kind", what + " level " + ref_name(*r) + " is not excited"});
    }
    if (a == b) rep.violations.push_back({"self coupling", what + " couples " + ref_name(a) + " to itself"});
    if (distinct_emitters && a.emitter == b.emitter)
        rep.violations.push_back({"same emitter", what + " must join two distinct emitters"});
    check_rate(rep, magnitude, what + " magnitude");
    if (!std::isfinite(phase)) rep.violations.push_back({"nonfinite value", what + " phase is not finite"});
}

} // namespace

ValidationReport validate_system(const SystemSpec& s)
{
    ValidationReport rep;
    std::set<std::string> emitter_ids;
    bool multi_ground = false;
    for (const auto& em : s.emitters) {
        const std::string where = "emitter '" + em.id + "'";
        if (em.id.empty()) rep.violations.push_back({"empty id", "emitter with empty id"});
        if (!emitter_ids.insert(em.id).second)
            rep.violations.push_back({"duplicate id", "duplicate " + where});
        if (!std::isfinite(em.phase_position))
            rep.violations.push_back({"nonfinite value", where + " phase_position is not finite"});

        std::set<std::string> level_ids;
        int grounds = 0;
        for (const auto& lv : em.levels) {
            if (!level_ids.insert(lv.id).second)
                rep.violations.push_back({"duplicate id", where + " repeats level '" + lv.id + "'"});
            if (!std::isfinite(lv.energy))
                rep.violations.push_back({"nonfinite value", where + " level '" + lv.id + "' energy is not finite"});
            if (lv.kind == LevelKind::ground) ++grounds;
        }
        if (grounds > 1) multi_ground = true;

        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& tr : em.transitions) {
            const std::string tw = where + " transition " + tr.excited + "->" + tr.ground;
            auto e = em.find_level(tr.excited);
            auto g = em.find_level(tr.ground);
            if (!e || !g) {
                rep.violations.push_back({"dangling level id", tw + " references an unknown level"});
            } else {
                if (em.levels[*e].kind != LevelKind::excited)
                    rep.violations.push_back({"wrong level kind", tw + ": '" + tr.excited + "' is not excited"});
                if (em.levels[*g].kind != LevelKind::ground)
                    rep.violations.push_back({"wrong level kind", tw + ": '" + tr.ground + "' is not a ground level"});
            }
            if (!seen.insert({tr.excited, tr.ground}).second)
                rep.violations.push_back({"duplicate transition", tw + " is declared twice"});
            check_rate(rep, tr.gamma1d_right, tw + " gamma1d_right");
            check_rate(rep, tr.gamma1d_left, tw + " gamma1d_left");
            check_rate(rep, tr.gamma_prime, tw + " gamma_prime");
            if (!std::isfinite(tr.coupling_phase))
                rep.violations.push_back({"nonfinite value", tw + " coupling_phase is not finite"});
        }
    }
    if (multi_ground && s.emitters.size() > 1)
        rep.violations.push_back({"unsupported topology",
                                  "emitters with several ground levels cannot be combined with other emitters"});

    for (std::size_t i = 0; i < s.coherent_couplings.size(); ++i) {
        const auto& c = s.coherent_couplings[i];
        check_pair(rep, s, c.a, c.b, c.magnitude, c.phase, "coherent coupling #" + std::to_string(i), false);
    }
    for (std::size_t i = 0; i < s.dipole_couplings.size(); ++i) {
        const auto& c = s.dipole_couplings[i];
        check_pair(rep, s, c.a, c.b, c.magnitude, c.phase, "dipole coupling #" + std::to_string(i), true);
    }

    for (std::size_t i = 0; i < s.ground_splittings.size(); ++i) {
        const auto& gs = s.ground_splittings[i];
        const std::string what = "splitting " + ref_name(gs.a) + "/" + ref_name(gs.b);
        for (const LevelRef* r : {&gs.a, &gs.b}) {
            const Level* lv = resolve(s, *r);
            if (!lv)
                rep.violations.push_back({"dangling level id", what + " references unknown level " + ref_name(*r)});
            else if (lv->kind != LevelKind::ground)
                rep.violations.push_back({"wrong level kind", what + ": " + ref_name(*r) + " is not a ground level"});
        }
        if (!std::isfinite(gs.omega)) {
            rep.violations.push_back({"nonfinite value", what + " is not finite"});
            continue;
        }
        if (gs.a == gs.b && gs.omega != 0.0)
            rep.violations.push_back({"non-antisymmetric splitting", what + " must vanish for identical levels"});
        for (std::size_t j = 0; j < i; ++j) {
            const auto& o = s.ground_splittings[j];
            double expect;
            if (o.a == gs.a && o.b == gs.b) expect = o.omega;
            else if (o.a == gs.b && o.b == gs.a) expect = -o.omega;
            else continue;
            if (std::abs(expect - gs.omega) > 1e-12 * std::max(1.0, std::abs(expect)))
                rep.violations.push_back({"non-antisymmetric splitting", what + " contradicts an earlier entry"});
        }
    }
    return rep;
}

CombinedBasis build_single_excitation_basis(const SystemSpec& s)
{
    const auto rep = validate_system(s);
    if (!rep.ok())
        throw Error(ErrorCode::InvalidSystem, rep.violations.front().code + ": " + rep.violations.front().message);

    CombinedBasis basis;
    std::vector<std::vector<std::size_t>> grounds(s.emitters.size());
    bool any_excited = false;
    for (std::size_t j = 0; j < s.emitters.size(); ++j) {
        const auto& em = s.emitters[j];
        for (std::size_t l = 0; l < em.levels.size(); ++l) {
            if (em.levels[l].kind == LevelKind::ground) grounds[j].push_back(l);
            else any_excited = true;
        }
        if (grounds[j].empty())
            throw Error(ErrorCode::EmptyManifold, "emitter '" + em.id + "' has no ground level");
    }
    if (s.emitters.empty() || !any_excited)
        throw Error(ErrorCode::EmptyManifold, "no excited level in the system");

    // Cartesian product, first emitter varying slowest.
    std::size_t count = 1;
    for (const auto& g : grounds) count *= g.size();
    for (std::size_t n = 0; n < count; ++n) {
        GroundConfig g;
        g.levels.resize(grounds.size());
        std::size_t r = n;
        for (std::size_t j = grounds.size(); j-- > 0;) {
            g.levels[j] = grounds[j][r % grounds[j].size()];
            r /= grounds[j].size();
        }
        basis.ground_states.push_back(std::move(g));
    }

    GroundConfig rest;
    for (std::size_t j = 0; j < s.emitters.size(); ++j) rest.levels.push_back(grounds[j].front());

    for (std::size_t j = 0; j < s.emitters.size(); ++j) {
        const auto& em = s.emitters[j];
        for (std::size_t l = 0; l < em.levels.size(); ++l) {
            if (em.levels[l].kind != LevelKind::excited) continue;
            ExcitedState st{j, l, {}};
            for (std::size_t t = 0; t < em.transitions.size(); ++t) {
                if (em.transitions[t].excited != em.levels[l].id) continue;
                GroundConfig target = rest;
                target.levels[j] = *em.find_level(em.transitions[t].ground);
                st.channels.push_back({t, *basis.ground_index(target)});
            }
            basis.excited_states.push_back(std::move(st));
        }
    }
    return basis;
}

double total_decay_rate(const Emitter& emitter, const std::string& excited)
{
    auto l = emitter.find_level(excited);
    if (!l || emitter.levels[*l].kind != LevelKind::excited)
        throw Error(ErrorCode::UnknownLevel, "emitter '" + emitter.id + "' has no excited level '" + excited + "'");
    double sum = 0.0;
    for (const auto& tr : emitter.transitions)
        if (tr.excited == excited) sum += tr.total();
    return sum;
}

double ground_splitting(const SystemSpec& s, const LevelRef& a, const LevelRef& b)
{
    for (const auto& gs : s.ground_splittings) {
        if (gs.a == a && gs.b == b) return gs.omega;
        if (gs.a == b && gs.b == a) return -gs.omega;
    }
    const Level* la = resolve(s, a);
    const Level* lb = resolve(s, b);
    if (!la) throw Error(ErrorCode::UnknownLevel, "unknown level " + ref_name(a));
    if (!lb) throw Error(ErrorCode::UnknownLevel, "unknown level " + ref_name(b));
    return lb->energy - la->energy;
}

} // namespace wgqed
