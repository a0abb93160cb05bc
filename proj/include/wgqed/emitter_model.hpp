// Emitters, transitions, couplings and the combined single-excitation basis

#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace wgqed {

enum class LevelKind { ground, excited };

struct Level {
    std::string id;
    double energy{0.0}; // units of the reference rate
    LevelKind kind{LevelKind::ground};

    bool operator==(const Level&) const = default;
};

struct Transition {
    std::string excited;
    std::string ground;
    double gamma1d_right{0.0};
    double gamma1d_left{0.0};
    double gamma_prime{0.0};
    double coupling_phase{0.0};

    double gamma1d() const { return gamma1d_right + gamma1d_left; }
    double total() const { return gamma1d_right + gamma1d_left + gamma_prime; }
    bool operator==(const Transition&) const = default;
};

// Level of a given emitter, used wherever couplings cross emitter boundaries.
struct LevelRef {
    std::string emitter;
    std::string level;

    auto operator<=>(const LevelRef&) const = default;
};

struct CoherentCoupling {
    LevelRef a;
    LevelRef b;
    double magnitude{0.0}; // full off-diagonal matrix element
    double phase{0.0};
    std::string label;

    bool operator==(const CoherentCoupling&) const = default;
};

struct DipoleCoupling {
    LevelRef a;
    LevelRef b;
    double magnitude{0.0};
    double phase{0.0};
    std::string label;

    bool operator==(const DipoleCoupling&) const = default;
};

struct Emitter {
    std::string id;
    std::vector<Level> levels;
    std::vector<Transition> transitions;
    double phase_position{0.0}; // k0 * z

    std::optional<std::size_t> find_level(const std::string& level_id) const;
    std::size_t first_ground() const;
    bool operator==(const Emitter&) const = default;
};

// omega_{ab} between two ground levels; the reverse pair carries the negative.
struct GroundSplitting {
    LevelRef a;
    LevelRef b;
    double omega{0.0};

    bool operator==(const GroundSplitting&) const = default;
};

struct SystemSpec {
    std::vector<Emitter> emitters;
    std::vector<CoherentCoupling> coherent_couplings;
    std::vector<DipoleCoupling> dipole_couplings;
    std::vector<GroundSplitting> ground_splittings;

    std::optional<std::size_t> find_emitter(const std::string& id) const;
    bool operator==(const SystemSpec&) const = default;
};

struct Violation {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

struct GroundConfig {
    std::vector<std::size_t> levels; // level index per emitter

    bool operator==(const GroundConfig&) const = default;
};

struct DecayChannel {
    std::size_t transition{0};   // index into the host emitter's transitions
    std::size_t ground_state{0}; // index into CombinedBasis::ground_states
};

struct ExcitedState {
    std::size_t emitter{0};
    std::size_t level{0};
    std::vector<DecayChannel> channels;
};

struct CombinedBasis {
    std::vector<GroundConfig> ground_states;
    std::vector<ExcitedState> excited_states;

    std::size_t dim() const { return excited_states.size(); }
    std::optional<std::size_t> excited_index(std::size_t emitter, std::size_t level) const;
    std::optional<std::size_t> ground_index(const GroundConfig& config) const;
};

ValidationReport validate_system(const SystemSpec& system);

CombinedBasis build_single_excitation_basis(const SystemSpec& system);

double total_decay_rate(const Emitter& emitter, const std::string& excited);

// Splitting omega_{ab} from the explicit table if present, else from level energies.
double ground_splitting(const SystemSpec& system, const LevelRef& a, const LevelRef& b);

} // namespace wgqed
