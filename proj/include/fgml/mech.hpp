#ifndef FGML_MECH_HPP
#define FGML_MECH_HPP

#include <array>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fgml::mech {

// Universal gas constant [J/(kmol K)] and standard pressure [Pa].
inline constexpr double kGasConstant = 8314.462618;
inline constexpr double kStandardPressure = 101325.0;

struct MechError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : MechError {
    int line;
    int col;
    std::string expected;
    SyntaxError(int line_, int col_, std::string expected_);
};

struct UnknownSpecies : MechError {
    std::string name;
    int line;
    UnknownSpecies(std::string name_, int line_);
};

struct DuplicateSpecies : MechError {
    std::string name;
    explicit DuplicateSpecies(std::string name_);
};

struct ElementImbalance : MechError {
    std::size_t reaction_index;
    explicit ElementImbalance(std::size_t index);
};

struct TemperatureOutOfRange : MechError {
    double t;
    double t_min, t_max;
    TemperatureOutOfRange(double t_, double t_min_, double t_max_);
};

// NASA-7 polynomial data for one species. coeffs_low applies below t_mid,
// coeffs_high at and above it. Outside [t_low, t_high] the nearest branch
// extrapolates; the mechanism-level envelope check is done by the callers.
struct SpeciesThermo {
    std::string name;
    double molar_mass = 0.0; // kg/kmol, derived from composition
    double t_low = 0.0, t_mid = 0.0, t_high = 0.0;
    std::array<double, 7> coeffs_low{};
    std::array<double, 7> coeffs_high{};
    std::vector<std::pair<std::string, int>> composition; // element -> atom count

    int atom_count(const std::string& element) const;

    bool operator==(const SpeciesThermo&) const = default;
};

struct Reaction {
    // (species index, stoichiometric coefficient), in file order
    std::vector<std::pair<std::size_t, int>> reactants;
    std::vector<std::pair<std::size_t, int>> products;
    double arrhenius_a = 0.0;        // (m^3/kmol)^(order-1) / s
    double arrhenius_b = 0.0;
    double activation_energy = 0.0;  // J/kmol
    bool reversible = false;

    bool operator==(const Reaction&) const = default;
};

class Mechanism {
public:
    std::vector<std::string> elements;
    std::vector<SpeciesThermo> species;
    std::vector<Reaction> reactions;

    std::size_t n_species() const { return species.size(); }

    // Index of a species name; throws UnknownSpecies(line=0) if absent.
    std::size_t species_index(const std::string& name) const;
    // -1 sentinel variant for optional species.
    long long find_species(const std::string& name) const;

    // Valid temperature envelope [min t_low, max t_high] over all species.
    double t_min() const;
    double t_max() const;

    bool operator==(const Mechanism&) const = default;
};

// Atomic mass [kg/kmol] of an element symbol; throws SyntaxError-style
// MechError for symbols outside the built-in table.
double atomic_mass(const std::string& element);

// Parse the documented Chemkin-like subset grammar (see
// docs/mechanism-format.md). Deterministic; reports line/column on failure.
Mechanism parse_mechanism(const std::string& text);

// Canonical text form; parse_mechanism(serialize_mechanism(m)) == m exactly.
std::string serialize_mechanism(const Mechanism& m);

// ---- thermodynamic property evaluation -------------------------------------

// Per-species NASA-7 evaluations, mass units. No range check (branch
// polynomials extrapolate); used by the mixture-level checked operations.
double cp_species(const SpeciesThermo& s, double t);       // J/(kg K)
double enthalpy_species_raw(const SpeciesThermo& s, double t); // J/kg
double entropy_species(const SpeciesThermo& s, double t);  // J/(kg K), at p0

// Mass-weighted mixture heat capacity [J/(kg K)].
// Throws TemperatureOutOfRange outside the mechanism envelope.
double cp_mixture(const Mechanism& m, double t, const std::vector<double>& y);

// Absolute species enthalpy (including heat of formation) [J/kg].
double enthalpy_species(const Mechanism& m, std::size_t index, double t);

// Mass-weighted mixture enthalpy [J/kg].
double enthalpy_mixture(const Mechanism& m, double t, const std::vector<double>& y);

// Mean molar mass of a mixture [kg/kmol].
double mixture_molar_mass(const Mechanism& m, const std::vector<double>& y);

// Ideal-gas density [kg/m^3] at pressure p [Pa].
double density(const Mechanism& m, double t, double p, const std::vector<double>& y);

// Net species production rates [kg/(m^3 s)] from the law of mass action with
// Arrhenius forward rates; reverse rates from NASA-7 equilibrium constants.
// Negative mass fractions contribute zero concentration.
std::vector<double> production_rates(const Mechanism& m, double t, double rho,
                                     const std::vector<double>& y);

} // namespace fgml::mech

#endif
