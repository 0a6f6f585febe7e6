#include "fgml/mech.hpp"

#include <cmath>
#include <sstream>

namespace fgml::mech {

SyntaxError::SyntaxError(int line_, int col_, std::string expected_)
    : MechError("syntax error at line " + std::to_string(line_) + ", col " +
                std::to_string(col_) + ": expected " + expected_),
      line(line_), col(col_), expected(std::move(expected_)) {}

UnknownSpecies::UnknownSpecies(std::string name_, int line_)
    : MechError("unknown species '" + name_ + "' at line " + std::to_string(line_)),
      name(std::move(name_)), line(line_) {}

DuplicateSpecies::DuplicateSpecies(std::string name_)
    : MechError("duplicate species '" + name_ + "'"), name(std::move(name_)) {}

ElementImbalance::ElementImbalance(std::size_t index)
    : MechError("element imbalance in reaction " + std::to_string(index)),
      reaction_index(index) {}

TemperatureOutOfRange::TemperatureOutOfRange(double t_, double t_min_, double t_max_)
    : MechError("temperature " + std::to_string(t_) + " K outside [" +
                std::to_string(t_min_) + ", " + std::to_string(t_max_) + "] K"),
      t(t_), t_min(t_min_), t_max(t_max_) {}

int SpeciesThermo::atom_count(const std::string& element) const {
    for (const auto& [el, n] : composition)
        if (el == element) return n;
    return 0;
}

std::size_t Mechanism::species_index(const std::string& name) const {
    for (std::size_t i = 0; i < species.size(); ++i)
        if (species[i].name == name) return i;
    throw UnknownSpecies(name, 0);
}

long long Mechanism::find_species(const std::string& name) const {
    for (std::size_t i = 0; i < species.size(); ++i)
        if (species[i].name == name) return static_cast<long long>(i);
    return -1;
}

double Mechanism::t_min() const {
    double t = species.front().t_low;
    for (const auto& s : species) t = std::min(t, s.t_low);
    return t;
}

double Mechanism::t_max() const {
    double t = species.front().t_high;
    for (const auto& s : species) t = std::max(t, s.t_high);
    return t;
}

namespace {

const std::array<double, 7>& branch(const SpeciesThermo& s, double t) {
    return t < s.t_mid ? s.coeffs_low : s.coeffs_high;
}

// cp/R
double cp_R(const std::array<double, 7>& a, double t) {
    return a[0] + t * (a[1] + t * (a[2] + t * (a[3] + t * a[4])));
}

// h/(R T)
double h_RT(const std::array<double, 7>& a, double t) {
    return a[0] + t * (a[1] / 2.0 + t * (a[2] / 3.0 + t * (a[3] / 4.0 + t * a[4] / 5.0))) +
           a[5] / t;
}

// s/R at standard pressure
double s_R(const std::array<double, 7>& a, double t) {
    return a[0] * std::log(t) + t * (a[1] + t * (a[2] / 2.0 + t * (a[3] / 3.0 + t * a[4] / 4.0))) +
           a[6];
}

void check_envelope(const Mechanism& m, double t) {
    if (!(t >= m.t_min() && t <= m.t_max()))
        throw TemperatureOutOfRange(t, m.t_min(), m.t_max());
}

void check_mass_fractions(const Mechanism& m, const std::vector<double>& y) {
    if (y.size() != m.n_species())
        throw MechError("mass fraction vector has " + std::to_string(y.size()) +
                        " entries, mechanism has " + std::to_string(m.n_species()) +
                        " species");
}

} // namespace

double cp_species(const SpeciesThermo& s, double t) {
    return cp_R(branch(s, t), t) * kGasConstant / s.molar_mass;
}

double enthalpy_species_raw(const SpeciesThermo& s, double t) {
    return h_RT(branch(s, t), t) * kGasConstant * t / s.molar_mass;
}

double entropy_species(const SpeciesThermo& s, double t) {
    return s_R(branch(s, t), t) * kGasConstant / s.molar_mass;
}

double cp_mixture(const Mechanism& m, double t, const std::vector<double>& y) {
    check_envelope(m, t);
    check_mass_fractions(m, y);
    double cp = 0.0;
    for (std::size_t k = 0; k < m.n_species(); ++k)
        cp += y[k] * cp_species(m.species[k], t);
    return cp;
}

double enthalpy_species(const Mechanism& m, std::size_t index, double t) {
    check_envelope(m, t);
    return enthalpy_species_raw(m.species.at(index), t);
}

double enthalpy_mixture(const Mechanism& m, double t, const std::vector<double>& y) {
    check_envelope(m, t);
    check_mass_fractions(m, y);
    double h = 0.0;
    for (std::size_t k = 0; k < m.n_species(); ++k)
        h += y[k] * enthalpy_species_raw(m.species[k], t);
    return h;
}

double mixture_molar_mass(const Mechanism& m, const std::vector<double>& y) {
    check_mass_fractions(m, y);
    double inv = 0.0;
    for (std::size_t k = 0; k < m.n_species(); ++k)
        inv += std::max(y[k], 0.0) / m.species[k].molar_mass;
    if (inv <= 0.0) throw MechError("mass fractions sum to zero");
    return 1.0 / inv;
}

double density(const Mechanism& m, double t, double p, const std::vector<double>& y) {
    return p * mixture_molar_mass(m, y) / (kGasConstant * t);
}

std::vector<double> production_rates(const Mechanism& m, double t, double rho,
                                     const std::vector<double>& y) {
    check_envelope(m, t);
    check_mass_fractions(m, y);
    if (!(t > 0.0) || !(rho > 0.0))
        throw MechError("production_rates requires T > 0 and rho > 0");

    const std::size_t n = m.n_species();
    std::vector<double> conc(n); // kmol/m^3
    for (std::size_t k = 0; k < n; ++k)
        conc[k] = std::max(y[k], 0.0) * rho / m.species[k].molar_mass;

    std::vector<double> omega(n, 0.0); // kmol/(m^3 s), converted at the end
    const double rt = kGasConstant * t;

    for (const auto& r : m.reactions) {
        double kf = r.arrhenius_a * std::pow(t, r.arrhenius_b) *
                    std::exp(-r.activation_energy / rt);

        double qf = kf;
        for (const auto& [k, nu] : r.reactants)
            for (int j = 0; j < nu; ++j) qf *= conc[k];

        double qr = 0.0;
        if (r.reversible) {
            // K_c from the NASA-7 Gibbs energies at standard pressure
            double dg_RT = 0.0; // sum nu_prod g/RT - sum nu_reac g/RT
            int dnu = 0;
            for (const auto& [k, nu] : r.products) {
                const auto& a = branch(m.species[k], t);
                dg_RT += nu * (h_RT(a, t) - s_R(a, t));
                dnu += nu;
            }
            for (const auto& [k, nu] : r.reactants) {
                const auto& a = branch(m.species[k], t);
                dg_RT -= nu * (h_RT(a, t) - s_R(a, t));
                dnu -= nu;
            }
            double kc = std::exp(-dg_RT) * std::pow(kStandardPressure / rt, dnu);
            double kr = kf / kc;
            qr = kr;
            for (const auto& [k, nu] : r.products)
                for (int j = 0; j < nu; ++j) qr *= conc[k];
        }

        double q = qf - qr;
        for (const auto& [k, nu] : r.reactants) omega[k] -= nu * q;
        for (const auto& [k, nu] : r.products) omega[k] += nu * q;
    }

    for (std::size_t k = 0; k < n; ++k)
        omega[k] *= m.species[k].molar_mass; // -> kg/(m^3 s)
    return omega;
}

} // namespace fgml::mech
