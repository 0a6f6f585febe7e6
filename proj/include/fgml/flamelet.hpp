#ifndef FGML_FLAMELET_HPP
#define FGML_FLAMELET_HPP

#include "fgml/mech.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fgml::flamelet {

struct FlameletError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : FlameletError {
    using FlameletError::FlameletError;
};

struct SingularJacobian : FlameletError {
    using FlameletError::FlameletError;
};

// Thrown by callers that require convergence (e.g. tabulation); solve_steady
// itself reports failure through FlameletSolution::converged.
struct NotConverged : FlameletError {
    double residual_norm;
    int steps;
    NotConverged(double r, int s)
        : FlameletError("flamelet solve did not converge (residual " +
                        std::to_string(r) + " after " + std::to_string(s) + " steps)"),
          residual_norm(r), steps(s) {}
};

// Mixture-fraction grid on [0, 1].
struct Grid {
    std::vector<double> z;

    static Grid uniform(int n);
    // Points concentrated around z_focus with a sinh stretching; beta sets
    // the clustering strength (0 recovers uniform).
    static Grid clustered(int n, double z_focus, double beta);

    std::size_t size() const { return z.size(); }
    void validate() const;

    bool operator==(const Grid&) const = default;
};

enum class ChiShape { analytic_erfc, constant };

// Scalar dissipation rate profile chi(Z) anchored at chi(z_st) = chi_st.
struct ChiProfile {
    double chi_st = 1.0; // 1/s
    double z_st = 0.5;
    ChiShape shape = ChiShape::analytic_erfc;
};

// erfc^-1 on (0, 2); used by the analytic profile and exposed for tests.
double erfc_inv(double y);

// chi(z). The analytic-erfc shape is
//   chi_st * exp(2*(erfcinv(2 z_st)^2 - erfcinv(2 z)^2))
// and vanishes at z = 0 and z = 1; the constant shape returns chi_st.
double chi_of_z(const ChiProfile& profile, double z);

struct BoundaryConditions {
    double t_ox = 300.0;   // K, Z = 0 side
    double t_fuel = 300.0; // K, Z = 1 side
    std::vector<double> y_ox;
    std::vector<double> y_fuel;
    double pressure = 101325.0; // Pa

    void validate(const mech::Mechanism& m) const;

    bool operator==(const BoundaryConditions&) const = default;
};

// Z where the streams mix in stoichiometric proportion, from the elemental
// (Bilger) coupling function of the two boundary compositions.
double stoichiometric_mixture_fraction(const mech::Mechanism& m,
                                       const BoundaryConditions& bc);

// Complete-combustion product composition and adiabatic flame temperature of
// the stoichiometric mixture of the two streams. Used for the ignited
// initial guess; returns the temperature [K].
double adiabatic_flame_temperature(const mech::Mechanism& m,
                                   const BoundaryConditions& bc);

// Profiles on a grid; y is node-major: y[node][species].
struct FlameletState {
    std::vector<double> t;
    std::vector<std::vector<double>> y;
};

enum class GuessMode { burke_schumann, linear };

FlameletState initial_guess(const mech::Mechanism& m, const BoundaryConditions& bc,
                            const Grid& grid, GuessMode mode);

// Steady residual of the simplified flamelet equations at the interior nodes
// (index 1 .. n-2 of the grid):
//   F_T  = (rho chi / 2) D2 T - (1/cp) sum_k h_k wdot_k
//   F_Yk = (rho chi / 2) D2 Y_k + wdot_k
// with the central second difference D2 on the (possibly nonuniform) grid,
// unity Lewis numbers, no radiation, and ideal-gas density at bc.pressure.
struct ResidualField {
    std::vector<double> t;                // interior nodes
    std::vector<std::vector<double>> y;   // interior nodes x all species
};

ResidualField steady_residual(const mech::Mechanism& m, const ChiProfile& profile,
                              const BoundaryConditions& bc, const Grid& grid,
                              const FlameletState& state);

struct SolveOptions {
    int max_pseudo_steps = 2000;
    double dt0 = 1e-6;          // s
    double residual_tol = 1e-8; // relative to the initial residual (floored at 1)
    int max_newton_per_step = 10;
    GuessMode guess = GuessMode::burke_schumann;
};

struct FlameletSolution {
    Grid grid;
    double chi_st = 0.0;
    std::vector<double> temperature;              // K, per node
    std::vector<std::vector<double>> mass_fractions; // node-major
    std::vector<double> density;                  // kg/m^3, per node
    bool converged = false;
    double residual_norm = 0.0; // scaled steady residual at exit
    int steps = 0;              // pseudo-time steps taken

    double peak_temperature() const;
    double peak_location() const; // z of the temperature maximum

    bool operator==(const FlameletSolution&) const = default;
};

// Pseudo-transient continuation to the steady state: implicit Euler in
// pseudo-time with Newton on each step, growing the step on success and
// halving it on failure. Non-convergence is reported via the converged flag
// with the best iterate retained.
FlameletSolution solve_steady(const mech::Mechanism& m, const ChiProfile& profile,
                              const BoundaryConditions& bc, const Grid& grid,
                              const SolveOptions& opts = {});

// Linear interpolation helper shared by the lookup table and tests.
double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys,
                     double x);

} // namespace fgml::flamelet

#endif
