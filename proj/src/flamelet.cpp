#include "fgml/flamelet.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fgml::flamelet {

using mech::Mechanism;

namespace {

constexpr double kTempScale = 2000.0; // K, weights T rows in the residual norm
constexpr double kDtMax = 1e12;
constexpr double kDtMin = 1e-16;

} // namespace

// ---- grid -------------------------------------------------------------------

Grid Grid::uniform(int n) {
    if (n < 5) throw DomainError("grid needs at least 5 points");
    Grid g;
    g.z.resize(n);
    for (int j = 0; j < n; ++j) g.z[j] = static_cast<double>(j) / (n - 1);
    g.z.front() = 0.0;
    g.z.back() = 1.0;
    return g;
}

Grid Grid::clustered(int n, double z_focus, double beta) {
    if (n < 5) throw DomainError("grid needs at least 5 points");
    if (!(z_focus > 0.0 && z_focus < 1.0))
        throw DomainError("clustering point must lie inside (0, 1)");
    if (beta <= 0.0) return uniform(n);

    // interior stretching (Roberts): z(s) = zf * (1 + sinh(beta (s - s*)) / sinh(beta s*))
    double eb = std::exp(beta), emb = std::exp(-beta);
    double s_star = 1.0 / (2.0 * beta) *
                    std::log((1.0 + (eb - 1.0) * z_focus) / (1.0 + (emb - 1.0) * z_focus));
    Grid g;
    g.z.resize(n);
    for (int j = 0; j < n; ++j) {
        double s = static_cast<double>(j) / (n - 1);
        g.z[j] = z_focus * (1.0 + std::sinh(beta * (s - s_star)) / std::sinh(beta * s_star));
    }
    g.z.front() = 0.0;
    g.z.back() = 1.0;
    g.validate();
    return g;
}

void Grid::validate() const {
    if (z.size() < 5) throw DomainError("grid needs at least 5 points");
    if (z.front() != 0.0 || z.back() != 1.0)
        throw DomainError("grid must span [0, 1] exactly");
    for (std::size_t j = 1; j < z.size(); ++j)
        if (!(z[j] > z[j - 1])) throw DomainError("grid points must be strictly increasing");
}

// ---- chi profile ------------------------------------------------------------

double erfc_inv(double y) {
    if (!(y > 0.0 && y < 2.0)) throw DomainError("erfc_inv argument must be in (0, 2)");
    double x = 1.0 - y; // erf_inv(x)
    if (x == 0.0) return 0.0;

    // initial estimate (Giles 2010), then Newton on erf
    double w = -std::log((1.0 - x) * (1.0 + x));
    double t;
    if (w < 5.0) {
        w -= 2.5;
        t = 2.81022636e-08;
        t = 3.43273939e-07 + t * w;
        t = -3.5233877e-06 + t * w;
        t = -4.39150654e-06 + t * w;
        t = 0.00021858087 + t * w;
        t = -0.00125372503 + t * w;
        t = -0.00417768164 + t * w;
        t = 0.246640727 + t * w;
        t = 1.50140941 + t * w;
    } else {
        w = std::sqrt(w) - 3.0;
        t = -0.000200214257;
        t = 0.000100950558 + t * w;
        t = 0.00134934322 + t * w;
        t = -0.00367342844 + t * w;
        t = 0.00573950773 + t * w;
        t = -0.0076224613 + t * w;
        t = 0.00943887047 + t * w;
        t = 1.00167406 + t * w;
        t = 2.83297682 + t * w;
    }
    t *= x;
    const double two_over_sqrt_pi = 1.1283791670955126;
    for (int it = 0; it < 3; ++it) {
        double err = std::erf(t) - x;
        t -= err / (two_over_sqrt_pi * std::exp(-t * t));
    }
    return t;
}

double chi_of_z(const ChiProfile& profile, double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("z must lie in [0, 1]");
    if (!(profile.chi_st > 0.0)) throw DomainError("chi_st must be positive");
    if (!(profile.z_st > 0.0 && profile.z_st < 1.0))
        throw DomainError("z_st must lie inside (0, 1)");
    if (profile.shape == ChiShape::constant) return profile.chi_st;
    if (z <= 0.0 || z >= 1.0) return 0.0;
    double a_st = erfc_inv(2.0 * profile.z_st);
    double a = erfc_inv(2.0 * z);
    return profile.chi_st * std::exp(2.0 * (a_st * a_st - a * a));
}

// ---- boundary conditions ------------------------------------------------

void BoundaryConditions::validate(const Mechanism& m) const {
    if (y_ox.size() != m.n_species() || y_fuel.size() != m.n_species())
        throw DomainError("boundary composition size does not match the mechanism");
    for (const auto* y : {&y_ox, &y_fuel}) {
        double sum = 0.0;
        for (double v : *y) {
            if (v < 0.0) throw DomainError("boundary mass fractions must be nonnegative");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw DomainError("boundary mass fractions must sum to 1 within 1e-9");
    }
    if (!(t_ox > 0.0 && t_fuel > 0.0)) throw DomainError("boundary temperatures must be positive");
    if (!(pressure > 0.0)) throw DomainError("pressure must be positive");
}

namespace {

// Elemental mass fractions of a mixture.
double element_mass_fraction(const Mechanism& m, const std::vector<double>& y,
                             const std::string& el) {
    double zf = 0.0;
    for (std::size_t k = 0; k < m.n_species(); ++k) {
        int n = m.species[k].atom_count(el);
        if (n > 0) zf += y[k] * n * mech::atomic_mass(el) / m.species[k].molar_mass;
    }
    return zf;
}

// Bilger coupling function beta = 2 Z_C/W_C + Z_H/(2 W_H) - Z_O/W_O.
double bilger_beta(const Mechanism& m, const std::vector<double>& y) {
    double b = 0.0;
    b += 2.0 * element_mass_fraction(m, y, "C") / mech::atomic_mass("C");
    b += element_mass_fraction(m, y, "H") / (2.0 * mech::atomic_mass("H"));
    b -= element_mass_fraction(m, y, "O") / mech::atomic_mass("O");
    return b;
}

std::vector<double> lerp_vec(const std::vector<double>& a, const std::vector<double>& b,
                             double t) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
    return out;
}

} // namespace

double stoichiometric_mixture_fraction(const Mechanism& m, const BoundaryConditions& bc) {
    double b_fuel = bilger_beta(m, bc.y_fuel);
    double b_ox = bilger_beta(m, bc.y_ox);
    double denom = b_ox - b_fuel;
    if (std::abs(denom) < 1e-30) return 0.5; // no stoichiometric surface
    double z = b_ox / denom;
    if (!(z > 0.0 && z < 1.0)) return 0.5;
    return z;
}

namespace {

// Complete-combustion composition of the stoichiometric mixture: all C to
// CO2, all H to H2O, remainder to the balance (last) species. Returns false
// when the mechanism lacks the product species.
bool burnt_composition(const Mechanism& m, const std::vector<double>& y_mix,
                       std::vector<double>& y_burnt) {
    long long i_co2 = m.find_species("CO2");
    long long i_h2o = m.find_species("H2O");
    if (i_co2 < 0 || i_h2o < 0) return false;
    double zc = element_mass_fraction(m, y_mix, "C");
    double zh = element_mass_fraction(m, y_mix, "H");
    y_burnt.assign(m.n_species(), 0.0);
    y_burnt[i_co2] = zc * m.species[i_co2].molar_mass / mech::atomic_mass("C");
    y_burnt[i_h2o] = zh * m.species[i_h2o].molar_mass / (2.0 * mech::atomic_mass("H"));
    double rest = 1.0 - y_burnt[i_co2] - y_burnt[i_h2o];
    if (rest < 0.0) return false;
    y_burnt[m.n_species() - 1] += rest;
    return true;
}

} // namespace

double adiabatic_flame_temperature(const Mechanism& m, const BoundaryConditions& bc) {
    bc.validate(m);
    double z_st = stoichiometric_mixture_fraction(m, bc);
    auto y_mix = lerp_vec(bc.y_ox, bc.y_fuel, z_st);
    std::vector<double> y_burnt;
    if (!burnt_composition(m, y_mix, y_burnt))
        throw FlameletError("mechanism lacks CO2/H2O product species for the flame estimate");
    double t_u = (1.0 - z_st) * bc.t_ox + z_st * bc.t_fuel;
    double h_u = mech::enthalpy_mixture(m, t_u, y_mix);

    double t = 2000.0;
    double t_hi = m.t_max() - 1.0;
    for (int it = 0; it < 200; ++it) {
        double f = mech::enthalpy_mixture(m, t, y_burnt) - h_u;
        double cp = mech::cp_mixture(m, t, y_burnt);
        double dt = -f / cp;
        t += std::clamp(dt, -400.0, 400.0);
        t = std::clamp(t, std::max(bc.t_ox, bc.t_fuel), t_hi);
        if (std::abs(dt) < 1e-10) break;
    }
    return t;
}

FlameletState initial_guess(const Mechanism& m, const BoundaryConditions& bc,
                            const Grid& grid, GuessMode mode) {
    bc.validate(m);
    grid.validate();
    const std::size_t n = grid.size();
    const std::size_t nk = m.n_species();
    FlameletState st;
    st.t.resize(n);
    st.y.assign(n, std::vector<double>(nk));

    double z_st = stoichiometric_mixture_fraction(m, bc);
    std::vector<double> y_burnt;
    double t_peak = 0.0;
    bool ignited = false;
    if (mode == GuessMode::burke_schumann) {
        auto y_mix = lerp_vec(bc.y_ox, bc.y_fuel, z_st);
        if (burnt_composition(m, y_mix, y_burnt)) {
            ignited = true;
            t_peak = adiabatic_flame_temperature(m, bc);
        }
    }

    for (std::size_t j = 0; j < n; ++j) {
        double z = grid.z[j];
        if (!ignited) {
            st.t[j] = (1.0 - z) * bc.t_ox + z * bc.t_fuel;
            st.y[j] = lerp_vec(bc.y_ox, bc.y_fuel, z);
        } else if (z <= z_st) {
            double w = z / z_st;
            st.t[j] = (1.0 - w) * bc.t_ox + w * t_peak;
            st.y[j] = lerp_vec(bc.y_ox, y_burnt, w);
        } else {
            double w = (z - z_st) / (1.0 - z_st);
            st.t[j] = (1.0 - w) * t_peak + w * bc.t_fuel;
            st.y[j] = lerp_vec(y_burnt, bc.y_fuel, w);
        }
    }
    st.t.front() = bc.t_ox;
    st.t.back() = bc.t_fuel;
    st.y.front() = bc.y_ox;
    st.y.back() = bc.y_fuel;
    return st;
}

// ---- residual ---------------------------------------------------------------

namespace {

// Everything a node evaluation needs, with temperatures clamped into the
// thermo envelope so transient Newton iterates cannot throw.
struct NodeEval {
    double rho;
    double f_t;
    std::vector<double> f_y;
};

class Problem {
public:
    Problem(const Mechanism& m, const ChiProfile& profile, const BoundaryConditions& bc,
            const Grid& grid)
        : m_(m), bc_(bc), grid_(grid), nk_(m.n_species()), n_(grid.size()) {
        chi_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) chi_[j] = chi_of_z(profile, grid.z[j]);
        t_lo_ = m.t_min();
        t_hi_ = m.t_max();
    }

    std::size_t n() const { return n_; }
    std::size_t nk() const { return nk_; }

    // residual at interior node j from the three surrounding states
    NodeEval eval(const FlameletState& st, std::size_t j, bool clamp_temperature) const {
        double t = st.t[j];
        if (clamp_temperature) t = std::clamp(t, t_lo_, t_hi_);
        const auto& y = st.y[j];

        double rho = mech::density(m_, t, bc_.pressure, y);
        auto omega = mech::production_rates(m_, t, rho, y);
        double cp = mech::cp_mixture(m_, t, y);

        double h_dot = 0.0;
        for (std::size_t k = 0; k < nk_; ++k)
            h_dot += mech::enthalpy_species_raw(m_.species[k], t) * omega[k];

        double hm = grid_.z[j] - grid_.z[j - 1];
        double hp = grid_.z[j + 1] - grid_.z[j];
        double denom = hm * hp * (hm + hp);
        auto d2 = [&](double um, double uc, double up) {
            return 2.0 * (hm * up - (hm + hp) * uc + hp * um) / denom;
        };

        double diff = 0.5 * rho * chi_[j];
        NodeEval out;
        out.rho = rho;
        out.f_t = diff * d2(st.t[j - 1], st.t[j], st.t[j + 1]) - h_dot / cp;
        out.f_y.resize(nk_);
        for (std::size_t k = 0; k < nk_; ++k)
            out.f_y[k] = diff * d2(st.y[j - 1][k], st.y[j][k], st.y[j + 1][k]) + omega[k];
        return out;
    }

private:
    const Mechanism& m_;
    const BoundaryConditions& bc_;
    const Grid& grid_;
    std::size_t nk_, n_;
    std::vector<double> chi_;
    double t_lo_, t_hi_;
};

} // namespace

ResidualField steady_residual(const Mechanism& m, const ChiProfile& profile,
                              const BoundaryConditions& bc, const Grid& grid,
                              const FlameletState& state) {
    bc.validate(m);
    grid.validate();
    if (state.t.size() != grid.size() || state.y.size() != grid.size())
        throw DomainError("state size does not match the grid");

    Problem prob(m, profile, bc, grid);
    ResidualField out;
    const std::size_t n_int = grid.size() - 2;
    out.t.resize(n_int);
    out.y.assign(n_int, std::vector<double>(m.n_species()));
    for (std::size_t a = 0; a < n_int; ++a) {
        auto e = prob.eval(state, a + 1, /*clamp_temperature=*/false);
        out.t[a] = e.f_t;
        out.y[a] = e.f_y;
    }
    return out;
}

// ---- steady solver ------------------------------------------------------

namespace {

class PtcSolver {
public:
    PtcSolver(const Mechanism& m, const ChiProfile& profile, const BoundaryConditions& bc,
              const Grid& grid, const SolveOptions& opts)
        : prob_(m, profile, bc, grid), m_(m), bc_(bc), grid_(grid), opts_(opts),
          nk_(m.n_species()), n_(grid.size()), n_int_(n_ - 2), nvar_(nk_), bal_(nk_ - 1) {}

    FlameletSolution run() {
        FlameletState st = initial_guess(m_, bc_, grid_, opts_.guess);
        apply_balance(st);

        std::vector<NodeEval> f(n_int_);
        double r = eval_all(st, f);
        double threshold = opts_.residual_tol * std::max(r, 1.0);

        FlameletState best = st;
        double best_r = r;

        double dt = opts_.dt0;
        int step = 0;
        bool converged = r <= threshold;

        while (!converged && step < opts_.max_pseudo_steps && dt > kDtMin) {
            ++step;
            FlameletState trial = st;
            if (newton_step(trial, st, dt, r)) {
                st = trial;
                r = eval_all(st, f);
                if (r < best_r) {
                    best = st;
                    best_r = r;
                }
                if (r <= threshold) {
                    converged = true;
                    break;
                }
                dt = std::min(dt * 1.5, kDtMax);
            } else {
                dt *= 0.5;
            }
        }

        const FlameletState& out_state = converged ? st : best;
        double out_r = converged ? r : best_r;
        return finish(out_state, out_r, converged, step);
    }

private:
    Problem prob_;
    const Mechanism& m_;
    const BoundaryConditions& bc_;
    const Grid& grid_;
    SolveOptions opts_;
    std::size_t nk_, n_, n_int_, nvar_, bal_;
    bool first_solve_ = true;

    void apply_balance(FlameletState& st) const {
        for (std::size_t j = 1; j + 1 < n_; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < nk_; ++k)
                if (k != bal_) sum += st.y[j][k];
            st.y[j][bal_] = 1.0 - sum;
        }
    }

    bool state_ok(const FlameletState& st) const {
        for (std::size_t j = 1; j + 1 < n_; ++j) {
            if (!std::isfinite(st.t[j]) || st.t[j] < 100.0 || st.t[j] > 6000.0) return false;
            for (std::size_t k = 0; k < nk_; ++k)
                if (!std::isfinite(st.y[j][k]) || std::abs(st.y[j][k]) > 2.0) return false;
        }
        return true;
    }

    // scaled max-norm of the steady residual; also fills the node evals
    double eval_all(const FlameletState& st, std::vector<NodeEval>& f) const {
        double r = 0.0;
        for (std::size_t a = 0; a < n_int_; ++a) {
            f[a] = prob_.eval(st, a + 1, true);
            r = std::max(r, node_norm(f[a]));
        }
        return r;
    }

    double node_norm(const NodeEval& e) const {
        double r = std::abs(e.f_t) / (e.rho * kTempScale);
        for (std::size_t k = 0; k < nk_; ++k)
            if (k != bal_) r = std::max(r, std::abs(e.f_y[k]) / e.rho);
        return r;
    }

    // implicit Euler step residual R = rho (v - u)/dt - F(v) at node j
    void step_residual(const NodeEval& e, const FlameletState& v, const FlameletState& u,
                       std::size_t j, double dt, double* out) const {
        out[0] = e.rho * (v.t[j] - u.t[j]) / dt - e.f_t;
        std::size_t m = 1;
        for (std::size_t k = 0; k < nk_; ++k) {
            if (k == bal_) continue;
            out[m++] = e.rho * (v.y[j][k] - u.y[j][k]) / dt - e.f_y[k];
        }
    }

    double step_norm(const std::vector<double>& r, const std::vector<double>& rho) const {
        double out = 0.0;
        for (std::size_t a = 0; a < n_int_; ++a) {
            out = std::max(out, std::abs(r[a * nvar_]) / (rho[a] * kTempScale));
            for (std::size_t m = 1; m < nvar_; ++m)
                out = std::max(out, std::abs(r[a * nvar_ + m]) / rho[a]);
        }
        return out;
    }

    // One implicit Euler pseudo-step solved by damped-free Newton with a
    // finite-difference block-tridiagonal Jacobian. Returns success.
    bool newton_step(FlameletState& v, const FlameletState& u, double dt, double r_start) {
        const std::size_t nv = n_int_ * nvar_;
        std::vector<double> resid(nv), rho(n_int_);
        std::vector<Eigen::MatrixXd> sub(n_int_), diag(n_int_), sup(n_int_);

        double target = std::max(0.05 * r_start, 1e-14);

        for (int it = 0; it < opts_.max_newton_per_step; ++it) {
            if (!state_ok(v)) return false;

            // residual at v
            std::vector<NodeEval> f(n_int_);
            for (std::size_t a = 0; a < n_int_; ++a) {
                f[a] = prob_.eval(v, a + 1, true);
                rho[a] = f[a].rho;
                step_residual(f[a], v, u, a + 1, dt, &resid[a * nvar_]);
            }
            double rn = step_norm(resid, rho);
            if (rn <= target) return true;

            // finite-difference Jacobian, three-node local recompute
            for (std::size_t a = 0; a < n_int_; ++a) {
                sub[a] = Eigen::MatrixXd::Zero(nvar_, nvar_);
                diag[a] = Eigen::MatrixXd::Zero(nvar_, nvar_);
                sup[a] = Eigen::MatrixXd::Zero(nvar_, nvar_);
            }
            std::vector<double> base(3 * nvar_), pert(3 * nvar_);
            for (std::size_t a = 0; a < n_int_; ++a) {
                std::size_t j = a + 1;
                for (std::size_t mcol = 0; mcol < nvar_; ++mcol) {
                    double delta = mcol == 0 ? 1e-2 : 1e-7;
                    double saved_t = v.t[j];
                    std::vector<double> saved_y = v.y[j];
                    // base residuals at j-1, j, j+1 from current f
                    for (int off = -1; off <= 1; ++off) {
                        std::size_t jj = j + off;
                        if (jj < 1 || jj > n_int_) continue;
                        step_residual(f[jj - 1], v, u, jj, dt, &base[(off + 1) * nvar_]);
                    }
                    perturb(v, j, mcol, delta);
                    for (int off = -1; off <= 1; ++off) {
                        std::size_t jj = j + off;
                        if (jj < 1 || jj > n_int_) continue;
                        NodeEval e = prob_.eval(v, jj, true);
                        step_residual(e, v, u, jj, dt, &pert[(off + 1) * nvar_]);
                        Eigen::MatrixXd& block = off == -1 ? sup[jj - 1]
                                                 : off == 0 ? diag[jj - 1]
                                                            : sub[jj - 1];
                        for (std::size_t row = 0; row < nvar_; ++row)
                            block(row, mcol) =
                                (pert[(off + 1) * nvar_ + row] - base[(off + 1) * nvar_ + row]) /
                                delta;
                    }
                    v.t[j] = saved_t;
                    v.y[j] = saved_y;
                }
            }

            // block-tridiagonal elimination
            Eigen::VectorXd b(nv);
            for (std::size_t i = 0; i < nv; ++i) b[i] = -resid[i];
            std::vector<Eigen::MatrixXd> dinv_sup(n_int_);
            std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu(n_int_);
            for (std::size_t a = 0; a < n_int_; ++a) {
                if (a > 0) {
                    diag[a] -= sub[a] * dinv_sup[a - 1];
                    b.segment(a * nvar_, nvar_) -=
                        sub[a] * lu[a - 1].solve(b.segment((a - 1) * nvar_, nvar_));
                }
                lu[a] = Eigen::PartialPivLU<Eigen::MatrixXd>(diag[a]);
                if (a + 1 < n_int_) dinv_sup[a] = lu[a].solve(sup[a]);
            }
            Eigen::VectorXd x(nv);
            x.segment((n_int_ - 1) * nvar_, nvar_) =
                lu[n_int_ - 1].solve(b.segment((n_int_ - 1) * nvar_, nvar_));
            for (std::size_t a = n_int_ - 1; a-- > 0;) {
                x.segment(a * nvar_, nvar_) =
                    lu[a].solve(b.segment(a * nvar_, nvar_)) -
                    dinv_sup[a] * x.segment((a + 1) * nvar_, nvar_);
            }
            if (!x.allFinite()) {
                if (first_solve_) throw SingularJacobian("singular Jacobian on the first step");
                return false;
            }
            first_solve_ = false;

            for (std::size_t a = 0; a < n_int_; ++a) {
                std::size_t j = a + 1;
                v.t[j] += x[a * nvar_];
                std::size_t m = 1;
                for (std::size_t k = 0; k < nk_; ++k) {
                    if (k == bal_) continue;
                    v.y[j][k] += x[a * nvar_ + m++];
                }
            }
            apply_balance(v);

            // converged in the state when the update is at rounding level
            double dx = 0.0;
            for (std::size_t a = 0; a < n_int_; ++a) {
                dx = std::max(dx, std::abs(x[a * nvar_]) / kTempScale);
                for (std::size_t m = 1; m < nvar_; ++m)
                    dx = std::max(dx, std::abs(x[a * nvar_ + m]));
            }
            if (dx < 1e-13) return state_ok(v);
        }
        return false;
    }

    void perturb(FlameletState& v, std::size_t j, std::size_t mcol, double delta) const {
        if (mcol == 0) {
            v.t[j] += delta;
            return;
        }
        std::size_t m = 1;
        for (std::size_t k = 0; k < nk_; ++k) {
            if (k == bal_) continue;
            if (m == mcol) {
                v.y[j][k] += delta;
                v.y[j][bal_] -= delta; // balance closure is part of the unknown map
                return;
            }
            ++m;
        }
    }

    FlameletSolution finish(const FlameletState& st, double r, bool converged, int steps) {
        FlameletSolution sol;
        sol.grid = grid_;
        sol.temperature = st.t;
        sol.mass_fractions = st.y;
        sol.converged = converged;
        sol.residual_norm = r;
        sol.steps = steps;

        // clip negative rounding dust, keeping the sum exactly 1 through the
        // balance species
        for (std::size_t j = 1; j + 1 < n_; ++j) {
            double clipped = 0.0;
            for (std::size_t k = 0; k < nk_; ++k) {
                if (k != bal_ && sol.mass_fractions[j][k] < 0.0) {
                    clipped += sol.mass_fractions[j][k];
                    sol.mass_fractions[j][k] = 0.0;
                }
            }
            sol.mass_fractions[j][bal_] += clipped;
            if (sol.mass_fractions[j][bal_] < 0.0) sol.mass_fractions[j][bal_] = 0.0;
        }
        sol.temperature.front() = bc_.t_ox;
        sol.temperature.back() = bc_.t_fuel;
        sol.mass_fractions.front() = bc_.y_ox;
        sol.mass_fractions.back() = bc_.y_fuel;

        sol.density.resize(n_);
        for (std::size_t j = 0; j < n_; ++j)
            sol.density[j] =
                mech::density(m_, sol.temperature[j], bc_.pressure, sol.mass_fractions[j]);
        return sol;
    }
};

} // namespace

double FlameletSolution::peak_temperature() const {
    double t = temperature.front();
    for (double v : temperature) t = std::max(t, v);
    return t;
}

double FlameletSolution::peak_location() const {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < temperature.size(); ++j)
        if (temperature[j] > temperature[arg]) arg = j;
    return grid.z[arg];
}

FlameletSolution solve_steady(const Mechanism& m, const ChiProfile& profile,
                              const BoundaryConditions& bc, const Grid& grid,
                              const SolveOptions& opts) {
    bc.validate(m);
    grid.validate();
    if (!(opts.residual_tol > 0.0)) throw DomainError("residual_tol must be positive");
    if (m.n_species() < 1) throw DomainError("mechanism has no species");

    PtcSolver solver(m, profile, bc, grid, opts);
    FlameletSolution sol = solver.run();
    sol.chi_st = profile.chi_st;
    return sol;
}

double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (xs.size() < 2 || xs.size() != ys.size())
        throw DomainError("interp_linear needs matching tables of at least 2 points");
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    std::size_t hi = 1;
    while (xs[hi] < x) ++hi;
    if (x == xs[hi]) return ys[hi];
    double t = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
    return (1.0 - t) * ys[hi - 1] + t * ys[hi];
}

} // namespace fgml::flamelet
