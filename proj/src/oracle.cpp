#include "eomsim/oracle.hpp"

#include <cmath>

#include "eomsim/errors.hpp"

namespace eomsim {

namespace {

constexpr double kTwoPi = consts::two_pi;

struct Demod {
    cplx num_out{0.0};
    cplx num_in{0.0};
    double t0, t1;
    double omega;

    Demod(double t0, double t1, double omega) : t0(t0), t1(t1), omega(omega) {}

    void accumulate(double t, double v_out, double v_in, double dt) {
        if (t < t0 || t > t1) return;
        double u = (t - t0) / (t1 - t0);
        double w = 0.5 * (1.0 - std::cos(kTwoPi * u));  // Hann
        cplx rot = std::exp(im_unit * omega * t) * (w * dt);
        num_out += v_out * rot;
        num_in += v_in * rot;
    }

    cplx transfer() const { return num_out / num_in; }
};

}  // namespace

TimeDomainOracle::TimeDomainOracle(const Netlist& netlist, MechanicalMode mech,
                                   EMCouplingSpec em,
                                   std::optional<OMCouplingSpec> om)
    : network_(netlist), mech_(mech), em_(em), om_(std::move(om)) {
    if (om_ && om_->coupling_gom == 0.0) om_.reset();
    assemble();
}

void TimeDomainOracle::assemble() {
    const auto& elements = network_.compiled_elements();
    const int n_nodes = network_.node_count();

    inductor_index_.assign(elements.size(), -1);
    int n_ind = 0;
    for (size_t e = 0; e < elements.size(); ++e) {
        if (elements[e].kind == ElementKind::Inductor) inductor_index_[e] = n_ind++;
    }

    idx_qc_ = n_nodes + n_ind;
    idx_x_ = idx_qc_ + 1;
    idx_p_ = idx_x_ + 1;
    dim_ = idx_p_ + 1;
    if (om_) {
        idx_oX_ = dim_++;
        idx_oP_ = dim_++;
    }

    mass_ = Eigen::MatrixXd::Zero(dim_, dim_);
    a_const_ = Eigen::MatrixXd::Zero(dim_, dim_);

    // KCL rows (one per node): sum of branch currents out of the node is
    // zero. Derivative terms (capacitors, the transducer charge) sit in the
    // mass matrix; everything else is moved to the right-hand side A y + f.
    for (size_t e = 0; e < elements.size(); ++e) {
        const auto& el = elements[e];
        switch (el.kind) {
            case ElementKind::Resistor:
            case ElementKind::TransmissionLine: {
                double g = 1.0 / el.value;  // J(a->b) = (v_a - v_b - e_src)/Z
                if (el.a >= 0) {
                    a_const_(el.a, el.a) -= g;
                    if (el.b >= 0) a_const_(el.a, el.b) += g;
                }
                if (el.b >= 0) {
                    a_const_(el.b, el.b) -= g;
                    if (el.a >= 0) a_const_(el.b, el.a) += g;
                }
                break;
            }
            case ElementKind::Capacitor: {
                double c = el.value;  // J(a->b) = C d(v_a - v_b)/dt
                if (el.a >= 0) {
                    mass_(el.a, el.a) += c;
                    if (el.b >= 0) mass_(el.a, el.b) -= c;
                }
                if (el.b >= 0) {
                    mass_(el.b, el.b) += c;
                    if (el.a >= 0) mass_(el.b, el.a) -= c;
                }
                break;
            }
            case ElementKind::Inductor: {
                int col = n_nodes + inductor_index_[e];
                if (el.a >= 0) a_const_(el.a, col) -= 1.0;
                if (el.b >= 0) a_const_(el.b, col) += 1.0;
                mass_(col, col) = el.value;  // L dI/dt = v_a - v_b
                if (el.a >= 0) a_const_(col, el.a) = 1.0;
                if (el.b >= 0) a_const_(col, el.b) = -1.0;
                break;
            }
        }
    }

    // Transducer branch: current dqc/dt flows out of couple_a into couple_b.
    int ca = network_.couple_node_a();
    int cb = network_.couple_node_b();
    if (ca >= 0) mass_(ca, idx_qc_) += 1.0;
    if (cb >= 0) mass_(cb, idx_qc_) -= 1.0;

    // Constraint row: v_a - v_b = qc/Cc + g(t) x.
    {
        int row = idx_qc_;
        if (ca >= 0) a_const_(row, ca) = 1.0;
        if (cb >= 0) a_const_(row, cb) = -1.0;
        a_const_(row, idx_qc_) = -1.0 / em_.c_couple;
        double g = coupling_strength(em_);
        if (em_.bias == BiasKind::DC) {
            a_const_(row, idx_x_) = -g;
        } else {
            a_cos_wd_.push_back({row, idx_x_, -2.0 * g});
        }
    }

    // Mechanics: x' = p/m.
    mass_(idx_x_, idx_x_) = 1.0;
    a_const_(idx_x_, idx_p_) = 1.0 / mech_.mass;

    // p' = -m w^2(t) x - gamma p - g(t) qc [- sqrt(hbar) G_OM 2cos(w_l t) X].
    {
        mass_(idx_p_, idx_p_) = 1.0;
        double q_sq_avg = em_.q_bias * em_.q_bias;
        if (em_.bias == BiasKind::AC) q_sq_avg *= 2.0;
        double d2_term = q_sq_avg /
                         (2.0 * mech_.mass * em_.c_couple * em_.c_couple) *
                         em_.d2C_dx2;
        double g = coupling_strength(em_);
        double k = em_.bias == BiasKind::AC ? 2.0 : 1.0;
        double dc2_term = k * em_.c_couple * g * g / mech_.mass;
        double bias_part = dc2_term - d2_term;  // averages to w_mQ^2 - w_mV^2 + w_mV^2 - w_m0^2
        double om_static = om_ ? om_->static_shift : 0.0;
        stiffness_avg_ = mech_.omega_m0 * mech_.omega_m0 + om_static + bias_part;

        a_const_(idx_p_, idx_p_) = -mech_.gamma_m0;
        a_const_(idx_p_, idx_x_) = -mech_.mass * stiffness_avg_;
        if (em_.bias == BiasKind::DC) {
            a_const_(idx_p_, idx_qc_) = -g;
        } else {
            // The bias-induced stiffness rides on Qc^2(t) = <Qc^2>(1 + cos 2 w_d t).
            a_cos_2wd_.push_back({idx_p_, idx_x_, -mech_.mass * bias_part});
            a_cos_wd_.push_back({idx_p_, idx_qc_, -2.0 * g});
        }
        if (om_) {
            a_cos_wl_.push_back(
                {idx_p_, idx_oX_, -std::sqrt(consts::hbar) * om_->coupling_gom * 2.0});
        }
    }

    if (om_) {
        double kappa = om_->kappa_int + om_->kappa_ext;
        mass_(idx_oX_, idx_oX_) = 1.0;
        a_const_(idx_oX_, idx_oP_) = om_->omega_cav;
        mass_(idx_oP_, idx_oP_) = 1.0;
        a_const_(idx_oP_, idx_oX_) = -om_->omega_cav;
        a_const_(idx_oP_, idx_oP_) = -kappa;
        a_cos_wl_.push_back(
            {idx_oP_, idx_x_, -om_->coupling_gom / std::sqrt(consts::hbar) * 2.0});
    }
}

Eigen::MatrixXd TimeDomainOracle::system_matrix(double t) const {
    Eigen::MatrixXd a = a_const_;
    if (!a_cos_wd_.empty() || !a_cos_2wd_.empty()) {
        double c1 = std::cos(em_.omega_drive * t);
        for (const Entry& e : a_cos_wd_) a(e.row, e.col) += e.value * c1;
        double c2 = 2.0 * c1 * c1 - 1.0;  // cos(2 w_d t)
        for (const Entry& e : a_cos_2wd_) a(e.row, e.col) += e.value * c2;
    }
    if (!a_cos_wl_.empty()) {
        double cl = std::cos(om_->omega_laser * t);
        for (const Entry& e : a_cos_wl_) a(e.row, e.col) += e.value * cl;
    }
    return a;
}

double TimeDomainOracle::drive_carrier() const {
    if (em_.bias == BiasKind::AC && !om_) return em_.omega_drive;
    if (em_.bias == BiasKind::DC && om_) return om_->omega_laser;
    if (em_.bias == BiasKind::DC && !om_) return 0.0;
    return -1.0;  // two incommensurate carriers: no step caching
}

cplx TimeDomainOracle::probe_transfer(const std::string& drive_port,
                                      const std::string& response_port,
                                      double omega_probe,
                                      const ProbeSettings& settings) const {
    const auto& ports = network_.ports();
    int drive = -1, response = -1;
    for (size_t p = 0; p < ports.size(); ++p) {
        if (ports[p].id == drive_port) drive = static_cast<int>(p);
        if (ports[p].id == response_port) response = static_cast<int>(p);
    }
    if (drive < 0) throw Error("unknown drive port '" + drive_port + "'");
    bool read_x = response_port == "x";
    if (response < 0 && !read_x) {
        throw Error("unknown response port '" + response_port + "'");
    }

    const auto& elements = network_.compiled_elements();
    int drive_elem = -1, response_elem = -1;
    for (size_t e = 0; e < elements.size(); ++e) {
        if (elements[e].port == drive) drive_elem = static_cast<int>(e);
        if (!read_x && elements[e].port == response) response_elem = static_cast<int>(e);
    }

    // Keep the step commensurate with the carrier so one period of midpoint
    // operators can be factorized once; an even divisor makes the 2*dt
    // Richardson companion land on the same grid.
    double carrier = drive_carrier();
    double dt_fine = settings.dt;
    int per_fine = 0;
    if (carrier > 0.0) {
        double period = kTwoPi / carrier;
        per_fine = std::max(2, static_cast<int>(std::round(period / settings.dt)));
        if (per_fine % 2 != 0) ++per_fine;
        dt_fine = period / per_fine;
    }

    auto run = [&](double dt, int cache_len) -> cplx {
        double t_total = settings.duration;
        double t_start = settings.discard_fraction * t_total;
        long steps = static_cast<long>(std::ceil(t_total / dt));

        std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lhs_cache;
        std::vector<Eigen::MatrixXd> rhs_cache;
        auto make_ops = [&](double t_mid) {
            Eigen::MatrixXd a = system_matrix(t_mid);
            Eigen::MatrixXd lhs = mass_ / dt - 0.5 * a;
            Eigen::MatrixXd rhs = mass_ / dt + 0.5 * a;
            return std::pair{Eigen::PartialPivLU<Eigen::MatrixXd>(std::move(lhs)),
                             std::move(rhs)};
        };
        if (carrier == 0.0) cache_len = 1;  // time-invariant system
        if (cache_len > 0) {
            lhs_cache.reserve(cache_len);
            rhs_cache.reserve(cache_len);
            for (int k = 0; k < cache_len; ++k) {
                auto [lu, rhs] = make_ops((k + 0.5) * dt);
                lhs_cache.push_back(std::move(lu));
                rhs_cache.push_back(std::move(rhs));
            }
        }

        Eigen::VectorXd y = Eigen::VectorXd::Zero(dim_);
        Eigen::VectorXd f_vec = Eigen::VectorXd::Zero(dim_);
        const auto& del = elements[drive_elem];
        double znorton = 1.0 / ports[drive].impedance;

        Demod window(t_start, t_total, omega_probe);
        Demod first_half(t_start, 0.5 * (t_start + t_total), omega_probe);
        Demod second_half(0.5 * (t_start + t_total), t_total, omega_probe);

        auto record = [&](double t, const Eigen::VectorXd& state) {
            double v_in = std::cos(omega_probe * t);
            double v_out;
            if (read_x) {
                v_out = state(idx_x_);
            } else {
                const auto& rel = elements[response_elem];
                double va = rel.a >= 0 ? state(rel.a) : 0.0;
                double vb = rel.b >= 0 ? state(rel.b) : 0.0;
                v_out = (va - vb) - (response == drive ? v_in : 0.0);
            }
            window.accumulate(t, v_out, v_in, dt);
            first_half.accumulate(t, v_out, v_in, dt);
            second_half.accumulate(t, v_out, v_in, dt);
        };

        for (long s = 0; s < steps; ++s) {
            double t_mid = (static_cast<double>(s) + 0.5) * dt;
            double e_mid = 2.0 * std::cos(omega_probe * t_mid) * znorton;
            f_vec.setZero();
            if (del.a >= 0) f_vec(del.a) += e_mid;
            if (del.b >= 0) f_vec(del.b) -= e_mid;

            if (cache_len > 0) {
                int k = static_cast<int>(s % cache_len);
                y = lhs_cache[k].solve(rhs_cache[k] * y + f_vec);
            } else {
                auto [lu, rhs] = make_ops(t_mid);
                y = lu.solve(rhs * y + f_vec);
            }
            record((static_cast<double>(s) + 1.0) * dt, y);
            if (y.lpNorm<Eigen::Infinity>() > settings.instability_bound) {
                throw UnstableSystemError(
                    "time-domain state grew beyond bound (parametric "
                    "instability); the probe has no steady state");
            }
        }

        if (settings.check_convergence) {
            cplx t1 = first_half.transfer();
            cplx t2 = second_half.transfer();
            double denom = std::max(std::abs(window.transfer()), 1e-300);
            if (std::abs(t1 - t2) / denom > settings.convergence_tol) {
                throw NotConvergedError(
                    "transient has not decayed within the probe duration "
                    "(half-window transfers disagree)");
            }
        }
        return window.transfer();
    };

    cplx fine = run(dt_fine, per_fine);
    if (!settings.richardson) return fine;
    cplx coarse = run(2.0 * dt_fine, per_fine > 0 ? per_fine / 2 : 0);
    return (4.0 * fine - coarse) / 3.0;
}

double TimeDomainOracle::free_energy_drift(double x0, double p0, double qc0,
                                           int steps, double dt) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dim_);
    y(idx_x_) = x0;
    y(idx_p_) = p0;
    y(idx_qc_) = qc0;

    const auto& elements = network_.compiled_elements();
    auto energy = [&](const Eigen::VectorXd& state) {
        double e = state(idx_p_) * state(idx_p_) / (2.0 * mech_.mass) +
                   0.5 * mech_.mass * stiffness_avg_ * state(idx_x_) * state(idx_x_) +
                   state(idx_qc_) * state(idx_qc_) / (2.0 * em_.c_couple) +
                   coupling_strength(em_) * state(idx_qc_) * state(idx_x_);
        for (size_t el = 0; el < elements.size(); ++el) {
            const auto& ce = elements[el];
            if (ce.kind == ElementKind::Inductor) {
                double i = state(network_.node_count() + inductor_index_[el]);
                e += 0.5 * ce.value * i * i;
            } else if (ce.kind == ElementKind::Capacitor) {
                double va = ce.a >= 0 ? state(ce.a) : 0.0;
                double vb = ce.b >= 0 ? state(ce.b) : 0.0;
                e += 0.5 * ce.value * (va - vb) * (va - vb);
            }
        }
        return e;
    };

    Eigen::MatrixXd a = system_matrix(0.0);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(mass_ / dt - 0.5 * a);
    Eigen::MatrixXd rhs_op = mass_ / dt + 0.5 * a;

    double e0 = energy(y);
    double max_drift = 0.0;
    for (int s = 0; s < steps; ++s) {
        y = lu.solve(rhs_op * y);
        max_drift = std::max(max_drift, std::abs(energy(y) - e0));
    }
    return e0 != 0.0 ? max_drift / std::abs(e0) : max_drift;
}

}  // namespace eomsim
