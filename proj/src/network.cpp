#include "eomsim/network.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "eomsim/errors.hpp"

namespace eomsim {

namespace {

// Union-find over node name indices, used to collapse R = 0 ideal wires.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

NodalNetwork::NodalNetwork(Netlist net) : net_(std::move(net)) {
    validate_netlist(net_);

    std::map<std::string, int> raw_index;
    auto raw_id = [&](const std::string& name) {
        auto it = raw_index.find(name);
        if (it != raw_index.end()) return it->second;
        int id = static_cast<int>(raw_index.size());
        raw_index.emplace(name, id);
        return id;
    };
    for (const Element& el : net_.elements) {
        raw_id(el.node_a);
        raw_id(el.node_b);
    }
    raw_id(net_.couple_terminals.first);
    raw_id(net_.couple_terminals.second);
    bool have_ground = raw_index.count(net_.ground) > 0;

    UnionFind uf(raw_index.size());
    for (const Element& el : net_.elements) {
        if (el.kind == ElementKind::Resistor && el.value == 0.0) {
            uf.unite(raw_id(el.node_a), raw_id(el.node_b));
        }
    }

    int couple_a_raw = uf.find(raw_id(net_.couple_terminals.first));
    int couple_b_raw = uf.find(raw_id(net_.couple_terminals.second));
    if (couple_a_raw == couple_b_raw) {
        throw SingularNetworkError(
            "coupling terminals are short-circuited by ideal wires");
    }
    int reference_raw =
        have_ground ? uf.find(raw_id(net_.ground)) : couple_b_raw;

    // Assign compact indices to the merged nodes; the reference gets -1.
    std::map<int, int> compact;
    auto compact_id = [&](int raw) -> int {
        raw = uf.find(raw);
        if (raw == reference_raw) return -1;
        auto it = compact.find(raw);
        if (it != compact.end()) return it->second;
        int id = static_cast<int>(node_names_.size());
        compact.emplace(raw, id);
        for (const auto& [name, rid] : raw_index) {
            if (uf.find(rid) == raw) {
                node_names_.push_back(name);
                break;
            }
        }
        return id;
    };

    for (const Element& el : net_.elements) {
        if (el.kind == ElementKind::Resistor && el.value == 0.0) continue;  // wire
        CompiledElement ce;
        ce.kind = el.kind;
        ce.a = compact_id(raw_id(el.node_a));
        ce.b = compact_id(raw_id(el.node_b));
        ce.value = el.value;
        if (ce.a == ce.b) {
            throw SingularNetworkError("element '" + el.name +
                                       "' is short-circuited by ideal wires");
        }
        bool is_port = el.kind == ElementKind::TransmissionLine ||
                       el.kind == ElementKind::Resistor;
        if (is_port) {
            ce.port = static_cast<int>(ports_.size());
            ports_.push_back({el.name, el.value, el.temperature,
                              el.kind == ElementKind::TransmissionLine
                                  ? PortOrigin::TransmissionLine
                                  : PortOrigin::ResistorMapped});
            port_element_.push_back(elements_.size());
        }
        elements_.push_back(ce);
    }

    couple_a_ = compact_id(couple_a_raw);
    couple_b_ = compact_id(couple_b_raw);
}

Eigen::MatrixXcd NodalNetwork::admittance(double omega) const {
    const int n = node_count();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    auto stamp = [&](int a, int b, cplx adm) {
        if (a >= 0) y(a, a) += adm;
        if (b >= 0) y(b, b) += adm;
        if (a >= 0 && b >= 0) {
            y(a, b) -= adm;
            y(b, a) -= adm;
        }
    };
    for (const CompiledElement& el : elements_) {
        cplx adm;
        switch (el.kind) {
            case ElementKind::Resistor:
            case ElementKind::TransmissionLine:
                adm = 1.0 / el.value;
                break;
            case ElementKind::Inductor:
                adm = 1.0 / (-im_unit * omega * el.value);
                break;
            case ElementKind::Capacitor:
                adm = -im_unit * omega * el.value;
                break;
        }
        stamp(el.a, el.b, adm);
    }
    return y;
}

Eigen::VectorXcd NodalNetwork::solve(double omega, std::span<const cplx> source_2vin,
                                     cplx injected_current) const {
    const int n = node_count();
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    for (size_t p = 0; p < ports_.size(); ++p) {
        if (p < source_2vin.size() && source_2vin[p] != cplx(0.0)) {
            const CompiledElement& el = elements_[port_element_[p]];
            cplx norton = source_2vin[p] / ports_[p].impedance;
            if (el.a >= 0) rhs(el.a) += norton;
            if (el.b >= 0) rhs(el.b) -= norton;
        }
    }
    if (injected_current != cplx(0.0)) {
        if (couple_a_ >= 0) rhs(couple_a_) += injected_current;
        if (couple_b_ >= 0) rhs(couple_b_) -= injected_current;
    }
    if (n == 0) return Eigen::VectorXcd();

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(admittance(omega));
    if (lu.rcond() < 1e-14) {
        throw SingularNetworkError("nodal matrix is numerically singular at omega=" +
                                   std::to_string(omega));
    }
    return lu.solve(rhs);
}

cplx NodalNetwork::couple_voltage(const Eigen::VectorXcd& v) const {
    cplx va = couple_a_ >= 0 ? v(couple_a_) : cplx(0.0);
    cplx vb = couple_b_ >= 0 ? v(couple_b_) : cplx(0.0);
    return va - vb;
}

cplx NodalNetwork::port_current(const Eigen::VectorXcd& v, size_t port,
                                cplx source_2vin) const {
    const CompiledElement& el = elements_[port_element_[port]];
    cplx va = el.a >= 0 ? v(el.a) : cplx(0.0);
    cplx vb = el.b >= 0 ? v(el.b) : cplx(0.0);
    // Current delivered into the circuit at the element's first node.
    return (source_2vin - (va - vb)) / ports_[port].impedance;
}

NetworkResponse NodalNetwork::response(double omega) const {
    NetworkResponse r;
    r.omega = omega;
    const size_t np = ports_.size();
    r.source_transfer.resize(np);
    r.injection_response.resize(np);
    r.oc_port_currents.resize(np, np);

    const int n = node_count();
    if (n == 0) {
        // Degenerate but legal: the whole circuit collapsed onto the
        // reference; the coupling terminals would coincide, which the
        // constructor already rejects.
        throw SingularNetworkError("network has no independent nodes");
    }

    Eigen::MatrixXcd y = admittance(omega);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(y);
    if (lu.rcond() < 1e-14) {
        throw SingularNetworkError("nodal matrix is numerically singular at omega=" +
                                   std::to_string(omega));
    }

    // One RHS per port source plus one for the injected probe current.
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n, np + 1);
    for (size_t p = 0; p < np; ++p) {
        const CompiledElement& el = elements_[port_element_[p]];
        cplx norton = 1.0 / ports_[p].impedance;
        if (el.a >= 0) rhs(el.a, p) += norton;
        if (el.b >= 0) rhs(el.b, p) -= norton;
    }
    if (couple_a_ >= 0) rhs(couple_a_, np) += 1.0;
    if (couple_b_ >= 0) rhs(couple_b_, np) -= 1.0;

    Eigen::MatrixXcd sol = lu.solve(rhs);

    for (size_t j = 0; j < np; ++j) {
        Eigen::VectorXcd v = sol.col(j);
        r.source_transfer[j] = couple_voltage(v);
        for (size_t i = 0; i < np; ++i) {
            r.oc_port_currents(i, j) = port_current(v, i, i == j ? cplx(1.0) : cplx(0.0));
        }
    }
    Eigen::VectorXcd v_inj = sol.col(np);
    r.z_thev = couple_voltage(v_inj);
    for (size_t i = 0; i < np; ++i) {
        r.injection_response[i] = port_current(v_inj, i, cplx(0.0));
    }
    return r;
}

}  // namespace eomsim
