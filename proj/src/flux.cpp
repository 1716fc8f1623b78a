#include "huflow/flux.hpp"

#include <stdexcept>

namespace huflow {

namespace {

struct LabelEntry {
    const char* label;
    Formulation formulation;
    FlowUpwinding flow;
    TransportUpwinding transport;
};

constexpr LabelEntry kLabels[] = {
    {"ppu", Formulation::standard, FlowUpwinding::ppu, TransportUpwinding::ppu},
    {"ppu-ppu", Formulation::total_velocity, FlowUpwinding::ppu, TransportUpwinding::ppu},
    {"ppu-hu", Formulation::total_velocity, FlowUpwinding::ppu, TransportUpwinding::hu},
    {"wa-ppu-tv", Formulation::total_velocity, FlowUpwinding::wa, TransportUpwinding::ppu},
    {"wahu-tv", Formulation::total_velocity, FlowUpwinding::wa, TransportUpwinding::hu},
    {"ppu-ppu-tm", Formulation::total_mass, FlowUpwinding::ppu, TransportUpwinding::ppu},
    {"ppu-hu-tm", Formulation::total_mass, FlowUpwinding::ppu, TransportUpwinding::hu},
    {"wa-ppu-tm", Formulation::total_mass, FlowUpwinding::wa, TransportUpwinding::ppu},
    {"wahu-tm", Formulation::total_mass, FlowUpwinding::wa, TransportUpwinding::hu},
};

}  // namespace

void SchemeConfig::validate() const
{
    if (formulation == Formulation::standard && (flow != FlowUpwinding::ppu || transport != TransportUpwinding::ppu))
        throw std::invalid_argument("scheme: the standard formulation uses PPU for every property");
    if (!(alpha >= 0.0)) throw std::invalid_argument("scheme: alpha must be non-negative");
    if (!(eps_saturation > 0.0) || !(eps_mobility > 0.0))
        throw std::invalid_argument("scheme: epsilons must be positive");
    if (!(beta_floor > 0.0)) throw std::invalid_argument("scheme: beta floor must be positive");
}

std::string SchemeConfig::label() const
{
    for (const auto& e : kLabels)
        if (e.formulation == formulation && e.flow == flow && e.transport == transport) return e.label;
    return "invalid";
}

SchemeConfig SchemeConfig::ppu() { return from_label("ppu"); }
SchemeConfig SchemeConfig::ppu_hu() { return from_label("ppu-hu"); }
SchemeConfig SchemeConfig::wahu_tv() { return from_label("wahu-tv"); }
SchemeConfig SchemeConfig::wahu_tm() { return from_label("wahu-tm"); }

SchemeConfig SchemeConfig::from_label(std::string_view label)
{
    for (const auto& e : kLabels) {
        if (label == e.label) {
            SchemeConfig s;
            s.formulation = e.formulation;
            s.flow = e.flow;
            s.transport = e.transport;
            return s;
        }
    }
    std::string msg = "unknown scheme '" + std::string(label) + "'; valid schemes:";
    for (const auto& name : labels()) msg += " " + name;
    throw std::invalid_argument(msg);
}

const std::vector<std::string>& SchemeConfig::labels()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& e : kLabels) v.emplace_back(e.label);
        return v;
    }();
    return names;
}

FaceParameters make_face_parameters(const FluidSystem& fluids, const SchemeConfig& scheme, double transmissibility,
                                    double delta_z)
{
    FaceParameters face;
    face.transmissibility = transmissibility;
    face.delta_z = delta_z;
    face.gravity = fluids.gravity();
    const auto refs = reference_potentials(fluids, delta_z);
    face.g_ref = refs.g_ref;
    face.c_ref = refs.c_ref;
    face.gamma = fluids.gammas(scheme.alpha);
    return face;
}

template FaceFlux<double> compute_face_flux(int, const SideState<double>&, const SideState<double>&,
                                            const FaceParameters&, const SchemeConfig&);

}  // namespace huflow
