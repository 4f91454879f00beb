#include "aggr/core/component.hpp"

#include "aggr/core/error.hpp"

namespace aggr {

namespace {
constexpr std::array<std::string_view, kComponentCount> kNames = {
    "F", "y", "Y", "P2", "P3", "P4", "Z", "vlambda", "veta",
};
}

std::string_view component_name(Component c) noexcept { return kNames[index_of(c)]; }

std::optional<Component> parse_component(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kComponentCount; ++i)
        if (kNames[i] == name) return kAllComponents[i];
    return std::nullopt;
}

Component power_component(int i) {
    switch (i) {
    case 1: return Component::Y;
    case 2: return Component::P2;
    case 3: return Component::P3;
    case 4: return Component::P4;
    default: throw ValidationError("power-log contract order must be in 1..4, got " + std::to_string(i));
    }
}

std::vector<Component> ComponentSet::members() const {
    std::vector<Component> out;
    for (auto c : kAllComponents)
        if (contains(c)) out.push_back(c);
    return out;
}

std::string ComponentSet::to_string() const {
    std::string out = "{";
    for (auto c : members()) {
        if (out.size() > 1) out += ",";
        out += component_name(c);
    }
    return out + "}";
}

} // namespace aggr
