#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aggr {

/// Named contract components a ContractState may carry.
enum class Component : std::uint8_t {
    F,        // forward price
    y,        // ln F
    Y,        // log contract E_t[y_T]
    P2,       // E_t[y_T^2]
    P3,       // E_t[y_T^3]
    P4,       // E_t[y_T^4]
    Z,        // entropy contract E_t[F_T y_T]
    v_lambda, // log variance 2(y - Y)
    v_eta,    // entropy variance 2(Z/F - y)
};

inline constexpr std::size_t kComponentCount = 9;

inline constexpr std::array<Component, kComponentCount> kAllComponents = {
    Component::F,  Component::y,  Component::Y,        Component::P2,   Component::P3,
    Component::P4, Component::Z,  Component::v_lambda, Component::v_eta,
};

constexpr std::size_t index_of(Component c) noexcept { return static_cast<std::size_t>(c); }

std::string_view component_name(Component c) noexcept;
std::optional<Component> parse_component(std::string_view name) noexcept;

/// Power-log contract P^(i) for i in {1..4}; P^(1) is the log contract Y.
Component power_component(int i);

/// Small bitset over Component.
class ComponentSet {
public:
    constexpr ComponentSet() = default;
    constexpr ComponentSet(std::initializer_list<Component> cs) {
        for (auto c : cs) insert(c);
    }

    constexpr void insert(Component c) noexcept { bits_ |= bit(c); }
    constexpr void erase(Component c) noexcept { bits_ &= static_cast<std::uint16_t>(~bit(c)); }
    constexpr bool contains(Component c) const noexcept { return (bits_ & bit(c)) != 0; }
    constexpr bool contains_all(ComponentSet other) const noexcept {
        return (bits_ & other.bits_) == other.bits_;
    }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr ComponentSet operator|(ComponentSet o) const noexcept { return from_bits(bits_ | o.bits_); }
    constexpr ComponentSet operator-(ComponentSet o) const noexcept {
        return from_bits(bits_ & static_cast<std::uint16_t>(~o.bits_));
    }
    constexpr bool operator==(const ComponentSet&) const = default;

    /// Members in canonical enum order.
    std::vector<Component> members() const;
    std::string to_string() const;

private:
    static constexpr std::uint16_t bit(Component c) noexcept {
        return static_cast<std::uint16_t>(1u << index_of(c));
    }
    static constexpr ComponentSet from_bits(unsigned b) noexcept {
        ComponentSet s;
        s.bits_ = static_cast<std::uint16_t>(b);
        return s;
    }
    std::uint16_t bits_ = 0;
};

} // namespace aggr
