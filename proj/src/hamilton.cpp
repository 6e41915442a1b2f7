#include "rbflow/hamilton.hpp"

namespace rbflow {

std::string_view to_string(HamiltonType type) {
    switch (type) {
        case HamiltonType::TypeI: return "TypeI";
        case HamiltonType::TypeIIa: return "TypeIIa";
        case HamiltonType::TypeIIb: return "TypeIIb";
        case HamiltonType::TypeIII: return "TypeIII";
        case HamiltonType::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

std::optional<HamiltonType> hamilton_type_from_string(std::string_view text) {
    for (auto t : {HamiltonType::TypeI, HamiltonType::TypeIIa, HamiltonType::TypeIIb, HamiltonType::TypeIII,
                   HamiltonType::Undetermined}) {
        if (to_string(t) == text) return t;
    }
    return std::nullopt;
}

}  // namespace rbflow
