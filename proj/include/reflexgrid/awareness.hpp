#pragma once

// Information layer: which elements hold images of the physical process and
// of each other, expressed as a structure-of-awareness polynomial, and the
// check that every decision rule only uses images the structure provides.

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "reflexgrid/algebra.hpp"
#include "reflexgrid/regulatory.hpp"

namespace reflexgrid::awareness {

struct AwarenessDecl {
    algebra::Atom root{'T'};
    std::vector<algebra::Atom> agent_atoms;
    std::optional<algebra::Atom> controller_atom;
    bool controller_senses_root = false;
    std::vector<bool> agent_senses_root;
    /// Per agent: indices of the agents whose policies it holds images of.
    std::vector<std::set<std::size_t>> peer_images;
    /// Per agent: receives instructions built on the controller's image.
    std::vector<bool> controller_channel;

    /// Agents a0..a{n-1} with every channel off; root T, controller c.
    static AwarenessDecl for_agents(std::size_t n, bool with_controller = false);

    std::size_t agent_count() const noexcept { return agent_atoms.size(); }

    /// Throws std::invalid_argument on inconsistent sizes, out-of-range peer
    /// indices, or a controller channel without a controller.
    void validate() const;
};

algebra::Polynomial derive_structure(const AwarenessDecl& decl);

/// The words a rule needs to be present in the structure of awareness for
/// the agent named `agent`. Throws std::invalid_argument for Commanded
/// without a controller atom.
std::set<algebra::Word> rule_requirements(regulatory::RuleKind kind, const algebra::Atom& root,
                                          const algebra::Atom& agent,
                                          std::span<const algebra::Atom> all_agents,
                                          const std::optional<algebra::Atom>& controller);

struct Violation {
    std::size_t agent_id;
    algebra::Word missing;
    regulatory::RuleKind kind;

    /// `agent <id>: rule <kind> requires <word> not present in structure of awareness`
    std::string to_string() const;
};

/// One record per required word that the derived structure lacks, in agent
/// order then canonical word order. Empty means the wiring supports every rule.
std::vector<Violation> validate_awareness(const AwarenessDecl& decl,
                                          std::span<const regulatory::RuleKind> rules);

} // namespace reflexgrid::awareness
