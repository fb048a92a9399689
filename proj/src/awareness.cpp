#include "reflexgrid/awareness.hpp"

#include <stdexcept>

namespace reflexgrid::awareness {

using algebra::Atom;
using algebra::Polynomial;
using algebra::Word;
using regulatory::RuleKind;

AwarenessDecl AwarenessDecl::for_agents(std::size_t n, bool with_controller) {
    AwarenessDecl decl;
    decl.agent_atoms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        decl.agent_atoms.emplace_back('a', static_cast<std::uint32_t>(i));
    }
    if (with_controller) {
        decl.controller_atom = Atom('c');
    }
    decl.agent_senses_root.assign(n, false);
    decl.peer_images.assign(n, {});
    decl.controller_channel.assign(n, false);
    return decl;
}

void AwarenessDecl::validate() const {
    const std::size_t n = agent_atoms.size();
    if (agent_senses_root.size() != n || peer_images.size() != n || controller_channel.size() != n) {
        throw std::invalid_argument("awareness declaration: per-agent lists differ in length");
    }
    for (const auto& peers : peer_images) {
        if (!peers.empty() && *peers.rbegin() >= n) {
            throw std::invalid_argument("awareness declaration: peer image index out of range");
        }
    }
    if (!controller_atom) {
        if (controller_senses_root) {
            throw std::invalid_argument("awareness declaration: controller senses root but none is declared");
        }
        for (bool ch : controller_channel) {
            if (ch) {
                throw std::invalid_argument("awareness declaration: controller channel without a controller");
            }
        }
    }
}

Polynomial derive_structure(const AwarenessDecl& decl) {
    decl.validate();
    const Atom& root = decl.root;
    Polynomial omega{Word{root}};
    if (decl.controller_atom && decl.controller_senses_root) {
        omega.insert(Word{root, *decl.controller_atom});
    }
    for (std::size_t i = 0; i < decl.agent_count(); ++i) {
        const Atom& agent = decl.agent_atoms[i];
        if (decl.agent_senses_root[i]) {
            omega.insert(Word{root, agent});
        }
        for (std::size_t j : decl.peer_images[i]) {
            omega.insert(Word{root, decl.agent_atoms[j], agent});
        }
        if (decl.controller_channel[i]) {
            omega.insert(Word{root, *decl.controller_atom, agent});
        }
    }
    return omega;
}

std::set<Word> rule_requirements(RuleKind kind, const Atom& root, const Atom& agent,
                                 std::span<const Atom> all_agents, const std::optional<Atom>& controller) {
    std::set<Word> words;
    switch (kind) {
    case RuleKind::PassiveCycle:
        break;
    case RuleKind::ReactiveThreshold:
        words.insert(Word{root, agent});
        break;
    case RuleKind::ProbabilisticReactive:
        words.insert(Word{root, agent});
        for (const Atom& other : all_agents) {
            words.insert(Word{root, other, agent});
        }
        break;
    case RuleKind::Commanded:
        if (!controller) {
            throw std::invalid_argument("Commanded rule requires a controller atom");
        }
        words.insert(Word{root, *controller, agent});
        break;
    }
    return words;
}

std::string Violation::to_string() const {
    return "agent " + std::to_string(agent_id) + ": rule " + std::string(regulatory::to_string(kind)) +
           " requires " + missing.to_string() + " not present in structure of awareness";
}

std::vector<Violation> validate_awareness(const AwarenessDecl& decl, std::span<const RuleKind> rules) {
    if (rules.size() != decl.agent_count()) {
        throw std::invalid_argument("validate_awareness: one rule per agent expected");
    }
    const Polynomial omega = derive_structure(decl);
    std::vector<Violation> out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (rules[i] == RuleKind::Commanded && !decl.controller_atom) {
            // Nothing to receive instructions from: the whole channel is missing.
            out.push_back({i, Word{decl.root, Atom('c'), decl.agent_atoms[i]}, rules[i]});
            continue;
        }
        for (const Word& w :
             rule_requirements(rules[i], decl.root, decl.agent_atoms[i], decl.agent_atoms, decl.controller_atom)) {
            if (!algebra::contains_word(omega, w)) {
                out.push_back({i, w, rules[i]});
            }
        }
    }
    return out;
}

} // namespace reflexgrid::awareness
