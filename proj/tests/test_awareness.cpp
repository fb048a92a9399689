#include <doctest.h>

#include "reflexgrid/awareness.hpp"

using namespace reflexgrid::awareness;
using reflexgrid::algebra::Atom;
using reflexgrid::algebra::equals;
using reflexgrid::algebra::parse_expression;
using reflexgrid::algebra::Word;
using reflexgrid::regulatory::RuleKind;

namespace {

AwarenessDecl reactive_wiring(std::size_t n) {
    auto d = AwarenessDecl::for_agents(n);
    d.agent_senses_root.assign(n, true);
    return d;
}

AwarenessDecl peer_wiring(std::size_t n) {
    auto d = reactive_wiring(n);
    for (auto& peers : d.peer_images) {
        for (std::size_t j = 0; j < n; ++j) peers.insert(j);
    }
    return d;
}

AwarenessDecl controller_wiring(std::size_t n) {
    auto d = AwarenessDecl::for_agents(n, true);
    d.controller_senses_root = true;
    d.agent_senses_root.assign(n, true);
    d.controller_channel.assign(n, true);
    return d;
}

} // namespace

TEST_CASE("derived structures match the written formulas") {
    CHECK(equals(derive_structure(reactive_wiring(3)), parse_expression("T(1 + a0 + a1 + a2)")));
    CHECK(equals(derive_structure(controller_wiring(2)),
                 parse_expression("T(1 + c + a0 + a1) + Tc(a0 + a1)")));
    CHECK(equals(derive_structure(peer_wiring(2)),
                 parse_expression("T(1 + a0 + a1 + (a0 + a1)a0 + (a0 + a1)a1)")));
    CHECK(equals(derive_structure(AwarenessDecl::for_agents(4)), parse_expression("T")));
}

TEST_CASE("requirements per rule") {
    const std::vector<Atom> all{Atom('a', 0), Atom('a', 1)};
    const Atom T('T');
    CHECK(rule_requirements(RuleKind::PassiveCycle, T, all[0], all, std::nullopt).empty());
    CHECK(rule_requirements(RuleKind::ReactiveThreshold, T, all[1], all, std::nullopt) ==
          std::set<Word>{Word::parse("Ta1")});
    CHECK(rule_requirements(RuleKind::ProbabilisticReactive, T, all[1], all, std::nullopt) ==
          std::set<Word>{Word::parse("Ta1"), Word::parse("Ta0a1"), Word::parse("Ta1a1")});
    CHECK(rule_requirements(RuleKind::Commanded, T, all[0], all, Atom('c')) == std::set<Word>{Word::parse("Tca0")});
    CHECK_THROWS(rule_requirements(RuleKind::Commanded, T, all[0], all, std::nullopt));
}

TEST_CASE("validation matrix") {
    constexpr std::size_t n = 5;
    const std::vector<RuleKind> reactive(n, RuleKind::ReactiveThreshold);
    const std::vector<RuleKind> probabilistic(n, RuleKind::ProbabilisticReactive);
    const std::vector<RuleKind> commanded(n, RuleKind::Commanded);

    CHECK(validate_awareness(reactive_wiring(n), reactive).empty());
    const auto v = validate_awareness(reactive_wiring(n), probabilistic);
    CHECK(v.size() == n * n);
    CHECK(v.front().agent_id == 0);
    CHECK(v.back().agent_id == n - 1);
    CHECK(v.front().to_string() ==
          "agent 0: rule ProbabilisticReactive requires Ta0a0 not present in structure of awareness");
    CHECK(validate_awareness(peer_wiring(n), probabilistic).empty());
    CHECK(validate_awareness(controller_wiring(n), commanded).empty());
    CHECK(validate_awareness(reactive_wiring(n), commanded).size() == n);
    CHECK(validate_awareness(controller_wiring(n), reactive).empty());
    CHECK(validate_awareness(AwarenessDecl::for_agents(n), reactive).size() == n);
}

TEST_CASE("inconsistent declarations are rejected") {
    auto d = AwarenessDecl::for_agents(2);
    d.controller_channel[0] = true;
    CHECK_THROWS(derive_structure(d));
    d = AwarenessDecl::for_agents(2);
    d.peer_images[1].insert(2);
    CHECK_THROWS(derive_structure(d));
    d = AwarenessDecl::for_agents(2);
    CHECK_THROWS(validate_awareness(d, std::vector<RuleKind>(3, RuleKind::PassiveCycle)));
}
