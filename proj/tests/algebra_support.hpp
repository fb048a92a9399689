#pragma once

// Random generators and a naive reference model for the word algebra.
// The model keeps polynomials as sets of string sequences and shares no
// code with the library.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "reflexgrid/algebra.hpp"

namespace testsupport {

namespace alg = reflexgrid::algebra;

inline const std::vector<alg::Atom>& atom_pool() {
    static const std::vector<alg::Atom> pool{alg::Atom('x'), alg::Atom('y'), alg::Atom('z'),
                                             alg::Atom('T'), alg::Atom('a', 0), alg::Atom('a', 1)};
    return pool;
}

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

    alg::Word word() {
        std::vector<alg::Atom> atoms;
        const std::size_t len = below(5); // 0..4
        for (std::size_t i = 0; i < len; ++i) atoms.push_back(atom_pool()[below(atom_pool().size())]);
        return alg::Word(std::move(atoms));
    }

    alg::Polynomial poly() {
        alg::Polynomial p;
        const std::size_t n = below(9); // 0..8 words
        for (std::size_t i = 0; i < n; ++i) p.insert(word());
        return p;
    }

    // Possibly with stray unit symbols and duplicate words.
    std::vector<alg::RawWord> raw_words() {
        std::vector<alg::RawWord> out;
        const std::size_t n = below(9);
        for (std::size_t i = 0; i < n; ++i) {
            alg::RawWord w;
            const std::size_t len = below(6);
            for (std::size_t k = 0; k < len; ++k) {
                if (below(4) == 0) {
                    w.emplace_back(alg::UnitSymbol{});
                } else {
                    w.emplace_back(atom_pool()[below(atom_pool().size())]);
                }
            }
            out.push_back(w);
            if (below(5) == 0) out.push_back(w);
        }
        return out;
    }
};

// Reference model.
using ModelWord = std::vector<std::string>;
using ModelPoly = std::set<ModelWord>;

inline ModelWord model_of(const alg::Word& w) {
    ModelWord out;
    for (const auto& a : w.atoms()) out.push_back(a.to_string());
    return out;
}

inline ModelPoly model_of(const alg::Polynomial& p) {
    ModelPoly out;
    for (const auto& w : p.words()) out.insert(model_of(w));
    return out;
}

inline ModelPoly model_mul(const ModelPoly& p, const ModelPoly& q) {
    ModelPoly out;
    for (const auto& a : p) {
        for (const auto& b : q) {
            ModelWord w = a;
            w.insert(w.end(), b.begin(), b.end());
            out.insert(w);
        }
    }
    return out;
}

inline ModelPoly model_add(ModelPoly p, const ModelPoly& q) {
    p.insert(q.begin(), q.end());
    return p;
}

} // namespace testsupport
