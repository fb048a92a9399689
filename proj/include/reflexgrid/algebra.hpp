#pragma once

// Algebra of reflexive processes: words over atoms, Boolean-coefficient
// polynomials, the non-commutative product and the operator of awareness.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace reflexgrid::algebra {

/// One symbol of a word: a single letter with an optional numeric index
/// (`T`, `x`, `a12`). `a` and `a0` are different atoms.
class Atom {
public:
    Atom(char letter, std::optional<std::uint32_t> index = std::nullopt);

    /// Parses exactly one atom, e.g. "a12". Throws ParseError otherwise.
    static Atom parse(std::string_view text);

    char letter() const noexcept { return letter_; }
    std::optional<std::uint32_t> index() const noexcept { return index_; }

    std::string to_string() const;

    friend bool operator==(const Atom&, const Atom&) = default;
    // Letter (ASCII) first; an absent index sorts before any explicit one.
    friend std::strong_ordering operator<=>(const Atom&, const Atom&) = default;

private:
    char letter_;
    std::optional<std::uint32_t> index_;
};

/// Ordered atom sequence. The leftmost atom is the root process and each atom
/// to its right is one further level of reflection, so `Txy` is Y's image of
/// X's image of T. The empty word is the unit, printed "1".
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}
    Word(std::initializer_list<Atom> atoms) : atoms_(atoms) {}

    static Word unit() { return {}; }
    /// Parses a single word such as "Tyxy" or "1".
    static Word parse(std::string_view text);

    bool is_unit() const noexcept { return atoms_.empty(); }
    std::size_t size() const noexcept { return atoms_.size(); }
    std::span<const Atom> atoms() const noexcept { return atoms_; }

    /// Concatenation, left operand's atoms first.
    Word operator*(const Word& rhs) const;

    std::string to_string() const;

    friend bool operator==(const Word&, const Word&) = default;
    /// Canonical order: shorter words first, then lexicographic by atom.
    friend std::strong_ordering operator<=>(const Word& a, const Word& b);

private:
    std::vector<Atom> atoms_;
};

/// The "1" placeholder inside an unnormalized word.
struct UnitSymbol {
    friend bool operator==(UnitSymbol, UnitSymbol) = default;
};
using Symbol = std::variant<UnitSymbol, Atom>;
/// A word as written, possibly containing "1" placeholders (`T·1·1·x`).
using RawWord = std::vector<Symbol>;

/// A finite set of words; membership means Boolean coefficient 1. The set is
/// kept in canonical order, so two polynomials are equal exactly when their
/// word sets are.
class Polynomial {
public:
    /// The zero polynomial.
    Polynomial() = default;
    explicit Polynomial(Word word) { words_.insert(std::move(word)); }
    Polynomial(std::initializer_list<Word> words) : words_(words) {}

    static Polynomial zero() { return {}; }
    static Polynomial unit() { return Polynomial(Word::unit()); }

    bool is_zero() const noexcept { return words_.empty(); }
    std::size_t size() const noexcept { return words_.size(); }
    const std::set<Word>& words() const noexcept { return words_; }
    bool contains(const Word& word) const { return words_.contains(word); }

    void insert(Word word) { words_.insert(std::move(word)); }

    Polynomial& operator+=(const Polynomial& rhs);
    friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
    friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::set<Word> words_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    /// Zero-based character offset into the parsed text.
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Strips "1" placeholders; a word made only of placeholders collapses to the
/// unit word.
Word normalize_word(const RawWord& raw);
/// Builds the canonical polynomial of a list of written words, merging
/// duplicates.
Polynomial normalize(std::span<const RawWord> raw_words);
/// Canonical representative; a Polynomial is already canonical, so this is
/// the identity and exists for symmetry with the raw overload.
Polynomial normalize(const Polynomial& p);

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
/// n-fold product; pow(p, 0) is the unit polynomial for every p, zero included.
Polynomial pow(const Polynomial& p, std::uint64_t n);

/// One awareness step: omega * (1 + sum of observers). Throws
/// std::invalid_argument when observers is empty.
Polynomial apply_awareness(const Polynomial& omega, std::span<const Atom> observers);

bool equals(const Polynomial& p, const Polynomial& q);
bool contains_word(const Polynomial& p, const Word& w);
bool contains_word(const Polynomial& p, const RawWord& w);

/// Levels of reflection above the root (atom count minus one). Throws
/// std::invalid_argument on the unit word.
std::size_t reflection_depth(const Word& w);

/// Words joined by " + " in canonical order; the zero polynomial is "0".
std::string to_canonical_string(const Polynomial& p);

/// Parses the expression grammar:
///
///     expr    := product ('+' product)*
///     product := primary ('*'? primary)* ('^' nat)?
///     primary := word | '0' | '(' expr ')'
///     word    := '1' | atom+
///     atom    := letter digit*
///
/// Juxtaposition is multiplication and the exponent applies to the whole
/// product to its left. Whitespace separates tokens, so "x 1" is x·1 while
/// "x1" is the single atom x1.
Polynomial parse_expression(std::string_view text);

} // namespace reflexgrid::algebra
