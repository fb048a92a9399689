#include "reflexgrid/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace reflexgrid::algebra {

namespace {

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Recursive-descent parser over the raw text. Products are evaluated eagerly,
// so the parser works on canonical polynomials throughout.
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Polynomial parse_all() {
        skip_space();
        if (at_end()) {
            fail("empty expression");
        }
        Polynomial result = expr();
        skip_space();
        if (!at_end()) {
            fail(std::string("unexpected '") + text_[pos_] + "'");
        }
        return result;
    }

    Word parse_word_only() {
        skip_space();
        Polynomial p = word();
        skip_space();
        if (!at_end()) {
            fail(std::string("unexpected '") + text_[pos_] + "' in word");
        }
        return *p.words().begin();
    }

    Atom parse_atom_only() {
        skip_space();
        Atom a = atom();
        if (!at_end()) {
            fail("trailing characters after atom");
        }
        return a;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_space() {
        while (!at_end() && is_space(text_[pos_])) {
            ++pos_;
        }
    }

    bool starts_primary() const {
        const char c = peek();
        return is_letter(c) || is_digit(c) || c == '(';
    }

    Polynomial expr() {
        Polynomial sum = product();
        skip_space();
        while (peek() == '+') {
            ++pos_;
            skip_space();
            sum += product();
            skip_space();
        }
        return sum;
    }

    Polynomial product() {
        Polynomial result = primary();
        for (;;) {
            skip_space();
            if (peek() == '*') {
                ++pos_;
                skip_space();
                if (!starts_primary()) {
                    fail("expected operand after '*'");
                }
                result = result * primary();
            } else if (starts_primary()) {
                result = result * primary();
            } else {
                break;
            }
        }
        if (peek() == '^') {
            ++pos_;
            skip_space();
            result = pow(result, natural());
        }
        return result;
    }

    Polynomial primary() {
        skip_space();
        const char c = peek();
        if (c == '(') {
            ++pos_;
            skip_space();
            if (peek() == ')') {
                fail("empty parentheses");
            }
            Polynomial inner = expr();
            skip_space();
            if (peek() != ')') {
                fail("expected ')'");
            }
            ++pos_;
            return inner;
        }
        if (is_letter(c) || is_digit(c)) {
            return word();
        }
        if (at_end()) {
            fail("unexpected end of expression");
        }
        fail(std::string("unexpected '") + c + "'");
    }

    // '1', '0' or a maximal run of atoms.
    Polynomial word() {
        const char c = peek();
        if (is_digit(c)) {
            const std::size_t start = pos_;
            while (is_digit(peek())) {
                ++pos_;
            }
            const std::string_view digits = text_.substr(start, pos_ - start);
            if (digits == "1") {
                return Polynomial::unit();
            }
            if (digits == "0") {
                return Polynomial::zero();
            }
            pos_ = start;
            fail("numeric literal '" + std::string(digits) + "' is not 0 or 1");
        }
        if (!is_letter(c)) {
            fail("expected a word");
        }
        std::vector<Atom> atoms;
        while (is_letter(peek())) {
            atoms.push_back(atom());
        }
        return Polynomial(Word(std::move(atoms)));
    }

    Atom atom() {
        if (!is_letter(peek())) {
            fail("expected a letter");
        }
        const char letter = text_[pos_++];
        if (!is_digit(peek())) {
            return Atom(letter);
        }
        const std::size_t start = pos_;
        std::uint64_t index = 0;
        while (is_digit(peek())) {
            index = index * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
            if (index > std::numeric_limits<std::uint32_t>::max()) {
                pos_ = start;
                fail("atom index out of range");
            }
            ++pos_;
        }
        return Atom(letter, static_cast<std::uint32_t>(index));
    }

    std::uint64_t natural() {
        if (!is_digit(peek())) {
            fail("exponent must be a natural number");
        }
        const std::size_t start = pos_;
        std::uint64_t n = 0;
        while (is_digit(peek())) {
            const auto digit = static_cast<std::uint64_t>(text_[pos_] - '0');
            if (n > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
                pos_ = start;
                fail("exponent out of range");
            }
            n = n * 10 + digit;
            ++pos_;
        }
        if (peek() == '.') {
            fail("exponent must be a natural number");
        }
        return n;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

Atom::Atom(char letter, std::optional<std::uint32_t> index) : letter_(letter), index_(index) {
    if (!is_letter(letter)) {
        throw std::invalid_argument(std::string("atom letter must be alphabetic, got '") + letter + "'");
    }
}

Atom Atom::parse(std::string_view text) { return Parser(text).parse_atom_only(); }

std::string Atom::to_string() const {
    std::string s(1, letter_);
    if (index_) {
        s += std::to_string(*index_);
    }
    return s;
}

Word Word::parse(std::string_view text) { return Parser(text).parse_word_only(); }

Word Word::operator*(const Word& rhs) const {
    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size() + rhs.atoms_.size());
    atoms.insert(atoms.end(), atoms_.begin(), atoms_.end());
    atoms.insert(atoms.end(), rhs.atoms_.begin(), rhs.atoms_.end());
    return Word(std::move(atoms));
}

std::string Word::to_string() const {
    if (atoms_.empty()) {
        return "1";
    }
    std::string s;
    for (const Atom& a : atoms_) {
        s += a.to_string();
    }
    return s;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (auto c = a.atoms_.size() <=> b.atoms_.size(); c != 0) {
        return c;
    }
    return std::lexicographical_compare_three_way(a.atoms_.begin(), a.atoms_.end(),
                                                  b.atoms_.begin(), b.atoms_.end());
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    words_.insert(rhs.words_.begin(), rhs.words_.end());
    return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
    Polynomial out;
    for (const Word& a : lhs.words_) {
        for (const Word& b : rhs.words_) {
            out.words_.insert(out.words_.end(), a * b);
        }
    }
    return out;
}

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error("syntax error at column " + std::to_string(position + 1) + ": " + message),
      position_(position) {}

Word normalize_word(const RawWord& raw) {
    std::vector<Atom> atoms;
    atoms.reserve(raw.size());
    for (const Symbol& s : raw) {
        if (const Atom* a = std::get_if<Atom>(&s)) {
            atoms.push_back(*a);
        }
    }
    return Word(std::move(atoms));
}

Polynomial normalize(std::span<const RawWord> raw_words) {
    Polynomial out;
    for (const RawWord& w : raw_words) {
        out.insert(normalize_word(w));
    }
    return out;
}

Polynomial normalize(const Polynomial& p) { return p; }

Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }

Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }

Polynomial pow(const Polynomial& p, std::uint64_t n) {
    Polynomial result = Polynomial::unit();
    if (n == 0 || p == Polynomial::unit()) {
        return result;
    }
    if (p.is_zero()) {
        return p;
    }
    // Square-and-multiply is valid because the product is associative;
    // multiplying by powers of the same p keeps the operand order intact.
    Polynomial base = p;
    for (;;) {
        if (n & 1U) {
            result = result * base;
        }
        n >>= 1U;
        if (n == 0) {
            break;
        }
        base = base * base;
    }
    return result;
}

Polynomial apply_awareness(const Polynomial& omega, std::span<const Atom> observers) {
    if (observers.empty()) {
        throw std::invalid_argument("apply_awareness: observer list is empty");
    }
    Polynomial factor = Polynomial::unit();
    for (const Atom& a : observers) {
        factor.insert(Word{a});
    }
    return omega * factor;
}

bool equals(const Polynomial& p, const Polynomial& q) { return p == q; }

bool contains_word(const Polynomial& p, const Word& w) { return p.contains(w); }

bool contains_word(const Polynomial& p, const RawWord& w) { return p.contains(normalize_word(w)); }

std::size_t reflection_depth(const Word& w) {
    if (w.is_unit()) {
        throw std::invalid_argument("reflection_depth: the unit word has no root process");
    }
    return w.size() - 1;
}

std::string to_canonical_string(const Polynomial& p) {
    if (p.is_zero()) {
        return "0";
    }
    std::string s;
    for (const Word& w : p.words()) {
        if (!s.empty()) {
            s += " + ";
        }
        s += w.to_string();
    }
    return s;
}

Polynomial parse_expression(std::string_view text) { return Parser(text).parse_all(); }

} // namespace reflexgrid::algebra
