#include "markov/rat.hpp"

#include "markov/errors.hpp"

namespace markov {

static Int int_from_string(const std::string& text) {
    if (text.empty()) throw ParseError("empty integer literal");
    std::size_t start = (text[0] == '-') ? 1 : 0;
    if (start == text.size()) throw ParseError("bad integer literal: '" + text + "'");
    for (std::size_t i = start; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9')
            throw ParseError("bad integer literal: '" + text + "'");
    }
    return Int(text);
}

Rat rat_from_string(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Rat(int_from_string(text));
    const Int num = int_from_string(text.substr(0, slash));
    const Int den = int_from_string(text.substr(slash + 1));
    if (den <= 0) throw ParseError("denominator must be positive: '" + text + "'");
    return Rat(num, den);
}

std::string rat_to_string(const Rat& value) {
    const Int num = boost::multiprecision::numerator(value);
    const Int den = boost::multiprecision::denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace markov
