#include "segchain/rational.hpp"

#include "segchain/errors.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace segchain {

namespace {

bool is_integer_token(std::string_view s, bool allow_sign)
{
    if (s.empty())
        return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+'))
        i = 1;
    if (i == s.size())
        return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            return false;
    }
    return true;
}

mpz_class parse_integer(std::string_view s)
{
    std::string buf(s);
    if (!buf.empty() && buf[0] == '+')
        buf.erase(0, 1);
    return mpz_class(buf, 10);
}

mpz_class floor_of(const Rational& q)
{
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// Simplest rational in the closed interval [lo, hi], 0 <= lo <= hi.
Rational simplest_between(Rational lo, Rational hi)
{
    // Continued-fraction descent; the partial quotients are collected and
    // folded back at the end.
    std::vector<mpz_class> quotients;
    Rational tail;
    for (;;) {
        mpz_class a = floor_of(lo);
        if (Rational(a) == lo) {
            tail = a;
            break;
        }
        if (a < floor_of(hi) || Rational(a + 1) == hi) {
            tail = Rational(a + 1);
            break;
        }
        quotients.push_back(a);
        Rational next_lo = 1 / (hi - a);
        Rational next_hi = 1 / (lo - a);
        lo = next_lo;
        hi = next_hi;
    }
    Rational value = tail;
    for (auto it = quotients.rbegin(); it != quotients.rend(); ++it)
        value = Rational(*it) + 1 / value;
    value.canonicalize();
    return value;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        if (!is_integer_token(text, true))
            throw ParseError("not a rational: \"" + std::string(text) + "\"");
        return Rational(parse_integer(text));
    }
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!is_integer_token(num, true) || !is_integer_token(den, false))
        throw ParseError("not a rational: \"" + std::string(text) + "\"");
    mpz_class d = parse_integer(den);
    if (d == 0)
        throw ParseError("zero denominator: \"" + std::string(text) + "\"");
    Rational q(parse_integer(num), d);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& value)
{
    if (value.get_den() == 1)
        return value.get_num().get_str();
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

double to_double(const Rational& value)
{
    return mpq_get_d(value.get_mpq_t());
}

bool is_probability(const Rational& value)
{
    return sgn(value) >= 0 && value <= 1;
}

Rational power(const Rational& base, std::uint64_t exponent)
{
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Rational snap_to_rational(double value, double rel_tol)
{
    if (!std::isfinite(value) || !(rel_tol >= 0))
        throw DomainError("snap_to_rational: non-finite input");
    if (value == 0.0)
        return Rational(0);
    bool negative = value < 0;
    double magnitude = std::fabs(value);
    // Doubles convert to mpq exactly.
    Rational lo(magnitude * (1.0 - rel_tol));
    Rational hi(magnitude * (1.0 + rel_tol));
    Rational r = simplest_between(lo, hi);
    return negative ? Rational(-r) : r;
}

} // namespace segchain
