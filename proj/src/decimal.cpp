#include "nnrank/decimal.hpp"

#include <cmath>

#include "nnrank/errors.hpp"

namespace nnrank {

mpq_class to_rational(double x) {
    if (!std::isfinite(x)) throw InvalidArgument("to_rational: non-finite value");
    mpq_class q;
    mpq_set_d(q.get_mpq_t(), x);
    return q;
}

std::string exact_decimal(double x) {
    const mpq_class q = to_rational(x);
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    // den is 2^k for a double; num * 5^k / 10^k has a terminating expansion.
    const std::size_t k = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
    mpz_class scaled;
    mpz_ui_pow_ui(scaled.get_mpz_t(), 5, k);
    scaled *= abs(num);
    std::string digits = scaled.get_str();
    if (digits.size() <= k) digits.insert(0, k + 1 - digits.size(), '0');
    std::string out = sgn(num) < 0 ? "-" : "";
    out += digits.substr(0, digits.size() - k);
    if (k > 0) {
        std::string frac = digits.substr(digits.size() - k);
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        if (!frac.empty()) out += "." + frac;
    }
    return out;
}

mpq_class parse_decimal(std::string_view text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string digits;
    std::size_t frac_digits = 0;
    bool seen_point = false;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (c >= '0' && c <= '9') {
            digits += c;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            throw FormatError("bad decimal \"" + std::string(text) + "\"");
        }
    }
    if (digits.empty()) throw FormatError("bad decimal \"" + std::string(text) + "\"");
    mpz_class num(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
    mpq_class q(negative ? mpz_class(-num) : num, den);
    q.canonicalize();
    return q;
}

double parse_exact_double(std::string_view text) {
    const mpq_class q = parse_decimal(text);
    const double x = q.get_d();
    if (!std::isfinite(x) || to_rational(x) != q) {
        throw FormatError("decimal \"" + std::string(text) + "\" is not exactly representable");
    }
    return x;
}

}  // namespace nnrank
