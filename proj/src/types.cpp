#include "ssklab/types.hpp"

#include <cmath>

#include "ssklab/errors.hpp"

namespace ssklab {

std::string_view to_string(Symmetry s) { return s == Symmetry::real ? "real" : "complex"; }

Symmetry parse_symmetry(std::string_view s) {
    if (s == "real") return Symmetry::real;
    if (s == "complex") return Symmetry::complex;
    throw ValidationError("unknown symmetry '" + std::string(s) + "' (expected real|complex)");
}

std::string_view to_string(DisorderName d) {
    switch (d) {
        case DisorderName::gaussian: return "gaussian";
        case DisorderName::rademacher: return "rademacher";
        case DisorderName::uniform: return "uniform";
        case DisorderName::custom: return "custom";
    }
    return "custom";
}

DisorderName parse_disorder(std::string_view s) {
    if (s == "gaussian") return DisorderName::gaussian;
    if (s == "rademacher") return DisorderName::rademacher;
    if (s == "uniform") return DisorderName::uniform;
    if (s == "custom") return DisorderName::custom;
    throw ValidationError("unknown disorder '" + std::string(s) +
                          "' (expected gaussian|rademacher|uniform|custom)");
}

DisorderSpec DisorderSpec::gaussian(double w2) {
    return DisorderSpec{DisorderName::gaussian, 1.0, w2, std::sqrt(8.0 / M_PI), 3.0};
}

DisorderSpec DisorderSpec::rademacher(double w2) {
    return DisorderSpec{DisorderName::rademacher, 1.0, w2, 1.0, 1.0};
}

DisorderSpec DisorderSpec::uniform(double w2) {
    // Uniform on [-sqrt3, sqrt3]: E|x|^3 = 3 sqrt3 / 4, E x^4 = 9/5.
    return DisorderSpec{DisorderName::uniform, 1.0, w2, 0.75 * std::sqrt(3.0), 1.8};
}

DisorderSpec DisorderSpec::custom(double w2, double W3, double W4) {
    return DisorderSpec{DisorderName::custom, 1.0, w2, W3, W4};
}

DisorderSpec DisorderSpec::named(DisorderName name, double w2) {
    switch (name) {
        case DisorderName::gaussian: return gaussian(w2);
        case DisorderName::rademacher: return rademacher(w2);
        case DisorderName::uniform: return uniform(w2);
        case DisorderName::custom: break;
    }
    throw ValidationError("custom disorder needs explicit moments");
}

void DisorderSpec::validate() const {
    if (offdiag_variance != 1.0) throw ValidationError("offdiag_variance must be exactly 1");
    if (!(w2 >= 0.0) || !std::isfinite(w2)) throw ValidationError("w2 must be finite and >= 0");
    if (!(W3 >= 0.0) || !std::isfinite(W3)) throw ValidationError("W3 must be finite and >= 0");
    if (!(W4 >= 1.0) || !std::isfinite(W4)) throw ValidationError("W4 must be finite and >= 1");
}

}  // namespace ssklab
