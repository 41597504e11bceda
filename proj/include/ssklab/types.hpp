#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ssklab {

enum class Symmetry { real, complex };

std::string_view to_string(Symmetry s);
Symmetry parse_symmetry(std::string_view s);

// Real symmetric matrices carry one replica of the spin, Hermitian ones two;
// the Hermitian problem behaves like the real one at half the temperature.
inline double effective_beta(double beta, Symmetry s) {
    return s == Symmetry::real ? beta : 0.5 * beta;
}

enum class DisorderName { gaussian, rademacher, uniform, custom };

std::string_view to_string(DisorderName d);
DisorderName parse_disorder(std::string_view s);

// Entry distribution of the coupling matrix. Off-diagonal variance is fixed
// to one; w2 is the diagonal variance (N * E[M_ii^2]); W3, W4 are the third
// absolute and fourth moments of a unit-variance off-diagonal variable.
struct DisorderSpec {
    DisorderName name = DisorderName::gaussian;
    double offdiag_variance = 1.0;
    double w2 = 2.0;
    double W3 = 1.5957691216057308;  // sqrt(8/pi)
    double W4 = 3.0;

    static DisorderSpec gaussian(double w2 = 2.0);
    static DisorderSpec rademacher(double w2 = 2.0);
    static DisorderSpec uniform(double w2 = 2.0);
    static DisorderSpec custom(double w2, double W3, double W4);
    static DisorderSpec named(DisorderName name, double w2);

    void validate() const;
};

}  // namespace ssklab
