#pragma once

// Parametric function families y_net(x) with exact jets.
//
// Parameter layouts (flat vectors, in this order):
//
//   Pade-[m/n]  w_1..w_m, b_1, w'_1..w'_n, b_2
//               y = (sum_j w_j x^j + b_1) / (sum_i w'_i x^i + b_2)
//   MLP-[[l_1,a_1],...,[l_K,a_K]]
//               per layer k: W_k (l_k x l_{k-1}, row-major, l_0 = 1), b_k;
//               then output weights v_1..v_{l_K}, output bias c.
//               h_k = a_k(W_k h_{k-1} + b_k), y = v . h_K + c
//               (one scalar bias shared by all neurons of a layer)
//   RBF-[l]     w_1..w_l, c_1..c_l, r_1..r_l, b
//               y = sum_j w_j exp(-(x - c_j)^2 / (2 s_j)) + b,  s_j = exp(r_j)
//   Leg-m       w_1..w_m, b        y = sum_j w_j P_j(x) + b
//   Poly-m      w_1..w_m, b        y = sum_j w_j x^j + b

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace varipade {

enum class FamilyKind { pade, mlp, rbf, legendre, poly };
enum class Activation { sigmoid, tanh };

struct Layer {
    int width = 0;
    Activation activation = Activation::sigmoid;
    bool operator==(const Layer&) const = default;
};

struct FamilySpec {
    FamilyKind kind = FamilyKind::poly;
    int pade_m = 0;
    int pade_n = 0;
    std::vector<Layer> layers;
    int centers = 0;
    int degree = 0;

    bool operator==(const FamilySpec&) const = default;
};

using ParamVector = std::vector<double>;

/// Value, x-derivative and parameter gradients of both at one point.
struct Jet {
    double y = 0.0;
    double dy_dx = 0.0;
    std::vector<double> grad_y;
    std::vector<double> grad_dy_dx;

    void resize(std::size_t n) {
        grad_y.assign(n, 0.0);
        grad_dy_dx.assign(n, 0.0);
    }
};

struct Interval {
    double lo = -1.0;
    double hi = 1.0;
};

/// Accepts `Pade-[m/n]`, `MLP-[[l,act],...]`, `RBF-[l]`, `Leg-m`, `Poly-m`.
/// The table spellings `Pade:m/n`, `RBF:[l]`, `Leg:m` are accepted too.
FamilySpec parse_structure(std::string_view text);

/// Canonical structure string, e.g. `Pade-[5/5]`.
std::string to_string(const FamilySpec& spec);

std::size_t param_count(const FamilySpec& spec);

/// Deterministic initial parameters. `domain` places the RBF centers and
/// sets their initial widths; the other families ignore it.
ParamVector init_params(const FamilySpec& spec, std::uint64_t seed, Interval domain = {});

/// Writes the jet into `out`, resizing its gradient arrays if necessary.
/// Throws PoleError when a Padé denominator has magnitude below 1e-8 and
/// OverflowError when any result is not finite.
void eval_jet(const FamilySpec& spec, std::span<const double> params, double x, Jet& out);

Jet eval_jet(const FamilySpec& spec, std::span<const double> params, double x);

/// Minimum |denominator| accepted by the Padé family.
inline constexpr double pade_pole_threshold = 1e-8;

}  // namespace varipade
