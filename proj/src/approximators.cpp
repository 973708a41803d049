#include "varipade/approximators.hpp"

#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "varipade/error.hpp"

namespace varipade {

namespace {

class StructureScanner {
public:
    explicit StructureScanner(std::string_view text) : text_(text) {}

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) throw SyntaxError(std::string("expected '") + c + "' in structure string", pos_);
    }

    std::string word() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) throw SyntaxError("expected a name in structure string", pos_);
        return std::string(text_.substr(start, pos_ - start));
    }

    int integer() {
        skip_space();
        const std::size_t start = pos_;
        long long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 1'000'000) throw InvalidStructure("structure size too large");
            ++pos_;
        }
        if (start == pos_) throw SyntaxError("expected a non-negative integer in structure string", pos_);
        return static_cast<int>(v);
    }

    void finish() {
        skip_space();
        if (pos_ != text_.size()) throw SyntaxError("trailing characters in structure string", pos_);
    }

    std::size_t position() const { return pos_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Reads `m` or `[m]`.
int bracketed_integer(StructureScanner& s) {
    if (s.accept('[')) {
        const int v = s.integer();
        s.expect(']');
        return v;
    }
    return s.integer();
}

const char* activation_name(Activation a) { return a == Activation::sigmoid ? "sigmoid" : "tanh"; }

// Activation value with first and second derivatives.
struct ActivationJet {
    double f, df, d2f;
};

ActivationJet activate(Activation a, double z) {
    if (a == Activation::sigmoid) {
        const double s = 1.0 / (1.0 + std::exp(-z));
        const double ds = s * (1.0 - s);
        return {s, ds, ds * (1.0 - 2.0 * s)};
    }
    const double t = std::tanh(z);
    const double dt = 1.0 - t * t;
    return {t, dt, -2.0 * t * dt};
}

void eval_pade(const FamilySpec& spec, std::span<const double> p, double x, Jet& out) {
    const int m = spec.pade_m;
    const int n = spec.pade_n;
    const std::size_t den0 = static_cast<std::size_t>(m) + 1;

    double num = p[static_cast<std::size_t>(m)];
    double dnum = 0.0;
    double xp = 1.0;  // x^(j-1)
    for (int j = 1; j <= m; ++j) {
        const double w = p[static_cast<std::size_t>(j - 1)];
        dnum += j * w * xp;
        xp *= x;
        num += w * xp;
    }
    double den = p[den0 + static_cast<std::size_t>(n)];
    double dden = 0.0;
    xp = 1.0;
    for (int i = 1; i <= n; ++i) {
        const double w = p[den0 + static_cast<std::size_t>(i - 1)];
        dden += i * w * xp;
        xp *= x;
        den += w * xp;
    }
    if (!(std::abs(den) >= pade_pole_threshold)) throw PoleError(x, den);

    const double inv = 1.0 / den;
    const double inv2 = inv * inv;
    const double inv3 = inv2 * inv;
    out.y = num * inv;
    out.dy_dx = dnum * inv - num * dden * inv2;

    // Numerator parameters.
    xp = 1.0;
    for (int j = 1; j <= m; ++j) {
        const double xj1 = xp;  // x^(j-1)
        xp *= x;
        out.grad_y[static_cast<std::size_t>(j - 1)] = xp * inv;
        out.grad_dy_dx[static_cast<std::size_t>(j - 1)] = j * xj1 * inv - xp * dden * inv2;
    }
    out.grad_y[static_cast<std::size_t>(m)] = inv;
    out.grad_dy_dx[static_cast<std::size_t>(m)] = -dden * inv2;

    // Denominator parameters.
    xp = 1.0;
    for (int i = 1; i <= n; ++i) {
        const double xi1 = xp;
        xp *= x;
        const std::size_t k = den0 + static_cast<std::size_t>(i - 1);
        out.grad_y[k] = -num * xp * inv2;
        out.grad_dy_dx[k] = -dnum * xp * inv2 - num * i * xi1 * inv2 + 2.0 * num * dden * xp * inv3;
    }
    const std::size_t kb = den0 + static_cast<std::size_t>(n);
    out.grad_y[kb] = -num * inv2;
    out.grad_dy_dx[kb] = -dnum * inv2 + 2.0 * num * dden * inv3;
}

// Forward pass carries (value, d/dx) per neuron; two reverse sweeps give the
// parameter gradients of y and of dy/dx.
void eval_mlp(const FamilySpec& spec, std::span<const double> p, double x, Jet& out) {
    struct LayerState {
        std::vector<double> z, s;  // pre-activation and its x-derivative
        std::vector<double> h, t;  // activation and its x-derivative
        std::vector<ActivationJet> act;
    };
    thread_local std::vector<LayerState> layers;
    thread_local std::vector<double> h_adj, t_adj, h_adj_next, t_adj_next;

    const std::size_t depth = spec.layers.size();
    layers.resize(depth);

    // Forward.
    std::size_t offset = 0;
    std::size_t in_width = 1;
    for (std::size_t k = 0; k < depth; ++k) {
        const std::size_t width = static_cast<std::size_t>(spec.layers[k].width);
        LayerState& L = layers[k];
        L.z.assign(width, 0.0);
        L.s.assign(width, 0.0);
        L.h.resize(width);
        L.t.resize(width);
        L.act.resize(width);
        const double bias = p[offset + width * in_width];
        for (std::size_t i = 0; i < width; ++i) {
            const double* row = p.data() + offset + i * in_width;
            double z = bias, s = 0.0;
            if (k == 0) {
                z += row[0] * x;
                s = row[0];
            } else {
                const LayerState& prev = layers[k - 1];
                for (std::size_t j = 0; j < in_width; ++j) {
                    z += row[j] * prev.h[j];
                    s += row[j] * prev.t[j];
                }
            }
            L.z[i] = z;
            L.s[i] = s;
            L.act[i] = activate(spec.layers[k].activation, z);
            L.h[i] = L.act[i].f;
            L.t[i] = L.act[i].df * s;
        }
        offset += width * in_width + 1;
        in_width = width;
    }
    const std::size_t out_w = offset;
    const LayerState& top = layers.back();
    double y = p[out_w + in_width];
    double dy = 0.0;
    for (std::size_t i = 0; i < in_width; ++i) {
        y += p[out_w + i] * top.h[i];
        dy += p[out_w + i] * top.t[i];
        out.grad_y[out_w + i] = top.h[i];
        out.grad_dy_dx[out_w + i] = top.t[i];
    }
    out.grad_y[out_w + in_width] = 1.0;
    out.grad_dy_dx[out_w + in_width] = 0.0;
    out.y = y;
    out.dy_dx = dy;

    // Reverse, once for each output.
    for (int which = 0; which < 2; ++which) {
        std::vector<double>& grad = which == 0 ? out.grad_y : out.grad_dy_dx;
        h_adj.assign(in_width, 0.0);
        t_adj.assign(in_width, 0.0);
        for (std::size_t i = 0; i < in_width; ++i) (which == 0 ? h_adj : t_adj)[i] = p[out_w + i];

        std::size_t end = out_w;
        for (std::size_t kk = depth; kk-- > 0;) {
            const std::size_t width = static_cast<std::size_t>(spec.layers[kk].width);
            const std::size_t fan_in = kk == 0 ? 1 : static_cast<std::size_t>(spec.layers[kk - 1].width);
            const std::size_t begin = end - (width * fan_in + 1);
            const LayerState& L = layers[kk];
            h_adj_next.assign(fan_in, 0.0);
            t_adj_next.assign(fan_in, 0.0);
            double bias_adj = 0.0;
            for (std::size_t i = 0; i < width; ++i) {
                const ActivationJet& a = L.act[i];
                const double z_adj = h_adj[i] * a.df + t_adj[i] * a.d2f * L.s[i];
                const double s_adj = t_adj[i] * a.df;
                bias_adj += z_adj;
                const double* row = p.data() + begin + i * fan_in;
                double* g = grad.data() + begin + i * fan_in;
                if (kk == 0) {
                    g[0] = z_adj * x + s_adj;
                } else {
                    const LayerState& prev = layers[kk - 1];
                    for (std::size_t j = 0; j < fan_in; ++j) {
                        g[j] = z_adj * prev.h[j] + s_adj * prev.t[j];
                        h_adj_next[j] += z_adj * row[j];
                        t_adj_next[j] += s_adj * row[j];
                    }
                }
            }
            grad[begin + width * fan_in] = bias_adj;
            std::swap(h_adj, h_adj_next);
            std::swap(t_adj, t_adj_next);
            end = begin;
        }
    }
}

void eval_rbf(const FamilySpec& spec, std::span<const double> p, double x, Jet& out) {
    const std::size_t l = static_cast<std::size_t>(spec.centers);
    double y = p[3 * l];
    double dy = 0.0;
    for (std::size_t j = 0; j < l; ++j) {
        const double w = p[j];
        const double d = x - p[l + j];
        const double sigma = std::exp(p[2 * l + j]);
        const double u = d * d / (2.0 * sigma);
        const double phi = std::exp(-u);
        const double dphi = -phi * d / sigma;
        y += w * phi;
        dy += w * dphi;
        out.grad_y[j] = phi;
        out.grad_dy_dx[j] = dphi;
        out.grad_y[l + j] = w * phi * d / sigma;
        out.grad_dy_dx[l + j] = w * phi * (1.0 - d * d / sigma) / sigma;
        out.grad_y[2 * l + j] = w * phi * u;
        out.grad_dy_dx[2 * l + j] = -w * d * phi * (u - 1.0) / sigma;
    }
    out.grad_y[3 * l] = 1.0;
    out.grad_dy_dx[3 * l] = 0.0;
    out.y = y;
    out.dy_dx = dy;
}

void eval_legendre(const FamilySpec& spec, std::span<const double> p, double x, Jet& out) {
    const int m = spec.degree;
    const std::size_t mb = static_cast<std::size_t>(m);
    // P_{k+1} = ((2k+1) x P_k - k P_{k-1}) / (k+1), differentiated term by term.
    double p_prev = 1.0, p_cur = x;
    double d_prev = 0.0, d_cur = 1.0;
    double y = p[mb], dy = 0.0;
    for (int j = 1; j <= m; ++j) {
        if (j > 1) {
            const int k = j - 1;
            const double p_next = ((2 * k + 1) * x * p_cur - k * p_prev) / (k + 1);
            const double d_next = ((2 * k + 1) * (p_cur + x * d_cur) - k * d_prev) / (k + 1);
            p_prev = p_cur;
            p_cur = p_next;
            d_prev = d_cur;
            d_cur = d_next;
        }
        const std::size_t idx = static_cast<std::size_t>(j - 1);
        y += p[idx] * p_cur;
        dy += p[idx] * d_cur;
        out.grad_y[idx] = p_cur;
        out.grad_dy_dx[idx] = d_cur;
    }
    out.grad_y[mb] = 1.0;
    out.grad_dy_dx[mb] = 0.0;
    out.y = y;
    out.dy_dx = dy;
}

void eval_poly(const FamilySpec& spec, std::span<const double> p, double x, Jet& out) {
    const int m = spec.degree;
    double y = p[static_cast<std::size_t>(m)], dy = 0.0;
    double xp = 1.0;
    for (int j = 1; j <= m; ++j) {
        const std::size_t idx = static_cast<std::size_t>(j - 1);
        const double xj1 = xp;
        xp *= x;
        y += p[idx] * xp;
        dy += j * p[idx] * xj1;
        out.grad_y[idx] = xp;
        out.grad_dy_dx[idx] = j * xj1;
    }
    out.grad_y[static_cast<std::size_t>(m)] = 1.0;
    out.grad_dy_dx[static_cast<std::size_t>(m)] = 0.0;
    out.y = y;
    out.dy_dx = dy;
}

void validate(const FamilySpec& spec) {
    switch (spec.kind) {
        case FamilyKind::pade:
            if (spec.pade_m < 0 || spec.pade_n < 0) throw InvalidStructure("Pade degrees must be non-negative");
            break;
        case FamilyKind::mlp:
            if (spec.layers.empty()) throw InvalidStructure("MLP needs at least one layer");
            for (const Layer& l : spec.layers)
                if (l.width <= 0) throw InvalidStructure("MLP layer width must be positive");
            break;
        case FamilyKind::rbf:
            if (spec.centers <= 0) throw InvalidStructure("RBF needs at least one center");
            break;
        case FamilyKind::legendre:
        case FamilyKind::poly:
            if (spec.degree <= 0) throw InvalidStructure("degree must be positive");
            break;
    }
}

}  // namespace

FamilySpec parse_structure(std::string_view text) {
    StructureScanner s(text);
    const std::string name = lower(s.word());
    if (!s.accept('-') && !s.accept(':')) throw SyntaxError("expected '-' after family name", s.position());

    FamilySpec spec;
    if (name == "pade") {
        spec.kind = FamilyKind::pade;
        const bool bracket = s.accept('[');
        spec.pade_m = s.integer();
        s.expect('/');
        spec.pade_n = s.integer();
        if (bracket) s.expect(']');
    } else if (name == "mlp" || name == "mpl") {
        spec.kind = FamilyKind::mlp;
        s.expect('[');
        do {
            s.expect('[');
            Layer layer;
            layer.width = s.integer();
            s.expect(',');
            const std::size_t at = s.position();
            const std::string act = lower(s.word());
            if (act == "sigmoid") layer.activation = Activation::sigmoid;
            else if (act == "tanh") layer.activation = Activation::tanh;
            else throw InvalidStructure("unknown activation '" + act + "' at offset " + std::to_string(at));
            s.expect(']');
            spec.layers.push_back(layer);
        } while (s.accept(','));
        s.expect(']');
    } else if (name == "rbf") {
        spec.kind = FamilyKind::rbf;
        spec.centers = bracketed_integer(s);
    } else if (name == "leg" || name == "legendre") {
        spec.kind = FamilyKind::legendre;
        spec.degree = bracketed_integer(s);
    } else if (name == "poly") {
        spec.kind = FamilyKind::poly;
        spec.degree = bracketed_integer(s);
    } else {
        throw SyntaxError("unknown family '" + name + "'", 0);
    }
    s.finish();
    validate(spec);
    return spec;
}

std::string to_string(const FamilySpec& spec) {
    std::ostringstream out;
    switch (spec.kind) {
        case FamilyKind::pade: out << "Pade-[" << spec.pade_m << '/' << spec.pade_n << ']'; break;
        case FamilyKind::mlp:
            out << "MLP-[";
            for (std::size_t k = 0; k < spec.layers.size(); ++k) {
                if (k) out << ',';
                out << '[' << spec.layers[k].width << ',' << activation_name(spec.layers[k].activation) << ']';
            }
            out << ']';
            break;
        case FamilyKind::rbf: out << "RBF-[" << spec.centers << ']'; break;
        case FamilyKind::legendre: out << "Leg-" << spec.degree; break;
        case FamilyKind::poly: out << "Poly-" << spec.degree; break;
    }
    return out.str();
}

std::size_t param_count(const FamilySpec& spec) {
    switch (spec.kind) {
        case FamilyKind::pade: return static_cast<std::size_t>(spec.pade_m + spec.pade_n + 2);
        case FamilyKind::mlp: {
            std::size_t count = 0, fan_in = 1;
            for (const Layer& l : spec.layers) {
                const auto w = static_cast<std::size_t>(l.width);
                count += w * fan_in + 1;
                fan_in = w;
            }
            return count + fan_in + 1;
        }
        case FamilyKind::rbf: return 3 * static_cast<std::size_t>(spec.centers) + 1;
        case FamilyKind::legendre:
        case FamilyKind::poly: return static_cast<std::size_t>(spec.degree) + 1;
    }
    return 0;
}

ParamVector init_params(const FamilySpec& spec, std::uint64_t seed, Interval domain) {
    validate(spec);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> weight(0.0, 0.1);
    std::normal_distribution<double> small(0.0, 0.01);

    ParamVector p(param_count(spec), 0.0);
    switch (spec.kind) {
        case FamilyKind::pade: {
            const auto m = static_cast<std::size_t>(spec.pade_m);
            const auto n = static_cast<std::size_t>(spec.pade_n);
            for (std::size_t j = 0; j <= m; ++j) p[j] = weight(rng);
            for (std::size_t i = 0; i < n; ++i) p[m + 1 + i] = small(rng);
            p[m + 1 + n] = 1.0;
            break;
        }
        case FamilyKind::mlp: {
            std::size_t offset = 0, fan_in = 1;
            for (const Layer& l : spec.layers) {
                const auto w = static_cast<std::size_t>(l.width);
                for (std::size_t k = 0; k < w * fan_in; ++k) p[offset + k] = weight(rng);
                p[offset + w * fan_in] = 0.0;
                offset += w * fan_in + 1;
                fan_in = w;
            }
            for (std::size_t i = 0; i < fan_in; ++i) p[offset + i] = weight(rng);
            p[offset + fan_in] = 0.0;
            break;
        }
        case FamilyKind::rbf: {
            const auto l = static_cast<std::size_t>(spec.centers);
            const double spacing = (domain.hi - domain.lo) / static_cast<double>(l);
            for (std::size_t j = 0; j < l; ++j) {
                p[j] = weight(rng);
                p[l + j] = domain.lo + (static_cast<double>(j) + 0.5) * spacing;
                p[2 * l + j] = std::log(spacing);
            }
            p[3 * l] = 0.0;
            break;
        }
        case FamilyKind::legendre:
        case FamilyKind::poly: {
            const auto m = static_cast<std::size_t>(spec.degree);
            for (std::size_t j = 0; j < m; ++j) p[j] = weight(rng);
            p[m] = 0.0;
            break;
        }
    }
    return p;
}

void eval_jet(const FamilySpec& spec, std::span<const double> params, double x, Jet& out) {
    const std::size_t n = param_count(spec);
    if (params.size() != n)
        throw PreconditionError("parameter vector has " + std::to_string(params.size()) + " entries, " +
                                to_string(spec) + " needs " + std::to_string(n));
    if (out.grad_y.size() != n || out.grad_dy_dx.size() != n) out.resize(n);

    switch (spec.kind) {
        case FamilyKind::pade: eval_pade(spec, params, x, out); break;
        case FamilyKind::mlp: eval_mlp(spec, params, x, out); break;
        case FamilyKind::rbf: eval_rbf(spec, params, x, out); break;
        case FamilyKind::legendre: eval_legendre(spec, params, x, out); break;
        case FamilyKind::poly: eval_poly(spec, params, x, out); break;
    }

    bool finite = std::isfinite(out.y) && std::isfinite(out.dy_dx);
    for (std::size_t k = 0; finite && k < n; ++k)
        finite = std::isfinite(out.grad_y[k]) && std::isfinite(out.grad_dy_dx[k]);
    if (!finite) {
        std::ostringstream msg;
        msg << to_string(spec) << " produced a non-finite value at x=" << x;
        throw OverflowError(msg.str());
    }
}

Jet eval_jet(const FamilySpec& spec, std::span<const double> params, double x) {
    Jet jet;
    eval_jet(spec, params, x, jet);
    return jet;
}

}  // namespace varipade
